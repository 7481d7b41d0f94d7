#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace auirl {

/** Writes `content` to a sibling temp file, then renames it over `path`. */
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

/**
 * A group of output files published together. `stage` writes each file to a
 * temp name; `commit` renames them all into place. Anything not committed is
 * removed on destruction, so a failing command leaves no partial outputs.
 */
class StagedOutput {
public:
  StagedOutput() = default;
  StagedOutput(const StagedOutput &) = delete;
  StagedOutput &operator=(const StagedOutput &) = delete;
  ~StagedOutput();

  void stage(const std::filesystem::path &path, std::string_view content);
  void commit();

private:
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;  // temp, final
};

std::string read_file(const std::filesystem::path &path);
nlohmann::json read_json_file(const std::filesystem::path &path);

/** Shortest decimal form that round-trips (e.g. "0.25", "1"). */
std::string format_double(double value);

}  // namespace auirl
