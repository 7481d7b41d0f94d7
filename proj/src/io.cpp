#include "auirl/io.hpp"

#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "auirl/error.hpp"

namespace auirl {

namespace fs = std::filesystem;

namespace {

fs::path temp_name(const fs::path &path) {
  static std::atomic<unsigned> counter{0};
  auto name = "." + path.filename().string() + ".tmp." + std::to_string(::getpid()) + "." +
              std::to_string(counter++);
  return path.parent_path() / name;
}

void write_raw(const fs::path &path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open for writing", path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed", path.string());
}

}  // namespace

void write_file_atomic(const fs::path &path, std::string_view content) {
  StagedOutput out;
  out.stage(path, content);
  out.commit();
}

StagedOutput::~StagedOutput() {
  for (const auto &[temp, final_path] : staged_) {
    std::error_code ec;
    fs::remove(temp, ec);
  }
}

void StagedOutput::stage(const fs::path &path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create directory: " + ec.message(), path.string());
  }
  auto temp = temp_name(path);
  staged_.emplace_back(temp, path);
  write_raw(temp, content);
}

void StagedOutput::commit() {
  for (const auto &[temp, final_path] : staged_) {
    std::error_code ec;
    fs::rename(temp, final_path, ec);
    if (ec) throw Error(ErrorKind::Io, "rename failed: " + ec.message(), final_path.string());
  }
  staged_.clear();
}

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open for reading", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json read_json_file(const fs::path &path) {
  auto text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorKind::Config, std::string("invalid JSON: ") + e.what(), path.string());
  }
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace auirl
