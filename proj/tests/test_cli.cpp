#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "auirl/cli.hpp"
#include "auirl/io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "auirl");
  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = auirl::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name) {
  const auto dir = fs::temp_directory_path() / ("auirl_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

const std::string kSmall = AUIRL_SOURCE_DIR "/configs/small.json";
const std::string kAdaptive = AUIRL_SOURCE_DIR "/configs/adaptive_ui.json";

}  // namespace

TEST_CASE("train writes the table, metrics and summary") {
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const auto dir = scratch("train");
  auto r = cli({"train", "--config", kAdaptive, "--sigma", "1.0", "--seed", "42", "--episodes", "3000",
                "--out", (dir / "run1").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "run1" / "qtable.bin"));
  CHECK(fs::exists(dir / "run1" / "metrics.csv"));
  const auto summary = auirl::read_json_file(dir / "run1" / "summary.json");
  CHECK(summary["seed"] == 42);
  CHECK(summary["sigma"] == 1.0);
  CHECK(summary["episodes"] == 3000);

  r = cli({"train", "--config", kAdaptive, "--sigma", "1.0", "--seed", "42", "--episodes", "3000",
           "--out", (dir / "run2").string()});
  REQUIRE(r.code == 0);
  for (const char *file : {"qtable.bin", "metrics.csv", "summary.json"}) {
    CHECK(auirl::read_file(dir / "run1" / file) == auirl::read_file(dir / "run2" / file));
  }

  r = cli({"eval", "--config", kAdaptive, "--qtable", (dir / "run1" / "qtable.bin").string(),
           "--episodes", "50", "--out", (dir / "eval").string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["episodes"] == 50);
  CHECK(json::parse(r.out)["phase"] == "eval");
  CHECK(fs::exists(dir / "eval" / "eval_metrics.csv"));

  r = cli({"inspect", "--qtable", (dir / "run1" / "qtable.bin").string(), "--state",
           "layout=list,theme=dark,font_size=big,information=show|"
           "layout=list,theme=dark,font_size=big,information=hide"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("greedy: ") != std::string::npos);
  CHECK(r.out.find("information=hide") != std::string::npos);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4 + 14);
  fs::remove_all(dir);
}

TEST_CASE("verify passes on the small domain") {
  const auto dir = scratch("verify");
  const auto r = cli({"verify", "--config", kSmall, "--out", (dir / "verify.json").string()});
  CHECK(r.code == 0);
  const auto report = json::parse(r.out);
  CHECK(report["pass"] == true);
  CHECK(report["states"] == 36);
  CHECK(fs::exists(dir / "verify.json"));
  const auto strict = cli({"verify", "--config", kSmall, "--episodes", "5", "--fraction", "1.0"});
  CHECK(strict.code == 1);
  CHECK(json::parse(strict.out)["pass"] == false);
  fs::remove_all(dir);
}

TEST_CASE("sweep writes one directory per sigma") {
  const auto dir = scratch("sweep");
  const auto r = cli({"sweep", "--config", kSmall, "--sigmas", "0,1", "--episodes", "500",
                      "--workers", "2", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "sigma_0" / "qtable.bin"));
  CHECK(fs::exists(dir / "sigma_1" / "eval_summary.json"));
  CHECK(fs::exists(dir / "sweep.csv"));
  CHECK(auirl::read_json_file(dir / "sweep.json").size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("fit-reward writes a table that train accepts") {
  const auto dir = scratch("fit");
  auto r = cli({"fit-reward", "--config", kAdaptive, "--interactions",
                AUIRL_SOURCE_DIR "/data/synthetic_interactions.csv", "--out",
                (dir / "table.json").string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["combinations"] == 90);
  r = cli({"train", "--config", kAdaptive, "--reward-table", (dir / "table.json").string(),
           "--episodes", "200", "--out", (dir / "run").string()});
  CHECK(r.code == 0);
  fs::remove_all(dir);
}

TEST_CASE("failures print one json line and leave no outputs") {
  const auto dir = scratch("fail");
  auto r = cli({"train", "--config", kSmall, "--sigma", "2", "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["path"] == "reward.sigma");
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK_FALSE(fs::exists(dir / "qtable.bin"));

  r = cli({"train", "--config", "/nonexistent.json", "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err).contains("error"));

  r = cli({"train", "--bogus"});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err)["error"] == "usage");
  CHECK(cli({}).code == 2);

  r = cli({"inspect", "--qtable", "/nonexistent.bin", "--state", "x"});
  CHECK(r.code == 1);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("eval refuses a table from another domain") {
  const auto dir = scratch("mismatch");
  REQUIRE(cli({"train", "--config", kSmall, "--episodes", "100", "--out", dir.string()}).code == 0);
  const auto r = cli({"eval", "--config", kAdaptive, "--qtable", (dir / "qtable.bin").string()});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"] == "domain_mismatch");
  fs::remove_all(dir);
}
