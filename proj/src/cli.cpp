#include "auirl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "auirl/config.hpp"
#include "auirl/error.hpp"
#include "auirl/harness.hpp"
#include "auirl/io.hpp"
#include "auirl/oracle.hpp"
#include "auirl/serve.hpp"

// After Eigen: <resolv.h>, pulled in here, defines an `_res` macro.
#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace auirl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string qtable;
  std::string out;
  std::string state;
  std::string sigmas;
  std::string interactions;
  std::string reward_table;
  std::string host = "127.0.0.1";
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> episodes;
  int port = 8080;
  unsigned workers = 1;
  double tolerance = 0.05;
  double required_fraction = 0.95;
};

std::shared_ptr<spdlog::logger> logger() {
  static auto instance = [] {
    auto log = spdlog::stderr_logger_st("auirl");
    log->set_pattern("[%l] %v");
    log->set_level(spdlog::level::warn);
    if (const char *level = std::getenv("AUI_RL_LOG")) {
      log->set_level(spdlog::level::from_str(level));
    }
    return log;
  }();
  return instance;
}

Experiment load_with_overrides(const Options &opt) {
  if (opt.config.empty()) throw Error(ErrorKind::Config, "--config is required");
  auto document = read_json_file(opt.config);
  if (!opt.reward_table.empty()) {
    auto &reward = document["reward"];
    reward.erase("interactions");
    reward.erase("constant");
    reward["table"] = fs::absolute(opt.reward_table).string();
  }
  auto experiment = load_experiment(document, fs::path(opt.config).parent_path());
  if (opt.sigma) {
    experiment.env.reward.sigma = *opt.sigma;
    experiment.env.reward.validate();
  }
  if (opt.seed) experiment.env.seed = *opt.seed;
  return experiment;
}

// Keeps the decay phase at the same fraction of training when the episode
// count is overridden.
void override_episodes(Hyperparams &h, std::int64_t episodes) {
  if (episodes < 1) throw Error(ErrorKind::Validation, "--episodes must be >= 1");
  const double fraction =
      static_cast<double>(h.decay_episodes) / static_cast<double>(h.episodes);
  h.episodes = episodes;
  h.decay_episodes = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::llround(fraction * static_cast<double>(episodes))), 0,
      episodes);
}

void stage_training(StagedOutput &staged, const fs::path &dir, const TrainResult &result) {
  staged.stage(dir / "qtable.bin", serialize_qtable(result.qtable));
  staged.stage(dir / "metrics.csv", metrics_csv(result.report));
  staged.stage(dir / "summary.json", summary_json(result.report).dump(2) + "\n");
}

void stage_evaluation(StagedOutput &staged, const fs::path &dir, const RunReport &report) {
  staged.stage(dir / "eval_metrics.csv", metrics_csv(report));
  staged.stage(dir / "eval_summary.json", summary_json(report).dump(2) + "\n");
}

int cmd_train(const Options &opt, std::ostream &out) {
  auto experiment = load_with_overrides(opt);
  if (opt.episodes) override_episodes(experiment.hyperparams, *opt.episodes);
  logger()->info("training sigma={} seed={} episodes={}", experiment.env.reward.sigma,
                 experiment.env.seed, experiment.hyperparams.episodes);
  auto result = train(experiment);
  StagedOutput staged;
  stage_training(staged, opt.out, result);
  staged.commit();
  out << summary_json(result.report).dump() << "\n";
  return 0;
}

Experiment experiment_for_table(const Options &opt, const QTable &q) {
  auto experiment = load_with_overrides(opt);
  q.check_domain(experiment.domain);
  // The table's own reward settings define the task it was trained on.
  const auto &meta = q.metadata();
  experiment.env.reward.bonus_value = meta.reward.bonus_value;
  experiment.env.reward.bonus_step_threshold = meta.reward.bonus_step_threshold;
  experiment.env.reward.bonus_rule = meta.reward.bonus_rule;
  experiment.env.max_steps = meta.max_steps;
  if (!opt.sigma) experiment.env.reward.sigma = meta.reward.sigma;
  experiment.env.validate();
  return experiment;
}

int cmd_eval(const Options &opt, std::ostream &out) {
  auto q = load_qtable(opt.qtable);
  auto experiment = experiment_for_table(opt, q);
  const auto episodes = opt.episodes.value_or(experiment.eval_episodes);
  const auto seed = opt.seed.value_or(evaluation_seed(q.metadata().seed));
  auto report = evaluate(q, experiment, episodes, seed);
  if (!opt.out.empty()) {
    StagedOutput staged;
    stage_evaluation(staged, opt.out, report);
    staged.commit();
  }
  out << summary_json(report).dump() << "\n";
  return 0;
}

std::vector<double> parse_sigmas(const std::string &text) {
  std::vector<double> sigmas;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      sigmas.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw Error(ErrorKind::Validation, "not a number: '" + item + "'", "--sigmas");
    }
  }
  if (sigmas.empty()) throw Error(ErrorKind::Validation, "empty list", "--sigmas");
  return sigmas;
}

int cmd_sweep(const Options &opt, std::ostream &out) {
  auto experiment = load_with_overrides(opt);
  if (opt.episodes) override_episodes(experiment.hyperparams, *opt.episodes);
  const auto sigmas = opt.sigmas.empty() ? experiment.sigmas : parse_sigmas(opt.sigmas);
  logger()->info("sweep over {} sigma values, {} episodes each", sigmas.size(),
                 experiment.hyperparams.episodes);
  auto entries = sigma_sweep(experiment, sigmas, opt.workers);

  StagedOutput staged;
  std::string table =
      "sigma,seed,train_mean_steps,train_mean_score,eval_mean_steps,eval_mean_score,"
      "eval_mean_alignment\n";
  json summary = json::array();
  for (const auto &e : entries) {
    const fs::path dir = fs::path(opt.out) / ("sigma_" + format_double(e.sigma));
    stage_training(staged, dir, e.trained);
    stage_evaluation(staged, dir, e.evaluation);
    const auto &t = e.trained.report.summary;
    const auto &v = e.evaluation.summary;
    table += format_double(e.sigma) + "," + std::to_string(e.seed) + "," +
             format_double(t.mean_steps) + "," + format_double(t.mean_score) + "," +
             format_double(v.mean_steps) + "," + format_double(v.mean_score) + "," +
             format_double(v.mean_alignment) + "\n";
    summary.push_back({{"train", summary_json(e.trained.report)},
                       {"eval", summary_json(e.evaluation)}});
  }
  staged.stage(fs::path(opt.out) / "sweep.csv", table);
  staged.stage(fs::path(opt.out) / "sweep.json", summary.dump(2) + "\n");
  staged.commit();
  out << table;
  return 0;
}

int cmd_verify(const Options &opt, std::ostream &out) {
  auto experiment = load_with_overrides(opt);
  std::optional<QTable> q;
  if (!opt.qtable.empty()) {
    q = load_qtable(opt.qtable);
    experiment = experiment_for_table(opt, *q);
  } else {
    if (opt.episodes) override_episodes(experiment.hyperparams, *opt.episodes);
    q = train(experiment).qtable;
  }
  const double gamma = q->metadata().hyperparams.gamma;
  ExactMdp mdp(experiment.domain, experiment.model, experiment.env.reward, gamma);
  const auto optimum = value_iteration(mdp);
  const auto cmp = compare_with_oracle(*q, experiment, optimum, opt.tolerance);
  const bool pass = cmp.fraction >= opt.required_fraction;
  json report = {{"states", cmp.states},
                 {"within_tolerance", cmp.within_tolerance},
                 {"fraction", cmp.fraction},
                 {"required_fraction", opt.required_fraction},
                 {"tolerance", opt.tolerance},
                 {"max_abs_error", cmp.max_abs_error},
                 {"value_iteration_sweeps", optimum.residual_history.size()},
                 {"value_iteration_residual", optimum.residual},
                 {"sigma", experiment.env.reward.sigma},
                 {"pass", pass}};
  if (!opt.out.empty()) write_file_atomic(opt.out, report.dump(2) + "\n");
  out << report.dump() << "\n";
  return pass ? 0 : 1;
}

int cmd_fit_reward(const Options &opt, std::ostream &out) {
  if (opt.config.empty()) throw Error(ErrorKind::Config, "--config is required");
  const auto document = read_json_file(opt.config);
  const auto domain = load_domain(document);
  std::ifstream in(opt.interactions);
  if (!in) throw Error(ErrorKind::Io, "cannot open interactions file", opt.interactions);
  const auto records = ingest_interactions(in);
  const auto model = fit_generality(records, domain, configured_modeled_variables(document, domain),
                                    configured_weights(document));
  write_file_atomic(opt.out, model.to_json(domain).dump(2) + "\n");
  out << json{{"records", records.size()},
              {"combinations", model.table().size()},
              {"fallback", model.fallback()},
              {"out", opt.out}}
             .dump()
      << "\n";
  return 0;
}

int cmd_inspect(const Options &opt, std::ostream &out) {
  auto q = load_qtable(opt.qtable);
  std::optional<DomainSpec> domain;
  if (!opt.config.empty()) {
    domain = load_domain(read_json_file(opt.config));
  } else if (!q.metadata().domain.is_null()) {
    domain = load_domain(q.metadata().domain);
  } else {
    throw Error(ErrorKind::Config, "table has no embedded domain; pass --config");
  }
  q.check_domain(*domain);
  const auto state = parse_state_literal(opt.state, *domain);
  const auto s = encode_state(state, *domain);
  const auto best = q.greedy_action(s);

  out << "state: " << format_state(state, *domain) << "\n";
  out << "state_index: " << s << "\n";
  out << "greedy: " << best << " " << action_name(*domain, domain->actions()[best]) << "\n";
  out << "q_row:\n";
  for (const auto &action : domain->actions()) {
    out << "  " << std::setw(3) << action.index << "  " << std::left << std::setw(24)
        << action_name(*domain, action) << std::right << " " << format_double(q(s, action.index))
        << "\n";
  }
  return 0;
}

httplib::Server *active_server = nullptr;

void stop_server(int) {
  if (active_server) active_server->stop();
}

int cmd_serve(const Options &opt, std::ostream &out) {
  auto q = load_qtable(opt.qtable);
  std::optional<DomainSpec> domain;
  if (!opt.config.empty()) {
    domain = load_domain(read_json_file(opt.config));
  } else if (!q.metadata().domain.is_null()) {
    domain = load_domain(q.metadata().domain);
  } else {
    throw Error(ErrorKind::Config, "table has no embedded domain; pass --config");
  }
  PolicyService service(*domain, std::move(q));
  auto server = make_server(service);
  if (!server->bind_to_port(opt.host, opt.port)) {
    throw Error(ErrorKind::Io, "cannot bind " + opt.host + ":" + std::to_string(opt.port));
  }
  out << json{{"listening", opt.host + ":" + std::to_string(opt.port)},
              {"domain_hash", service.domain().hash_hex()}}
             .dump()
      << std::endl;
  active_server = server.get();
  std::signal(SIGINT, stop_server);
  std::signal(SIGTERM, stop_server);
  server->listen_after_bind();
  active_server = nullptr;
  return 0;
}

void print_error(std::ostream &err, const std::string &kind, const std::string &message,
                 const std::string &path = {}) {
  json line = {{"error", kind}, {"message", message}};
  if (!path.empty()) line["path"] = path;
  err << line.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  Options opt;
  CLI::App app{"Q-learning toolkit for adaptive user interfaces", "auirl"};
  app.require_subcommand(1);

  auto add_config = [&](CLI::App *cmd, bool required) {
    auto *o = cmd->add_option("--config", opt.config, "Configuration JSON");
    if (required) o->required();
  };
  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--sigma", opt.sigma, "Blend weight of individuality (0..1)");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_option("--reward-table", opt.reward_table, "Generality table JSON");
  };

  auto *train_cmd = app.add_subcommand("train", "Train a Q-table for one sigma");
  add_config(train_cmd, true);
  add_common(train_cmd);
  train_cmd->add_option("--episodes", opt.episodes, "Training episodes");
  train_cmd->add_option("--out", opt.out, "Output directory")->required();

  auto *eval_cmd = app.add_subcommand("eval", "Evaluate a trained Q-table greedily");
  add_config(eval_cmd, true);
  add_common(eval_cmd);
  eval_cmd->add_option("--qtable", opt.qtable, "Q-table file")->required();
  eval_cmd->add_option("--episodes", opt.episodes, "Evaluation episodes");
  eval_cmd->add_option("--out", opt.out, "Output directory");

  auto *sweep_cmd = app.add_subcommand("sweep", "Train and evaluate for each sigma");
  add_config(sweep_cmd, true);
  add_common(sweep_cmd);
  sweep_cmd->add_option("--sigmas", opt.sigmas, "Comma-separated sigma values");
  sweep_cmd->add_option("--episodes", opt.episodes, "Training episodes per sigma");
  sweep_cmd->add_option("--workers", opt.workers, "Parallel sigma runs");
  sweep_cmd->add_option("--out", opt.out, "Output directory")->required();

  auto *verify_cmd = app.add_subcommand("verify", "Compare a greedy policy with value iteration");
  add_config(verify_cmd, true);
  add_common(verify_cmd);
  verify_cmd->add_option("--qtable", opt.qtable, "Q-table file (trains one when omitted)");
  verify_cmd->add_option("--episodes", opt.episodes, "Training episodes");
  verify_cmd->add_option("--tolerance", opt.tolerance, "Allowed |return - optimum|");
  verify_cmd->add_option("--fraction", opt.required_fraction, "Required share of states");
  verify_cmd->add_option("--out", opt.out, "Report JSON file");

  auto *fit_cmd = app.add_subcommand("fit-reward", "Fit the generality table from a CSV log");
  add_config(fit_cmd, true);
  fit_cmd->add_option("--interactions", opt.interactions, "Interaction CSV")->required();
  fit_cmd->add_option("--out", opt.out, "Output table JSON")->required();

  auto *inspect_cmd = app.add_subcommand("inspect", "Show the Q-row of a state");
  add_config(inspect_cmd, false);
  inspect_cmd->add_option("--qtable", opt.qtable, "Q-table file")->required();
  inspect_cmd->add_option("--state", opt.state, "ui|prefs literal, var=value pairs")->required();

  auto *serve_cmd = app.add_subcommand("serve", "Serve greedy decisions over HTTP");
  add_config(serve_cmd, false);
  serve_cmd->add_option("--qtable", opt.qtable, "Q-table file")->required();
  serve_cmd->add_option("--port", opt.port, "TCP port");
  serve_cmd->add_option("--host", opt.host, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    print_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(opt, out);
    if (eval_cmd->parsed()) return cmd_eval(opt, out);
    if (sweep_cmd->parsed()) return cmd_sweep(opt, out);
    if (verify_cmd->parsed()) return cmd_verify(opt, out);
    if (fit_cmd->parsed()) return cmd_fit_reward(opt, out);
    if (inspect_cmd->parsed()) return cmd_inspect(opt, out);
    if (serve_cmd->parsed()) return cmd_serve(opt, out);
  } catch (const Error &e) {
    print_error(err, to_string(e.kind()), e.what(), e.path());
    return 1;
  } catch (const std::exception &e) {
    print_error(err, "internal", e.what());
    return 1;
  }
  return 2;
}

}  // namespace auirl
