#include "auirl/config.hpp"

#include <fstream>
#include <set>

#include "auirl/error.hpp"
#include "auirl/io.hpp"

namespace auirl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json &node, const std::string &where, const std::set<std::string> &allowed) {
  if (!node.is_object()) throw Error(ErrorKind::Config, "expected an object", where);
  for (const auto &[key, value] : node.items()) {
    if (!allowed.count(key)) throw Error(ErrorKind::Config, "unknown key", where + "." + key);
  }
}

const json *section(const json &doc, const std::string &name) {
  if (!doc.contains(name)) return nullptr;
  return &doc[name];
}

double get_number(const json &node, const std::string &key, const std::string &where,
                  double fallback) {
  if (!node.contains(key)) return fallback;
  if (!node[key].is_number()) throw Error(ErrorKind::Config, "expected a number", where + "." + key);
  return node[key].get<double>();
}

std::int64_t get_integer(const json &node, const std::string &key, const std::string &where,
                         std::int64_t fallback) {
  if (!node.contains(key)) return fallback;
  if (!node[key].is_number_integer()) {
    throw Error(ErrorKind::Config, "expected an integer", where + "." + key);
  }
  return node[key].get<std::int64_t>();
}

fs::path resolve(const fs::path &base, const std::string &path) {
  fs::path p(path);
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

BonusRule parse_bonus_rule(const std::string &text) {
  if (text == "on_optimal") return BonusRule::OnOptimal;
  if (text == "within_threshold") return BonusRule::WithinThreshold;
  throw Error(ErrorKind::Config, "expected \"on_optimal\" or \"within_threshold\"",
              "reward.bonus_rule");
}

const char *to_string(BonusRule rule) {
  return rule == BonusRule::OnOptimal ? "on_optimal" : "within_threshold";
}

std::vector<std::string> configured_modeled_variables(const json &document,
                                                      const DomainSpec &domain) {
  const json *reward = section(document, "reward");
  if (reward && reward->contains("modeled_variables")) {
    const auto &list = (*reward)["modeled_variables"];
    if (!list.is_array()) throw Error(ErrorKind::Config, "expected an array", "reward.modeled_variables");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!list[i].is_string()) {
        throw Error(ErrorKind::Config, "expected a string",
                    "reward.modeled_variables[" + std::to_string(i) + "]");
      }
      names.push_back(list[i].get<std::string>());
    }
    resolve_variables(domain, names, "reward.modeled_variables");
    return names;
  }
  std::vector<std::string> names;
  for (const char *name : {"layout", "theme"}) {
    if (domain.find_variable(name)) names.emplace_back(name);
  }
  if (names.empty()) {
    for (const auto &var : domain.variables()) names.push_back(var.name);
  }
  return names;
}

EngagementWeights configured_weights(const json &document) {
  EngagementWeights w;
  const json *reward = section(document, "reward");
  if (!reward || !reward->contains("weights")) return w;
  const auto &node = (*reward)["weights"];
  check_keys(node, "reward.weights", {"clicks", "scrolls", "events"});
  w.clicks = get_number(node, "clicks", "reward.weights", w.clicks);
  w.scrolls = get_number(node, "scrolls", "reward.weights", w.scrolls);
  w.events = get_number(node, "events", "reward.weights", w.events);
  return w;
}

Experiment load_experiment(const json &document, const fs::path &base_dir) {
  check_keys(document, "config", {"domain", "reward", "hyperparams", "run"});
  auto domain = load_domain(document);

  RewardParams reward;
  std::optional<GeneralityModel> model;
  if (const json *node = section(document, "reward")) {
    const std::string where = "reward";
    check_keys(*node, where,
               {"sigma", "bonus_value", "bonus_step_threshold", "bonus_rule", "modeled_variables",
                "weights", "table", "interactions", "constant"});
    reward.sigma = get_number(*node, "sigma", where, reward.sigma);
    reward.bonus_value = get_number(*node, "bonus_value", where, reward.bonus_value);
    reward.bonus_step_threshold = static_cast<int>(
        get_integer(*node, "bonus_step_threshold", where, reward.bonus_step_threshold));
    if (node->contains("bonus_rule")) {
      if (!(*node)["bonus_rule"].is_string()) {
        throw Error(ErrorKind::Config, "expected a string", "reward.bonus_rule");
      }
      reward.bonus_rule = parse_bonus_rule((*node)["bonus_rule"].get<std::string>());
    }
    const int sources = node->contains("table") + node->contains("interactions") +
                        node->contains("constant");
    if (sources > 1) {
      throw Error(ErrorKind::Config, "give at most one of table, interactions, constant", where);
    }
    for (const char *key : {"table", "interactions"}) {
      if (node->contains(key) && !(*node)[key].is_string()) {
        throw Error(ErrorKind::Config, "expected a path string", where + "." + key);
      }
    }
    if (node->contains("table")) {
      auto path = resolve(base_dir, (*node)["table"].get<std::string>());
      model = GeneralityModel::from_json(read_json_file(path), domain);
    } else if (node->contains("interactions")) {
      auto path = resolve(base_dir, (*node)["interactions"].get<std::string>());
      std::ifstream in(path);
      if (!in) throw Error(ErrorKind::Io, "cannot open interactions file", path.string());
      model = fit_generality(ingest_interactions(in), domain,
                             configured_modeled_variables(document, domain),
                             configured_weights(document));
    } else if (node->contains("constant")) {
      model = GeneralityModel::constant(domain, get_number(*node, "constant", where, 0.5));
    }
  }
  reward.validate();
  if (!model) model = GeneralityModel::constant(domain, 0.5);

  Hyperparams hyper;
  if (const json *node = section(document, "hyperparams")) {
    const std::string where = "hyperparams";
    check_keys(*node, where,
               {"alpha", "gamma", "episodes", "eps_start", "eps_min", "decay_episodes"});
    hyper.alpha = get_number(*node, "alpha", where, hyper.alpha);
    hyper.gamma = get_number(*node, "gamma", where, hyper.gamma);
    hyper.episodes = get_integer(*node, "episodes", where, hyper.episodes);
    hyper.eps_start = get_number(*node, "eps_start", where, hyper.eps_start);
    hyper.eps_min = get_number(*node, "eps_min", where, hyper.eps_min);
    hyper.decay_episodes = get_integer(*node, "decay_episodes", where, hyper.decay_episodes);
  }
  hyper.validate();

  EnvParams env;
  env.reward = reward;
  Experiment experiment{std::move(domain), std::move(*model), hyper, env};
  if (const json *node = section(document, "run")) {
    const std::string where = "run";
    check_keys(*node, where, {"seed", "max_steps", "eval_episodes", "window", "sigmas"});
    if (node->contains("seed")) {
      if (!(*node)["seed"].is_number_unsigned() && !(*node)["seed"].is_number_integer()) {
        throw Error(ErrorKind::Config, "expected an integer", "run.seed");
      }
      experiment.env.seed = (*node)["seed"].get<std::uint64_t>();
    }
    experiment.env.max_steps =
        static_cast<int>(get_integer(*node, "max_steps", where, experiment.env.max_steps));
    experiment.eval_episodes = get_integer(*node, "eval_episodes", where, experiment.eval_episodes);
    experiment.window = static_cast<int>(get_integer(*node, "window", where, experiment.window));
    if (node->contains("sigmas")) {
      const auto &list = (*node)["sigmas"];
      if (!list.is_array() || list.empty()) {
        throw Error(ErrorKind::Config, "expected a nonempty array", "run.sigmas");
      }
      experiment.sigmas.clear();
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (!list[i].is_number()) {
          throw Error(ErrorKind::Config, "expected a number", "run.sigmas[" + std::to_string(i) + "]");
        }
        experiment.sigmas.push_back(list[i].get<double>());
      }
    }
  }
  experiment.env.validate();
  if (experiment.eval_episodes < 1) {
    throw Error(ErrorKind::Config, "must be >= 1", "run.eval_episodes");
  }
  if (experiment.window < 1) throw Error(ErrorKind::Config, "must be >= 1", "run.window");
  experiment.created_unix = creation_time();
  return experiment;
}

Experiment load_experiment_file(const fs::path &path) {
  return load_experiment(read_json_file(path), path.parent_path());
}

}  // namespace auirl
