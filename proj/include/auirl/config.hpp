#pragma once

#include <filesystem>

#include <json.hpp>

#include "auirl/harness.hpp"

namespace auirl {

/**
 * Builds an experiment from a configuration document:
 *
 *   domain       name, variables[{name, values[]}]
 *   reward       sigma, bonus_value, bonus_step_threshold,
 *                bonus_rule ("on_optimal" | "within_threshold"),
 *                modeled_variables, weights{clicks,scrolls,events},
 *                one of: table (generality JSON), interactions (CSV),
 *                constant (number); default constant 0.5
 *   hyperparams  alpha, gamma, episodes, eps_start, eps_min, decay_episodes
 *   run          seed, max_steps, eval_episodes, window, sigmas[]
 *
 * Relative file paths resolve against `base_dir`. Unknown keys are errors.
 */
Experiment load_experiment(const nlohmann::json &document,
                           const std::filesystem::path &base_dir = {});
Experiment load_experiment_file(const std::filesystem::path &path);

/** Modeled variables for fitting: `reward.modeled_variables` if present,
 *  else whichever of layout/theme the domain has, else every variable. */
std::vector<std::string> configured_modeled_variables(const nlohmann::json &document,
                                                      const DomainSpec &domain);
EngagementWeights configured_weights(const nlohmann::json &document);

BonusRule parse_bonus_rule(const std::string &text);
const char *to_string(BonusRule rule);

}  // namespace auirl
