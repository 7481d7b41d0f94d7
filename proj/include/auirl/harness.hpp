#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "auirl/agent.hpp"
#include "auirl/env.hpp"
#include "auirl/oracle.hpp"

namespace auirl {

inline constexpr int kDefaultWindow = 150;

struct EpisodeStats {
  std::int64_t episode = 0;
  int steps = 0;
  double score = 0.0;  // cumulative reward, completion bonus included
  double terminal_alignment = 0.0;
  double epsilon = 0.0;
  Termination termination = Termination::None;
};

struct Summary {
  double mean_steps = 0, std_steps = 0;
  double mean_score = 0, std_score = 0;
  double mean_alignment = 0, std_alignment = 0;
};

struct RunReport {
  std::string phase;  // "train" or "eval"
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t domain_hash = 0;
  int window = kDefaultWindow;
  std::vector<EpisodeStats> episodes;
  Eigen::VectorXd ma_steps;
  Eigen::VectorXd ma_score;
  Summary summary;
};

/** Everything needed to run the training and evaluation protocols. */
struct Experiment {
  DomainSpec domain;
  GeneralityModel model;
  Hyperparams hyperparams;
  EnvParams env;  // env.reward.sigma and env.seed are the run's sigma and seed
  std::int64_t eval_episodes = 1000;
  int window = kDefaultWindow;
  std::vector<double> sigmas = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::int64_t created_unix = 0;
};

struct TrainResult {
  QTable qtable;
  RunReport report;
};

/** Trailing mean; element i averages elements max(0, i - window + 1) ..= i. */
Eigen::VectorXd moving_average(const Eigen::Ref<const Eigen::VectorXd> &series, int window);

Summary summarize(const std::vector<EpisodeStats> &episodes);

/** Runs hyperparams.episodes epsilon-greedy Q-learning episodes. */
TrainResult train(const Experiment &experiment);

/** Greedy (epsilon = 0) rollouts of a frozen table; never writes to it. */
RunReport evaluate(const QTable &q, const Experiment &experiment, std::int64_t episodes,
                   std::uint64_t seed);

struct SweepEntry {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  TrainResult trained;
  RunReport evaluation;
};

/** Independent train + evaluate per sigma, in list order. Runs on up to
 *  `workers` threads; results do not depend on the worker count. */
std::vector<SweepEntry> sigma_sweep(const Experiment &experiment, const std::vector<double> &sigmas,
                                    unsigned workers = 1);

/** base_seed XOR FNV-1a of sigma's shortest decimal form. */
std::uint64_t sigma_seed(std::uint64_t base_seed, double sigma);
/** Seed of the evaluation stream paired with a training seed. */
std::uint64_t evaluation_seed(std::uint64_t training_seed);

/**
 * Discounted return of following the table greedily from `start` in `env`:
 * sum over steps t (from 0) of gamma^t * reward_t.
 */
double greedy_return(const QTable &q, AdaptationEnv &env, const StateVector &start, double gamma);

struct OracleComparison {
  std::size_t states = 0;
  std::size_t within_tolerance = 0;
  double fraction = 0.0;
  double max_abs_error = 0.0;
  Eigen::VectorXd optimal;   // value-iteration optimum per state
  Eigen::VectorXd achieved;  // discounted greedy return per state
};

/** Greedy return of `q` from every state against the exact optimum. */
OracleComparison compare_with_oracle(const QTable &q, const Experiment &experiment,
                                     const ValueFunction &optimum, double tolerance);

/** `SOURCE_DATE_EPOCH` when set, otherwise the current time. */
std::int64_t creation_time();

/** Columns: episode,steps,score,terminal_alignment,epsilon,ma_steps,ma_score. */
std::string metrics_csv(const RunReport &report);
nlohmann::json summary_json(const RunReport &report);

}  // namespace auirl
