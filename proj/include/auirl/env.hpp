#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "auirl/domain.hpp"
#include "auirl/reward.hpp"
#include "auirl/rng.hpp"

namespace auirl {

enum class Termination { None, OptimalReached, StepCap };

const char *to_string(Termination cause);

struct EnvParams {
  int max_steps = 25;
  RewardParams reward;
  std::uint64_t seed = 0;

  void validate() const;
};

/** Tolerance when comparing a per-step reward with the episode optimum. */
inline constexpr double kOptimalTolerance = 1e-9;

/**
 * Per-step reward of every UI configuration for a given set of preferences.
 * Generality is evaluated once per configuration at construction.
 */
class RewardLandscape {
public:
  RewardLandscape(const DomainSpec &domain, const GeneralityModel &model,
                  const RewardParams &params);

  const DomainSpec &domain() const { return domain_; }
  const RewardParams &params() const { return params_; }
  /** Generality score per ui index. */
  const Eigen::VectorXd &generality() const { return generality_; }

  double reward(std::size_t ui_index, const std::vector<int> &prefs) const;
  /** Reward of every ui index for `prefs`. */
  Eigen::VectorXd rewards(const std::vector<int> &prefs) const;

private:
  DomainSpec domain_;
  RewardParams params_;
  Eigen::VectorXd generality_;
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> digits_;
};

struct EpisodeState {
  StateVector current;
  int steps_taken = 0;
  double optimal_reward = 0.0;
  bool done = false;
  Termination termination = Termination::None;
};

struct StepResult {
  StateVector next;
  double reward = 0.0;
  bool done = false;
};

/**
 * Deterministic adaptation MDP. Actions overwrite one UI variable (or do
 * nothing); the preferences never change within an episode. An episode ends
 * when the UI reaches the best per-step reward attainable for the drawn
 * preferences, or at the step cap. The reward is paid on completion: the
 * per-step reward of the final UI plus the completion bonus; every other
 * step (including the capped last step) yields 0.
 */
class AdaptationEnv {
public:
  AdaptationEnv(const DomainSpec &domain, const GeneralityModel &model, const EnvParams &params);

  const DomainSpec &domain() const { return landscape_.domain(); }
  const EnvParams &params() const { return params_; }
  const RewardLandscape &landscape() const { return landscape_; }
  const EpisodeState &episode() const { return episode_; }

  /** Draws ui and prefs uniformly and starts a new episode. */
  const StateVector &reset();
  /** Starts a new episode from a given state. */
  const StateVector &reset_to(const StateVector &start);

  StepResult step(ActionIndex action);

  StateIndex state_index() const { return encode_state(episode_.current, domain()); }
  /** Per-step reward of `ui` under the current episode's preferences. */
  double state_reward(const UiConfig &ui) const;
  /** Number of configurations searched for the episode optimum. */
  std::size_t optimum_candidates() const { return domain().ui_count(); }

  Rng &rng() { return rng_; }

private:
  RewardLandscape landscape_;
  EnvParams params_;
  Rng rng_;
  EpisodeState episode_;
};

}  // namespace auirl
