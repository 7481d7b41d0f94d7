#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "auirl/domain.hpp"
#include "auirl/reward.hpp"

namespace auirl {

/** Largest state space the exact oracles will enumerate. */
inline constexpr std::size_t kOracleStateLimit = 100000;

/**
 * The adaptation MDP written out as explicit tables, built from the domain and
 * reward definitions alone (it does not run the environment).
 *
 * With BonusRule::WithinThreshold the completion bonus depends on how many
 * steps were taken, so the state is augmented with a step layer
 * c in 0..threshold (steps taken, saturating at the threshold). With
 * BonusRule::OnOptimal a single layer suffices. The step cap is not modeled:
 * an optimal policy finishes within `variable_count` steps.
 */
class ExactMdp {
public:
  ExactMdp(const DomainSpec &domain, const GeneralityModel &model, const RewardParams &params,
           double gamma);

  const DomainSpec &domain() const { return domain_; }
  double gamma() const { return gamma_; }
  std::size_t layer_count() const { return layers_; }

  /** Value of taking `action` in (state, layer) given layered values V (layers x states). */
  double action_value(const Eigen::MatrixXd &values, StateIndex state, std::size_t layer,
                      ActionIndex action) const;

  /** Per-step reward of a ui index for a prefs index. */
  double reward(std::size_t ui, std::size_t prefs) const { return rewards_(ui, prefs); }
  bool is_optimal(std::size_t ui, std::size_t prefs) const { return optimal_(ui, prefs) != 0; }

private:
  DomainSpec domain_;
  RewardParams params_;
  double gamma_;
  std::size_t layers_;
  Eigen::Matrix<std::size_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> next_ui_;
  Eigen::MatrixXd rewards_;  // ui x prefs
  Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic> optimal_;
};

struct ValueFunction {
  Eigen::VectorXd values;  // optimal value of each fresh state (step layer 0)
  Eigen::MatrixXd layers;  // layer x state
  double gamma = 0.0;
  double residual = 0.0;
  std::vector<double> residual_history;  // sup-norm change per sweep

  double operator()(StateIndex s) const { return values(static_cast<Eigen::Index>(s)); }
};

/** Synchronous Bellman optimality sweeps until the sup-norm change is below
 *  `tol`. Throws Convergence after `max_sweeps`. */
ValueFunction value_iteration(const ExactMdp &mdp, double tol = 1e-10, int max_sweeps = 10000);
ValueFunction value_iteration(const DomainSpec &domain, const GeneralityModel &model,
                              const RewardParams &params, double gamma, double tol = 1e-10,
                              int max_sweeps = 10000);

/** Greedy action of the solved MDP in (state, layer); lowest index on ties. */
ActionIndex oracle_action(const ExactMdp &mdp, const ValueFunction &vf, StateIndex state,
                          std::size_t layer = 0);

/**
 * Fewest actions that can end an episode from this state: the smallest
 * Hamming distance from `ui` to a reward-optimal configuration, or 1 if `ui`
 * is already optimal (a no-op is still needed to finish).
 */
int min_steps(const UiConfig &ui, const UserPrefs &prefs, const DomainSpec &domain,
              const GeneralityModel &model, const RewardParams &params);

}  // namespace auirl
