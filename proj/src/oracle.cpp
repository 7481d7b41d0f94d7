#include "auirl/oracle.hpp"

#include <algorithm>
#include <limits>

#include "auirl/error.hpp"

namespace auirl {

namespace {

// Same tolerance the environment applies when deciding the optimum is reached.
constexpr double kTieTolerance = 1e-9;

}  // namespace

ExactMdp::ExactMdp(const DomainSpec &domain, const GeneralityModel &model,
                   const RewardParams &params, double gamma)
    : domain_(domain), params_(params), gamma_(gamma) {
  params_.validate();
  if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(ErrorKind::Validation, "gamma must lie in [0, 1)");
  if (domain.state_count() > kOracleStateLimit) {
    throw Error(ErrorKind::Validation, "state space of " + std::to_string(domain.state_count()) +
                                           " exceeds the oracle limit of " +
                                           std::to_string(kOracleStateLimit));
  }
  layers_ = params.bonus_rule == BonusRule::WithinThreshold
                ? static_cast<std::size_t>(params.bonus_step_threshold) + 1
                : 1;

  const auto count = domain.ui_count();
  const auto actions = domain.action_count();
  const auto n = static_cast<Eigen::Index>(count);
  next_ui_.resize(n, static_cast<Eigen::Index>(actions));
  std::vector<std::vector<int>> configs(count);
  for (std::size_t u = 0; u < count; ++u) configs[u] = decode_ui(u, domain);
  for (std::size_t u = 0; u < count; ++u) {
    for (std::size_t a = 0; a < actions; ++a) {
      auto next = apply_action(UiConfig{configs[u]}, domain.actions()[a]);
      next_ui_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(a)) =
          encode_ui(next.indices, domain);
    }
  }

  rewards_.resize(n, n);
  optimal_.resize(n, n);
  for (std::size_t p = 0; p < count; ++p) {
    const UserPrefs prefs{configs[p]};
    for (std::size_t u = 0; u < count; ++u) {
      rewards_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(p)) =
          combined_reward(UiConfig{configs[u]}, prefs, params_, model);
    }
    const double best = rewards_.col(static_cast<Eigen::Index>(p)).maxCoeff();
    for (std::size_t u = 0; u < count; ++u) {
      const auto r = rewards_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(p));
      optimal_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(p)) =
          r >= best - kTieTolerance ? 1 : 0;
    }
  }
}

double ExactMdp::action_value(const Eigen::MatrixXd &values, StateIndex state, std::size_t layer,
                              ActionIndex action) const {
  const auto count = domain_.ui_count();
  const auto ui = state / count;
  const auto prefs = state % count;
  const auto next = next_ui_(static_cast<Eigen::Index>(ui), static_cast<Eigen::Index>(action));
  if (is_optimal(next, prefs)) {
    // `layer` counts the steps already taken; this action is step layer + 1.
    const bool bonus = params_.bonus_rule == BonusRule::OnOptimal ||
                       layer + 1 <= static_cast<std::size_t>(params_.bonus_step_threshold);
    return reward(next, prefs) + (bonus ? params_.bonus_value : 0.0);
  }
  const auto next_layer = std::min(layer + 1, layers_ - 1);
  return gamma_ * values(static_cast<Eigen::Index>(next_layer),
                         static_cast<Eigen::Index>(next * count + prefs));
}

ValueFunction value_iteration(const ExactMdp &mdp, double tol, int max_sweeps) {
  if (!(tol > 0.0)) throw Error(ErrorKind::Validation, "tolerance must be positive");
  const auto states = mdp.domain().state_count();
  const auto actions = mdp.domain().action_count();
  const auto layers = static_cast<Eigen::Index>(mdp.layer_count());

  ValueFunction vf;
  vf.gamma = mdp.gamma();
  Eigen::MatrixXd current = Eigen::MatrixXd::Zero(layers, static_cast<Eigen::Index>(states));
  Eigen::MatrixXd next(current.rows(), current.cols());

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Eigen::Index layer = 0; layer < layers; ++layer) {
      for (std::size_t s = 0; s < states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < actions; ++a) {
          best = std::max(best, mdp.action_value(current, s, static_cast<std::size_t>(layer), a));
        }
        next(layer, static_cast<Eigen::Index>(s)) = best;
      }
    }
    const double residual = (next - current).cwiseAbs().maxCoeff();
    vf.residual_history.push_back(residual);
    current.swap(next);
    if (residual < tol) {
      vf.residual = residual;
      vf.values = current.row(0).transpose();
      vf.layers = std::move(current);
      return vf;
    }
  }
  throw Error(ErrorKind::Convergence,
              "value iteration did not converge within " + std::to_string(max_sweeps) + " sweeps");
}

ValueFunction value_iteration(const DomainSpec &domain, const GeneralityModel &model,
                              const RewardParams &params, double gamma, double tol,
                              int max_sweeps) {
  return value_iteration(ExactMdp(domain, model, params, gamma), tol, max_sweeps);
}

ActionIndex oracle_action(const ExactMdp &mdp, const ValueFunction &vf, StateIndex state,
                          std::size_t layer) {
  ActionIndex best_action = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (ActionIndex a = 0; a < mdp.domain().action_count(); ++a) {
    const double value = mdp.action_value(vf.layers, state, layer, a);
    if (value > best) {
      best = value;
      best_action = a;
    }
  }
  return best_action;
}

int min_steps(const UiConfig &ui, const UserPrefs &prefs, const DomainSpec &domain,
              const GeneralityModel &model, const RewardParams &params) {
  validate_indices(ui.indices, domain, "ui");
  validate_indices(prefs.indices, domain, "prefs");
  std::vector<double> rewards(domain.ui_count());
  std::vector<std::vector<int>> configs(domain.ui_count());
  for (std::size_t u = 0; u < domain.ui_count(); ++u) {
    configs[u] = decode_ui(u, domain);
    rewards[u] = combined_reward(UiConfig{configs[u]}, prefs, params, model);
  }
  const double best = *std::max_element(rewards.begin(), rewards.end());
  int fewest = std::numeric_limits<int>::max();
  for (std::size_t u = 0; u < domain.ui_count(); ++u) {
    if (rewards[u] < best - kTieTolerance) continue;
    int distance = 0;
    for (std::size_t v = 0; v < domain.variable_count(); ++v) {
      distance += configs[u][v] != ui.indices[v];
    }
    fewest = std::min(fewest, distance);
  }
  return std::max(fewest, 1);
}

}  // namespace auirl
