#include "auirl/env.hpp"

#include "auirl/error.hpp"

namespace auirl {

const char *to_string(Termination cause) {
  switch (cause) {
  case Termination::None: return "none";
  case Termination::OptimalReached: return "optimal_reached";
  case Termination::StepCap: return "step_cap";
  }
  return "none";
}

void EnvParams::validate() const {
  if (max_steps < 1) throw Error(ErrorKind::Validation, "max_steps must be >= 1", "run.max_steps");
  reward.validate();
}

RewardLandscape::RewardLandscape(const DomainSpec &domain, const GeneralityModel &model,
                                 const RewardParams &params)
    : domain_(domain), params_(params) {
  params_.validate();
  if (model.domain_hash() != domain.hash()) {
    throw Error(ErrorKind::DomainMismatch, "generality model was built for another domain");
  }
  const auto count = static_cast<Eigen::Index>(domain.ui_count());
  const auto vars = static_cast<Eigen::Index>(domain.variable_count());
  generality_.resize(count);
  digits_.resize(count, vars);
  for (Eigen::Index u = 0; u < count; ++u) {
    auto ui = decode_ui(static_cast<std::size_t>(u), domain);
    for (Eigen::Index v = 0; v < vars; ++v) digits_(u, v) = ui[static_cast<std::size_t>(v)];
    generality_(u) = model.score(UiConfig{ui});
  }
}

double RewardLandscape::reward(std::size_t ui_index, const std::vector<int> &prefs) const {
  const auto row = static_cast<Eigen::Index>(ui_index);
  std::size_t matches = 0;
  for (Eigen::Index v = 0; v < digits_.cols(); ++v) {
    matches += digits_(row, v) == prefs[static_cast<std::size_t>(v)];
  }
  const double individuality =
      static_cast<double>(matches) / static_cast<double>(digits_.cols());
  return blend(generality_(row), individuality, params_.sigma);
}

Eigen::VectorXd RewardLandscape::rewards(const std::vector<int> &prefs) const {
  Eigen::VectorXd out(generality_.size());
  for (Eigen::Index u = 0; u < out.size(); ++u) out(u) = reward(static_cast<std::size_t>(u), prefs);
  return out;
}

AdaptationEnv::AdaptationEnv(const DomainSpec &domain, const GeneralityModel &model,
                             const EnvParams &params)
    : landscape_(domain, model, params.reward), params_(params), rng_(params.seed) {
  params_.validate();
  episode_.done = true;
}

const StateVector &AdaptationEnv::reset() {
  const auto count = domain().ui_count();
  const auto ui = rng_.index(count);
  const auto prefs = rng_.index(count);
  return reset_to({UiConfig{decode_ui(ui, domain())}, UserPrefs{decode_ui(prefs, domain())}});
}

const StateVector &AdaptationEnv::reset_to(const StateVector &start) {
  encode_state(start, domain());  // validates
  episode_ = EpisodeState{};
  episode_.current = start;
  episode_.optimal_reward = landscape_.rewards(start.prefs.indices).maxCoeff();
  return episode_.current;
}

double AdaptationEnv::state_reward(const UiConfig &ui) const {
  return landscape_.reward(encode_ui(ui.indices, domain()), episode_.current.prefs.indices);
}

StepResult AdaptationEnv::step(ActionIndex action) {
  if (episode_.done) throw Error(ErrorKind::State, "episode already finished; call reset()");
  if (action >= domain().action_count()) {
    throw Error(ErrorKind::Validation, "action " + std::to_string(action) + " out of range");
  }
  episode_.current.ui = apply_action(episode_.current.ui, domain().actions()[action]);
  episode_.steps_taken += 1;

  const double value = state_reward(episode_.current.ui);
  const auto &reward = params_.reward;
  StepResult result{episode_.current, 0.0, false};
  if (value >= episode_.optimal_reward - kOptimalTolerance) {
    const bool bonus = reward.bonus_rule == BonusRule::OnOptimal ||
                       episode_.steps_taken <= reward.bonus_step_threshold;
    result.reward = value + (bonus ? reward.bonus_value : 0.0);
    episode_.termination = Termination::OptimalReached;
  } else if (episode_.steps_taken >= params_.max_steps) {
    episode_.termination = Termination::StepCap;
  }
  episode_.done = episode_.termination != Termination::None;
  result.done = episode_.done;
  return result;
}

}  // namespace auirl
