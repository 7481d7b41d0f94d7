#include <doctest.h>

#include "auirl/env.hpp"
#include "auirl/error.hpp"

using namespace auirl;

namespace {

EnvParams params_for(double sigma, std::uint64_t seed = 1) {
  EnvParams p;
  p.reward.sigma = sigma;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("reset is reproducible under a seed") {
  const auto d = adaptive_ui_domain();
  const auto g = GeneralityModel::constant(d, 0.5);
  AdaptationEnv a(d, g, params_for(1.0, 42)), b(d, g, params_for(1.0, 42));
  for (int i = 0; i < 50; ++i) CHECK(a.reset() == b.reset());
  AdaptationEnv c(d, g, params_for(1.0, 43));
  a.reset_to(c.reset());
  int same = 0;
  for (int i = 0; i < 50; ++i) same += a.reset() == c.reset();
  CHECK(same < 50);
}

TEST_CASE("optimum is searched over every configuration") {
  const auto d = adaptive_ui_domain();
  const auto g = GeneralityModel::constant(d, 0.5);
  AdaptationEnv env(d, g, params_for(1.0));
  CHECK(env.optimum_candidates() == 90);
  for (int i = 0; i < 200; ++i) {
    env.reset();
    CHECK(env.episode().optimal_reward == doctest::Approx(1.0));
    CHECK_FALSE(env.episode().done);
    CHECK(env.episode().steps_taken == 0);
  }
}

TEST_CASE("optimum under a generality table is the brute-force maximum") {
  const auto d = adaptive_ui_domain();
  GeneralityModel g(d, {0, 1}, {{{2, 1}, 1.0}, {{0, 0}, 0.0}}, 0.3);
  AdaptationEnv env(d, g, params_for(0.25, 5));
  for (int i = 0; i < 50; ++i) {
    const auto start = env.reset();
    double best = -1;
    for (std::size_t u = 0; u < d.ui_count(); ++u) {
      best = std::max(best, combined_reward(UiConfig{decode_ui(u, d)}, start.prefs,
                                            env.params().reward, g));
    }
    CHECK(env.episode().optimal_reward == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("set-variable and no-op transitions") {
  const auto d = adaptive_ui_domain();
  const auto g = GeneralityModel::constant(d, 0.5);
  AdaptationEnv env(d, g, params_for(1.0));
  const StateVector start{UiConfig{{0, 0, 1, 0}}, UserPrefs{{2, 1, 2, 2}}};
  env.reset_to(start);
  auto r = env.step(6);
  CHECK(r.next.ui.indices == std::vector<int>{0, 1, 1, 0});
  CHECK(r.next.prefs == start.prefs);
  CHECK(r.reward == 0.0);
  CHECK_FALSE(r.done);
  r = env.step(13);
  CHECK(r.next.ui.indices == std::vector<int>{0, 1, 1, 0});
  CHECK(env.episode().steps_taken == 2);
}

TEST_CASE("reaching the preferences at step 3 pays alignment plus bonus") {
  const auto d = adaptive_ui_domain();
  const auto g = GeneralityModel::constant(d, 0.5);
  AdaptationEnv env(d, g, params_for(1.0));
  env.reset_to({UiConfig{{0, 0, 0, 2}}, UserPrefs{{2, 1, 1, 2}}});
  CHECK(env.step(2).reward == 0.0);
  CHECK(env.step(6).reward == 0.0);
  const auto last = env.step(8);
  CHECK(last.reward == doctest::Approx(2.0));
  CHECK(last.done);
  CHECK(env.episode().termination == Termination::OptimalReached);
  CHECK_THROWS_AS(env.step(13), Error);
}

TEST_CASE("already optimal start finishes with one no-op") {
  const auto d = adaptive_ui_domain();
  const auto g = GeneralityModel::constant(d, 0.5);
  AdaptationEnv env(d, g, params_for(1.0));
  env.reset_to({UiConfig{{3, 1, 0, 1}}, UserPrefs{{3, 1, 0, 1}}});
  const auto r = env.step(13);
  CHECK(r.done);
  CHECK(r.reward == doctest::Approx(2.0));
  CHECK(env.episode().steps_taken == 1);
}

TEST_CASE("step cap ends the episode without reward") {
  const auto d = adaptive_ui_domain();
  const auto g = GeneralityModel::constant(d, 0.5);
  auto p = params_for(1.0);
  p.max_steps = 3;
  AdaptationEnv env(d, g, p);
  env.reset_to({UiConfig{{0, 0, 0, 0}}, UserPrefs{{1, 1, 1, 1}}});
  double total = 0;
  while (!env.episode().done) total += env.step(13).reward;
  CHECK(total == 0.0);
  CHECK(env.episode().steps_taken == 3);
  CHECK(env.episode().termination == Termination::StepCap);
}

TEST_CASE("within-threshold bonus rule drops the bonus after the threshold") {
  const auto d = adaptive_ui_domain();
  const auto g = GeneralityModel::constant(d, 0.5);
  auto p = params_for(1.0);
  p.reward.bonus_rule = BonusRule::WithinThreshold;
  p.reward.bonus_step_threshold = 2;
  AdaptationEnv env(d, g, p);
  env.reset_to({UiConfig{{0, 0, 0, 0}}, UserPrefs{{0, 1, 1, 0}}});
  env.step(13);
  env.step(6);
  CHECK(env.step(8).reward == doctest::Approx(1.0));

  env.reset_to({UiConfig{{0, 0, 0, 0}}, UserPrefs{{0, 1, 1, 0}}});
  env.step(6);
  CHECK(env.step(8).reward == doctest::Approx(2.0));
}

TEST_CASE("invalid actions and unstarted episodes are rejected") {
  const auto d = adaptive_ui_domain();
  const auto g = GeneralityModel::constant(d, 0.5);
  AdaptationEnv env(d, g, params_for(1.0));
  CHECK_THROWS_AS(env.step(0), Error);
  env.reset();
  CHECK_THROWS_AS(env.step(14), Error);
  auto p = params_for(1.0);
  p.max_steps = 0;
  CHECK_THROWS_AS(AdaptationEnv(d, g, p), Error);
}

TEST_CASE("a model fitted for another domain is rejected") {
  const auto d = adaptive_ui_domain();
  const DomainSpec other("other", {{"theme", {"light", "dark"}}, {"font", {"s", "m", "l"}}});
  const auto g = GeneralityModel::constant(other, 0.5);
  CHECK_THROWS_AS(AdaptationEnv(d, g, params_for(0.5)), Error);
}
