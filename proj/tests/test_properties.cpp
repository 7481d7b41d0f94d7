#include <doctest.h>

#include "properties.hpp"

using namespace auirl;

namespace {

Experiment adaptive_ui(std::int64_t episodes) {
  auto e = load_experiment_file(AUIRL_SOURCE_DIR "/configs/adaptive_ui.json");
  e.hyperparams.episodes = episodes;
  e.hyperparams.decay_episodes = episodes / 2;
  return e;
}

}  // namespace

TEST_CASE("encoding bijection") {
  const auto r = props::encode_bijection(adaptive_ui_domain());
  CHECK_MESSAGE(r.ok, r.detail);
  const DomainSpec odd("odd", {{"a", {"x", "y", "z"}}, {"b", {"p", "q"}}, {"c", {"1", "2", "3", "4", "5", "6", "7"}}});
  CHECK(props::encode_bijection(odd).ok);
}

TEST_CASE("combined reward stays in the unit interval") {
  const auto e = adaptive_ui(1);
  const auto r = props::reward_bounds(e.domain, e.model, 100000, 12);
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("epsilon schedule is monotone") {
  const auto r = props::epsilon_schedule(Hyperparams{});
  CHECK_MESSAGE(r.ok, r.detail);
  Hyperparams h;
  h.decay_episodes = 0;
  CHECK(epsilon_at(0, h) == h.eps_min);
}

TEST_CASE("q values respect the reward bound") {
  for (double sigma : {0.0, 0.5, 1.0}) {
    auto e = adaptive_ui(5000);
    e.env.reward.sigma = sigma;
    const auto r = props::q_bounded(e);
    CHECK_MESSAGE(r.ok, r.detail);
  }
}

TEST_CASE("moving average equals the naive recomputation") {
  const auto r = props::moving_average_matches_naive(31);
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("training is deterministic under a seed") {
  const auto r = props::training_deterministic(adaptive_ui(3000));
  CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("environment invariants on random trajectories") {
  const auto e = adaptive_ui(1);
  auto params = e.env;
  params.reward.sigma = 0.5;
  params.max_steps = 12;
  AdaptationEnv env(e.domain, e.model, params);
  AdaptationEnv twin(e.domain, e.model, params);
  Rng pick(4);
  for (int episode = 0; episode < 2000; ++episode) {
    const auto start = env.reset();
    twin.reset_to(start);
    double score = 0;
    while (!env.episode().done) {
      const auto a = static_cast<ActionIndex>(pick.index(e.domain.action_count()));
      const auto before = env.episode().current;
      const double g_before = e.model.score(before.ui);
      const auto r = env.step(a);
      const auto t = twin.step(a);
      CHECK(r.next == t.next);
      CHECK(r.reward == t.reward);
      CHECK(r.next.prefs == start.prefs);
      if (a == e.domain.action_count() - 1) {
        CHECK(r.next == before);
        CHECK(e.model.score(r.next.ui) == g_before);
      }
      score += r.reward;
    }
    CHECK(env.episode().steps_taken <= params.max_steps);
    CHECK(score >= 0.0);
    CHECK(score <= 1.0 + params.reward.bonus_value);
    CHECK(env.episode().termination != Termination::None);
  }
}

TEST_CASE("greedy choice ignores a constant row shift") {
  const auto d = adaptive_ui_domain();
  QTable q(d);
  Rng rng(8);
  for (StateIndex s = 0; s < 500; ++s) {
    for (ActionIndex a = 0; a < d.action_count(); ++a) q(s, a) = static_cast<double>(rng.index(5));
    const auto before = q.greedy_action(s);
    q.values().row(static_cast<Eigen::Index>(s)).array() += 3.25;
    CHECK(q.greedy_action(s) == before);
  }
}

TEST_CASE("terminal updates ignore the next state") {
  const auto d = adaptive_ui_domain();
  QTable a(d), b(d);
  b(7, 3) = 1e6;
  CHECK(q_update(a, 1, 2, 0.4, 7, true, Hyperparams{}) == q_update(b, 1, 2, 0.4, 7, true, Hyperparams{}));
}
