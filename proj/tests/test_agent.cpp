#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "auirl/agent.hpp"
#include "auirl/error.hpp"

using namespace auirl;

TEST_CASE("epsilon schedule") {
  const Hyperparams h;
  CHECK(epsilon_at(0, h) == doctest::Approx(1.0));
  CHECK(epsilon_at(15000, h) == doctest::Approx(0.55));
  CHECK(epsilon_at(30000, h) == doctest::Approx(0.1));
  CHECK(epsilon_at(59999, h) == doctest::Approx(0.1));
}

TEST_CASE("greedy selection and tie-breaking") {
  const auto d = adaptive_ui_domain();
  QTable q(d);
  Rng rng(3);
  CHECK(select_action(q, 5, 0.0, rng) == 0);
  q(5, 6) = 0.7;
  CHECK(select_action(q, 5, 0.0, rng) == 6);
  q(5, 9) = 0.7;
  CHECK(select_action(q, 5, 0.0, rng) == 6);
  CHECK(q.max_value(5) == 0.7);
}

TEST_CASE("exploration is uniform") {
  const auto d = adaptive_ui_domain();
  QTable q(d);
  q(0, 3) = 5.0;
  Rng rng(2024);
  const int n = 100000;
  std::vector<int> counts(14, 0);
  for (int i = 0; i < n; ++i) counts[select_action(q, 0, 1.0, rng)]++;
  const double p = 1.0 / 14.0;
  const double sd = std::sqrt(n * p * (1 - p));
  for (int c : counts) CHECK(std::abs(c - n * p) <= 3 * sd);

  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(select_action(q, 0, 1.0, a) == select_action(q, 0, 1.0, b));
}

TEST_CASE("q update") {
  const auto d = adaptive_ui_domain();
  const Hyperparams h;
  QTable q(d);
  CHECK(q_update(q, 0, 0, 1.0, 1, true, h) == doctest::Approx(0.9));

  QTable r(d);
  r(0, 0) = 0.5;
  r(1, 4) = 0.5;
  CHECK(q_update(r, 0, 0, 1.0, 1, false, h) == doctest::Approx(1.355));

  QTable t(d);
  t(1, 2) = 100.0;
  double prev = -1, value = 0;
  int iterations = 0;
  while (std::abs(value - prev) >= 1e-9 && iterations < 1000) {
    prev = value;
    value = q_update(t, 0, 0, 0.8, 1, true, h);
    ++iterations;
  }
  CHECK(value == doctest::Approx(0.8).epsilon(1e-9));
  CHECK_THROWS_AS(q_update(t, 0, 0, std::nan(""), 1, true, h), Error);
}

TEST_CASE("hyperparameter validation") {
  Hyperparams h;
  h.alpha = 0;
  CHECK_THROWS_AS(h.validate(), Error);
  h = {};
  h.gamma = 1.0;
  CHECK_THROWS_AS(h.validate(), Error);
  h = {};
  h.eps_min = 0.5;
  h.eps_start = 0.4;
  CHECK_THROWS_AS(h.validate(), Error);
  h = {};
  h.decay_episodes = h.episodes + 1;
  CHECK_THROWS_AS(h.validate(), Error);
}

namespace {

QTable sample_table() {
  const auto d = adaptive_ui_domain();
  QTable q(d);
  for (Eigen::Index i = 0; i < q.values().size(); ++i) {
    q.values().data()[i] = std::sin(static_cast<double>(i)) * 1.7;
  }
  auto &m = q.metadata();
  m.hyperparams.alpha = 0.5;
  m.reward.sigma = 0.25;
  m.reward.bonus_rule = BonusRule::WithinThreshold;
  m.max_steps = 17;
  m.seed = 123456789012345ULL;
  m.created_unix = 1700000000;
  m.episodes_trained = 42;
  return q;
}

}  // namespace

TEST_CASE("table serialization round-trips bit for bit") {
  const auto q = sample_table();
  const auto back = deserialize_qtable(serialize_qtable(q));
  CHECK(back.values() == q.values());
  CHECK(back.metadata().domain_hash == q.metadata().domain_hash);
  CHECK(back.metadata().hyperparams.alpha == 0.5);
  CHECK(back.metadata().reward.sigma == 0.25);
  CHECK(back.metadata().reward.bonus_rule == BonusRule::WithinThreshold);
  CHECK(back.metadata().max_steps == 17);
  CHECK(back.metadata().seed == 123456789012345ULL);
  CHECK(back.metadata().created_unix == 1700000000);
  CHECK(back.metadata().episodes_trained == 42);
  CHECK(load_domain(back.metadata().domain).hash() == adaptive_ui_domain().hash());
  CHECK(serialize_qtable(back) == serialize_qtable(q));
}

TEST_CASE("damaged table files are rejected") {
  const auto bytes = serialize_qtable(sample_table());
  auto kind_of = [](std::string_view b) {
    try {
      deserialize_qtable(b);
    } catch (const Error &e) {
      return e.kind();
    }
    return ErrorKind::State;
  };
  CHECK(kind_of(std::string_view(bytes).substr(0, bytes.size() / 2)) == ErrorKind::CorruptFile);
  CHECK(kind_of(std::string_view(bytes).substr(0, 10)) == ErrorKind::CorruptFile);
  CHECK(kind_of(bytes + "x") == ErrorKind::CorruptFile);
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  CHECK(kind_of(flipped) == ErrorKind::CorruptFile);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK(kind_of(magic) == ErrorKind::CorruptFile);
}

TEST_CASE("save and load through the filesystem") {
  const auto dir = std::filesystem::temp_directory_path() / "auirl_agent_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "nested" / "q.bin";
  const auto q = sample_table();
  save_qtable(q, path);
  CHECK(load_qtable(path, adaptive_ui_domain()).values() == q.values());

  const DomainSpec other("x", {{"theme", {"light", "dark"}}, {"font", {"s", "m", "l"}}});
  try {
    load_qtable(path, other);
    FAIL("expected a domain mismatch");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::DomainMismatch);
  }

  const auto bytes = serialize_qtable(q);
  {
    std::ofstream out(dir / "cut.bin", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 1000));
  }
  CHECK_THROWS_AS(load_qtable(dir / "cut.bin"), Error);
  CHECK_THROWS_AS(load_qtable(dir / "missing.bin"), Error);
  std::filesystem::remove_all(dir);
}
