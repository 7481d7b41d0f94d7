#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <json.hpp>

#include "auirl/domain.hpp"
#include "auirl/reward.hpp"
#include "auirl/rng.hpp"

namespace auirl {

struct Hyperparams {
  double alpha = 0.90;
  double gamma = 0.90;
  std::int64_t episodes = 60000;
  double eps_start = 1.0;
  double eps_min = 0.1;
  std::int64_t decay_episodes = 30000;

  void validate() const;
};

struct QTableMetadata {
  std::uint64_t domain_hash = 0;
  Hyperparams hyperparams;
  RewardParams reward;
  int max_steps = 25;
  std::uint64_t seed = 0;
  std::int64_t created_unix = 0;
  std::int64_t episodes_trained = 0;
  nlohmann::json domain;  // the domain document, so a table file is self-describing
};

/** State-action values, one row per encoded state, initialized to zero. */
class QTable {
public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit QTable(const DomainSpec &domain);
  QTable(Matrix values, QTableMetadata metadata);

  std::size_t state_count() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t action_count() const { return static_cast<std::size_t>(values_.cols()); }

  const Matrix &values() const { return values_; }
  Matrix &values() { return values_; }
  double operator()(StateIndex s, ActionIndex a) const {
    return values_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
  }
  double &operator()(StateIndex s, ActionIndex a) {
    return values_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
  }
  auto row(StateIndex s) const { return values_.row(static_cast<Eigen::Index>(s)); }

  /** Argmax of the row, ties broken by the lowest action index. */
  ActionIndex greedy_action(StateIndex s) const;
  double max_value(StateIndex s) const;

  const QTableMetadata &metadata() const { return metadata_; }
  QTableMetadata &metadata() { return metadata_; }

  /** Throws DomainMismatch unless the table was built for `domain`. */
  void check_domain(const DomainSpec &domain) const;

private:
  Matrix values_;
  QTableMetadata metadata_;
};

/** Linear decay from eps_start to eps_min over decay_episodes, then flat. */
double epsilon_at(std::int64_t episode, const Hyperparams &h);

/** With probability eps a uniform action, otherwise the greedy one. */
ActionIndex select_action(const QTable &q, StateIndex s, double eps, Rng &rng);

/** One-step Q-learning backup; the bootstrap term is dropped when `done`.
 *  Returns the new value of Q(s, a). */
double q_update(QTable &q, StateIndex s, ActionIndex a, double reward, StateIndex s_next,
                bool done, const Hyperparams &h);

/**
 * Binary table file, little-endian throughout:
 *
 *   char[8]  magic "AUIRLQT\0"
 *   u32      version (1)
 *   u32      reserved (0)
 *   u64      domain hash
 *   u64      state count S, u64 action count A
 *   f64      alpha, gamma, eps_start, eps_min
 *   i64      episodes, decay_episodes
 *   f64      sigma, bonus_value
 *   u32      bonus_step_threshold, u32 bonus_rule (0 on-optimal, 1 within-threshold)
 *   u32      max_steps, u32 reserved (0)
 *   u64      seed
 *   i64      created (unix seconds), i64 episodes trained
 *   u32      length N, then N bytes of UTF-8 domain JSON
 *   f64[S*A] values, row-major
 *   u64      FNV-1a 64 checksum of every preceding byte
 */
std::string serialize_qtable(const QTable &q);
QTable deserialize_qtable(std::string_view bytes);

void save_qtable(const QTable &q, const std::filesystem::path &path);
QTable load_qtable(const std::filesystem::path &path);
/** Loads and verifies that the table belongs to `domain`. */
QTable load_qtable(const std::filesystem::path &path, const DomainSpec &domain);

}  // namespace auirl
