#include "auirl/agent.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "auirl/error.hpp"
#include "auirl/io.hpp"

namespace auirl {

void Hyperparams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::Validation, "alpha must lie in (0, 1]", "hyperparams.alpha");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorKind::Validation, "gamma must lie in [0, 1)", "hyperparams.gamma");
  }
  if (episodes < 1) {
    throw Error(ErrorKind::Validation, "episodes must be >= 1", "hyperparams.episodes");
  }
  if (!(eps_min >= 0.0 && eps_min <= eps_start && eps_start <= 1.0)) {
    throw Error(ErrorKind::Validation, "need 0 <= eps_min <= eps_start <= 1",
                "hyperparams.eps_start");
  }
  if (decay_episodes < 0 || decay_episodes > episodes) {
    throw Error(ErrorKind::Validation, "decay_episodes must lie in [0, episodes]",
                "hyperparams.decay_episodes");
  }
}

QTable::QTable(const DomainSpec &domain)
    : values_(Matrix::Zero(static_cast<Eigen::Index>(domain.state_count()),
                           static_cast<Eigen::Index>(domain.action_count()))) {
  metadata_.domain_hash = domain.hash();
  metadata_.domain = domain.to_json();
}

QTable::QTable(Matrix values, QTableMetadata metadata)
    : values_(std::move(values)), metadata_(std::move(metadata)) {}

ActionIndex QTable::greedy_action(StateIndex s) const {
  // maxCoeff reports the first maximal index, which is the tie-break we want.
  Eigen::Index best = 0;
  row(s).maxCoeff(&best);
  return static_cast<ActionIndex>(best);
}

double QTable::max_value(StateIndex s) const { return row(s).maxCoeff(); }

void QTable::check_domain(const DomainSpec &domain) const {
  if (metadata_.domain_hash != domain.hash()) {
    throw Error(ErrorKind::DomainMismatch, "Q-table domain hash " + hex64(metadata_.domain_hash) +
                                               " does not match domain " + domain.hash_hex());
  }
  if (state_count() != domain.state_count() || action_count() != domain.action_count()) {
    throw Error(ErrorKind::DomainMismatch, "Q-table shape does not match domain");
  }
}

double epsilon_at(std::int64_t episode, const Hyperparams &h) {
  if (episode < 0) throw Error(ErrorKind::Validation, "episode must be >= 0");
  if (h.decay_episodes <= 0 || episode >= h.decay_episodes) return h.eps_min;
  const double fraction = static_cast<double>(episode) / static_cast<double>(h.decay_episodes);
  return std::max(h.eps_min, h.eps_start - (h.eps_start - h.eps_min) * fraction);
}

ActionIndex select_action(const QTable &q, StateIndex s, double eps, Rng &rng) {
  if (s >= q.state_count()) throw Error(ErrorKind::Validation, "state index out of range");
  if (eps > 0.0 && rng.uniform() < eps) {
    return static_cast<ActionIndex>(rng.index(q.action_count()));
  }
  return q.greedy_action(s);
}

double q_update(QTable &q, StateIndex s, ActionIndex a, double reward, StateIndex s_next,
                bool done, const Hyperparams &h) {
  if (!std::isfinite(reward)) throw Error(ErrorKind::Validation, "reward is not finite");
  if (s >= q.state_count() || s_next >= q.state_count() || a >= q.action_count()) {
    throw Error(ErrorKind::Validation, "Q-table index out of range");
  }
  const double bootstrap = done ? 0.0 : q.max_value(s_next);
  double &entry = q(s, a);
  entry = (1.0 - h.alpha) * entry + h.alpha * (reward + h.gamma * bootstrap);
  return entry;
}

namespace {

constexpr char kMagic[8] = {'A', 'U', 'I', 'R', 'L', 'Q', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T> void put(std::string &out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(bytes, sizeof(T));
}

class Reader {
public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T> T get() {
    need(sizeof(T));
    char bytes[sizeof(T)];
    std::memcpy(bytes, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto view = bytes_.substr(pos_, n);
    pos_ += n;
    return view;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorKind::CorruptFile, "Q-table file is truncated");
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_qtable(const QTable &q) {
  if (!q.values().allFinite()) {
    throw Error(ErrorKind::Validation, "refusing to save a Q-table with non-finite entries");
  }
  const auto &m = q.metadata();
  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, m.domain_hash);
  put<std::uint64_t>(out, q.state_count());
  put<std::uint64_t>(out, q.action_count());
  put<double>(out, m.hyperparams.alpha);
  put<double>(out, m.hyperparams.gamma);
  put<double>(out, m.hyperparams.eps_start);
  put<double>(out, m.hyperparams.eps_min);
  put<std::int64_t>(out, m.hyperparams.episodes);
  put<std::int64_t>(out, m.hyperparams.decay_episodes);
  put<double>(out, m.reward.sigma);
  put<double>(out, m.reward.bonus_value);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.reward.bonus_step_threshold));
  put<std::uint32_t>(out, m.reward.bonus_rule == BonusRule::OnOptimal ? 0u : 1u);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.max_steps));
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, m.seed);
  put<std::int64_t>(out, m.created_unix);
  put<std::int64_t>(out, m.episodes_trained);
  const std::string domain = m.domain.is_null() ? std::string() : m.domain.dump();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(domain.size()));
  out += domain;
  out.reserve(out.size() + static_cast<std::size_t>(q.values().size()) * 8 + 8);
  const auto &values = q.values();
  for (Eigen::Index i = 0; i < values.size(); ++i) put<double>(out, values.data()[i]);
  put<std::uint64_t>(out, fnv1a64(out));
  return out;
}

QTable deserialize_qtable(std::string_view bytes) {
  Reader in(bytes);
  auto magic = in.take(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorKind::CorruptFile, "not a Q-table file (bad magic)");
  }
  const auto version = in.get<std::uint32_t>();
  if (version != kVersion) {
    throw Error(ErrorKind::CorruptFile, "unsupported Q-table version " + std::to_string(version));
  }
  in.get<std::uint32_t>();

  QTableMetadata m;
  m.domain_hash = in.get<std::uint64_t>();
  const auto states = in.get<std::uint64_t>();
  const auto actions = in.get<std::uint64_t>();
  m.hyperparams.alpha = in.get<double>();
  m.hyperparams.gamma = in.get<double>();
  m.hyperparams.eps_start = in.get<double>();
  m.hyperparams.eps_min = in.get<double>();
  m.hyperparams.episodes = in.get<std::int64_t>();
  m.hyperparams.decay_episodes = in.get<std::int64_t>();
  m.reward.sigma = in.get<double>();
  m.reward.bonus_value = in.get<double>();
  m.reward.bonus_step_threshold = static_cast<int>(in.get<std::uint32_t>());
  const auto rule = in.get<std::uint32_t>();
  if (rule > 1) throw Error(ErrorKind::CorruptFile, "unknown bonus rule");
  m.reward.bonus_rule = rule == 0 ? BonusRule::OnOptimal : BonusRule::WithinThreshold;
  m.max_steps = static_cast<int>(in.get<std::uint32_t>());
  in.get<std::uint32_t>();
  m.seed = in.get<std::uint64_t>();
  m.created_unix = in.get<std::int64_t>();
  m.episodes_trained = in.get<std::int64_t>();
  const auto domain_len = in.get<std::uint32_t>();
  const auto domain = in.take(domain_len);
  if (!domain.empty()) {
    try {
      m.domain = nlohmann::json::parse(domain);
    } catch (const nlohmann::json::parse_error &) {
      throw Error(ErrorKind::CorruptFile, "embedded domain document is not valid JSON");
    }
  }

  if (states == 0 || actions == 0 || states > (std::uint64_t{1} << 40) / actions) {
    throw Error(ErrorKind::CorruptFile, "implausible Q-table shape");
  }
  const auto count = states * actions;
  if (in.remaining() != count * 8 + 8) {
    throw Error(ErrorKind::CorruptFile, in.remaining() < count * 8 + 8
                                            ? "Q-table file is truncated"
                                            : "Q-table file has trailing bytes");
  }
  QTable::Matrix values(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(actions));
  for (std::uint64_t i = 0; i < count; ++i) values.data()[i] = in.get<double>();
  const auto payload_end = in.position();
  const auto checksum = in.get<std::uint64_t>();
  if (checksum != fnv1a64(bytes.substr(0, payload_end))) {
    throw Error(ErrorKind::CorruptFile, "Q-table checksum mismatch");
  }
  if (!values.allFinite()) throw Error(ErrorKind::CorruptFile, "Q-table has non-finite entries");
  return QTable(std::move(values), std::move(m));
}

void save_qtable(const QTable &q, const std::filesystem::path &path) {
  write_file_atomic(path, serialize_qtable(q));
}

QTable load_qtable(const std::filesystem::path &path) {
  try {
    return deserialize_qtable(read_file(path));
  } catch (const Error &e) {
    if (e.kind() == ErrorKind::CorruptFile) {
      throw Error(ErrorKind::CorruptFile, e.what(), path.string());
    }
    throw;
  }
}

QTable load_qtable(const std::filesystem::path &path, const DomainSpec &domain) {
  auto q = load_qtable(path);
  q.check_domain(domain);
  return q;
}

}  // namespace auirl
