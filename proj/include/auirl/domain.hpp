#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace auirl {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

struct VariableSpec {
  std::string name;
  std::vector<std::string> values;
};

/** Value indices of the UI design variables, one per variable, 0-based. */
struct UiConfig {
  std::vector<int> indices;
  bool operator==(const UiConfig &) const = default;
};

/** The simulated user's preferred value per variable; same shape as UiConfig. */
struct UserPrefs {
  std::vector<int> indices;
  bool operator==(const UserPrefs &) const = default;
};

struct StateVector {
  UiConfig ui;
  UserPrefs prefs;
  bool operator==(const StateVector &) const = default;
};

struct ActionSpec {
  enum class Kind { SetVariable, NoOp };

  ActionIndex index = 0;
  Kind kind = Kind::NoOp;
  std::size_t variable = 0;  // meaningful for SetVariable only
  int value = 0;             // meaningful for SetVariable only

  bool is_noop() const { return kind == Kind::NoOp; }
  bool operator==(const ActionSpec &) const = default;
};

/**
 * Ordered catalog of UI variables and their value labels.
 *
 * Declaration order is significant: it fixes action numbering (variables in
 * order, values in order, no-op last) and digit significance of the state
 * encoding. Immutable once constructed.
 */
class DomainSpec {
public:
  DomainSpec(std::string name, std::vector<VariableSpec> variables);

  const std::string &name() const { return name_; }
  const std::vector<VariableSpec> &variables() const { return variables_; }
  std::size_t variable_count() const { return variables_.size(); }
  std::size_t value_count(std::size_t variable) const {
    return variables_.at(variable).values.size();
  }

  /** Number of UI configurations (product of value counts). */
  std::size_t ui_count() const { return ui_count_; }
  /** Number of states, ui_count() squared (ui block times prefs block). */
  std::size_t state_count() const { return ui_count_ * ui_count_; }
  std::size_t action_count() const { return actions_.size(); }
  const std::vector<ActionSpec> &actions() const { return actions_; }

  std::optional<std::size_t> find_variable(std::string_view name) const;
  std::optional<int> find_value(std::size_t variable, std::string_view label) const;

  /** FNV-1a over variable names and value labels in declaration order. */
  std::uint64_t hash() const { return hash_; }
  std::string hash_hex() const;

  nlohmann::json to_json() const;

private:
  std::string name_;
  std::vector<VariableSpec> variables_;
  std::vector<ActionSpec> actions_;
  std::size_t ui_count_ = 1;
  std::uint64_t hash_ = 0;
};

/** Validates the `domain` section of a configuration document. Errors carry
 *  the offending key path (e.g. `domain.variables[2].values[1]`). */
DomainSpec load_domain(const nlohmann::json &document);

/** The four-variable layout/theme/font/information domain (14 actions). */
DomainSpec adaptive_ui_domain();

std::vector<ActionSpec> action_catalog(const DomainSpec &domain);
std::string action_name(const DomainSpec &domain, const ActionSpec &action);

// Mixed-radix encoding. Within a block the first declared variable is the
// most significant digit; the ui block is more significant than prefs.
std::size_t encode_ui(const std::vector<int> &indices, const DomainSpec &domain);
std::vector<int> decode_ui(std::size_t index, const DomainSpec &domain);
StateIndex encode_state(const StateVector &state, const DomainSpec &domain);
StateVector decode_state(StateIndex index, const DomainSpec &domain);

void validate_indices(const std::vector<int> &indices, const DomainSpec &domain,
                      std::string_view what);

UiConfig apply_action(const UiConfig &ui, const ActionSpec &action);

std::string format_config(const std::vector<int> &indices, const DomainSpec &domain);
std::string format_state(const StateVector &state, const DomainSpec &domain);

/** Parses `var=value,...|var=value,...` (ui before `|`, prefs after). Every
 *  variable must appear exactly once in each block. */
StateVector parse_state_literal(std::string_view literal, const DomainSpec &domain);

/** Label map `{"layout": "grid3", ...}` to indices; `where` prefixes error paths. */
std::vector<int> indices_from_labels(const nlohmann::json &labels, const DomainSpec &domain,
                                     const std::string &where);

/** 16 lowercase hex digits. */
std::string hex64(std::uint64_t value);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace auirl
