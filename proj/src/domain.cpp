#include "auirl/domain.hpp"

#include <cstdio>
#include <set>

#include "auirl/error.hpp"

namespace auirl {

const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Config: return "config";
  case ErrorKind::Validation: return "validation";
  case ErrorKind::Input: return "input";
  case ErrorKind::DomainMismatch: return "domain_mismatch";
  case ErrorKind::CorruptFile: return "corrupt_file";
  case ErrorKind::Io: return "io";
  case ErrorKind::State: return "state";
  case ErrorKind::Convergence: return "convergence";
  }
  return "unknown";
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

DomainSpec::DomainSpec(std::string name, std::vector<VariableSpec> variables)
    : name_(std::move(name)), variables_(std::move(variables)) {
  if (variables_.empty()) {
    throw Error(ErrorKind::Config, "at least one variable is required", "domain.variables");
  }
  std::set<std::string> names;
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    const auto &var = variables_[v];
    const std::string where = "domain.variables[" + std::to_string(v) + "]";
    if (var.name.empty()) throw Error(ErrorKind::Config, "empty variable name", where + ".name");
    if (!names.insert(var.name).second) {
      throw Error(ErrorKind::Config, "duplicate variable name '" + var.name + "'", where + ".name");
    }
    if (var.values.size() < 2) {
      throw Error(ErrorKind::Config, "variable needs at least 2 values", where + ".values");
    }
    std::set<std::string> labels;
    for (std::size_t i = 0; i < var.values.size(); ++i) {
      const auto &label = var.values[i];
      const std::string vwhere = where + ".values[" + std::to_string(i) + "]";
      if (label.empty()) throw Error(ErrorKind::Config, "empty value label", vwhere);
      if (label.find_first_of(",|=") != std::string::npos) {
        throw Error(ErrorKind::Config, "value label may not contain ',', '|' or '='", vwhere);
      }
      if (!labels.insert(label).second) {
        throw Error(ErrorKind::Config, "duplicate value label '" + label + "'", vwhere);
      }
    }
    if (var.name.find_first_of(",|=") != std::string::npos) {
      throw Error(ErrorKind::Config, "variable name may not contain ',', '|' or '='", where + ".name");
    }
    if (ui_count_ > (std::size_t{1} << 31) / var.values.size()) {
      throw Error(ErrorKind::Config, "state space too large to encode", "domain.variables");
    }
    ui_count_ *= var.values.size();
  }

  ActionIndex next = 0;
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    for (std::size_t i = 0; i < variables_[v].values.size(); ++i) {
      actions_.push_back({next++, ActionSpec::Kind::SetVariable, v, static_cast<int>(i)});
    }
  }
  actions_.push_back({next, ActionSpec::Kind::NoOp, 0, 0});

  std::string canonical;
  for (const auto &var : variables_) {
    canonical += var.name;
    canonical += '\x1e';
    for (const auto &label : var.values) {
      canonical += label;
      canonical += '\x1f';
    }
    canonical += '\x1d';
  }
  hash_ = fnv1a64(canonical);
}

std::optional<std::size_t> DomainSpec::find_variable(std::string_view name) const {
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (variables_[v].name == name) return v;
  }
  return std::nullopt;
}

std::optional<int> DomainSpec::find_value(std::size_t variable, std::string_view label) const {
  const auto &values = variables_.at(variable).values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string DomainSpec::hash_hex() const { return hex64(hash_); }

nlohmann::json DomainSpec::to_json() const {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto &var : variables_) {
    vars.push_back({{"name", var.name}, {"values", var.values}});
  }
  return {{"name", name_}, {"variables", vars}};
}

DomainSpec load_domain(const nlohmann::json &document) {
  const nlohmann::json *node = &document;
  std::string prefix = "domain";
  if (document.is_object() && document.contains("domain")) {
    node = &document.at("domain");
  }
  if (!node->is_object()) throw Error(ErrorKind::Config, "expected an object", prefix);

  std::string name = "unnamed";
  if (node->contains("name")) {
    if (!(*node)["name"].is_string()) {
      throw Error(ErrorKind::Config, "expected a string", prefix + ".name");
    }
    name = (*node)["name"].get<std::string>();
  }
  if (!node->contains("variables")) {
    throw Error(ErrorKind::Config, "missing key", prefix + ".variables");
  }
  const auto &vars = (*node)["variables"];
  if (!vars.is_array() || vars.empty()) {
    throw Error(ErrorKind::Config, "expected a nonempty array", prefix + ".variables");
  }

  std::vector<VariableSpec> variables;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const std::string where = prefix + ".variables[" + std::to_string(v) + "]";
    const auto &item = vars[v];
    if (!item.is_object()) throw Error(ErrorKind::Config, "expected an object", where);
    if (!item.contains("name") || !item["name"].is_string()) {
      throw Error(ErrorKind::Config, "expected a string", where + ".name");
    }
    if (!item.contains("values") || !item["values"].is_array()) {
      throw Error(ErrorKind::Config, "expected an array", where + ".values");
    }
    VariableSpec spec{item["name"].get<std::string>(), {}};
    for (std::size_t i = 0; i < item["values"].size(); ++i) {
      const auto &label = item["values"][i];
      if (!label.is_string()) {
        throw Error(ErrorKind::Config, "expected a string",
                    where + ".values[" + std::to_string(i) + "]");
      }
      spec.values.push_back(label.get<std::string>());
    }
    variables.push_back(std::move(spec));
  }
  return DomainSpec(std::move(name), std::move(variables));
}

DomainSpec adaptive_ui_domain() {
  return DomainSpec("adaptive-ui", {
                                        {"layout", {"list", "grid2", "grid3", "grid4", "grid5"}},
                                        {"theme", {"light", "dark"}},
                                        {"font_size", {"small", "default", "big"}},
                                        {"information", {"show", "partial", "hide"}},
                                    });
}

std::vector<ActionSpec> action_catalog(const DomainSpec &domain) { return domain.actions(); }

std::string action_name(const DomainSpec &domain, const ActionSpec &action) {
  if (action.is_noop()) return "no_op";
  const auto &var = domain.variables().at(action.variable);
  return var.name + "=" + var.values.at(static_cast<std::size_t>(action.value));
}

void validate_indices(const std::vector<int> &indices, const DomainSpec &domain,
                      std::string_view what) {
  if (indices.size() != domain.variable_count()) {
    throw Error(ErrorKind::Validation,
                "expected " + std::to_string(domain.variable_count()) + " components, got " +
                    std::to_string(indices.size()),
                std::string(what));
  }
  for (std::size_t v = 0; v < indices.size(); ++v) {
    if (indices[v] < 0 || static_cast<std::size_t>(indices[v]) >= domain.value_count(v)) {
      throw Error(ErrorKind::Validation,
                  "index " + std::to_string(indices[v]) + " out of range for '" +
                      domain.variables()[v].name + "'",
                  std::string(what) + "[" + std::to_string(v) + "]");
    }
  }
}

std::size_t encode_ui(const std::vector<int> &indices, const DomainSpec &domain) {
  validate_indices(indices, domain, "ui");
  std::size_t index = 0;
  for (std::size_t v = 0; v < indices.size(); ++v) {
    index = index * domain.value_count(v) + static_cast<std::size_t>(indices[v]);
  }
  return index;
}

std::vector<int> decode_ui(std::size_t index, const DomainSpec &domain) {
  if (index >= domain.ui_count()) {
    throw Error(ErrorKind::Validation, "ui index " + std::to_string(index) + " out of range");
  }
  std::vector<int> indices(domain.variable_count());
  for (std::size_t v = domain.variable_count(); v-- > 0;) {
    const auto radix = domain.value_count(v);
    indices[v] = static_cast<int>(index % radix);
    index /= radix;
  }
  return indices;
}

StateIndex encode_state(const StateVector &state, const DomainSpec &domain) {
  validate_indices(state.ui.indices, domain, "ui");
  validate_indices(state.prefs.indices, domain, "prefs");
  return encode_ui(state.ui.indices, domain) * domain.ui_count() +
         encode_ui(state.prefs.indices, domain);
}

StateVector decode_state(StateIndex index, const DomainSpec &domain) {
  if (index >= domain.state_count()) {
    throw Error(ErrorKind::Validation, "state index " + std::to_string(index) + " out of range");
  }
  return {UiConfig{decode_ui(index / domain.ui_count(), domain)},
          UserPrefs{decode_ui(index % domain.ui_count(), domain)}};
}

UiConfig apply_action(const UiConfig &ui, const ActionSpec &action) {
  UiConfig next = ui;
  if (!action.is_noop()) next.indices.at(action.variable) = action.value;
  return next;
}

std::string format_config(const std::vector<int> &indices, const DomainSpec &domain) {
  std::string out;
  for (std::size_t v = 0; v < indices.size(); ++v) {
    if (v) out += ',';
    const auto &var = domain.variables().at(v);
    out += var.name + "=" + var.values.at(static_cast<std::size_t>(indices[v]));
  }
  return out;
}

std::string format_state(const StateVector &state, const DomainSpec &domain) {
  return format_config(state.ui.indices, domain) + "|" +
         format_config(state.prefs.indices, domain);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<int> parse_block(std::string_view block, const DomainSpec &domain,
                             const std::string &where) {
  std::vector<int> indices(domain.variable_count(), -1);
  std::size_t pos = 0;
  while (pos <= block.size()) {
    auto end = block.find(',', pos);
    if (end == std::string_view::npos) end = block.size();
    auto pair = trim(block.substr(pos, end - pos));
    pos = end + 1;
    if (pair.empty()) {
      if (end == block.size()) break;
      continue;
    }
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Input, "expected var=value, got '" + std::string(pair) + "'", where);
    }
    auto name = trim(pair.substr(0, eq));
    auto label = trim(pair.substr(eq + 1));
    auto var = domain.find_variable(name);
    if (!var) throw Error(ErrorKind::Input, "unknown variable", where + "." + std::string(name));
    auto value = domain.find_value(*var, label);
    if (!value) {
      throw Error(ErrorKind::Input, "unknown value '" + std::string(label) + "'",
                  where + "." + std::string(name));
    }
    if (indices[*var] != -1) {
      throw Error(ErrorKind::Input, "variable given twice", where + "." + std::string(name));
    }
    indices[*var] = *value;
  }
  for (std::size_t v = 0; v < indices.size(); ++v) {
    if (indices[v] == -1) {
      throw Error(ErrorKind::Input, "missing variable", where + "." + domain.variables()[v].name);
    }
  }
  return indices;
}

}  // namespace

StateVector parse_state_literal(std::string_view literal, const DomainSpec &domain) {
  auto bar = literal.find('|');
  if (bar == std::string_view::npos || literal.find('|', bar + 1) != std::string_view::npos) {
    throw Error(ErrorKind::Input, "state literal needs exactly one '|' between ui and prefs");
  }
  return {UiConfig{parse_block(literal.substr(0, bar), domain, "ui")},
          UserPrefs{parse_block(literal.substr(bar + 1), domain, "prefs")}};
}

std::vector<int> indices_from_labels(const nlohmann::json &labels, const DomainSpec &domain,
                                     const std::string &where) {
  if (!labels.is_object()) throw Error(ErrorKind::Input, "expected an object", where);
  std::vector<int> indices(domain.variable_count(), -1);
  for (const auto &[name, label] : labels.items()) {
    auto var = domain.find_variable(name);
    if (!var) throw Error(ErrorKind::Input, "unknown variable", where + "." + name);
    if (!label.is_string()) throw Error(ErrorKind::Input, "expected a string", where + "." + name);
    auto value = domain.find_value(*var, label.get<std::string>());
    if (!value) {
      throw Error(ErrorKind::Input, "unknown value '" + label.get<std::string>() + "'",
                  where + "." + name);
    }
    indices[*var] = *value;
  }
  for (std::size_t v = 0; v < indices.size(); ++v) {
    if (indices[v] == -1) {
      throw Error(ErrorKind::Input, "missing variable", where + "." + domain.variables()[v].name);
    }
  }
  return indices;
}

}  // namespace auirl
