#include "auirl/reward.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <set>

#include "auirl/error.hpp"

namespace auirl {

void RewardParams::validate() const {
  if (!(sigma >= 0.0 && sigma <= 1.0)) {
    throw Error(ErrorKind::Validation, "sigma must lie in [0, 1]", "reward.sigma");
  }
  if (!(bonus_value >= 0.0) || !std::isfinite(bonus_value)) {
    throw Error(ErrorKind::Validation, "bonus_value must be finite and >= 0", "reward.bonus_value");
  }
  if (bonus_step_threshold < 1) {
    throw Error(ErrorKind::Validation, "bonus_step_threshold must be >= 1",
                "reward.bonus_step_threshold");
  }
}

GeneralityModel::GeneralityModel(const DomainSpec &domain,
                                 std::vector<std::size_t> modeled_variables,
                                 std::map<Key, double> table, double fallback)
    : modeled_(std::move(modeled_variables)), table_(std::move(table)), fallback_(fallback),
      domain_hash_(domain.hash()) {
  std::sort(modeled_.begin(), modeled_.end());
  if (std::adjacent_find(modeled_.begin(), modeled_.end()) != modeled_.end()) {
    throw Error(ErrorKind::Validation, "modeled variables must be distinct");
  }
  for (auto v : modeled_) {
    if (v >= domain.variable_count()) {
      throw Error(ErrorKind::Validation, "modeled variable out of range");
    }
  }
  if (!(fallback_ >= 0.0 && fallback_ <= 1.0)) {
    throw Error(ErrorKind::Validation, "fallback must lie in [0, 1]", "fallback");
  }
  for (const auto &[key, value] : table_) {
    if (key.size() != modeled_.size()) {
      throw Error(ErrorKind::Validation, "table key has wrong arity");
    }
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] < 0 || static_cast<std::size_t>(key[i]) >= domain.value_count(modeled_[i])) {
        throw Error(ErrorKind::Validation, "table key value out of range");
      }
    }
    if (!(value >= 0.0 && value <= 1.0)) {
      throw Error(ErrorKind::Validation, "table scores must lie in [0, 1]",
                  "table." + key_string(key, domain));
    }
  }
}

GeneralityModel GeneralityModel::constant(const DomainSpec &domain, double value) {
  return GeneralityModel(domain, {}, {{Key{}, value}}, value);
}

GeneralityModel::Key GeneralityModel::project(const std::vector<int> &ui) const {
  Key key;
  key.reserve(modeled_.size());
  for (auto v : modeled_) key.push_back(ui.at(v));
  return key;
}

double GeneralityModel::score(const UiConfig &ui) const {
  auto it = table_.find(project(ui.indices));
  return it == table_.end() ? fallback_ : it->second;
}

std::string GeneralityModel::key_string(const Key &key, const DomainSpec &domain) const {
  std::string out;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) out += '|';
    const auto &var = domain.variables().at(modeled_[i]);
    out += var.name + "=" + var.values.at(static_cast<std::size_t>(key[i]));
  }
  return out;
}

nlohmann::json GeneralityModel::to_json(const DomainSpec &domain) const {
  nlohmann::json names = nlohmann::json::array();
  for (auto v : modeled_) names.push_back(domain.variables()[v].name);
  nlohmann::json table = nlohmann::json::object();
  for (const auto &[key, value] : table_) table[key_string(key, domain)] = value;
  return {{"modeled_variables", names}, {"fallback", fallback_}, {"table", table}};
}

GeneralityModel GeneralityModel::from_json(const nlohmann::json &doc, const DomainSpec &domain) {
  if (!doc.is_object()) throw Error(ErrorKind::Config, "expected an object", "generality");
  if (!doc.contains("modeled_variables") || !doc["modeled_variables"].is_array()) {
    throw Error(ErrorKind::Config, "expected an array", "modeled_variables");
  }
  std::vector<std::string> names;
  for (const auto &n : doc["modeled_variables"]) {
    if (!n.is_string()) throw Error(ErrorKind::Config, "expected a string", "modeled_variables");
    names.push_back(n.get<std::string>());
  }
  auto modeled = resolve_variables(domain, names, "modeled_variables");
  auto sorted = modeled;
  std::sort(sorted.begin(), sorted.end());

  if (!doc.contains("fallback") || !doc["fallback"].is_number()) {
    throw Error(ErrorKind::Config, "expected a number", "fallback");
  }
  std::map<Key, double> table;
  if (doc.contains("table")) {
    if (!doc["table"].is_object()) throw Error(ErrorKind::Config, "expected an object", "table");
    for (const auto &[joined, value] : doc["table"].items()) {
      const std::string where = "table." + joined;
      if (!value.is_number()) throw Error(ErrorKind::Config, "expected a number", where);
      Key key(sorted.size(), -1);
      std::size_t pos = 0;
      while (pos <= joined.size()) {
        auto end = joined.find('|', pos);
        if (end == std::string::npos) end = joined.size();
        auto pair = joined.substr(pos, end - pos);
        pos = end + 1;
        auto eq = pair.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::Config, "expected var=value", where);
        auto var = domain.find_variable(pair.substr(0, eq));
        if (!var) throw Error(ErrorKind::Config, "unknown variable", where);
        auto slot = std::find(sorted.begin(), sorted.end(), *var);
        if (slot == sorted.end()) throw Error(ErrorKind::Config, "variable not modeled", where);
        auto val = domain.find_value(*var, pair.substr(eq + 1));
        if (!val) throw Error(ErrorKind::Config, "unknown value", where);
        key[static_cast<std::size_t>(slot - sorted.begin())] = *val;
        if (end == joined.size()) break;
      }
      if (std::find(key.begin(), key.end(), -1) != key.end()) {
        throw Error(ErrorKind::Config, "key must name every modeled variable", where);
      }
      table[key] = value.get<double>();
    }
  }
  return GeneralityModel(domain, std::move(modeled), std::move(table),
                         doc["fallback"].get<double>());
}

std::vector<std::size_t> resolve_variables(const DomainSpec &domain,
                                           const std::vector<std::string> &names,
                                           const std::string &where) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto v = domain.find_variable(names[i]);
    if (!v) {
      throw Error(ErrorKind::Config, "unknown variable '" + names[i] + "'",
                  where + "[" + std::to_string(i) + "]");
    }
    if (std::find(out.begin(), out.end(), *v) != out.end()) {
      throw Error(ErrorKind::Config, "duplicate variable '" + names[i] + "'",
                  where + "[" + std::to_string(i) + "]");
    }
    out.push_back(*v);
  }
  return out;
}

double alignment(const UiConfig &ui, const UserPrefs &prefs) {
  if (ui.indices.size() != prefs.indices.size() || ui.indices.empty()) {
    throw Error(ErrorKind::Validation, "ui and prefs dimensions differ");
  }
  std::size_t mismatches = 0;
  for (std::size_t v = 0; v < ui.indices.size(); ++v) {
    mismatches += ui.indices[v] != prefs.indices[v];
  }
  const auto total = static_cast<double>(ui.indices.size());
  return (total - static_cast<double>(mismatches)) / total;
}

double generality(const UiConfig &ui, const GeneralityModel &model) { return model.score(ui); }

double combined_reward(const UiConfig &ui, const UserPrefs &prefs, const RewardParams &params,
                       const GeneralityModel &model) {
  return blend(generality(ui, model), alignment(ui, prefs), params.sigma);
}

namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  for (auto &f : fields) {
    while (!f.empty() && (f.back() == ' ' || f.back() == '\r')) f.pop_back();
    while (!f.empty() && f.front() == ' ') f.erase(f.begin());
  }
  return fields;
}

double parse_number(const std::string &text, const std::string &column, std::size_t row) {
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw Error(ErrorKind::Input, "non-numeric value '" + text + "'",
                "row " + std::to_string(row) + "." + column);
  }
  return value;
}

}  // namespace

std::vector<InteractionRecord> ingest_interactions(std::istream &in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Input, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);

  const std::vector<std::string> required = {"session", "clicks", "scrolls", "events",
                                             "duration_s"};
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].empty()) throw Error(ErrorKind::Input, "empty column name", "header");
    if (!column.emplace(header[i], i).second) {
      throw Error(ErrorKind::Input, "duplicate column '" + header[i] + "'", "header");
    }
  }
  for (const auto &name : required) {
    if (!column.count(name)) throw Error(ErrorKind::Input, "missing column '" + name + "'", "header");
  }
  std::vector<std::pair<std::string, std::size_t>> label_columns;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::find(required.begin(), required.end(), header[i]) == required.end()) {
      label_columns.emplace_back(header[i], i);
    }
  }

  std::vector<InteractionRecord> records;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    const std::string where = "row " + std::to_string(row);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::Input,
                  "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()),
                  where);
    }
    InteractionRecord rec;
    rec.row = row;
    rec.session = fields[column["session"]];
    rec.clicks = parse_number(fields[column["clicks"]], "clicks", row);
    rec.scrolls = parse_number(fields[column["scrolls"]], "scrolls", row);
    rec.events = parse_number(fields[column["events"]], "events", row);
    rec.duration_s = parse_number(fields[column["duration_s"]], "duration_s", row);
    const std::pair<const char *, double> counts[] = {
        {"clicks", rec.clicks}, {"scrolls", rec.scrolls}, {"events", rec.events}};
    for (const auto &[name, value] : counts) {
      if (value < 0) throw Error(ErrorKind::Input, "count must be >= 0", where + "." + name);
    }
    if (!(rec.duration_s > 0)) {
      throw Error(ErrorKind::Input, "duration_s must be > 0", where + ".duration_s");
    }
    for (const auto &[name, idx] : label_columns) {
      if (fields[idx].empty()) throw Error(ErrorKind::Input, "empty label", where + "." + name);
      rec.labels[name] = fields[idx];
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw Error(ErrorKind::Input, "no records");
  return records;
}

double raw_engagement(const InteractionRecord &record, const EngagementWeights &weights) {
  const double minutes = record.duration_s / 60.0;
  return (weights.clicks * record.clicks + weights.scrolls * record.scrolls +
          weights.events * record.events) /
         minutes;
}

GeneralityModel fit_generality(const std::vector<InteractionRecord> &records,
                               const DomainSpec &domain,
                               const std::vector<std::string> &modeled_variables,
                               const EngagementWeights &weights) {
  if (records.empty()) throw Error(ErrorKind::Input, "no records to fit");
  auto modeled = resolve_variables(domain, modeled_variables, "reward.modeled_variables");
  std::sort(modeled.begin(), modeled.end());

  std::vector<GeneralityModel::Key> keys;
  std::vector<double> raw;
  keys.reserve(records.size());
  raw.reserve(records.size());
  for (const auto &rec : records) {
    const std::string where = "row " + std::to_string(rec.row);
    GeneralityModel::Key key;
    for (auto v : modeled) {
      const auto &name = domain.variables()[v].name;
      auto it = rec.labels.find(name);
      if (it == rec.labels.end()) throw Error(ErrorKind::Input, "missing column", where + "." + name);
      auto value = domain.find_value(v, it->second);
      if (!value) {
        throw Error(ErrorKind::Input, "unknown value '" + it->second + "'", where + "." + name);
      }
      key.push_back(*value);
    }
    keys.push_back(std::move(key));
    raw.push_back(raw_engagement(rec, weights));
    if (!std::isfinite(raw.back())) {
      throw Error(ErrorKind::Input, "engagement is not finite", where);
    }
  }

  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double min = *lo;
  const double span = *hi - *lo;

  std::map<GeneralityModel::Key, std::pair<double, std::size_t>> sums;
  double total = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double score = span > 0 ? (raw[i] - min) / span : 0.5;
    auto &slot = sums[keys[i]];
    slot.first += score;
    slot.second += 1;
    total += score;
  }
  std::map<GeneralityModel::Key, double> table;
  for (const auto &[key, acc] : sums) {
    table[key] = std::clamp(acc.first / static_cast<double>(acc.second), 0.0, 1.0);
  }
  const double fallback = std::clamp(total / static_cast<double>(raw.size()), 0.0, 1.0);
  return GeneralityModel(domain, std::move(modeled), std::move(table), fallback);
}

}  // namespace auirl
