#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "auirl/domain.hpp"

namespace auirl {

/** When the completion bonus is paid on reaching a reward-optimal UI. */
enum class BonusRule {
  OnOptimal,        // every time the optimum is reached
  WithinThreshold,  // only if steps taken <= bonus_step_threshold
};

struct RewardParams {
  double sigma = 1.0;  // 0: generality only, 1: individuality only
  double bonus_value = 1.0;
  int bonus_step_threshold = 4;
  BonusRule bonus_rule = BonusRule::OnOptimal;

  void validate() const;
};

/**
 * Population-level engagement predictor: a lookup table over value
 * combinations of a subset of the domain variables, with a fallback score for
 * combinations that were never observed.
 */
class GeneralityModel {
public:
  using Key = std::vector<int>;  // value indices of the modeled variables

  GeneralityModel(const DomainSpec &domain, std::vector<std::size_t> modeled_variables,
                  std::map<Key, double> table, double fallback);

  /** Every configuration scores `value`. */
  static GeneralityModel constant(const DomainSpec &domain, double value);

  const std::vector<std::size_t> &modeled_variables() const { return modeled_; }
  const std::map<Key, double> &table() const { return table_; }
  double fallback() const { return fallback_; }
  std::uint64_t domain_hash() const { return domain_hash_; }

  Key project(const std::vector<int> &ui) const;
  double score(const UiConfig &ui) const;

  /** Joined label form used in table files, e.g. `layout=grid3|theme=dark`. */
  std::string key_string(const Key &key, const DomainSpec &domain) const;

  nlohmann::json to_json(const DomainSpec &domain) const;
  static GeneralityModel from_json(const nlohmann::json &doc, const DomainSpec &domain);

private:
  std::vector<std::size_t> modeled_;
  std::map<Key, double> table_;
  double fallback_;
  std::uint64_t domain_hash_;
};

struct InteractionRecord {
  std::string session;
  std::map<std::string, std::string> labels;  // variable name -> value label
  double clicks = 0;
  double scrolls = 0;
  double events = 0;
  double duration_s = 0;
  std::size_t row = 0;  // 1-based data row number, header excluded
};

struct EngagementWeights {
  double clicks = 1.0;
  double scrolls = 1.0;
  double events = 1.0;
};

/** Fraction of variables on which ui matches prefs. */
double alignment(const UiConfig &ui, const UserPrefs &prefs);

double generality(const UiConfig &ui, const GeneralityModel &model);

/** (1 - sigma) * generality + sigma * individuality. */
inline double blend(double generality, double individuality, double sigma) {
  return (1.0 - sigma) * generality + sigma * individuality;
}

double combined_reward(const UiConfig &ui, const UserPrefs &prefs, const RewardParams &params,
                       const GeneralityModel &model);

/** Reads an interaction log: `session`, one column per modeled variable,
 *  then `clicks,scrolls,events,duration_s` (column order is free). */
std::vector<InteractionRecord> ingest_interactions(std::istream &in);

/** Per-minute weighted activity rate of one record. */
double raw_engagement(const InteractionRecord &record, const EngagementWeights &weights);

/**
 * Fits the engagement table: raw rates are min-max normalized over the whole
 * dataset (all 0.5 when every rate is equal), each table entry is the mean
 * normalized score of its combination, the fallback is the global mean.
 */
GeneralityModel fit_generality(const std::vector<InteractionRecord> &records,
                               const DomainSpec &domain,
                               const std::vector<std::string> &modeled_variables,
                               const EngagementWeights &weights = {});

std::vector<std::size_t> resolve_variables(const DomainSpec &domain,
                                           const std::vector<std::string> &names,
                                           const std::string &where);

}  // namespace auirl
