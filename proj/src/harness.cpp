#include "auirl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>
#include <tuple>

#include "auirl/error.hpp"
#include "auirl/io.hpp"

namespace auirl {

Eigen::VectorXd moving_average(const Eigen::Ref<const Eigen::VectorXd> &series, int window) {
  if (window < 1) throw Error(ErrorKind::Validation, "window must be >= 1");
  if (series.size() == 0) throw Error(ErrorKind::Validation, "series is empty");
  Eigen::VectorXd out(series.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < series.size(); ++i) {
    sum += series(i);
    if (i >= window) sum -= series(i - window);
    const auto n = std::min<Eigen::Index>(i + 1, window);
    out(i) = sum / static_cast<double>(n);
  }
  return out;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double> &xs) {
  if (xs.empty()) return {0.0, 0.0};
  const Eigen::Map<const Eigen::VectorXd> v(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const double mean = v.mean();
  const double var = (v.array() - mean).square().sum() / static_cast<double>(xs.size());
  return {mean, std::sqrt(var)};
}

void finish_report(RunReport &report) {
  const auto n = static_cast<Eigen::Index>(report.episodes.size());
  Eigen::VectorXd steps(n), score(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    steps(i) = report.episodes[static_cast<std::size_t>(i)].steps;
    score(i) = report.episodes[static_cast<std::size_t>(i)].score;
  }
  report.ma_steps = moving_average(steps, report.window);
  report.ma_score = moving_average(score, report.window);
  report.summary = summarize(report.episodes);
}

}  // namespace

Summary summarize(const std::vector<EpisodeStats> &episodes) {
  std::vector<double> steps, score, align;
  for (const auto &e : episodes) {
    steps.push_back(e.steps);
    score.push_back(e.score);
    align.push_back(e.terminal_alignment);
  }
  Summary s;
  std::tie(s.mean_steps, s.std_steps) = mean_std(steps);
  std::tie(s.mean_score, s.std_score) = mean_std(score);
  std::tie(s.mean_alignment, s.std_alignment) = mean_std(align);
  return s;
}

TrainResult train(const Experiment &experiment) {
  const auto &h = experiment.hyperparams;
  h.validate();
  AdaptationEnv env(experiment.domain, experiment.model, experiment.env);

  QTable q(experiment.domain);
  auto &meta = q.metadata();
  meta.hyperparams = h;
  meta.reward = experiment.env.reward;
  meta.max_steps = experiment.env.max_steps;
  meta.seed = experiment.env.seed;
  meta.created_unix = experiment.created_unix;

  RunReport report;
  report.phase = "train";
  report.sigma = experiment.env.reward.sigma;
  report.seed = experiment.env.seed;
  report.domain_hash = experiment.domain.hash();
  report.window = experiment.window;
  report.episodes.reserve(static_cast<std::size_t>(h.episodes));

  for (std::int64_t episode = 0; episode < h.episodes; ++episode) {
    const double eps = epsilon_at(episode, h);
    env.reset();
    StateIndex s = env.state_index();
    EpisodeStats stats;
    stats.episode = episode;
    stats.epsilon = eps;
    while (!env.episode().done) {
      const auto a = select_action(q, s, eps, env.rng());
      const auto result = env.step(a);
      const auto s_next = encode_state(result.next, experiment.domain);
      q_update(q, s, a, result.reward, s_next, result.done, h);
      stats.score += result.reward;
      s = s_next;
    }
    stats.steps = env.episode().steps_taken;
    stats.termination = env.episode().termination;
    stats.terminal_alignment = alignment(env.episode().current.ui, env.episode().current.prefs);
    report.episodes.push_back(stats);
  }
  meta.episodes_trained = h.episodes;
  finish_report(report);
  return {std::move(q), std::move(report)};
}

RunReport evaluate(const QTable &q, const Experiment &experiment, std::int64_t episodes,
                   std::uint64_t seed) {
  if (episodes < 1) throw Error(ErrorKind::Validation, "evaluation needs at least 1 episode");
  q.check_domain(experiment.domain);
  EnvParams params = experiment.env;
  params.seed = seed;
  AdaptationEnv env(experiment.domain, experiment.model, params);

  RunReport report;
  report.phase = "eval";
  report.sigma = params.reward.sigma;
  report.seed = seed;
  report.domain_hash = experiment.domain.hash();
  report.window = experiment.window;
  report.episodes.reserve(static_cast<std::size_t>(episodes));
  for (std::int64_t episode = 0; episode < episodes; ++episode) {
    env.reset();
    EpisodeStats stats;
    stats.episode = episode;
    while (!env.episode().done) {
      stats.score += env.step(q.greedy_action(env.state_index())).reward;
    }
    stats.steps = env.episode().steps_taken;
    stats.termination = env.episode().termination;
    stats.terminal_alignment = alignment(env.episode().current.ui, env.episode().current.prefs);
    report.episodes.push_back(stats);
  }
  finish_report(report);
  return report;
}

std::uint64_t sigma_seed(std::uint64_t base_seed, double sigma) {
  return base_seed ^ fnv1a64(format_double(sigma));
}

std::uint64_t evaluation_seed(std::uint64_t training_seed) {
  return training_seed ^ 0x9e3779b97f4a7c15ULL;
}

std::vector<SweepEntry> sigma_sweep(const Experiment &experiment, const std::vector<double> &sigmas,
                                    unsigned workers) {
  if (sigmas.empty()) throw Error(ErrorKind::Validation, "sigma list is empty");
  for (double sigma : sigmas) {
    RewardParams probe = experiment.env.reward;
    probe.sigma = sigma;
    probe.validate();
  }

  std::vector<std::optional<SweepEntry>> slots(sigmas.size());
  std::vector<std::exception_ptr> errors(sigmas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < sigmas.size(); i = next++) {
      try {
        Experiment run = experiment;
        run.env.reward.sigma = sigmas[i];
        run.env.seed = sigma_seed(experiment.env.seed, sigmas[i]);
        auto trained = train(run);
        auto evaluation = evaluate(trained.qtable, run, run.eval_episodes,
                                   evaluation_seed(run.env.seed));
        slots[i] = SweepEntry{sigmas[i], run.env.seed, std::move(trained), std::move(evaluation)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(sigmas.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();

  std::vector<SweepEntry> out;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

double greedy_return(const QTable &q, AdaptationEnv &env, const StateVector &start, double gamma) {
  env.reset_to(start);
  double total = 0.0;
  double discount = 1.0;
  while (!env.episode().done) {
    total += discount * env.step(q.greedy_action(env.state_index())).reward;
    discount *= gamma;
  }
  return total;
}

OracleComparison compare_with_oracle(const QTable &q, const Experiment &experiment,
                                     const ValueFunction &optimum, double tolerance) {
  q.check_domain(experiment.domain);
  const auto states = experiment.domain.state_count();
  if (static_cast<std::size_t>(optimum.values.size()) != states) {
    throw Error(ErrorKind::Validation, "value function does not cover the domain");
  }
  AdaptationEnv env(experiment.domain, experiment.model, experiment.env);
  OracleComparison out;
  out.states = states;
  out.optimal = optimum.values;
  out.achieved.resize(optimum.values.size());
  for (StateIndex s = 0; s < states; ++s) {
    const auto row = static_cast<Eigen::Index>(s);
    out.achieved(row) =
        greedy_return(q, env, decode_state(s, experiment.domain), optimum.gamma);
    const double error = std::abs(out.achieved(row) - out.optimal(row));
    out.max_abs_error = std::max(out.max_abs_error, error);
    out.within_tolerance += error <= tolerance;
  }
  out.fraction = static_cast<double>(out.within_tolerance) / static_cast<double>(states);
  return out;
}

std::int64_t creation_time() {
  if (const char *epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char *end = nullptr;
    const long long value = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') return value;
  }
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string metrics_csv(const RunReport &report) {
  std::string out = "episode,steps,score,terminal_alignment,epsilon,ma_steps,ma_score\n";
  for (std::size_t i = 0; i < report.episodes.size(); ++i) {
    const auto &e = report.episodes[i];
    const auto row = static_cast<Eigen::Index>(i);
    out += std::to_string(e.episode) + ',' + std::to_string(e.steps) + ',' +
           format_double(e.score) + ',' + format_double(e.terminal_alignment) + ',' +
           format_double(e.epsilon) + ',' + format_double(report.ma_steps(row)) + ',' +
           format_double(report.ma_score(row)) + '\n';
  }
  return out;
}

nlohmann::json summary_json(const RunReport &report) {
  const auto &s = report.summary;
  std::size_t optimal = 0;
  for (const auto &e : report.episodes) optimal += e.termination == Termination::OptimalReached;
  return {
      {"phase", report.phase},
      {"sigma", report.sigma},
      {"episodes", report.episodes.size()},
      {"mean_steps", s.mean_steps},
      {"std_steps", s.std_steps},
      {"mean_score", s.mean_score},
      {"std_score", s.std_score},
      {"mean_alignment", s.mean_alignment},
      {"std_alignment", s.std_alignment},
      {"optimal_reached", optimal},
      {"window", report.window},
      {"seed", report.seed},
      {"domain_hash", hex64(report.domain_hash)},
  };
}

}  // namespace auirl
