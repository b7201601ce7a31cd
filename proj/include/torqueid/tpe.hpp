#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace torqueid::hpo {

struct IntDimension {
  std::string name;
  std::int64_t low = 0;
  std::int64_t high = 0;
};

struct FloatDimension {
  std::string name;
  double low = 0.0;
  double high = 1.0;
  bool log = false;
};

struct CategoricalDimension {
  std::string name;
  std::vector<std::string> choices;
};

using Dimension = std::variant<IntDimension, FloatDimension, CategoricalDimension>;

const std::string& dimension_name(const Dimension& d);

struct SearchSpace {
  std::vector<Dimension> dimensions;

  void validate() const;
  std::size_t size() const { return dimensions.size(); }
};

/// Hidden nodes in [10, 50] (one per subnet), optimizer in {sgd, adam,
/// rmsprop}, learning rate log-uniform in [1e-4, 1e-1].
SearchSpace torque_search_space(int subnet_count);

using ParamValue = std::variant<std::int64_t, double, std::string>;

/// Values aligned with the search space's dimensions.
struct Assignment {
  std::vector<ParamValue> values;

  std::int64_t integer(std::size_t i) const { return std::get<std::int64_t>(values.at(i)); }
  double real(std::size_t i) const { return std::get<double>(values.at(i)); }
  const std::string& category(std::size_t i) const { return std::get<std::string>(values.at(i)); }
};

bool satisfies(const SearchSpace& space, const Assignment& a);

/// Sampler constants. `random_only` turns the sampler into pure random
/// search (the comparison baseline).
struct TpeSettings {
  int n_startup = 3;
  double gamma = 0.25;
  int n_candidates = 24;
  double prior_weight = 1.0;
  bool random_only = false;
};

enum class TrialStatus { Complete, Failed };

struct Trial {
  int index = 0;
  Assignment params;
  double objective = 0.0;  ///< meaningful only when complete
  TrialStatus status = TrialStatus::Complete;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;                ///< not serialised
  std::map<std::string, double> metrics;    ///< extra values reported by the objective
  std::string error;                        ///< failure diagnostic
};

struct Study {
  SearchSpace space;
  TpeSettings settings;
  std::uint64_t seed = 0;
  std::vector<Trial> trials;
  std::optional<std::size_t> best_index;  ///< empty when no trial completed
  std::mt19937_64 rng;

  Study(SearchSpace space, std::uint64_t seed, TpeSettings settings = {});

  std::vector<const Trial*> completed() const;
  /// Minimal objective among complete trials, earliest index on ties.
  void update_best();
};

/// Good/bad partition of completed trials by rank: the best
/// max(1, ceil(gamma * k)) are good.
struct Partition {
  std::vector<const Trial*> good;
  std::vector<const Trial*> bad;
};
Partition split_trials(const std::vector<const Trial*>& completed, double gamma);

/// Next assignment. Uniform (log-uniform for log dimensions) during the
/// first n_startup completed trials; afterwards, per dimension, draws
/// n_candidates from the good-trial density l(x) and returns the one
/// maximising l(x) / g(x).
Assignment suggest(Study& study);

/// Truncated-Gaussian Parzen mixture on [low, high] with a bounds-wide prior
/// component. Exposed for testing.
class ParzenEstimator {
 public:
  ParzenEstimator(const std::vector<double>& observations, double low, double high, double prior_weight);

  double log_pdf(double x) const;
  double sample(std::mt19937_64& rng) const;

  const std::vector<double>& mus() const { return mus_; }
  const std::vector<double>& sigmas() const { return sigmas_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  double low_, high_;
  std::vector<double> mus_, sigmas_, weights_;
};

struct ObjectiveResult {
  double value = 0.0;
  std::map<std::string, double> metrics;
};

/// Must be deterministic in (assignment, seed). Throwing a NumericalError
/// or returning a non-finite value marks the trial failed.
using Objective = std::function<ObjectiveResult(const Assignment&, std::uint64_t seed)>;

/// Trial i receives seed derive_seed(seed, i), or `common_trial_seed` for
/// every trial when given (hyperparameters then are the only variable).
Study run_study(const Objective& objective, const SearchSpace& space, int n_trials, std::uint64_t seed,
                TpeSettings settings = {}, std::optional<std::uint64_t> common_trial_seed = std::nullopt);

nlohmann::ordered_json study_to_json(const Study& study);
nlohmann::ordered_json assignment_to_json(const SearchSpace& space, const Assignment& a);

}  // namespace torqueid::hpo
