#include "torqueid/tpe.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "torqueid/errors.hpp"
#include "torqueid/seeding.hpp"

namespace torqueid::hpo {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLogSqrt2Pi = 0.91893853320467274;
constexpr int kMaxRejections = 1000;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

/// Numeric view of a non-categorical dimension on which the estimator runs.
struct NumericDomain {
  double low, high;
};

NumericDomain domain_of(const Dimension& d) {
  if (const auto* i = std::get_if<IntDimension>(&d)) {
    return {static_cast<double>(i->low) - 0.5, static_cast<double>(i->high) + 0.5};
  }
  const auto& f = std::get<FloatDimension>(d);
  return f.log ? NumericDomain{std::log(f.low), std::log(f.high)} : NumericDomain{f.low, f.high};
}

double to_internal(const Dimension& d, const ParamValue& v) {
  if (std::holds_alternative<IntDimension>(d)) return static_cast<double>(std::get<std::int64_t>(v));
  const auto& f = std::get<FloatDimension>(d);
  return f.log ? std::log(std::get<double>(v)) : std::get<double>(v);
}

ParamValue from_internal(const Dimension& d, double x) {
  if (const auto* i = std::get_if<IntDimension>(&d)) {
    const auto r = static_cast<std::int64_t>(std::llround(x));
    return std::clamp(r, i->low, i->high);
  }
  const auto& f = std::get<FloatDimension>(d);
  return std::clamp(f.log ? std::exp(x) : x, f.low, f.high);
}

ParamValue sample_uniform(const Dimension& d, std::mt19937_64& rng) {
  if (const auto* c = std::get_if<CategoricalDimension>(&d)) {
    std::uniform_int_distribution<std::size_t> pick(0, c->choices.size() - 1);
    return c->choices[pick(rng)];
  }
  if (const auto* i = std::get_if<IntDimension>(&d)) {
    std::uniform_int_distribution<std::int64_t> pick(i->low, i->high);
    return pick(rng);
  }
  const NumericDomain dom = domain_of(d);
  std::uniform_real_distribution<double> u(dom.low, dom.high);
  return from_internal(d, u(rng));
}

ParamValue sample_categorical(const CategoricalDimension& c, const Partition& part, std::size_t dim,
                              const TpeSettings& s, std::mt19937_64& rng) {
  const std::size_t k = c.choices.size();
  auto weights = [&](const std::vector<const Trial*>& trials) {
    std::vector<double> w(k, s.prior_weight);
    for (const Trial* t : trials) {
      const auto& v = t->params.category(dim);
      const auto it = std::find(c.choices.begin(), c.choices.end(), v);
      w[static_cast<std::size_t>(it - c.choices.begin())] += 1.0;
    }
    double total = 0.0;
    for (double x : w) total += x;
    for (double& x : w) x /= total;
    return w;
  };
  const std::vector<double> l = weights(part.good);
  const std::vector<double> g = weights(part.bad);

  std::discrete_distribution<std::size_t> draw(l.begin(), l.end());
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < s.n_candidates; ++n) {
    const std::size_t idx = draw(rng);
    const double score = std::log(l[idx]) - std::log(g[idx]);
    if (score > best_score) {
      best_score = score;
      best = idx;
    }
  }
  return c.choices[best];
}

ParamValue sample_numeric(const Dimension& d, const Partition& part, std::size_t dim, const TpeSettings& s,
                          std::mt19937_64& rng) {
  const NumericDomain dom = domain_of(d);
  auto observations = [&](const std::vector<const Trial*>& trials) {
    std::vector<double> obs;
    for (const Trial* t : trials) obs.push_back(to_internal(d, t->params.values[dim]));
    return obs;
  };
  const ParzenEstimator l(observations(part.good), dom.low, dom.high, s.prior_weight);
  const ParzenEstimator g(observations(part.bad), dom.low, dom.high, s.prior_weight);

  double best = l.sample(rng);
  double best_score = l.log_pdf(best) - g.log_pdf(best);
  for (int n = 1; n < s.n_candidates; ++n) {
    const double x = l.sample(rng);
    const double score = l.log_pdf(x) - g.log_pdf(x);
    if (score > best_score) {
      best_score = score;
      best = x;
    }
  }
  return from_internal(d, best);
}

}  // namespace

const std::string& dimension_name(const Dimension& d) {
  return std::visit([](const auto& x) -> const std::string& { return x.name; }, d);
}

void SearchSpace::validate() const {
  if (dimensions.empty()) throw ValidationError("search space is empty");
  for (const Dimension& d : dimensions) {
    const std::string& name = dimension_name(d);
    if (const auto* i = std::get_if<IntDimension>(&d)) {
      if (i->low > i->high) throw ValidationError(name + ": bounds are not ordered");
    } else if (const auto* f = std::get_if<FloatDimension>(&d)) {
      if (!(f->low < f->high)) throw ValidationError(name + ": bounds are not ordered");
      if (f->log && !(f->low > 0.0)) throw ValidationError(name + ": log dimension needs positive bounds");
    } else if (std::get<CategoricalDimension>(d).choices.empty()) {
      throw ValidationError(name + ": no categories");
    }
  }
}

SearchSpace torque_search_space(int subnet_count) {
  SearchSpace space;
  for (int i = 0; i < subnet_count; ++i) {
    const std::string name = subnet_count == 1 ? "hidden" : "hidden_" + std::string(1, static_cast<char>('a' + i));
    space.dimensions.emplace_back(IntDimension{name, 10, 50});
  }
  space.dimensions.emplace_back(CategoricalDimension{"optimizer", {"sgd", "adam", "rmsprop"}});
  space.dimensions.emplace_back(FloatDimension{"learning_rate", 1e-4, 1e-1, true});
  return space;
}

bool satisfies(const SearchSpace& space, const Assignment& a) {
  if (a.values.size() != space.size()) return false;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Dimension& d = space.dimensions[i];
    const ParamValue& v = a.values[i];
    if (const auto* id = std::get_if<IntDimension>(&d)) {
      const auto* x = std::get_if<std::int64_t>(&v);
      if (!x || *x < id->low || *x > id->high) return false;
    } else if (const auto* fd = std::get_if<FloatDimension>(&d)) {
      const auto* x = std::get_if<double>(&v);
      if (!x || !(*x >= fd->low && *x <= fd->high)) return false;
    } else {
      const auto& cd = std::get<CategoricalDimension>(d);
      const auto* x = std::get_if<std::string>(&v);
      if (!x || std::find(cd.choices.begin(), cd.choices.end(), *x) == cd.choices.end()) return false;
    }
  }
  return true;
}

ParzenEstimator::ParzenEstimator(const std::vector<double>& observations, double low, double high,
                                 double prior_weight)
    : low_(low), high_(high) {
  const double range = high - low;
  struct Component {
    double mu;
    double weight;
    bool prior;
  };
  std::vector<Component> comps;
  for (double x : observations) comps.push_back({x, 1.0, false});
  if (prior_weight > 0.0 || comps.empty()) comps.push_back({0.5 * (low + high), prior_weight > 0.0 ? prior_weight : 1.0, true});
  std::stable_sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) { return a.mu < b.mu; });

  const double min_sigma = range / std::min(100.0, 1.0 + static_cast<double>(comps.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    double sigma = range;
    if (!comps[i].prior) {
      const double left = i == 0 ? low : comps[i - 1].mu;
      const double right = i + 1 == comps.size() ? high : comps[i + 1].mu;
      sigma = std::clamp(std::max(comps[i].mu - left, right - comps[i].mu), min_sigma, range);
    }
    mus_.push_back(comps[i].mu);
    sigmas_.push_back(sigma);
    weights_.push_back(comps[i].weight);
    total += comps[i].weight;
  }
  for (double& w : weights_) w /= total;
}

double ParzenEstimator::log_pdf(double x) const {
  if (x < low_ || x > high_) return -std::numeric_limits<double>::infinity();
  std::vector<double> terms(mus_.size());
  double max_term = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mus_.size(); ++i) {
    const double s = sigmas_[i];
    const double z = (x - mus_[i]) / s;
    const double mass = normal_cdf((high_ - mus_[i]) / s) - normal_cdf((low_ - mus_[i]) / s);
    terms[i] = std::log(weights_[i]) - 0.5 * z * z - kLogSqrt2Pi - std::log(s) - std::log(mass);
    max_term = std::max(max_term, terms[i]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum);
}

double ParzenEstimator::sample(std::mt19937_64& rng) const {
  std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
  const std::size_t i = pick(rng);
  std::normal_distribution<double> normal(mus_[i], sigmas_[i]);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const double x = normal(rng);
    if (x >= low_ && x <= high_) return x;
  }
  return std::clamp(mus_[i], low_, high_);
}

Study::Study(SearchSpace space_, std::uint64_t seed_, TpeSettings settings_)
    : space(std::move(space_)), settings(settings_), seed(seed_), rng(seed_) {
  space.validate();
  if (!(settings.gamma > 0.0 && settings.gamma <= 1.0) || settings.n_candidates < 1 || settings.n_startup < 0 ||
      settings.prior_weight < 0.0) {
    throw ValidationError("invalid TPE settings");
  }
}

std::vector<const Trial*> Study::completed() const {
  std::vector<const Trial*> out;
  for (const Trial& t : trials) {
    if (t.status == TrialStatus::Complete) out.push_back(&t);
  }
  return out;
}

void Study::update_best() {
  best_index.reset();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const Trial& t = trials[i];
    if (t.status != TrialStatus::Complete) continue;
    if (!best_index || t.objective < trials[*best_index].objective) best_index = i;
  }
}

Partition split_trials(const std::vector<const Trial*>& completed, double gamma) {
  std::vector<const Trial*> sorted = completed;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Trial* a, const Trial* b) {
    return a->objective < b->objective || (a->objective == b->objective && a->index < b->index);
  });
  const auto k = static_cast<double>(sorted.size());
  const auto n_good = std::min(sorted.size(), std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(gamma * k))));
  Partition p;
  p.good.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n_good));
  p.bad.assign(sorted.begin() + static_cast<std::ptrdiff_t>(n_good), sorted.end());
  return p;
}

Assignment suggest(Study& study) {
  study.space.validate();
  const auto completed = study.completed();
  Assignment a;
  const bool startup = study.settings.random_only ||
                       static_cast<int>(completed.size()) < std::max(1, study.settings.n_startup);
  if (startup) {
    for (const Dimension& d : study.space.dimensions) a.values.push_back(sample_uniform(d, study.rng));
    return a;
  }
  const Partition part = split_trials(completed, study.settings.gamma);
  for (std::size_t i = 0; i < study.space.size(); ++i) {
    const Dimension& d = study.space.dimensions[i];
    if (const auto* c = std::get_if<CategoricalDimension>(&d)) {
      a.values.push_back(sample_categorical(*c, part, i, study.settings, study.rng));
    } else {
      a.values.push_back(sample_numeric(d, part, i, study.settings, study.rng));
    }
  }
  return a;
}

Study run_study(const Objective& objective, const SearchSpace& space, int n_trials, std::uint64_t seed,
                TpeSettings settings, std::optional<std::uint64_t> common_trial_seed) {
  if (n_trials < 1) throw ValidationError("n_trials must be >= 1");
  Study study(space, seed, settings);
  for (int i = 0; i < n_trials; ++i) {
    Trial t;
    t.index = i;
    t.params = suggest(study);
    t.seed = common_trial_seed.value_or(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const auto started = std::chrono::steady_clock::now();
    try {
      ObjectiveResult r = objective(t.params, t.seed);
      t.objective = r.value;
      t.metrics = std::move(r.metrics);
      if (!std::isfinite(r.value)) {
        t.status = TrialStatus::Failed;
        t.error = "non-finite objective";
      }
    } catch (const NumericalError& e) {
      t.status = TrialStatus::Failed;
      t.error = e.what();
    }
    t.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    study.trials.push_back(std::move(t));
    study.update_best();
  }
  return study;
}

nlohmann::ordered_json assignment_to_json(const SearchSpace& space, const Assignment& a) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < space.size() && i < a.values.size(); ++i) {
    std::visit([&](const auto& v) { j[dimension_name(space.dimensions[i])] = v; }, a.values[i]);
  }
  return j;
}

nlohmann::ordered_json study_to_json(const Study& study) {
  using J = nlohmann::ordered_json;
  J space = J::array();
  for (const Dimension& d : study.space.dimensions) {
    if (const auto* i = std::get_if<IntDimension>(&d)) {
      space.push_back(J{{"name", i->name}, {"type", "int"}, {"low", i->low}, {"high", i->high}});
    } else if (const auto* f = std::get_if<FloatDimension>(&d)) {
      space.push_back(J{{"name", f->name}, {"type", "float"}, {"low", f->low}, {"high", f->high}, {"log", f->log}});
    } else {
      const auto& c = std::get<CategoricalDimension>(d);
      space.push_back(J{{"name", c.name}, {"type", "categorical"}, {"choices", c.choices}});
    }
  }
  J trials = J::array();
  for (const Trial& t : study.trials) {
    J tj{{"index", t.index},
         {"status", t.status == TrialStatus::Complete ? "complete" : "failed"},
         {"objective", t.status == TrialStatus::Complete ? J(t.objective) : J(nullptr)},
         {"seed", t.seed},
         {"params", assignment_to_json(study.space, t.params)},
         {"metrics", t.metrics}};
    if (!t.error.empty()) tj["error"] = t.error;
    trials.push_back(std::move(tj));
  }
  const auto& s = study.settings;
  return J{{"schema", "torqueid.study/1"},
           {"seed", study.seed},
           {"sampler", {{"kind", s.random_only ? "random" : "tpe"},
                        {"n_startup", s.n_startup},
                        {"gamma", s.gamma},
                        {"n_candidates", s.n_candidates},
                        {"prior_weight", s.prior_weight}}},
           {"space", space},
           {"trials", trials},
           {"best_index", study.best_index ? J(*study.best_index) : J(nullptr)}};
}

}  // namespace torqueid::hpo
