#include "bshadow/analytics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "bshadow/numeric.hpp"
#include "bshadow/rng.hpp"

namespace bshadow {

namespace {

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

void check_weight(int w) {
  if (w < 1) throw std::invalid_argument("Pauli weight must be >= 1");
  if (w > 40) throw std::invalid_argument("Pauli weight too large");
}

void check_shots(std::size_t n_s) {
  if (n_s == 0) throw std::invalid_argument("n_s must be >= 1");
}

}  // namespace

Minimum minimize_on_interval(const std::function<double(double)>& f, double lo, double hi,
                             std::size_t grid_points, double tol) {
  if (!(hi > lo) || grid_points < 2) throw std::invalid_argument("bad minimization interval");
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  std::size_t best = 0;
  double best_value = f(lo);
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  Minimum result{lo + step * static_cast<double>(best), best_value};

  double a = best == 0 ? lo : lo + step * static_cast<double>(best - 1);
  double b = best + 1 == grid_points ? hi : lo + step * static_cast<double>(best + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  if (fx < result.value) result = {x, fx};
  return result;
}

double average_loss(double r_norm, double epsilon) {
  check_unit(r_norm, "Bloch radius");
  check_unit(epsilon, "epsilon");
  const double r2 = r_norm * r_norm;
  const double s = std::sqrt(1.0 - epsilon);
  return 0.5 * (r2 + 9.0 * (1.0 - epsilon)) - s * r2;
}

LossMinimum eps_min(double r_norm) {
  check_unit(r_norm, "Bloch radius");
  const double r2 = r_norm * r_norm;
  // sqrt(1 - eps_min) = |r|^2 / 9
  return {1.0 - r2 * r2 / 81.0, r2 * (9.0 - r2) / 18.0};
}

WorstCaseMse::WorstCaseMse(int weight, std::size_t n_s) : weight_(weight), n_s_(n_s) {
  check_weight(weight);
  check_shots(n_s);
  if (n_s > kWorstCaseExactLimit) {
    throw std::out_of_range("n_s above the exact binomial-sum limit; use the closed form");
  }
  // log pmf(0) = n log(1-p); pmf(k+1) = pmf(k) (n-k)/(k+1) p/(1-p).
  const double p = std::pow(3.0, -weight);
  const double log_odds = std::log(p) - std::log1p(-p);
  const auto n = static_cast<double>(n_s);
  double log_pmf = n * std::log1p(-p);
  constexpr double kLogFloor = -745.0;  // exp underflows below this
  std::vector<double> pmf;
  for (std::size_t k = 0; k <= n_s; ++k) {
    if (log_pmf > kLogFloor) {
      if (pmf.empty()) first_k_ = k;
      pmf.push_back(std::exp(log_pmf));
    } else if (!pmf.empty()) {
      break;  // past the upper tail
    }
    const auto kd = static_cast<double>(k);
    log_pmf += std::log((n - kd) / (kd + 1.0)) + log_odds;
  }
  CompensatedSum total;
  for (double x : pmf) total.add(x);
  for (double& x : pmf) x /= total.value();
  pmf_ = std::move(pmf);
}

double WorstCaseMse::operator()(double epsilon) const {
  check_unit(epsilon, "epsilon");
  // Estimate after k compatible snapshots: 3^w (1-eps)^{w/2} k / n_s.
  const double per_hit = std::pow(3.0, weight_) * std::pow(1.0 - epsilon, 0.5 * weight_) /
                         static_cast<double>(n_s_);
  CompensatedSum sum;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    const double err = per_hit * static_cast<double>(first_k_ + i) - 1.0;
    sum.add(pmf_[i] * err * err);
  }
  return sum.value();
}

double worst_case_mse(int weight, std::size_t n_s, double epsilon) {
  return WorstCaseMse(weight, n_s)(epsilon);
}

double worst_case_mse_closed_form(int weight, std::size_t n_s, double epsilon) {
  check_weight(weight);
  check_shots(n_s);
  check_unit(epsilon, "epsilon");
  const double alpha = 1.0 - std::pow(1.0 - epsilon, 0.5 * weight);
  return rescaled_mse(1.0, std::pow(3.0, weight) - 1.0, n_s, alpha);
}

std::vector<MonteCarloEstimate> best_case_mse_curve(int weight, std::size_t n_s,
                                                    std::span<const double> epsilons,
                                                    std::size_t reps, std::uint64_t seed) {
  check_weight(weight);
  check_shots(n_s);
  if (reps < kMinBestCaseReps) throw std::invalid_argument("best-case Monte Carlo needs reps >= 1000");
  for (double e : epsilons) check_unit(e, "epsilon");

  // Per repetition: c ~ Binomial(n_s, 3^-w) compatible shots, each +-1 with
  // equal probability, so the parity sum is k = 2 Binomial(c, 1/2) - c.
  const double p = std::pow(3.0, -weight);
  std::vector<double> k_squared(reps);
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < reps; ++r) {
    Xoshiro256 rng = substream(seed, Stream::kMonteCarlo, r);
    std::binomial_distribution<long long> compatible_dist(static_cast<long long>(n_s), p);
    const long long compatible = compatible_dist(rng);
    long long plus = 0;
    if (compatible > 0) {
      std::binomial_distribution<long long> sign_dist(compatible, 0.5);
      plus = sign_dist(rng);
    }
    const auto k = static_cast<double>(2 * plus - compatible);
    k_squared[r] = k * k;
  }

  CompensatedSum sum;
  for (double x : k_squared) sum.add(x);
  const double mean = sum.value() / static_cast<double>(reps);
  CompensatedSum dev;
  for (double x : k_squared) dev.add((x - mean) * (x - mean));
  const double sd = std::sqrt(dev.value() / static_cast<double>(reps - 1));

  std::vector<MonteCarloEstimate> out;
  out.reserve(epsilons.size());
  for (double e : epsilons) {
    const double per_hit =
        std::pow(3.0, weight) * std::pow(1.0 - e, 0.5 * weight) / static_cast<double>(n_s);
    const double scale = per_hit * per_hit;
    out.push_back({scale * mean, scale * sd / std::sqrt(static_cast<double>(reps))});
  }
  return out;
}

MonteCarloEstimate best_case_mse(int weight, std::size_t n_s, double epsilon, std::size_t reps,
                                 std::uint64_t seed) {
  const double eps[] = {epsilon};
  return best_case_mse_curve(weight, n_s, eps, reps, seed).front();
}

double rescaled_mse(double mean, double variance, std::size_t n_s, double alpha) {
  const double shrink = 1.0 - alpha;
  return alpha * alpha * mean * mean + shrink * shrink * variance / static_cast<double>(n_s);
}

SnrReport snr(double mean, double variance, std::size_t n_s) {
  if (!std::isfinite(mean) || !std::isfinite(variance) || variance < 0.0) {
    throw std::invalid_argument("snr needs a finite mean and a finite non-negative variance");
  }
  check_shots(n_s);
  if (mean == 0.0 && variance == 0.0) throw std::invalid_argument("snr of an identically zero estimator");

  SnrReport r;
  r.mse_unbiased = variance / static_cast<double>(n_s);
  if (mean == 0.0) {
    r.beta = 0.0;
    r.alpha_star = 1.0;
    r.gain = std::numeric_limits<double>::infinity();
  } else if (variance == 0.0) {
    r.beta = std::numeric_limits<double>::infinity();
    r.alpha_star = 0.0;
    r.gain = 1.0;
  } else {
    r.beta = mean * mean / r.mse_unbiased;
    r.alpha_star = 1.0 / (1.0 + r.beta);
    r.gain = 1.0 + 1.0 / r.beta;
  }
  r.alpha_critical = 2.0 * r.alpha_star;
  r.mse_at_alpha_star = r.alpha_star * mean * mean;
  return r;
}

SnrReport shadow_snr(int weight, double expval, std::size_t n_s) {
  check_weight(weight);
  if (!(expval >= -1.0 && expval <= 1.0)) throw std::invalid_argument("expval must lie in [-1, 1]");
  return snr(expval, std::pow(3.0, weight) - expval * expval, n_s);
}

nlohmann::json to_json(const SnrReport& r) {
  auto number = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  return {{"beta", number(r.beta)},
          {"alpha_star", r.alpha_star},
          {"alpha_critical", r.alpha_critical},
          {"mse_unbiased", r.mse_unbiased},
          {"mse_at_alpha_star", r.mse_at_alpha_star},
          {"gain", number(r.gain)}};
}

}  // namespace bshadow
