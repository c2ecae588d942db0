#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace bshadow {

/// Expected single-shot loss E tr[(rho - rho_hat)^2] of the biased local
/// estimator for a qubit with Bloch radius r_norm.
double average_loss(double r_norm, double epsilon);

struct LossMinimum {
  double epsilon = 0.0;
  double loss = 0.0;
};

/// Closed-form minimizer of average_loss over epsilon.
LossMinimum eps_min(double r_norm);

/// Largest shot count evaluated by explicit binomial summation.
inline constexpr std::size_t kWorstCaseExactLimit = 100000;

/// Worst-case (eigenstate, tr(O rho) = 1) mean squared error of the biased
/// mean estimator for a weight-w Pauli, as an exact sum over the
/// Binomial(n_s, 3^-w) count of compatible snapshots. Throws
/// std::out_of_range for n_s > kWorstCaseExactLimit.
double worst_case_mse(int weight, std::size_t n_s, double epsilon);

/// The Binomial(n_s, 3^-w) weights of worst_case_mse, computed once so the
/// error can be evaluated at many epsilon values.
class WorstCaseMse {
 public:
  WorstCaseMse(int weight, std::size_t n_s);

  double operator()(double epsilon) const;

  int weight() const { return weight_; }
  std::size_t n_s() const { return n_s_; }

 private:
  int weight_;
  std::size_t n_s_;
  std::size_t first_k_ = 0;  // pmf_[i] is P(k = first_k_ + i)
  std::vector<double> pmf_;
};

/// Same quantity from the bias/variance decomposition; valid for any n_s.
double worst_case_mse_closed_form(int weight, std::size_t n_s, double epsilon);

struct MonteCarloEstimate {
  double mse = 0.0;
  double standard_error = 0.0;
};

/// Best-case (tr(O rho) = 0) mean squared error by Monte Carlo. Each shot is
/// +1 or -1 with probability 3^-w / 2 each and 0 otherwise.
MonteCarloEstimate best_case_mse(int weight, std::size_t n_s, double epsilon, std::size_t reps,
                                 std::uint64_t seed);

/// best_case_mse at every epsilon, reusing the same draws.
std::vector<MonteCarloEstimate> best_case_mse_curve(int weight, std::size_t n_s,
                                                    std::span<const double> epsilons,
                                                    std::size_t reps, std::uint64_t seed);

inline constexpr std::size_t kMinBestCaseReps = 1000;

struct SnrReport {
  double beta = 0.0;
  double alpha_star = 1.0;
  double alpha_critical = 2.0;
  double mse_unbiased = 0.0;
  double mse_at_alpha_star = 0.0;
  double gain = 0.0;  // 1 + 1/beta; +inf when beta == 0
};

/// MSE of (1 - alpha) * mean estimator: alpha^2 mean^2 + (1-alpha)^2 variance / n_s.
double rescaled_mse(double mean, double variance, std::size_t n_s, double alpha);

SnrReport snr(double mean, double variance, std::size_t n_s);

/// snr for the local Pauli shadow single-shot estimator, whose variance is
/// 3^w - expval^2.
SnrReport shadow_snr(int weight, double expval, std::size_t n_s);

nlohmann::json to_json(const SnrReport& r);

}  // namespace bshadow
