#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bshadow/pauli.hpp"
#include "bshadow/rng.hpp"
#include "bshadow/spinring.hpp"

namespace bshadow {

/// Reports built from fewer repetitions than this are flagged.
inline constexpr std::size_t kMinRepetitionsForStatistics = 30;

struct PerturbationConfig {
  std::size_t n_s = 10000;
  int weight = 6;
  std::size_t n_observables = 20;
  std::size_t repetitions = 1000;
  std::uint64_t seed = 1;
  // Estimate alpha from the first half of each collection and the mean it
  // rescales from the second half.
  bool split_alpha_estimation = false;
  // Random draws allowed per requested observable before giving up.
  std::size_t max_draws_per_observable = 1000;
};

struct ObservableRow {
  PauliString observable;
  double true_value = 0.0;
  double snr_unbiased = 0.0;
  double alpha_exact = 0.0;
  double mse_unbiased = 0.0;
  double mse_alpha_exact = 0.0;
  double mse_alpha_estimated = 0.0;
  // Standard errors of the three MSEs over repetitions.
  double se_unbiased = 0.0;
  double se_alpha_exact = 0.0;
  double se_alpha_estimated = 0.0;
  bool low_statistics = false;
};

struct ExperimentReport {
  SpinRingSpec spec;
  PerturbationConfig config;
  double ground_energy = 0.0;
  std::size_t observables_drawn = 0;
  // True when fewer than n_observables passed the SNR < 1 filter.
  bool observable_shortfall = false;
  std::vector<ObservableRow> rows;  // sorted by mse_unbiased, descending
};

/// Random weight-w Pauli: w distinct sites, then a uniform X/Y/Z per site.
PauliString random_pauli(int num_qubits, int weight, Xoshiro256& rng);

/// Compares unbiased, exact-alpha* and plugin-alpha* estimates of weight-w
/// observables with unbiased SNR < 1 on the spin-ring ground state.
ExperimentReport perturbation_experiment(const SpinRingSpec& spec, const PerturbationConfig& config);

struct StrategyMse {
  double mse = 0.0;
  double standard_error = 0.0;
};

struct CombinedReport {
  PauliString perturbation;
  double exact_energy = 0.0;        // tr[H rho]
  double exact_perturbation = 0.0;  // tr[P rho]
  double alpha_star = 0.0;
  double beta = 0.0;
  std::size_t n_s = 0;
  std::size_t repetitions = 0;
  std::uint64_t seed = 0;
  StrategyMse drop;      // A only
  StrategyMse unbiased;  // A + R
  StrategyMse biased;    // A + (1 - alpha*) R
  // Standard errors of the paired differences biased - drop and
  // biased - unbiased.
  double se_biased_minus_drop = 0.0;
  double se_biased_minus_unbiased = 0.0;
};

/// Estimates tr[(H + P) rho] by dropping P, adding its unbiased estimate, or
/// adding its estimate rescaled by 1 - alpha*. alpha* comes from shadow_snr at
/// the exact expectation unless `alpha_override` is given.
CombinedReport combined_estimator_demo(const SpinRingSpec& spec, std::size_t n_s,
                                       const PauliString& perturbation, std::size_t repetitions,
                                       std::uint64_t seed,
                                       std::optional<double> alpha_override = std::nullopt);

struct DensitySample {
  BlochVector unbiased;
  BlochVector biased;
  // sign(|biased - r|^2 - |unbiased - r|^2): -1 where biasing helps.
  int loss_change_sign = 0;
};

struct DensitySampleTable {
  BlochVector truth;
  std::size_t n_s = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::vector<DensitySample> samples;

  // Biasing moves an estimate u closer to the truth iff u lies outside the
  // sphere with this center and radius. Its diameter joins the origin and
  // 2r / (1 + sqrt(1 - eps)).
  BlochVector exclusion_center() const;
  double exclusion_radius() const;
};

/// Purification of the single-qubit state with Bloch vector r (|r| <= 1) as
/// a two-qubit pure state; qubit 0 carries the state.
Statevector purify(const BlochVector& r);

/// Each sample is the unbiased Bloch-vector estimate from n_s single-qubit
/// snapshots plus its epsilon-biased counterpart.
DensitySampleTable emit_density_samples(const BlochVector& truth, std::size_t n_s,
                                        std::size_t n_points, double epsilon, std::uint64_t seed);

}  // namespace bshadow
