#pragma once

#include <cstddef>
#include <span>

#include <json.hpp>

#include "bshadow/pauli.hpp"
#include "bshadow/shadow.hpp"

namespace bshadow {

/**
 * Per-qubit bias of the local estimator channel.
 *
 * The biased channel contracts every qubit's Bloch dilation from 3 to
 * 3*sqrt(1 - epsilon). For a weight-w Pauli observable the mean estimate is
 * therefore rescaled by (1 - epsilon)^{w/2}, which is the same as a global
 * rescale (1 - alpha) with
 *
 *     1 - alpha = (1 - epsilon)^{w/2}.
 *
 * epsilon = 0 is the standard unbiased estimator.
 */
struct BiasSpec {
  double epsilon = 0.0;

  /// Throws std::invalid_argument outside [0, 1].
  static BiasSpec checked(double epsilon);
  /// Inverse of alpha(); weight must be >= 1.
  static BiasSpec from_alpha(double alpha, int weight);

  double shrink_factor(int weight) const;  // (1 - epsilon)^{w/2}
  double alpha(int weight) const;          // 1 - shrink_factor(w)
};

/// 3 sqrt(1-eps) rho + (1 - 3 sqrt(1-eps)) I / 2.
DensityMatrix biased_local_channel(const DensityMatrix& rho1, double epsilon);

/// tr(P rho_hat) for the biased snapshot rho_hat: zero unless every
/// non-identity letter of P matches the snapshot basis on its qubit.
double snapshot_pauli_estimate(const Snapshot& s, const PauliString& p, double epsilon);

struct EstimateReport {
  double value = 0.0;
  std::size_t n_samples = 0;
  // Unbiased (n-1) sample variance of the single-shot values; 0 when
  // n_samples == 1, in which case variance_defined is false.
  double empirical_variance = 0.0;
  bool variance_defined = false;
  double epsilon = 0.0;
  double alpha = 0.0;
};

EstimateReport mean_pauli_estimate(const ShadowCollection& c, const PauliString& p, double epsilon);

/// Global-rescale entry point: the unbiased mean times (1 - alpha).
EstimateReport mean_pauli_estimate_rescaled(const ShadowCollection& c, const PauliString& p,
                                            double alpha);

/// Average over snapshots of the tensor product of biased local channels
/// applied to the measured projectors on `qubits`.
DensityMatrix reduced_density_estimate(const ShadowCollection& c, std::span<const int> qubits,
                                       double epsilon);

enum class VarianceSource {
  kTheoretical,  // 3^w - m^2
  kEmpirical,    // sample variance of the single-shot values
};

/// Data-driven optimal global rescale alpha = 1 / (1 + beta) where beta is
/// the SNR evaluated at the clamped unbiased mean m of the collection.
double plugin_alpha_star(const ShadowCollection& c, const PauliString& p,
                         VarianceSource variance = VarianceSource::kTheoretical);

nlohmann::json to_json(const EstimateReport& r);

}  // namespace bshadow
