#include "bshadow/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace bshadow {

namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
}

// Per-collection tally of a Pauli string: number of compatible snapshots and
// the sum of their +-1 outcome parities. Everything else follows from these
// two integers, so the summation is exact.
struct Tally {
  std::int64_t compatible = 0;
  std::int64_t parity_sum = 0;
};

Tally tally(const ShadowCollection& c, const PauliString& p) {
  if (p.num_qubits() != c.num_qubits()) {
    throw std::invalid_argument("Pauli string and shadow collection have different qubit counts");
  }
  const std::vector<int> support = p.support();
  Tally t;
  for (const auto& s : c.snapshots()) {
    bool compatible = true;
    int parity = 0;
    for (int q : support) {
      if (to_pauli(s.bases[q]) != p[q]) {
        compatible = false;
        break;
      }
      parity ^= s.outcomes[q];
    }
    if (compatible) {
      ++t.compatible;
      t.parity_sum += parity ? -1 : 1;
    }
  }
  return t;
}

// Unbiased estimate of the mean and (n-1) sample variance from a tally.
EstimateReport unbiased_report(const Tally& t, std::size_t n, const PauliString& p) {
  const double amplification = std::pow(3.0, p.weight()) * p.coefficient();
  const auto count = static_cast<std::int64_t>(n);
  EstimateReport r;
  r.n_samples = n;
  r.value = amplification * static_cast<double>(t.parity_sum) / static_cast<double>(n);
  if (n > 1) {
    // sum v^2 - n mean^2 = a^2 (compatible - parity_sum^2 / n)
    const double numerator =
        static_cast<double>(t.compatible * count - t.parity_sum * t.parity_sum);
    r.empirical_variance = std::max(
        0.0, amplification * amplification * numerator / (static_cast<double>(n) * (n - 1)));
    r.variance_defined = true;
  }
  return r;
}

}  // namespace

BiasSpec BiasSpec::checked(double epsilon) {
  check_epsilon(epsilon);
  return BiasSpec{epsilon};
}

BiasSpec BiasSpec::from_alpha(double alpha, int weight) {
  check_alpha(alpha);
  if (weight < 1) throw std::invalid_argument("alpha -> epsilon conversion needs weight >= 1");
  return BiasSpec{1.0 - std::pow(1.0 - alpha, 2.0 / weight)};
}

double BiasSpec::shrink_factor(int weight) const { return std::pow(1.0 - epsilon, 0.5 * weight); }

double BiasSpec::alpha(int weight) const { return 1.0 - shrink_factor(weight); }

DensityMatrix biased_local_channel(const DensityMatrix& rho1, double epsilon) {
  check_epsilon(epsilon);
  if (rho1.num_qubits() != 1) throw std::invalid_argument("the local channel acts on one qubit");
  const double dilation = 3.0 * std::sqrt(1.0 - epsilon);
  Eigen::MatrixXcd out =
      dilation * rho1.matrix() + 0.5 * (1.0 - dilation) * Eigen::MatrixXcd::Identity(2, 2);
  return DensityMatrix(std::move(out));
}

double snapshot_pauli_estimate(const Snapshot& s, const PauliString& p, double epsilon) {
  check_epsilon(epsilon);
  if (p.num_qubits() != s.num_qubits()) {
    throw std::invalid_argument("Pauli string and snapshot have different qubit counts");
  }
  int parity = 0;
  for (int q : p.support()) {
    if (to_pauli(s.bases[q]) != p[q]) return 0.0;
    parity ^= s.outcomes[q];
  }
  const int w = p.weight();
  const double value = std::pow(3.0, w) * BiasSpec{epsilon}.shrink_factor(w) * p.coefficient();
  return parity ? -value : value;
}

EstimateReport mean_pauli_estimate(const ShadowCollection& c, const PauliString& p, double epsilon) {
  check_epsilon(epsilon);
  EstimateReport r = unbiased_report(tally(c, p), c.size(), p);
  const BiasSpec bias{epsilon};
  const double shrink = bias.shrink_factor(p.weight());
  r.value *= shrink;
  r.empirical_variance *= shrink * shrink;
  r.epsilon = epsilon;
  r.alpha = bias.alpha(p.weight());
  return r;
}

EstimateReport mean_pauli_estimate_rescaled(const ShadowCollection& c, const PauliString& p,
                                            double alpha) {
  check_alpha(alpha);
  EstimateReport r = unbiased_report(tally(c, p), c.size(), p);
  const double shrink = 1.0 - alpha;
  r.value *= shrink;
  r.empirical_variance *= shrink * shrink;
  r.alpha = alpha;
  r.epsilon = p.weight() > 0 ? BiasSpec::from_alpha(alpha, p.weight()).epsilon : 0.0;
  return r;
}

DensityMatrix reduced_density_estimate(const ShadowCollection& c, std::span<const int> qubits,
                                       double epsilon) {
  check_epsilon(epsilon);
  const int k = static_cast<int>(qubits.size());
  if (k == 0 || k > DensityMatrix::kMaxQubits) {
    throw std::invalid_argument("reduced_density_estimate keeps between 1 and 3 qubits");
  }
  std::uint64_t seen = 0;
  for (int q : qubits) {
    if (q < 0 || q >= c.num_qubits()) throw std::invalid_argument("qubit index out of range");
    if (seen & (std::uint64_t{1} << q)) throw std::invalid_argument("duplicate qubit index");
    seen |= std::uint64_t{1} << q;
  }

  // Count each joint (basis, outcome) pattern on the kept qubits; local
  // pattern code is 2 * basis + outcome.
  std::size_t patterns = 1;
  for (int t = 0; t < k; ++t) patterns *= 6;
  std::vector<std::size_t> counts(patterns, 0);
  for (const auto& s : c.snapshots()) {
    std::size_t code = 0;
    for (int t = k - 1; t >= 0; --t) {
      code = code * 6 + 2 * static_cast<std::size_t>(s.bases[qubits[t]]) + s.outcomes[qubits[t]];
    }
    ++counts[code];
  }

  const double dilation = 3.0 * std::sqrt(1.0 - epsilon);
  std::array<Eigen::Matrix2cd, 6> local;
  for (int b = 0; b < 3; ++b) {
    for (int o = 0; o < 2; ++o) {
      const double sign = o ? -1.0 : 1.0;
      local[2 * b + o] = 0.5 * (Eigen::Matrix2cd::Identity() +
                                sign * dilation * pauli_matrix(to_pauli(static_cast<Basis>(b))));
    }
  }

  const Eigen::Index dim = Eigen::Index{1} << k;
  Eigen::MatrixXcd estimate = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<Eigen::Matrix2cd> factors(k);
  for (std::size_t code = 0; code < patterns; ++code) {
    if (counts[code] == 0) continue;
    std::size_t rest = code;
    for (int t = 0; t < k; ++t) {
      factors[t] = local[rest % 6];
      rest /= 6;
    }
    estimate += static_cast<double>(counts[code]) * kron_lsb_first(factors);
  }
  estimate /= static_cast<double>(c.size());
  return DensityMatrix(std::move(estimate));
}

double plugin_alpha_star(const ShadowCollection& c, const PauliString& p, VarianceSource variance) {
  const int w = p.weight();
  if (w == 0) return 0.0;  // the identity is estimated exactly
  if (p.coefficient() == 0.0) return 1.0;
  const EstimateReport unbiased = unbiased_report(tally(c, p), c.size(), p);
  // Work with the unit-coefficient observable; alpha is scale invariant.
  const double m = std::clamp(unbiased.value / p.coefficient(), -1.0, 1.0);
  if (m == 0.0) return 1.0;
  double single_shot_variance = std::pow(3.0, w) - m * m;
  if (variance == VarianceSource::kEmpirical && unbiased.variance_defined) {
    single_shot_variance = unbiased.empirical_variance / (p.coefficient() * p.coefficient());
  }
  if (single_shot_variance <= 0.0) return 0.0;
  const double beta = static_cast<double>(c.size()) * m * m / single_shot_variance;
  return 1.0 / (1.0 + beta);
}

nlohmann::json to_json(const EstimateReport& r) {
  return {{"value", r.value},
          {"n_samples", r.n_samples},
          {"empirical_variance", r.empirical_variance},
          {"epsilon", r.epsilon},
          {"alpha", r.alpha}};
}

}  // namespace bshadow
