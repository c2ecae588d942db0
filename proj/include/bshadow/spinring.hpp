#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bshadow/pauli.hpp"

namespace bshadow {

/// H = sum_k omega_k Z_k + J sigma_k . sigma_{k+1} on a ring of n sites.
struct SpinRingSpec {
  int n = 0;
  double coupling = 0.3;
  std::vector<double> omega;
  std::optional<std::uint64_t> omega_seed;
};

struct HamiltonianTerm {
  double coefficient = 0.0;
  PauliString pauli;  // unit coefficient
};

class Hamiltonian {
 public:
  Hamiltonian(int num_qubits, std::vector<HamiltonianTerm> terms);

  int num_qubits() const { return num_qubits_; }
  std::span<const HamiltonianTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// out = H in, matrix-free.
  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  double expectation(const Statevector& state) const;

  /// Sum of |coefficient|; bounds the spectral radius.
  double coefficient_norm() const;

  /// Dense 2^n x 2^n realization, for small-n checks.
  Eigen::MatrixXcd dense() const;

 private:
  int num_qubits_;
  std::vector<HamiltonianTerm> terms_;
};

/// Term order per site k: omega_k Z_k, J X_k X_{k+1}, J Y_k Y_{k+1}, J Z_k Z_{k+1}.
Hamiltonian spin_ring_hamiltonian(const SpinRingSpec& spec);

/// omega_k drawn uniformly from [-1, 1] with the given seed. Requires n >= 3.
std::pair<SpinRingSpec, Hamiltonian> build_spin_ring(int n, double coupling,
                                                     std::uint64_t omega_seed);

struct GroundState {
  double energy = 0.0;
  Statevector state;
  double residual = 0.0;  // ||H psi - E psi||
  int restarts = 0;
};

inline constexpr int kMaxGroundStateQubits = 14;

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
/// The global phase is fixed so the largest-magnitude amplitude (lowest
/// index on ties) is real and positive. Throws std::runtime_error when the
/// residual does not reach `tolerance`.
GroundState ground_state(const Hamiltonian& h, double tolerance = 1e-10);

}  // namespace bshadow
