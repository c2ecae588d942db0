// Test-only dense oracles. Everything here builds explicit matrices and
// enumerates distributions, independently of the matrix-free library paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "bshadow/pauli.hpp"
#include "bshadow/shadow.hpp"

namespace bshadow::oracle {

inline Eigen::Matrix2cd pauli2(char c) {
  const std::complex<double> i{0.0, 1.0};
  Eigen::Matrix2cd m;
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

/// Kronecker product where factors[0] acts on qubit 0 (least-significant bit).
inline Eigen::MatrixXcd kron_qubits(const std::vector<Eigen::Matrix2cd>& factors) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
  for (const auto& f : factors) {
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index a = 0; a < 2; ++a)
      for (Eigen::Index b = 0; b < 2; ++b)
        for (Eigen::Index r = 0; r < out.rows(); ++r)
          for (Eigen::Index c = 0; c < out.cols(); ++c) next(a * out.rows() + r, b * out.cols() + c) = f(a, b) * out(r, c);
    out = next;
  }
  return out;
}

inline Eigen::MatrixXcd dense_pauli(const PauliString& p) {
  std::vector<Eigen::Matrix2cd> f;
  for (int q = 0; q < p.num_qubits(); ++q) f.push_back(pauli2(to_char(p[q])));
  return p.coefficient() * kron_qubits(f);
}

inline Eigen::VectorXcd as_vector(const Statevector& s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dimension()));
  for (std::size_t i = 0; i < s.dimension(); ++i) v[static_cast<Eigen::Index>(i)] = s[i];
  return v;
}

inline double dense_expectation(const Statevector& s, const PauliString& p) {
  const Eigen::VectorXcd v = as_vector(s);
  return (v.adjoint() * dense_pauli(p) * v)(0, 0).real();
}

/// Partial trace by explicit index summation over rho = |psi><psi|.
inline Eigen::MatrixXcd dense_partial_trace(const Statevector& s, const std::vector<int>& keep) {
  const int n = s.num_qubits();
  const Eigen::VectorXcd v = as_vector(s);
  const Eigen::MatrixXcd rho = v * v.adjoint();
  const int k = static_cast<int>(keep.size());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(1 << k, 1 << k);
  std::vector<int> rest;
  for (int q = 0; q < n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) rest.push_back(q);
  for (int a = 0; a < (1 << k); ++a)
    for (int b = 0; b < (1 << k); ++b)
      for (int e = 0; e < (1 << static_cast<int>(rest.size())); ++e) {
        int i = 0, j = 0;
        for (int t = 0; t < k; ++t) {
          i |= ((a >> t) & 1) << keep[t];
          j |= ((b >> t) & 1) << keep[t];
        }
        for (std::size_t t = 0; t < rest.size(); ++t) {
          i |= ((e >> t) & 1) << rest[t];
          j |= ((e >> t) & 1) << rest[t];
        }
        out(a, b) += rho(i, j);
      }
  return out;
}

/// Projector onto the eigenvector of the basis Pauli with eigenvalue (-1)^bit.
inline Eigen::Matrix2cd basis_projector(Basis b, int bit) {
  const double sign = bit ? -1.0 : 1.0;
  return 0.5 * (Eigen::Matrix2cd::Identity() + sign * pauli2(to_char(b)));
}

/// Visits every (bases, outcomes) assignment on `qubits` with its exact
/// probability for a state whose reduced density matrix on those qubits is
/// `rho` (qubit order as in `qubits`). Bases are uniform; outcomes follow
/// the Born rule. There are 6^k terms.
inline void for_each_local_outcome(const Eigen::MatrixXcd& rho, int k,
                                   const std::function<void(const std::vector<Basis>&,
                                                            const std::vector<int>&, double)>& visit) {
  int basis_codes = 1;
  for (int t = 0; t < k; ++t) basis_codes *= 3;
  for (int bc = 0; bc < basis_codes; ++bc) {
    std::vector<Basis> bases(k);
    int rest = bc;
    for (int t = 0; t < k; ++t) {
      bases[t] = static_cast<Basis>(rest % 3);
      rest /= 3;
    }
    for (int oc = 0; oc < (1 << k); ++oc) {
      std::vector<int> bits(k);
      std::vector<Eigen::Matrix2cd> proj(k);
      for (int t = 0; t < k; ++t) {
        bits[t] = (oc >> t) & 1;
        proj[t] = basis_projector(bases[t], bits[t]);
      }
      const double born = (rho * kron_qubits(proj)).trace().real();
      visit(bases, bits, born / basis_codes);
    }
  }
}

}  // namespace bshadow::oracle
