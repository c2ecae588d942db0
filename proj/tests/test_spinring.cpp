#include "bshadow/spinring.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace bshadow;

namespace {

SpinRingSpec fixed_ring(int n, double j) {
  SpinRingSpec s;
  s.n = n;
  s.coupling = j;
  for (int k = 0; k < n; ++k) s.omega.push_back(std::sin(1.7 * k + 0.3));
  return s;
}

// Independent dense assembly from the textbook definition.
Eigen::MatrixXcd dense_ring(const SpinRingSpec& s) {
  const int n = s.n;
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  auto site_op = [n](std::vector<std::pair<int, char>> ops) {
    std::vector<Eigen::Matrix2cd> f(n, Eigen::Matrix2cd::Identity());
    for (auto [q, c] : ops) f[q] = oracle::pauli2(c);
    return oracle::kron_qubits(f);
  };
  for (int k = 0; k < n; ++k) {
    const int next = (k + 1) % n;
    h += s.omega[k] * site_op({{k, 'Z'}});
    for (char c : {'X', 'Y', 'Z'}) h += s.coupling * site_op({{k, c}, {next, c}});
  }
  return h;
}

}  // namespace

TEST(SpinRing, TermCountAndOrder) {
  const auto h = spin_ring_hamiltonian(fixed_ring(5, 0.3));
  ASSERT_EQ(h.size(), 20u);
  EXPECT_EQ(h.terms()[0].pauli.str(), "ZIIII");
  EXPECT_EQ(h.terms()[1].pauli.str(), "XXIII");
  EXPECT_EQ(h.terms()[2].pauli.str(), "YYIII");
  EXPECT_EQ(h.terms()[3].pauli.str(), "ZZIII");
  EXPECT_EQ(h.terms()[17].pauli.str(), "XIIIX");
  EXPECT_NEAR(h.coefficient_norm(), [] {
    double s = 0;
    for (int k = 0; k < 5; ++k) s += std::abs(std::sin(1.7 * k + 0.3)) + 0.9;
    return s;
  }(), 1e-12);
}

TEST(SpinRing, RejectsBadSpecs) {
  auto s = fixed_ring(4, 0.3);
  s.omega.pop_back();
  EXPECT_THROW(spin_ring_hamiltonian(s), std::invalid_argument);
  EXPECT_THROW(build_spin_ring(2, 0.3, 1), std::invalid_argument);
}

TEST(SpinRing, RandomFieldsAreSeeded) {
  const auto [a, ha] = build_spin_ring(6, 0.3, 5);
  const auto [b, hb] = build_spin_ring(6, 0.3, 5);
  const auto [c, hc] = build_spin_ring(6, 0.3, 6);
  EXPECT_EQ(a.omega, b.omega);
  EXPECT_NE(a.omega, c.omega);
  for (double w : a.omega) {
    EXPECT_GE(w, -1.0);
    EXPECT_LE(w, 1.0);
  }
  EXPECT_EQ(a.omega_seed, std::optional<std::uint64_t>(5));
}

TEST(SpinRing, DenseMatchesDefinition) {
  for (int n : {3, 4, 5}) {
    const auto spec = fixed_ring(n, 0.3);
    const auto h = spin_ring_hamiltonian(spec);
    EXPECT_LT((h.dense() - dense_ring(spec)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(SpinRing, ApplyMatchesDense) {
  const auto spec = fixed_ring(5, 0.7);
  const auto h = spin_ring_hamiltonian(spec);
  const auto psi = Statevector::haar_random(5, 3);
  std::vector<Complex> out(psi.dimension());
  h.apply(psi.amplitudes(), out);
  const Eigen::VectorXcd expect = dense_ring(spec) * oracle::as_vector(psi);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(std::abs(out[i] - expect[i]), 0.0, 1e-13);
  EXPECT_NEAR(h.expectation(psi), (oracle::as_vector(psi).adjoint() * expect)(0, 0).real(), 1e-13);
}

TEST(GroundState, UncoupledRingIsClassical) {
  const auto spec = fixed_ring(6, 0.0);
  const auto gs = ground_state(spin_ring_hamiltonian(spec));
  double expect = 0.0;
  for (double w : spec.omega) expect -= std::abs(w);
  EXPECT_NEAR(gs.energy, expect, 1e-10);
}

TEST(GroundState, MatchesDenseEigensolver) {
  for (int n : {3, 4, 5, 6}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto [spec, h] = build_spin_ring(n, 0.3, seed);
      const auto gs = ground_state(h);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dense_ring(spec));
      EXPECT_NEAR(gs.energy, eig.eigenvalues()[0], 1e-10) << n << " " << seed;
      EXPECT_LE(gs.residual, 1e-10);
      if (eig.eigenvalues()[1] - eig.eigenvalues()[0] > 1e-6) {
        const Eigen::VectorXcd v = eig.eigenvectors().col(0);
        EXPECT_NEAR(std::abs(v.dot(oracle::as_vector(gs.state))), 1.0, 1e-8);
      }
    }
  }
}

TEST(GroundState, VariationalBoundAndPhase) {
  const auto [spec, h] = build_spin_ring(8, 0.3, 1);
  const auto gs = ground_state(h);
  EXPECT_LE(gs.residual, 1e-8);
  EXPECT_NEAR(h.expectation(gs.state), gs.energy, 1e-10);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_GE(h.expectation(Statevector::haar_random(8, seed)), gs.energy);
  }
  std::size_t arg = 0;
  for (std::size_t i = 1; i < gs.state.dimension(); ++i)
    if (std::abs(gs.state[i]) > std::abs(gs.state[arg]) + 1e-12) arg = i;
  EXPECT_NEAR(gs.state[arg].imag(), 0.0, 1e-12);
  EXPECT_GT(gs.state[arg].real(), 0.0);
  // Deterministic.
  EXPECT_EQ(ground_state(h).state.amplitudes()[arg], gs.state.amplitudes()[arg]);
}

TEST(GroundState, RingRotationInvariance) {
  auto spec = fixed_ring(7, 0.3);
  const double e0 = ground_state(spin_ring_hamiltonian(spec)).energy;
  std::rotate(spec.omega.begin(), spec.omega.begin() + 3, spec.omega.end());
  EXPECT_NEAR(ground_state(spin_ring_hamiltonian(spec)).energy, e0, 1e-10);
  std::reverse(spec.omega.begin(), spec.omega.end());
  EXPECT_NEAR(ground_state(spin_ring_hamiltonian(spec)).energy, e0, 1e-10);
}
