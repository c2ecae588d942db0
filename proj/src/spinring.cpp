#include "bshadow/spinring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bshadow/numeric.hpp"
#include "bshadow/rng.hpp"

namespace bshadow {

namespace {

PauliString two_site(int n, int a, int b, Pauli p) {
  std::vector<Pauli> letters(n, Pauli::I);
  letters[a] = p;
  letters[b] = p;
  return PauliString(std::move(letters));
}

double dot_real(std::span<const Complex> a, std::span<const Complex> b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add((std::conj(a[i]) * b[i]).real());
  return s.value();
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  CompensatedSum re;
  CompensatedSum im;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex t = std::conj(a[i]) * b[i];
    re.add(t.real());
    im.add(t.imag());
  }
  return {re.value(), im.value()};
}

double norm(std::span<const Complex> a) { return std::sqrt(dot_real(a, a)); }

}  // namespace

Hamiltonian::Hamiltonian(int num_qubits, std::vector<HamiltonianTerm> terms)
    : num_qubits_(num_qubits), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.pauli.num_qubits() != num_qubits_) throw std::invalid_argument("term qubit count mismatch");
    if (!std::isfinite(t.coefficient)) throw std::invalid_argument("non-finite Hamiltonian coefficient");
  }
}

void Hamiltonian::apply(std::span<const Complex> in, std::span<Complex> out) const {
  const std::size_t dim = std::size_t{1} << num_qubits_;
  if (in.size() != dim || out.size() != dim) throw std::invalid_argument("state dimension mismatch");
  std::fill(out.begin(), out.end(), Complex{});
  std::vector<Complex> scratch(dim);
  for (const auto& t : terms_) {
    apply_pauli(t.pauli, in, scratch);
    for (std::size_t i = 0; i < dim; ++i) out[i] += t.coefficient * scratch[i];
  }
}

double Hamiltonian::expectation(const Statevector& state) const {
  CompensatedSum e;
  for (const auto& t : terms_) e.add(t.coefficient * exact_expectation(state, t.pauli));
  return e.value();
}

double Hamiltonian::coefficient_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient);
  return s;
}

Eigen::MatrixXcd Hamiltonian::dense() const {
  const Eigen::Index dim = Eigen::Index{1} << num_qubits_;
  Eigen::MatrixXcd m(dim, dim);
  std::vector<Complex> basis(dim);
  std::vector<Complex> column(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    std::fill(basis.begin(), basis.end(), Complex{});
    basis[j] = 1.0;
    apply(basis, column);
    for (Eigen::Index i = 0; i < dim; ++i) m(i, j) = column[i];
  }
  return m;
}

Hamiltonian spin_ring_hamiltonian(const SpinRingSpec& spec) {
  const int n = spec.n;
  if (n < 3) throw std::invalid_argument("a spin ring needs at least 3 sites");
  if (n > Statevector::kMaxQubits) throw std::invalid_argument("spin ring too large");
  if (static_cast<int>(spec.omega.size()) != n) throw std::invalid_argument("need one omega per site");
  std::vector<HamiltonianTerm> terms;
  terms.reserve(4 * n);
  for (int k = 0; k < n; ++k) {
    const int next = (k + 1) % n;
    std::vector<Pauli> z(n, Pauli::I);
    z[k] = Pauli::Z;
    terms.push_back({spec.omega[k], PauliString(std::move(z))});
    terms.push_back({spec.coupling, two_site(n, k, next, Pauli::X)});
    terms.push_back({spec.coupling, two_site(n, k, next, Pauli::Y)});
    terms.push_back({spec.coupling, two_site(n, k, next, Pauli::Z)});
  }
  return Hamiltonian(n, std::move(terms));
}

std::pair<SpinRingSpec, Hamiltonian> build_spin_ring(int n, double coupling, std::uint64_t omega_seed) {
  if (n < 3) throw std::invalid_argument("a spin ring needs at least 3 sites");
  SpinRingSpec spec;
  spec.n = n;
  spec.coupling = coupling;
  spec.omega_seed = omega_seed;
  Xoshiro256 rng = substream(omega_seed, Stream::kOmega, static_cast<std::uint64_t>(n));
  spec.omega.resize(n);
  for (auto& w : spec.omega) w = 2.0 * rng.uniform() - 1.0;
  Hamiltonian h = spin_ring_hamiltonian(spec);
  return {std::move(spec), std::move(h)};
}

GroundState ground_state(const Hamiltonian& h, double tolerance) {
  const int n = h.num_qubits();
  if (n > kMaxGroundStateQubits) throw std::invalid_argument("ground_state supports at most 14 qubits");
  const std::size_t dim = std::size_t{1} << n;
  const int krylov_max = static_cast<int>(std::min<std::size_t>(dim, 120));
  constexpr int kMaxRestarts = 60;

  // Deterministic start vector with support on every basis state.
  std::vector<Complex> start(dim);
  {
    Xoshiro256 rng = substream(0, Stream::kLanczosStart, dim);
    for (auto& a : start) a = 0.5 + rng.uniform();
    const double s = 1.0 / norm(start);
    for (auto& a : start) a *= s;
  }

  std::vector<std::vector<Complex>> basis;
  std::vector<Complex> w(dim);
  std::vector<Complex> h_psi(dim);
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    basis.clear();
    basis.push_back(start);
    std::vector<double> diag;
    std::vector<double> off;
    for (int j = 0; j < krylov_max; ++j) {
      h.apply(basis[j], w);
      diag.push_back(dot_real(basis[j], w));
      // Full reorthogonalization, applied twice.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& v : basis) {
          const Complex c = dot(v, w);
          for (std::size_t i = 0; i < dim; ++i) w[i] -= c * v[i];
        }
      }
      const double beta = norm(w);
      if (j + 1 == krylov_max || beta < 1e-12 * std::max(1.0, std::abs(diag.back()))) break;
      off.push_back(beta);
      std::vector<Complex> next(dim);
      for (std::size_t i = 0; i < dim; ++i) next[i] = w[i] / beta;
      basis.push_back(std::move(next));
    }

    const auto m = static_cast<Eigen::Index>(diag.size());
    Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(diag.data(), m);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i + 1 < m; ++i) e[i] = off[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    const Eigen::VectorXd y = tri.eigenvectors().col(0);

    std::vector<Complex> psi(dim, Complex{});
    for (Eigen::Index k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < dim; ++i) psi[i] += y[k] * basis[k][i];
    }
    const double s = 1.0 / norm(psi);
    for (auto& a : psi) a *= s;

    h.apply(psi, h_psi);
    const double energy = dot_real(psi, h_psi);
    for (std::size_t i = 0; i < dim; ++i) w[i] = h_psi[i] - energy * psi[i];
    const double residual = norm(w);
    if (residual <= tolerance) {
      std::size_t peak = 0;
      for (std::size_t i = 1; i < dim; ++i) {
        if (std::abs(psi[i]) > std::abs(psi[peak]) * (1.0 + 1e-12)) peak = i;
      }
      const Complex phase = std::abs(psi[peak]) / psi[peak];
      for (auto& a : psi) a *= phase;
      psi[peak] = std::abs(psi[peak]);
      Statevector state = Statevector::normalized(std::move(psi));
      return GroundState{h.expectation(state), std::move(state), residual, restart};
    }
    start = std::move(psi);
  }
  throw std::runtime_error("Lanczos did not converge to the ground state");
}

}  // namespace bshadow
