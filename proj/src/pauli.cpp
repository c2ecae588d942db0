#include "bshadow/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "bshadow/numeric.hpp"
#include "bshadow/rng.hpp"

namespace bshadow {

namespace {

constexpr double kNormTolerance = 1e-12;

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case '_': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw std::invalid_argument(std::string("invalid Pauli letter '") + c + "'");
  }
}

// i^k for k mod 4.
Complex i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

}  // namespace

char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

PauliString::PauliString(std::vector<Pauli> letters, double coefficient)
    : letters_(std::move(letters)), coefficient_(coefficient) {
  if (letters_.size() > 64) throw std::invalid_argument("PauliString supports at most 64 qubits");
}

PauliString PauliString::parse(std::string_view text) {
  double coefficient = 1.0;
  if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
    if (text.front() == '-') coefficient = -1.0;
    text.remove_prefix(1);
  }
  if (text.empty()) throw std::invalid_argument("empty Pauli string");
  std::vector<Pauli> letters;
  letters.reserve(text.size());
  for (char c : text) letters.push_back(pauli_from_char(c));
  return PauliString(std::move(letters), coefficient);
}

PauliString PauliString::identity(int num_qubits) {
  return PauliString(std::vector<Pauli>(num_qubits, Pauli::I));
}

int PauliString::weight() const {
  return static_cast<int>(std::count_if(letters_.begin(), letters_.end(),
                                         [](Pauli p) { return p != Pauli::I; }));
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (int q = 0; q < num_qubits(); ++q) {
    if (letters_[q] != Pauli::I) out.push_back(q);
  }
  return out;
}

std::uint64_t PauliString::x_mask() const {
  std::uint64_t m = 0;
  for (int q = 0; q < num_qubits(); ++q) {
    if (letters_[q] == Pauli::X || letters_[q] == Pauli::Y) m |= std::uint64_t{1} << q;
  }
  return m;
}

std::uint64_t PauliString::z_mask() const {
  std::uint64_t m = 0;
  for (int q = 0; q < num_qubits(); ++q) {
    if (letters_[q] == Pauli::Z || letters_[q] == Pauli::Y) m |= std::uint64_t{1} << q;
  }
  return m;
}

int PauliString::num_y() const {
  return static_cast<int>(std::count(letters_.begin(), letters_.end(), Pauli::Y));
}

std::string PauliString::str() const {
  std::string s;
  if (coefficient_ == -1.0) {
    s = "-";
  } else if (coefficient_ != 1.0) {
    s = std::to_string(coefficient_) + "*";
  }
  for (Pauli p : letters_) s.push_back(to_char(p));
  return s;
}

int pauli_weight(const PauliString& p) { return p.weight(); }

// ---------------------------------------------------------------------------

Statevector::Statevector(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (!is_power_of_two(amplitudes_.size())) {
    throw std::invalid_argument("statevector length must be a power of two");
  }
  num_qubits_ = std::countr_zero(amplitudes_.size());
  if (num_qubits_ > kMaxQubits) throw std::invalid_argument("too many qubits for a statevector");
  CompensatedSum norm;
  for (const auto& a : amplitudes_) norm.add(std::norm(a));
  if (std::abs(norm.value() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("statevector is not normalized");
  }
}

Statevector Statevector::basis_state(int num_qubits, std::uint64_t index) {
  if (num_qubits < 0 || num_qubits > kMaxQubits) throw std::invalid_argument("bad qubit count");
  std::vector<Complex> amps(std::size_t{1} << num_qubits);
  if (index >= amps.size()) throw std::invalid_argument("basis index out of range");
  amps[index] = 1.0;
  return Statevector(std::move(amps));
}

Statevector Statevector::normalized(std::vector<Complex> amplitudes) {
  CompensatedSum norm;
  for (const auto& a : amplitudes) norm.add(std::norm(a));
  if (!(norm.value() > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
  const double scale = 1.0 / std::sqrt(norm.value());
  for (auto& a : amplitudes) a *= scale;
  return Statevector(std::move(amplitudes));
}

Statevector Statevector::haar_random(int num_qubits, std::uint64_t seed) {
  if (num_qubits < 0 || num_qubits > kMaxQubits) throw std::invalid_argument("bad qubit count");
  Xoshiro256 rng = substream(seed, Stream::kHaar, static_cast<std::uint64_t>(num_qubits));
  std::normal_distribution<double> gauss;
  std::vector<Complex> amps(std::size_t{1} << num_qubits);
  for (auto& a : amps) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    a = {re, im};
  }
  return normalized(std::move(amps));
}

Statevector Statevector::product(std::span<const std::array<Complex, 2>> qubit_states) {
  std::vector<Complex> amps{1.0};
  // Qubit 0 is the least-significant bit, so each new factor doubles the
  // vector with the new qubit on the high bit.
  for (const auto& q : qubit_states) {
    std::vector<Complex> next(amps.size() * 2);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      next[i] = amps[i] * q[0];
      next[i + amps.size()] = amps[i] * q[1];
    }
    amps = std::move(next);
  }
  return normalized(std::move(amps));
}

// ---------------------------------------------------------------------------

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

DensityMatrix::DensityMatrix(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
  const auto dim = static_cast<std::size_t>(matrix_.rows());
  if (matrix_.rows() != matrix_.cols() || !is_power_of_two(dim)) {
    throw std::invalid_argument("density matrix must be square with power-of-two dimension");
  }
  num_qubits_ = std::countr_zero(dim);
  if (num_qubits_ > kMaxQubits) throw std::invalid_argument("density matrix too large");
}

DensityMatrix DensityMatrix::from_bloch(const BlochVector& r) {
  Eigen::Matrix2cd m = 0.5 * (Eigen::Matrix2cd::Identity() + r.x * pauli_matrix(Pauli::X) +
                              r.y * pauli_matrix(Pauli::Y) + r.z * pauli_matrix(Pauli::Z));
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

bool DensityMatrix::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

const Eigen::Matrix2cd& pauli_matrix(Pauli p) {
  static const std::array<Eigen::Matrix2cd, 4> table = [] {
    std::array<Eigen::Matrix2cd, 4> t;
    const Complex i{0.0, 1.0};
    t[0] << 1, 0, 0, 1;
    t[1] << 0, 1, 1, 0;
    t[2] << 0, -i, i, 0;
    t[3] << 1, 0, 0, -1;
    return t;
  }();
  return table[static_cast<int>(p)];
}

Eigen::MatrixXcd kron_lsb_first(std::span<const Eigen::Matrix2cd> factors) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Ones(1, 1);
  for (const auto& f : factors) {
    // New factor occupies the next-higher bit: out' = f (x) out.
    const Eigen::Index d = out.rows();
    Eigen::MatrixXcd next(2 * d, 2 * d);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) next.block(a * d, b * d, d, d) = f(a, b) * out;
    }
    out = std::move(next);
  }
  return out;
}

void apply_pauli(const PauliString& p, std::span<const Complex> in, std::span<Complex> out) {
  if (in.size() != (std::size_t{1} << p.num_qubits()) || out.size() != in.size()) {
    throw std::invalid_argument("Pauli string and state dimensions differ");
  }
  const std::uint64_t xm = p.x_mask();
  const std::uint64_t zm = p.z_mask();
  const Complex phase = i_power(p.num_y()) * p.coefficient();
  for (std::uint64_t i = 0; i < in.size(); ++i) {
    const double sign = (std::popcount(i & zm) & 1) ? -1.0 : 1.0;
    out[i ^ xm] = phase * sign * in[i];
  }
}

double exact_expectation(const Statevector& state, const PauliString& p) {
  if (state.num_qubits() != p.num_qubits()) {
    throw std::invalid_argument("Pauli string and state have different qubit counts");
  }
  const std::uint64_t xm = p.x_mask();
  const std::uint64_t zm = p.z_mask();
  const auto amps = state.amplitudes();
  // <psi|P|psi> = sum_i conj(psi[i ^ x]) phase(i) psi[i]; only the real part
  // survives for Hermitian P.
  CompensatedSum re;
  CompensatedSum im;
  for (std::uint64_t i = 0; i < amps.size(); ++i) {
    const Complex t = std::conj(amps[i ^ xm]) * amps[i];
    if (std::popcount(i & zm) & 1) {
      re.add(-t.real());
      im.add(-t.imag());
    } else {
      re.add(t.real());
      im.add(t.imag());
    }
  }
  const Complex total = i_power(p.num_y()) * Complex(re.value(), im.value());
  return p.coefficient() * total.real();
}

BlochVector bloch_of(const DensityMatrix& reduced) {
  constexpr double kTol = 1e-10;
  if (reduced.num_qubits() != 1) throw std::invalid_argument("bloch_of needs a single-qubit matrix");
  if (!reduced.is_hermitian(kTol)) throw std::invalid_argument("bloch_of input is not Hermitian");
  if (std::abs(reduced.trace() - 1.0) > kTol) throw std::invalid_argument("bloch_of input trace != 1");
  const auto& m = reduced.matrix();
  return {(pauli_matrix(Pauli::X) * m).trace().real(), (pauli_matrix(Pauli::Y) * m).trace().real(),
          (pauli_matrix(Pauli::Z) * m).trace().real()};
}

DensityMatrix reduced_density(const Statevector& state, std::span<const int> qubits) {
  const int n = state.num_qubits();
  const int k = static_cast<int>(qubits.size());
  if (k == 0 || k > DensityMatrix::kMaxQubits) {
    throw std::invalid_argument("reduced_density keeps between 1 and 3 qubits");
  }
  std::uint64_t kept = 0;
  for (int q : qubits) {
    if (q < 0 || q >= n) throw std::invalid_argument("qubit index out of range");
    if (kept & (std::uint64_t{1} << q)) throw std::invalid_argument("duplicate qubit index");
    kept |= std::uint64_t{1} << q;
  }

  const Eigen::Index dim = Eigen::Index{1} << k;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  const auto amps = state.amplitudes();
  auto sub_index = [&](std::uint64_t i) {
    Eigen::Index a = 0;
    for (int t = 0; t < k; ++t) a |= static_cast<Eigen::Index>((i >> qubits[t]) & 1) << t;
    return a;
  };
  auto with_sub_index = [&](std::uint64_t i, Eigen::Index b) {
    for (int t = 0; t < k; ++t) {
      const std::uint64_t bit = std::uint64_t{1} << qubits[t];
      i = (b >> t) & 1 ? (i | bit) : (i & ~bit);
    }
    return i;
  };
  // rho[a][b] = sum over the traced-out bits of psi[a, rest] conj(psi[b, rest]).
  for (std::uint64_t i = 0; i < amps.size(); ++i) {
    const Eigen::Index a = sub_index(i);
    for (Eigen::Index b = 0; b < dim; ++b) {
      rho(a, b) += amps[i] * std::conj(amps[with_sub_index(i, b)]);
    }
  }
  return DensityMatrix(std::move(rho));
}

}  // namespace bshadow
