#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bshadow {

using Complex = std::complex<double>;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Pauli p);

/**
 * An n-qubit Pauli observable with a real coefficient.
 *
 * Letter q acts on qubit q. In string form the first letter is qubit 0, so
 * "XZI" is X on qubit 0 and Z on qubit 1. An optional leading '+' or '-' sets
 * the sign of the coefficient.
 */
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<Pauli> letters, double coefficient = 1.0);

  static PauliString parse(std::string_view text);
  static PauliString identity(int num_qubits);

  int num_qubits() const { return static_cast<int>(letters_.size()); }
  Pauli operator[](int qubit) const { return letters_[qubit]; }
  std::span<const Pauli> letters() const { return letters_; }
  double coefficient() const { return coefficient_; }

  int weight() const;
  /// Qubits carrying a non-identity letter, ascending.
  std::vector<int> support() const;

  // Bit-level form: P|i> = i^{num_y} (-1)^{popcount(i & z_mask)} |i ^ x_mask>.
  std::uint64_t x_mask() const;
  std::uint64_t z_mask() const;
  int num_y() const;

  std::string str() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::vector<Pauli> letters_;
  double coefficient_ = 1.0;
};

int pauli_weight(const PauliString& p);

/// Pure state of up to kMaxQubits qubits. Qubit 0 is the least-significant
/// bit of the computational-basis index.
class Statevector {
 public:
  static constexpr int kMaxQubits = 20;

  /// Requires a power-of-two length and unit norm within 1e-12.
  explicit Statevector(std::vector<Complex> amplitudes);

  static Statevector basis_state(int num_qubits, std::uint64_t index);
  /// Normalizes the input; throws on zero norm.
  static Statevector normalized(std::vector<Complex> amplitudes);
  static Statevector haar_random(int num_qubits, std::uint64_t seed);
  static Statevector product(std::span<const std::array<Complex, 2>> qubit_states);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

 private:
  int num_qubits_ = 0;
  std::vector<Complex> amplitudes_;
};

/// Bloch vector r of a single-qubit state (I + r.sigma)/2.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

/**
 * Small density matrix on k qubits, k <= kMaxQubits. Row/column index bit t
 * is the state of the t-th qubit in the list the matrix was built from.
 * Shadow estimates are Hermitian with unit trace but need not be positive.
 */
class DensityMatrix {
 public:
  static constexpr int kMaxQubits = 3;

  explicit DensityMatrix(Eigen::MatrixXcd matrix);

  static DensityMatrix from_bloch(const BlochVector& r);
  static DensityMatrix maximally_mixed(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Complex operator()(Eigen::Index row, Eigen::Index col) const { return matrix_(row, col); }

  Complex trace() const { return matrix_.trace(); }
  bool is_hermitian(double tol = 1e-12) const;

 private:
  int num_qubits_ = 0;
  Eigen::MatrixXcd matrix_;
};

const Eigen::Matrix2cd& pauli_matrix(Pauli p);

/// Kronecker product with factor t on bit t of the result index.
Eigen::MatrixXcd kron_lsb_first(std::span<const Eigen::Matrix2cd> factors);

/// out = P |in>, matrix-free.
void apply_pauli(const PauliString& p, std::span<const Complex> in, std::span<Complex> out);

double exact_expectation(const Statevector& state, const PauliString& p);

/// r_i = tr(sigma_i rho). Input must be a 2x2 Hermitian unit-trace matrix.
BlochVector bloch_of(const DensityMatrix& reduced);

/// Partial trace onto `qubits` (at most 3, distinct, in range).
DensityMatrix reduced_density(const Statevector& state, std::span<const int> qubits);

}  // namespace bshadow
