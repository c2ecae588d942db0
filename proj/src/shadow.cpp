#include "bshadow/shadow.hpp"

#include <cmath>
#include <stdexcept>

namespace bshadow {

namespace {

// Rows are the bra of the +1 and -1 eigenvector of the basis Pauli, so
// applying U and measuring in the computational basis measures that Pauli.
struct Rotation {
  Complex u00, u01, u10, u11;
};

Rotation rotation_for(Basis b) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (b) {
    case Basis::X: return {s, s, s, -s};
    case Basis::Y: return {s, Complex(0.0, -s), s, Complex(0.0, s)};
    case Basis::Z: return {1.0, 0.0, 0.0, 1.0};
  }
  throw std::logic_error("unreachable basis");
}

void check_bases(const Statevector& state, std::span<const Basis> bases) {
  if (static_cast<int>(bases.size()) != state.num_qubits()) {
    throw std::invalid_argument("basis count differs from qubit count");
  }
}

}  // namespace

char to_char(Basis b) { return "XYZ"[static_cast<int>(b)]; }

Basis basis_from_char(char c) {
  switch (c) {
    case 'X': return Basis::X;
    case 'Y': return Basis::Y;
    case 'Z': return Basis::Z;
    default: throw std::invalid_argument(std::string("invalid basis letter '") + c + "'");
  }
}

Pauli to_pauli(Basis b) {
  switch (b) {
    case Basis::X: return Pauli::X;
    case Basis::Y: return Pauli::Y;
    case Basis::Z: return Pauli::Z;
  }
  throw std::logic_error("unreachable basis");
}

ShadowCollection::ShadowCollection(int num_qubits, std::uint64_t seed, std::vector<Snapshot> snapshots,
                                   std::string protocol_tag)
    : num_qubits_(num_qubits),
      seed_(seed),
      protocol_tag_(std::move(protocol_tag)),
      snapshots_(std::move(snapshots)) {
  if (snapshots_.empty()) throw std::invalid_argument("a shadow collection needs at least one snapshot");
  for (const auto& s : snapshots_) {
    if (s.num_qubits() != num_qubits_ || s.outcomes.size() != s.bases.size()) {
      throw std::invalid_argument("snapshot size differs from collection qubit count");
    }
  }
}

ShadowCollection ShadowCollection::slice(std::size_t first, std::size_t count) const {
  if (first + count > snapshots_.size()) throw std::out_of_range("slice past end of collection");
  std::vector<Snapshot> part(snapshots_.begin() + static_cast<std::ptrdiff_t>(first),
                             snapshots_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return ShadowCollection(num_qubits_, seed_, std::move(part), protocol_tag_);
}

std::vector<double> outcome_distribution(const Statevector& state, std::span<const Basis> bases) {
  check_bases(state, bases);
  if (state.num_qubits() > 12) throw std::invalid_argument("outcome_distribution supports n <= 12");
  std::vector<Complex> v(state.amplitudes().begin(), state.amplitudes().end());
  for (int q = 0; q < state.num_qubits(); ++q) {
    const Rotation u = rotation_for(bases[q]);
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i & bit) continue;
      const Complex a0 = v[i];
      const Complex a1 = v[i | bit];
      v[i] = u.u00 * a0 + u.u01 * a1;
      v[i | bit] = u.u10 * a0 + u.u11 * a1;
    }
  }
  std::vector<double> p(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = std::norm(v[i]);
  return p;
}

std::vector<std::uint8_t> sample_outcomes(const Statevector& state, std::span<const Basis> bases,
                                          Xoshiro256& rng) {
  check_bases(state, bases);
  const int n = state.num_qubits();
  std::vector<std::uint8_t> outcomes(n);
  // The measured qubit is always bit 0 of the working vector: after sampling
  // it we keep only the half consistent with the outcome, which shifts the
  // next qubit into bit 0. Renormalization is implicit in p0 / (p0 + p1).
  std::vector<Complex> v(state.amplitudes().begin(), state.amplitudes().end());
  std::size_t size = v.size();
  for (int q = 0; q < n; ++q) {
    const Rotation u = rotation_for(bases[q]);
    double p0 = 0.0;
    double p1 = 0.0;
    for (std::size_t i = 0; i < size; i += 2) {
      const Complex a0 = v[i];
      const Complex a1 = v[i + 1];
      v[i] = u.u00 * a0 + u.u01 * a1;
      v[i + 1] = u.u10 * a0 + u.u11 * a1;
      p0 += std::norm(v[i]);
      p1 += std::norm(v[i + 1]);
    }
    const double total = p0 + p1;
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw std::runtime_error("zero-norm state encountered while sampling outcomes");
    }
    const std::uint8_t bit = rng.uniform() * total < p0 ? 0 : 1;
    outcomes[q] = bit;
    size /= 2;
    for (std::size_t m = 0; m < size; ++m) v[m] = v[2 * m + bit];
  }
  return outcomes;
}

Snapshot sample_snapshot(const Statevector& state, Xoshiro256& rng) {
  Snapshot s;
  s.bases.resize(state.num_qubits());
  for (auto& b : s.bases) b = static_cast<Basis>(rng.below(3));
  s.outcomes = sample_outcomes(state, s.bases, rng);
  return s;
}

ShadowCollection collect_shadow(const Statevector& state, std::size_t num_snapshots, std::uint64_t seed) {
  if (num_snapshots == 0) throw std::invalid_argument("collect_shadow needs at least one snapshot");
  std::vector<Snapshot> snapshots(num_snapshots);
  // Each snapshot owns its substream, so any schedule gives the same result.
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < num_snapshots; ++i) {
    Xoshiro256 rng = substream(seed, Stream::kSnapshot, i);
    snapshots[i] = sample_snapshot(state, rng);
  }
  return ShadowCollection(state.num_qubits(), seed, std::move(snapshots));
}

nlohmann::json to_json(const ShadowCollection& c) {
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto& s : c.snapshots()) {
    std::string bases;
    std::string outcomes;
    for (Basis b : s.bases) bases.push_back(to_char(b));
    for (auto o : s.outcomes) outcomes.push_back(o ? '1' : '0');
    snaps.push_back({{"bases", bases}, {"outcomes", outcomes}});
  }
  return {{"n", c.num_qubits()},
          {"seed", c.seed()},
          {"protocol_tag", c.protocol_tag()},
          {"snapshots", std::move(snaps)}};
}

ShadowCollection shadow_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  std::vector<Snapshot> snapshots;
  for (const auto& js : j.at("snapshots")) {
    const auto bases = js.at("bases").get<std::string>();
    const auto outcomes = js.at("outcomes").get<std::string>();
    if (bases.size() != outcomes.size()) throw std::invalid_argument("bases/outcomes length mismatch");
    Snapshot s;
    for (char c : bases) s.bases.push_back(basis_from_char(c));
    for (char c : outcomes) {
      if (c != '0' && c != '1') throw std::invalid_argument("outcome bits must be '0' or '1'");
      s.outcomes.push_back(c == '1');
    }
    snapshots.push_back(std::move(s));
  }
  return ShadowCollection(n, j.at("seed").get<std::uint64_t>(), std::move(snapshots),
                          j.at("protocol_tag").get<std::string>());
}

}  // namespace bshadow
