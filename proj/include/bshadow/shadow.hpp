#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bshadow/pauli.hpp"
#include "bshadow/rng.hpp"

namespace bshadow {

enum class Basis : std::uint8_t { X = 0, Y = 1, Z = 2 };

char to_char(Basis b);
Basis basis_from_char(char c);
Pauli to_pauli(Basis b);

/// One shadow sample. outcome 0 is the +1 eigenvalue of the basis Pauli.
struct Snapshot {
  std::vector<Basis> bases;
  std::vector<std::uint8_t> outcomes;

  int num_qubits() const { return static_cast<int>(bases.size()); }
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

inline constexpr const char* kLocalPauliProtocol = "local-pauli-uniform";

class ShadowCollection {
 public:
  ShadowCollection(int num_qubits, std::uint64_t seed, std::vector<Snapshot> snapshots,
                   std::string protocol_tag = kLocalPauliProtocol);

  int num_qubits() const { return num_qubits_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& protocol_tag() const { return protocol_tag_; }
  std::span<const Snapshot> snapshots() const { return snapshots_; }
  std::size_t size() const { return snapshots_.size(); }
  const Snapshot& operator[](std::size_t i) const { return snapshots_[i]; }

  /// Snapshots [first, first + count) as a new collection with the same metadata.
  ShadowCollection slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const ShadowCollection&, const ShadowCollection&) = default;

 private:
  int num_qubits_;
  std::uint64_t seed_;
  std::string protocol_tag_;
  std::vector<Snapshot> snapshots_;
};

/// Born probabilities of all 2^n outcomes when qubit j is measured in
/// bases[j]. Outcome index bit j is the bit of qubit j.
std::vector<double> outcome_distribution(const Statevector& state, std::span<const Basis> bases);

/// Measures each qubit in its given basis, qubit 0 first, sampling each bit
/// from the conditional marginal of the collapsed state.
std::vector<std::uint8_t> sample_outcomes(const Statevector& state, std::span<const Basis> bases,
                                          Xoshiro256& rng);

/// Uniform random local Pauli bases followed by sample_outcomes.
Snapshot sample_snapshot(const Statevector& state, Xoshiro256& rng);

/// Snapshot i is drawn from substream (seed, i), so the collection depends
/// only on (state, num_snapshots, seed).
ShadowCollection collect_shadow(const Statevector& state, std::size_t num_snapshots,
                                std::uint64_t seed);

nlohmann::json to_json(const ShadowCollection& c);
ShadowCollection shadow_from_json(const nlohmann::json& j);

}  // namespace bshadow
