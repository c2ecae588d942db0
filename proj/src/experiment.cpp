#include "bshadow/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bshadow/analytics.hpp"
#include "bshadow/estimator.hpp"
#include "bshadow/numeric.hpp"
#include "bshadow/shadow.hpp"

namespace bshadow {

namespace {

StrategyMse summarize(std::span<const double> squared_errors) {
  const std::size_t n = squared_errors.size();
  const double mean = compensated_sum(squared_errors) / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  CompensatedSum dev;
  for (double x : squared_errors) dev.add((x - mean) * (x - mean));
  const double sd = std::sqrt(dev.value() / static_cast<double>(n - 1));
  return {mean, sd / std::sqrt(static_cast<double>(n))};
}

double paired_difference_se(std::span<const double> a, std::span<const double> b) {
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return summarize(diff).standard_error;
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

PauliString random_pauli(int num_qubits, int weight, Xoshiro256& rng) {
  if (weight < 0 || weight > num_qubits) throw std::invalid_argument("weight must lie in [0, n]");
  // Partial Fisher-Yates over the sites, then one non-identity letter each.
  std::vector<int> sites(num_qubits);
  std::iota(sites.begin(), sites.end(), 0);
  for (int i = 0; i < weight; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(num_qubits - i)));
    std::swap(sites[i], sites[j]);
  }
  std::vector<Pauli> letters(num_qubits, Pauli::I);
  for (int i = 0; i < weight; ++i) letters[sites[i]] = static_cast<Pauli>(1 + rng.below(3));
  return PauliString(std::move(letters));
}

ExperimentReport perturbation_experiment(const SpinRingSpec& spec, const PerturbationConfig& config) {
  if (config.weight < 1 || config.weight > spec.n) throw std::invalid_argument("weight must lie in [1, n]");
  if (config.n_observables == 0) throw std::invalid_argument("n_observables must be >= 1");
  if (config.repetitions == 0) throw std::invalid_argument("repetitions must be >= 1");
  if (config.n_s < (config.split_alpha_estimation ? 2u : 1u)) throw std::invalid_argument("n_s too small");

  const Hamiltonian h = spin_ring_hamiltonian(spec);
  const GroundState gs = ground_state(h);

  ExperimentReport report;
  report.spec = spec;
  report.config = config;
  report.ground_energy = gs.energy;

  std::vector<PauliString> observables;
  std::vector<double> truths;
  Xoshiro256 draw_rng = substream(config.seed, Stream::kObservable, 0);
  const std::size_t max_draws = config.max_draws_per_observable * config.n_observables;
  while (observables.size() < config.n_observables && report.observables_drawn < max_draws) {
    ++report.observables_drawn;
    PauliString p = random_pauli(spec.n, config.weight, draw_rng);
    if (std::find(observables.begin(), observables.end(), p) != observables.end()) continue;
    const double truth = exact_expectation(gs.state, p);
    if (shadow_snr(config.weight, std::clamp(truth, -1.0, 1.0), config.n_s).beta < 1.0) {
      observables.push_back(std::move(p));
      truths.push_back(truth);
    }
  }
  report.observable_shortfall = observables.size() < config.n_observables;
  if (observables.empty()) return report;

  const std::size_t n_obs = observables.size();
  const std::size_t reps = config.repetitions;
  std::vector<double> alpha_exact(n_obs);
  for (std::size_t o = 0; o < n_obs; ++o) {
    alpha_exact[o] = shadow_snr(config.weight, std::clamp(truths[o], -1.0, 1.0), config.n_s).alpha_star;
  }

  // errors[(strategy * n_obs + o) * reps + r]; strategies: unbiased, exact, plugin.
  std::vector<double> errors(3 * n_obs * reps);
  auto at = [&](int strategy, std::size_t o, std::size_t r) -> double& {
    return errors[(strategy * n_obs + o) * reps + r];
  };

#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < reps; ++r) {
    const ShadowCollection shadow =
        collect_shadow(gs.state, config.n_s, derive_seed(config.seed, {static_cast<std::uint64_t>(Stream::kRepetition), r}));
    const std::size_t half = config.n_s / 2;
    for (std::size_t o = 0; o < n_obs; ++o) {
      const PauliString& p = observables[o];
      const double unbiased = mean_pauli_estimate(shadow, p, 0.0).value;
      double alpha_hat = 0.0;
      double rescaled_mean = unbiased;
      if (config.split_alpha_estimation) {
        alpha_hat = plugin_alpha_star(shadow.slice(0, half), p);
        rescaled_mean = mean_pauli_estimate(shadow.slice(half, config.n_s - half), p, 0.0).value;
      } else {
        alpha_hat = plugin_alpha_star(shadow, p);
      }
      const double exact_alpha_estimate = (1.0 - alpha_exact[o]) * unbiased;
      const double plugin_estimate = (1.0 - alpha_hat) * rescaled_mean;
      at(0, o, r) = (unbiased - truths[o]) * (unbiased - truths[o]);
      at(1, o, r) = (exact_alpha_estimate - truths[o]) * (exact_alpha_estimate - truths[o]);
      at(2, o, r) = (plugin_estimate - truths[o]) * (plugin_estimate - truths[o]);
    }
  }

  for (std::size_t o = 0; o < n_obs; ++o) {
    ObservableRow row;
    row.observable = observables[o];
    row.true_value = truths[o];
    row.snr_unbiased = shadow_snr(config.weight, std::clamp(truths[o], -1.0, 1.0), config.n_s).beta;
    row.alpha_exact = alpha_exact[o];
    const auto u = summarize({&at(0, o, 0), reps});
    const auto e = summarize({&at(1, o, 0), reps});
    const auto p = summarize({&at(2, o, 0), reps});
    row.mse_unbiased = u.mse;
    row.se_unbiased = u.standard_error;
    row.mse_alpha_exact = e.mse;
    row.se_alpha_exact = e.standard_error;
    row.mse_alpha_estimated = p.mse;
    row.se_alpha_estimated = p.standard_error;
    row.low_statistics = reps < kMinRepetitionsForStatistics;
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ObservableRow& a, const ObservableRow& b) { return a.mse_unbiased > b.mse_unbiased; });
  return report;
}

CombinedReport combined_estimator_demo(const SpinRingSpec& spec, std::size_t n_s,
                                       const PauliString& perturbation, std::size_t repetitions,
                                       std::uint64_t seed, std::optional<double> alpha_override) {
  if (perturbation.num_qubits() != spec.n) throw std::invalid_argument("perturbation qubit count mismatch");
  if (perturbation.weight() < 4) throw std::invalid_argument("perturbation weight must be >= 4");
  if (std::abs(perturbation.coefficient()) != 1.0) {
    throw std::invalid_argument("perturbation coefficient must be +-1");
  }
  if (n_s == 0 || repetitions == 0) throw std::invalid_argument("n_s and repetitions must be >= 1");
  if (alpha_override && !(*alpha_override >= 0.0 && *alpha_override <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }

  const Hamiltonian h = spin_ring_hamiltonian(spec);
  const GroundState gs = ground_state(h);

  CombinedReport report;
  report.perturbation = perturbation;
  report.exact_energy = h.expectation(gs.state);
  report.exact_perturbation = exact_expectation(gs.state, perturbation);
  report.n_s = n_s;
  report.repetitions = repetitions;
  report.seed = seed;
  const double unit_expval = std::clamp(report.exact_perturbation * perturbation.coefficient(), -1.0, 1.0);
  const SnrReport s = shadow_snr(perturbation.weight(), unit_expval, n_s);
  report.beta = s.beta;
  report.alpha_star = alpha_override.value_or(s.alpha_star);
  const double target = report.exact_energy + report.exact_perturbation;

  std::vector<double> drop(repetitions);
  std::vector<double> unbiased(repetitions);
  std::vector<double> biased(repetitions);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < repetitions; ++r) {
    const ShadowCollection shadow =
        collect_shadow(gs.state, n_s, derive_seed(seed, {static_cast<std::uint64_t>(Stream::kRepetition), r}));
    CompensatedSum a;
    for (const auto& t : h.terms()) a.add(t.coefficient * mean_pauli_estimate(shadow, t.pauli, 0.0).value);
    const double r_bar = mean_pauli_estimate(shadow, perturbation, 0.0).value;
    const double a_bar = a.value();
    const double e_drop = a_bar - target;
    const double e_unbiased = a_bar + r_bar - target;
    const double e_biased = a_bar + (1.0 - report.alpha_star) * r_bar - target;
    drop[r] = e_drop * e_drop;
    unbiased[r] = e_unbiased * e_unbiased;
    biased[r] = e_biased * e_biased;
  }
  report.drop = summarize(drop);
  report.unbiased = summarize(unbiased);
  report.biased = summarize(biased);
  report.se_biased_minus_drop = paired_difference_se(biased, drop);
  report.se_biased_minus_unbiased = paired_difference_se(biased, unbiased);
  return report;
}

BlochVector DensitySampleTable::exclusion_center() const {
  const double c = std::sqrt(1.0 - epsilon);
  return {truth.x / (1.0 + c), truth.y / (1.0 + c), truth.z / (1.0 + c)};
}

double DensitySampleTable::exclusion_radius() const { return truth.norm() / (1.0 + std::sqrt(1.0 - epsilon)); }

Statevector purify(const BlochVector& r) {
  const double len = r.norm();
  if (len > 1.0 + 1e-12) throw std::invalid_argument("Bloch vector longer than 1");
  const double radius = std::min(len, 1.0);
  // Eigenvectors of (I + r.sigma)/2 along +-r, with eigenvalues (1 +- |r|)/2.
  const double theta = len > 0.0 ? std::acos(std::clamp(r.z / len, -1.0, 1.0)) : 0.0;
  const double phi = len > 0.0 ? std::atan2(r.y, r.x) : 0.0;
  const Complex e_phi = std::polar(1.0, phi);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const double w_plus = std::sqrt((1.0 + radius) / 2.0);
  const double w_minus = std::sqrt((1.0 - radius) / 2.0);
  // Index = system bit + 2 * ancilla bit.
  std::vector<Complex> amps = {w_plus * c, w_plus * e_phi * s, w_minus * s, -w_minus * e_phi * c};
  return Statevector::normalized(std::move(amps));
}

DensitySampleTable emit_density_samples(const BlochVector& truth, std::size_t n_s, std::size_t n_points,
                                        double epsilon, std::uint64_t seed) {
  if (n_s == 0 || n_points == 0) throw std::invalid_argument("n_s and n_points must be >= 1");
  BiasSpec::checked(epsilon);
  const Statevector state = purify(truth);

  DensitySampleTable table;
  table.truth = truth;
  table.n_s = n_s;
  table.epsilon = epsilon;
  table.seed = seed;
  table.samples.resize(n_points);

  const PauliString px = PauliString::parse("XI");
  const PauliString py = PauliString::parse("YI");
  const PauliString pz = PauliString::parse("ZI");
  const double shrink = BiasSpec{epsilon}.shrink_factor(1);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n_points; ++i) {
    const ShadowCollection shadow =
        collect_shadow(state, n_s, derive_seed(seed, {static_cast<std::uint64_t>(Stream::kDensityPoint), i}));
    DensitySample& s = table.samples[i];
    s.unbiased = {mean_pauli_estimate(shadow, px, 0.0).value, mean_pauli_estimate(shadow, py, 0.0).value,
                  mean_pauli_estimate(shadow, pz, 0.0).value};
    s.biased = {shrink * s.unbiased.x, shrink * s.unbiased.y, shrink * s.unbiased.z};
    auto sq_error = [&](const BlochVector& v) {
      const double dx = v.x - truth.x;
      const double dy = v.y - truth.y;
      const double dz = v.z - truth.z;
      return dx * dx + dy * dy + dz * dz;
    };
    s.loss_change_sign = static_cast<int>(sign_of(sq_error(s.biased) - sq_error(s.unbiased)));
  }
  return table;
}

}  // namespace bshadow
