// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bshadow/analytics.hpp"
#include "bshadow/estimator.hpp"
#include "bshadow/experiment.hpp"
#include "bshadow/numeric.hpp"
#include "bshadow/spinring.hpp"
#include "oracles.hpp"

using namespace bshadow;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// Exact moments of the single-shot estimate over all 6^n assignments.
std::pair<double, double> exact_moments(const Statevector& state, const PauliString& p, double eps) {
  const int n = state.num_qubits();
  std::vector<int> all(n);
  for (int q = 0; q < n; ++q) all[q] = q;
  const Eigen::MatrixXcd rho = oracle::dense_partial_trace(state, all);
  double mean = 0.0, second = 0.0;
  oracle::for_each_local_outcome(rho, n, [&](const std::vector<Basis>& bases, const std::vector<int>& bits, double prob) {
    Snapshot s;
    s.bases = bases;
    for (int b : bits) s.outcomes.push_back(static_cast<std::uint8_t>(b));
    const double v = snapshot_pauli_estimate(s, p, eps);
    mean += prob * v;
    second += prob * v * v;
  });
  return {mean, second - mean * mean};
}

std::vector<PauliString> low_weight_paulis() {
  std::vector<PauliString> out;
  for (const char* t : {"XII", "IYI", "IIZ", "XYI", "ZIZ", "IYX", "XYZ", "ZZZ", "YXY", "-XZY"}) {
    out.push_back(PauliString::parse(t));
  }
  return out;
}

Outcome loss_closed_form() {
  Outcome o;
  const double a = average_loss(1.0, 0.0);
  const double b = average_loss(1.0, 80.0 / 81.0);
  o.pass = std::abs(a - 4.0) <= 1e-15 && std::abs(b - 4.0 / 9.0) <= 1e-15;
  Xoshiro256 rng(20240601);
  double worst = 0.0;
  int points = 0;
  while (points < 50) {
    BlochVector r{2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1};
    if (r.norm() > 1.0) continue;
    ++points;
    const Eigen::MatrixXcd rho = DensityMatrix::from_bloch(r).matrix();
    for (int i = 0; i <= 10; ++i) {
      const double eps = i / 10.0;
      const double d = 3.0 * std::sqrt(1.0 - eps);
      double loss = 0.0;
      oracle::for_each_local_outcome(rho, 1, [&](const std::vector<Basis>& bs, const std::vector<int>& bits, double prob) {
        const Eigen::Matrix2cd hat = d * oracle::basis_projector(bs[0], bits[0]) + 0.5 * (1.0 - d) * Eigen::Matrix2cd::Identity();
        const Eigen::Matrix2cd diff = rho - hat;
        loss += prob * (diff * diff).trace().real();
      });
      worst = std::max(worst, std::abs(loss - average_loss(r.norm(), eps)));
    }
  }
  o.pass = o.pass && worst <= 1e-12;
  o.detail = fmt("L(1,0)=%.17g L(1,80/81)=%.17g max|enum-closed|=%.2e", a, b, worst);
  return o;
}

Outcome unbiasedness_gate() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto state = Statevector::haar_random(3, seed + 7);
    for (const auto& p : low_weight_paulis()) {
      const double truth = oracle::dense_expectation(state, p);
      for (double eps : {0.0, 0.05, 0.3, 0.8, 1.0}) {
        const double mean = exact_moments(state, p, eps).first;
        worst = std::max(worst, std::abs(mean - std::pow(1.0 - eps, 0.5 * p.weight()) * truth));
      }
    }
  }
  return {worst <= 1e-12, fmt("max|E[est]-(1-eps)^{w/2}tr(P rho)|=%.2e", worst)};
}

Outcome variance_law() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto state = Statevector::haar_random(3, seed + 70);
    for (const auto& p : low_weight_paulis()) {
      const double truth = oracle::dense_expectation(state, p);
      const double var = exact_moments(state, p, 0.0).second;
      worst = std::max(worst, std::abs(var - (std::pow(3.0, p.weight()) - truth * truth)));
    }
  }
  return {worst <= 1e-12, fmt("max|Var-(3^w-tr(P rho)^2)|=%.2e", worst)};
}

Outcome worst_case_identity() {
  double worst = 0.0, worst_ratio = 0.0;
  for (int w = 1; w <= 6; ++w) {
    for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
      const WorstCaseMse curve(w, n);
      const double unbiased = curve(0.0);
      worst = std::max(worst, rel_err(unbiased * n, std::pow(3.0, w) - 1.0));
      const auto best = minimize_on_interval([&](double e) { return curve(e); }, 0.0, 1.0);
      worst_ratio = std::max(worst_ratio, best.value / unbiased);
    }
  }
  return {worst <= 1e-10 && worst_ratio < 1.0,
          fmt("max rel|N*mse(0)-(3^w-1)|=%.2e, max min_eps relative mse=%.9f", worst, worst_ratio)};
}

Outcome snr_consistency() {
  Xoshiro256 rng(99);
  double gain_err = 0.0, alpha_err = 0.0, crit_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double m = (2 * rng.uniform() - 1) * 2.0;
    const double v = 1e-3 + 50 * rng.uniform();
    const std::size_t n = 1 + rng.below(10000);
    const auto r = snr(m, v, n);
    gain_err = std::max(gain_err, rel_err(r.gain, 1.0 + 1.0 / r.beta));
    crit_err = std::max(crit_err, rel_err(rescaled_mse(m, v, n, r.alpha_critical), r.mse_unbiased));
    // Brute-force nested grid over alpha in [0, 1].
    double lo = 0.0, hi = 1.0, best = 0.0;
    for (int level = 0; level < 4; ++level) {
      const int points = 1001;
      double best_val = INFINITY;
      for (int k = 0; k < points; ++k) {
        const double a = lo + (hi - lo) * k / (points - 1);
        const double val = m * m * a * a + (1 - a) * (1 - a) * v / static_cast<double>(n);
        if (val < best_val) {
          best_val = val;
          best = a;
        }
      }
      const double step = (hi - lo) / (points - 1);
      lo = std::max(0.0, best - step);
      hi = std::min(1.0, best + step);
    }
    alpha_err = std::max(alpha_err, std::abs(best - r.alpha_star));
  }
  return {gain_err <= 1e-12 && alpha_err <= 1e-6 && crit_err <= 1e-12,
          fmt("gain rel err=%.2e, |alpha*-grid|=%.2e, mse(alpha_c) rel err=%.2e", gain_err, alpha_err, crit_err)};
}

Outcome best_case_monotonicity() {
  const std::size_t reps = 100000;
  double worst_z = -INFINITY;
  std::ostringstream where;
  for (int w : {1, 2}) {
    for (std::size_t n : {10u, 100u}) {
      std::vector<MonteCarloEstimate> curve;
      for (int i = 0; i <= 20; ++i) {
        // Independent draws per grid point so the check is not tautological.
        curve.push_back(best_case_mse(w, n, i / 20.0, reps, derive_seed(31337, {static_cast<std::uint64_t>(w), n, static_cast<std::uint64_t>(i)})));
      }
      for (int i = 0; i < 20; ++i) {
        const double se = std::hypot(curve[i].standard_error, curve[i + 1].standard_error);
        const double z = se > 0 ? (curve[i + 1].mse - curve[i].mse) / se : (curve[i + 1].mse > curve[i].mse ? INFINITY : -INFINITY);
        if (z > worst_z) {
          worst_z = z;
          where.str("");
          where << "w=" << w << " N=" << n << " step " << i;
        }
      }
    }
  }
  return {worst_z <= 3.0, fmt("largest increase = %.2f combined SE", worst_z) + " (" + where.str() + ")"};
}

Outcome ground_state_correctness() {
  double worst = 0.0;
  for (int n : {3, 4}) {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
      const auto [spec, h] = build_spin_ring(n, 0.3, seed);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h.dense());
      worst = std::max(worst, std::abs(ground_state(h).energy - eig.eigenvalues()[0]));
    }
  }
  const auto [spec8, h8] = build_spin_ring(8, 0.3, 1);
  const auto gs = ground_state(h8);
  return {worst <= 1e-10 && gs.residual <= 1e-8,
          fmt("n<=4 max|E-E_dense|=%.2e, n=8 residual=%.2e", worst, gs.residual)};
}

// Same ring as the CLI defaults.
SpinRingSpec desk_ring() { return build_spin_ring(8, 0.3, 7).first; }

Outcome desk_experiment() {
  PerturbationConfig cfg;
  cfg.n_s = 10000;
  cfg.weight = 6;
  cfg.n_observables = 20;
  cfg.repetitions = 1000;
  cfg.seed = 1;
  const auto report = perturbation_experiment(desk_ring(), cfg);
  std::size_t exact_wins = 0, plugin_wins = 0;
  for (const auto& row : report.rows) {
    exact_wins += row.mse_alpha_exact < row.mse_unbiased;
    plugin_wins += row.mse_alpha_estimated < row.mse_unbiased;
  }
  const std::size_t rows = report.rows.size();
  const bool pass = rows == cfg.n_observables && exact_wins == rows && plugin_wins * 10 >= rows * 9;
  std::ostringstream d;
  d << rows << " observables; exact-alpha* beats unbiased " << exact_wins << "/" << rows << ", plugin " << plugin_wins
    << "/" << rows;
  return {pass, d.str()};
}

Outcome combined_ordering() {
  const auto spec = desk_ring();
  const auto gs = ground_state(spin_ring_hamiltonian(spec));
  const std::size_t n_s = 10000;
  // First seeded weight-6 perturbation with 0.05 < SNR < 1. Strings that
  // change the total Z magnetization have zero expectation on the ground
  // state, which would make biased and drop-R identical.
  Xoshiro256 rng = substream(1, Stream::kObservable, 1);
  auto beta_of = [&](const PauliString& q) {
    return shadow_snr(6, std::clamp(exact_expectation(gs.state, q), -1.0, 1.0), n_s).beta;
  };
  PauliString p = random_pauli(8, 6, rng);
  while (!(beta_of(p) > 0.05 && beta_of(p) < 1.0)) p = random_pauli(8, 6, rng);
  const auto r = combined_estimator_demo(spec, n_s, p, 1000, 1);
  const bool vs_drop = r.biased.mse <= r.drop.mse + 3 * r.se_biased_minus_drop;
  const bool vs_unbiased = r.biased.mse <= r.unbiased.mse + 3 * r.se_biased_minus_unbiased;
  std::ostringstream d;
  d << "P=" << p.str() << " beta=" << r.beta << " mse drop/unbiased/biased = " << r.drop.mse << "/" << r.unbiased.mse
    << "/" << r.biased.mse;
  return {vs_drop && vs_unbiased, d.str()};
}

Outcome consistency_limit() {
  bool pass = true;
  std::ostringstream d;
  for (int w : {1, 4, 8}) {
    for (double m : {0.01, 0.3, 1.0}) {
      double prev = INFINITY;
      for (std::size_t n : {100u, 10000u, 1000000u}) {
        const double a = shadow_snr(w, m, n).alpha_star;
        pass = pass && a < prev;
        prev = a;
      }
    }
  }
  d << "alpha*(w=8,m=0.3): " << shadow_snr(8, 0.3, 100).alpha_star << " -> " << shadow_snr(8, 0.3, 10000).alpha_star
    << " -> " << shadow_snr(8, 0.3, 1000000).alpha_star;
  return {pass, d.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"average-loss closed form and enumeration oracle", 1, loss_closed_form},
      {"unbiasedness gate (exact distribution, w<=3)", 10, unbiasedness_gate},
      {"single-shot variance law (w<=3)", 10, variance_law},
      {"worst-case moment identity and optimal epsilon", 30, worst_case_identity},
      {"SNR / optimal-alpha consistency", 5, snr_consistency},
      {"best-case MSE monotone in epsilon", 60, best_case_monotonicity},
      {"spin-ring ground state", 30, ground_state_correctness},
      {"desk-scale perturbation experiment", 600, desk_experiment},
      {"combined estimator ordering", 300, combined_ordering},
      {"alpha* -> 0 as N_s grows", 1, consistency_limit},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s  %s  [%.2fs / %.0fs budget%s]  %s\n", pass ? "PASS" : "FAIL", c.name, secs, c.budget_seconds,
                in_time ? "" : ", over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
