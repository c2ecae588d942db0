#include "bshadow/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bshadow/analytics.hpp"
#include "bshadow/csv_table.hpp"
#include "bshadow/experiment.hpp"
#include "bshadow/numeric.hpp"
#include "bshadow/spinring.hpp"

namespace bshadow::cli {

namespace {

using nlohmann::json;

constexpr const char* kFormatVersion = "1";

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Output {
  std::string content;
  std::string default_name;
  bool echo_to_stdout = false;  // small JSON results are also printed
};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

json grid_json(const EpsilonGrid& g) { return {{"start", g.start}, {"end", g.end}, {"count", g.count}}; }

json bloch_json(const BlochVector& r) { return json::array({r.x, r.y, r.z}); }

// ---------------------------------------------------------------------------
// Subcommand parameter blocks. Defaults here are the resolved defaults echoed
// into every output header.

struct LossCurveArgs {
  std::vector<double> r_norms{0.25, 0.5, 0.75, 1.0};
  std::string epsilon_grid = "0:1:101";
};

struct WorstCaseArgs {
  std::vector<int> weights{1, 2, 4};
  std::vector<std::size_t> n_s{10, 100, 1000};
  std::string epsilon_grid = "0:0.99:100";
};

struct BestCaseArgs {
  std::vector<int> weights{1};
  std::vector<std::size_t> n_s{10, 100, 1000};
  std::string epsilon_grid = "0:0.99:100";
  std::size_t reps = 100000;
  std::uint64_t seed = 1;
};

struct SnrArgs {
  std::optional<double> mean;
  std::optional<double> variance;
  std::optional<int> weight;
  std::optional<double> expval;
  std::size_t n_s = 1;
};

struct RingArgs {
  int n = 8;
  double coupling = 0.3;
  std::uint64_t omega_seed = 7;
};

struct ExperimentArgs {
  RingArgs ring;
  PerturbationConfig config;
};

struct CombinedArgs {
  RingArgs ring;
  std::size_t n_s = 10000;
  std::string pauli;
  int weight = 6;
  std::size_t reps = 1000;
  std::uint64_t seed = 1;
  std::optional<double> alpha;
};

struct DensityArgs {
  std::vector<double> bloch{0.0, 0.0, 34.0 / 75.0};
  std::size_t n_s = 100;
  std::size_t n_points = 10000;
  double epsilon = 0.1;
  std::uint64_t seed = 1;
};

void add_ring_options(CLI::App* sub, RingArgs& ring) {
  sub->add_option("--n", ring.n, "Number of ring sites")->capture_default_str();
  sub->add_option("--coupling", ring.coupling, "Coupling J")->capture_default_str();
  sub->add_option("--omega-seed", ring.omega_seed, "Seed for the on-site fields")->capture_default_str();
}

json ring_json(const SpinRingSpec& spec, const RingArgs& ring) {
  return {{"n", spec.n}, {"coupling", spec.coupling}, {"omega_seed", ring.omega_seed}, {"omega", spec.omega}};
}

json base_header(const char* subcommand) { return {{"subcommand", subcommand}, {"format_version", kFormatVersion}}; }

// ---------------------------------------------------------------------------

Output run_loss_curve(const LossCurveArgs& a) {
  const EpsilonGrid grid = EpsilonGrid::parse(a.epsilon_grid);
  json header = base_header("loss-curve");
  header["r_norm"] = a.r_norms;
  header["epsilon_grid"] = grid_json(grid);
  json minima = json::array();
  for (double r : a.r_norms) {
    const LossMinimum m = eps_min(r);
    minima.push_back({{"r_norm", r}, {"epsilon_min", m.epsilon}, {"loss_min", m.loss}});
  }
  header["minima"] = minima;
  CsvTable table(header, {"epsilon", "r_norm", "loss", "relative_loss"});
  for (double r : a.r_norms) {
    const double unbiased = average_loss(r, 0.0);
    for (double e : grid.values()) {
      const double loss = average_loss(r, e);
      table.add_row({e, r, loss, loss / unbiased});
    }
  }
  return {table.str(), "loss_curve.csv"};
}

Output run_worst_case(const WorstCaseArgs& a) {
  const EpsilonGrid grid = EpsilonGrid::parse(a.epsilon_grid);
  json header = base_header("worst-case");
  header["w"] = a.weights;
  header["n_s"] = a.n_s;
  header["epsilon_grid"] = grid_json(grid);
  header["exact_sum_limit"] = kWorstCaseExactLimit;
  json minima = json::array();
  std::vector<std::vector<CsvTable::Cell>> rows;
  for (int w : a.weights) {
    for (std::size_t n : a.n_s) {
      std::function<double(double)> mse;
      const bool exact = n <= kWorstCaseExactLimit;
      if (exact) {
        auto curve = std::make_shared<WorstCaseMse>(w, n);
        mse = [curve](double e) { return (*curve)(e); };
      } else {
        mse = [w, n](double e) { return worst_case_mse_closed_form(w, n, e); };
      }
      const double unbiased = mse(0.0);
      for (double e : grid.values()) {
        const double v = mse(e);
        rows.push_back({e, static_cast<std::int64_t>(w), static_cast<std::int64_t>(n), v, v / unbiased});
      }
      const Minimum best = minimize_on_interval(mse, 0.0, 1.0);
      minima.push_back({{"w", w},
                        {"n_s", n},
                        {"method", exact ? "binomial-sum" : "closed-form"},
                        {"epsilon", best.argmin},
                        {"relative_mse", best.value / unbiased}});
    }
  }
  header["minima"] = minima;
  CsvTable table(header, {"epsilon", "w", "n_s", "mse", "relative_mse"});
  for (auto& r : rows) table.add_row(std::move(r));
  return {table.str(), "worst_case.csv"};
}

Output run_best_case(const BestCaseArgs& a) {
  const EpsilonGrid grid = EpsilonGrid::parse(a.epsilon_grid);
  json header = base_header("best-case");
  header["w"] = a.weights;
  header["n_s"] = a.n_s;
  header["epsilon_grid"] = grid_json(grid);
  header["reps"] = a.reps;
  header["seed"] = a.seed;
  CsvTable table(header, {"epsilon", "w", "n_s", "mse", "relative_mse", "standard_error"});
  // Leading epsilon = 0 entry is the unbiased reference for relative_mse.
  std::vector<double> eps{0.0};
  const std::vector<double> grid_values = grid.values();
  eps.insert(eps.end(), grid_values.begin(), grid_values.end());
  for (int w : a.weights) {
    for (std::size_t n : a.n_s) {
      const std::uint64_t seed = derive_seed(a.seed, {static_cast<std::uint64_t>(w), n});
      const auto curve = best_case_mse_curve(w, n, eps, a.reps, seed);
      const double unbiased = curve[0].mse;
      for (std::size_t i = 1; i < eps.size(); ++i) {
        table.add_row({eps[i], static_cast<std::int64_t>(w), static_cast<std::int64_t>(n), curve[i].mse,
                       curve[i].mse / unbiased, curve[i].standard_error});
      }
    }
  }
  return {table.str(), "best_case.csv"};
}

Output run_snr(const SnrArgs& a) {
  json config = base_header("snr");
  config["n_s"] = a.n_s;
  SnrReport report;
  if (a.mean && a.variance && !a.weight && !a.expval) {
    config["mean"] = *a.mean;
    config["variance"] = *a.variance;
    report = snr(*a.mean, *a.variance, a.n_s);
  } else if (a.weight && a.expval && !a.mean && !a.variance) {
    config["w"] = *a.weight;
    config["expval"] = *a.expval;
    report = shadow_snr(*a.weight, *a.expval, a.n_s);
  } else {
    throw std::invalid_argument("snr needs either --mean and --variance, or --w and --expval");
  }
  json out = to_json(report);
  out["config"] = config;
  return {out.dump() + "\n", "snr.json", true};
}

Output run_experiment(const ExperimentArgs& a) {
  auto [spec, hamiltonian] = build_spin_ring(a.ring.n, a.ring.coupling, a.ring.omega_seed);
  const ExperimentReport report = perturbation_experiment(spec, a.config);
  json header = base_header("experiment");
  header["ring"] = ring_json(spec, a.ring);
  header["n_s"] = a.config.n_s;
  header["w"] = a.config.weight;
  header["n_obs"] = a.config.n_observables;
  header["reps"] = a.config.repetitions;
  header["seed"] = a.config.seed;
  header["split"] = a.config.split_alpha_estimation;
  header["ground_energy"] = report.ground_energy;
  header["observables_drawn"] = report.observables_drawn;
  header["observables_found"] = report.rows.size();
  header["observable_shortfall"] = report.observable_shortfall;
  CsvTable table(header, {"rank", "observable", "true_value", "snr_unbiased", "alpha_exact", "mse_unbiased",
                          "mse_alpha_exact", "mse_alpha_estimated", "se_unbiased", "se_alpha_exact",
                          "se_alpha_estimated", "low_statistics"});
  std::int64_t rank = 0;
  for (const auto& r : report.rows) {
    table.add_row({rank++, r.observable.str(), r.true_value, r.snr_unbiased, r.alpha_exact, r.mse_unbiased,
                   r.mse_alpha_exact, r.mse_alpha_estimated, r.se_unbiased, r.se_alpha_exact,
                   r.se_alpha_estimated, static_cast<std::int64_t>(r.low_statistics)});
  }
  std::ostringstream name;
  name << "experiment_n" << spec.n << "_w" << a.config.weight << "_ns" << a.config.n_s << "_seed" << a.config.seed
       << ".csv";
  return {table.str(), name.str()};
}

Output run_combined(const CombinedArgs& a) {
  auto [spec, hamiltonian] = build_spin_ring(a.ring.n, a.ring.coupling, a.ring.omega_seed);
  std::optional<PauliString> perturbation;
  if (!a.pauli.empty()) {
    perturbation = PauliString::parse(a.pauli);
  } else {
    // First random weight-w Pauli with 0 < SNR < 1. Strings that change the
    // total Z magnetization have zero ground-state expectation, for which
    // the biased and drop strategies coincide, so those are skipped.
    const GroundState gs = ground_state(hamiltonian);
    Xoshiro256 rng = substream(a.seed, Stream::kObservable, 0);
    for (int draw = 0; draw < 10000 && !perturbation; ++draw) {
      PauliString p = random_pauli(spec.n, a.weight, rng);
      const double v = std::clamp(exact_expectation(gs.state, p), -1.0, 1.0);
      if (std::abs(v) > 1e-9 && shadow_snr(a.weight, v, a.n_s).beta < 1.0) perturbation = std::move(p);
    }
    if (!perturbation) throw std::invalid_argument("no weight-w observable with SNR < 1 found");
  }
  const CombinedReport r = combined_estimator_demo(spec, a.n_s, *perturbation, a.reps, a.seed, a.alpha);
  json header = base_header("combined");
  header["ring"] = ring_json(spec, a.ring);
  header["n_s"] = a.n_s;
  header["pauli"] = perturbation->str();
  header["reps"] = a.reps;
  header["seed"] = a.seed;
  header["alpha_override"] = a.alpha ? json(*a.alpha) : json(nullptr);
  header["exact_energy"] = r.exact_energy;
  header["exact_perturbation"] = r.exact_perturbation;
  header["alpha_star"] = r.alpha_star;
  header["beta"] = r.beta;
  header["se_biased_minus_drop"] = r.se_biased_minus_drop;
  header["se_biased_minus_unbiased"] = r.se_biased_minus_unbiased;
  CsvTable table(header, {"strategy", "mse", "standard_error"});
  table.add_row({std::string("drop"), r.drop.mse, r.drop.standard_error});
  table.add_row({std::string("unbiased"), r.unbiased.mse, r.unbiased.standard_error});
  table.add_row({std::string("biased"), r.biased.mse, r.biased.standard_error});
  std::ostringstream name;
  name << "combined_n" << spec.n << "_w" << perturbation->weight() << "_ns" << a.n_s << "_seed" << a.seed << ".csv";
  return {table.str(), name.str()};
}

Output run_density(const DensityArgs& a) {
  if (a.bloch.size() != 3) throw std::invalid_argument("--bloch takes three components");
  const BlochVector truth{a.bloch[0], a.bloch[1], a.bloch[2]};
  const DensitySampleTable t = emit_density_samples(truth, a.n_s, a.n_points, a.epsilon, a.seed);
  json header = base_header("density-samples");
  header["bloch"] = bloch_json(truth);
  header["n_s"] = a.n_s;
  header["n_points"] = a.n_points;
  header["epsilon"] = a.epsilon;
  header["seed"] = a.seed;
  header["exclusion_center"] = bloch_json(t.exclusion_center());
  header["exclusion_radius"] = t.exclusion_radius();
  CsvTable table(header, {"x_unbiased", "y_unbiased", "z_unbiased", "x_biased", "y_biased", "z_biased",
                          "loss_change_sign"});
  for (const auto& s : t.samples) {
    table.add_row({s.unbiased.x, s.unbiased.y, s.unbiased.z, s.biased.x, s.biased.y, s.biased.z,
                   static_cast<std::int64_t>(s.loss_change_sign)});
  }
  std::ostringstream name;
  name << "density_samples_ns" << a.n_s << "_seed" << a.seed << ".csv";
  return {table.str(), name.str()};
}

// ---------------------------------------------------------------------------

// Appends "--key value" pairs from a flat JSON object for every key not
// already given on the command line.
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw CLI::ArgumentMismatch("--config needs a file path");
  const std::string path = *(it + 1);
  args.erase(it, it + 2);

  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string text;
    auto scalar = [](const json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_float()) return format_double(v.get<double>());
      return v.dump();
    };
    if (value.is_array()) {
      std::vector<std::string> parts;
      for (const auto& v : value) parts.push_back(scalar(v));
      text = join(parts, ",");
    } else {
      text = scalar(value);
    }
    args.push_back(flag);
    args.push_back(text);
  }
  return args;
}

std::filesystem::path resolve_output(const std::string& explicit_path, const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  const char* dir = std::getenv(kOutputDirEnv);
  return std::filesystem::path(dir && *dir ? dir : ".") / default_name;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

void report_error(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

}  // namespace

EpsilonGrid EpsilonGrid::parse(std::string_view text) {
  const std::string s(text);
  const auto first = s.find(':');
  const auto second = first == std::string::npos ? std::string::npos : s.find(':', first + 1);
  if (second == std::string::npos) throw std::invalid_argument("epsilon grid must look like start:end:count");
  EpsilonGrid g;
  try {
    std::size_t used = 0;
    g.start = std::stod(s.substr(0, first), &used);
    if (used != first) throw std::invalid_argument("start");
    const std::string end_text = s.substr(first + 1, second - first - 1);
    g.end = std::stod(end_text, &used);
    if (used != end_text.size()) throw std::invalid_argument("end");
    const std::string count_text = s.substr(second + 1);
    const long long count = std::stoll(count_text, &used);
    if (used != count_text.size() || count < 1) throw std::invalid_argument("count");
    g.count = static_cast<std::size_t>(count);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse epsilon grid '" + s + "'");
  }
  if (!(0.0 <= g.start && g.start <= g.end && g.end <= 1.0)) {
    throw std::invalid_argument("epsilon grid must satisfy 0 <= start <= end <= 1");
  }
  if (g.count == 1 && g.start != g.end) throw std::invalid_argument("a one-point grid needs start == end");
  return g;
}

std::vector<double> EpsilonGrid::values() const {
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = count == 1 ? start : start + (end - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  if (count > 1) v.back() = end;
  return v;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Biased classical-shadow estimators: analytics and spin-ring experiments", "bshadow"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string output_path;
  app.add_option("-o,--output", output_path, "Output file (default: $" + std::string(kOutputDirEnv) + "/<name>)");
  app.add_option("--config", "JSON file whose keys mirror the flags; command-line flags win");

  LossCurveArgs loss;
  auto* loss_cmd = app.add_subcommand("loss-curve", "Average single-shot loss versus epsilon");
  loss_cmd->add_option("--r-norm", loss.r_norms, "Bloch radii")->delimiter(',')->capture_default_str();
  loss_cmd->add_option("--epsilon-grid", loss.epsilon_grid, "start:end:count")->capture_default_str();

  WorstCaseArgs worst;
  auto* worst_cmd = app.add_subcommand("worst-case", "Exact worst-case MSE curves");
  worst_cmd->add_option("--w", worst.weights, "Pauli weights")->delimiter(',')->capture_default_str();
  worst_cmd->add_option("--n-s", worst.n_s, "Shot counts")->delimiter(',')->capture_default_str();
  worst_cmd->add_option("--epsilon-grid", worst.epsilon_grid, "start:end:count")->capture_default_str();

  BestCaseArgs best;
  auto* best_cmd = app.add_subcommand("best-case", "Monte Carlo best-case MSE curves");
  best_cmd->add_option("--w", best.weights, "Pauli weights")->delimiter(',')->capture_default_str();
  best_cmd->add_option("--n-s", best.n_s, "Shot counts")->delimiter(',')->capture_default_str();
  best_cmd->add_option("--epsilon-grid", best.epsilon_grid, "start:end:count")->capture_default_str();
  best_cmd->add_option("--reps", best.reps, "Monte Carlo repetitions")->capture_default_str();
  best_cmd->add_option("--seed", best.seed)->capture_default_str();

  SnrArgs snr_args;
  auto* snr_cmd = app.add_subcommand("snr", "SNR and optimal rescale of a mean estimator (JSON)");
  snr_cmd->add_option("--mean", snr_args.mean, "Single-shot mean");
  snr_cmd->add_option("--variance", snr_args.variance, "Single-shot variance");
  snr_cmd->add_option("--w", snr_args.weight, "Pauli weight (shadow variance 3^w - expval^2)");
  snr_cmd->add_option("--expval", snr_args.expval, "Exact expectation value");
  snr_cmd->add_option("--n-s", snr_args.n_s, "Shot count")->required();

  ExperimentArgs experiment_args;
  auto* exp_cmd = app.add_subcommand("experiment", "Spin-ring perturbation experiment");
  add_ring_options(exp_cmd, experiment_args.ring);
  exp_cmd->add_option("--n-s", experiment_args.config.n_s)->capture_default_str();
  exp_cmd->add_option("--w", experiment_args.config.weight, "Observable weight")->capture_default_str();
  exp_cmd->add_option("--n-obs", experiment_args.config.n_observables)->capture_default_str();
  exp_cmd->add_option("--reps", experiment_args.config.repetitions)->capture_default_str();
  exp_cmd->add_option("--seed", experiment_args.config.seed)->capture_default_str();
  exp_cmd->add_flag("--split", experiment_args.config.split_alpha_estimation,
                    "Estimate alpha and the mean from disjoint halves of each collection");

  CombinedArgs comb;
  auto* comb_cmd = app.add_subcommand("combined", "Energy plus high-weight perturbation estimators");
  add_ring_options(comb_cmd, comb.ring);
  comb_cmd->add_option("--n-s", comb.n_s)->capture_default_str();
  comb_cmd->add_option("--pauli", comb.pauli, "Perturbation, e.g. XXYYZZII (default: random with SNR < 1)");
  comb_cmd->add_option("--w", comb.weight, "Weight of the random perturbation")->capture_default_str();
  comb_cmd->add_option("--reps", comb.reps)->capture_default_str();
  comb_cmd->add_option("--seed", comb.seed)->capture_default_str();
  comb_cmd->add_option("--alpha", comb.alpha, "Override the optimal rescale alpha*");

  DensityArgs dens;
  auto* dens_cmd = app.add_subcommand("density-samples", "Single-qubit Bloch estimates, unbiased and biased");
  dens_cmd->add_option("--bloch", dens.bloch, "True Bloch vector x,y,z")->delimiter(',')->capture_default_str();
  dens_cmd->add_option("--n-s", dens.n_s)->capture_default_str();
  dens_cmd->add_option("--n-points", dens.n_points)->capture_default_str();
  dens_cmd->add_option("--epsilon", dens.epsilon)->capture_default_str();
  dens_cmd->add_option("--seed", dens.seed)->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config_file(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));

    Output result;
    if (loss_cmd->parsed()) {
      result = run_loss_curve(loss);
    } else if (worst_cmd->parsed()) {
      result = run_worst_case(worst);
    } else if (best_cmd->parsed()) {
      result = run_best_case(best);
    } else if (snr_cmd->parsed()) {
      result = run_snr(snr_args);
    } else if (exp_cmd->parsed()) {
      result = run_experiment(experiment_args);
    } else if (comb_cmd->parsed()) {
      result = run_combined(comb);
    } else {
      result = run_density(dens);
    }

    if (result.echo_to_stdout) out << result.content;
    if (!result.echo_to_stdout || !output_path.empty()) {
      const auto path = resolve_output(output_path, result.default_name);
      write_atomically(path, result.content);
      if (!result.echo_to_stdout) out << path.string() << '\n';
    }
    return kOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what(), kInvalidArgument);
    return kInvalidArgument;
  } catch (const IoError& e) {
    report_error(err, "io", e.what(), kIoError);
    return kIoError;
  } catch (const std::invalid_argument& e) {
    report_error(err, "invalid_argument", e.what(), kInvalidArgument);
    return kInvalidArgument;
  } catch (const std::out_of_range& e) {
    report_error(err, "invalid_argument", e.what(), kInvalidArgument);
    return kInvalidArgument;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what(), kFailure);
    return kFailure;
  }
}

}  // namespace bshadow::cli
