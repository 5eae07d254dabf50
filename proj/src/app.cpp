#include "mmlin/app.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <set>

#include "mmlin/bounds.hpp"
#include "mmlin/error.hpp"
#include "mmlin/io.hpp"

namespace mmlin::app {

namespace {

using ordered_json = nlohmann::ordered_json;

void reject_unknown(const nlohmann::json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw InvalidInput(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw InvalidInput("unknown configuration key '" + where + "." + it.key() + "'");
    }
  }
}

template <typename T>
void read(const nlohmann::json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("configuration key '") + key + "': " + e.what());
  }
}

ordered_json params_json(const ScenarioConfig& c) {
  return {{"k1", c.k1}, {"k_minus1", c.k_minus1}, {"k2", c.k2},
          {"e0", c.e0}, {"s0", c.s0},             {"c0", c.c0}};
}

ordered_json state_json(State x) { return ordered_json::array({x.s, x.c}); }

ordered_json matrix_json(const Matrix3& m) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : m) rows.push_back(ordered_json::array({row[0], row[1], row[2]}));
  return rows;
}

ordered_json header(const char* command, const ScenarioConfig& c) {
  return {{"schema_version", kReportSchemaVersion},
          {"command", command},
          {"params", params_json(c)}};
}

std::vector<Observation> load_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open observation file '" + path + "'");
  return io::read_observations_csv(in);
}

// Emits into out_dir/<name> when an output directory is configured.
template <typename Writer>
void emit(const ScenarioConfig& config, const std::string& name, std::ostream& out,
          Writer&& write) {
  if (config.out_dir.empty()) {
    write(out);
    return;
  }
  std::filesystem::create_directories(config.out_dir);
  const auto path = std::filesystem::path(config.out_dir) / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InvalidInput("cannot write '" + path.string() + "'");
  write(file);
}

}  // namespace

RateParams ScenarioConfig::params() const { return {k1, k_minus1, k2, e0, s0, c0}; }

ScenarioConfig parse_config(const nlohmann::json& doc, ScenarioConfig c) {
  reject_unknown(doc, "config",
                 {"schema_version", "params", "integrator", "simulate", "order", "timescales",
                  "fit", "seed", "out"});
  int version = kConfigSchemaVersion;
  read(doc, "schema_version", version);
  if (version != kConfigSchemaVersion) {
    throw InvalidInput("unsupported config schema_version " + std::to_string(version));
  }
  if (doc.contains("params")) {
    const auto& p = doc["params"];
    reject_unknown(p, "params", {"k1", "k_minus1", "k2", "e0", "s0", "c0"});
    read(p, "k1", c.k1);
    read(p, "k_minus1", c.k_minus1);
    read(p, "k2", c.k2);
    read(p, "e0", c.e0);
    read(p, "s0", c.s0);
    read(p, "c0", c.c0);
  }
  if (doc.contains("integrator")) {
    const auto& g = doc["integrator"];
    reject_unknown(g, "integrator", {"rel_tol", "abs_tol", "max_steps"});
    read(g, "rel_tol", c.integrator.rel_tol);
    read(g, "abs_tol", c.integrator.abs_tol);
    read(g, "max_steps", c.integrator.max_steps);
  }
  if (doc.contains("simulate")) {
    const auto& s = doc["simulate"];
    reject_unknown(s, "simulate", {"n_grid", "observations", "n_obs", "obs_noise"});
    read(s, "n_grid", c.n_grid);
    read(s, "observations", c.observations_path);
    read(s, "n_obs", c.n_obs);
    read(s, "obs_noise", c.obs_noise);
  }
  if (doc.contains("order")) {
    const auto& o = doc["order"];
    reject_unknown(o, "order", {"s0_max", "n_points"});
    if (o.contains("s0_max")) {
      double v = 0.0;
      read(o, "s0_max", v);
      c.s0_max = v;
    }
    read(o, "n_points", c.n_points);
  }
  if (doc.contains("timescales")) {
    const auto& t = doc["timescales"];
    reject_unknown(t, "timescales", {"eta_sep", "eta_marginal"});
    read(t, "eta_sep", c.thresholds.eta_sep);
    read(t, "eta_marginal", c.thresholds.eta_marginal);
  }
  if (doc.contains("fit")) {
    const auto& f = doc["fit"];
    reject_unknown(f, "fit", {"data", "guess", "trials", "noise"});
    read(f, "data", c.data_path);
    read(f, "trials", c.trials);
    read(f, "noise", c.noise);
    if (f.contains("guess")) {
      const auto& g = f["guess"];
      reject_unknown(g, "fit.guess", {"k1", "k_minus1", "k2"});
      Rates r{c.k1, c.k_minus1, c.k2};
      read(g, "k1", r.k1);
      read(g, "k_minus1", r.k_minus1);
      read(g, "k2", r.k2);
      c.guess = r;
    }
  }
  read(doc, "seed", c.seed);
  read(doc, "out", c.out_dir);
  return c;
}

ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, base);
}

void write_simulate_csv(std::ostream& out, const ScenarioConfig& config) {
  const SandwichReport r = sandwich_check(config.params(), config.n_grid, config.integrator);
  out << kSimulateHeader << '\n';
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const double scaled = i + 1 == r.grid.size() ? 1.0 : r.grid[i] / r.T;
    const double row[] = {r.grid[i], scaled,      r.s_num[i], r.c_num[i], r.s_star[i],
                          r.c_star[i], r.s_low[i], r.c_low[i], r.s_up[i],  r.c_up[i]};
    for (std::size_t j = 0; j < std::size(row); ++j) {
      if (j > 0) out << ',';
      out << io::format_shortest(row[j]);
    }
    out << '\n';
  }
}

ordered_json bounds_report(const ScenarioConfig& config) {
  const SandwichReport r = sandwich_check(config.params(), config.n_grid, config.integrator);
  ordered_json doc = header("bounds", config);
  doc["T"] = r.T;
  doc["n_grid"] = r.grid.size();
  doc["slack"] = r.slack;
  doc["max_violation"] = r.max_violation;
  doc["passed"] = r.passed;
  return doc;
}

ordered_json order_report(const ScenarioConfig& config) {
  const RateParams p = config.params();
  const double s0_max = config.s0_max.value_or(0.25 * derive_constants(p).K);
  const OrderReport r = convergence_order(p, s0_max, config.n_points, config.integrator);
  ordered_json doc = header("order", config);
  doc["s0_max"] = s0_max;
  doc["n_points"] = config.n_points;
  doc["s0_values"] = r.s0_values;
  doc["sup_errors_s"] = r.sup_errors_s;
  doc["sup_errors_c"] = r.sup_errors_c;
  doc["slope_s"] = r.slope_s;
  doc["slope_c"] = r.slope_c;
  doc["constant_s"] = r.constant_s;
  doc["constant_c"] = r.constant_c;
  doc["failed_points"] = r.failed_points;
  return doc;
}

ordered_json timescales_report(const ScenarioConfig& config) {
  const TimescaleReport r = analyze(config.params(), config.thresholds);
  ordered_json doc = header("timescales", config);
  doc["thresholds"] = {{"eta_sep", r.thresholds.eta_sep},
                       {"eta_marginal", r.thresholds.eta_marginal}};
  doc["eta"] = r.eta;
  doc["verdict"] = std::string(to_string(r.verdict));
  doc["lambda1"] = r.lambda1;
  doc["lambda2"] = r.lambda2;
  doc["lambda1_approx"] = r.lambda1_approx;
  doc["lambda1_rel_error"] = std::abs(r.lambda1_approx - r.lambda1) / std::abs(r.lambda1);
  doc["v1_exact"] = state_json(r.v1_exact);
  doc["v1_approx"] = state_json(r.v1_approx);
  doc["v1_angle"] = r.v1_angle;
  return doc;
}

ordered_json fit_report(const ScenarioConfig& config, bool& converged) {
  const Rates guess = config.guess.value_or(Rates{config.k1, config.k_minus1, config.k2});
  ordered_json doc = header("fit", config);
  doc["guess"] = {{"k1", guess.k1}, {"k_minus1", guess.k_minus1}, {"k2", guess.k2}};
  converged = true;

  if (!config.data_path.empty()) {
    const std::vector<Observation> data = load_observations(config.data_path);
    const FitResult r = fit_rates(data, config.e0, config.s0, guess);
    converged = r.converged;
    doc["n_observations"] = data.size();
    doc["estimates"] = {{"k1", r.k1}, {"k_minus1", r.k_minus1}, {"k2", r.k2}};
    doc["residual_norm"] = r.residual_norm;
    doc["iterations"] = r.iterations;
    doc["converged"] = r.converged;
    doc["rank_deficient"] = r.rank_deficient;
    doc["identifiability_flag"] = r.identifiability_flag;
    doc["covariance_proxy"] = matrix_json(r.covariance_proxy);
    doc["warnings"] = r.warnings;
  }
  if (config.trials > 0) {
    const RateParams truth = config.params().with_c0(0.0);
    const std::vector<double> times = uniform_grid(horizon(truth), config.n_obs);
    const MonteCarloSummary mc =
        fit_monte_carlo(truth, times, config.noise, config.trials, config.seed, guess);
    doc["monte_carlo"] = {{"trials", mc.trials},
                          {"seed", config.seed},
                          {"noise", config.noise},
                          {"n_obs", config.n_obs},
                          {"converged", mc.converged},
                          {"flagged", mc.flagged},
                          {"median_rel_error_k1", mc.median_rel_error_k1},
                          {"median_rel_error_k_minus1", mc.median_rel_error_k_minus1},
                          {"median_rel_error_k2", mc.median_rel_error_k2}};
  }
  if (config.data_path.empty() && config.trials == 0) {
    throw InvalidInput("fit needs an observation file (--data) or Monte-Carlo trials (--trials)");
  }
  return doc;
}

int run_command(const std::string& command, const ScenarioConfig& config, std::ostream& out,
                std::ostream& err) {
  try {
    config.integrator.validate();
    if (command == "simulate") {
      const RateParams p = config.params();
      emit(config, "simulate.csv", out,
           [&](std::ostream& os) { write_simulate_csv(os, config); });
      if (!config.observations_path.empty()) {
        const RateParams truth = p.with_c0(0.0);
        std::vector<Observation> obs =
            synthesize(truth, uniform_grid(horizon(truth), config.n_obs), true);
        if (config.obs_noise > 0.0) {
          std::mt19937_64 rng(config.seed);
          std::normal_distribution<double> noise(0.0, config.obs_noise * p.s0());
          for (Observation& o : obs) o.s_obs += noise(rng);
          for (Observation& o : obs) *o.c_obs += noise(rng);
        }
        std::ofstream file(config.observations_path, std::ios::binary);
        if (!file) throw InvalidInput("cannot write '" + config.observations_path + "'");
        io::write_observations_csv(file, obs);
      }
      return kExitOk;
    }
    if (command == "bounds") {
      const ordered_json doc = bounds_report(config);
      emit(config, "bounds.json", out, [&](std::ostream& os) { io::write_json(os, doc); });
      return doc["passed"].get<bool>() ? kExitOk : kExitNumericalFailure;
    }
    if (command == "order") {
      const ordered_json doc = order_report(config);
      emit(config, "order.json", out, [&](std::ostream& os) { io::write_json(os, doc); });
      return kExitOk;
    }
    if (command == "timescales") {
      const ordered_json doc = timescales_report(config);
      emit(config, "timescales.json", out, [&](std::ostream& os) { io::write_json(os, doc); });
      return kExitOk;
    }
    if (command == "fit") {
      bool converged = false;
      const ordered_json doc = fit_report(config, converged);
      emit(config, "fit.json", out, [&](std::ostream& os) { io::write_json(os, doc); });
      return converged ? kExitOk : kExitNotConverged;
    }
    err << "unknown command '" << command
        << "' (expected simulate, bounds, order, timescales or fit)\n";
    return kExitInvalidInput;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
}

}  // namespace mmlin::app
