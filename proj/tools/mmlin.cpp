// mmlin: batch front end for the low-substrate Michaelis-Menten analyses.
//
//   mmlin simulate   --s0 0.5 --out results/
//   mmlin bounds     --config scenario.json
//   mmlin order      --n-points 6
//   mmlin timescales --e0 2e-3
//   mmlin fit        --data observations.csv --e0 1 --s0 0.1
//
// Flags override values from --config. Exit codes: 0 ok, 2 invalid
// config or input, 3 numerical failure, 4 fit did not converge.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mmlin/app.hpp"
#include "mmlin/error.hpp"

namespace {

struct Overrides {
  std::optional<double> k1, k_minus1, k2, e0, s0, c0;
  std::optional<double> rel_tol, abs_tol;
  std::optional<std::size_t> max_steps;
  std::optional<std::size_t> n_grid, n_points, n_obs, trials;
  std::optional<double> s0_max, eta_sep, eta_marginal, noise, obs_noise;
  std::optional<double> guess_k1, guess_k_minus1, guess_k2;
  std::optional<std::string> data, observations, out;
  std::optional<std::uint64_t> seed;
};

template <typename T>
void apply(const std::optional<T>& v, T& dst) {
  if (v) dst = *v;
}

mmlin::app::ScenarioConfig merge(mmlin::app::ScenarioConfig c, const Overrides& o) {
  apply(o.k1, c.k1);
  apply(o.k_minus1, c.k_minus1);
  apply(o.k2, c.k2);
  apply(o.e0, c.e0);
  apply(o.s0, c.s0);
  apply(o.c0, c.c0);
  apply(o.rel_tol, c.integrator.rel_tol);
  apply(o.abs_tol, c.integrator.abs_tol);
  apply(o.max_steps, c.integrator.max_steps);
  apply(o.n_grid, c.n_grid);
  apply(o.n_points, c.n_points);
  apply(o.n_obs, c.n_obs);
  apply(o.trials, c.trials);
  if (o.s0_max) c.s0_max = *o.s0_max;
  apply(o.eta_sep, c.thresholds.eta_sep);
  apply(o.eta_marginal, c.thresholds.eta_marginal);
  apply(o.noise, c.noise);
  apply(o.obs_noise, c.obs_noise);
  if (o.guess_k1 || o.guess_k_minus1 || o.guess_k2) {
    mmlin::Rates g = c.guess.value_or(mmlin::Rates{c.k1, c.k_minus1, c.k2});
    apply(o.guess_k1, g.k1);
    apply(o.guess_k_minus1, g.k_minus1);
    apply(o.guess_k2, g.k2);
    c.guess = g;
  }
  apply(o.data, c.data_path);
  apply(o.observations, c.observations_path);
  apply(o.out, c.out_dir);
  apply(o.seed, c.seed);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Low-substrate Michaelis-Menten analyses: linear bounds, convergence order, "
               "timescales and rate fitting"};
  cli.require_subcommand(1, 1);
  cli.fallthrough();

  std::string config_path;
  Overrides o;
  cli.add_option("--config", config_path, "JSON scenario file")->check(CLI::ExistingFile);
  cli.add_option("--out", o.out, "Write results into this directory instead of stdout");
  cli.add_option("--seed", o.seed, "Master random seed");
  cli.add_option("--k1", o.k1, "Binding rate constant");
  cli.add_option("--k-minus1", o.k_minus1, "Dissociation rate constant");
  cli.add_option("--k2", o.k2, "Catalytic rate constant");
  cli.add_option("--e0", o.e0, "Total enzyme concentration");
  cli.add_option("--s0", o.s0, "Initial substrate concentration");
  cli.add_option("--c0", o.c0, "Initial complex concentration");
  cli.add_option("--rel-tol", o.rel_tol, "Integrator relative tolerance");
  cli.add_option("--abs-tol", o.abs_tol, "Integrator absolute tolerance");
  cli.add_option("--max-steps", o.max_steps, "Integrator step budget");

  auto* simulate = cli.add_subcommand("simulate", "Trajectory table with comparison bounds");
  simulate->add_option("--n-grid", o.n_grid, "Number of output rows");
  simulate->add_option("--observations", o.observations,
                       "Also write synthetic observations (t,s,c,weight) to this file");
  simulate->add_option("--n-obs", o.n_obs, "Number of synthetic observations");
  simulate->add_option("--obs-noise", o.obs_noise, "Observation noise, relative to s0");

  auto* bounds = cli.add_subcommand("bounds", "Check the sandwich inequalities");
  bounds->add_option("--n-grid", o.n_grid, "Number of grid points");

  auto* order = cli.add_subcommand("order", "Estimate the convergence order in s0");
  order->add_option("--s0-max", o.s0_max, "Largest s0 (default K/4)");
  order->add_option("--n-points", o.n_points, "Number of halvings of s0");

  auto* timescales = cli.add_subcommand("timescales", "Timescale separation diagnostics");
  timescales->add_option("--eta-sep", o.eta_sep, "Separation index below which modes are separated");
  timescales->add_option("--eta-marginal", o.eta_marginal, "Separation index below which separation is marginal");

  auto* fit = cli.add_subcommand("fit", "Estimate k1, k-1, k2 from a time course");
  fit->add_option("--data", o.data, "Observation CSV with columns t,s[,c][,weight]");
  fit->add_option("--guess-k1", o.guess_k1, "Initial k1");
  fit->add_option("--guess-k-minus1", o.guess_k_minus1, "Initial k-1");
  fit->add_option("--guess-k2", o.guess_k2, "Initial k2");
  fit->add_option("--trials", o.trials, "Monte-Carlo trials on synthetic noisy data");
  fit->add_option("--noise", o.noise, "Monte-Carlo noise level, relative to s0");
  fit->add_option("--n-obs", o.n_obs, "Observations per Monte-Carlo trial");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : mmlin::app::kExitInvalidInput;
  }

  mmlin::app::ScenarioConfig config;
  try {
    if (!config_path.empty()) config = mmlin::app::load_config_file(config_path);
  } catch (const mmlin::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mmlin::app::kExitInvalidInput;
  }
  config = merge(config, o);
  const std::string command = cli.get_subcommands().front()->get_name();
  return mmlin::app::run_command(command, config, std::cout, std::cerr);
}
