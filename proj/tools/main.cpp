// harmlab command-line driver: estimate calculators and desk-scale
// verification sweeps for spectral bounds on products of spheres and tori.

#include <CLI11.hpp>

#include "harmlab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"harmlab: spectral estimate laboratory on products of spheres and tori"};
  app.require_subcommand(1);

  harmlab::cli::RunConfig cfg;
  cfg.manifold = harmlab::ManifoldSpec({2}, 1);
  std::string spheres_text = "2";
  std::string torus_text = "1";
  std::string N_text;
  std::string A_text;
  std::string config_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its keys");
    cmd->add_option("--spheres", spheres_text, "comma list of sphere dimensions (empty for none)");
    cmd->add_option("--torus", torus_text, "torus dimension r1");
    cmd->add_option("--k", cfg.k, "nonlinearity index k");
    cmd->add_option("--p", cfg.p, "Lebesgue exponent p");
    cmd->add_option("--N", N_text, "schedule: lo:hi (dyadic) or comma list");
    cmd->add_option("--trials", cfg.trials, "random draws per point");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
    cmd->add_option("--budget", cfg.budget, "point/node budget");
    cmd->add_option("--jobs", cfg.jobs, "worker pool size");
    cmd->add_option("--tol", cfg.tolerance, "verdict slope tolerance");
    cmd->add_option("--out", cfg.out_dir, "output directory (CSV + manifest)");
    cmd->add_option("--format", cfg.format, "csv|json");
    cmd->add_flag("--gnuplot", cfg.gnuplot, "emit a .gp script next to the CSV");
    cmd->add_flag("--dry-run", cfg.dry_run, "print the resolved schedule and exit");
  };

  CLI::App* thresholds = app.add_subcommand("thresholds", "well-posedness threshold table");
  add_common(thresholds);

  CLI::App* expsum = app.add_subcommand("expsum", "cube/slab exponential-sum sweeps");
  add_common(expsum);
  expsum->add_option("--mode", cfg.mode, "i1 (cube) or i2 (slab gain)");
  expsum->add_option("--N1-power", cfg.N1_ratio_power, "N1 = N2^power for i2");

  CLI::App* projector = app.add_subcommand("projector", "joint projector sharpness sweep");
  add_common(projector);
  projector->add_option("--witness", cfg.witness, "zonal|hw");
  projector->add_option("--lambda1-mult", cfg.lambda1_mult, "lambda1 = mult * lambda2");

  CLI::App* strichartz = app.add_subcommand("strichartz", "multilinear Strichartz sweep");
  add_common(strichartz);
  strichartz->add_option("--N1-power", cfg.N1_ratio_power, "N1 = N2^power");

  CLI::App* count = app.add_subcommand("count", "lattice circle counting");
  add_common(count);
  count->add_option("--A", A_text, "A range lo:hi");
  count->add_flag("--exhaustive-b", cfg.exhaustive_b, "all integer offsets (far regime check)");
  count->add_option("--slope-max", cfg.count_slope_max, "b=0 divisor-proxy slope ceiling");
  count->add_option("--count-max", cfg.count_max, "far-regime point ceiling");

  CLI::App* weyl = app.add_subcommand("weyl", "major/minor arc constants");
  add_common(weyl);

  CLI::App* fit = app.add_subcommand("fit", "log-log exponent fit of a CSV");
  add_common(fit);
  fit->add_option("--in", cfg.fit_input, "CSV with N,value columns");
  fit->add_option("--drop", cfg.fit_drop, "drop this many smallest-N points");

  CLI11_PARSE(app, argc, argv);
  CLI::App* active = app.get_subcommands().front();
  const std::string name = active->get_name();

  try {
    if (!config_path.empty()) harmlab::cli::apply_config_file(cfg, config_path, name);
    // flags override the config file: CLI11 already wrote straight into cfg,
    // so re-read the textual options that need parsing
    std::vector<int> spheres;
    if (!spheres_text.empty()) {
      std::stringstream ss(spheres_text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) spheres.push_back(std::stoi(item));
      }
    }
    if (active->count("--spheres") || config_path.empty()) cfg.manifold.sphere_dims = spheres;
    if (active->count("--torus") || config_path.empty())
      cfg.manifold.torus_dim = std::stoi(torus_text);
    if (!N_text.empty()) cfg.N_schedule = harmlab::cli::parse_schedule(N_text);
    if (!A_text.empty()) {
      auto colon = A_text.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("--A expects lo:hi");
      cfg.A_lo = std::stoll(A_text.substr(0, colon));
      cfg.A_hi = std::stoll(A_text.substr(colon + 1));
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  return harmlab::cli::dispatch(name, cfg);
}
