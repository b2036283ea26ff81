#include "harmlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "harmlab/experiments.hpp"
#include "harmlab/expsum.hpp"
#include "harmlab/lattice.hpp"
#include "harmlab/packets.hpp"
#include "harmlab/regularity.hpp"

namespace harmlab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using experiments::format_double;

constexpr const char* kConventionsNote =
    "probability surface measure on spheres and [0,2pi]; model spectrum n";

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + name + " under " + dir);
  out << content;
}

json config_json(const RunConfig& cfg, const std::string& command) {
  json j;
  j["command"] = command;
  j["spheres"] = cfg.manifold.sphere_dims;
  j["torus"] = cfg.manifold.torus_dim;
  j["k"] = cfg.k;
  j["p"] = cfg.p;
  j["N"] = cfg.N_schedule;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["budget"] = cfg.budget;
  j["jobs"] = cfg.jobs;
  j["tolerance"] = cfg.tolerance;
  j["conventions"] = kConventionsNote;
  return j;
}

void emit_outputs(const RunConfig& cfg, const std::string& command, const std::string& csv,
                  json manifest, std::optional<double> reference_slope = {}) {
  if (cfg.out_dir.empty()) return;
  write_file(cfg.out_dir, command + ".csv", csv);
  manifest["config"] = config_json(cfg, command);
  write_file(cfg.out_dir, command + "_manifest.json", manifest.dump(2) + "\n");
  if (cfg.gnuplot)
    write_file(cfg.out_dir, command + ".gp",
               experiments::gnuplot_script(command + ".csv", "N", "ratio", reference_slope,
                                           command));
}

int config_error(const std::string& message) {
  std::cerr << "config error: " << message << "\n";
  return 2;
}

bool dry_run_banner(const RunConfig& cfg, const std::string& command) {
  if (!cfg.dry_run) return false;
  std::cout << command << " dry run: schedule [";
  for (std::size_t i = 0; i < cfg.N_schedule.size(); ++i)
    std::cout << (i ? "," : "") << cfg.N_schedule[i];
  std::cout << "], trials " << cfg.trials << ", seed " << cfg.seed << ", budget " << cfg.budget
            << ", manifold " << cfg.manifold.name() << "\n";
  return true;
}

}  // namespace

void RunConfig::validate() const {
  manifold.validate();
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(tolerance >= 0)) throw std::invalid_argument("tolerance must be >= 0");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("format must be csv or json");
  if (mode != "i1" && mode != "i2") throw std::invalid_argument("mode must be i1 or i2");
  if (witness != "zonal" && witness != "hw")
    throw std::invalid_argument("witness must be zonal or hw");
}

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  auto colon = text.find(':');
  if (colon != std::string::npos) {
    double lo = std::stod(text.substr(0, colon));
    double hi = std::stod(text.substr(colon + 1));
    if (!(lo >= 1) || hi < lo) throw std::invalid_argument("bad N range '" + text + "'");
    for (double n = lo; n <= hi + 1e-9; n *= 2) out.push_back(n);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

void apply_config_file(RunConfig& cfg, const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  json root = json::parse(in);
  if (!root.contains(command)) throw std::invalid_argument("config has no block '" + command + "'");
  const json& block = root.at(command);
  for (auto& [key, value] : block.items()) {
    if (key == "spheres") cfg.manifold.sphere_dims = value.get<std::vector<int>>();
    else if (key == "torus") cfg.manifold.torus_dim = value.get<int>();
    else if (key == "k") cfg.k = value.get<int>();
    else if (key == "p") cfg.p = value.get<double>();
    else if (key == "N") cfg.N_schedule = parse_schedule(value.get<std::string>());
    else if (key == "A") {
      auto range = value.get<std::string>();
      auto colon = range.find(':');
      cfg.A_lo = std::stoll(range.substr(0, colon));
      cfg.A_hi = std::stoll(range.substr(colon + 1));
    } else if (key == "exhaustive_b") cfg.exhaustive_b = value.get<bool>();
    else if (key == "mode") cfg.mode = value.get<std::string>();
    else if (key == "N1_ratio_power") cfg.N1_ratio_power = value.get<double>();
    else if (key == "witness") cfg.witness = value.get<std::string>();
    else if (key == "lambda1_mult") cfg.lambda1_mult = value.get<int>();
    else if (key == "trials") cfg.trials = value.get<int>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "budget") cfg.budget = value.get<std::size_t>();
    else if (key == "jobs") cfg.jobs = value.get<int>();
    else if (key == "tolerance") cfg.tolerance = value.get<double>();
    else if (key == "count_slope_max") cfg.count_slope_max = value.get<double>();
    else if (key == "count_max") cfg.count_max = value.get<double>();
    else if (key == "out") cfg.out_dir = value.get<std::string>();
    else if (key == "format") cfg.format = value.get<std::string>();
    else if (key == "gnuplot") cfg.gnuplot = value.get<bool>();
    else if (key == "fit_input") cfg.fit_input = value.get<std::string>();
    else if (key == "fit_drop") cfg.fit_drop = value.get<int>();
    else throw std::invalid_argument("unknown config key '" + key + "' in block '" + command + "'");
  }
}

int cmd_thresholds(const RunConfig& cfg) {
  try {
    cfg.validate();
    if (cfg.manifold.r() < 2) return config_error("thresholds needs a product with r >= 2");
    if (dry_run_banner(cfg, "thresholds")) return 0;
    std::string csv = regularity::threshold_table_csv(cfg.manifold, 1, std::max(1, cfg.k));
    std::cout << csv;
    for (int k = 1; k <= std::max(1, cfg.k); ++k) {
      auto t = regularity::lwp_threshold(cfg.manifold, k);
      auto sc = regularity::critical_regularity(cfg.manifold, k);
      std::cout << "k=" << k << ": s " << regularity::to_string(t.strict) << " "
                << harmlab::to_string(t.s_bound) << " (" << regularity::to_string(t.regime)
                << ", s_c = " << harmlab::to_string(sc) << ") via " << t.source << "\n";
    }
    json manifest;
    manifest["rows"] = csv;
    emit_outputs(cfg, "thresholds", csv, manifest);
    return 0;
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
}

int cmd_expsum(const RunConfig& cfg) {
  try {
    cfg.validate();
    if (cfg.N_schedule.empty()) return config_error("expsum needs --N");
    if (dry_run_banner(cfg, "expsum")) return 0;
    const int r0 = cfg.manifold.r0() > 0 || cfg.manifold.r1() == 0 ? cfg.manifold.r0() : 0;
    const int r1 = cfg.manifold.r1();

    expsum::SweepOptions opts;
    opts.trials = cfg.trials;
    opts.seed = cfg.seed;

    experiments::SweepReport report;
    double verdict_slope = 0, bound = 0;
    json manifest;
    manifest["seed"] = cfg.seed;

    if (cfg.mode == "i1") {
      std::vector<long long> Ns;
      for (double n : cfg.N_schedule) Ns.push_back(std::llround(n));
      auto rep = expsum::verify_i1(r0, r1, cfg.p, Ns, opts);
      bound = rep.bound_exponent;
      if (!rep.fit) return config_error("need at least 3 schedule points for a fit");
      verdict_slope = rep.fit->slope;
      report.schedule = rep.schedule;
      report.points.resize(rep.schedule.size());
      std::size_t per_N = rep.rows.size() / rep.schedule.size();
      for (std::size_t i = 0; i < rep.schedule.size(); ++i) {
        report.points[i].value = rep.max_ratio[i];
        for (std::size_t rix = i * per_N; rix < (i + 1) * per_N; ++rix) {
          const auto& row = rep.rows[rix];
          experiments::Row r;
          r.add("N", row.N2);
          r.add("p", cfg.p);
          r.add("r0", static_cast<long long>(r0));
          r.add("r1", static_cast<long long>(r1));
          r.add("family", expsum::family_name(row.family));
          std::string shift;
          for (auto s : row.shift) shift += (shift.empty() ? "" : ";") + std::to_string(s);
          r.add("shift", shift);
          r.add("ratio", row.ratio);
          report.points[i].rows.push_back(std::move(r));
        }
      }
      manifest["bound_exponent"] = bound;
      manifest["fit_slope"] = verdict_slope;
    } else {
      std::vector<std::pair<long long, long long>> schedule;
      for (double n : cfg.N_schedule) {
        long long N2 = std::llround(n);
        long long N1 = std::llround(std::pow(n, cfg.N1_ratio_power));
        schedule.push_back({std::max(N1, N2), N2});
      }
      auto rep = expsum::verify_i2(r0, r1, cfg.p, schedule, opts);
      report.schedule = cfg.N_schedule;
      report.points.resize(rep.rows.size());
      double max_gain = 0;
      for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& row = rep.rows[i];
        experiments::Row r;
        r.add("N", row.N2);
        r.add("N1", row.N1);
        r.add("ratio", row.ratio);
        r.add("cube_bound", row.cube_bound);
        r.add("gain_base", row.gain_base);
        r.add("gain_measured", row.gain_measured);
        report.points[i].rows.push_back(std::move(r));
        report.points[i].value = row.gain_measured;
        max_gain = std::max(max_gain, row.gain_measured);
      }
      if (rep.gain_fit) manifest["gain_fit_slope"] = rep.gain_fit->slope;
      manifest["max_gain_measured"] = max_gain;
      // slab norms must not exceed the cube bound by more than the slack
      verdict_slope = max_gain > 1.0 + cfg.tolerance ? 1.0 : 0.0;
      bound = 0.0;
    }

    std::string csv = experiments::to_csv(report);
    emit_outputs(cfg, "expsum", csv, manifest, bound);
    bool pass = cfg.mode == "i1" ? verdict_slope <= bound + cfg.tolerance : verdict_slope == 0.0;
    std::cout << "expsum " << cfg.mode << ": "
              << (cfg.mode == "i1"
                      ? "slope " + std::string(format_double(verdict_slope)) + " vs bound " +
                            format_double(bound) + " + " + format_double(cfg.tolerance)
                      : "gain check")
              << " => " << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
  } catch (const quadrature::BudgetError& e) {
    return config_error(e.what());
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
}

int cmd_projector(const RunConfig& cfg) {
  try {
    cfg.validate();
    if (!cfg.manifold.sphere_only())
      return config_error("projector needs a product of spheres");
    if (cfg.N_schedule.size() < 3) return config_error("projector needs >= 3 schedule points");
    if (dry_run_banner(cfg, "projector")) return 0;

    std::vector<packets::ProjectorPoint> schedule;
    for (double n : cfg.N_schedule) {
      packets::ProjectorPoint pt;
      for (int j = 0; j <= cfg.k; ++j) {
        int deg = j == 0 ? cfg.lambda1_mult * static_cast<int>(n) : static_cast<int>(n);
        pt.degrees.push_back(std::vector<int>(cfg.manifold.r0(), deg));
      }
      schedule.push_back(std::move(pt));
    }
    std::vector<specialfn::Kind> kinds(
        cfg.manifold.r0(),
        cfg.witness == "zonal" ? specialfn::Kind::Zonal : specialfn::Kind::HighestWeight);
    auto reports = packets::projector_experiment(cfg.manifold, cfg.k, schedule, kinds);

    experiments::SweepReport sweep;
    std::vector<std::pair<double, double>> pts;
    for (auto& rep : reports) {
      experiments::PointResult pr;
      experiments::Row row;
      row.add("N", rep.N[1]);
      row.add("lhs", rep.lhs);
      row.add("rhs", rep.rhs_constant);
      row.add("ratio", rep.ratio);
      row.add("witness", cfg.witness);
      pr.rows.push_back(std::move(row));
      pr.value = rep.lhs;
      sweep.points.push_back(std::move(pr));
      sweep.schedule.push_back(rep.N[1]);
      pts.push_back({rep.N[1], rep.lhs});
    }
    auto fit = experiments::fit_exponent(pts);
    auto rhs = regularity::mljspe_constant(cfg.manifold, cfg.k);
    double theory = to_double(rhs.base_exponents.at(2));
    json manifest;
    manifest["fit_slope"] = fit.slope;
    manifest["theory_exponent"] = theory;
    std::string csv = experiments::to_csv(sweep);
    emit_outputs(cfg, "projector", csv, manifest, theory);
    bool pass = std::abs(fit.slope - theory) <= cfg.tolerance;
    std::cout << "projector: slope " << format_double(fit.slope) << " vs "
              << format_double(theory) << " +- " << format_double(cfg.tolerance) << " => "
              << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? 0 : 1;
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
}

int cmd_strichartz(const RunConfig& cfg) {
  try {
    cfg.validate();
    if (cfg.N_schedule.size() < 3) return config_error("strichartz needs >= 3 schedule points");
    if (dry_run_banner(cfg, "strichartz")) return 0;

    std::vector<std::vector<double>> windows;
    for (double n : cfg.N_schedule) {
      std::vector<double> Ns;
      Ns.push_back(std::round(std::pow(n, cfg.N1_ratio_power)));
      for (int j = 1; j <= cfg.k; ++j) Ns.push_back(n);
      windows.push_back(std::move(Ns));
    }
    packets::StrichartzOptions opts;
    opts.trials = cfg.trials;
    opts.seed = cfg.seed;
    auto reports = packets::strichartz_experiment(
        cfg.manifold, cfg.k, windows,
        {packets::PacketFamily::SingleMode, packets::PacketFamily::RandomWindow,
         packets::PacketFamily::SlabLocalized},
        opts);

    experiments::SweepReport sweep;
    std::map<double, double> best;  // N2 -> max ratio over families and trials
    for (auto& rep : reports) best[rep.N[1]] = std::max(best[rep.N[1]], rep.ratio);
    std::vector<std::pair<double, double>> pts(best.begin(), best.end());
    for (auto& rep : reports) {
      experiments::PointResult pr;
      experiments::Row row;
      row.add("N", rep.N[1]);
      row.add("N1", rep.N[0]);
      row.add("family", rep.label);
      row.add("trial", static_cast<long long>(rep.trial));
      row.add("lhs", rep.lhs);
      row.add("rhs", rep.rhs_constant);
      row.add("ratio", rep.ratio);
      pr.rows.push_back(std::move(row));
      sweep.points.push_back(std::move(pr));
    }
    json manifest;
    bool pass = true;
    if (pts.size() >= 3) {
      auto fit = experiments::fit_exponent(pts);
      manifest["max_ratio_slope"] = fit.slope;
      // the ratio against the sharp constant should not grow beyond slack
      pass = fit.slope <= cfg.tolerance + 0.2;
      std::cout << "strichartz: ratio slope " << format_double(fit.slope) << " vs 0 + "
                << format_double(cfg.tolerance + 0.2) << " => " << (pass ? "PASS" : "FAIL")
                << "\n";
    }
    emit_outputs(cfg, "strichartz", experiments::to_csv(sweep), manifest);
    return pass ? 0 : 1;
  } catch (const quadrature::BudgetError& e) {
    return config_error(e.what());
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
}

int cmd_count(const RunConfig& cfg) {
  try {
    cfg.validate();
    if (dry_run_banner(cfg, "count")) return 0;
    experiments::SweepReport sweep;
    json manifest;
    bool pass = true;
    if (cfg.exhaustive_b) {
      long long N = cfg.N_schedule.empty() ? 2 : std::llround(cfg.N_schedule[0]);
      auto res = lattice::max_circle_count_all_offsets(N, cfg.A_lo, cfg.A_hi);
      experiments::PointResult pr;
      experiments::Row row;
      row.add("N", static_cast<long long>(N));
      row.add("A_lo", cfg.A_lo);
      row.add("A_hi", cfg.A_hi);
      row.add("max_count", res.max_count);
      row.add("arg_A", res.arg_A);
      pr.rows.push_back(std::move(row));
      sweep.points.push_back(std::move(pr));
      manifest["max_count"] = res.max_count;
      pass = res.max_count <= static_cast<long long>(cfg.count_max);
      std::cout << "count exhaustive-b: max " << res.max_count << " vs "
                << static_cast<long long>(cfg.count_max) << " => " << (pass ? "PASS" : "FAIL")
                << "\n";
    } else {
      if (cfg.N_schedule.size() < 3) return config_error("count b=0 sweep needs >= 3 N values");
      std::vector<std::pair<double, double>> pts;
      for (double n : cfg.N_schedule) {
        long long N = std::llround(n);
        long long cap = cfg.A_hi > 0 ? cfg.A_hi : N * N * N * N;
        auto res = lattice::max_circle_count_origin(N, 0, cap);
        experiments::PointResult pr;
        experiments::Row row;
        row.add("N", static_cast<long long>(N));
        row.add("max_count", res.max_count);
        row.add("arg_A", res.arg_A);
        pr.rows.push_back(std::move(row));
        pr.value = static_cast<double>(res.max_count);
        sweep.points.push_back(std::move(pr));
        sweep.schedule.push_back(n);
        pts.push_back({n, static_cast<double>(res.max_count)});
      }
      auto fit = experiments::fit_exponent(pts);
      manifest["slope"] = fit.slope;
      pass = fit.slope <= cfg.count_slope_max;
      std::cout << "count b=0: slope " << format_double(fit.slope) << " vs "
                << format_double(cfg.count_slope_max) << " => " << (pass ? "PASS" : "FAIL")
                << "\n";
    }
    emit_outputs(cfg, "count", experiments::to_csv(sweep), manifest);
    return pass ? 0 : 1;
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
}

int cmd_weyl(const RunConfig& cfg) {
  try {
    cfg.validate();
    if (cfg.N_schedule.size() < 3) return config_error("weyl needs >= 3 N values");
    if (dry_run_banner(cfg, "weyl")) return 0;

    std::mt19937_64 rng(cfg.seed);
    std::vector<long long> shifts;
    std::uniform_int_distribution<long long> sh(0, 1000);
    for (int i = 0; i < 10; ++i) shifts.push_back(sh(rng));

    // fixed minor samples: classified minor at every N in the sweep
    std::vector<double> ts;
    {
      std::uniform_real_distribution<double> ut(0.02, 0.98);
      std::mt19937_64 trng(cfg.seed ^ 0xabcdef);
      while (ts.size() < 20) {
        double t = ut(trng);
        bool minor_everywhere = true;
        for (double n : cfg.N_schedule)
          if (expsum::classify_arc(t, std::llround(n)).major) minor_everywhere = false;
        if (minor_everywhere) ts.push_back(t);
      }
    }

    experiments::SweepReport sweep;
    std::vector<std::pair<double, double>> major_pts;
    std::vector<double> minor_vals;
    for (double n : cfg.N_schedule) {
      long long N = std::llround(n);
      std::vector<expsum::MajorArcSample> samples;
      for (long long q : {1LL, 2LL, 3LL, 4LL}) {
        if (q >= N) continue;
        for (long long a = 1; a <= q; ++a) {
          if (std::gcd(a, q) != 1) continue;
          samples.push_back({a, q, 0.0});
          samples.push_back({a, q, 0.4 / (static_cast<double>(q) * N)});
        }
      }
      double major = expsum::major_arc_ratio(N, samples, shifts);
      double minor = expsum::minor_arc_ratio(N, ts, shifts);

      experiments::PointResult pr;
      experiments::Row row;
      row.add("N", static_cast<long long>(N));
      row.add("major_ratio", major);
      row.add("minor_ratio", minor);
      pr.rows.push_back(std::move(row));
      pr.value = major;
      sweep.points.push_back(std::move(pr));
      sweep.schedule.push_back(n);
      major_pts.push_back({n, major});
      minor_vals.push_back(minor);
    }
    auto fit = experiments::fit_exponent(major_pts);
    bool major_flat = std::abs(fit.slope) <= 0.1;
    bool minor_stable = true;
    for (double v : minor_vals)
      if (v > minor_vals.front() * 1.5) minor_stable = false;
    json manifest;
    manifest["major_slope"] = fit.slope;
    manifest["minor_first"] = minor_vals.front();
    // the raised-cosine ramp meets the 1/N increment and variation
    // conditions up to these absolute constants
    long long Nc = std::llround(cfg.N_schedule.front());
    auto cut = expsum::build_cutoff(0, Nc);
    manifest["cutoff_increment_constant"] = cut.max_increment() * Nc;
    manifest["cutoff_variation_constant"] = cut.increment_variation() * Nc;
    emit_outputs(cfg, "weyl", experiments::to_csv(sweep), manifest);
    bool pass = major_flat && minor_stable;
    std::cout << "weyl: major slope " << format_double(fit.slope) << " (|.| <= 0.1), minor "
              << (minor_stable ? "stable" : "growing") << " => " << (pass ? "PASS" : "FAIL")
              << "\n";
    return pass ? 0 : 1;
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
}

int cmd_fit(const RunConfig& cfg) {
  try {
    cfg.validate();
    if (cfg.fit_input.empty()) return config_error("fit needs an input CSV (fit_input)");
    std::ifstream in(cfg.fit_input);
    if (!in) return config_error("cannot open " + cfg.fit_input);
    std::string line;
    std::getline(in, line);  // header: N,value
    std::vector<std::pair<double, double>> pts;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      pts.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    }
    auto fit = experiments::fit_exponent(pts, cfg.fit_drop);
    std::cout << "fit: slope " << format_double(fit.slope) << " intercept "
              << format_double(fit.intercept) << " max|res| "
              << format_double(fit.max_abs_residual) << "\n";
    json manifest;
    manifest["slope"] = fit.slope;
    manifest["intercept"] = fit.intercept;
    manifest["max_abs_residual"] = fit.max_abs_residual;
    if (!cfg.out_dir.empty()) {
      write_file(cfg.out_dir, "fit_manifest.json", manifest.dump(2) + "\n");
    }
    return 0;
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
}

int dispatch(const std::string& command, const RunConfig& cfg) {
  if (command == "thresholds") return cmd_thresholds(cfg);
  if (command == "expsum") return cmd_expsum(cfg);
  if (command == "projector") return cmd_projector(cfg);
  if (command == "strichartz") return cmd_strichartz(cfg);
  if (command == "count") return cmd_count(cfg);
  if (command == "weyl") return cmd_weyl(cfg);
  if (command == "fit") return cmd_fit(cfg);
  return config_error("unknown command " + command);
}

}  // namespace harmlab::cli
