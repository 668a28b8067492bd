// Batch driver: optimize / simulate / noise-sweep / sweep-k / verify.
// All frequencies in omega_m = 1 units, times in block units (5T per block).

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "optoprep/io.hpp"
#include "optoprep/optimizer.hpp"
#include "optoprep/verify.hpp"

using namespace optoprep;
using nlohmann::json;

namespace {

// --config file supplies defaults; explicit flags win.  The file is read
// before CLI11 sees argv so its values can seed the option defaults.
json load_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) throw CLI::FileError::Missing(argv[i + 1]);
      json j;
      in >> j;
      return j;
    }
  }
  return json::object();
}

template <typename T>
T cfg_or(const json& cfg, const std::string& key, T fallback) {
  return cfg.value(key, fallback);
}

TargetState parse_target(const std::string& name, double theta, bool* has_theta) {
  if (name.rfind("fock", 0) == 0) {
    const int n = name.size() > 4 ? std::stoi(name.substr(4)) : 2;
    return TargetState::fock(n);
  }
  if (name == "superposition" || name == "sup") {
    if (has_theta && !*has_theta) return TargetState::superposition(0.0);
    return TargetState::superposition(theta);
  }
  throw CLI::ValidationError("--target", "unknown target '" + name + "'");
}

SystemParams make_params(double k, int cavity_dim, int mech_dim, int ratio) {
  SystemParams p;
  p.k = k;
  p.space = {cavity_dim, mech_dim};
  p.omega_c_ratio = ratio;
  return p;
}

std::string hash_of(const json& j) { return config_hash(j.dump()); }

void run_cells(int workers, int n, const std::function<void(int)>& cell) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) cell(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int count = std::min(workers, n);
  for (int w = 0; w < count; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) cell(i);
    });
  for (auto& t : pool) t.join();
}

std::string out_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);  // best effort; write reports failures
  return dir + "/" + name;
}

int cmd_optimize(const json& cfg, double k, double eta_max, int horizon,
                 const std::string& target_name, double theta, bool theta_given,
                 std::uint64_t seed, int restarts, long max_evals, int cavity_dim, int mech_dim,
                 const std::string& out_dir, bool exact_replay) {
  OptimizationProblem prob;
  bool has_theta = theta_given;
  prob.target = parse_target(target_name, theta, &has_theta);
  prob.optimize_theta = prob.target.kind == TargetState::Kind::Superposition && !theta_given;
  prob.n_blocks = horizon;
  prob.eta_max = eta_max;
  prob.params = make_params(k, cavity_dim, mech_dim, 20);
  prob.seed = seed;
  prob.restarts = restarts;
  prob.max_evaluations = max_evals;

  std::fprintf(stderr, "optimizing %s over %d blocks (k=%g, eta_max=%g, seed=%llu)\n",
               prob.target.name().c_str(), horizon, k, eta_max,
               static_cast<unsigned long long>(seed));
  OptimizationReport rep = optimize(prob, false);

  auto pattern = build_pattern(rep.best_amplitudes, prob.params, eta_max);
  TargetState final_target = prob.target;
  if (rep.theta_optimized) final_target = TargetState::superposition(rep.best_theta);

  SimulationResult traj;
  if (exact_replay) {
    Vector v0 = Vector::Zero(prob.params.space.composite_dim());
    v0[0] = 1.0;
    traj = propagate_exact(pattern, pure_state(SpaceTag::Composite, prob.params.space, v0), {});
    rep.achieved_fidelity_exact = fidelity_fn(traj, final_target);
  } else {
    QuantumState vac = pure_state(SpaceTag::Cavity, FockSpace{cavity_dim, 1},
                                  basis_vector(0, cavity_dim));
    traj = propagate_effective(rep.best_amplitudes, prob.params, vac, 2);
  }

  json run = cfg;
  run["command"] = "optimize";
  run["k"] = k;
  run["eta_max"] = eta_max;
  run["horizon"] = horizon;
  run["target"] = target_name;
  run["seed"] = seed;
  const std::string hash = hash_of(run);

  json report = json::parse(report_to_json(rep, prob));
  report["config_hash"] = hash;
  report["leakage_warning"] = traj.leakage_warning;
  write_text_file(out_path(out_dir, "optimize_report.json"), report.dump(2) + "\n");
  write_text_file(out_path(out_dir, "pattern.json"), pattern_to_json(pattern) + "\n");

  CsvTable table = trajectory_table(traj);
  write_csv(out_path(out_dir, "trajectory.csv"), table, "trajectory hash=" + hash, 1);

  std::printf("fidelity_order2 %.6f\n", rep.achieved_fidelity_order2);
  if (rep.achieved_fidelity_exact >= 0.0)
    std::printf("fidelity_exact %.6f\n", rep.achieved_fidelity_exact);
  if (rep.theta_optimized) std::printf("theta %.4f\n", rep.best_theta);
  return 0;
}

int cmd_simulate(const json& cfg, const std::string& pattern_file, double kappa, double gamma,
                 double nbar, double nth, const std::string& target_name, double theta,
                 bool theta_given, int cavity_dim, int mech_dim, int lindblad_steps, bool strang,
                 const std::string& out_dir) {
  DrivingPattern pattern = pattern_from_json(read_text_file(pattern_file));
  if (cavity_dim > 0) pattern.params.space.cavity_dim = cavity_dim;
  if (mech_dim > 0) pattern.params.space.mech_dim = mech_dim;
  const FockSpace& s = pattern.params.space;

  bool has_theta = theta_given;
  TargetState target = parse_target(target_name, theta, &has_theta);

  const bool noisy = kappa > 0.0 || gamma > 0.0;
  PropagationConfig pc;
  pc.lindblad_steps_per_period = lindblad_steps;
  pc.strang_splitting = strang;

  json run = cfg;
  run["command"] = "simulate";
  run["pattern"] = pattern_file;
  run["kappa"] = kappa;
  run["gamma"] = gamma;
  run["nbar"] = nbar;
  run["nth"] = nth;
  const std::string hash = hash_of(run);

  json sidecar;
  sidecar["config_hash"] = hash;
  sidecar["k"] = pattern.params.k;
  sidecar["n_blocks"] = pattern.block_amplitudes.size();

  SimulationResult traj;
  if (!noisy && nth == 0.0) {
    Vector v0 = Vector::Zero(s.composite_dim());
    v0[0] = 1.0;
    traj = propagate_exact(pattern, pure_state(SpaceTag::Composite, s, v0), pc);
    const double fn = fidelity_fn(traj, target);
    sidecar["F_n"] = fn;
    if (target.kind == TargetState::Kind::Superposition || has_theta) {
      double best_theta = 0.0;
      sidecar["F_n_best_theta"] = fidelity_fn_best_theta(traj, &best_theta);
      sidecar["best_theta"] = best_theta;
    }
    std::printf("F_n %.6f\n", fn);
  } else {
    Lindbladian lind = combine(optical_loss(kappa, s),
                               mechanical_thermalization(gamma, nbar, pattern.params.k, s));
    QuantumState mech0 =
        nth > 0.0 ? thermal_state(nth, s.mech_dim, SpaceTag::Mech) : QuantumState{};
    Matrix rho0 = Matrix::Zero(s.composite_dim(), s.composite_dim());
    if (nth > 0.0) {
      for (int m = 0; m < s.mech_dim; ++m)
        for (int m2 = 0; m2 < s.mech_dim; ++m2) rho0(m, m2) = mech0.rho(m, m2);
    } else {
      rho0(0, 0) = 1.0;
    }
    traj = propagate_lindblad(pattern, mixed_state(SpaceTag::Composite, s, rho0), lind, pc);

    Vector v0 = Vector::Zero(s.composite_dim());
    v0[0] = 1.0;
    auto lossless = propagate_exact(pattern, pure_state(SpaceTag::Composite, s, v0), pc);
    const double fl = fidelity_fl(traj, target);
    const double fi = fidelity_fi(lossless, traj);
    sidecar["F_l"] = fl;
    sidecar["F_i"] = fi;
    sidecar["F_n"] = fidelity_fn(lossless, target);
    std::printf("F_l %.6f\nF_i %.6f\n", fl, fi);
  }
  sidecar["leakage_warning"] = traj.leakage_warning;
  sidecar["positivity_warning"] = traj.positivity_warning;
  sidecar["norm_defect"] = traj.norm_defect;

  write_csv(out_path(out_dir, "trajectory.csv"), trajectory_table(traj),
            "trajectory hash=" + hash, 1);
  write_text_file(out_path(out_dir, "simulate_report.json"), sidecar.dump(2) + "\n");
  return 0;
}

int cmd_noise_sweep(const json& cfg, const std::string& pattern_file, const std::string& mode,
                    std::vector<double> kappas, std::vector<double> gammas,
                    std::vector<double> nbars, std::vector<double> nths, int cavity_dim,
                    int mech_dim, int lindblad_steps, bool strang, int workers,
                    const std::string& out_dir) {
  DrivingPattern pattern = pattern_from_json(read_text_file(pattern_file));
  if (cavity_dim > 0) pattern.params.space.cavity_dim = cavity_dim;
  if (mech_dim > 0) pattern.params.space.mech_dim = mech_dim;
  const FockSpace& s = pattern.params.space;

  double best_theta = 0.0;
  PropagationConfig pc;
  pc.lindblad_steps_per_period = lindblad_steps;
  pc.strang_splitting = strang;
  pc.record_stride = -1.0;

  Vector v0 = Vector::Zero(s.composite_dim());
  v0[0] = 1.0;
  auto lossless = propagate_exact(pattern, pure_state(SpaceTag::Composite, s, v0), pc);
  TargetState target = TargetState::fock(2);
  const double f_sup = fidelity_fn_best_theta(lossless, &best_theta);
  if (f_sup > fidelity_fn(lossless, target)) target = TargetState::superposition(best_theta);

  json run = cfg;
  run["command"] = "noise-sweep";
  run["pattern"] = pattern_file;
  run["mode"] = mode;
  const std::string hash = hash_of(run);

  CsvTable table;
  json sidecar;
  sidecar["config_hash"] = hash;
  sidecar["target"] = target.name();
  sidecar["F_n_lossless"] = fidelity_fn(lossless, target);

  if (mode == "thermal") {
    // One exact run per initial phonon level; every nth cell reweights them.
    std::vector<QuantumState> reduced(s.mech_dim);
    run_cells(workers, s.mech_dim, [&](int m) {
      Vector vm = Vector::Zero(s.composite_dim());
      vm[m] = 1.0;
      auto res = propagate_exact(pattern, pure_state(SpaceTag::Composite, s, vm), pc);
      reduced[m] = comparison_state(res);
    });
    const QuantumState ref = comparison_state(lossless);
    const Vector tvec = target.state(s.cavity_dim).vec;
    table.columns = {"nth", "F_l", "F_i"};
    for (double nth : nths) {
      Matrix rho = Matrix::Zero(s.cavity_dim, s.cavity_dim);
      if (nth <= 0.0) {
        rho = reduced[0].density();
      } else {
        double total = 0.0;
        const double r = nth / (1.0 + nth);
        for (int m = 0; m < s.mech_dim; ++m) {
          const double p = std::pow(r, m) / (1.0 + nth);
          rho += p * reduced[m].density();
          total += p;
        }
        rho /= total;
      }
      QuantumState mixed = mixed_state(SpaceTag::Cavity, FockSpace{s.cavity_dim, 1}, rho);
      table.rows.push_back({nth, fidelity_pure_target(mixed, tvec), fidelity(ref, mixed)});
    }
  } else if (mode == "kappa") {
    table.columns = {"kappa", "F_l", "F_i"};
    table.rows.resize(kappas.size());
    run_cells(workers, static_cast<int>(kappas.size()), [&](int i) {
      Lindbladian lind = optical_loss(kappas[i], s);
      Matrix rho0 = Matrix::Zero(s.composite_dim(), s.composite_dim());
      rho0(0, 0) = 1.0;
      auto res = propagate_lindblad(pattern, mixed_state(SpaceTag::Composite, s, rho0), lind, pc);
      table.rows[i] = {kappas[i], fidelity_fl(res, target), fidelity_fi(lossless, res)};
    });
  } else if (mode == "gamma") {
    table.columns = {"gamma", "nbar", "F_l", "F_i"};
    table.rows.resize(gammas.size() * nbars.size());
    run_cells(workers, static_cast<int>(table.rows.size()), [&](int i) {
      const double g = gammas[i / nbars.size()];
      const double nb = nbars[i % nbars.size()];
      Lindbladian lind = mechanical_thermalization(g, nb, pattern.params.k, s);
      Matrix rho0 = Matrix::Zero(s.composite_dim(), s.composite_dim());
      rho0(0, 0) = 1.0;
      auto res = propagate_lindblad(pattern, mixed_state(SpaceTag::Composite, s, rho0), lind, pc);
      table.rows[i] = {g, nb, fidelity_fl(res, target), fidelity_fi(lossless, res)};
    });
  } else {
    throw CLI::ValidationError("--mode", "expected thermal, kappa, or gamma");
  }

  write_csv(out_path(out_dir, "noise_sweep.csv"), table, "noise-sweep " + mode + " hash=" + hash,
            1);
  write_text_file(out_path(out_dir, "noise_sweep.json"), sidecar.dump(2) + "\n");
  std::printf("%zu cells written\n", table.rows.size());
  return 0;
}

int cmd_sweep_k(const json& cfg, std::vector<double> k_grid, std::vector<int> horizons,
                double eta_max, const std::string& target_name, std::uint64_t seed, int restarts,
                long max_evals, int cavity_dim, int workers, const std::string& out_dir) {
  bool has_theta = false;
  TargetState target = parse_target(target_name, 0.0, &has_theta);

  struct Cell {
    double k;
    int horizon;
  };
  std::vector<Cell> cells;
  for (int h : horizons)
    for (double k : k_grid) cells.push_back({k, h});

  SweepTable table;
  table.entries.resize(cells.size());
  run_cells(workers, static_cast<int>(cells.size()), [&](int i) {
    OptimizationProblem p;
    p.target = target;
    p.optimize_theta = target.kind == TargetState::Kind::Superposition;
    p.n_blocks = cells[i].horizon;
    p.eta_max = eta_max;
    p.params = make_params(cells[i].k, cavity_dim, 1, 20);
    p.seed = seed;
    p.restarts = restarts;
    p.max_evaluations = max_evals;
    auto rep = optimize(p, true);
    SweepEntry e;
    e.k = cells[i].k;
    e.horizon_blocks = cells[i].horizon;
    e.fidelity = rep.achieved_fidelity_exact >= 0.0 ? rep.achieved_fidelity_exact
                                                    : rep.achieved_fidelity_order2;
    e.fidelity_order2 = rep.achieved_fidelity_order2;
    e.amplitudes = rep.best_amplitudes;
    e.theta = rep.best_theta;
    table.entries[i] = std::move(e);
    std::fprintf(stderr, "k=%.5f horizon=%d F=%.4f (order2 %.4f)\n", e.k, e.horizon_blocks,
                 e.fidelity, e.fidelity_order2);
  });

  json run = cfg;
  run["command"] = "sweep-k";
  run["eta_max"] = eta_max;
  run["seed"] = seed;
  const std::string hash = hash_of(run);

  CsvTable csv;
  csv.columns = {"k", "horizon_blocks", "fidelity", "fidelity_order2"};
  for (const auto& e : table.entries)
    csv.rows.push_back(
        {e.k, static_cast<double>(e.horizon_blocks), e.fidelity, e.fidelity_order2});
  write_csv(out_path(out_dir, "sweep_k.csv"), csv, "sweep-k hash=" + hash, 2);

  json sidecar;
  sidecar["config_hash"] = hash;
  for (int h : horizons) {
    const SweepEntry* best = table.best_for_horizon(h);
    if (!best) continue;
    json b;
    b["k"] = best->k;
    b["fidelity"] = best->fidelity;
    b["amplitudes"] = best->amplitudes;
    if (target.kind == TargetState::Kind::Superposition) b["theta"] = best->theta;
    sidecar["best"][std::to_string(h)] = b;
    std::printf("horizon %d: best k %.5f (F=%.4f)\n", h, best->k, best->fidelity);
  }
  write_text_file(out_path(out_dir, "sweep_k.json"), sidecar.dump(2) + "\n");
  return 0;
}

int cmd_verify(int panels, bool fast, int omega_c_ratio, const std::string& out_file) {
  VerifyOptions opts;
  opts.quadrature_panels = panels;
  opts.include_slope_fits = !fast;
  opts.omega_c_ratio = omega_c_ratio;
  auto checks = verify_suite(opts);

  std::ostringstream report;
  bool all_pass = true;
  for (const auto& c : checks) {
    report << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  value=" << c.value
           << " bound=" << c.bound;
    if (!c.note.empty()) report << "  (" << c.note << ")";
    report << "\n";
    all_pass = all_pass && c.pass;
  }
  report << (all_pass ? "all checks passed\n" : "CHECK FAILURES PRESENT\n");
  std::fputs(report.str().c_str(), stdout);
  if (!out_file.empty()) write_text_file(out_file, report.str());
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cavity-state preparation toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");

  json cfg;
  try {
    cfg = load_config(argc, argv);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  }

  // shared parameter pool; each subcommand wires the subset it uses
  double k = cfg_or(cfg, "k", 1.0 / 26.0);
  double eta_max = cfg_or(cfg, "eta_max", 4.0);
  int horizon = cfg_or(cfg, "horizon", 16);
  std::string target_name = cfg_or(cfg, "target", std::string("fock2"));
  double theta = cfg_or(cfg, "theta", 0.0);
  std::uint64_t seed = cfg_or(cfg, "seed", static_cast<std::uint64_t>(1234));
  int restarts = cfg_or(cfg, "restarts", 24);
  long max_evals = cfg_or(cfg, "max_evals", 50000L);
  int cavity_dim = cfg_or(cfg, "cavity_dim", 60);
  int mech_dim = cfg_or(cfg, "mech_dim", 15);
  std::string out_dir = cfg_or(cfg, "out", std::string("."));
  int workers = cfg_or(cfg, "workers", 1);
  std::string pattern_file = cfg_or(cfg, "pattern", std::string());
  double kappa = cfg_or(cfg, "kappa", 0.0);
  double gamma = cfg_or(cfg, "gamma", 0.0);
  double nbar = cfg_or(cfg, "nbar", 0.0);
  double nth = cfg_or(cfg, "nth", 0.0);
  int lindblad_steps = cfg_or(cfg, "lindblad_steps", 200);
  bool strang = cfg_or(cfg, "strang", false);

  auto* opt = app.add_subcommand("optimize", "optimize block amplitudes for a target state");
  bool no_exact = false;
  opt->add_option("--k", k, "coupling ratio g0/omega_m");
  opt->add_option("--eta-max", eta_max, "amplitude bound");
  opt->add_option("--horizon", horizon, "protocol length in blocks")
      ->check(CLI::Range(1, 1000000));
  opt->add_option("--target", target_name, "fock<N> or superposition");
  auto* theta_opt = opt->add_option("--theta", theta, "fixed superposition phase");
  opt->add_option("--seed", seed, "RNG seed");
  opt->add_option("--restarts", restarts, "multistart count");
  opt->add_option("--max-evals", max_evals, "objective evaluation budget");
  opt->add_option("--cavity-dim", cavity_dim, "cavity truncation");
  opt->add_option("--mech-dim", mech_dim, "mechanical truncation");
  opt->add_option("--out", out_dir, "output directory");
  opt->add_option("--workers", workers, "accepted for config parity");
  opt->add_flag("--no-exact-replay", no_exact, "skip the exact-dynamics replay");

  auto* sim = app.add_subcommand("simulate", "propagate a stored pattern");
  sim->add_option("--pattern", pattern_file, "pattern JSON file")->required();
  sim->add_option("--kappa", kappa, "optical decay rate");
  sim->add_option("--gamma", gamma, "mechanical damping rate");
  sim->add_option("--nbar", nbar, "mechanical bath occupation");
  sim->add_option("--nth", nth, "initial thermal phonon occupation");
  sim->add_option("--target", target_name, "fidelity target");
  auto* sim_theta = sim->add_option("--theta", theta, "fixed superposition phase");
  sim->add_option("--cavity-dim", cavity_dim, "override cavity truncation");
  sim->add_option("--mech-dim", mech_dim, "override mechanical truncation");
  sim->add_option("--lindblad-steps", lindblad_steps, "dissipative steps per period");
  sim->add_flag("--strang", strang, "symmetric splitting");
  sim->add_option("--out", out_dir, "output directory");

  auto* noise = app.add_subcommand("noise-sweep", "F_l/F_i grids for a stored pattern");
  std::string mode = cfg_or(cfg, "mode", std::string("kappa"));
  std::vector<double> kappas = cfg_or(cfg, "kappa_grid",
                                      std::vector<double>{1e-6, 1e-5, 1e-4, 3.16e-4, 1e-3, 1e-2});
  std::vector<double> gammas = cfg_or(cfg, "gamma_grid", std::vector<double>{1e-4, 1e-3, 1e-2});
  std::vector<double> nbars = cfg_or(cfg, "nbar_grid", std::vector<double>{1.0, 10.0, 100.0});
  std::vector<double> nths =
      cfg_or(cfg, "nth_grid", std::vector<double>{0.0, 0.25, 0.5, 1.0, 1.5, 2.0});
  noise->add_option("--pattern", pattern_file, "pattern JSON file")->required();
  noise->add_option("--mode", mode, "thermal, kappa, or gamma");
  noise->add_option("--kappa", kappas, "kappa grid")->delimiter(',');
  noise->add_option("--gamma", gammas, "gamma grid")->delimiter(',');
  noise->add_option("--nbar", nbars, "bath occupation grid")->delimiter(',');
  noise->add_option("--nth", nths, "initial occupation grid")->delimiter(',');
  noise->add_option("--cavity-dim", cavity_dim, "override cavity truncation");
  noise->add_option("--mech-dim", mech_dim, "override mechanical truncation");
  noise->add_option("--lindblad-steps", lindblad_steps, "dissipative steps per period");
  noise->add_flag("--strang", strang, "symmetric splitting");
  noise->add_option("--workers", workers, "worker threads for grid cells");
  noise->add_option("--out", out_dir, "output directory");

  auto* sweep = app.add_subcommand("sweep-k", "per-(k, horizon) optimization grid");
  std::vector<double> k_grid = cfg_or(cfg, "k_grid", std::vector<double>{});
  std::vector<int> horizons = cfg_or(cfg, "horizons", std::vector<int>{5, 10, 16});
  sweep->add_option("--k", k_grid, "k grid (default j/52, j=1..8)")->delimiter(',');
  sweep->add_option("--horizons", horizons, "horizons in blocks")->delimiter(',');
  sweep->add_option("--eta-max", eta_max, "amplitude bound");
  sweep->add_option("--target", target_name, "fock<N> or superposition");
  sweep->add_option("--seed", seed, "RNG seed");
  sweep->add_option("--restarts", restarts, "multistart count per cell");
  sweep->add_option("--max-evals", max_evals, "per-cell evaluation budget");
  sweep->add_option("--cavity-dim", cavity_dim, "cavity truncation");
  sweep->add_option("--workers", workers, "worker threads for grid cells");
  sweep->add_option("--out", out_dir, "output directory");

  auto* ver = app.add_subcommand("verify", "run the invariant suites");
  int panels = cfg_or(cfg, "panels", 10000);
  bool fast = false;
  int ratio = cfg_or(cfg, "omega_c_ratio", 20);
  std::string ver_out = cfg_or(cfg, "verify_out", std::string());
  ver->add_option("--panels", panels, "quadrature panels for the Magnus integrals");
  ver->add_flag("--fast", fast, "skip the propagation-heavy slope fits");
  ver->add_option("--omega-c-ratio", ratio, "cavity/mechanical frequency ratio");
  ver->add_option("--out", ver_out, "write the diagnostics table to a file");

  // also accepted after the subcommand name; load_config reads argv directly
  for (CLI::App* sc : {opt, sim, noise, sweep, ver})
    sc->add_option("--config", config_path, "JSON config file; flags override its values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*opt)
      return cmd_optimize(cfg, k, eta_max, horizon, target_name, theta, theta_opt->count() > 0,
                          seed, restarts, max_evals, cavity_dim, mech_dim, out_dir, !no_exact);
    if (*sim)
      return cmd_simulate(cfg, pattern_file, kappa, gamma, nbar, nth, target_name, theta,
                          sim_theta->count() > 0, cavity_dim, mech_dim, lindblad_steps, strang,
                          out_dir);
    if (*noise)
      return cmd_noise_sweep(cfg, pattern_file, mode, kappas, gammas, nbars, nths, cavity_dim,
                             mech_dim, lindblad_steps, strang, workers, out_dir);
    if (*sweep) {
      if (k_grid.empty())
        for (int j = 1; j <= 8; ++j) k_grid.push_back(j / 52.0);
      return cmd_sweep_k(cfg, k_grid, horizons, eta_max, target_name, seed, restarts, max_evals,
                         cavity_dim, workers, out_dir);
    }
    if (*ver) return cmd_verify(panels, fast, ratio, ver_out);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
