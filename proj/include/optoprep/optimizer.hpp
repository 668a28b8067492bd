#pragma once

#include <cstdint>

#include "optoprep/metrics.hpp"

namespace optoprep {

struct OptimizationProblem {
  TargetState target = TargetState::fock(2);
  int n_blocks = 16;       // horizon in 5T blocks; one amplitude per block
  double eta_max = 4.0;
  SystemParams params;     // carries k, dims, omega_c_ratio
  std::uint64_t seed = 1234;
  int restarts = 24;
  bool optimize_theta = false;  // joint periodic coordinate for superposition targets
  long max_evaluations = 50000;
  double improvement_tol = 1e-6;
};

struct OptimizationReport {
  std::vector<double> best_amplitudes;
  double best_theta = 0.0;
  bool theta_optimized = false;
  double objective = 1.0;                  // 1 - F at the reported optimum
  double achieved_fidelity_order2 = 0.0;
  double achieved_fidelity_exact = -1.0;   // post-hoc replay; -1 when skipped
  long evaluations = 0;
  std::vector<double> restart_objectives;  // best objective per restart, in order
  std::uint64_t seed = 0;
};

// 1 - F of the order-2 effective evolution from cavity vacuum.
double objective(const std::vector<double>& amplitudes, const OptimizationProblem& p);
double objective_with_theta(const std::vector<double>& amplitudes, double theta,
                            const OptimizationProblem& p);

// Multistart bounded Nelder-Mead; deterministic for a fixed seed.
OptimizationReport optimize(const OptimizationProblem& p, bool posthoc_exact = true);

struct SweepEntry {
  double k = 0.0;
  int horizon_blocks = 0;
  double fidelity = 0.0;         // exact-replay fidelity of the per-cell optimum
  double fidelity_order2 = 0.0;  // proxy value the search itself saw
  std::vector<double> amplitudes;
  double theta = 0.0;
};

struct SweepTable {
  std::vector<SweepEntry> entries;
  const SweepEntry* best_for_horizon(int horizon_blocks) const;  // argmax over k
};

SweepTable sweep_k(const OptimizationProblem& base, const std::vector<double>& k_grid,
                   const std::vector<int>& horizon_grid);

std::string report_to_json(const OptimizationReport& rep, const OptimizationProblem& p);

}  // namespace optoprep
