#pragma once

#include <string>
#include <vector>

#include "optoprep/dissipation.hpp"
#include "optoprep/schedule.hpp"

namespace optoprep {

struct PropagationConfig {
  int steps_per_period = 400;          // exact unitary stepping, midpoint-sampled drive
  double record_stride = 5.0;          // units of T between snapshots; <= 0: endpoints only
  Frame frame = Frame::Rotating;
  int lindblad_steps_per_period = 200; // dissipative splitting resolution
  bool strang_splitting = false;       // default is first-order splitting
  double leakage_threshold = 1e-6;     // population in the top two levels of either mode
  double krylov_tol = 1e-12;
};

struct Snapshot {
  double time = 0.0;                    // units of T
  std::vector<double> cavity_populations;
};

struct SimulationResult {
  std::vector<Snapshot> snapshots;
  QuantumState final_state;         // composite, or cavity-only for order-2 effective runs
  double final_frame_phase = 0.0;   // residual frame angle, undone before comparisons
  bool leakage_warning = false;
  bool positivity_warning = false;
  double max_cavity_edge_population = 0.0;
  double max_mech_edge_population = 0.0;
  double norm_defect = 0.0;         // worst |1 - norm| (or |1 - trace|) seen
  std::string provenance;
};

// Numerically exact piecewise stepping of the full driven Hamiltonian.
SimulationResult propagate_exact(const DrivingPattern& pattern, const QuantumState& initial,
                                 const PropagationConfig& config = {});

// Per-block effective propagation: exp(-i H T) per block with H from
// block_effective_hamiltonian, then the closing frame phase recorded.
// Order 2 acts on the cavity alone and requires a cavity-only initial state.
SimulationResult propagate_effective(const std::vector<double>& block_amplitudes,
                                     const SystemParams& params, const QuantumState& initial,
                                     int order, const PropagationConfig& config = {});

// Trotter-split density-matrix evolution: per-block effective unitary steps
// interleaved with dissipative substeps.
SimulationResult propagate_lindblad(const DrivingPattern& pattern, const QuantumState& initial,
                                    const Lindbladian& lind, const PropagationConfig& config = {});

}  // namespace optoprep
