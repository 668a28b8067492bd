#pragma once

#include "optoprep/propagation.hpp"

namespace optoprep {

// Pure cavity-mode target: Fock |n> or (|0> + e^{i theta}|2>)/sqrt(2).
struct TargetState {
  enum class Kind { Fock, Superposition };
  Kind kind = Kind::Fock;
  int fock_n = 2;
  double theta = 0.0;

  static TargetState fock(int n);
  static TargetState superposition(double theta);
  QuantumState state(int cavity_dim) const;
  std::string name() const;
};

// Reduced cavity state of a run with the closing frame phase undone; the
// common comparator behind all three fidelities.
QuantumState comparison_state(const SimulationResult& r);

// F_n: lossless final state against the target.
double fidelity_fn(const SimulationResult& result_exact, const TargetState& target);
// F_l: dissipative final state against the target.
double fidelity_fl(const SimulationResult& result_dissipative, const TargetState& target);
// F_i: lossless against dissipative final state (Uhlmann).
double fidelity_fi(const SimulationResult& result_exact, const SimulationResult& result_dissipative);

// Phase maximizing the overlap with a balanced |0>/|2> superposition, and the
// corresponding best fidelity.
double best_superposition_theta(const QuantumState& cavity_state);
double fidelity_fn_best_theta(const SimulationResult& result_exact, double* theta_out = nullptr);

}  // namespace optoprep
