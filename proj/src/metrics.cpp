#include "optoprep/metrics.hpp"

#include <cmath>

namespace optoprep {

TargetState TargetState::fock(int n) {
  if (n < 0) throw InvalidParameter("Fock index must be non-negative");
  TargetState t;
  t.kind = Kind::Fock;
  t.fock_n = n;
  return t;
}

TargetState TargetState::superposition(double theta) {
  TargetState t;
  t.kind = Kind::Superposition;
  t.theta = theta;
  return t;
}

QuantumState TargetState::state(int cavity_dim) const {
  FockSpace s{cavity_dim, 1};
  if (kind == Kind::Fock) {
    if (fock_n >= cavity_dim) throw InvalidDimension("Fock index outside the space");
    return pure_state(SpaceTag::Cavity, s, basis_vector(fock_n, cavity_dim));
  }
  if (cavity_dim < 3) throw InvalidDimension("superposition target needs at least |2>");
  Vector v = Vector::Zero(cavity_dim);
  v[0] = 1.0 / std::sqrt(2.0);
  v[2] = std::exp(Complex(0.0, theta)) / std::sqrt(2.0);
  return pure_state(SpaceTag::Cavity, s, v);
}

std::string TargetState::name() const {
  if (kind == Kind::Fock) return "fock" + std::to_string(fock_n);
  return "superposition";
}

QuantumState comparison_state(const SimulationResult& r) {
  QuantumState cavity = r.final_state.tag == SpaceTag::Composite
                            ? partial_trace_mech(r.final_state)
                            : r.final_state;
  const double phi = r.final_frame_phase;
  if (phi == 0.0) return cavity;
  // Undo the closing frame factor e^{i phi n_c}.
  if (cavity.pure) {
    Vector v = cavity.vec;
    for (int n = 0; n < v.size(); ++n) v[n] *= std::exp(Complex(0.0, -phi * n));
    return pure_state(cavity.tag, cavity.space, v);
  }
  Matrix rho = cavity.rho;
  for (int i = 0; i < rho.rows(); ++i)
    for (int j = 0; j < rho.cols(); ++j)
      rho(i, j) *= std::exp(Complex(0.0, -phi * (i - j)));
  return mixed_state(cavity.tag, cavity.space, rho);
}

namespace {

double fidelity_to_target(const SimulationResult& r, const TargetState& target) {
  QuantumState cavity = comparison_state(r);
  QuantumState t = target.state(cavity.dim());
  return fidelity(cavity, t);
}

}  // namespace

double fidelity_fn(const SimulationResult& result_exact, const TargetState& target) {
  return fidelity_to_target(result_exact, target);
}

double fidelity_fl(const SimulationResult& result_dissipative, const TargetState& target) {
  return fidelity_to_target(result_dissipative, target);
}

double fidelity_fi(const SimulationResult& result_exact,
                   const SimulationResult& result_dissipative) {
  QuantumState a = comparison_state(result_exact);
  QuantumState b = comparison_state(result_dissipative);
  if (a.dim() != b.dim()) throw SpaceMismatch("reduced states live on different spaces");
  return fidelity(a, b);
}

double best_superposition_theta(const QuantumState& cavity_state) {
  if (cavity_state.dim() < 3) throw InvalidDimension("state needs at least |2>");
  Complex rho02;
  if (cavity_state.pure)
    rho02 = cavity_state.vec[0] * std::conj(cavity_state.vec[2]);
  else
    rho02 = cavity_state.rho(0, 2);
  // <Psi|rho|Psi> = (rho00 + rho22)/2 + Re(e^{i theta} rho02), maximal at
  // theta = -arg(rho02).
  if (std::abs(rho02) == 0.0) return 0.0;
  return -std::arg(rho02);
}

double fidelity_fn_best_theta(const SimulationResult& result_exact, double* theta_out) {
  QuantumState cavity = comparison_state(result_exact);
  const double theta = best_superposition_theta(cavity);
  if (theta_out) *theta_out = theta;
  return fidelity(cavity, TargetState::superposition(theta).state(cavity.dim()));
}

}  // namespace optoprep
