#pragma once

#include <vector>

#include "optoprep/fock.hpp"

namespace optoprep {

// All rates are in units of omega_m; absolute times in units of 1/omega_m.
struct SystemParams {
  double omega_m = 1.0;
  int omega_c_ratio = 20;  // omega_c / omega_m; must be even for the half-period identity
  double k = 1.0 / 26.0;   // g0 / omega_m
  FockSpace space{60, 15};

  double omega_c() const { return omega_c_ratio * omega_m; }
  double g0() const { return k * omega_m; }
  double period() const { return 2.0 * M_PI / omega_m; }  // T
  double block_span() const { return 5.0 * period(); }    // one protocol block
};
void validate(const SystemParams& p);

// One drive window at constant amplitude and phase.  t_start and duration are
// in units of T = 2 pi / omega_m, as are all time arguments below.
struct DrivePulse {
  double eta = 0.0;
  double psi = 0.0;
  double t_start = 0.0;
  double duration = 0.0;
};

enum class Frame { Lab, Rotating };

// d(t) = 2iE e^{-i(w_c t - psi)} cos(2 w_m t) with E = eta * w_m; the rotating
// frame strips the e^{-i w_c t} factor.
Complex drive_value(const DrivePulse& p, double t, const SystemParams& sys,
                    Frame frame = Frame::Rotating);

// f(t) = int_0^t e^{i w_c tau} d(tau) dtau, accumulated over driven windows.
Complex displacement_f(const std::vector<DrivePulse>& periods, double t, const SystemParams& sys);

// Driven composite Hamiltonian at time t.  Rotating frame (default):
//   w_m n_m - g0 n_c(b + b') + [2iE e^{i psi} cos(2 w_m t)] a' + h.c.
// The lab frame adds w_c n_c and carries the bare drive phase.
Operator hamiltonian(const SystemParams& sys, const std::vector<DrivePulse>& periods, double t,
                     Frame frame = Frame::Rotating);

// Phase-rotated cavity quadratures.
Operator cavity_momentum(double psi, int dim);  // P_psi = (i/sqrt2)(a e^{-i psi} - a' e^{i psi})
Operator cavity_position(double psi, int dim);  // X_psi = (1/sqrt2)(a e^{-i psi} + a' e^{i psi})

// Second- and third-order stroboscopic generators for one drive period.
Operator m2_cavity(double eta, double psi, int cavity_dim);
Operator m2_interaction(double eta, double psi, const FockSpace& s);
Operator m3_mech(double eta, int mech_dim);
Operator m3_interaction(double eta, double psi, const FockSpace& s);

// Per-block effective generator H = w_m (k^2 H2 + k^3 H3).  The normalization
// follows the stroboscopic accumulation: a block spans 5T, but its propagator
// is exp(-i H T) with T one mechanical period (see generator_duration).
struct EffectiveBlock {
  int order = 2;
  Operator h;                  // order 2: cavity-only; order 3: composite
  double generator_duration;   // T
  double span;                 // 5T
};
EffectiveBlock block_effective_hamiltonian(double eta, const SystemParams& sys, int order);

// Driven-only protocol variant (no free intervals): H_g summed over blocks.
Operator second_order_block_hg(const std::vector<double>& etas, const SystemParams& sys);

// Exact rotating-frame propagator of the undriven dynamics over T/2:
//   e^{i pi k^2 n_c^2} * exp(2 k n_c (b' - b)) * e^{-i pi n_m}
// assembled per cavity occupation; requires even omega_c_ratio.
Operator half_period_propagator(const SystemParams& sys);

// exp(-i t H) for dense Hermitian H via eigendecomposition.
Matrix hermitian_phase_exp(const Matrix& h, double t);

}  // namespace optoprep
