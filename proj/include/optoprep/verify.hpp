#pragma once

#include <string>
#include <vector>

#include "optoprep/model.hpp"

namespace optoprep {

// Drive-displaced interaction-frame Hamiltonian during one driven period,
//   -g0 (a' + f*(t)) (a + f(t)) (b e^{-2 pi i t} + b' e^{2 pi i t})
// with f(t) = i eta e^{i psi} sin(4 pi t) and t in units of T.
Operator interaction_frame_hamiltonian(const SystemParams& sys, double eta, double psi, double t);

// Composite-Simpson integral of the above over one period (absolute time
// measure), and its Frobenius norm relative to the integrated norm scale.
Operator magnus_first_integral(const SystemParams& sys, double eta, double psi, int panels);
double magnus_first_residual(const SystemParams& sys, double eta, double psi, int panels);

// Effective Hamiltonian generated by the second Magnus term over one period:
//   (i/T) * [ -(1/2) int_0^T dt1 int_0^t1 dt2 [H(t1), H(t2)] ]
// evaluated with a cumulative-Simpson inner integral (one commutator per node).
Operator magnus_second_effective(const SystemParams& sys, double eta, double psi, int panels);

// max |A - B| over entries whose row and column indices keep the given margin
// from both truncation edges, divided by max |B| over the same entries.
// Products of truncated ladder operators are only trustworthy there.
double interior_relative_diff(const Matrix& a, const Matrix& b, const FockSpace& s,
                              int margin_cavity, int margin_mech);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;  // measured residual or statistic
  double bound = 0.0;  // threshold the value is compared against
  std::string note;
};

struct VerifyOptions {
  int quadrature_panels = 10000;
  bool include_slope_fits = true;  // block-propagator scaling fits (slower)
  int omega_c_ratio = 20;          // oddness exercised by the CLI failure demo
};

// Every registered invariant with measured residuals; used by the CLI and the
// acceptance runner.
std::vector<CheckResult> verify_suite(const VerifyOptions& opts = {});

}  // namespace optoprep
