#pragma once

#include <string>
#include <vector>

#include "optoprep/fock.hpp"

namespace optoprep {

struct JumpTerm {
  double rate = 0.0;   // always >= 0
  Operator op;
};

struct Lindbladian {
  std::vector<JumpTerm> jump_terms;
  std::string label = "custom";
  bool is_zero() const {
    for (const auto& j : jump_terms)
      if (j.rate > 0.0) return false;
    return true;
  }
};

// D[A] rho = A rho A' - (1/2){A'A, rho}; traceless by construction.
Matrix dissipator_apply(const Operator& a, const Matrix& rho);

// sum_j rate_j D[A_j] rho
Matrix lindblad_apply(const Lindbladian& l, const Matrix& rho);

// Photon leakage at rate kappa: single jump a (tensored with the mech
// identity on composite spaces).
Lindbladian optical_loss(double kappa, const FockSpace& space);

// Mechanical damping against a thermal bath, with the polaron-shifted jumps
//   gamma (n_bar + 1) D[b - k n_c],  gamma n_bar D[b' - k n_c],
// plus photon-number dephasing at rate 4 gamma k^2 / log(1 + 1/n_bar).
// The dephasing coefficient is 0 at n_bar = 0 (its limiting value).
Lindbladian mechanical_thermalization(double gamma, double n_bar, double k,
                                      const FockSpace& space);

// Concatenation of the jump term lists.
Lindbladian combine(const Lindbladian& a, const Lindbladian& b);

}  // namespace optoprep
