#include "optoprep/dissipation.hpp"

#include <cmath>

namespace optoprep {

Matrix dissipator_apply(const Operator& a, const Matrix& rho) {
  if (a.mat.rows() != rho.rows() || rho.rows() != rho.cols())
    throw SpaceMismatch("dissipator operand shapes differ");
  Matrix ar = a.mat * rho;
  Matrix out = ar * a.mat.adjoint();
  Matrix n = (a.mat.adjoint() * a.mat).eval();
  out -= 0.5 * (n * rho);
  out -= 0.5 * (rho * n);
  return out;
}

Matrix lindblad_apply(const Lindbladian& l, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& j : l.jump_terms) {
    if (j.rate == 0.0) continue;
    out += j.rate * dissipator_apply(j.op, rho);
  }
  return out;
}

Lindbladian optical_loss(double kappa, const FockSpace& space) {
  if (kappa < 0.0) throw InvalidParameter("kappa must be non-negative");
  Lindbladian l;
  l.label = "optical";
  if (kappa == 0.0) return l;
  Operator a = annihilation(space.cavity_dim, SpaceTag::Cavity);
  l.jump_terms.push_back({kappa, tensor(a, identity_op(space.mech_dim, SpaceTag::Mech))});
  return l;
}

Lindbladian mechanical_thermalization(double gamma, double n_bar, double k,
                                      const FockSpace& space) {
  if (gamma < 0.0 || n_bar < 0.0) throw InvalidParameter("rates must be non-negative");
  Lindbladian l;
  l.label = "mechanical";
  if (gamma == 0.0) return l;
  const Operator b = annihilation(space.mech_dim, SpaceTag::Mech);
  const Operator a = annihilation(space.cavity_dim, SpaceTag::Cavity);
  const Matrix nc = (a.dagger().mat * a.mat).eval();
  const Operator nc_comp =
      tensor(make_cavity_op(nc), identity_op(space.mech_dim, SpaceTag::Mech));
  const Operator b_comp = tensor(identity_op(space.cavity_dim, SpaceTag::Cavity), b);

  Operator down = b_comp;
  down.mat -= k * nc_comp.mat;
  Operator up = make_composite_op(Matrix(b_comp.mat.adjoint()), space);
  up.mat -= k * nc_comp.mat;

  l.jump_terms.push_back({gamma * (n_bar + 1.0), down});
  l.jump_terms.push_back({gamma * n_bar, up});
  // Dephasing coefficient 4 gamma k^2 / log(1 + 1/n_bar); its n_bar -> 0
  // limit is 0, taken by continuity.
  double dephase = 0.0;
  if (n_bar > 0.0) dephase = 4.0 * gamma * k * k / std::log1p(1.0 / n_bar);
  l.jump_terms.push_back({dephase, nc_comp});
  return l;
}

Lindbladian combine(const Lindbladian& a, const Lindbladian& b) {
  Lindbladian l = a;
  l.label = a.label + "+" + b.label;
  l.jump_terms.insert(l.jump_terms.end(), b.jump_terms.begin(), b.jump_terms.end());
  return l;
}

}  // namespace optoprep
