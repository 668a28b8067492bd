#include <cmath>

#include "doctest.h"
#include "optoprep/metrics.hpp"

using namespace optoprep;

namespace {

SimulationResult result_with(QuantumState st, double phi) {
  SimulationResult r;
  r.final_state = std::move(st);
  r.final_frame_phase = phi;
  return r;
}

}  // namespace

TEST_CASE("target states") {
  TargetState f2 = TargetState::fock(2);
  QuantumState s = f2.state(6);
  CHECK(s.tag == SpaceTag::Cavity);
  CHECK(std::abs(s.vec[2] - Complex(1.0)) < 1e-15);
  CHECK(f2.name() == "fock2");

  TargetState sup = TargetState::superposition(-1.86);
  QuantumState u = sup.state(6);
  CHECK(std::abs(u.vec[0] - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
  CHECK(std::abs(u.vec[2] - std::exp(Complex(0.0, -1.86)) / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(u.vec[1]) == 0.0);
  CHECK(sup.name().find("superposition") == 0);

  CHECK_THROWS_AS(TargetState::fock(-1), InvalidParameter);
  CHECK_THROWS_AS(f2.state(2), InvalidDimension);  // |2> needs at least dim 3
}

TEST_CASE("comparison state undoes the frame phase") {
  FockSpace s{4, 3};
  const double phi = 0.9;

  // composite pure |2,1> dressed with e^{i phi n_c}
  Vector v = Vector::Zero(s.composite_dim());
  v[2 * 3 + 1] = std::exp(Complex(0.0, 2.0 * phi));
  QuantumState dressed = pure_state(SpaceTag::Composite, s, v);
  QuantumState cav = comparison_state(result_with(dressed, phi));
  CHECK(cav.tag == SpaceTag::Cavity);
  CHECK(cav.dim() == 4);
  CHECK_FALSE(cav.pure);  // partial trace returns a density matrix
  CHECK(std::abs(cav.rho(2, 2) - Complex(1.0)) < 1e-12);

  // cavity-only pure state: entries rotate back entry by entry
  Vector c = Vector::Zero(4);
  c[0] = 1.0 / std::sqrt(2.0);
  c[2] = std::exp(Complex(0.0, 2.0 * phi)) / std::sqrt(2.0);
  QuantumState undone = comparison_state(result_with(pure_state(SpaceTag::Cavity, {4, 1}, c), phi));
  CHECK(std::abs(undone.vec[2] - Complex(1.0 / std::sqrt(2.0))) < 1e-12);

  // phi = 0 passes the state through untouched
  QuantumState same = comparison_state(result_with(pure_state(SpaceTag::Cavity, {4, 1}, c), 0.0));
  CHECK(std::abs(same.vec[2] - c[2]) < 1e-15);
}

TEST_CASE("fidelities") {
  FockSpace s{5, 4};

  // F_n sees through the frame phase and the mechanical factor
  Vector v = Vector::Zero(s.composite_dim());
  v[2 * 4 + 0] = std::exp(Complex(0.0, 2.0 * 0.7)) * std::sqrt(0.96);
  v[1 * 4 + 0] = std::sqrt(0.04);
  SimulationResult res = result_with(pure_state(SpaceTag::Composite, s, v), 0.7);
  // sqrt(<2|rho|2>) for a pure target
  CHECK(fidelity_fn(res, TargetState::fock(2)) == doctest::Approx(std::sqrt(0.96)));

  // a global phase on the state drops out
  Vector w = Complex(std::exp(Complex(0.0, 1.234))) * v;
  SimulationResult res2 = result_with(pure_state(SpaceTag::Composite, s, w), 0.7);
  CHECK(fidelity_fn(res2, TargetState::fock(2)) == doctest::Approx(std::sqrt(0.96)));

  // F_l is the same functional on mixed input
  Matrix rho = Matrix::Zero(5, 5);
  rho(2, 2) = 0.9;
  rho(0, 0) = 0.1;
  SimulationResult mixed = result_with(mixed_state(SpaceTag::Cavity, {5, 1}, rho), 0.0);
  CHECK(fidelity_fl(mixed, TargetState::fock(2)) == doctest::Approx(std::sqrt(0.9)));

  // F_i between identical states is 1
  CHECK(fidelity_fi(res, res) == doctest::Approx(1.0));

  // and between orthogonal ones 0
  Vector o = Vector::Zero(s.composite_dim());
  o[3 * 4 + 0] = 1.0;
  SimulationResult ortho = result_with(pure_state(SpaceTag::Composite, s, o), 0.0);
  CHECK(fidelity_fi(res, ortho) < 1e-12);

  SimulationResult small = result_with(pure_state(SpaceTag::Cavity, {3, 1}, basis_vector(2, 3)), 0.0);
  CHECK_THROWS_AS(fidelity_fi(res, small), SpaceMismatch);
}

TEST_CASE("superposition phase recovery") {
  const double theta = -1.2;
  Vector v = Vector::Zero(6);
  v[0] = 1.0 / std::sqrt(2.0);
  v[2] = std::exp(Complex(0.0, theta)) / std::sqrt(2.0);
  QuantumState st = pure_state(SpaceTag::Cavity, {6, 1}, v);

  CHECK(best_superposition_theta(st) == doctest::Approx(theta).epsilon(1e-12));

  double got = 0.0;
  SimulationResult res = result_with(st, 0.0);
  CHECK(fidelity_fn_best_theta(res, &got) == doctest::Approx(1.0));
  CHECK(got == doctest::Approx(theta));

  // the frame phase shifts the raw coherence; the comparator removes it first
  Vector d = v;
  d[2] *= std::exp(Complex(0.0, 2.0 * 0.4));
  SimulationResult dressed = result_with(pure_state(SpaceTag::Cavity, {6, 1}, d), 0.4);
  double got2 = 0.0;
  CHECK(fidelity_fn_best_theta(dressed, &got2) == doctest::Approx(1.0));
  CHECK(got2 == doctest::Approx(theta));

  // mixed input uses the rho02 coherence
  Matrix rho = st.density();
  SimulationResult mres = result_with(mixed_state(SpaceTag::Cavity, {6, 1}, rho), 0.0);
  double got3 = 0.0;
  CHECK(fidelity_fn_best_theta(mres, &got3) == doctest::Approx(1.0));
  CHECK(got3 == doctest::Approx(theta));

  CHECK_THROWS_AS(best_superposition_theta(pure_state(SpaceTag::Cavity, {2, 1}, basis_vector(0, 2))),
                  InvalidDimension);
}

TEST_CASE("fock fidelity ignores a diagonal rotation") {
  // undoing the frame phase never changes populations, so F_n for a Fock
  // target is insensitive to the recorded phi
  Vector v = Vector::Zero(8);
  v[2] = std::sqrt(0.8);
  v[4] = std::sqrt(0.2);
  QuantumState st = pure_state(SpaceTag::Cavity, {8, 1}, v);
  double f_a = fidelity_fn(result_with(st, 0.0), TargetState::fock(2));
  double f_b = fidelity_fn(result_with(st, 2.345), TargetState::fock(2));
  CHECK(f_a == doctest::Approx(f_b));
  CHECK(f_a == doctest::Approx(std::sqrt(0.8)));
}
