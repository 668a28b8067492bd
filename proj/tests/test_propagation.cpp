#include <cmath>
#include <random>

#include "doctest.h"
#include "optoprep/metrics.hpp"
#include "optoprep/propagation.hpp"

using namespace optoprep;

namespace {

SystemParams params_with(int cd, int md, double k = 1.0 / 26.0) {
  SystemParams p;
  p.k = k;
  p.space = {cd, md};
  return p;
}

Vector random_state(int dim, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(gauss(rng), gauss(rng));
  v.normalize();
  return v;
}

QuantumState composite_vacuum(const FockSpace& s) {
  return pure_state(SpaceTag::Composite, s, basis_vector(0, s.composite_dim()));
}

}  // namespace

TEST_CASE("exact propagation input checks") {
  SystemParams p = params_with(6, 4);
  DrivingPattern pat = build_pattern({1.0}, p, 4.0);

  PropagationConfig coarse;
  coarse.steps_per_period = 99;
  CHECK_THROWS_AS(propagate_exact(pat, composite_vacuum(p.space), coarse), InvalidParameter);

  QuantumState cav = pure_state(SpaceTag::Cavity, FockSpace{6, 1}, basis_vector(0, 6));
  CHECK_THROWS_AS(propagate_exact(pat, cav, {}), SpaceMismatch);

  QuantumState wrong = composite_vacuum(FockSpace{5, 4});
  CHECK_THROWS_AS(propagate_exact(pat, wrong, {}), SpaceMismatch);
}

TEST_CASE("undriven vacuum is stationary") {
  SystemParams p = params_with(12, 8);
  DrivingPattern pat = build_pattern({0.0}, p, 4.0);
  PropagationConfig cfg;
  cfg.steps_per_period = 100;

  SimulationResult res = propagate_exact(pat, composite_vacuum(p.space), cfg);
  CHECK(res.norm_defect < 1e-10);
  CHECK_FALSE(res.leakage_warning);
  CHECK(std::abs(std::abs(res.final_state.vec[0]) - 1.0) < 1e-10);
  CHECK(res.snapshots.front().time == doctest::Approx(0.0));
  CHECK(res.snapshots.back().time == doctest::Approx(5.0));
  CHECK(res.snapshots.back().cavity_populations[0] == doctest::Approx(1.0));
}

TEST_CASE("free flight conserves cavity populations") {
  // without drive the Hamiltonian commutes with n_c
  SystemParams p = params_with(10, 6);
  DrivingPattern pat = build_pattern({0.0}, p, 4.0);
  PropagationConfig cfg;
  cfg.steps_per_period = 120;

  Vector v0 = random_state(p.space.composite_dim(), 7u);
  std::vector<double> pc0(p.space.cavity_dim, 0.0);
  for (int n = 0; n < p.space.cavity_dim; ++n)
    for (int m = 0; m < p.space.mech_dim; ++m) pc0[n] += std::norm(v0[n * p.space.mech_dim + m]);

  SimulationResult res = propagate_exact(pat, pure_state(SpaceTag::Composite, p.space, v0), cfg);
  CHECK(res.norm_defect < 1e-9);
  for (int n = 0; n < p.space.cavity_dim; ++n)
    CHECK(res.snapshots.back().cavity_populations[n] == doctest::Approx(pc0[n]).epsilon(1e-9));
}

TEST_CASE("snapshot cadence") {
  SystemParams p = params_with(8, 5);
  DrivingPattern pat = build_pattern({2.0, 2.0}, p, 4.0);
  PropagationConfig cfg;
  cfg.steps_per_period = 100;
  cfg.record_stride = 0.5;

  SimulationResult res = propagate_exact(pat, composite_vacuum(p.space), cfg);
  REQUIRE(res.snapshots.size() >= 21);
  CHECK(res.snapshots.front().time == doctest::Approx(0.0));
  CHECK(res.snapshots.back().time == doctest::Approx(10.0));
  for (size_t i = 1; i < res.snapshots.size(); ++i)
    CHECK(res.snapshots[i].time > res.snapshots[i - 1].time);
  bool block_boundary = false;
  for (const auto& s : res.snapshots)
    if (std::abs(s.time - 5.0) < 1e-9) block_boundary = true;
  CHECK(block_boundary);
}

TEST_CASE("step halving converges at second order") {
  SystemParams p = params_with(12, 8);
  DrivingPattern pat = build_pattern({2.0}, p, 4.0);
  Vector v0 = random_state(p.space.composite_dim(), 11u);
  QuantumState in = pure_state(SpaceTag::Composite, p.space, v0);

  auto run = [&](int spp) {
    PropagationConfig cfg;
    cfg.steps_per_period = spp;
    cfg.record_stride = -1.0;
    return propagate_exact(pat, in, cfg).final_state.vec;
  };
  Vector a = run(100), b = run(200), c = run(400);
  double e1 = (a - b).norm();
  double e2 = (b - c).norm();
  CHECK(e1 < 5e-3);
  CHECK(e2 < e1);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.5));  // midpoint sampling
}

TEST_CASE("tiny spaces trip the leakage monitor") {
  SystemParams p = params_with(4, 3);
  DrivingPattern pat = build_pattern({4.0}, p, 4.0);
  PropagationConfig cfg;
  cfg.steps_per_period = 150;
  SimulationResult res = propagate_exact(pat, composite_vacuum(p.space), cfg);
  CHECK(res.leakage_warning);
  CHECK(res.max_cavity_edge_population > 1e-6);
}

TEST_CASE("order-2 effective propagation") {
  SystemParams p = params_with(20, 6);
  std::vector<double> amps = {4.0, 2.0};

  Vector v0 = random_state(20, 3u);
  QuantumState in = pure_state(SpaceTag::Cavity, FockSpace{20, 1}, v0);
  SimulationResult res = propagate_effective(amps, p, in, 2);

  // dense-exponential oracle, block by block
  Vector v = v0;
  for (double eta : amps) {
    EffectiveBlock blk = block_effective_hamiltonian(eta, p, 2);
    v = hermitian_phase_exp(blk.h.mat, p.period()) * v;
  }
  CHECK((res.final_state.vec - v).norm() < 1e-10);

  CHECK(res.final_state.tag == SpaceTag::Cavity);
  CHECK(res.final_state.space.mech_dim == 1);
  CHECK(res.final_frame_phase == 0.0);
  CHECK(res.norm_defect < 1e-12);
  REQUIRE(res.snapshots.size() == 3);
  CHECK(res.snapshots[1].time == doctest::Approx(5.0));

  CHECK_THROWS_AS(propagate_effective(amps, p, composite_vacuum(p.space), 2),
                  ConstraintViolation);
  QuantumState short_vec = pure_state(SpaceTag::Cavity, FockSpace{10, 1}, basis_vector(0, 10));
  CHECK_THROWS_AS(propagate_effective(amps, p, short_vec, 2), SpaceMismatch);
  CHECK_THROWS_AS(propagate_effective(amps, p, in, 5), InvalidParameter);
}

TEST_CASE("order-3 effective tracks the exact block") {
  SystemParams p = params_with(30, 10, 1.0 / 52.0);
  DrivingPattern pat = build_pattern({4.0}, p, 4.0);
  PropagationConfig cfg;
  cfg.steps_per_period = 200;
  cfg.record_stride = -1.0;

  SimulationResult exact = propagate_exact(pat, composite_vacuum(p.space), cfg);
  SimulationResult eff = propagate_effective({4.0}, p, composite_vacuum(p.space), 3);

  CHECK(eff.final_state.tag == SpaceTag::Composite);
  double f = fidelity_fi(exact, eff);
  CHECK(f > 1.0 - 1e-3);
}

TEST_CASE("lindblad pure cavity decay") {
  // diagonal block unitaries leave the population equation rho11' = -kappa rho11
  SystemParams p = params_with(3, 2);
  DrivingPattern pat = build_pattern({0.0}, p, 4.0);
  Vector v0 = basis_vector(1 * 2 + 0, p.space.composite_dim());
  QuantumState in = pure_state(SpaceTag::Composite, p.space, v0);

  PropagationConfig cfg;
  cfg.lindblad_steps_per_period = 200;
  SimulationResult res = propagate_lindblad(pat, in, optical_loss(0.03, p.space), cfg);

  CHECK_FALSE(res.final_state.pure);
  // exp(-0.03 * 10 pi) after one 5T block
  CHECK(std::abs(std::real(res.final_state.rho(2, 2)) - 0.3896611373753468) < 1e-9);
  CHECK(std::abs(res.final_state.rho.trace() - Complex(1.0)) < 1e-10);
  CHECK_FALSE(res.positivity_warning);
}

TEST_CASE("lindblad splitting converges") {
  SystemParams p = params_with(10, 5);
  DrivingPattern pat = build_pattern({4.0}, p, 4.0);
  QuantumState in = composite_vacuum(p.space);
  Lindbladian loss = optical_loss(0.1, p.space);

  auto run = [&](int lspp, bool strang) {
    PropagationConfig cfg;
    cfg.lindblad_steps_per_period = lspp;
    cfg.strang_splitting = strang;
    return propagate_lindblad(pat, in, loss, cfg).final_state.rho;
  };

  Matrix a1 = run(25, false), b1 = run(50, false), c1 = run(100, false);
  double e1 = (a1 - b1).cwiseAbs().maxCoeff();
  double e2 = (b1 - c1).cwiseAbs().maxCoeff();
  CHECK(e2 < e1);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.35));  // first-order splitting

  Matrix a2 = run(25, true), b2 = run(50, true), c2 = run(100, true);
  double s1 = (a2 - b2).cwiseAbs().maxCoeff();
  double s2 = (b2 - c2).cwiseAbs().maxCoeff();
  CHECK(s2 < s1);
  CHECK(s1 < e1);  // strang beats first order at equal resolution

  CHECK_THROWS_AS(
      propagate_lindblad(pat, pure_state(SpaceTag::Cavity, FockSpace{10, 1}, basis_vector(0, 10)),
                         loss, {}),
      SpaceMismatch);
}

TEST_CASE("lindblad without jumps matches the effective propagation") {
  SystemParams p = params_with(16, 8);
  DrivingPattern pat = build_pattern({4.0, 2.0}, p, 4.0);
  QuantumState in = composite_vacuum(p.space);

  PropagationConfig cfg;
  cfg.lindblad_steps_per_period = 40;
  SimulationResult lind = propagate_lindblad(pat, in, Lindbladian{}, cfg);
  SimulationResult eff = propagate_effective({4.0, 2.0}, p, in, 3);

  CHECK(lind.final_frame_phase == 0.0);
  CHECK(fidelity_fi(eff, lind) > 1.0 - 1e-8);
}
