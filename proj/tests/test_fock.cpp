#include <cmath>
#include <random>

#include "doctest.h"
#include "optoprep/fock.hpp"

using namespace optoprep;

TEST_CASE("ladder operators") {
  Operator a = annihilation(3);
  CHECK(a.mat(0, 1).real() == doctest::Approx(1.0));
  CHECK(a.mat(1, 2).real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(a.mat.cwiseAbs().sum() == doctest::Approx(1.0 + std::sqrt(2.0)));

  Operator a1 = annihilation(1);
  CHECK(a1.mat.cwiseAbs().maxCoeff() == 0.0);

  Operator ad = creation(4);
  Matrix n = ad.mat * annihilation(4).mat;
  for (int i = 0; i < 4; ++i) CHECK(n(i, i).real() == doctest::Approx(i));

  CHECK_THROWS_AS(annihilation(0), InvalidDimension);

  // [a, a+] = 1 away from the truncation edge
  Matrix comm = annihilation(8).mat * creation(8).mat - creation(8).mat * annihilation(8).mat;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      CHECK(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)) < 1e-14);
  CHECK(comm(7, 7).real() == doctest::Approx(-7.0));  // edge defect
}

TEST_CASE("tensor products") {
  Operator i2 = identity_op(2), i3 = identity_op(3, SpaceTag::Mech);
  Operator t = tensor(i2, i3);
  CHECK(t.dim() == 6);
  CHECK((t.mat - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);

  Operator nc = number_op(2);
  Operator nm = tensor(nc, identity_op(2, SpaceTag::Mech));
  Vector d = nm.mat.diagonal();
  CHECK(d(0).real() == 0.0);
  CHECK(d(1).real() == 0.0);
  CHECK(d(2).real() == 1.0);
  CHECK(d(3).real() == 1.0);

  // (a x I)(I x b) = a x b, against an element-by-element Kronecker build
  FockSpace s{3, 3};
  Operator a = annihilation(3), b = annihilation(3, SpaceTag::Mech);
  Matrix lhs = embed_cavity(a, s).mat * embed_mech(b, s).mat;
  Matrix rhs = tensor(a, b).mat;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(tensor(b, b), SpaceMismatch);
}

TEST_CASE("expm_apply") {
  // identity for H=0
  Operator zero = make_cavity_op(Matrix::Zero(5, 5));
  Vector v = basis_vector(3, 5);
  CHECK((expm_apply(zero, v, 2.7) - v).norm() < 1e-14);

  // eigenstate phase: H=n_c, |2>, t=pi -> e^{-2 pi i}|2> = |2>
  Operator n3 = number_op(3);
  Vector w = expm_apply(n3, basis_vector(2, 3), M_PI);
  CHECK((w - basis_vector(2, 3)).norm() < 1e-12);

  // oracle: dense eigendecomposition of a+a' at dim 40
  const int d = 40;
  Operator x = annihilation(d);
  x.mat = (x.mat + x.mat.adjoint()).eval();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  Vector r(d);
  for (int i = 0; i < d; ++i) r(i) = Complex(gauss(rng), gauss(rng));
  r /= r.norm();
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.mat);
  Vector phases(d);
  for (int i = 0; i < d; ++i) phases(i) = std::exp(Complex(0, -0.1 * es.eigenvalues()(i)));
  Vector expect = es.eigenvectors() * phases.asDiagonal() * (es.eigenvectors().adjoint() * r);
  Vector got = expm_apply(x, r, 0.1);
  CHECK((got - expect).norm() < 1e-8);
  CHECK(std::abs(got.norm() - 1.0) < 1e-10);

  // composition over steps equals a single long step on an eigenstate
  Vector once = expm_apply(n3, basis_vector(1, 3), 0.7);
  Vector twice = expm_apply(n3, expm_apply(n3, basis_vector(1, 3), 0.35), 0.35);
  CHECK((once - twice).norm() < 1e-12);

  // non-Hermitian rejection
  Operator bad = make_cavity_op(annihilation(4).mat);
  CHECK_THROWS_AS(expm_apply(bad, basis_vector(0, 4), 1.0), NumericsError);
}

TEST_CASE("krylov_expm on larger action") {
  // harmonic + drive on 120 dims, cross-checked against dense path
  const int d = 120;
  Matrix h = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) h(i, i) = i;
  for (int i = 0; i + 1 < d; ++i) {
    h(i, i + 1) = 0.5 * std::sqrt(i + 1.0);
    h(i + 1, i) = 0.5 * std::sqrt(i + 1.0);
  }
  Vector v = Vector::Zero(d);
  v(0) = 1.0;
  auto apply = [&h](const Vector& x, Vector& y) { y.noalias() = h * x; };
  Vector got = krylov_expm(apply, v, 1.3);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(d);
  for (int i = 0; i < d; ++i) phases(i) = std::exp(Complex(0, -1.3 * es.eigenvalues()(i)));
  Vector expect = es.eigenvectors() * phases.asDiagonal() * (es.eigenvectors().adjoint() * v);
  CHECK((got - expect).norm() < 1e-9);
}

TEST_CASE("partial trace") {
  FockSpace s{3, 2};
  // |2> x |0>
  Vector v = Vector::Zero(6);
  v(2 * 2 + 0) = 1.0;
  QuantumState st = pure_state(SpaceTag::Composite, s, v);
  QuantumState red = partial_trace_mech(st);
  CHECK(red.rho(2, 2).real() == doctest::Approx(1.0));
  CHECK(std::abs(red.rho.trace() - 1.0) < 1e-12);

  // (|0,0> + |1,1>)/sqrt2 -> diag(1/2, 1/2)
  Vector bell = Vector::Zero(6);
  bell(0) = bell(1 * 2 + 1) = 1.0 / std::sqrt(2.0);
  QuantumState red2 = partial_trace_mech(pure_state(SpaceTag::Composite, s, bell));
  CHECK(red2.rho(0, 0).real() == doctest::Approx(0.5));
  CHECK(red2.rho(1, 1).real() == doctest::Approx(0.5));
  CHECK(std::abs(red2.rho(0, 1)) < 1e-14);

  // random 4x3 pure state vs explicit double-sum oracle
  FockSpace s2{4, 3};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  Vector r(12);
  for (int i = 0; i < 12; ++i) r(i) = Complex(gauss(rng), gauss(rng));
  r /= r.norm();
  QuantumState red3 = partial_trace_mech(pure_state(SpaceTag::Composite, s2, r));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Complex acc = 0.0;
      for (int m = 0; m < 3; ++m) acc += r(i * 3 + m) * std::conj(r(j * 3 + m));
      CHECK(std::abs(red3.rho(i, j) - acc) < 1e-12);
    }

  // product input returns the cavity factor
  Matrix rho_c = Matrix::Zero(2, 2);
  rho_c(0, 0) = 0.25;
  rho_c(1, 1) = 0.75;
  Matrix rho_m = Matrix::Zero(2, 2);
  rho_m(0, 0) = 0.6;
  rho_m(1, 1) = 0.4;
  Operator rc = make_cavity_op(rho_c), rm = make_mech_op(rho_m);
  QuantumState prod = mixed_state(SpaceTag::Composite, FockSpace{2, 2}, tensor(rc, rm).mat);
  QuantumState redp = partial_trace_mech(prod);
  CHECK((redp.rho - rho_c).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(partial_trace_mech(pure_state(SpaceTag::Cavity, FockSpace{3, 1}, basis_vector(0, 3))),
                  SpaceMismatch);
}

TEST_CASE("fidelity") {
  FockSpace s{2, 1};
  QuantumState zero = pure_state(SpaceTag::Cavity, s, basis_vector(0, 2));
  QuantumState one = pure_state(SpaceTag::Cavity, s, basis_vector(1, 2));
  CHECK(fidelity(zero, zero) == doctest::Approx(1.0));
  CHECK(fidelity(zero, one) == doctest::Approx(0.0));

  // F(diag(1/2,1/2), |+>) = 1/sqrt2
  Matrix half = 0.5 * Matrix::Identity(2, 2);
  QuantumState mixed = mixed_state(SpaceTag::Cavity, s, half);
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(fidelity_pure_target(mixed, plus) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(fidelity(mixed, pure_state(SpaceTag::Cavity, s, plus)) ==
        doctest::Approx(1.0 / std::sqrt(2.0)));

  // symmetry and unitary invariance for mixed pairs
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  auto random_density = [&](int d) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
  };
  Matrix ra = random_density(4), rb = random_density(4);
  QuantumState qa = mixed_state(SpaceTag::Cavity, FockSpace{4, 1}, ra);
  QuantumState qb = mixed_state(SpaceTag::Cavity, FockSpace{4, 1}, rb);
  const double fab = fidelity(qa, qb);
  CHECK(fidelity(qb, qa) == doctest::Approx(fab).epsilon(1e-10));
  CHECK(fab > 0.0);
  CHECK(fab < 1.0);

  Matrix g(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix u = qr.householderQ();
  QuantumState qa2 = mixed_state(SpaceTag::Cavity, FockSpace{4, 1}, Matrix(u * ra * u.adjoint()));
  QuantumState qb2 = mixed_state(SpaceTag::Cavity, FockSpace{4, 1}, Matrix(u * rb * u.adjoint()));
  CHECK(fidelity(qa2, qb2) == doctest::Approx(fab).epsilon(1e-9));

  // mixed-form consistency with the pure form
  CHECK(fidelity(mixed, pure_state(SpaceTag::Cavity, s, plus)) ==
        doctest::Approx(fidelity_pure_target(mixed, plus)).epsilon(1e-10));
}

TEST_CASE("thermal state") {
  double deficit = -1.0;
  QuantumState t0 = thermal_state(0.0, 5, SpaceTag::Mech, &deficit);
  CHECK(t0.rho(0, 0).real() == doctest::Approx(1.0));
  CHECK(deficit == doctest::Approx(0.0));

  QuantumState t1 = thermal_state(1.0, 60, SpaceTag::Mech);
  CHECK(t1.rho(0, 0).real() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(t1.rho(1, 1).real() == doctest::Approx(0.25).epsilon(1e-9));

  QuantumState t05 = thermal_state(0.5, 15, SpaceTag::Mech, &deficit);
  double mean = 0.0;
  for (int n = 0; n < 15; ++n) mean += n * t05.rho(n, n).real();
  CHECK(std::abs(mean - 0.5) < 1e-4);
  CHECK(std::abs(t05.rho.trace().real() - 1.0) < 1e-12);

  CHECK_THROWS_AS(thermal_state(-0.1, 5), InvalidParameter);
}
