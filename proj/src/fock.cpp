#include "optoprep/fock.hpp"

#include <cmath>
#include <vector>

namespace optoprep {

void validate(const FockSpace& s) {
  if (s.cavity_dim < 1 || s.mech_dim < 1)
    throw InvalidDimension("FockSpace dimensions must be >= 1");
}

double Operator::hermiticity_defect() const {
  double scale = mat.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (mat - mat.adjoint()).cwiseAbs().maxCoeff() / scale;
}

Operator make_cavity_op(Matrix m) {
  if (m.rows() != m.cols()) throw InvalidDimension("operator matrix must be square");
  FockSpace s{static_cast<int>(m.rows()), 1};
  return {SpaceTag::Cavity, s, std::move(m)};
}

Operator make_mech_op(Matrix m) {
  if (m.rows() != m.cols()) throw InvalidDimension("operator matrix must be square");
  FockSpace s{1, static_cast<int>(m.rows())};
  return {SpaceTag::Mech, s, std::move(m)};
}

Operator make_composite_op(Matrix m, const FockSpace& s) {
  validate(s);
  if (m.rows() != m.cols() || m.rows() != s.composite_dim())
    throw InvalidDimension("composite matrix does not match cavity_dim*mech_dim");
  return {SpaceTag::Composite, s, std::move(m)};
}

QuantumState pure_state(SpaceTag tag, const FockSpace& space, Vector v) {
  QuantumState st;
  st.tag = tag;
  st.space = space;
  st.pure = true;
  st.vec = std::move(v);
  return st;
}

QuantumState mixed_state(SpaceTag tag, const FockSpace& space, Matrix rho) {
  QuantumState st;
  st.tag = tag;
  st.space = space;
  st.pure = false;
  st.rho = std::move(rho);
  return st;
}

Vector basis_vector(int n, int dim) {
  if (n < 0 || n >= dim) throw InvalidDimension("basis index outside truncation");
  Vector v = Vector::Zero(dim);
  v(n) = 1.0;
  return v;
}

Operator annihilation(int dim, SpaceTag tag) {
  if (dim < 1) throw InvalidDimension("annihilation: dim must be >= 1");
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return tag == SpaceTag::Mech ? make_mech_op(std::move(m)) : make_cavity_op(std::move(m));
}

Operator creation(int dim, SpaceTag tag) {
  Operator a = annihilation(dim, tag);
  a.mat = a.mat.adjoint().eval();
  return a;
}

Operator number_op(int dim, SpaceTag tag) {
  if (dim < 1) throw InvalidDimension("number_op: dim must be >= 1");
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
  return tag == SpaceTag::Mech ? make_mech_op(std::move(m)) : make_cavity_op(std::move(m));
}

Operator identity_op(int dim, SpaceTag tag) {
  if (dim < 1) throw InvalidDimension("identity_op: dim must be >= 1");
  Matrix m = Matrix::Identity(dim, dim);
  return tag == SpaceTag::Mech ? make_mech_op(std::move(m)) : make_cavity_op(std::move(m));
}

Operator tensor(const Operator& a, const Operator& b) {
  if (a.tag != SpaceTag::Cavity || b.tag != SpaceTag::Mech)
    throw SpaceMismatch("tensor expects (cavity, mech) operands");
  const int da = a.dim(), db = b.dim();
  Matrix out(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.mat(i, j) * b.mat;
  FockSpace s{da, db};
  return {SpaceTag::Composite, s, std::move(out)};
}

Operator embed_cavity(const Operator& a, const FockSpace& s) {
  if (a.tag != SpaceTag::Cavity) throw SpaceMismatch("embed_cavity expects a cavity operator");
  if (a.dim() != s.cavity_dim) throw InvalidDimension("embed_cavity: dimension mismatch");
  return tensor(a, identity_op(s.mech_dim, SpaceTag::Mech));
}

Operator embed_mech(const Operator& b, const FockSpace& s) {
  if (b.tag != SpaceTag::Mech) throw SpaceMismatch("embed_mech expects a mech operator");
  if (b.dim() != s.mech_dim) throw InvalidDimension("embed_mech: dimension mismatch");
  return tensor(identity_op(s.cavity_dim, SpaceTag::Cavity), b);
}

// Lanczos with full reorthogonalization.  The small tridiagonal problem is
// diagonalized exactly, so the error estimate beta_j * |u_j| is the usual
// last-component residual; the step is split in time when it stalls.
Vector krylov_expm(const MatrixAction& apply, const Vector& v, double t, double tol, int m_max) {
  const double beta0 = v.norm();
  if (beta0 == 0.0 || t == 0.0) return v;
  const int n = static_cast<int>(v.size());
  m_max = std::min(m_max, n);

  Eigen::MatrixXcd basis(n, m_max);
  std::vector<double> alpha, offdiag;
  basis.col(0) = v / beta0;
  Vector w(n);

  auto small_exp = [&](int m) -> Vector {
    RealMatrix tmat = RealMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tmat(i, i) = alpha[i];
      if (i + 1 < m) tmat(i, i + 1) = tmat(i + 1, i) = offdiag[i];
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(tmat);
    Vector phases(m);
    for (int i = 0; i < m; ++i)
      phases(i) = std::exp(Complex(0.0, -t * es.eigenvalues()(i)));
    RealVector e1 = es.eigenvectors().row(0).transpose();
    Vector u(m);
    for (int i = 0; i < m; ++i) {
      Complex acc = 0.0;
      for (int j = 0; j < m; ++j) acc += es.eigenvectors()(i, j) * phases(j) * e1(j);
      u(i) = acc;
    }
    return u;
  };

  int m = 0;
  bool converged = false;
  Vector u;
  while (m < m_max) {
    apply(basis.col(m), w);
    if (m > 0) w -= offdiag[m - 1] * basis.col(m - 1);
    const double a = std::real(basis.col(m).dot(w));
    alpha.push_back(a);
    w -= a * basis.col(m);
    // full reorthogonalization keeps the basis usable at 1e-14 level
    for (int i = 0; i <= m; ++i) w -= basis.col(i).dot(w) * basis.col(i);
    const double b = w.norm();
    ++m;
    u = small_exp(m);
    if (b < 1e-14) { converged = true; break; }  // happy breakdown
    const double err = b * std::abs(u(m - 1)) * std::abs(t);
    if (err < tol) { converged = true; break; }
    if (m < m_max) {
      offdiag.push_back(b);
      basis.col(m) = w / b;
    }
  }

  if (!converged) {
    // residual too large for this Krylov size: halve the step
    Vector half = krylov_expm(apply, v, t / 2.0, tol / 2.0, m_max);
    return krylov_expm(apply, half, t / 2.0, tol / 2.0, m_max);
  }
  return beta0 * (basis.leftCols(m) * u);
}

Vector expm_apply(const Operator& h, const Vector& v, double t, double tol) {
  if (h.dim() != v.size()) throw SpaceMismatch("expm_apply: operator/state dimension mismatch");
  if (!h.is_hermitian())
    throw NumericsError("expm_apply: input is not Hermitian within tolerance");
  const Matrix& m = h.mat;
  auto apply = [&m](const Vector& x, Vector& y) { y.noalias() = m * x; };
  return krylov_expm(apply, v, t, tol);
}

QuantumState partial_trace_mech(const QuantumState& state) {
  if (state.tag != SpaceTag::Composite)
    throw SpaceMismatch("partial_trace_mech expects a composite state");
  const int C = state.space.cavity_dim, M = state.space.mech_dim;
  Matrix out = Matrix::Zero(C, C);
  if (state.pure) {
    for (int i = 0; i < C; ++i)
      for (int j = 0; j < C; ++j) {
        Complex acc = 0.0;
        for (int m = 0; m < M; ++m) acc += state.vec(i * M + m) * std::conj(state.vec(j * M + m));
        out(i, j) = acc;
      }
  } else {
    for (int i = 0; i < C; ++i)
      for (int j = 0; j < C; ++j) {
        Complex acc = 0.0;
        for (int m = 0; m < M; ++m) acc += state.rho(i * M + m, j * M + m);
        out(i, j) = acc;
      }
  }
  FockSpace s{C, 1};
  return mixed_state(SpaceTag::Cavity, s, std::move(out));
}

namespace {

Matrix hermitian_sqrt(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  RealVector ev = es.eigenvalues();
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (int i = 0; i < ev.size(); ++i) {
    const double lam = std::max(ev(i), 0.0);  // clamp round-off negatives
    out += std::sqrt(lam) * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return out;
}

}  // namespace

double fidelity_pure_target(const QuantumState& rho, const Vector& target) {
  if (rho.dim() != target.size()) throw SpaceMismatch("fidelity: dimension mismatch");
  if (rho.pure) return std::abs(rho.vec.dot(target));
  const Complex q = target.dot(rho.rho * target);  // <psi|rho|psi>
  return std::sqrt(std::max(0.0, std::real(q)));
}

double fidelity(const QuantumState& a, const QuantumState& b) {
  if (a.dim() != b.dim()) throw SpaceMismatch("fidelity: dimension mismatch");
  if (a.pure) return fidelity_pure_target(b, a.vec);
  if (b.pure) return fidelity_pure_target(a, b.vec);
  const Matrix sq = hermitian_sqrt(a.rho);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(sq * b.rho * sq));
  double f = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    f += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return std::min(f, 1.0 + 1e-12);
}

QuantumState thermal_state(double nbar, int dim, SpaceTag tag, double* deficit) {
  if (nbar < 0.0) throw InvalidParameter("thermal_state: nbar must be >= 0");
  if (dim < 1) throw InvalidDimension("thermal_state: dim must be >= 1");
  Matrix rho = Matrix::Zero(dim, dim);
  double total = 0.0;
  const double r = nbar / (1.0 + nbar);
  for (int n = 0; n < dim; ++n) {
    const double p = std::pow(r, n) / (1.0 + nbar);
    rho(n, n) = p;
    total += p;
  }
  if (deficit) *deficit = 1.0 - total;
  rho /= total;
  FockSpace s = tag == SpaceTag::Mech ? FockSpace{1, dim} : FockSpace{dim, 1};
  return mixed_state(tag, s, std::move(rho));
}

}  // namespace optoprep
