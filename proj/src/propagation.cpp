#include "optoprep/propagation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>

namespace optoprep {

namespace {

// Structured matvec for the driven composite Hamiltonian; avoids building the
// 900x900 matrix at every step.  Index layout: i = n * mech_dim + m.
struct DrivenAction {
  int cd = 0, md = 0;
  double omega_m = 1.0, g0 = 0.0;
  double omega_c = 0.0;  // nonzero only in the lab frame
  Complex drive{0.0, 0.0};
  std::vector<double> sq;  // sq[j] = sqrt(j)

  void operator()(const Vector& v, Vector& out) const {
    out.resize(v.size());
    for (int n = 0; n < cd; ++n) {
      const int base = n * md;
      for (int m = 0; m < md; ++m) {
        const int i = base + m;
        Complex acc = (omega_m * m + omega_c * n) * v[i];
        Complex mech{0.0, 0.0};
        if (m + 1 < md) mech += sq[m + 1] * v[i + 1];  // b
        if (m > 0) mech += sq[m] * v[i - 1];           // b'
        acc -= g0 * static_cast<double>(n) * mech;
        if (drive != Complex(0.0, 0.0)) {
          if (n > 0) acc += drive * sq[n] * v[i - md];                   // d a'
          if (n + 1 < cd) acc += std::conj(drive) * sq[n + 1] * v[i + md];  // d* a
        }
        out[i] = acc;
      }
    }
  }
};

std::vector<double> sqrt_table(int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = std::sqrt(static_cast<double>(i));
  return t;
}

std::vector<double> cavity_populations_of(const Vector& v, const FockSpace& s) {
  std::vector<double> pops(s.cavity_dim, 0.0);
  for (int n = 0; n < s.cavity_dim; ++n) {
    double p = 0.0;
    for (int m = 0; m < s.mech_dim; ++m) p += std::norm(v[n * s.mech_dim + m]);
    pops[n] = p;
  }
  return pops;
}

std::vector<double> cavity_populations_of(const Matrix& rho, const FockSpace& s) {
  std::vector<double> pops(s.cavity_dim, 0.0);
  for (int n = 0; n < s.cavity_dim; ++n) {
    double p = 0.0;
    for (int m = 0; m < s.mech_dim; ++m) {
      const int i = n * s.mech_dim + m;
      p += std::real(rho(i, i));
    }
    pops[n] = p;
  }
  return pops;
}

double mech_edge_population(const Vector& v, const FockSpace& s) {
  if (s.mech_dim < 3) return 0.0;
  double p = 0.0;
  for (int n = 0; n < s.cavity_dim; ++n)
    for (int m = s.mech_dim - 2; m < s.mech_dim; ++m) p += std::norm(v[n * s.mech_dim + m]);
  return p;
}

double edge_sum(const std::vector<double>& pops) {
  const int d = static_cast<int>(pops.size());
  if (d < 3) return 0.0;
  return pops[d - 2] + pops[d - 1];
}

// Snapshot recorder shared by the propagators: records at t=0, every stride,
// every block boundary, and the final time.
struct Recorder {
  SimulationResult* result;
  const FockSpace* space;
  double stride;
  double leakage_threshold;
  double next_stride = -1.0;

  void maybe_record(double t, const std::vector<double>& pops, double mech_edge, bool force) {
    bool due = force;
    if (stride > 0.0) {
      if (next_stride < 0.0) next_stride = stride;
      if (t >= next_stride - 1e-9) {
        due = true;
        while (t >= next_stride - 1e-9) next_stride += stride;
      }
    }
    if (!due) return;
    if (!result->snapshots.empty() &&
        std::abs(result->snapshots.back().time - t) < 1e-9)
      return;
    result->snapshots.push_back({t, pops});
    const double ce = edge_sum(pops);
    result->max_cavity_edge_population = std::max(result->max_cavity_edge_population, ce);
    result->max_mech_edge_population = std::max(result->max_mech_edge_population, mech_edge);
    if (ce > leakage_threshold || mech_edge > leakage_threshold) result->leakage_warning = true;
  }
};

}  // namespace

SimulationResult propagate_exact(const DrivingPattern& pattern, const QuantumState& initial,
                                 const PropagationConfig& config) {
  const SystemParams& sys = pattern.params;
  validate(sys);
  if (initial.space.composite_dim() != sys.space.composite_dim() ||
      initial.tag != SpaceTag::Composite)
    throw SpaceMismatch("exact propagation needs a composite initial state");
  if (!initial.pure)
    throw InvalidParameter("exact propagation acts on pure states");
  if (config.steps_per_period < 100)
    throw InvalidParameter("steps_per_period must be at least 100");

  const FockSpace& s = sys.space;
  Vector v = initial.vec;

  DrivenAction act;
  act.cd = s.cavity_dim;
  act.md = s.mech_dim;
  act.omega_m = sys.omega_m;
  act.g0 = sys.g0();
  act.omega_c = config.frame == Frame::Lab ? sys.omega_c() : 0.0;
  act.sq = sqrt_table(std::max(s.cavity_dim, s.mech_dim));

  SimulationResult result;
  Recorder rec{&result, &s, config.record_stride, config.leakage_threshold};
  rec.maybe_record(0.0, cavity_populations_of(v, s), mech_edge_population(v, s), true);

  const auto pulses = pattern.pulses();
  const double period = sys.period();
  double t = 0.0;
  for (const auto& seg : pattern.segments) {
    const int steps =
        std::max(1, static_cast<int>(std::lround(config.steps_per_period * seg.duration)));
    const double dt = seg.duration / steps;
    for (int j = 0; j < steps; ++j) {
      const double t_mid = seg.t_start + (j + 0.5) * dt;
      Complex d{0.0, 0.0};
      for (const auto& p : pulses) {
        d = drive_value(p, t_mid, sys, config.frame);
        if (d != Complex(0.0, 0.0)) break;
      }
      act.drive = d;
      v = krylov_expm([&act](const Vector& x, Vector& y) { act(x, y); }, v, dt * period,
                      config.krylov_tol);
      t = seg.t_start + (j + 1) * dt;
      const bool at_block = std::abs(std::remainder(t, 5.0)) < 1e-9;
      const bool at_end = (&seg == &pattern.segments.back()) && j == steps - 1;
      rec.maybe_record(t, cavity_populations_of(v, s), mech_edge_population(v, s),
                       at_block || at_end);
    }
  }

  result.norm_defect = std::abs(1.0 - v.norm());
  result.final_state = pure_state(SpaceTag::Composite, s, v);
  result.final_frame_phase = pattern.ledger.final_phase();
  return result;
}

SimulationResult propagate_effective(const std::vector<double>& block_amplitudes,
                                     const SystemParams& params, const QuantumState& initial,
                                     int order, const PropagationConfig& config) {
  validate(params);
  if (order != 2 && order != 3) throw InvalidParameter("order must be 2 or 3");
  if (!initial.pure) throw InvalidParameter("effective propagation acts on pure states");

  SimulationResult result;
  Recorder rec{&result, &params.space, -1.0, config.leakage_threshold};
  const double period = params.period();
  // The effective generators live in the ramped frame already; only the exact
  // propagation carries the closing e^{i phi n_c} factor to undo.
  result.final_frame_phase = 0.0;

  if (order == 2) {
    if (initial.tag != SpaceTag::Cavity)
      throw ConstraintViolation("order-2 effective propagation is cavity-only");
    const int d = params.space.cavity_dim;
    if (initial.dim() != d) throw SpaceMismatch("initial state dimension mismatch");

    // H is real symmetric in the Fock basis; a real eigensolver halves the
    // cost of the per-block exponential.
    Eigen::MatrixXd a2(d, d);
    Eigen::VectorXd diag_n2(d);
    a2.setZero();
    for (int n = 0; n + 2 < d; ++n) a2(n, n + 2) = std::sqrt((n + 1.0) * (n + 2.0));
    for (int n = 0; n < d; ++n) diag_n2(n) = static_cast<double>(n) * n;

    Vector v = initial.vec;
    std::vector<double> mech_zero;
    rec.maybe_record(0.0, [&] {
      std::vector<double> p(d);
      for (int n = 0; n < d; ++n) p[n] = std::norm(v[n]);
      return p;
    }(), 0.0, true);

    double t = 0.0;
    const double k2 = params.k * params.k;
    for (double eta : block_amplitudes) {
      Eigen::MatrixXd h = (2.0 / 3.0) * eta * eta * (a2 + a2.transpose());
      h -= 5.0 * diag_n2.asDiagonal();
      h *= params.omega_m * k2;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      if (es.info() != Eigen::Success) throw NumericsError("block eigendecomposition failed");
      Vector w = es.eigenvectors().transpose() * v;
      for (int n = 0; n < d; ++n)
        w[n] *= std::exp(Complex(0.0, -es.eigenvalues()(n) * period));
      v = es.eigenvectors() * w;
      t += 5.0;
      std::vector<double> p(d);
      for (int n = 0; n < d; ++n) p[n] = std::norm(v[n]);
      rec.maybe_record(t, p, 0.0, true);
    }
    result.norm_defect = std::abs(1.0 - v.norm());
    result.final_state = pure_state(SpaceTag::Cavity, FockSpace{d, 1}, v);
    return result;
  }

  if (initial.tag != SpaceTag::Composite)
    throw SpaceMismatch("order-3 effective propagation needs a composite state");
  const FockSpace& s = params.space;
  Vector v = initial.vec;
  rec.maybe_record(0.0, cavity_populations_of(v, s), mech_edge_population(v, s), true);
  double t = 0.0;
  for (double eta : block_amplitudes) {
    const EffectiveBlock blk = block_effective_hamiltonian(eta, params, 3);
    const Eigen::SparseMatrix<Complex> h = blk.h.mat.sparseView(1e-300, 1e-18);
    v = krylov_expm(
        [&h](const Vector& x, Vector& y) { y.noalias() = h * x; }, v,
        blk.generator_duration, config.krylov_tol);
    t += 5.0;
    rec.maybe_record(t, cavity_populations_of(v, s), mech_edge_population(v, s), true);
  }
  result.norm_defect = std::abs(1.0 - v.norm());
  result.final_state = pure_state(SpaceTag::Composite, s, v);
  return result;
}

namespace {

// One RK4 step of rho' = L(rho) for the dissipative part alone.
template <typename F>
Matrix rk4_step(const F& l, const Matrix& rho, double dt) {
  Matrix k1 = l(rho);
  Matrix k2 = l(rho + 0.5 * dt * k1);
  Matrix k3 = l(rho + 0.5 * dt * k2);
  Matrix k4 = l(rho + dt * k3);
  return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

SimulationResult propagate_lindblad(const DrivingPattern& pattern, const QuantumState& initial,
                                    const Lindbladian& lind, const PropagationConfig& config) {
  const SystemParams& sys = pattern.params;
  validate(sys);
  const FockSpace& s = sys.space;
  if (initial.tag != SpaceTag::Composite)
    throw SpaceMismatch("dissipative propagation needs a composite state");
  if (initial.space.composite_dim() != s.composite_dim())
    throw SpaceMismatch("initial state dimension mismatch");

  Matrix rho = initial.density();
  const int dim = s.composite_dim();

  // Sparse jump operators keep the dissipator at O(d^2) per application.
  struct SparseJump {
    double rate;
    Eigen::SparseMatrix<Complex> a, adag, anticomm;  // anticomm = a' a
  };
  std::vector<SparseJump> jumps;
  for (const auto& j : lind.jump_terms) {
    if (j.rate <= 0.0) continue;
    if (j.op.mat.rows() != dim) throw SpaceMismatch("jump operator dimension mismatch");
    SparseJump sj;
    sj.rate = j.rate;
    sj.a = j.op.mat.sparseView(1e-300, 1e-18);
    sj.adag = Matrix(j.op.mat.adjoint()).sparseView(1e-300, 1e-18);
    sj.anticomm = Matrix(j.op.mat.adjoint() * j.op.mat).sparseView(1e-300, 1e-18);
    jumps.push_back(std::move(sj));
  }

  auto dissipate = [&jumps](const Matrix& r) {
    Matrix out = Matrix::Zero(r.rows(), r.cols());
    for (const auto& j : jumps) {
      out.noalias() += j.rate * Matrix(j.a * r * j.adag);
      Matrix m = j.anticomm * r;
      out.noalias() -= (0.5 * j.rate) * m;
      out.noalias() -= (0.5 * j.rate) * m.adjoint();
    }
    return out;
  };

  SimulationResult result;
  Recorder rec{&result, &s, config.record_stride, config.leakage_threshold};
  {
    auto pops = cavity_populations_of(rho, s);
    rec.maybe_record(0.0, pops, 0.0, true);
  }

  const double period = sys.period();
  const int lspp = std::max(1, config.lindblad_steps_per_period);
  double t = 0.0;
  // Block unitaries are the ramped-frame effective ones; no closing frame
  // factor accumulates here.
  result.final_frame_phase = 0.0;

  for (size_t b = 0; b < pattern.block_amplitudes.size(); ++b) {
    const EffectiveBlock blk = block_effective_hamiltonian(pattern.block_amplitudes[b], sys, 3);
    // The block generator acts for T while the block spans 5T, so the
    // per-step unitary uses dt scaled by span/generator_duration.
    const int steps = 5 * lspp;
    const double dt_gen = blk.generator_duration / steps;
    const double dt_abs = 5.0 * period / steps;
    const Matrix u = hermitian_phase_exp(blk.h.mat, dt_gen);
    for (int step = 0; step < steps; ++step) {
      if (!jumps.empty()) {
        if (config.strang_splitting) {
          rho = rk4_step(dissipate, rho, 0.5 * dt_abs);
          rho = u * rho * u.adjoint();
          rho = rk4_step(dissipate, rho, 0.5 * dt_abs);
        } else {
          rho = u * rho * u.adjoint();
          rho = rk4_step(dissipate, rho, dt_abs);
        }
      } else {
        rho = u * rho * u.adjoint();
      }
    }
    rho = 0.5 * (rho + rho.adjoint().eval());
    const double tr = rho.trace().real();
    result.norm_defect = std::max(result.norm_defect, std::abs(1.0 - tr));
    if (result.norm_defect > 1e-4) throw NumericsError("trace drift beyond tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8) result.positivity_warning = true;
    t += 5.0;
    auto pops = cavity_populations_of(rho, s);
    double mech_edge = 0.0;
    if (s.mech_dim >= 3)
      for (int n = 0; n < s.cavity_dim; ++n)
        for (int m = s.mech_dim - 2; m < s.mech_dim; ++m)
          mech_edge += std::real(rho(n * s.mech_dim + m, n * s.mech_dim + m));
    rec.maybe_record(t, pops, mech_edge, b + 1 == pattern.block_amplitudes.size());
  }

  result.final_state = mixed_state(SpaceTag::Composite, s, rho);
  return result;
}

}  // namespace optoprep
