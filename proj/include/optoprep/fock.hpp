#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace optoprep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex I_UNIT{0.0, 1.0};
inline constexpr double HERMITIAN_TOL = 1e-10;  // relative to max |entry|

// Error taxonomy. Everything thrown by the library is one of these.
struct InvalidDimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SpaceMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConstraintViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FockSpace {
  int cavity_dim = 60;
  int mech_dim = 15;
  int composite_dim() const { return cavity_dim * mech_dim; }
};
void validate(const FockSpace& s);

enum class SpaceTag { Cavity, Mech, Composite };

// Dense operator on a truncated Fock space.  Composite matrices use a
// cavity-major index: row = cavity * mech_dim + mech.
struct Operator {
  SpaceTag tag = SpaceTag::Cavity;
  FockSpace space;  // cavity-only: {d,1}; mech-only: {1,d}; composite: {C,M}
  Matrix mat;

  int dim() const { return static_cast<int>(mat.rows()); }
  Operator dagger() const { return {tag, space, mat.adjoint()}; }
  double hermiticity_defect() const;
  bool is_hermitian(double tol = HERMITIAN_TOL) const {
    return hermiticity_defect() <= tol;
  }
};

Operator make_cavity_op(Matrix m);
Operator make_mech_op(Matrix m);
Operator make_composite_op(Matrix m, const FockSpace& s);

struct QuantumState {
  SpaceTag tag = SpaceTag::Cavity;
  FockSpace space;
  bool pure = true;
  Vector vec;  // pure representation
  Matrix rho;  // mixed representation

  int dim() const { return pure ? static_cast<int>(vec.size()) : static_cast<int>(rho.rows()); }
  Matrix density() const { return pure ? Matrix(vec * vec.adjoint()) : rho; }
};

QuantumState pure_state(SpaceTag tag, const FockSpace& space, Vector v);
QuantumState mixed_state(SpaceTag tag, const FockSpace& space, Matrix rho);
// |n> on a single mode
Vector basis_vector(int n, int dim);

// Ladder operators: <n-1|a|n> = sqrt(n)
Operator annihilation(int dim, SpaceTag tag = SpaceTag::Cavity);
Operator creation(int dim, SpaceTag tag = SpaceTag::Cavity);
Operator number_op(int dim, SpaceTag tag = SpaceTag::Cavity);
Operator identity_op(int dim, SpaceTag tag = SpaceTag::Cavity);

// Kronecker product; A must be cavity-tagged, B mech-tagged.
Operator tensor(const Operator& a, const Operator& b);
// A (x) I_mech and I_cavity (x) B paddings onto a composite space.
Operator embed_cavity(const Operator& a, const FockSpace& s);
Operator embed_mech(const Operator& b, const FockSpace& s);

// exp(-i H t) v through a Lanczos (Krylov) expansion of the matrix action.
// H must be Hermitian within HERMITIAN_TOL; never forms the dense exponential.
Vector expm_apply(const Operator& h, const Vector& v, double t, double tol = 1e-12);

// Same kernel for a matrix-free Hermitian action y = A x.
using MatrixAction = std::function<void(const Vector&, Vector&)>;
Vector krylov_expm(const MatrixAction& apply, const Vector& v, double t,
                   double tol = 1e-12, int m_max = 48);

// Trace over the mechanical mode of a composite state (pure inputs are
// promoted); returns a cavity-only density matrix.
QuantumState partial_trace_mech(const QuantumState& state);

// Uhlmann fidelity; reduces to sqrt(<psi|rho|psi>) against pure arguments and
// |<psi|phi>| for two pure states.
double fidelity(const QuantumState& a, const QuantumState& b);
double fidelity_pure_target(const QuantumState& rho, const Vector& target);

// Bose-Einstein diagonal state, renormalized after truncation.  The weight
// lost to truncation is written to *deficit when given.
QuantumState thermal_state(double nbar, int dim, SpaceTag tag = SpaceTag::Mech,
                           double* deficit = nullptr);

}  // namespace optoprep
