#pragma once

// One- and two-qubit polarization algebra.
//
// Basis conventions used throughout the library:
//   single qubit: index 0 = h, index 1 = v
//   two qubits:   index 2*i1 + i2, i.e. {hh, hv, vh, vv}, party 1 is the
//                 left tensor factor (the lower arm carrying the coverslip).
// Angles are polarizer angles in degrees; |theta> = cos(theta)|h> + sin(theta)|v>.

#include <complex>

#include <Eigen/Dense>

namespace lgsim {

using Complex = std::complex<double>;
using QubitOperator = Eigen::Matrix2cd;
using TwoQubitOperator = Eigen::Matrix4cd;
using Ket2 = Eigen::Vector2cd;
using Ket4 = Eigen::Vector4cd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-10;
inline constexpr double kNormTol = 1e-12;
/// Hermiticity corrections larger than this are reported when a user matrix
/// is symmetrized.
inline constexpr double kSymmetrizeWarnTol = 1e-8;

enum class Party { first = 1, second = 2 };

/// Largest |m_ij - conj(m_ji)|.
double hermiticity_defect(const Eigen::MatrixXcd& m);
bool is_hermitian(const QubitOperator& m, double tol = kHermitianTol);
bool is_projector(const QubitOperator& m, double tol = kHermitianTol);
/// Hermitian with eigenvalues exactly {+1, -1}.
bool is_dichotomic_observable(const QubitOperator& m, double tol = kHermitianTol);

/// cos and sin of an angle in degrees, exact at multiples of 90 degrees.
struct CosSin {
    double cos;
    double sin;
};
CosSin cos_sin_degrees(double degrees);

Ket2 ket_h();
Ket2 ket_v();
Ket2 ket_theta(double theta_deg);
Ket2 ket_a(); // diagonal, (h + v)/sqrt2
Ket2 ket_d(); // antidiagonal, (h - v)/sqrt2
Ket2 ket_r(); // (h + i v)/sqrt2
Ket2 ket_l(); // (h - i v)/sqrt2

QubitOperator identity2();
QubitOperator sigma_x();
QubitOperator sigma_y();
QubitOperator sigma_z();
QubitOperator projector(const Ket2& ket);

/// sigma_theta = |theta><theta| - |theta_perp><theta_perp|
///             = cos(2 theta) sigma_z + sin(2 theta) sigma_x.
QubitOperator stokes_theta(double theta_deg);

/// Kronecker product, `a` acts on party 1.
TwoQubitOperator tensor(const QubitOperator& a, const QubitOperator& b);
Ket4 tensor(const Ket2& a, const Ket2& b);

/// `op` acting on one party, identity on the other.
TwoQubitOperator embed(const QubitOperator& op, Party party);

/// A normalized state vector of one or two qubits.
class PureState {
  public:
    /// Throws InvalidState unless the length is 2 or 4 and the norm is 1.
    explicit PureState(Eigen::VectorXcd amplitudes);

    const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
    Eigen::Index dimension() const noexcept { return amplitudes_.size(); }
    Eigen::MatrixXcd density() const;

  private:
    Eigen::VectorXcd amplitudes_;
};

/// A validated 4x4 density operator. Immutable.
class TwoQubitState {
  public:
    /// Validates Hermiticity (1e-12), unit trace (1e-10) and positivity
    /// (smallest eigenvalue >= -1e-10). Throws InvalidState otherwise.
    static TwoQubitState from_matrix(const TwoQubitOperator& m);

    /// Symmetrizes H <- (H + H^dagger)/2 before validating. The size of the
    /// correction (max entry change) is written to `correction` if non-null.
    static TwoQubitState from_user_matrix(const TwoQubitOperator& m, double* correction = nullptr);

    static TwoQubitState from_pure(const PureState& psi);
    static TwoQubitState product(const QubitOperator& rho1, const QubitOperator& rho2);
    static TwoQubitState maximally_mixed();

    const TwoQubitOperator& matrix() const noexcept { return rho_; }
    double expectation(const TwoQubitOperator& op) const;

  private:
    explicit TwoQubitState(TwoQubitOperator m) : rho_(std::move(m)) {}
    TwoQubitOperator rho_;
};

enum class IdealState { psi, psi_double_prime };

/// The two reference states of the experiment:
///   psi    = (|hv> + i|vh>)/sqrt2
///   psi''  = (|ha> + i|vd>)/sqrt2   (psi after a 45 degree rotation of the
///                                    coverslip photon)
/// The kets above list the upper-arm photon first. Since party 1 is the
/// coverslip (lower-arm) photon and sits on the left here, the returned
/// matrices are those of (|vh> + i|hv>)/sqrt2 and (|ah> + i|dv>)/sqrt2.
TwoQubitState ideal_state(IdealState which);

/// Reduced state of the party `keep`.
QubitOperator partial_trace(const TwoQubitOperator& rho, Party keep);
inline QubitOperator partial_trace(const TwoQubitState& rho, Party keep) {
    return partial_trace(rho.matrix(), keep);
}

} // namespace lgsim
