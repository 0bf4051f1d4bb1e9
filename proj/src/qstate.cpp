#include "lgsim/qstate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lgsim/error.hpp"

namespace lgsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
const Complex kI{0.0, 1.0};

} // namespace

double hermiticity_defect(const Eigen::MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const QubitOperator& m, double tol) {
    return hermiticity_defect(m) <= tol;
}

bool is_projector(const QubitOperator& m, double tol) {
    if (!is_hermitian(m, tol)) {
        return false;
    }
    if ((m * m - m).cwiseAbs().maxCoeff() > tol) {
        return false;
    }
    return std::abs(m.trace() - Complex{1.0, 0.0}) <= tol;
}

bool is_dichotomic_observable(const QubitOperator& m, double tol) {
    if (!is_hermitian(m, tol)) {
        return false;
    }
    // O^2 = I and trace 0 <=> eigenvalues {+1, -1}.
    if ((m * m - identity2()).cwiseAbs().maxCoeff() > tol) {
        return false;
    }
    return std::abs(m.trace()) <= tol;
}

CosSin cos_sin_degrees(double degrees) {
    double r = std::fmod(degrees, 360.0);
    if (r < 0.0) {
        r += 360.0;
    }
    if (r == 0.0) return {1.0, 0.0};
    if (r == 90.0) return {0.0, 1.0};
    if (r == 180.0) return {-1.0, 0.0};
    if (r == 270.0) return {0.0, -1.0};
    const double rad = r * std::numbers::pi / 180.0;
    return {std::cos(rad), std::sin(rad)};
}

Ket2 ket_h() { return Ket2{1.0, 0.0}; }
Ket2 ket_v() { return Ket2{0.0, 1.0}; }

Ket2 ket_theta(double theta_deg) {
    const auto cs = cos_sin_degrees(theta_deg);
    return Ket2{cs.cos, cs.sin};
}

Ket2 ket_a() { return Ket2{kInvSqrt2, kInvSqrt2}; }
Ket2 ket_d() { return Ket2{kInvSqrt2, -kInvSqrt2}; }
Ket2 ket_r() { return Ket2{Complex{kInvSqrt2, 0.0}, kI * kInvSqrt2}; }
Ket2 ket_l() { return Ket2{Complex{kInvSqrt2, 0.0}, -kI * kInvSqrt2}; }

QubitOperator identity2() { return QubitOperator::Identity(); }

QubitOperator sigma_x() {
    QubitOperator m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

QubitOperator sigma_y() {
    QubitOperator m;
    m << 0.0, -kI, kI, 0.0;
    return m;
}

QubitOperator sigma_z() {
    QubitOperator m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

QubitOperator projector(const Ket2& ket) { return ket * ket.adjoint(); }

QubitOperator stokes_theta(double theta_deg) {
    const auto cs = cos_sin_degrees(2.0 * theta_deg);
    QubitOperator m;
    m << cs.cos, cs.sin, cs.sin, -cs.cos;
    return m;
}

TwoQubitOperator tensor(const QubitOperator& a, const QubitOperator& b) {
    TwoQubitOperator out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return out;
}

Ket4 tensor(const Ket2& a, const Ket2& b) {
    Ket4 out;
    out << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
    return out;
}

TwoQubitOperator embed(const QubitOperator& op, Party party) {
    return party == Party::first ? tensor(op, identity2()) : tensor(identity2(), op);
}

PureState::PureState(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != 2 && amplitudes_.size() != 4) {
        throw InvalidState("pure state must have 2 or 4 amplitudes");
    }
    if (std::abs(amplitudes_.norm() - 1.0) > kNormTol) {
        std::ostringstream msg;
        msg << "pure state norm " << amplitudes_.norm() << " differs from 1";
        throw InvalidState(msg.str());
    }
}

Eigen::MatrixXcd PureState::density() const { return amplitudes_ * amplitudes_.adjoint(); }

TwoQubitState TwoQubitState::from_matrix(const TwoQubitOperator& m) {
    const double defect = hermiticity_defect(m);
    if (defect > kHermitianTol) {
        std::ostringstream msg;
        msg << "density operator is not Hermitian (defect " << defect << ")";
        throw InvalidState(msg.str());
    }
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
        std::ostringstream msg;
        msg << "density operator trace " << tr << " differs from 1";
        throw InvalidState(msg.str());
    }
    const TwoQubitOperator herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<TwoQubitOperator> es(herm, Eigen::EigenvaluesOnly);
    const double smallest = es.eigenvalues().minCoeff();
    if (smallest < -kPositivityTol) {
        std::ostringstream msg;
        msg << "density operator has negative eigenvalue " << smallest;
        throw InvalidState(msg.str());
    }
    return TwoQubitState(m);
}

TwoQubitState TwoQubitState::from_user_matrix(const TwoQubitOperator& m, double* correction) {
    const TwoQubitOperator herm = 0.5 * (m + m.adjoint());
    if (correction != nullptr) {
        *correction = (herm - m).cwiseAbs().maxCoeff();
    }
    return from_matrix(herm);
}

TwoQubitState TwoQubitState::from_pure(const PureState& psi) {
    if (psi.dimension() != 4) {
        throw InvalidState("two-qubit state needs 4 amplitudes");
    }
    TwoQubitOperator rho = psi.density();
    // Exact Hermiticity regardless of rounding in the outer product.
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return from_matrix(rho);
}

TwoQubitState TwoQubitState::product(const QubitOperator& rho1, const QubitOperator& rho2) {
    return from_matrix(tensor(rho1, rho2));
}

TwoQubitState TwoQubitState::maximally_mixed() {
    return TwoQubitState(TwoQubitOperator::Identity() * 0.25);
}

double TwoQubitState::expectation(const TwoQubitOperator& op) const {
    return (op * rho_).trace().real();
}

TwoQubitState ideal_state(IdealState which) {
    Ket4 psi;
    switch (which) {
    case IdealState::psi:
        psi = (tensor(ket_v(), ket_h()) + kI * tensor(ket_h(), ket_v())) * kInvSqrt2;
        break;
    case IdealState::psi_double_prime:
        psi = (tensor(ket_a(), ket_h()) + kI * tensor(ket_d(), ket_v())) * kInvSqrt2;
        break;
    }
    return TwoQubitState::from_pure(PureState(psi));
}

QubitOperator partial_trace(const TwoQubitOperator& rho, Party keep) {
    QubitOperator out = QubitOperator::Zero();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                if (keep == Party::first) {
                    out(i, j) += rho(2 * i + k, 2 * j + k);
                } else {
                    out(i, j) += rho(2 * k + i, 2 * k + j);
                }
            }
        }
    }
    return out;
}

} // namespace lgsim
