#include "lgsim/meter.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lgsim/error.hpp"

namespace lgsim {

SemiWeakMeter SemiWeakMeter::from_reflectivities(double r_h, double r_v) {
    const auto in_unit = [](double r) { return std::isfinite(r) && r >= 0.0 && r <= 1.0; };
    if (!in_unit(r_h) || !in_unit(r_v)) {
        std::ostringstream msg;
        msg << "reflectivities must lie in [0, 1], got r_h=" << r_h << " r_v=" << r_v;
        throw std::invalid_argument(msg.str());
    }
    const double diff = r_h - r_v;
    if (std::abs(diff) <= kDegenerateMeterTol) {
        std::ostringstream msg;
        msg << "r_h and r_v coincide (" << r_h << ", " << r_v << "); contextual values diverge";
        throw DegenerateMeter(msg.str());
    }

    SemiWeakMeter m;
    m.r_h_ = r_h;
    m.r_v_ = r_v;
    const double t_h = 1.0 - r_h;
    const double t_v = 1.0 - r_v;

    m.kraus_r_ = QubitOperator::Zero();
    m.kraus_r_(0, 0) = std::sqrt(r_h);
    m.kraus_r_(1, 1) = std::sqrt(r_v);
    m.kraus_t_ = QubitOperator::Zero();
    m.kraus_t_(0, 0) = std::sqrt(t_h);
    m.kraus_t_(1, 1) = std::sqrt(t_v);

    m.povm_r_ = m.kraus_r_.adjoint() * m.kraus_r_;
    m.povm_t_ = m.kraus_t_.adjoint() * m.kraus_t_;

    m.cv_r_ = (t_h + t_v) / diff;
    m.cv_t_ = -(r_h + r_v) / diff;
    return m;
}

MeterUpdate apply_meter(const SemiWeakMeter& meter, const TwoQubitState& rho, MeterOutcome outcome) {
    const TwoQubitOperator k = embed(meter.kraus(outcome), Party::first);
    MeterUpdate out;
    out.post_state = k * rho.matrix() * k.adjoint();
    out.probability = out.post_state.trace().real();
    return out;
}

ContextualValueUncertainty propagate_cv_uncertainty(const SemiWeakMeter& meter, double sigma_r_h,
                                                    double sigma_r_v) {
    const double d = meter.r_h() - meter.r_v();
    const double d2 = d * d;
    // Partial derivatives of cv_r and cv_t with respect to (R_h, R_v).
    const double dr_dh = -2.0 * meter.t_v() / d2;
    const double dr_dv = 2.0 * meter.t_h() / d2;
    const double dt_dh = 2.0 * meter.r_v() / d2;
    const double dt_dv = -2.0 * meter.r_h() / d2;
    ContextualValueUncertainty u;
    u.cv_r = std::hypot(dr_dh * sigma_r_h, dr_dv * sigma_r_v);
    u.cv_t = std::hypot(dt_dh * sigma_r_h, dt_dv * sigma_r_v);
    return u;
}

} // namespace lgsim
