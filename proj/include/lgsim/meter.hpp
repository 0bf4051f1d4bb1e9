#pragma once

#include "lgsim/qstate.hpp"

namespace lgsim {

enum class MeterOutcome { reflected = 0, transmitted = 1 };

/// Below this |r_h - r_v| the contextual values exceed ~1e9.
inline constexpr double kDegenerateMeterTol = 1e-9;

/// A two-outcome polarization-dependent beamsplitter (the coverslip) acting
/// on party 1 and measuring sigma_z = Pi_h - Pi_v.
///
///   M_r = sqrt(R_h) Pi_h + sqrt(R_v) Pi_v     E_r = M_r^dagger M_r
///   M_t = sqrt(T_h) Pi_h + sqrt(T_v) Pi_v     E_t = M_t^dagger M_t
///
/// The contextual values satisfy cv_r E_r + cv_t E_t = sigma_z:
///   cv_r = (T_h + T_v) / (R_h - R_v),   cv_t = -(R_h + R_v) / (R_h - R_v).
class SemiWeakMeter {
  public:
    /// Throws std::invalid_argument for reflectivities outside [0, 1] and
    /// DegenerateMeter when |r_h - r_v| <= 1e-9.
    static SemiWeakMeter from_reflectivities(double r_h, double r_v);

    double r_h() const noexcept { return r_h_; }
    double r_v() const noexcept { return r_v_; }
    double t_h() const noexcept { return 1.0 - r_h_; }
    double t_v() const noexcept { return 1.0 - r_v_; }

    const QubitOperator& kraus(MeterOutcome o) const noexcept {
        return o == MeterOutcome::reflected ? kraus_r_ : kraus_t_;
    }
    const QubitOperator& povm(MeterOutcome o) const noexcept {
        return o == MeterOutcome::reflected ? povm_r_ : povm_t_;
    }
    double contextual_value(MeterOutcome o) const noexcept {
        return o == MeterOutcome::reflected ? cv_r_ : cv_t_;
    }
    double cv_r() const noexcept { return cv_r_; }
    double cv_t() const noexcept { return cv_t_; }

  private:
    SemiWeakMeter() = default;

    double r_h_ = 0.0;
    double r_v_ = 0.0;
    QubitOperator kraus_r_;
    QubitOperator kraus_t_;
    QubitOperator povm_r_;
    QubitOperator povm_t_;
    double cv_r_ = 0.0;
    double cv_t_ = 0.0;
};

inline SemiWeakMeter meter_from_reflectivities(double r_h, double r_v) {
    return SemiWeakMeter::from_reflectivities(r_h, r_v);
}

struct MeterUpdate {
    TwoQubitOperator post_state; // unnormalized
    double probability = 0.0;
};

/// (M_o x I) rho (M_o x I)^dagger and its trace.
MeterUpdate apply_meter(const SemiWeakMeter& meter, const TwoQubitState& rho, MeterOutcome outcome);

/// First-order propagation of reflectivity calibration errors into the
/// contextual values. Used for reporting only.
struct ContextualValueUncertainty {
    double cv_r = 0.0;
    double cv_t = 0.0;
};
ContextualValueUncertainty propagate_cv_uncertainty(const SemiWeakMeter& meter, double sigma_r_h,
                                                    double sigma_r_v);

} // namespace lgsim
