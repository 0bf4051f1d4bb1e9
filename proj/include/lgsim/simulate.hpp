#pragma once

// Stochastic coincidence-count simulation and plug-in estimators.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lgsim/chain.hpp"
#include "lgsim/lgi.hpp"

namespace lgsim {

/// Counts per outcome tuple, indexed like joint_distribution.
struct CountTable {
    int detector_count = 0;
    std::vector<std::uint64_t> counts;
    double pairs_expected = 0.0;
    std::uint64_t seed = 0;

    std::uint64_t total() const noexcept;
    std::vector<double> weights() const;
};

/// Seed of grid point `index` in a sweep seeded with `base_seed`.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return base_seed + index;
}

/// Independent Poisson counts with mean pairs_expected * p for each entry of
/// `probabilities`. pairs_expected == 0 yields an all-zero table; negative or
/// non-finite values throw std::invalid_argument.
CountTable sample_poisson(std::span<const double> probabilities, double pairs_expected, std::uint64_t seed);

CountTable sample_counts(const DetectorChain& chain, const TwoQubitState& rho, double pairs_expected,
                         std::uint64_t seed);

/// Correlations with delta-method standard errors, counts treated as
/// independent Poisson variables.
struct CorrelationEstimate {
    CorrelationVector values;
    std::vector<double> std_errors; // canonical subset order
};

/// Throws EmptyData when the table has no counts.
CorrelationEstimate estimate_correlations(const CountTable& table, const OutcomeValues& values);
inline CorrelationEstimate estimate_correlations(const CountTable& table, const DetectorChain& chain) {
    return estimate_correlations(table, chain.outcome_values());
}

struct LgiEstimate {
    double value = 0.0;
    double std_error = 0.0;
    /// (value - upper) / std_error and (lower - value) / std_error.
    double z_upper = 0.0;
    double z_lower = 0.0;
};

LgiEstimate estimate_lgi(const CountTable& table, const OutcomeValues& values, const LgiSpec& spec);

// ---------------------------------------------------------------------------
// Classical macrorealist model of the three-detector experiment.
//
// Hidden properties (a1, b1, b2) in {-1,+1}^3 are drawn from an ensemble. The
// ambiguous detector for A1 reports outcome k in {0, 1} with probability
// response[a][k] and generalized value values[k]. An invasive detector may
// then disturb (b1, b2) depending on the reported outcome. Hidden-state and
// pair indices use the same packing as outcome tuples: index 0 means +1.

struct MrModel {
    /// P(a1, b1, b2), index 4*a + 2*b1 + b2.
    std::array<double, 8> ensemble{};
    /// response[a][k] = P(report k | a).
    std::array<std::array<double, 2>, 2> response{};
    /// Generalized values reported for outcome 0 and 1.
    std::array<double, 2> values{};
    /// disturbance[k][pair_in][pair_out] = P(b1', b2' | b1, b2, report k),
    /// pair index 2*b1 + b2. Absent for a noninvasive detector.
    std::optional<std::array<std::array<std::array<double, 4>, 4>, 2>> disturbance;

    bool invasive() const noexcept { return disturbance.has_value(); }
    bool ambiguous() const noexcept;

    /// Probability rows sum to 1 within 1e-12 and the detector is calibrated,
    /// sum_k values[k] P(k | a) = a within 1e-10. Throws std::invalid_argument.
    void validate() const;

    /// Exact P(k, b1, b2) over the reported triple, tuple index 4*k + 2*b1 + b2.
    std::vector<double> joint_distribution() const;
    OutcomeValues outcome_values() const;

    /// Calibrated generalized values for P(k=0 | a=+1) = q_plus and
    /// P(k=0 | a=-1) = q_minus. Throws DegenerateMeter if q_plus == q_minus.
    static std::array<double, 2> calibrated_values(double q_plus, double q_minus);
    /// Noninvasive model with a calibrated two-outcome detector.
    static MrModel noninvasive(const std::array<double, 8>& ensemble, double q_plus, double q_minus);
};

CountTable sample_mr(const MrModel& model, std::uint64_t n, std::uint64_t seed);

/// Analytic <A1 + A1 B1 B2 - B1 B2> of a model.
double mr_three_term_correlation(const MrModel& model);

/// Grid search over invasive disturbances: for each of the eight pure hidden
/// ensembles, a coverslip-like ambiguous detector (q+ = 0.039, q- = 0.175) and
/// independent flip probabilities of b1 and b2 after each report taken from
/// {0, 0.25, 0.5, 0.75, 1}. Returns the model that maximizes the three-term
/// correlation.
MrModel search_invasive_ambiguous_model();

/// Frozen result of search_invasive_ambiguous_model: an invasive and
/// ambiguous detector that pushes <A1 + A1 B1 B2 - B1 B2> above 1.
MrModel invasive_ambiguous_fixture();

} // namespace lgsim
