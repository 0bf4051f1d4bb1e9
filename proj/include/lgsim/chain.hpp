#pragma once

// Detector chains and the joint outcome distributions they produce.
//
// A chain is a time-ordered list of at most four two-outcome detectors, each
// acting on one of the two parties. Outcome index 0 is "reflected" for a
// semi-weak meter and the +1 eigenvalue for a projective detector; index 1 is
// "transmitted" / the -1 eigenvalue.
//
// Outcome tuples are packed into an integer with detector 0 as the most
// significant bit, so tuples enumerate lexicographically. Detector subsets are
// bit masks with bit i standing for detector i.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lgsim/meter.hpp"
#include "lgsim/qstate.hpp"

namespace lgsim {

inline constexpr int kMaxDetectors = 4;

using SubsetMask = std::uint32_t;

/// Reported value of each detector for outcome index 0 and 1.
using OutcomeValues = std::vector<std::array<double, 2>>;

struct SemiWeakDetector {
    SemiWeakMeter meter;
    /// -1 reports the contextual values of -sigma_z instead of sigma_z.
    double sign = 1.0;
};

struct ProjectiveDetector {
    QubitOperator observable;
    std::array<std::string, 2> outcome_labels{"+", "-"};
};

struct Detector {
    Party party = Party::first;
    std::string label;
    std::variant<SemiWeakDetector, ProjectiveDetector> kind;

    bool is_semi_weak() const noexcept { return std::holds_alternative<SemiWeakDetector>(kind); }
    /// Kraus operator on the detector's own party.
    QubitOperator kraus(int outcome) const;
    double value(int outcome) const;
    std::string outcome_label(int outcome) const;
};

Detector semi_weak_detector(Party party, std::string label, const SemiWeakMeter& meter,
                            double sign = 1.0);
Detector projective_detector(Party party, std::string label, const QubitOperator& observable,
                             std::array<std::string, 2> outcome_labels = {"+", "-"});

class DetectorChain {
  public:
    /// Throws std::invalid_argument if the chain is empty, longer than four,
    /// has two semi-weak meters on one party, or a projective observable
    /// whose eigenvalues are not exactly +-1.
    explicit DetectorChain(std::vector<Detector> detectors);

    int size() const noexcept { return static_cast<int>(detectors_.size()); }
    const Detector& operator[](int i) const { return detectors_.at(static_cast<std::size_t>(i)); }
    const std::vector<Detector>& detectors() const noexcept { return detectors_; }

    std::size_t outcome_count() const noexcept { return std::size_t{1} << detectors_.size(); }
    OutcomeValues outcome_values() const;
    std::vector<int> semi_weak_indices() const;
    std::vector<int> projective_indices() const;

    /// Concatenated detector labels in chain order, e.g. "A1B1B2".
    std::string subset_label(SubsetMask subset) const;
    /// Per-detector outcome labels joined by ':', e.g. "r:theta:h".
    std::string outcome_tuple_label(std::size_t tuple) const;

  private:
    std::vector<Detector> detectors_;
};

/// The three-detector chain of the two-party experiment:
/// [A1 = semi-weak sigma_z on party 1, B1 = sigma_theta on party 1,
///  B2 = sigma_z on party 2].
DetectorChain standard_chain(const SemiWeakMeter& meter, double theta_deg, double a1_sign = 1.0);

/// Four-detector variant [A1, A2, B1, B2] with a second semi-weak meter on
/// party 2 ahead of B2.
DetectorChain four_detector_chain(const SemiWeakMeter& meter1, const SemiWeakMeter& meter2,
                                  double theta_deg);

/// Nonempty subsets of m detectors ordered by size, then lexicographically by
/// member indices.
std::vector<SubsetMask> canonical_subsets(int m);

inline int outcome_of(std::size_t tuple, int detector, int m) noexcept {
    return static_cast<int>((tuple >> (m - 1 - detector)) & 1u);
}

/// Joint probabilities of every outcome tuple, computed by walking the chain
/// and applying each detector's Kraus operator in time order.
std::vector<double> joint_distribution(const DetectorChain& chain, const TwoQubitState& rho);

double joint_probability(const DetectorChain& chain, const TwoQubitState& rho,
                         std::span<const int> outcomes);

/// Expectation values of all 2^m - 1 detector-product correlations, stored in
/// canonical subset order.
class CorrelationVector {
  public:
    CorrelationVector(int m, std::vector<double> values);

    int detector_count() const noexcept { return m_; }
    const std::vector<SubsetMask>& subsets() const noexcept { return subsets_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](SubsetMask subset) const;

  private:
    int m_;
    std::vector<SubsetMask> subsets_;
    std::vector<double> values_;
    std::array<int, 1u << kMaxDetectors> index_of_{};
};

/// Correlations of an arbitrary nonnegative weight table over outcome tuples
/// (probabilities or raw counts). Throws EmptyData if the weights sum to 0.
CorrelationVector correlations_from_weights(std::span<const double> weights,
                                            const OutcomeValues& values);

CorrelationVector correlation_vector(const DetectorChain& chain, const TwoQubitState& rho);

} // namespace lgsim
