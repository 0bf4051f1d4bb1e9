#pragma once

// Generalized Leggett-Garg inequalities over a detector chain.
//
// An inequality is a coefficient in {-1, 0, +1} for each of the 2^m - 1
// detector-product correlations, stored in canonical subset order (see
// canonical_subsets). Its macrorealist bounds are the extremes of the
// correlation sum over the 2^m deterministic +-1 assignments.

#include <array>
#include <cstdint>
#include <functional>
#include <iterator>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lgsim/chain.hpp"

namespace lgsim {

inline constexpr int kMaxTerms = (1 << kMaxDetectors) - 1;
inline constexpr double kViolationTol = 1e-9;
inline constexpr double kConditioningTol = 1e-12;

using Coefficients = std::array<std::int8_t, kMaxTerms>;

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Min and max of sum_T c_T prod_{i in T} a_i over a in {-1, +1}^m.
/// `coeffs` is in canonical subset order and has 2^m - 1 entries.
Bounds mr_bounds(int m, std::span<const std::int8_t> coeffs);

class LgiSpec {
  public:
    /// Throws std::invalid_argument on wrong length, entries outside
    /// {-1, 0, 1}, or an all-zero vector.
    static LgiSpec from_coefficients(int m, std::span<const int> coeffs);
    /// Convenience: list of (subset, coefficient) pairs, unlisted subsets are 0.
    static LgiSpec from_terms(int m, std::span<const std::pair<SubsetMask, int>> terms);

    int detector_count() const noexcept { return m_; }
    int term_count() const noexcept { return (1 << m_) - 1; }
    std::span<const std::int8_t> coefficients() const noexcept {
        return {coeffs_.data(), static_cast<std::size_t>(term_count())};
    }
    int coefficient(SubsetMask subset) const;
    double lower_bound() const noexcept { return bounds_.lower; }
    double upper_bound() const noexcept { return bounds_.upper; }

    /// First nonzero coefficient (canonical subset order) is +1.
    bool is_canonical() const noexcept;
    LgiSpec negated() const;
    LgiSpec canonical() const { return is_canonical() ? *this : negated(); }

    friend bool operator==(const LgiSpec& a, const LgiSpec& b) noexcept {
        return a.m_ == b.m_ && a.coeffs_ == b.coeffs_;
    }

  private:
    friend class LgiEnumeration;
    LgiSpec(int m, const Coefficients& c, Bounds b) : m_(m), coeffs_(c), bounds_(b) {}

    int m_ = 0;
    Coefficients coeffs_{};
    Bounds bounds_{};
};

struct LgiEvaluation {
    double value = 0.0;
    bool violated_upper = false;
    bool violated_lower = false;
    bool violated() const noexcept { return violated_upper || violated_lower; }
};

/// value = sum_T c_T <T>; violation means exceeding a bound by more than 1e-9.
LgiEvaluation evaluate_lgi(const LgiSpec& spec, const CorrelationVector& corr);

/// (3^(2^m - 1) - 1) / 2.
std::uint64_t lgi_count(int m);

/// Lazily enumerates every canonical inequality for m detectors. Spec ids run
/// from 1 to size(); the coefficient vector of id n is the balanced-ternary
/// expansion of n with the first canonical subset as most significant digit,
/// which is exactly the set of vectors whose leading nonzero digit is +1.
class LgiEnumeration {
  public:
    /// Throws UnsupportedSize unless 1 <= m <= 4.
    explicit LgiEnumeration(int m);

    int detector_count() const noexcept { return m_; }
    std::uint64_t size() const noexcept { return size_; }
    /// Random access by spec id, 1 <= id <= size().
    LgiSpec at(std::uint64_t id) const;

    class iterator {
      public:
        using iterator_category = std::input_iterator_tag;
        using value_type = LgiSpec;
        using difference_type = std::ptrdiff_t;
        using pointer = const LgiSpec*;
        using reference = const LgiSpec&;

        iterator() = default;
        reference operator*() const noexcept { return spec_; }
        pointer operator->() const noexcept { return &spec_; }
        std::uint64_t id() const noexcept { return id_; }
        iterator& operator++();
        iterator operator++(int) {
            auto tmp = *this;
            ++*this;
            return tmp;
        }
        friend bool operator==(const iterator& a, const iterator& b) noexcept { return a.id_ == b.id_; }

      private:
        friend class LgiEnumeration;
        iterator(int m, std::uint64_t id, std::uint64_t last);
        void refresh_bounds() noexcept;

        int m_ = 0;
        std::uint64_t id_ = 0;
        std::uint64_t last_ = 0;
        // Exact integer sums of the correlation over each deterministic
        // assignment, updated digit by digit.
        std::array<int, 1u << kMaxDetectors> sums_{};
        std::array<std::array<std::int8_t, kMaxTerms>, 1u << kMaxDetectors> signs_{};
        LgiSpec spec_{0, {}, {}};
    };

    iterator begin() const { return iterator(m_, 1, size_); }
    iterator end() const { return iterator(m_, size_ + 1, size_); }
    /// Iterator positioned at `first`, valid up to and including size().
    iterator from(std::uint64_t first) const;

  private:
    int m_;
    std::uint64_t size_;
};

/// A spec supported only on two-detector subsets whose detectors sit on
/// different parties (the shape of a CHSH-type expression). Flag only.
bool is_chsh_candidate(const LgiSpec& spec, const DetectorChain& chain);

/// Outcome index to condition on for each detector, nullopt to marginalize.
/// Semi-weak detectors must be nullopt.
using Condition = std::vector<std::optional<int>>;

/// Contextual-value average of the single semi-weak detector conditioned on
/// the given projective outcomes. Throws ZeroConditioningProbability when the
/// conditioning probability is below 1e-12, std::invalid_argument if the
/// chain does not hold exactly one semi-weak detector.
double conditioned_average(const DetectorChain& chain, const TwoQubitState& rho,
                           const Condition& condition);

/// Same estimator on a weight table (probabilities or counts) with the
/// semi-weak detector at `semi_weak_index`. The conditioning threshold is
/// relative to the table total.
double conditioned_average(std::span<const double> weights, const OutcomeValues& values,
                           int semi_weak_index, const Condition& condition);

/// Left side of the convex-sum constraint on conditioned averages:
///   lhs = CA(+1,+1) p+ + CA(-1,-1) p-,   p+- = P(+-1,+-1) / (P(1,1) + P(-1,-1)),
/// where the condition runs over the chain's two projective detectors.
struct ConvexSum {
    double lhs = 0.0;
    double p_plus = 0.0;
    double p_minus = 0.0;
    bool violated = false;
    /// P(1,1) + P(-1,-1) as a fraction of the table total.
    double weight = 0.0;
};

ConvexSum convex_sum_constraint(const DetectorChain& chain, const TwoQubitState& rho);
ConvexSum convex_sum_from_weights(std::span<const double> weights, const DetectorChain& chain);

} // namespace lgsim
