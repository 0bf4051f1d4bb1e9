#include "lgsim/lgi.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lgsim/error.hpp"

namespace lgsim {

namespace {

const std::vector<SubsetMask>& subsets_for(int m) {
    static const std::array<std::vector<SubsetMask>, kMaxDetectors> table = [] {
        std::array<std::vector<SubsetMask>, kMaxDetectors> t;
        for (int k = 1; k <= kMaxDetectors; ++k) {
            t[static_cast<std::size_t>(k - 1)] = canonical_subsets(k);
        }
        return t;
    }();
    if (m < 1 || m > kMaxDetectors) {
        throw UnsupportedSize("detector count must be between 1 and 4");
    }
    return table[static_cast<std::size_t>(m - 1)];
}

// +1 or -1: the product of a deterministic assignment over a subset. Bit i of
// `assignment` set means detector i reports -1.
int parity_sign(SubsetMask assignment, SubsetMask subset) noexcept {
    return (std::popcount(assignment & subset) & 1) ? -1 : 1;
}

} // namespace

Bounds mr_bounds(int m, std::span<const std::int8_t> coeffs) {
    const auto& subsets = subsets_for(m);
    if (coeffs.size() != subsets.size()) {
        throw std::invalid_argument("coefficient vector needs 2^m - 1 entries");
    }
    Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (SubsetMask a = 0; a < (1u << m); ++a) {
        int s = 0;
        for (std::size_t k = 0; k < subsets.size(); ++k) {
            s += coeffs[k] * parity_sign(a, subsets[k]);
        }
        b.lower = std::min(b.lower, static_cast<double>(s));
        b.upper = std::max(b.upper, static_cast<double>(s));
    }
    return b;
}

LgiSpec LgiSpec::from_coefficients(int m, std::span<const int> coeffs) {
    const auto& subsets = subsets_for(m);
    if (coeffs.size() != subsets.size()) {
        throw std::invalid_argument("coefficient vector needs 2^m - 1 entries");
    }
    Coefficients c{};
    bool any = false;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] < -1 || coeffs[k] > 1) {
            throw std::invalid_argument("LGI coefficients must be -1, 0 or 1");
        }
        c[k] = static_cast<std::int8_t>(coeffs[k]);
        any = any || coeffs[k] != 0;
    }
    if (!any) {
        throw std::invalid_argument("LGI coefficients are all zero");
    }
    const Bounds b = mr_bounds(m, std::span<const std::int8_t>(c.data(), subsets.size()));
    return LgiSpec(m, c, b);
}

LgiSpec LgiSpec::from_terms(int m, std::span<const std::pair<SubsetMask, int>> terms) {
    const auto& subsets = subsets_for(m);
    std::vector<int> c(subsets.size(), 0);
    for (const auto& [mask, coeff] : terms) {
        const auto it = std::find(subsets.begin(), subsets.end(), mask);
        if (it == subsets.end()) {
            throw std::invalid_argument("subset is not part of this detector chain");
        }
        c[static_cast<std::size_t>(it - subsets.begin())] = coeff;
    }
    return from_coefficients(m, c);
}

int LgiSpec::coefficient(SubsetMask subset) const {
    const auto& subsets = subsets_for(m_);
    const auto it = std::find(subsets.begin(), subsets.end(), subset);
    if (it == subsets.end()) {
        throw std::out_of_range("subset outside this inequality");
    }
    return coeffs_[static_cast<std::size_t>(it - subsets.begin())];
}

bool LgiSpec::is_canonical() const noexcept {
    for (int k = 0; k < term_count(); ++k) {
        if (coeffs_[static_cast<std::size_t>(k)] != 0) {
            return coeffs_[static_cast<std::size_t>(k)] == 1;
        }
    }
    return false;
}

LgiSpec LgiSpec::negated() const {
    Coefficients c{};
    for (int k = 0; k < term_count(); ++k) {
        c[static_cast<std::size_t>(k)] = static_cast<std::int8_t>(-coeffs_[static_cast<std::size_t>(k)]);
    }
    return LgiSpec(m_, c, Bounds{-bounds_.upper, -bounds_.lower});
}

LgiEvaluation evaluate_lgi(const LgiSpec& spec, const CorrelationVector& corr) {
    if (spec.detector_count() != corr.detector_count()) {
        throw std::invalid_argument("inequality and correlations belong to different chains");
    }
    const auto coeffs = spec.coefficients();
    const auto& values = corr.values();
    LgiEvaluation e;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        e.value += coeffs[k] * values[k];
    }
    e.violated_upper = e.value > spec.upper_bound() + kViolationTol;
    e.violated_lower = e.value < spec.lower_bound() - kViolationTol;
    return e;
}

std::uint64_t lgi_count(int m) {
    if (m < 1 || m > kMaxDetectors) {
        throw UnsupportedSize("LGI enumeration supports 1 to 4 detectors");
    }
    std::uint64_t p = 1;
    for (int k = 0; k < (1 << m) - 1; ++k) p *= 3;
    return (p - 1) / 2;
}

LgiEnumeration::LgiEnumeration(int m) : m_(m), size_(lgi_count(m)) {}

LgiSpec LgiEnumeration::at(std::uint64_t id) const {
    if (id < 1 || id > size_) {
        throw std::out_of_range("spec id outside enumeration");
    }
    return *iterator(m_, id, size_);
}

LgiEnumeration::iterator LgiEnumeration::from(std::uint64_t first) const {
    if (first < 1 || first > size_ + 1) {
        throw std::out_of_range("spec id outside enumeration");
    }
    return iterator(m_, first, size_);
}

LgiEnumeration::iterator::iterator(int m, std::uint64_t id, std::uint64_t last) : m_(m), id_(id), last_(last) {
    const auto& subsets = subsets_for(m);
    const int terms = static_cast<int>(subsets.size());
    for (SubsetMask a = 0; a < (1u << m); ++a) {
        for (int k = 0; k < terms; ++k) {
            signs_[a][static_cast<std::size_t>(k)] =
                static_cast<std::int8_t>(parity_sign(a, subsets[static_cast<std::size_t>(k)]));
        }
    }
    spec_ = LgiSpec(m, Coefficients{}, Bounds{});
    if (id > last) {
        return;
    }
    // Balanced-ternary digits, least significant digit is the last subset.
    std::uint64_t n = id;
    for (int k = terms - 1; k >= 0; --k) {
        const auto r = n % 3;
        if (r == 2) {
            spec_.coeffs_[static_cast<std::size_t>(k)] = -1;
            n = n / 3 + 1;
        } else {
            spec_.coeffs_[static_cast<std::size_t>(k)] = static_cast<std::int8_t>(r);
            n /= 3;
        }
    }
    for (SubsetMask a = 0; a < (1u << m); ++a) {
        int s = 0;
        for (int k = 0; k < terms; ++k) {
            s += spec_.coeffs_[static_cast<std::size_t>(k)] * signs_[a][static_cast<std::size_t>(k)];
        }
        sums_[a] = s;
    }
    refresh_bounds();
}

void LgiEnumeration::iterator::refresh_bounds() noexcept {
    const int assignments = 1 << m_;
    int lo = sums_[0];
    int hi = sums_[0];
    for (int a = 1; a < assignments; ++a) {
        lo = std::min(lo, sums_[static_cast<std::size_t>(a)]);
        hi = std::max(hi, sums_[static_cast<std::size_t>(a)]);
    }
    spec_.bounds_ = Bounds{static_cast<double>(lo), static_cast<double>(hi)};
}

LgiEnumeration::iterator& LgiEnumeration::iterator::operator++() {
    ++id_;
    if (id_ > last_) {
        return *this;
    }
    const int assignments = 1 << m_;
    for (int k = (1 << m_) - 2; k >= 0; --k) {
        auto& digit = spec_.coeffs_[static_cast<std::size_t>(k)];
        const int delta = digit < 1 ? 1 : -2;
        digit = static_cast<std::int8_t>(digit + delta);
        for (int a = 0; a < assignments; ++a) {
            sums_[static_cast<std::size_t>(a)] += delta * signs_[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)];
        }
        if (delta == 1) {
            break;
        }
    }
    refresh_bounds();
    return *this;
}

bool is_chsh_candidate(const LgiSpec& spec, const DetectorChain& chain) {
    if (spec.detector_count() != chain.size()) {
        throw std::invalid_argument("inequality and chain sizes differ");
    }
    const auto& subsets = subsets_for(spec.detector_count());
    const auto coeffs = spec.coefficients();
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0) continue;
        const SubsetMask s = subsets[k];
        if (std::popcount(s) != 2) return false;
        const int i = std::countr_zero(s);
        const int j = 31 - std::countl_zero(s);
        if (chain[i].party == chain[j].party) return false;
    }
    return true;
}

namespace {

int single_semi_weak(const DetectorChain& chain) {
    const auto sw = chain.semi_weak_indices();
    if (sw.size() != 1) {
        throw std::invalid_argument("conditioned averages need exactly one semi-weak detector");
    }
    return sw.front();
}

} // namespace

double conditioned_average(std::span<const double> weights, const OutcomeValues& values,
                           int semi_weak_index, const Condition& condition) {
    const int m = static_cast<int>(values.size());
    if (weights.size() != (std::size_t{1} << m) || condition.size() != values.size()) {
        throw std::invalid_argument("condition or weight table does not match the detector count");
    }
    if (semi_weak_index < 0 || semi_weak_index >= m) {
        throw std::invalid_argument("semi-weak detector index out of range");
    }
    if (condition[static_cast<std::size_t>(semi_weak_index)].has_value()) {
        throw std::invalid_argument("cannot condition on the semi-weak detector itself");
    }
    double total = 0.0;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t tuple = 0; tuple < weights.size(); ++tuple) {
        const double w = weights[tuple];
        total += w;
        bool match = true;
        for (int i = 0; i < m && match; ++i) {
            const auto& c = condition[static_cast<std::size_t>(i)];
            match = !c.has_value() || *c == outcome_of(tuple, i, m);
        }
        if (!match) continue;
        const int o = outcome_of(tuple, semi_weak_index, m);
        num += w * values[static_cast<std::size_t>(semi_weak_index)][static_cast<std::size_t>(o)];
        den += w;
    }
    if (!(den > kConditioningTol * total)) {
        throw ZeroConditioningProbability("conditioning outcomes are never realized");
    }
    return num / den;
}

double conditioned_average(const DetectorChain& chain, const TwoQubitState& rho, const Condition& condition) {
    const int sw = single_semi_weak(chain);
    const auto dist = joint_distribution(chain, rho);
    return conditioned_average(dist, chain.outcome_values(), sw, condition);
}

ConvexSum convex_sum_from_weights(std::span<const double> weights, const DetectorChain& chain) {
    const int sw = single_semi_weak(chain);
    const auto proj = chain.projective_indices();
    if (chain.size() != 3 || proj.size() != 2) {
        throw std::invalid_argument("convex-sum constraint needs one semi-weak and two projective detectors");
    }
    if (weights.size() != chain.outcome_count()) {
        throw std::invalid_argument("weight table does not match the chain");
    }
    const auto values = chain.outcome_values();
    const int m = chain.size();
    double total = 0.0;
    double w_plus = 0.0;
    double w_minus = 0.0;
    double num = 0.0;
    for (std::size_t tuple = 0; tuple < weights.size(); ++tuple) {
        const double w = weights[tuple];
        total += w;
        const int b1 = outcome_of(tuple, proj[0], m);
        const int b2 = outcome_of(tuple, proj[1], m);
        if (b1 != b2) continue;
        (b1 == 0 ? w_plus : w_minus) += w;
        num += w * values[static_cast<std::size_t>(sw)][static_cast<std::size_t>(outcome_of(tuple, sw, m))];
    }
    const double s = w_plus + w_minus;
    if (!(total > 0.0) || !(s >= kConditioningTol * total)) {
        throw ZeroConditioningProbability("P(1,1) + P(-1,-1) vanishes");
    }
    ConvexSum out;
    // CA(1,1) p+ + CA(-1,-1) p- collapses to one ratio over both conditions.
    out.lhs = num / s;
    out.p_plus = w_plus / s;
    out.p_minus = w_minus / s;
    out.weight = s / total;
    out.violated = out.lhs > 1.0 + kViolationTol;
    return out;
}

ConvexSum convex_sum_constraint(const DetectorChain& chain, const TwoQubitState& rho) {
    const auto dist = joint_distribution(chain, rho);
    return convex_sum_from_weights(dist, chain);
}

} // namespace lgsim
