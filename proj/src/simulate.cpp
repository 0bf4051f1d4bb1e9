#include "lgsim/simulate.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "lgsim/error.hpp"
#include "rng.hpp"

namespace lgsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

std::uint64_t CountTable::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<double> CountTable::weights() const {
    return std::vector<double>(counts.begin(), counts.end());
}

CountTable sample_poisson(std::span<const double> probabilities, double pairs_expected, std::uint64_t seed) {
    if (!std::isfinite(pairs_expected) || pairs_expected < 0.0) {
        throw std::invalid_argument("pairs_expected must be a nonnegative finite number");
    }
    const auto n = probabilities.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("probability table size must be a power of two");
    }
    CountTable table;
    table.detector_count = std::countr_zero(n);
    table.counts.assign(n, 0);
    table.pairs_expected = pairs_expected;
    table.seed = seed;
    auto rng = make_rng(seed);
    for (std::size_t k = 0; k < n; ++k) {
        const double mean = pairs_expected * probabilities[k];
        if (mean > 0.0) {
            std::poisson_distribution<std::uint64_t> poisson(mean);
            table.counts[k] = poisson(rng);
        }
    }
    return table;
}

CountTable sample_counts(const DetectorChain& chain, const TwoQubitState& rho, double pairs_expected,
                         std::uint64_t seed) {
    const auto dist = joint_distribution(chain, rho);
    return sample_poisson(dist, pairs_expected, seed);
}

namespace {

// Ratio estimator sum_k n_k v_k / N and its delta-method standard error with
// independent Poisson n_k: Var = sum_k n_k (v_k - f)^2 / N^2.
struct RatioEstimate {
    double value;
    double std_error;
};

template <typename ValueOf>
RatioEstimate ratio_estimate(const CountTable& table, ValueOf value_of) {
    const double total = static_cast<double>(table.total());
    double sum = 0.0;
    for (std::size_t k = 0; k < table.counts.size(); ++k) {
        sum += static_cast<double>(table.counts[k]) * value_of(k);
    }
    const double f = sum / total;
    double var = 0.0;
    for (std::size_t k = 0; k < table.counts.size(); ++k) {
        const double dv = value_of(k) - f;
        var += static_cast<double>(table.counts[k]) * dv * dv;
    }
    return {f, std::sqrt(var) / total};
}

void check_table(const CountTable& table, const OutcomeValues& values) {
    if (table.counts.size() != (std::size_t{1} << values.size())) {
        throw std::invalid_argument("count table does not match the detector count");
    }
    if (table.total() == 0) {
        throw EmptyData("count table is empty");
    }
}

double tuple_product(std::size_t tuple, SubsetMask subset, const OutcomeValues& values) {
    const int m = static_cast<int>(values.size());
    double p = 1.0;
    for (int i = 0; i < m; ++i) {
        if (subset & (1u << i)) {
            p *= values[static_cast<std::size_t>(i)][static_cast<std::size_t>(outcome_of(tuple, i, m))];
        }
    }
    return p;
}

} // namespace

CorrelationEstimate estimate_correlations(const CountTable& table, const OutcomeValues& values) {
    check_table(table, values);
    const int m = static_cast<int>(values.size());
    const auto subsets = canonical_subsets(m);
    std::vector<double> est;
    std::vector<double> se;
    est.reserve(subsets.size());
    se.reserve(subsets.size());
    for (const SubsetMask s : subsets) {
        const auto r = ratio_estimate(table, [&](std::size_t k) { return tuple_product(k, s, values); });
        est.push_back(r.value);
        se.push_back(r.std_error);
    }
    return CorrelationEstimate{CorrelationVector(m, std::move(est)), std::move(se)};
}

LgiEstimate estimate_lgi(const CountTable& table, const OutcomeValues& values, const LgiSpec& spec) {
    check_table(table, values);
    const int m = static_cast<int>(values.size());
    if (spec.detector_count() != m) {
        throw std::invalid_argument("inequality and count table belong to different chains");
    }
    const auto subsets = canonical_subsets(m);
    const auto coeffs = spec.coefficients();
    std::vector<double> per_tuple(table.counts.size(), 0.0);
    for (std::size_t k = 0; k < per_tuple.size(); ++k) {
        for (std::size_t t = 0; t < subsets.size(); ++t) {
            if (coeffs[t] != 0) per_tuple[k] += coeffs[t] * tuple_product(k, subsets[t], values);
        }
    }
    const auto r = ratio_estimate(table, [&](std::size_t k) { return per_tuple[k]; });
    LgiEstimate out;
    out.value = r.value;
    out.std_error = r.std_error;
    const double se = r.std_error > 0.0 ? r.std_error : std::numeric_limits<double>::min();
    out.z_upper = (r.value - spec.upper_bound()) / se;
    out.z_lower = (spec.lower_bound() - r.value) / se;
    return out;
}

} // namespace lgsim
