#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "lgsim/error.hpp"
#include "lgsim/simulate.hpp"

using namespace lgsim;

namespace {

DetectorChain coverslip_chain(double theta) { return standard_chain(meter_from_reflectivities(0.0390, 0.175), theta); }

} // namespace

TEST(Sampling, SeedDeterminism) {
    const auto chain = coverslip_chain(50.0);
    const auto rho = ideal_state(IdealState::psi_double_prime);
    const auto a = sample_counts(chain, rho, 1e5, 17);
    const auto b = sample_counts(chain, rho, 1e5, 17);
    const auto c = sample_counts(chain, rho, 1e5, 18);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_NE(a.counts, c.counts);
    EXPECT_EQ(a.seed, 17u);
    EXPECT_EQ(a.detector_count, 3);
    EXPECT_EQ(derive_seed(42, 3), 45u);
}

TEST(Sampling, ZeroAndInvalidPairCounts) {
    const std::array<double, 4> p{0.1, 0.2, 0.3, 0.4};
    const auto zero = sample_poisson(p, 0.0, 1);
    EXPECT_EQ(zero.total(), 0u);
    EXPECT_THROW(sample_poisson(p, -1.0, 1), std::invalid_argument);
    EXPECT_THROW(sample_poisson(p, std::nan(""), 1), std::invalid_argument);
    const std::array<double, 3> odd{0.2, 0.3, 0.5};
    EXPECT_THROW(sample_poisson(odd, 10.0, 1), std::invalid_argument);
    EXPECT_THROW(estimate_correlations(zero, OutcomeValues{{1, -1}, {1, -1}}), EmptyData);
}

TEST(Sampling, CountsArePoissonDistributed) {
    // Mean and variance of a single cell over many seeds.
    const std::array<double, 2> p{0.3, 0.7};
    const int runs = 4000;
    double sum = 0.0;
    double sq = 0.0;
    for (int s = 0; s < runs; ++s) {
        const double n = static_cast<double>(sample_poisson(p, 1000.0, static_cast<std::uint64_t>(s)).counts[0]);
        sum += n;
        sq += n * n;
    }
    const double mean = sum / runs;
    const double var = sq / runs - mean * mean;
    EXPECT_NEAR(mean, 300.0, 5 * std::sqrt(300.0 / runs));
    EXPECT_NEAR(var / 300.0, 1.0, 0.1);
}

TEST(Estimators, RatioEstimatorAndStandardError) {
    CountTable t;
    t.detector_count = 1;
    t.counts = {30, 70};
    const OutcomeValues values{{2.0, -1.0}};
    const auto e = estimate_correlations(t, values);
    const double f = (30 * 2.0 - 70 * 1.0) / 100.0;
    EXPECT_NEAR(e.values[1], f, 1e-15);
    const double se = std::sqrt(30 * (2.0 - f) * (2.0 - f) + 70 * (-1.0 - f) * (-1.0 - f)) / 100.0;
    EXPECT_NEAR(e.std_errors[0], se, 1e-15);

    CountTable doubled = t;
    for (auto& n : doubled.counts) n *= 2;
    const auto d = estimate_correlations(doubled, values);
    EXPECT_NEAR(d.values[1], f, 1e-15);
    EXPECT_NEAR(d.std_errors[0], se / std::sqrt(2.0), 1e-15);
}

TEST(Estimators, StandardErrorMatchesSpreadAcrossSeeds) {
    const auto chain = coverslip_chain(120.0);
    const auto rho = ideal_state(IdealState::psi_double_prime);
    const auto values = chain.outcome_values();
    const int runs = 300;
    std::vector<double> a1;
    double se_mean = 0.0;
    for (int s = 0; s < runs; ++s) {
        const auto e = estimate_correlations(sample_counts(chain, rho, 2e4, 1000 + static_cast<std::uint64_t>(s)), values);
        a1.push_back(e.values[0b001]);
        se_mean += e.std_errors[0] / runs;
    }
    const double mean = std::accumulate(a1.begin(), a1.end(), 0.0) / runs;
    double var = 0.0;
    for (double x : a1) var += (x - mean) * (x - mean) / (runs - 1);
    EXPECT_NEAR(std::sqrt(var) / se_mean, 1.0, 0.12);
    EXPECT_NEAR(mean, correlation_vector(chain, rho)[0b001], 4 * std::sqrt(var / runs));
}

TEST(Estimators, LgiEstimate) {
    const auto chain = coverslip_chain(135.0);
    const auto rho = ideal_state(IdealState::psi_double_prime);
    const std::array<std::pair<SubsetMask, int>, 3> terms{{{0b001, -1}, {0b111, -1}, {0b110, -1}}};
    const auto spec = LgiSpec::from_terms(3, terms);
    const auto table = sample_counts(chain, rho, 1e6, 5);
    const auto e = estimate_lgi(table, chain.outcome_values(), spec);
    const double exact = evaluate_lgi(spec, correlation_vector(chain, rho)).value;
    EXPECT_NEAR(e.value, exact, 5 * e.std_error);
    EXPECT_NEAR(e.z_upper, (e.value - spec.upper_bound()) / e.std_error, 1e-12);
    EXPECT_NEAR(e.z_lower, (spec.lower_bound() - e.value) / e.std_error, 1e-12);
    EXPECT_GT(e.z_upper, 5.0);
}
