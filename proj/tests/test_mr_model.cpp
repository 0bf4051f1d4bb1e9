#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "lgsim/error.hpp"
#include "lgsim/simulate.hpp"

using namespace lgsim;

namespace {

std::array<double, 8> random_ensemble(std::mt19937_64& rng) {
    std::exponential_distribution<double> e;
    std::array<double, 8> p{};
    for (auto& x : p) x = e(rng);
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& x : p) x /= s;
    return p;
}

const std::array<std::pair<SubsetMask, int>, 3> kThreeTerm{{{0b001, 1}, {0b111, 1}, {0b110, -1}}};

} // namespace

TEST(MrModel, CalibratedValues) {
    const auto v = MrModel::calibrated_values(0.039, 0.175);
    const auto m = meter_from_reflectivities(0.039, 0.175);
    EXPECT_NEAR(v[0], m.cv_r(), 1e-12);
    EXPECT_NEAR(v[1], m.cv_t(), 1e-12);
    EXPECT_THROW(MrModel::calibrated_values(0.3, 0.3), DegenerateMeter);
}

TEST(MrModel, Validation) {
    std::array<double, 8> bad{};
    bad[0] = 0.5;
    EXPECT_THROW(MrModel::noninvasive(bad, 0.1, 0.5), std::invalid_argument);
    MrModel m = MrModel::noninvasive({1, 0, 0, 0, 0, 0, 0, 0}, 0.1, 0.5);
    m.values[0] += 0.01; // miscalibrated
    EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(MrModel, NoninvasiveModelsRespectEveryBound) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const LgiEnumeration specs(3);
    for (int k = 0; k < 50; ++k) {
        const double qp = u(rng);
        const double qm = u(rng);
        if (std::abs(qp - qm) < 1e-3) continue;
        const auto model = MrModel::noninvasive(random_ensemble(rng), qp, qm);
        EXPECT_FALSE(model.invasive());
        const auto dist = model.joint_distribution();
        EXPECT_NEAR(std::accumulate(dist.begin(), dist.end(), 0.0), 1.0, 1e-12);
        const auto corr = correlations_from_weights(dist, model.outcome_values());
        for (const auto& spec : specs) {
            ASSERT_FALSE(evaluate_lgi(spec, corr).violated()) << "spec " << spec.lower_bound();
        }
        const double c = mr_three_term_correlation(model);
        EXPECT_NEAR(c, evaluate_lgi(LgiSpec::from_terms(3, kThreeTerm), corr).value, 1e-9);
    }
}

TEST(MrModel, SamplingMatchesJointDistribution) {
    std::mt19937_64 rng(5);
    const auto model = MrModel::noninvasive(random_ensemble(rng), 0.039, 0.175);
    const auto table = sample_mr(model, 200000, 3);
    EXPECT_EQ(table.total(), 200000u);
    const auto dist = model.joint_distribution();
    for (std::size_t t = 0; t < 8; ++t) {
        const double expected = 200000 * dist[t];
        EXPECT_NEAR(static_cast<double>(table.counts[t]), expected, 5 * std::sqrt(expected) + 1);
    }
    EXPECT_EQ(sample_mr(model, 1000, 8).counts, sample_mr(model, 1000, 8).counts);
}

TEST(MrModel, FixtureIsTheSearchOptimum) {
    const auto found = search_invasive_ambiguous_model();
    const auto fixture = invasive_ambiguous_fixture();
    EXPECT_EQ(found.ensemble, fixture.ensemble);
    EXPECT_EQ(found.response, fixture.response);
    EXPECT_EQ(found.values, fixture.values);
    ASSERT_TRUE(found.disturbance && fixture.disturbance);
    EXPECT_EQ(*found.disturbance, *fixture.disturbance);
}

TEST(MrModel, FixtureIsInvasiveAmbiguousAndViolates) {
    const auto m = invasive_ambiguous_fixture();
    EXPECT_TRUE(m.invasive());
    EXPECT_TRUE(m.ambiguous());
    EXPECT_NO_THROW(m.validate());
    // a1 = +1 reflected (0.039): b2 flipped, term = 1; transmitted: 2 alpha_t - 1.
    const double alpha_t = MrModel::calibrated_values(0.039, 0.175)[1];
    EXPECT_NEAR(mr_three_term_correlation(m), 0.039 + 0.961 * (2 * alpha_t - 1), 1e-12);
    EXPECT_GT(mr_three_term_correlation(m), 1.05);
}

TEST(MrModel, UnambiguousInvasiveDetectorCannotViolate) {
    // Ideal detector (q+ = 1, q- = 0) with arbitrary flips stays within [-3, 1].
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        MrModel m = MrModel::noninvasive(random_ensemble(rng), 1.0, 0.0);
        EXPECT_FALSE(m.ambiguous());
        std::array<std::array<std::array<double, 4>, 4>, 2> d{};
        for (auto& rep : d) {
            for (auto& row : rep) {
                double s = 0.0;
                for (auto& x : row) s += (x = u(rng));
                for (auto& x : row) x /= s;
            }
        }
        m.disturbance = d;
        EXPECT_LE(mr_three_term_correlation(m), 1.0 + 1e-12);
    }
}
