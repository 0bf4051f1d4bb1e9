#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lgsim/error.hpp"
#include "lgsim/io.hpp"
#include "oracles.hpp"

using namespace lgsim;

TEST(Io, FormatDoubleRoundTrips) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    for (int k = 0; k < 1000; ++k) {
        const double x = n(rng) * std::pow(10.0, k % 20 - 10);
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Io, DensityMatrixRoundTrip) {
    std::mt19937_64 rng(2);
    const auto rho = TwoQubitState::from_matrix(oracle::random_density(rng));
    const auto j = density_matrix_to_json(rho.matrix());
    const auto back = density_matrix_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_TRUE(back.matrix().isApprox(rho.matrix(), 1e-15));
    const auto wrapped = density_matrix_from_json({{"rho", j}});
    EXPECT_TRUE(wrapped.matrix().isApprox(rho.matrix(), 1e-15));
}

TEST(Io, DensityMatrixErrors) {
    EXPECT_THROW(density_matrix_from_json(nlohmann::json::array({1, 2})), ConfigError);
    auto j = density_matrix_to_json(TwoQubitOperator::Identity() / 4.0);
    j[1][2] = "x";
    EXPECT_THROW(density_matrix_from_json(j), ConfigError);
    const auto trace_two = density_matrix_to_json(TwoQubitOperator::Identity() / 2.0);
    EXPECT_THROW(density_matrix_from_json(trace_two), InvalidState);
    EXPECT_THROW(load_density_matrix("/nonexistent/rho.json"), ConfigError);
}

TEST(Io, LgiSpecRoundTrip) {
    const auto chain = standard_chain(meter_from_reflectivities(0.039, 0.175), 0.0);
    const std::array<std::pair<SubsetMask, int>, 3> terms{{{0b001, 1}, {0b111, 1}, {0b110, -1}}};
    const auto spec = LgiSpec::from_terms(3, terms);
    const auto j = lgi_spec_to_json(spec, chain);
    EXPECT_EQ(j.at("A1"), 1);
    EXPECT_EQ(j.at("B1B2"), -1);
    EXPECT_EQ(j.at("lower_bound"), -3.0);
    EXPECT_EQ(j.at("upper_bound"), 1.0);
    EXPECT_EQ(lgi_spec_from_json(j, chain), spec);

    EXPECT_THROW(lgi_spec_from_json({{"A3", 1}}, chain), ConfigError);
    EXPECT_THROW(lgi_spec_from_json({{"A1", 2}}, chain), ConfigError);
    EXPECT_THROW(lgi_spec_from_json({{"A1", 1}, {"upper_bound", 2}}, chain), ConfigError);
    EXPECT_THROW(lgi_spec_from_json({{"A1", 0}}, chain), ConfigError);
}

TEST(Io, CountTableRoundTrip) {
    const auto chain = standard_chain(meter_from_reflectivities(0.039, 0.175), 10.0);
    const auto table = sample_counts(chain, ideal_state(IdealState::psi_double_prime), 5e4, 99);
    std::stringstream ss;
    write_count_table(ss, table, chain);
    const std::string text = ss.str();
    EXPECT_NE(text.find("# seed=99\n"), std::string::npos);
    EXPECT_NE(text.find("outcome_tuple,count\nr:theta:h,"), std::string::npos);
    const auto back = read_count_table(ss, chain);
    EXPECT_EQ(back.counts, table.counts);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.pairs_expected, 5e4);
}

TEST(Io, CountTableErrors) {
    const auto chain = standard_chain(meter_from_reflectivities(0.039, 0.175), 10.0);
    std::istringstream missing("outcome_tuple,count\nr:theta:h,5\n");
    EXPECT_THROW(read_count_table(missing, chain), ConfigError);
    std::istringstream bad("outcome_tuple,count\nr:theta:x,5\n");
    EXPECT_THROW(read_count_table(bad, chain), ConfigError);
    std::istringstream negative("outcome_tuple,count\nr:theta:h,-5\n");
    EXPECT_THROW(read_count_table(negative, chain), ConfigError);
    std::istringstream no_header("r:theta:h,5\n");
    EXPECT_THROW(read_count_table(no_header, chain), ConfigError);
}

TEST(Io, TomographyCountsRoundTrip) {
    const auto settings = standard_tomography_settings();
    std::vector<std::uint64_t> counts(16);
    for (std::size_t i = 0; i < 16; ++i) counts[i] = 100 + i;
    std::stringstream ss;
    write_tomography_counts(ss, settings, counts);
    const auto data = read_tomography_counts(ss);
    EXPECT_EQ(data.counts, counts);
    ASSERT_EQ(data.settings.size(), 16u);
    EXPECT_EQ(data.settings[4].label, "RH");
    std::istringstream bad("setting_label,count\nQQ,4\n");
    EXPECT_THROW(read_tomography_counts(bad), ConfigError);
}
