// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "lgsim/io.hpp"
#include "lgsim/lgi.hpp"
#include "lgsim/scenario.hpp"
#include "lgsim/simulate.hpp"
#include "lgsim/tomography.hpp"
#include "oracles.hpp"

using namespace lgsim;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void run(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

const SemiWeakMeter& coverslip_meter() {
    static const SemiWeakMeter m = meter_from_reflectivities(0.0390, 0.175);
    return m;
}

void contextual_values() {
    const auto& m = coverslip_meter();
    const bool pass = m.cv_r() >= -13.2 && m.cv_r() <= -13.0 && m.cv_t() >= 1.56 && m.cv_t() <= 1.58;
    report(1, pass, fmt("alpha_r = %.6f in [-13.2, -13.0], alpha_t = %.6f in [1.56, 1.58]", m.cv_r(), m.cv_t()));
}

void enumeration_counts() {
    const std::array<std::uint64_t, 4> expected{1, 13, 1093, 7174453};
    bool pass = true;
    std::string detail;
    double m4_seconds = 0.0;
    for (int m = 1; m <= 4; ++m) {
        const auto t0 = std::chrono::steady_clock::now();
        std::uint64_t n = 0;
        for (const auto& spec : LgiEnumeration(m)) n += spec.upper_bound() >= spec.lower_bound() ? 1 : 0;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (m == 4) m4_seconds = secs;
        pass = pass && n == expected[static_cast<std::size_t>(m - 1)];
        detail += fmt("m=%d: %llu ", m, static_cast<unsigned long long>(n));
    }
    pass = pass && m4_seconds < 60.0;
    report(2, pass, detail + fmt("(m=4 streamed in %.2f s, limit 60 s)", m4_seconds));
}

void bound_oracle() {
    const std::vector<std::int8_t> eq1{1, 0, 0, 0, 0, -1, 1};
    const auto b = mr_bounds(3, eq1);
    bool pass = b.lower == -3.0 && b.upper == 1.0;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> d(-1, 1);
    int mismatches = 0;
    for (int k = 0; k < 1000; ++k) {
        std::vector<int> c(7);
        for (auto& x : c) x = d(rng);
        const auto mine = mr_bounds(3, std::vector<std::int8_t>(c.begin(), c.end()));
        const auto [lo, hi] = oracle::bounds(3, c);
        if (mine.lower != lo || mine.upper != hi) ++mismatches;
    }
    pass = pass && mismatches == 0;
    report(3, pass, fmt("three-term bounds (%g, %g); %d/1000 random vectors disagree with the second enumerator",
                        b.lower, b.upper, mismatches));
}

void figure4() {
    const auto s = preset_scenario("fig4");
    std::ostringstream out;
    run_sweep(s, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) header.push_back(cell);
    }
    const auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    };
    const std::size_t lgi = col("LGI1");
    const std::size_t lhs = col("convex_sum_lhs");
    std::vector<int> lgi_set;
    std::vector<int> cs_set;
    int disagreements = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        const int theta = std::stoi(cells[0]);
        const double v = std::stod(cells[lgi]);
        const double c = std::stod(cells[lhs]);
        const bool a = v > 1.0 + kViolationTol;
        const bool b = c > 1.0 + kViolationTol;
        if (a) lgi_set.push_back(theta);
        if (b) cs_set.push_back(theta);
        // Agreement up to the tolerance: a disagreement only counts when
        // neither value sits within 1e-9 of the bound.
        if (a != b && std::abs(v - 1.0) > 1e-9 && std::abs(c - 1.0) > 1e-9) ++disagreements;
    }

    std::ifstream gin(std::string(LGSIM_GOLDEN_DIR) + "/fig4_violation.json");
    const auto golden = nlohmann::json::parse(gin);
    const auto crossings = golden.at("lgi_crossings_deg").get<std::vector<double>>();
    const auto cs_crossings = golden.at("convex_sum_crossings_deg").get<std::vector<double>>();

    const auto value = [&](double t) {
        return evaluate_lgi(s.specs[0], correlation_vector(s.chain(t), s.state)).value - 1.0;
    };
    auto flipped = s.detectors;
    for (auto& d : flipped) {
        if (d.kind == DetectorConfig::Kind::semi_weak) d.sign = -d.sign;
    }
    Scenario cs_scenario = s;
    cs_scenario.detectors = flipped;
    const auto cs_value = [&](double t) { return convex_sum_constraint(cs_scenario.chain(t), s.state).lhs - 1.0; };
    const auto bisect = [](const std::function<double(double)>& f, double lo, double hi) {
        const bool lo_above = f(lo) > 0;
        for (int k = 0; k < 200 && hi - lo > 1e-13; ++k) {
            const double mid = 0.5 * (lo + hi);
            ((f(mid) > 0) == lo_above ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    double worst = 0.0;
    bool have_interval = !lgi_set.empty() && crossings.size() == 2 && cs_crossings.size() == 2;
    if (have_interval) {
        const double lo = lgi_set.front();
        const double hi = lgi_set.back();
        const std::array<double, 4> found{bisect(value, lo - 1, lo), bisect(value, hi, hi + 1),
                                          bisect(cs_value, lo - 1, lo), bisect(cs_value, hi, hi + 1)};
        const std::array<double, 4> want{crossings[0], crossings[1], cs_crossings[0], cs_crossings[1]};
        for (std::size_t k = 0; k < 4; ++k) worst = std::max(worst, std::abs(found[k] - want[k]));
    }
    const bool contiguous = have_interval && lgi_set.back() - lgi_set.front() + 1 == static_cast<int>(lgi_set.size());
    const bool pass = have_interval && contiguous && lgi_set == cs_set && disagreements == 0 && worst <= 1e-9 &&
                      lgi_set == golden.at("violated_grid_deg").get<std::vector<int>>();
    report(4, pass,
           fmt("LGI > 1 on %zu grid points [%d, %d], convex sum > 1 on %zu; crossings (%.9f, %.9f) vs golden, max "
               "deviation %.2e (tol 1e-9); %d disagreeing grid points",
               lgi_set.size(), lgi_set.empty() ? -1 : lgi_set.front(), lgi_set.empty() ? -1 : lgi_set.back(),
               cs_set.size(), crossings.size() > 0 ? crossings[0] : NAN, crossings.size() > 1 ? crossings[1] : NAN,
               worst, disagreements));
}

void figure5() {
    const auto s = preset_scenario("fig5");
    const auto grid = s.grid.points();
    std::size_t covered = 0;
    for (double t : grid) {
        const auto corr = correlation_vector(s.chain(t), s.state);
        bool any = false;
        for (const auto& spec : s.specs) any = any || evaluate_lgi(spec, corr).violated_upper;
        covered += any ? 1 : 0;
    }
    const double fraction = static_cast<double>(covered) / static_cast<double>(grid.size());
    report(5, fraction >= 0.9,
           fmt("the two specs exceed their upper bound on %zu/%zu grid points (%.1f%%, need >= 90%%)", covered,
               grid.size(), 100.0 * fraction));
}

void mr_soundness() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> e;
    const LgiEnumeration specs(3);
    int analytic_violations = 0;
    int sampled_violations = 0;
    double max_z = -INFINITY;
    for (int model_index = 0; model_index < 20; ++model_index) {
        std::array<double, 8> ens{};
        for (auto& x : ens) x = e(rng);
        const double total = std::accumulate(ens.begin(), ens.end(), 0.0);
        for (auto& x : ens) x /= total;
        double qp = 0.0;
        double qm = 0.0;
        do {
            qp = u(rng);
            qm = u(rng);
        } while (std::abs(qp - qm) < 0.05);
        const auto model = MrModel::noninvasive(ens, qp, qm);
        const auto values = model.outcome_values();
        const auto corr = correlations_from_weights(model.joint_distribution(), values);
        const auto table = sample_mr(model, 1000000, 7000 + static_cast<std::uint64_t>(model_index));
        for (const auto& spec : specs) {
            // Exact containment, no tolerance.
            const double v = evaluate_lgi(spec, corr).value;
            if (v > spec.upper_bound() || v < spec.lower_bound()) ++analytic_violations;
            const auto est = estimate_lgi(table, values, spec);
            const double z = std::max(est.z_upper, est.z_lower);
            if (std::isfinite(z)) max_z = std::max(max_z, z);
            if (z > 5.0) ++sampled_violations;
        }
    }
    report(6, analytic_violations == 0 && sampled_violations == 0,
           fmt("20 noninvasive models x 1093 specs: %d analytic bound breaches, %d sampled z > 5 (max z %.2f)",
               analytic_violations, sampled_violations, max_z));
}

void invasive_counterexample() {
    const auto m = invasive_ambiguous_fixture();
    const double c = mr_three_term_correlation(m);
    report(7, m.invasive() && m.ambiguous() && c - 1.0 > 0.05,
           fmt("fixture (invasive=%d, ambiguous=%d) gives three-term correlation %.6f, margin %.6f over 1",
               m.invasive(), m.ambiguous(), c, c - 1.0));
}

void weak_value_limit() {
    // Only post-selections with probability >= 0.05 are compared; near
    // vanishing post-selection the finite-strength correction is not small.
    const double floor = 0.05;
    const auto rho = ideal_state(IdealState::psi_double_prime);
    const auto max_error = [&](double rh, double rv, int* points) {
        const auto meter = meter_from_reflectivities(rh, rv);
        double worst = 0.0;
        *points = 0;
        for (int t = 0; t < 180; ++t) {
            const auto chain = standard_chain(meter, t);
            for (int b1 = 0; b1 < 2; ++b1) {
                for (int b2 = 0; b2 < 2; ++b2) {
                    const oracle::Mat2 p1 = b1 == 0 ? oracle::polarizer(t) : oracle::Mat2(oracle::Mat2::Identity() - oracle::polarizer(t));
                    const oracle::Mat2 p2 = b2 == 0 ? oracle::polarizer(0) : oracle::polarizer(90);
                    const oracle::Mat4 pi = oracle::kron(p1, p2);
                    if ((pi * rho.matrix()).trace().real() < floor) continue;
                    ++*points;
                    const double ca = conditioned_average(chain, rho, {std::nullopt, b1, b2});
                    worst = std::max(worst, std::abs(ca - oracle::weak_value(rho.matrix(), pi)));
                }
            }
        }
        return worst;
    };
    int n1 = 0;
    int n2 = 0;
    const double e1 = max_error(0.490, 0.510, &n1);
    const double e2 = max_error(0.4999, 0.5001, &n2);
    report(8, e1 < 1e-2 && e2 < 1e-4 && n1 > 0 && n2 > 0,
           fmt("max |CA - weak value| = %.3e at (0.490, 0.510) (tol 1e-2), %.3e at (0.4999, 0.5001) (tol 1e-4); %d "
               "post-selections with probability >= %.2f",
               e1, e2, n1, floor));
}

void sampled_convergence() {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> u(0.0, 180.0);
    const auto rho = ideal_state(IdealState::psi_double_prime);
    double worst_z = 0.0;
    double worst_ratio = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double theta = u(rng);
        const auto chain = standard_chain(coverslip_meter(), theta);
        const auto exact = correlation_vector(chain, rho);
        const auto big = estimate_correlations(sample_counts(chain, rho, 1e6, 100 + static_cast<std::uint64_t>(k)), chain);
        const auto small = estimate_correlations(sample_counts(chain, rho, 1e4, 200 + static_cast<std::uint64_t>(k)), chain);
        for (std::size_t i = 0; i < exact.values().size(); ++i) {
            worst_z = std::max(worst_z, std::abs(big.values.values()[i] - exact.values()[i]) / big.std_errors[i]);
            worst_ratio = std::max(worst_ratio, std::abs(small.std_errors[i] / big.std_errors[i] / 10.0 - 1.0));
        }
    }
    report(9, worst_z <= 5.0 && worst_ratio <= 0.1,
           fmt("max |estimate - exact| / SE = %.2f over 10 angles x 7 entries (limit 5); SE(1e4)/SE(1e6) within "
               "%.1f%% of 10 (limit 10%%)",
               worst_z, 100.0 * worst_ratio));
}

void tomography_loop() {
    const auto settings = standard_tomography_settings();
    const auto truth = ideal_state(IdealState::psi);
    const auto run = mle_reconstruct(settings, simulate_tomography_counts(settings, truth, 1e5, 1010));
    const double f = fidelity(run.result, truth);
    const double c = concurrence(run.result);
    const double p = purity(run.result);
    report(10, f > 0.99 && std::abs(c - 1.0) <= 0.02 && std::abs(p - 1.0) <= 0.02,
           fmt("fidelity %.5f (> 0.99), concurrence %.5f, purity %.5f (within 0.02 of 1), %d iterations", f, c, p,
               run.iterations));
}

void probability_completeness() {
    std::mt19937_64 rng(1111);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_sum = 0.0;
    double worst_oracle = 0.0;
    double min_p = 1.0;
    for (int k = 0; k < 10000; ++k) {
        double rh = 0.0;
        double rv = 0.0;
        do {
            rh = u(rng);
            rv = u(rng);
        } while (std::abs(rh - rv) <= kDegenerateMeterTol);
        const double theta = 180.0 * u(rng);
        const auto rho = TwoQubitState::from_matrix(oracle::random_density(rng, 1 + k % 4));
        const auto chain = standard_chain(meter_from_reflectivities(rh, rv), theta);
        const auto p = joint_distribution(chain, rho);
        const auto kr = oracle::coverslip_kraus(rh, rv);
        const oracle::Mat2 pol = oracle::polarizer(theta);
        const oracle::Mat2 h = oracle::polarizer(0.0);
        const oracle::Mat2 id = oracle::Mat2::Identity();
        double sum = 0.0;
        for (std::size_t t = 0; t < 8; ++t) {
            const int a = (t >> 2) & 1;
            const int b1 = (t >> 1) & 1;
            const int b2 = t & 1;
            const double ref = oracle::joint_probability(
                {{kr[static_cast<std::size_t>(a)], 1}, {b1 == 0 ? pol : oracle::Mat2(id - pol), 1},
                 {b2 == 0 ? h : oracle::Mat2(id - h), 2}},
                rho.matrix());
            worst_oracle = std::max(worst_oracle, std::abs(p[t] - ref));
            min_p = std::min(min_p, p[t]);
            sum += p[t];
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    report(11, min_p >= 0.0 && worst_sum <= 1e-10 && worst_oracle <= 1e-12,
           fmt("10000 triples: min probability %.3e, max |sum - 1| %.3e (tol 1e-10), max |chain - trace oracle| "
               "%.3e (tol 1e-12)",
               min_p, worst_sum, worst_oracle));
}

} // namespace

int main() {
    run(1, contextual_values);
    run(2, enumeration_counts);
    run(3, bound_oracle);
    run(4, figure4);
    run(5, figure5);
    run(6, mr_soundness);
    run(7, invasive_counterexample);
    run(8, weak_value_limit);
    run(9, sampled_convergence);
    run(10, tomography_loop);
    run(11, probability_completeness);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
