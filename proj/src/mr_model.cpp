#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lgsim/error.hpp"
#include "lgsim/simulate.hpp"
#include "rng.hpp"

namespace lgsim {

namespace {

constexpr double kRowTol = 1e-12;
constexpr double kCalibrationTol = 1e-10;

double hidden_value(int index) { return index == 0 ? 1.0 : -1.0; }

void check_row(std::span<const double> row, const char* what) {
    double sum = 0.0;
    for (double p : row) {
        if (!(p >= 0.0)) {
            throw std::invalid_argument(std::string(what) + ": negative probability");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTol) {
        std::ostringstream msg;
        msg << what << ": probabilities sum to " << sum;
        throw std::invalid_argument(msg.str());
    }
}

} // namespace

bool MrModel::ambiguous() const noexcept {
    // An unambiguous detector reports the hidden value itself.
    const bool identity = (response[0][0] == 1.0 && response[1][1] == 1.0 && values[0] == 1.0 &&
                           values[1] == -1.0) ||
                          (response[0][1] == 1.0 && response[1][0] == 1.0 && values[1] == 1.0 &&
                           values[0] == -1.0);
    return !identity;
}

void MrModel::validate() const {
    check_row(ensemble, "ensemble");
    for (int a = 0; a < 2; ++a) {
        check_row(response[static_cast<std::size_t>(a)], "detector response");
        const double mean = values[0] * response[static_cast<std::size_t>(a)][0] +
                            values[1] * response[static_cast<std::size_t>(a)][1];
        if (std::abs(mean - hidden_value(a)) > kCalibrationTol) {
            std::ostringstream msg;
            msg << "detector is not calibrated: reports mean " << mean << " for a = " << hidden_value(a);
            throw std::invalid_argument(msg.str());
        }
    }
    if (disturbance) {
        for (const auto& per_report : *disturbance) {
            for (const auto& row : per_report) {
                check_row(row, "disturbance");
            }
        }
    }
}

std::vector<double> MrModel::joint_distribution() const {
    std::vector<double> out(8, 0.0);
    for (int hidden = 0; hidden < 8; ++hidden) {
        const double p_hidden = ensemble[static_cast<std::size_t>(hidden)];
        if (p_hidden == 0.0) continue;
        const int a = hidden >> 2;
        const int pair = hidden & 3;
        for (int k = 0; k < 2; ++k) {
            const double p_report = p_hidden * response[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)];
            if (disturbance) {
                const auto& row = (*disturbance)[static_cast<std::size_t>(k)][static_cast<std::size_t>(pair)];
                for (int out_pair = 0; out_pair < 4; ++out_pair) {
                    out[static_cast<std::size_t>(4 * k + out_pair)] += p_report * row[static_cast<std::size_t>(out_pair)];
                }
            } else {
                out[static_cast<std::size_t>(4 * k + pair)] += p_report;
            }
        }
    }
    return out;
}

OutcomeValues MrModel::outcome_values() const {
    return {{values[0], values[1]}, {1.0, -1.0}, {1.0, -1.0}};
}

std::array<double, 2> MrModel::calibrated_values(double q_plus, double q_minus) {
    const double d = q_plus - q_minus;
    if (std::abs(d) <= kDegenerateMeterTol) {
        throw DegenerateMeter("detector response does not depend on the hidden value");
    }
    // Solves v0 q + v1 (1 - q) = +-1 for both hidden values.
    return {(2.0 - q_plus - q_minus) / d, -(q_plus + q_minus) / d};
}

MrModel MrModel::noninvasive(const std::array<double, 8>& ensemble, double q_plus, double q_minus) {
    MrModel m;
    m.ensemble = ensemble;
    m.response = {{{q_plus, 1.0 - q_plus}, {q_minus, 1.0 - q_minus}}};
    m.values = calibrated_values(q_plus, q_minus);
    m.validate();
    return m;
}

CountTable sample_mr(const MrModel& model, std::uint64_t n, std::uint64_t seed) {
    model.validate();
    auto rng = make_rng(seed);
    std::discrete_distribution<int> pick_hidden(model.ensemble.begin(), model.ensemble.end());
    std::array<std::discrete_distribution<int>, 2> pick_report{
        std::discrete_distribution<int>(model.response[0].begin(), model.response[0].end()),
        std::discrete_distribution<int>(model.response[1].begin(), model.response[1].end()),
    };
    std::array<std::array<std::discrete_distribution<int>, 4>, 2> pick_disturbed;
    if (model.disturbance) {
        for (std::size_t k = 0; k < 2; ++k) {
            for (std::size_t pair = 0; pair < 4; ++pair) {
                const auto& row = (*model.disturbance)[k][pair];
                pick_disturbed[k][pair] = std::discrete_distribution<int>(row.begin(), row.end());
            }
        }
    }

    CountTable table;
    table.detector_count = 3;
    table.counts.assign(8, 0);
    table.pairs_expected = static_cast<double>(n);
    table.seed = seed;
    for (std::uint64_t i = 0; i < n; ++i) {
        const int hidden = pick_hidden(rng);
        const int a = hidden >> 2;
        int pair = hidden & 3;
        const int k = pick_report[static_cast<std::size_t>(a)](rng);
        if (model.disturbance) {
            pair = pick_disturbed[static_cast<std::size_t>(k)][static_cast<std::size_t>(pair)](rng);
        }
        ++table.counts[static_cast<std::size_t>(4 * k + pair)];
    }
    return table;
}

double mr_three_term_correlation(const MrModel& model) {
    const auto dist = model.joint_distribution();
    double c = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double alpha = model.values[static_cast<std::size_t>(k)];
        for (int pair = 0; pair < 4; ++pair) {
            const double b1b2 = hidden_value(pair >> 1) * hidden_value(pair & 1);
            c += dist[static_cast<std::size_t>(4 * k + pair)] * (alpha + alpha * b1b2 - b1b2);
        }
    }
    return c;
}

namespace {

std::array<std::array<double, 4>, 4> flip_map(double flip_b1, double flip_b2) {
    std::array<std::array<double, 4>, 4> map{};
    for (int in = 0; in < 4; ++in) {
        for (int out = 0; out < 4; ++out) {
            const bool b1_flipped = ((in ^ out) & 2) != 0;
            const bool b2_flipped = ((in ^ out) & 1) != 0;
            map[static_cast<std::size_t>(in)][static_cast<std::size_t>(out)] =
                (b1_flipped ? flip_b1 : 1.0 - flip_b1) * (b2_flipped ? flip_b2 : 1.0 - flip_b2);
        }
    }
    return map;
}

constexpr double kSearchQPlus = 0.039;
constexpr double kSearchQMinus = 0.175;

} // namespace

MrModel search_invasive_ambiguous_model() {
    constexpr std::array<double, 5> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    MrModel best;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int hidden = 0; hidden < 8; ++hidden) {
        std::array<double, 8> ensemble{};
        ensemble[static_cast<std::size_t>(hidden)] = 1.0;
        MrModel model = MrModel::noninvasive(ensemble, kSearchQPlus, kSearchQMinus);
        for (double r1 : grid) {
            for (double r2 : grid) {
                for (double t1 : grid) {
                    for (double t2 : grid) {
                        model.disturbance = std::array<std::array<std::array<double, 4>, 4>, 2>{
                            flip_map(r1, r2), flip_map(t1, t2)};
                        const double value = mr_three_term_correlation(model);
                        if (value > best_value) {
                            best_value = value;
                            best = model;
                        }
                    }
                }
            }
        }
    }
    return best;
}

MrModel invasive_ambiguous_fixture() {
    // All pairs start in (a1, b1, b2) = (+1, +1, +1). A reflected report flips
    // b2, a transmitted report leaves the pair alone.
    MrModel m = MrModel::noninvasive({1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, kSearchQPlus, kSearchQMinus);
    m.disturbance = std::array<std::array<std::array<double, 4>, 4>, 2>{flip_map(0.0, 1.0), flip_map(0.0, 0.0)};
    return m;
}

} // namespace lgsim
