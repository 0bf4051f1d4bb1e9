#include "lgsim/chain.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "lgsim/error.hpp"

namespace lgsim {

namespace {

MeterOutcome meter_outcome(int outcome) {
    return outcome == 0 ? MeterOutcome::reflected : MeterOutcome::transmitted;
}

void check_outcome(int outcome) {
    if (outcome != 0 && outcome != 1) {
        throw std::invalid_argument("outcome index must be 0 or 1");
    }
}

} // namespace

QubitOperator Detector::kraus(int outcome) const {
    check_outcome(outcome);
    if (const auto* sw = std::get_if<SemiWeakDetector>(&kind)) {
        return sw->meter.kraus(meter_outcome(outcome));
    }
    const auto& pd = std::get<ProjectiveDetector>(kind);
    const double s = outcome == 0 ? 1.0 : -1.0;
    return 0.5 * (identity2() + s * pd.observable);
}

double Detector::value(int outcome) const {
    check_outcome(outcome);
    if (const auto* sw = std::get_if<SemiWeakDetector>(&kind)) {
        return sw->sign * sw->meter.contextual_value(meter_outcome(outcome));
    }
    return outcome == 0 ? 1.0 : -1.0;
}

std::string Detector::outcome_label(int outcome) const {
    check_outcome(outcome);
    if (is_semi_weak()) {
        return outcome == 0 ? "r" : "t";
    }
    return std::get<ProjectiveDetector>(kind).outcome_labels[static_cast<std::size_t>(outcome)];
}

Detector semi_weak_detector(Party party, std::string label, const SemiWeakMeter& meter, double sign) {
    return Detector{party, std::move(label), SemiWeakDetector{meter, sign}};
}

Detector projective_detector(Party party, std::string label, const QubitOperator& observable,
                             std::array<std::string, 2> outcome_labels) {
    return Detector{party, std::move(label), ProjectiveDetector{observable, std::move(outcome_labels)}};
}

DetectorChain::DetectorChain(std::vector<Detector> detectors) : detectors_(std::move(detectors)) {
    if (detectors_.empty() || detectors_.size() > static_cast<std::size_t>(kMaxDetectors)) {
        throw std::invalid_argument("a detector chain holds between 1 and 4 detectors");
    }
    std::array<int, 2> meters_per_party{0, 0};
    for (const auto& d : detectors_) {
        if (d.party != Party::first && d.party != Party::second) {
            throw std::invalid_argument("detector '" + d.label + "' has an invalid party");
        }
        if (const auto* sw = std::get_if<SemiWeakDetector>(&d.kind)) {
            if (sw->sign != 1.0 && sw->sign != -1.0) {
                throw std::invalid_argument("semi-weak detector sign must be +1 or -1");
            }
            if (++meters_per_party[d.party == Party::first ? 0 : 1] > 1) {
                throw std::invalid_argument("at most one semi-weak meter per party");
            }
        } else if (!is_dichotomic_observable(std::get<ProjectiveDetector>(d.kind).observable)) {
            throw std::invalid_argument("projective detector '" + d.label +
                                        "' needs a Hermitian observable with eigenvalues +-1");
        }
    }
}

OutcomeValues DetectorChain::outcome_values() const {
    OutcomeValues out;
    out.reserve(detectors_.size());
    for (const auto& d : detectors_) {
        out.push_back({d.value(0), d.value(1)});
    }
    return out;
}

std::vector<int> DetectorChain::semi_weak_indices() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) {
        if (detectors_[static_cast<std::size_t>(i)].is_semi_weak()) out.push_back(i);
    }
    return out;
}

std::vector<int> DetectorChain::projective_indices() const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) {
        if (!detectors_[static_cast<std::size_t>(i)].is_semi_weak()) out.push_back(i);
    }
    return out;
}

std::string DetectorChain::subset_label(SubsetMask subset) const {
    std::string out;
    for (int i = 0; i < size(); ++i) {
        if (subset & (1u << i)) out += detectors_[static_cast<std::size_t>(i)].label;
    }
    return out;
}

std::string DetectorChain::outcome_tuple_label(std::size_t tuple) const {
    std::string out;
    const int m = size();
    for (int i = 0; i < m; ++i) {
        if (i > 0) out += ':';
        out += detectors_[static_cast<std::size_t>(i)].outcome_label(outcome_of(tuple, i, m));
    }
    return out;
}

DetectorChain standard_chain(const SemiWeakMeter& meter, double theta_deg, double a1_sign) {
    return DetectorChain({
        semi_weak_detector(Party::first, "A1", meter, a1_sign),
        projective_detector(Party::first, "B1", stokes_theta(theta_deg), {"theta", "theta_perp"}),
        projective_detector(Party::second, "B2", sigma_z(), {"h", "v"}),
    });
}

DetectorChain four_detector_chain(const SemiWeakMeter& meter1, const SemiWeakMeter& meter2,
                                  double theta_deg) {
    return DetectorChain({
        semi_weak_detector(Party::first, "A1", meter1),
        semi_weak_detector(Party::second, "A2", meter2),
        projective_detector(Party::first, "B1", stokes_theta(theta_deg), {"theta", "theta_perp"}),
        projective_detector(Party::second, "B2", sigma_z(), {"h", "v"}),
    });
}

std::vector<SubsetMask> canonical_subsets(int m) {
    if (m < 1 || m > kMaxDetectors) {
        throw UnsupportedSize("detector count must be between 1 and 4");
    }
    std::vector<SubsetMask> out((std::size_t{1} << m) - 1);
    std::iota(out.begin(), out.end(), SubsetMask{1});
    const auto members = [m](SubsetMask s) {
        std::vector<int> idx;
        for (int i = 0; i < m; ++i) {
            if (s & (1u << i)) idx.push_back(i);
        }
        return idx;
    };
    std::sort(out.begin(), out.end(), [&](SubsetMask a, SubsetMask b) {
        const auto ma = members(a);
        const auto mb = members(b);
        if (ma.size() != mb.size()) return ma.size() < mb.size();
        return ma < mb;
    });
    return out;
}

namespace {

void walk(const DetectorChain& chain, const std::vector<std::array<TwoQubitOperator, 2>>& kraus,
          int depth, std::size_t tuple, const TwoQubitOperator& state, std::vector<double>& out) {
    if (depth == chain.size()) {
        out[tuple] = std::max(0.0, state.trace().real());
        return;
    }
    for (int o = 0; o < 2; ++o) {
        const auto& k = kraus[static_cast<std::size_t>(depth)][static_cast<std::size_t>(o)];
        const TwoQubitOperator next = k * state * k.adjoint();
        walk(chain, kraus, depth + 1, (tuple << 1) | static_cast<std::size_t>(o), next, out);
    }
}

} // namespace

std::vector<double> joint_distribution(const DetectorChain& chain, const TwoQubitState& rho) {
    std::vector<std::array<TwoQubitOperator, 2>> kraus;
    kraus.reserve(static_cast<std::size_t>(chain.size()));
    for (const auto& d : chain.detectors()) {
        kraus.push_back({embed(d.kraus(0), d.party), embed(d.kraus(1), d.party)});
    }
    std::vector<double> out(chain.outcome_count(), 0.0);
    walk(chain, kraus, 0, 0, rho.matrix(), out);
    return out;
}

double joint_probability(const DetectorChain& chain, const TwoQubitState& rho,
                         std::span<const int> outcomes) {
    if (static_cast<int>(outcomes.size()) != chain.size()) {
        throw std::invalid_argument("need one outcome per detector");
    }
    TwoQubitOperator state = rho.matrix();
    for (int i = 0; i < chain.size(); ++i) {
        const auto& d = chain[i];
        const TwoQubitOperator k = embed(d.kraus(outcomes[static_cast<std::size_t>(i)]), d.party);
        state = (k * state * k.adjoint()).eval();
    }
    return std::max(0.0, state.trace().real());
}

CorrelationVector::CorrelationVector(int m, std::vector<double> values)
    : m_(m), subsets_(canonical_subsets(m)), values_(std::move(values)) {
    if (values_.size() != subsets_.size()) {
        throw std::invalid_argument("correlation vector needs 2^m - 1 entries");
    }
    index_of_.fill(-1);
    for (std::size_t i = 0; i < subsets_.size(); ++i) {
        index_of_[subsets_[i]] = static_cast<int>(i);
    }
}

double CorrelationVector::operator[](SubsetMask subset) const {
    if (subset == 0 || subset >= (1u << m_)) {
        throw std::out_of_range("subset outside this correlation vector");
    }
    return values_[static_cast<std::size_t>(index_of_[subset])];
}

CorrelationVector correlations_from_weights(std::span<const double> weights, const OutcomeValues& values) {
    const int m = static_cast<int>(values.size());
    if (weights.size() != (std::size_t{1} << m)) {
        throw std::invalid_argument("weight table size does not match the detector count");
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) {
        throw EmptyData("outcome table is empty");
    }
    const auto subsets = canonical_subsets(m);
    std::vector<double> out(subsets.size(), 0.0);
    for (std::size_t tuple = 0; tuple < weights.size(); ++tuple) {
        const double w = weights[tuple];
        if (w == 0.0) continue;
        for (std::size_t s = 0; s < subsets.size(); ++s) {
            double product = 1.0;
            for (int i = 0; i < m; ++i) {
                if (subsets[s] & (1u << i)) {
                    product *= values[static_cast<std::size_t>(i)]
                                     [static_cast<std::size_t>(outcome_of(tuple, i, m))];
                }
            }
            out[s] += w * product;
        }
    }
    for (auto& v : out) v /= total;
    return CorrelationVector(m, std::move(out));
}

CorrelationVector correlation_vector(const DetectorChain& chain, const TwoQubitState& rho) {
    const auto dist = joint_distribution(chain, rho);
    return correlations_from_weights(dist, chain.outcome_values());
}

} // namespace lgsim
