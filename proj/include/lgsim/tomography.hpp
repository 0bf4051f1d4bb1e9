#pragma once

// Maximum-likelihood reconstruction of a two-qubit polarization state from
// coincidence counts of product projective measurements, plus the usual
// entanglement and mixedness figures of merit.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lgsim/qstate.hpp"

namespace lgsim {

struct TomographySetting {
    std::string label; // e.g. "HV": party-1 projector H, party-2 projector V
    QubitOperator party1;
    QubitOperator party2;
};

/// The sixteen product settings HH HV VV VH RH RV DV DH DR DD RD HD VD VL HL RL
/// (H, V, D, R, L = horizontal, vertical, diagonal, right- and left-circular).
std::vector<TomographySetting> standard_tomography_settings();

/// Builds a setting from a two-letter label over {H, V, D, A, R, L}.
/// Throws std::invalid_argument for unknown letters.
TomographySetting tomography_setting(const std::string& label);

struct TomographyOptions {
    double tolerance = 1e-10;   // relative log-likelihood change
    int max_iterations = 10000;
};

struct TomographyRun {
    std::vector<TomographySetting> settings;
    std::vector<std::uint64_t> counts;
    TwoQubitState result = TwoQubitState::maximally_mixed();
    double log_likelihood = 0.0;
    int iterations = 0;
    /// Log-likelihood after every accepted step, starting with the initial
    /// point.
    std::vector<double> trace;
};

/// rho = T^dagger T / Tr(T^dagger T) with T lower triangular (real diagonal),
/// fitted by gradient ascent with backtracking on the Poisson log-likelihood
/// sum_i n_i log mu_i - mu_i, mu_i = Tr[(P_i x Q_i) T^dagger T].
///
/// Throws InsufficientSettings when the settings do not span the 16 real
/// parameters or all counts are zero, NonConvergence when the iteration cap
/// is reached.
TomographyRun mle_reconstruct(std::span<const TomographySetting> settings, std::span<const std::uint64_t> counts,
                              const TomographyOptions& options = {});

/// Poisson counts with mean pairs_per_setting * Tr[(P x Q) rho].
std::vector<std::uint64_t> simulate_tomography_counts(std::span<const TomographySetting> settings,
                                                      const TwoQubitState& rho, double pairs_per_setting,
                                                      std::uint64_t seed);

/// Wootters concurrence max(0, l1 - l2 - l3 - l4).
double concurrence(const TwoQubitState& rho);
/// Tr(rho^2).
double purity(const TwoQubitState& rho);
/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const TwoQubitState& rho, const TwoQubitState& sigma);

} // namespace lgsim
