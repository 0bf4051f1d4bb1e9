#pragma once

// Scenario configuration and the two batch drivers behind the command-line
// tool: theta sweeps (per-angle correlations, conditioned averages, convex
// sum and configured inequalities) and exhaustive inequality scans.
//
// Scenario JSON (every key optional except where noted):
//
//   {
//     "state": "psi" | "psi_double_prime" | {"file": "rho.json"},
//     "meter":  {"r_h": 0.0390, "r_v": 0.175, "r_h_err": 0.0007, "r_v_err": 0.001},
//     "meter2": {"r_h": ..., "r_v": ...},            // second meter, m = 4 only
//     "theta_grid": {"start": 0, "stop": 179, "step": 1},
//     "detectors": [                                  // default: A1, B1, B2
//       {"label": "A1", "party": 1, "kind": "semi_weak", "meter": 1, "sign": 1},
//       {"label": "B1", "party": 1, "kind": "projective", "observable": "sigma_theta"},
//       {"label": "B2", "party": 2, "kind": "projective", "observable": "sigma_z"}
//     ],
//     "mode": "analytic" | {"sampled": {"pairs": 1e6, "seed": 42}},
//     "specs": [{"A1": -1, "A1B1B2": -1, "B1B2": -1}],
//     "convex_sum_sign": -1
//   }
//
// Projective observables: "sigma_z", "sigma_x", "sigma_theta" (follows the
// sweep angle, optional "offset_deg"), or {"angle": deg} for a fixed
// polarizer. A "sign" of -1 on any detector negates its observable.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "lgsim/chain.hpp"
#include "lgsim/lgi.hpp"
#include "lgsim/meter.hpp"
#include "lgsim/qstate.hpp"

namespace lgsim {

struct ThetaGrid {
    double start = 0.0;
    double stop = 179.0;
    double step = 1.0;

    /// start, start + step, ... up to and including stop (within 1e-9 step).
    std::vector<double> points() const;
};

struct MeterConfig {
    double r_h = 0.0390;
    double r_v = 0.175;
    double r_h_err = 0.0;
    double r_v_err = 0.0;

    SemiWeakMeter meter() const { return SemiWeakMeter::from_reflectivities(r_h, r_v); }
};

struct DetectorConfig {
    enum class Kind { semi_weak, projective };
    enum class Observable { sigma_z, sigma_x, sigma_theta, fixed_angle };

    std::string label;
    Party party = Party::first;
    Kind kind = Kind::projective;
    double sign = 1.0;
    int meter = 1;                       // semi-weak: 1 -> "meter", 2 -> "meter2"
    Observable observable = Observable::sigma_z;
    double angle_deg = 0.0;              // offset for sigma_theta, angle for fixed_angle
};

struct SampledMode {
    double pairs = 1e6;
    std::uint64_t seed = 42;
};

struct Scenario {
    std::string name = "custom";
    std::variant<IdealState, std::filesystem::path> state_source = IdealState::psi_double_prime;
    TwoQubitState state = ideal_state(IdealState::psi_double_prime);
    MeterConfig meter;
    std::optional<MeterConfig> meter2;
    ThetaGrid grid;
    std::vector<DetectorConfig> detectors;
    std::optional<SampledMode> sampled;
    std::vector<LgiSpec> specs;
    double convex_sum_sign = 1.0;

    /// The configured chain at sweep angle theta.
    DetectorChain chain(double theta_deg) const;
};

std::vector<DetectorConfig> standard_detector_configs();

/// Throws ConfigError with the offending field path. Relative state-file
/// paths resolve against `base_dir`.
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
/// Reads and parses a scenario file; JSON syntax errors report line and
/// column.
Scenario load_scenario(const std::filesystem::path& path);

/// Built-in scenarios "fig3", "fig4", "fig5". Throws ConfigError otherwise.
Scenario preset_scenario(std::string_view name);
std::vector<std::string> preset_names();

struct SweepOptions {
    unsigned threads = 0; // 0: hardware concurrency
    std::optional<std::filesystem::path> counts_dir;
};

/// Writes one CSV row per grid angle. Rows are ordered by theta regardless of
/// worker completion order.
void run_sweep(const Scenario& scenario, std::ostream& os, const SweepOptions& options = {});

/// Chain used by scan_all for m detectors: the configured chain when it has m
/// detectors, otherwise A1 | A1 B1 | A1 B1 B2 | A1 A2 B1 B2.
DetectorChain scan_chain(const Scenario& scenario, int m, double theta_deg);

struct ScanOptions {
    unsigned threads = 0;
    bool summary_only = false;
    std::uint64_t chunk_size = 1u << 16;
};

struct ScanSummary {
    std::vector<double> thetas;
    std::vector<std::uint64_t> violated;
};

/// Streams every enumerated inequality that the correlations at each grid
/// angle push outside its macrorealist bounds, as CSV rows
/// theta_deg,spec_id,value,lower,upper,violated ("upper"/"lower"), followed
/// by a "theta_deg,total,<count>,,," row per angle. Memory use is bounded by
/// the chunk size times the thread count.
ScanSummary scan_all(const Scenario& scenario, int m, std::ostream& os, const ScanOptions& options = {});

} // namespace lgsim
