#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lgsim/error.hpp"
#include "lgsim/io.hpp"
#include "lgsim/scenario.hpp"
#include "lgsim/tomography.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Args {
    std::string scenario;
    std::string preset;
    std::string mode;
    std::optional<double> pairs;
    std::optional<std::uint64_t> seed;
    std::optional<int> scan_m;
    std::string out;
    bool summary_only = false;
    unsigned threads = 0;
    std::string counts_dir;
    std::string tomography;
    std::string tomo_simulate;
    bool list_presets = false;
};

lgsim::Scenario resolve_scenario(const Args& a) {
    if (!a.scenario.empty() && !a.preset.empty()) {
        throw lgsim::ConfigError("--scenario and --preset are mutually exclusive");
    }
    lgsim::Scenario s = !a.scenario.empty() ? lgsim::load_scenario(a.scenario)
                        : !a.preset.empty() ? lgsim::preset_scenario(a.preset)
                                            : lgsim::parse_scenario(nlohmann::json::object());
    if (a.mode == "analytic") {
        s.sampled.reset();
    } else if (a.mode == "sampled") {
        if (!s.sampled) s.sampled = lgsim::SampledMode{};
    } else if (!a.mode.empty()) {
        throw lgsim::ConfigError("--mode must be analytic or sampled");
    }
    if ((a.pairs || a.seed) && !s.sampled) {
        throw lgsim::ConfigError("--pairs and --seed require sampled mode");
    }
    if (a.pairs) {
        if (!(*a.pairs > 0.0)) throw lgsim::ConfigError("--pairs must be positive");
        s.sampled->pairs = *a.pairs;
    }
    if (a.seed) s.sampled->seed = *a.seed;
    return s;
}

int run_tomography(const Args& a, std::ostream& out) {
    std::ifstream in(a.tomography);
    if (!in) throw lgsim::ConfigError("cannot open " + a.tomography);
    const auto data = lgsim::read_tomography_counts(in);
    const auto run = lgsim::mle_reconstruct(data.settings, data.counts);
    out << lgsim::tomography_result_to_json(run).dump(2) << '\n';
    return 0;
}

int run_tomo_simulate(const Args& a, std::ostream& out) {
    lgsim::TwoQubitState rho = lgsim::ideal_state(lgsim::IdealState::psi);
    if (a.tomo_simulate == "psi_double_prime") {
        rho = lgsim::ideal_state(lgsim::IdealState::psi_double_prime);
    } else if (a.tomo_simulate != "psi") {
        rho = lgsim::load_density_matrix(a.tomo_simulate);
    }
    const auto settings = lgsim::standard_tomography_settings();
    const double pairs = a.pairs.value_or(1e5);
    const auto counts = lgsim::simulate_tomography_counts(settings, rho, pairs, a.seed.value_or(42));
    lgsim::write_tomography_counts(out, settings, counts);
    return 0;
}

int run(const Args& a) {
    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw lgsim::ConfigError("cannot write " + a.out);
    }
    std::ostream& out = a.out.empty() ? std::cout : file;

    if (a.list_presets) {
        for (const auto& name : lgsim::preset_names()) out << name << '\n';
        return 0;
    }
    if (!a.tomography.empty()) return run_tomography(a, out);
    if (!a.tomo_simulate.empty()) return run_tomo_simulate(a, out);

    const lgsim::Scenario scenario = resolve_scenario(a);
    if (a.scan_m) {
        lgsim::ScanOptions options;
        options.threads = a.threads;
        options.summary_only = a.summary_only;
        lgsim::scan_all(scenario, *a.scan_m, out, options);
    } else {
        lgsim::SweepOptions options;
        options.threads = a.threads;
        if (!a.counts_dir.empty()) options.counts_dir = a.counts_dir;
        lgsim::run_sweep(scenario, out, options);
    }
    out.flush();
    if (!out) throw lgsim::Error("write failed");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-party Leggett-Garg simulator with semi-weak measurements"};
    Args a;
    app.add_option("--scenario", a.scenario, "Scenario JSON file");
    app.add_option("--preset", a.preset, "Built-in scenario (fig3, fig4, fig5)");
    app.add_option("--mode", a.mode, "analytic or sampled")->check(CLI::IsMember({"analytic", "sampled"}));
    app.add_option("--pairs", a.pairs, "Expected pair count per grid point (sampled mode)");
    app.add_option("--seed", a.seed, "Base RNG seed (sampled mode)");
    app.add_option("--scan-m", a.scan_m, "Scan every inequality over M detectors instead of sweeping")
        ->check(CLI::Range(1, 4));
    app.add_option("--out", a.out, "Output file (default: stdout)");
    app.add_flag("--summary-only", a.summary_only, "Scan: print only per-angle totals");
    app.add_option("--threads", a.threads, "Worker threads (0: all cores)");
    app.add_option("--counts-dir", a.counts_dir, "Sampled sweep: write per-angle count tables here");
    app.add_option("--tomography", a.tomography, "Reconstruct a state from a tomography counts CSV");
    app.add_option("--tomo-simulate", a.tomo_simulate,
                   "Write simulated tomography counts for psi, psi_double_prime or a density-matrix file");
    app.add_flag("--list-presets", a.list_presets, "List built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        return run(a);
    } catch (const lgsim::ConfigError& e) {
        std::fprintf(stderr, "lgsim: config error: %s\n", e.what());
        return kExitConfig;
    } catch (const lgsim::Error& e) {
        std::fprintf(stderr, "lgsim: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "lgsim: config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "lgsim: %s\n", e.what());
        return kExitNumerical;
    }
}
