#include "lgsim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iterator>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "lgsim/error.hpp"
#include "lgsim/io.hpp"
#include "lgsim/simulate.hpp"

namespace lgsim {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers and rethrows the first
// exception.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    return format_double(x);
}

// ---------------------------------------------------------------------------
// JSON field access with path diagnostics.

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

double get_number(const nlohmann::json& j, const std::string& key, const std::string& path, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number()) field_error(path + "." + key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) field_error(path + "." + key, "expected a finite number");
    return x;
}

double require_number(const nlohmann::json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) field_error(path + "." + key, "missing");
    return get_number(j, key, path, 0.0);
}

double get_sign(const nlohmann::json& j, const std::string& path) {
    const double s = get_number(j, "sign", path, 1.0);
    if (s != 1.0 && s != -1.0) field_error(path + ".sign", "must be 1 or -1");
    return s;
}

MeterConfig parse_meter(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) field_error(path, "expected an object with r_h and r_v");
    MeterConfig m;
    m.r_h = require_number(j, "r_h", path);
    m.r_v = require_number(j, "r_v", path);
    m.r_h_err = get_number(j, "r_h_err", path, 0.0);
    m.r_v_err = get_number(j, "r_v_err", path, 0.0);
    try {
        (void)m.meter();
    } catch (const std::exception& e) {
        field_error(path, e.what());
    }
    return m;
}

DetectorConfig parse_detector(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) field_error(path, "expected an object");
    DetectorConfig d;
    if (!j.contains("label") || !j.at("label").is_string() || j.at("label").get<std::string>().empty()) {
        field_error(path + ".label", "expected a nonempty string");
    }
    d.label = j.at("label").get<std::string>();
    const double party = require_number(j, "party", path);
    if (party != 1.0 && party != 2.0) field_error(path + ".party", "must be 1 or 2");
    d.party = party == 1.0 ? Party::first : Party::second;
    d.sign = get_sign(j, path);

    const std::string kind = j.value("kind", std::string("projective"));
    if (kind == "semi_weak") {
        d.kind = DetectorConfig::Kind::semi_weak;
        const double meter = get_number(j, "meter", path, 1.0);
        if (meter != 1.0 && meter != 2.0) field_error(path + ".meter", "must be 1 or 2");
        d.meter = static_cast<int>(meter);
        return d;
    }
    if (kind != "projective") field_error(path + ".kind", "must be \"semi_weak\" or \"projective\"");
    d.kind = DetectorConfig::Kind::projective;
    if (!j.contains("observable")) field_error(path + ".observable", "missing");
    const auto& obs = j.at("observable");
    if (obs.is_string()) {
        const auto name = obs.get<std::string>();
        if (name == "sigma_z") {
            d.observable = DetectorConfig::Observable::sigma_z;
        } else if (name == "sigma_x") {
            d.observable = DetectorConfig::Observable::sigma_x;
        } else if (name == "sigma_theta") {
            d.observable = DetectorConfig::Observable::sigma_theta;
            d.angle_deg = get_number(j, "offset_deg", path, 0.0);
        } else {
            field_error(path + ".observable", "unknown observable \"" + name + "\"");
        }
    } else if (obs.is_object() && obs.contains("angle")) {
        d.observable = DetectorConfig::Observable::fixed_angle;
        d.angle_deg = require_number(obs, "angle", path + ".observable");
    } else {
        field_error(path + ".observable", "expected a name or {\"angle\": deg}");
    }
    return d;
}

Detector build_detector(const DetectorConfig& c, const Scenario& s, double theta_deg) {
    if (c.kind == DetectorConfig::Kind::semi_weak) {
        const MeterConfig& mc = c.meter == 2 && s.meter2 ? *s.meter2 : s.meter;
        return semi_weak_detector(c.party, c.label, mc.meter(), c.sign);
    }
    QubitOperator obs;
    std::array<std::string, 2> labels{"+", "-"};
    switch (c.observable) {
    case DetectorConfig::Observable::sigma_z:
        obs = sigma_z();
        labels = {"h", "v"};
        break;
    case DetectorConfig::Observable::sigma_x:
        obs = sigma_x();
        labels = {"a", "d"};
        break;
    case DetectorConfig::Observable::sigma_theta:
        obs = stokes_theta(theta_deg + c.angle_deg);
        labels = {"theta", "theta_perp"};
        break;
    case DetectorConfig::Observable::fixed_angle:
        obs = stokes_theta(c.angle_deg);
        labels = {"+", "-"};
        break;
    }
    if (c.sign < 0.0) {
        obs = -obs;
        std::swap(labels[0], labels[1]);
    }
    return projective_detector(c.party, c.label, obs, labels);
}

DetectorChain build_chain(const Scenario& s, std::span<const DetectorConfig> configs, double theta_deg) {
    std::vector<Detector> detectors;
    detectors.reserve(configs.size());
    for (const auto& c : configs) detectors.push_back(build_detector(c, s, theta_deg));
    return DetectorChain(std::move(detectors));
}

std::size_t line_of_offset(const std::string& text, std::size_t offset, std::size_t* column) {
    offset = std::min(offset, text.size());
    std::size_t line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            line_start = i + 1;
        }
    }
    if (column != nullptr) *column = offset - line_start + 1;
    return line;
}

} // namespace

std::vector<double> ThetaGrid::points() const {
    std::vector<double> out;
    if (!(step > 0.0) || stop < start) return out;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
}

DetectorChain Scenario::chain(double theta_deg) const { return build_chain(*this, detectors, theta_deg); }

std::vector<DetectorConfig> standard_detector_configs() {
    DetectorConfig a1;
    a1.label = "A1";
    a1.party = Party::first;
    a1.kind = DetectorConfig::Kind::semi_weak;
    DetectorConfig b1;
    b1.label = "B1";
    b1.party = Party::first;
    b1.observable = DetectorConfig::Observable::sigma_theta;
    DetectorConfig b2;
    b2.label = "B2";
    b2.party = Party::second;
    b2.observable = DetectorConfig::Observable::sigma_z;
    return {a1, b1, b2};
}

Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) field_error("scenario", "expected a JSON object");
    static const std::array<std::string_view, 9> known{"name", "state", "meter", "meter2", "theta_grid",
                                                       "detectors", "mode", "specs", "convex_sum_sign"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            field_error("scenario." + key, "unknown field");
        }
    }

    Scenario s;
    if (j.contains("name")) {
        if (!j.at("name").is_string()) field_error("scenario.name", "expected a string");
        s.name = j.at("name").get<std::string>();
    }

    if (j.contains("state")) {
        const auto& st = j.at("state");
        if (st.is_string()) {
            const auto name = st.get<std::string>();
            if (name == "psi") {
                s.state_source = IdealState::psi;
            } else if (name == "psi_double_prime") {
                s.state_source = IdealState::psi_double_prime;
            } else {
                field_error("scenario.state", "unknown state \"" + name + "\"");
            }
        } else if (st.is_object() && st.contains("file") && st.at("file").is_string()) {
            std::filesystem::path p = st.at("file").get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            s.state_source = p;
        } else {
            field_error("scenario.state", "expected \"psi\", \"psi_double_prime\" or {\"file\": path}");
        }
    }
    if (const auto* ideal = std::get_if<IdealState>(&s.state_source)) {
        s.state = ideal_state(*ideal);
    } else {
        const auto& path = std::get<std::filesystem::path>(s.state_source);
        try {
            double correction = 0.0;
            s.state = load_density_matrix(path, &correction);
            if (correction > kSymmetrizeWarnTol) {
                std::fprintf(stderr, "warning: %s: Hermiticity correction %.3g applied\n", path.string().c_str(),
                             correction);
            }
        } catch (const ConfigError& e) {
            field_error("scenario.state.file", e.what());
        } catch (const InvalidState& e) {
            field_error("scenario.state.file", path.string() + ": " + e.what());
        }
    }

    if (j.contains("meter")) s.meter = parse_meter(j.at("meter"), "scenario.meter");
    if (j.contains("meter2")) s.meter2 = parse_meter(j.at("meter2"), "scenario.meter2");

    if (j.contains("theta_grid")) {
        const auto& g = j.at("theta_grid");
        if (!g.is_object()) field_error("scenario.theta_grid", "expected an object");
        s.grid.start = get_number(g, "start", "scenario.theta_grid", s.grid.start);
        s.grid.stop = get_number(g, "stop", "scenario.theta_grid", s.grid.stop);
        s.grid.step = get_number(g, "step", "scenario.theta_grid", s.grid.step);
    }
    if (!(s.grid.step > 0.0)) field_error("scenario.theta_grid.step", "must be positive");
    if (s.grid.stop < s.grid.start) field_error("scenario.theta_grid", "stop lies before start");

    if (j.contains("detectors")) {
        const auto& ds = j.at("detectors");
        if (!ds.is_array() || ds.empty()) field_error("scenario.detectors", "expected a nonempty array");
        for (std::size_t i = 0; i < ds.size(); ++i) {
            s.detectors.push_back(parse_detector(ds[i], "scenario.detectors[" + std::to_string(i) + "]"));
        }
    } else {
        s.detectors = standard_detector_configs();
    }
    for (const auto& d : s.detectors) {
        if (d.kind == DetectorConfig::Kind::semi_weak && d.meter == 2 && !s.meter2) {
            field_error("scenario.meter2", "required by detector " + d.label);
        }
    }
    std::optional<DetectorChain> chain;
    try {
        chain.emplace(s.chain(s.grid.start));
    } catch (const std::invalid_argument& e) {
        field_error("scenario.detectors", e.what());
    }
    for (std::size_t i = 0; i < s.detectors.size(); ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            if (s.detectors[i].label == s.detectors[k].label) {
                field_error("scenario.detectors[" + std::to_string(i) + "].label", "duplicate label");
            }
        }
    }

    if (j.contains("mode")) {
        const auto& mode = j.at("mode");
        if (mode.is_string() && mode.get<std::string>() == "analytic") {
            s.sampled.reset();
        } else if (mode.is_object() && mode.contains("sampled") && mode.at("sampled").is_object()) {
            const auto& sm = mode.at("sampled");
            SampledMode m;
            m.pairs = get_number(sm, "pairs", "scenario.mode.sampled", m.pairs);
            if (!(m.pairs > 0.0)) field_error("scenario.mode.sampled.pairs", "must be positive");
            if (sm.contains("seed")) {
                if (!sm.at("seed").is_number_unsigned()) {
                    field_error("scenario.mode.sampled.seed", "expected a nonnegative integer");
                }
                m.seed = sm.at("seed").get<std::uint64_t>();
            }
            s.sampled = m;
        } else {
            field_error("scenario.mode", "expected \"analytic\" or {\"sampled\": {...}}");
        }
    }

    if (j.contains("specs")) {
        const auto& specs = j.at("specs");
        if (!specs.is_array()) field_error("scenario.specs", "expected an array");
        for (std::size_t i = 0; i < specs.size(); ++i) {
            try {
                s.specs.push_back(lgi_spec_from_json(specs[i], *chain));
            } catch (const ConfigError& e) {
                field_error("scenario.specs[" + std::to_string(i) + "]", e.what());
            }
        }
    }

    s.convex_sum_sign = get_number(j, "convex_sum_sign", "scenario", 1.0);
    if (s.convex_sum_sign != 1.0 && s.convex_sum_sign != -1.0) {
        field_error("scenario.convex_sum_sign", "must be 1 or -1");
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t column = 0;
        const std::size_t line = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0, &column);
        throw ConfigError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": JSON syntax error: " + e.what());
    }
    return parse_scenario(j, path.parent_path());
}

Scenario preset_scenario(std::string_view name) {
    nlohmann::json j = {
        {"name", std::string(name)},
        {"state", "psi_double_prime"},
        {"meter", {{"r_h", 0.0390}, {"r_v", 0.175}, {"r_h_err", 0.0007}, {"r_v_err", 0.001}}},
        {"theta_grid", {{"start", 0}, {"stop", 179}, {"step", 1}}},
    };
    if (name == "fig3") {
        // Conditioned averages only.
    } else if (name == "fig4") {
        j["specs"] = nlohmann::json::array({{{"A1", -1}, {"A1B1B2", -1}, {"B1B2", -1}}});
        j["convex_sum_sign"] = -1;
    } else if (name == "fig5") {
        j["specs"] = nlohmann::json::array({
            {{"A1B2", 1}, {"B1B2", 1}, {"A1B1", -1}},
            {{"A1B2", -1}, {"B1B2", 1}, {"A1B1", 1}},
        });
    } else {
        throw ConfigError("unknown preset \"" + std::string(name) + "\"");
    }
    return parse_scenario(j);
}

std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5"}; }

// ---------------------------------------------------------------------------
// Sweep

namespace {

struct CaColumn {
    std::string name;
    Condition condition;
};

std::vector<CaColumn> ca_columns(const DetectorChain& chain) {
    std::vector<CaColumn> out;
    if (chain.semi_weak_indices().size() != 1) return out;
    const auto proj = chain.projective_indices();
    if (proj.empty()) return out;
    const int k = static_cast<int>(proj.size());
    for (const SubsetMask subset : canonical_subsets(k)) {
        std::vector<int> members;
        for (int i = 0; i < k; ++i) {
            if (subset & (1u << i)) members.push_back(proj[static_cast<std::size_t>(i)]);
        }
        const auto n = static_cast<std::size_t>(members.size());
        for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
            CaColumn col;
            col.condition.assign(static_cast<std::size_t>(chain.size()), std::nullopt);
            col.name = "CA[";
            for (std::size_t t = 0; t < n; ++t) {
                const int outcome = static_cast<int>((bits >> (n - 1 - t)) & 1u);
                const int det = members[t];
                col.condition[static_cast<std::size_t>(det)] = outcome;
                if (t > 0) col.name += ';';
                col.name += chain[det].label + "=" + chain[det].outcome_label(outcome);
            }
            col.name += "]";
            out.push_back(std::move(col));
        }
    }
    return out;
}

bool convex_sum_shaped(const DetectorChain& chain) {
    return chain.size() == 3 && chain.semi_weak_indices().size() == 1 && chain.projective_indices().size() == 2;
}

DetectorChain convex_sum_chain(const Scenario& s, double theta_deg) {
    auto configs = s.detectors;
    for (auto& c : configs) {
        if (c.kind == DetectorConfig::Kind::semi_weak) c.sign *= s.convex_sum_sign;
    }
    return build_chain(s, configs, theta_deg);
}

std::vector<std::string> sweep_header(const Scenario& s) {
    const DetectorChain chain = s.chain(s.grid.start);
    std::vector<std::string> cols{"theta_deg"};
    for (const SubsetMask subset : canonical_subsets(chain.size())) {
        cols.push_back(chain.subset_label(subset));
        if (s.sampled) cols.push_back(chain.subset_label(subset) + "_se");
    }
    for (const auto& c : ca_columns(chain)) cols.push_back(c.name);
    if (convex_sum_shaped(chain)) {
        cols.insert(cols.end(), {"convex_sum_lhs", "p_plus", "p_minus", "convex_sum_violated"});
    }
    for (std::size_t i = 0; i < s.specs.size(); ++i) {
        const std::string base = "LGI" + std::to_string(i + 1);
        cols.push_back(base);
        if (s.sampled) {
            cols.push_back(base + "_se");
            cols.push_back(base + "_z");
        } else {
            cols.push_back(base + "_violated");
        }
    }
    return cols;
}

std::string sweep_row(const Scenario& s, std::size_t index, double theta, const SweepOptions& options) {
    const DetectorChain chain = s.chain(theta);
    const auto values = chain.outcome_values();
    std::vector<double> weights;
    std::optional<CountTable> table;
    if (s.sampled) {
        table = sample_counts(chain, s.state, s.sampled->pairs, derive_seed(s.sampled->seed, index));
        weights = table->weights();
        if (options.counts_dir) {
            const auto path = *options.counts_dir / ("counts_" + std::to_string(index) + ".csv");
            std::ofstream out(path);
            if (!out) throw ConfigError("cannot write " + path.string());
            write_count_table(out, *table, chain);
        }
    } else {
        weights = joint_distribution(chain, s.state);
    }

    std::vector<std::string> cells{fmt(theta)};
    if (table) {
        const auto est = estimate_correlations(*table, values);
        for (std::size_t k = 0; k < est.std_errors.size(); ++k) {
            cells.push_back(fmt(est.values.values()[k]));
            cells.push_back(fmt(est.std_errors[k]));
        }
    } else {
        const auto corr = correlations_from_weights(weights, values);
        for (double v : corr.values()) cells.push_back(fmt(v));
    }

    const auto sw = chain.semi_weak_indices();
    for (const auto& col : ca_columns(chain)) {
        try {
            cells.push_back(fmt(conditioned_average(weights, values, sw.front(), col.condition)));
        } catch (const ZeroConditioningProbability&) {
            cells.push_back("nan");
        }
    }
    if (convex_sum_shaped(chain)) {
        try {
            const auto cs = convex_sum_from_weights(weights, convex_sum_chain(s, theta));
            cells.insert(cells.end(), {fmt(cs.lhs), fmt(cs.p_plus), fmt(cs.p_minus), cs.violated ? "1" : "0"});
        } catch (const ZeroConditioningProbability&) {
            cells.insert(cells.end(), {"nan", "nan", "nan", "0"});
        }
    }
    if (!s.specs.empty()) {
        if (table) {
            for (const auto& spec : s.specs) {
                const auto e = estimate_lgi(*table, values, spec);
                cells.push_back(fmt(e.value));
                cells.push_back(fmt(e.std_error));
                cells.push_back(fmt(std::max(e.z_upper, e.z_lower)));
            }
        } else {
            const auto corr = correlations_from_weights(weights, values);
            for (const auto& spec : s.specs) {
                const auto e = evaluate_lgi(spec, corr);
                cells.push_back(fmt(e.value));
                cells.push_back(e.violated() ? "1" : "0");
            }
        }
    }

    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) row += ',';
        row += cells[i];
    }
    return row;
}

} // namespace

void run_sweep(const Scenario& scenario, std::ostream& os, const SweepOptions& options) {
    const auto thetas = scenario.grid.points();
    if (thetas.empty()) throw ConfigError("scenario.theta_grid: empty grid");
    if (options.counts_dir) std::filesystem::create_directories(*options.counts_dir);
    std::vector<std::string> rows(thetas.size());
    parallel_for(thetas.size(), options.threads,
                 [&](std::size_t i) { rows[i] = sweep_row(scenario, i, thetas[i], options); });
    const auto header = sweep_header(scenario);
    for (std::size_t i = 0; i < header.size(); ++i) os << (i > 0 ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) os << r << '\n';
}

// ---------------------------------------------------------------------------
// Scan

DetectorChain scan_chain(const Scenario& s, int m, double theta_deg) {
    if (m < 1 || m > kMaxDetectors) {
        throw UnsupportedSize("scan supports 1 to 4 detectors, got " + std::to_string(m));
    }
    if (static_cast<int>(s.detectors.size()) == m) return s.chain(theta_deg);
    const SemiWeakMeter meter = s.meter.meter();
    if (m == 4) return four_detector_chain(meter, s.meter2 ? s.meter2->meter() : meter, theta_deg);
    const DetectorChain full = standard_chain(meter, theta_deg);
    std::vector<Detector> ds(full.detectors().begin(), full.detectors().begin() + m);
    return DetectorChain(std::move(ds));
}

ScanSummary scan_all(const Scenario& scenario, int m, std::ostream& os, const ScanOptions& options) {
    const LgiEnumeration enumeration(m);
    const auto thetas = scenario.grid.points();
    if (thetas.empty()) throw ConfigError("scenario.theta_grid: empty grid");
    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    const std::uint64_t chunk = std::max<std::uint64_t>(1, options.chunk_size);
    const std::uint64_t n_chunks = (enumeration.size() + chunk - 1) / chunk;

    ScanSummary summary;
    os << "theta_deg,spec_id,value,lower,upper,violated\n";
    for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
        const double theta = thetas[ti];
        const DetectorChain chain = scan_chain(scenario, m, theta);
        CorrelationVector corr = [&] {
            if (scenario.sampled) {
                const auto table = sample_counts(chain, scenario.state, scenario.sampled->pairs,
                                                 derive_seed(scenario.sampled->seed, ti));
                return estimate_correlations(table, chain).values;
            }
            return correlation_vector(chain, scenario.state);
        }();
        const auto& values = corr.values();
        const std::string theta_text = fmt(theta);

        std::uint64_t violated_total = 0;
        for (std::uint64_t batch = 0; batch < n_chunks; batch += threads) {
            const std::uint64_t batch_end = std::min<std::uint64_t>(n_chunks, batch + threads);
            std::vector<std::string> out(static_cast<std::size_t>(batch_end - batch));
            std::vector<std::uint64_t> counts(out.size(), 0);
            parallel_for(out.size(), threads, [&](std::size_t c) {
                const std::uint64_t first = (batch + c) * chunk + 1;
                const std::uint64_t last = std::min(enumeration.size(), first + chunk - 1);
                std::string buf;
                auto it = enumeration.from(first);
                for (std::uint64_t id = first; id <= last; ++id, ++it) {
                    const auto coeffs = it->coefficients();
                    double v = 0.0;
                    for (std::size_t k = 0; k < coeffs.size(); ++k) v += coeffs[k] * values[k];
                    const bool upper = v > it->upper_bound() + kViolationTol;
                    const bool lower = v < it->lower_bound() - kViolationTol;
                    if (!upper && !lower) continue;
                    ++counts[c];
                    if (options.summary_only) continue;
                    buf += theta_text;
                    buf += ',';
                    buf += std::to_string(id);
                    buf += ',';
                    buf += fmt(v);
                    buf += ',';
                    buf += fmt(it->lower_bound());
                    buf += ',';
                    buf += fmt(it->upper_bound());
                    buf += upper ? ",upper\n" : ",lower\n";
                }
                out[c] = std::move(buf);
            });
            for (std::size_t c = 0; c < out.size(); ++c) {
                os << out[c];
                violated_total += counts[c];
            }
        }
        os << theta_text << ",total," << violated_total << ",,,\n";
        summary.thetas.push_back(theta);
        summary.violated.push_back(violated_total);
    }
    return summary;
}

} // namespace lgsim
