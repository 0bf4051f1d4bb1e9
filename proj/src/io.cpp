#include "lgsim/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lgsim/error.hpp"

namespace lgsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_count(const std::string& text, int line_no) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": invalid count '" + t + "'");
    }
    return v;
}

// Splits "a,b" into two trimmed fields.
std::pair<std::string, std::string> split_pair(const std::string& line, int line_no) {
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected two comma-separated fields");
    }
    return {trim(line.substr(0, comma)), trim(line.substr(comma + 1))};
}

} // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json density_matrix_to_json(const TwoQubitOperator& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < 4; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < 4; ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

TwoQubitState density_matrix_from_json(const nlohmann::json& j, double* correction) {
    const nlohmann::json& rows = j.is_object() && j.contains("rho") ? j.at("rho") : j;
    if (!rows.is_array() || rows.size() != 4) {
        throw ConfigError("density matrix: expected a 4x4 array of [re, im] pairs");
    }
    TwoQubitOperator m;
    for (std::size_t r = 0; r < 4; ++r) {
        const auto& row = rows[r];
        if (!row.is_array() || row.size() != 4) {
            throw ConfigError("density matrix: row " + std::to_string(r) + " must have 4 entries");
        }
        for (std::size_t c = 0; c < 4; ++c) {
            const auto& e = row[c];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw ConfigError("density matrix: entry (" + std::to_string(r) + "," + std::to_string(c) +
                                  ") must be [re, im]");
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Complex{e[0].get<double>(), e[1].get<double>()};
        }
    }
    return TwoQubitState::from_user_matrix(m, correction);
}

TwoQubitState load_density_matrix(const std::filesystem::path& path, double* correction) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open density matrix file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return density_matrix_from_json(j, correction);
}

nlohmann::json lgi_spec_to_json(const LgiSpec& spec, const DetectorChain& chain) {
    if (spec.detector_count() != chain.size()) {
        throw std::invalid_argument("inequality and chain sizes differ");
    }
    nlohmann::ordered_json j;
    const auto subsets = canonical_subsets(chain.size());
    const auto coeffs = spec.coefficients();
    for (std::size_t k = 0; k < subsets.size(); ++k) {
        j[chain.subset_label(subsets[k])] = static_cast<int>(coeffs[k]);
    }
    j["lower_bound"] = spec.lower_bound();
    j["upper_bound"] = spec.upper_bound();
    return nlohmann::json(j);
}

LgiSpec lgi_spec_from_json(const nlohmann::json& j, const DetectorChain& chain) {
    if (!j.is_object()) {
        throw ConfigError("LGI spec must be a JSON object");
    }
    const auto subsets = canonical_subsets(chain.size());
    std::vector<int> coeffs(subsets.size(), 0);
    for (const auto& [key, value] : j.items()) {
        if (key == "lower_bound" || key == "upper_bound") continue;
        std::size_t k = 0;
        while (k < subsets.size() && chain.subset_label(subsets[k]) != key) ++k;
        if (k == subsets.size()) {
            throw ConfigError("LGI spec: unknown correlation label '" + key + "'");
        }
        if (!value.is_number_integer() || value.get<int>() < -1 || value.get<int>() > 1) {
            throw ConfigError("LGI spec: coefficient of '" + key + "' must be -1, 0 or 1");
        }
        coeffs[k] = value.get<int>();
    }
    LgiSpec spec = [&] {
        try {
            return LgiSpec::from_coefficients(chain.size(), coeffs);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("LGI spec: ") + e.what());
        }
    }();
    const auto check = [&](const char* key, double expected) {
        if (j.contains(key)) {
            if (!j.at(key).is_number() || j.at(key).get<double>() != expected) {
                throw ConfigError(std::string("LGI spec: ") + key + " disagrees with the macrorealist bound " +
                                  format_double(expected));
            }
        }
    };
    check("lower_bound", spec.lower_bound());
    check("upper_bound", spec.upper_bound());
    return spec;
}

void write_count_table(std::ostream& os, const CountTable& table, const DetectorChain& chain) {
    if (table.counts.size() != chain.outcome_count()) {
        throw std::invalid_argument("count table does not match the chain");
    }
    os << "# seed=" << table.seed << '\n';
    os << "# pairs_expected=" << format_double(table.pairs_expected) << '\n';
    os << "outcome_tuple,count\n";
    for (std::size_t k = 0; k < table.counts.size(); ++k) {
        os << chain.outcome_tuple_label(k) << ',' << table.counts[k] << '\n';
    }
}

CountTable read_count_table(std::istream& is, const DetectorChain& chain) {
    CountTable table;
    table.detector_count = chain.size();
    table.counts.assign(chain.outcome_count(), 0);
    std::vector<bool> seen(chain.outcome_count(), false);
    bool header = false;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const auto eq = t.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = trim(t.substr(1, eq - 1));
            const std::string value = trim(t.substr(eq + 1));
            try {
                if (key == "seed") table.seed = std::stoull(value);
                if (key == "pairs_expected") table.pairs_expected = std::stod(value);
            } catch (const std::exception&) {
                throw ConfigError("line " + std::to_string(line_no) + ": invalid value for " + key);
            }
            continue;
        }
        if (!header) {
            if (t != "outcome_tuple,count") {
                throw ConfigError("line " + std::to_string(line_no) + ": expected header 'outcome_tuple,count'");
            }
            header = true;
            continue;
        }
        const auto [label, count] = split_pair(t, line_no);
        std::size_t k = 0;
        while (k < chain.outcome_count() && chain.outcome_tuple_label(k) != label) ++k;
        if (k == chain.outcome_count()) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown outcome tuple '" + label + "'");
        }
        if (seen[k]) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate outcome tuple '" + label + "'");
        }
        seen[k] = true;
        table.counts[k] = parse_count(count, line_no);
    }
    for (std::size_t k = 0; k < seen.size(); ++k) {
        if (!seen[k]) {
            throw ConfigError("count table is missing outcome tuple '" + chain.outcome_tuple_label(k) + "'");
        }
    }
    return table;
}

void write_tomography_counts(std::ostream& os, std::span<const TomographySetting> settings,
                             std::span<const std::uint64_t> counts) {
    if (settings.size() != counts.size()) {
        throw std::invalid_argument("one count per tomography setting is required");
    }
    os << "setting_label,count\n";
    for (std::size_t i = 0; i < settings.size(); ++i) {
        os << settings[i].label << ',' << counts[i] << '\n';
    }
}

TomographyData read_tomography_counts(std::istream& is) {
    TomographyData data;
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header) {
            header = true;
            if (t == "setting_label,count") continue;
        }
        const auto [label, count] = split_pair(t, line_no);
        try {
            data.settings.push_back(tomography_setting(label));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
        data.counts.push_back(parse_count(count, line_no));
    }
    return data;
}

nlohmann::json tomography_result_to_json(const TomographyRun& run) {
    nlohmann::json j;
    j["rho"] = density_matrix_to_json(run.result.matrix());
    j["metrics"] = {
        {"concurrence", concurrence(run.result)},
        {"purity", purity(run.result)},
        {"log_likelihood", run.log_likelihood},
        {"iterations", run.iterations},
    };
    return j;
}

} // namespace lgsim
