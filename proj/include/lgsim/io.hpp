#pragma once

// File formats.
//
//  Density matrix (JSON): 4x4 array of [re, im] pairs, row-major, basis order
//    {hh, hv, vh, vv}. Readers also accept an object carrying the array
//    under "rho".
//  LGI spec (JSON): object mapping subset labels ("A1", "B1B2", ...) to -1,
//    0 or 1, plus "lower_bound" and "upper_bound".
//  Count table (CSV): "# seed=<n>" and "# pairs_expected=<x>" header lines,
//    then "outcome_tuple,count" rows in tuple order.
//  Tomography counts (CSV): "setting_label,count".

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "lgsim/chain.hpp"
#include "lgsim/lgi.hpp"
#include "lgsim/qstate.hpp"
#include "lgsim/simulate.hpp"
#include "lgsim/tomography.hpp"

namespace lgsim {

/// 17 significant digits; round-trips every double.
std::string format_double(double x);

nlohmann::json density_matrix_to_json(const TwoQubitOperator& m);

/// Parses and symmetrizes a user matrix. `correction` receives the size of
/// the Hermiticity correction. Throws ConfigError on malformed input and
/// InvalidState on an invalid density operator.
TwoQubitState density_matrix_from_json(const nlohmann::json& j, double* correction = nullptr);
TwoQubitState load_density_matrix(const std::filesystem::path& path, double* correction = nullptr);

nlohmann::json lgi_spec_to_json(const LgiSpec& spec, const DetectorChain& chain);
/// Unknown labels or coefficients outside {-1,0,1} raise ConfigError, as do
/// bounds that disagree with the brute-force macrorealist bounds.
LgiSpec lgi_spec_from_json(const nlohmann::json& j, const DetectorChain& chain);

void write_count_table(std::ostream& os, const CountTable& table, const DetectorChain& chain);
CountTable read_count_table(std::istream& is, const DetectorChain& chain);

void write_tomography_counts(std::ostream& os, std::span<const TomographySetting> settings,
                             std::span<const std::uint64_t> counts);
struct TomographyData {
    std::vector<TomographySetting> settings;
    std::vector<std::uint64_t> counts;
};
TomographyData read_tomography_counts(std::istream& is);

nlohmann::json tomography_result_to_json(const TomographyRun& run);

} // namespace lgsim
