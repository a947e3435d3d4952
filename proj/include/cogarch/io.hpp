#pragma once

// JSON spec files and CSV series. Numbers are written in shortest round-trip
// form with '.' as the decimal separator, independent of the locale.

#include "cogarch/levy.hpp"
#include "cogarch/model.hpp"
#include "cogarch/simulate.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cogarch {

using Json = nlohmann::json;

inline constexpr const char* kToolName = "cogarch";
inline constexpr const char* kToolVersion = "0.1.0";

[[nodiscard]] Json levy_to_json(const LevySpec& levy);
[[nodiscard]] LevySpec levy_from_json(const Json& j);

/// {p, q, a (length p), b, a0, levy: {family, params...}}
[[nodiscard]] Json spec_to_json(const CogarchSpec& spec);
[[nodiscard]] CogarchSpec spec_from_json(const Json& j);

[[nodiscard]] Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

[[nodiscard]] std::string format_double(double v);
[[nodiscard]] double parse_double(std::string_view s);

/// Header plus rows; every row must have as many fields as the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    [[nodiscard]] const std::vector<double>& column(const std::string& name) const;
};

[[nodiscard]] CsvTable read_csv(std::istream& in);
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// time, G, V, Y1..Yq[, dL]. dL is blank on the first row.
void write_trajectory(std::ostream& out, const Trajectory& tr, bool with_increments = true);

/// Observations with columns time and G.
struct Series {
    std::vector<double> times;
    std::vector<double> G;
};

[[nodiscard]] Series read_series(const std::filesystem::path& path);

/// Grid spacing of `times`. Throws DataError if consecutive differences deviate
/// from their mean by more than 1e-9 relative.
[[nodiscard]] double check_equally_spaced(const std::vector<double>& times);

void write_increments(std::ostream& out, const std::vector<double>& increments);
[[nodiscard]] std::vector<double> read_increments(const std::filesystem::path& path);

}  // namespace cogarch
