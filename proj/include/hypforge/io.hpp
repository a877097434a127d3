#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypforge/field.hpp"
#include "hypforge/metric.hpp"
#include "hypforge/phg.hpp"

namespace hypforge {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All writers go through a temp file + rename so readers never observe a
// partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// shortest exact round-trip decimal for a double
std::string format_double(double x);

// profile CSV: header "rho,value"
void write_profile_csv(const std::filesystem::path& path, const RadialGrid& g,
                       const std::vector<double>& values);
std::pair<RadialGrid, std::vector<double>> read_profile_csv(const std::filesystem::path& path);

// metric JSON: {"schema":"v1","grid":{"rho_c":..,"n":..},
//               "profiles":{"a":[..],"b":[..]},"closes":..,"chart_singular":..}
// Bit-exact round trip of all doubles.
nlohmann::json metric_to_json(const RadialMetric& m);
RadialMetric metric_from_json(const nlohmann::json& j);

nlohmann::json series_to_json(const PhgSeries& s);
PhgSeries series_from_json(const nlohmann::json& j);

// gnuplot-friendly whitespace table
void write_table(const std::filesystem::path& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows);

// FNV-1a 64-bit hash (config fingerprints in manifests)
std::uint64_t fnv1a(const std::string& s);

} // namespace hypforge
