#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vcma/analysis.hpp"
#include "vcma/dynamics.hpp"
#include "vcma/montecarlo.hpp"

namespace vcma {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// `header` is prepended verbatim (typically config_header()).
std::string curve_csv(const Curve& curve, const std::string& header = {});
std::string trajectory_csv(const Trajectory& trajectory, const std::string& header = {});
std::string field_map_csv(const std::vector<FieldSample>& samples, const std::string& header = {});
std::string histogram_csv(const ExitHistogram& histogram, const std::string& header = {});

/// Parsed CSV: '#' comment lines, a header row and numeric rows.
struct CsvTable {
    std::vector<std::string> comments; // without the leading "# "
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Throws InvalidParameter naming the line on malformed input or a header
/// different from `expected_columns` (when non-empty).
CsvTable parse_csv(const std::string& text, const std::vector<std::string>& expected_columns = {});

Curve read_curve_csv(const std::string& text);
Trajectory read_trajectory_csv(const std::string& text);
std::vector<FieldSample> read_field_map_csv(const std::string& text);
/// Bin counts of a histogram file, in file order.
std::vector<std::uint64_t> read_histogram_csv(const std::string& text);

} // namespace vcma
