#pragma once

// BoundReport <-> JSON, and the CSV tables handed to plotting tools. JSON
// numbers use the shortest representation that parses back to the same
// double; CSV cells use %.17g. CSV output carries no timestamps so identical
// runs produce identical bytes.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "resent/entropy.hpp"

namespace resent {

std::string report_to_json(const BoundReport& report, int indent = 2);
/// Throws std::invalid_argument on malformed input or an unknown schema_version.
BoundReport report_from_json(const std::string& text);

/// One row per sample: state coordinates, spectrum, local bound.
std::string points_csv(const BoundReport& report);

struct SweepRow {
  double horizon = 0.0;
  double bound = 0.0;
  std::size_t nonconverged = 0;
  std::vector<double> maximizer;
};

std::string sweep_csv(std::span<const SweepRow> rows);

/// Horizon, oracle value, and the bound it is compared against.
std::string oracle_csv(const OracleResult& oracle, double bound);

/// %.17g
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace resent
