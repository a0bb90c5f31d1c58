// CSV tables written by the command-line tool. Numbers use the shortest
// round-trip representation, so files are byte-stable across runs.
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hybent/metrics.hpp"
#include "hybent/states.hpp"
#include "hybent/teleamp.hpp"

namespace hybent {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by name; throws InvalidInput when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
/// Throws InvalidInput naming the file and line on malformed input.
CsvTable read_csv(const std::filesystem::path& path);

CsvTable to_table(std::span<const SmallFidelityRow> rows);
CsvTable to_table(std::span<const TeleampRow> rows);
CsvTable to_table(std::span<const ClosedFormReportRow> rows);
CsvTable to_table(std::span<const NptRow> rows);
/// Long format x, p, w with x varying slowest.
CsvTable to_table(const WignerGrid& grid);

}  // namespace hybent
