#include "hybent/artifacts.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

namespace hybent {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  throw InvalidInput("CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", fmt::join(table.header, ","));
  for (const auto& r : table.rows) {
    if (r.size() != table.header.size()) throw InvalidInput("CSV row width does not match the header");
    fmt::format_to(std::back_inserter(buf), "{}\n", fmt::join(r, ","));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path.string());
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1) {
    cols.push_back(line.substr(start, pos - start));
  }
  cols.push_back(line.substr(start));
  return cols;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot read " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(f, line) || line.empty()) throw InvalidInput(path.string() + ": missing header");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cols = split(line);
    if (cols.size() != t.header.size()) {
      throw InvalidInput(fmt::format("{}:{}: expected {} columns, got {}", path.string(), lineno, t.header.size(), cols.size()));
    }
    std::vector<double> row;
    for (const auto& c : cols) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) {
        throw InvalidInput(fmt::format("{}:{}: cannot parse '{}'", path.string(), lineno, c));
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable to_table(std::span<const SmallFidelityRow> rows) {
  CsvTable t{{"alpha_i", "alpha_f", "F_closed", "F_oracle", "F_free", "alpha_i_free", "displacement_free", "delta"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.alpha_i, r.alpha_f, r.f_closed, r.f_oracle, r.f_free, r.alpha_i_free, r.displacement_free, r.delta});
  }
  return t;
}

CsvTable to_table(std::span<const TeleampRow> rows) {
  CsvTable t{{"alpha_i", "alpha_f", "alpha_f_prime", "F_closed", "F_oracle", "P_closed", "P_oracle", "displacement",
              "F_small", "outcome_overlap"},
             {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.alpha_i, r.alpha_f, r.alpha_f_prime, r.f_closed, r.f_oracle, r.p_closed, r.p_oracle,
                      r.displacement, r.f_small, r.outcome_overlap});
  }
  return t;
}

CsvTable to_table(std::span<const ClosedFormReportRow> rows) {
  CsvTable t{{"alpha_i", "alpha_f_prime", "F_oracle", "F_closed", "state_fidelity_printed", "state_fidelity_flipped",
              "P_oracle", "P_printed", "P_gain_squared", "P_gain_squared_output"},
             {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.alpha_i, r.alpha_f_prime, r.f_oracle, r.f_closed, r.state_fidelity_printed,
                      r.state_fidelity_flipped, r.p_oracle, r.p_printed, r.p_gain_squared, r.p_gain_squared_output});
  }
  return t;
}

CsvTable to_table(std::span<const NptRow> rows) {
  CsvTable t{{"alpha_i", "npt", "dim_mode2", "truncation_delta"}, {}};
  for (const auto& r : rows) t.rows.push_back({r.alpha_i, r.npt, static_cast<double>(r.dim_mode2), r.truncation_delta});
  return t;
}

CsvTable to_table(const WignerGrid& g) {
  CsvTable t{{"x", "p", "w"}, {}};
  t.rows.reserve(static_cast<std::size_t>(g.n_x) * static_cast<std::size_t>(g.n_p));
  for (int i = 0; i < g.n_x; ++i)
    for (int j = 0; j < g.n_p; ++j) t.rows.push_back({g.x(i), g.p(j), g.values(i, j)});
  return t;
}

}  // namespace hybent
