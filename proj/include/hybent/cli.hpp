// Command-line front end. Exit codes: 0 success, 1 validation or runtime
// failure, 2 usage error.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace hybent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, char** argv);

/// "start:stop:step" (start inclusive, stop inclusive to within half a step),
/// a comma list "a,b,c", or a single number.
std::vector<double> parse_range(const std::string& text);
std::vector<int> parse_dims(const std::string& text);

/// Physical defaults shared by every subcommand.
nlohmann::json defaults_table();

/// Writes `<output>.manifest.json` with the resolved parameters and a creation
/// timestamp; the timestamp appears nowhere else.
void write_manifest(const std::filesystem::path& output, const std::string& command, const nlohmann::json& params,
                    const nlohmann::json& results);

struct VerifyRow {
  int criterion;
  std::string name;
  std::string status;  ///< PASS, FAIL or REPORT
  std::string detail;
};

/// Runs the closed-form-versus-oracle suite, writes its artifacts into out_dir
/// and prints the table to `os`. REPORT rows document printed closed forms that
/// disagree with the oracle; they never fail the run.
std::vector<VerifyRow> verify_all(const std::filesystem::path& out_dir, std::uint64_t seed, std::ostream& os);

}  // namespace hybent::cli
