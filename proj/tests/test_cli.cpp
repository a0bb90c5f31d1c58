#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hybent/artifacts.hpp"
#include "hybent/cli.hpp"
#include "hybent/fock_io.hpp"
#include "hybent/homodyne.hpp"
#include "support.hpp"

using namespace hybent;
namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hybent");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("range and dims parsing") {
  const auto r = cli::parse_range("0.5:2.0:0.1");
  REQUIRE(r.size() == 16);
  CHECK(r.front() == 0.5);
  CHECK(r.back() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(cli::parse_range("1,2.5,3") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(cli::parse_range("1.4") == std::vector<double>{1.4});
  CHECK_THROWS_AS(cli::parse_range("a:b"), InvalidInput);
  CHECK_THROWS_AS(cli::parse_range("1:0:0.1"), InvalidInput);
  CHECK(cli::parse_dims("3,30") == std::vector<int>{3, 30});
  CHECK_THROWS_AS(cli::parse_dims("3,2.5"), InvalidInput);
}

TEST_CASE("exit codes distinguish usage errors from validation failures") {
  const auto dir = hybent::test::scratch_dir("cli_exit");
  CHECK(run_cli({"--out-dir", dir.string(), "state", "build", "--bogus"}) == cli::kExitUsage);
  CHECK(run_cli({"state", "build", "--kind", "coherent"}) == cli::kExitUsage);  // --out missing
  CHECK(run_cli({}) == cli::kExitUsage);
  CHECK(run_cli({"--out-dir", dir.string(), "state", "build", "--kind", "nope", "--out", "x.json"}) == cli::kExitFailure);
  CHECK(run_cli({"--out-dir", dir.string(), "npt", "curve", "--alpha-i", "9", "--out", "n.csv"}) == cli::kExitFailure);
  CHECK_FALSE(fs::exists(dir / "n.csv"));
  CHECK(run_cli({"--show-defaults"}) == cli::kExitOk);
}

TEST_CASE("state build writes the ket and a manifest with the symmetric amplitude") {
  const auto dir = hybent::test::scratch_dir("cli_state");
  REQUIRE(run_cli({"state", "build", "--kind", "hybrid-sym", "--alpha-i", "1", "--out", "s.json", "--out-dir",
                   dir.string()}) == cli::kExitOk);
  const auto manifest = read_json_file(dir / "s.json.manifest.json");
  CHECK(manifest["schema"] == 1);
  CHECK(manifest["command"] == "state build");
  CHECK(manifest.contains("created"));
  CHECK(manifest["results"]["alpha_f"].get<double>() == doctest::Approx(0.309).epsilon(0.001));
  const Ket psi = ket_from_json(read_json_file(dir / "s.json"));
  CHECK(psi.norm2() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("output directory falls back to the environment") {
  const auto dir = hybent::test::scratch_dir("cli_env");
  ::setenv("HYBENT_OUT_DIR", dir.string().c_str(), 1);
  const int code = run_cli({"state", "build", "--kind", "coherent", "--alpha", "0.5", "--out", "c.json"});
  ::unsetenv("HYBENT_OUT_DIR");
  CHECK(code == cli::kExitOk);
  CHECK(fs::exists(dir / "c.json"));
}

TEST_CASE("teleamp sweep at alpha_i = 2 stays above 0.9999") {
  const auto dir = hybent::test::scratch_dir("cli_teleamp");
  REQUIRE(run_cli({"--out-dir", dir.string(), "sweep", "teleamp", "--alpha-i", "2", "--alpha-f-prime", "0.5:2.0:0.1",
                   "--out", "t.csv"}) == cli::kExitOk);
  const CsvTable t = read_csv(dir / "t.csv");
  CHECK(t.rows.size() == 16);
  for (double f : t.values("F_oracle")) CHECK(f > 0.9999);
}

TEST_CASE("homodyne data round-trips into tomography and is reproducible") {
  const auto dir = hybent::test::scratch_dir("cli_roundtrip");
  const std::vector<std::string> sim{"--out-dir", dir.string(), "homodyne", "simulate", "--kind", "hybrid-pre",
                                     "--alpha-i", "1.0", "--samples", "20000", "--grid-points", "1024",
                                     "--seed", "11", "--out", "d.csv"};
  REQUIRE(run_cli(sim) == cli::kExitOk);
  const std::string first = slurp(dir / "d.csv");
  REQUIRE(run_cli(sim) == cli::kExitOk);
  CHECK(slurp(dir / "d.csv") == first);
  const auto meta = read_json_file(dir / "d.meta.json");
  CHECK(meta["efficiency"].get<double>() == doctest::Approx(0.61));
  CHECK(read_dataset_csv(dir / "d.csv").size() == 20000);

  REQUIRE(run_cli({"--out-dir", dir.string(), "tomo", "reconstruct", "--data", "d.csv", "--dims", "3,8", "--max-iter",
                   "200", "--out", "rho.json"}) == cli::kExitOk);
  const DensityOp rho = density_from_json(read_json_file(dir / "rho.json"));
  CHECK(rho.shape().dims() == std::vector<int>{3, 8});
  const auto report = read_json_file(dir / "rho.report.json");
  CHECK(report["efficiency"].get<double>() == doctest::Approx(0.61));
  CHECK(report["used"].get<int>() + report["dropped"].get<int>() == 20000);
}

TEST_CASE("metric subcommands and the Wigner CSV") {
  const auto dir = hybent::test::scratch_dir("cli_metric");
  const std::string d = dir.string();
  REQUIRE(run_cli({"--out-dir", d, "state", "build", "--kind", "hybrid-pre", "--alpha-i", "1.4", "--out", "h.json"}) == 0);
  CHECK(run_cli({"--out-dir", d, "metric", "npt", "--state", "h.json"}) == cli::kExitOk);
  CHECK(run_cli({"--out-dir", d, "metric", "fidelity", "--state", "h.json", "--ref", "h.json"}) == cli::kExitOk);
  REQUIRE(run_cli({"--out-dir", d, "metric", "wigner", "--state", "h.json", "--condition", "0", "--points", "21",
                   "--out", "w.csv"}) == cli::kExitOk);
  const CsvTable w = read_csv(dir / "w.csv");
  CHECK(w.header == std::vector<std::string>{"x", "p", "w"});
  CHECK(w.rows.size() == 21 * 21);
  CHECK(run_cli({"--out-dir", d, "metric", "npt", "--state", "missing.json"}) == cli::kExitFailure);
}

TEST_CASE("CSV writer and reader round-trip exactly") {
  const auto dir = hybent::test::scratch_dir("cli_csv");
  CsvTable t{{"a", "b"}, {{0.1, 1e-300}, {-2.5, 3.0000000000000004}}};
  write_csv(dir / "t.csv", t);
  const CsvTable back = read_csv(dir / "t.csv");
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  std::ofstream(dir / "bad.csv") << "a,b\n1,2\n3\n";
  CHECK_THROWS_WITH_AS(read_csv(dir / "bad.csv"), doctest::Contains("bad.csv:3"), InvalidInput);
}
