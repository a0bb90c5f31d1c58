#include "hybent/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "CLI11.hpp"

#include "hybent/artifacts.hpp"
#include "hybent/fock_io.hpp"
#include "hybent/homodyne.hpp"
#include "hybent/metrics.hpp"
#include "hybent/states.hpp"
#include "hybent/teleamp.hpp"
#include "hybent/tomography.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hybent::cli {

namespace {

constexpr double kEtaPre = 0.61;        // detection efficiency quoted for pre-displacement data
constexpr double kEtaSymmetric = 0.63;  // ... and for the symmetric (displaced) states

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(trim(s), &used);
  } catch (const std::exception&) {
    throw InvalidInput("not a number: '" + s + "'");
  }
  if (used != trim(s).size() || !std::isfinite(v)) throw InvalidInput("not a number: '" + s + "'");
  return v;
}

struct Context {
  fs::path out_dir;

  fs::path output(const std::string& p) const {
    fs::path path(p);
    if (path.is_relative()) path = out_dir / path;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    return path;
  }
  fs::path input(const std::string& p) const {
    fs::path path(p);
    if (path.is_relative() && !fs::exists(path) && fs::exists(out_dir / path)) return out_dir / path;
    return path;
  }
};

fs::path sidecar_path(const fs::path& data) {
  fs::path p = data;
  return p.replace_extension(".meta.json");
}

double default_efficiency(const std::string& kind) {
  if (kind == "hybrid-pre") return kEtaPre;
  if (kind == "hybrid-sym") return kEtaSymmetric;
  return 1.0;
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw InvalidInput("empty range");
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = t.find(':', start)) != std::string::npos; start = pos + 1) parts.push_back(t.substr(start, pos - start));
    parts.push_back(t.substr(start));
    if (parts.size() != 3) throw InvalidInput("range must be start:stop:step, got '" + text + "'");
    const double a = to_double(parts[0]);
    const double b = to_double(parts[1]);
    const double step = to_double(parts[2]);
    if (!(step > 0.0) || b < a) throw InvalidInput("range needs step > 0 and stop >= start: '" + text + "'");
    for (long k = 0;; ++k) {
      // Points are computed from the index and snapped to 1e-12, so grids do not drift.
      const double v = std::round((a + static_cast<double>(k) * step) * 1e12) / 1e12;
      if (v >= b + 0.5 * step) break;
      out.push_back(v);
    }
    return out;
  }
  std::size_t start = 0;
  for (std::size_t pos; (pos = t.find(',', start)) != std::string::npos; start = pos + 1) out.push_back(to_double(t.substr(start, pos - start)));
  out.push_back(to_double(t.substr(start)));
  return out;
}

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  for (double v : parse_range(text)) {
    if (v != std::floor(v) || v < 1 || v > 100000) throw InvalidInput("dims must be positive integers: '" + text + "'");
    dims.push_back(static_cast<int>(v));
  }
  return dims;
}

json defaults_table() {
  return json{
      {"state", {{"hybrid_dims", "(3, 30) for alpha_i <= 2, (3, 50) for alpha_i <= 3.25"},
                 {"hybrid_sym_dims", {3, 20}},
                 {"ecs_dims", {20, 30}},
                 {"ecs_alpha_prime", 1.58}}},
      {"sweep_fidelity_small", {{"alpha_i", "0.5:4.0:0.1"}}},
      {"sweep_teleamp", {{"alpha_i", 2.0}, {"alpha_f_prime", "0.5:2.0:0.1"}, {"mode", "optimized"}, {"dims", {3, 20, 20, 25}}}},
      {"npt_curve", {{"alpha_i", "1.4:3.25:0.05"}}},
      {"homodyne",
       {{"kind", "hybrid-pre"},
        {"alpha_i", 1.4},
        {"phases", default_phases()},
        {"samples", 600000},
        {"efficiency", {{"hybrid-pre", kEtaPre}, {"hybrid-sym", kEtaSymmetric}, {"other", 1.0}}},
        {"seed", 1},
        {"grid_points", 4096},
        {"x_range", "4 + sqrt(2) alpha_max"}}},
      {"tomography",
       {{"dims", {3, 10}}, {"bin_width", 0.2}, {"x_range", 6.0}, {"max_iter", 2000}, {"tol", 1e-9}, {"dilution", 1.0},
        {"efficiency", "from the dataset sidecar, else 1"}}},
      {"wigner", {{"x_range", 5.0}, {"points", 101}}},
      {"truncation_tolerance", kTruncationTol}};
}

void write_manifest(const fs::path& output, const std::string& command, const json& params, const json& results) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  json m{{"schema", 1},
         {"command", command},
         {"parameters", params},
         {"results", results},
         {"output", output.filename().string()},
         {"created", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now))}};
  write_json_file(fs::path(output.string() + ".manifest.json"), m);
}

int run(int argc, char** argv) {
  CLI::App app{"Truncated-Fock-space toolkit for hybrid discrete/continuous-variable entanglement"};
  app.footer(
      "Ranges: start:stop:step (stop included to within half a step), a,b,c, or a single value.\n"
      "Relative output paths resolve against --out-dir, else $HYBENT_OUT_DIR, else the working directory.\n"
      "Exit codes: 0 ok, 1 validation/runtime failure, 2 usage error.");
  std::string out_dir_flag;
  bool show_defaults = false;
  app.add_option("--out-dir", out_dir_flag, "Output directory for relative paths");
  app.add_flag("--show-defaults", show_defaults, "Print the defaults table and exit");
  app.require_subcommand(0, 1);

  // state build
  auto* state = app.add_subcommand("state", "State builders");
  auto* state_build = state->add_subcommand("build", "Build a named state and write its ket JSON");
  StateRequest req;
  std::string state_dims;
  std::string state_out;
  state_build->add_option("--kind", req.kind, "coherent | pacs | hybrid-pre | hybrid-sym | ideal-hybrid | ecs")->required();
  state_build->add_option("--alpha,--alpha-i", req.alpha, "alpha_i (hybrid kinds), alpha (coherent/pacs/ideal), alpha_f (ecs)");
  state_build->add_option("--alpha-prime", req.alpha_prime, "ECS output amplitude");
  state_build->add_option("--phi", req.phi, "Relative phase of the hybrid branches");
  state_build->add_option("--n-add", req.n_add, "Photon additions (pacs)");
  state_build->add_option("--dims", state_dims, "Truncation dims, e.g. 3,30");
  state_build->add_option("--out", state_out, "Output JSON")->required();
  state->require_subcommand(1);

  // sweeps
  auto* sweep = app.add_subcommand("sweep", "Parameter sweeps");
  sweep->require_subcommand(1);
  auto* sweep_small = sweep->add_subcommand("fidelity-small", "Small-state fidelity versus alpha_i");
  std::string small_grid = "0.5:4.0:0.1";
  std::string small_out;
  sweep_small->add_option("--alpha-i", small_grid, "alpha_i range")->capture_default_str();
  sweep_small->add_option("--out", small_out, "Output CSV")->required();

  auto* sweep_tele = sweep->add_subcommand("teleamp", "Tele-amplification fidelity and success probability");
  double tele_alpha_i = 2.0;
  std::string tele_grid = "0.5:2.0:0.1";
  std::string tele_mode = "optimized";
  std::string tele_dims = "3,20,20,25";
  std::string tele_out;
  std::string tele_report;
  sweep_tele->add_option("--alpha-i", tele_alpha_i, "Initial amplitude")->capture_default_str();
  sweep_tele->add_option("--alpha-f-prime", tele_grid, "Output amplitude range")->capture_default_str();
  sweep_tele->add_option("--mode", tele_mode, "optimized | fixed")->capture_default_str();
  sweep_tele->add_option("--dims", tele_dims, "Dims of modes (1, 2, 3, 2')")->capture_default_str();
  sweep_tele->add_option("--out", tele_out, "Output CSV")->required();
  sweep_tele->add_option("--report", tele_report, "Also write the closed-form comparison CSV");

  // npt
  auto* npt_cmd = app.add_subcommand("npt", "Entanglement curves");
  npt_cmd->require_subcommand(1);
  auto* npt_curve_cmd = npt_cmd->add_subcommand("curve", "NPT of the pre-displacement hybrid state versus alpha_i");
  std::string npt_grid = "1.4:3.25:0.05";
  std::string npt_out;
  npt_curve_cmd->add_option("--alpha-i", npt_grid, "alpha_i range")->capture_default_str();
  npt_curve_cmd->add_option("--out", npt_out, "Output CSV")->required();

  // homodyne
  auto* hom = app.add_subcommand("homodyne", "Synthetic homodyne data");
  hom->require_subcommand(1);
  auto* hom_sim = hom->add_subcommand("simulate", "Sample same-phase quadrature pairs");
  std::string hom_state;
  std::string hom_kind = "hybrid-pre";
  double hom_alpha = 1.4;
  std::string hom_dims;
  std::string hom_phases;
  std::optional<double> hom_eta;
  HomodyneConfig hcfg;
  std::string hom_out;
  hom_sim->add_option("--state", hom_state, "State JSON (ket or density); overrides --kind");
  hom_sim->add_option("--kind", hom_kind, "Named state kind")->capture_default_str();
  hom_sim->add_option("--alpha-i,--alpha", hom_alpha, "Amplitude for --kind")->capture_default_str();
  hom_sim->add_option("--dims", hom_dims, "Dims for --kind");
  hom_sim->add_option("--phases", hom_phases, "LO phases in [0, pi] (list or range); default 9 values k pi/9");
  hom_sim->add_option("--samples", hcfg.n_samples, "Number of quadrature pairs")->capture_default_str();
  hom_sim->add_option("--efficiency", hom_eta, "Detection efficiency (default by kind: 0.61 pre, 0.63 sym, else 1)");
  hom_sim->add_option("--seed", hcfg.seed, "RNG seed")->capture_default_str();
  hom_sim->add_option("--state-phase", hcfg.state_phase, "Relative phase applied to the discrete mode");
  hom_sim->add_option("--x-range", hcfg.x_range, "Sampling grid half-width (0 = automatic)");
  hom_sim->add_option("--grid-points", hcfg.grid_points, "Sampling grid points")->capture_default_str();
  hom_sim->add_option("--out", hom_out, "Output CSV (sidecar <stem>.meta.json)")->required();

  // tomography
  auto* tomo = app.add_subcommand("tomo", "State reconstruction");
  tomo->require_subcommand(1);
  auto* tomo_rec = tomo->add_subcommand("reconstruct", "Iterative maximum-likelihood reconstruction");
  std::string tomo_data;
  std::string tomo_dims = "3,10";
  std::optional<double> tomo_eta;
  TomoConfig tcfg;
  std::string tomo_out;
  tomo_rec->add_option("--data", tomo_data, "Dataset CSV")->required();
  tomo_rec->add_option("--dims", tomo_dims, "Reconstruction dims")->capture_default_str();
  tomo_rec->add_option("--bin-width", tcfg.bin_width, "Quadrature bin width")->capture_default_str();
  tomo_rec->add_option("--x-range", tcfg.x_range, "Bins cover [-x, x]")->capture_default_str();
  tomo_rec->add_option("--efficiency", tomo_eta, "POVM loss correction (default: dataset sidecar, else 1)");
  tomo_rec->add_option("--max-iter", tcfg.max_iter, "Iteration cap")->capture_default_str();
  tomo_rec->add_option("--tol", tcfg.tol, "Relative log-likelihood change over 10 iterations")->capture_default_str();
  tomo_rec->add_option("--dilution", tcfg.dilution, "Dilution in (0, 1]")->capture_default_str();
  tomo_rec->add_option("--out", tomo_out, "Output density JSON (report <stem>.report.json)")->required();

  // metrics
  auto* metric = app.add_subcommand("metric", "Figures of merit");
  metric->require_subcommand(1);
  auto* m_npt = metric->add_subcommand("npt", "Partial-transpose negativity");
  std::string m_state;
  int m_mode = 0;
  m_npt->add_option("--state", m_state, "State JSON")->required();
  m_npt->add_option("--mode", m_mode, "Transposed mode (0 or 1)")->capture_default_str();
  auto* m_fid = metric->add_subcommand("fidelity", "<psi|rho|psi>");
  std::string m_ref;
  m_fid->add_option("--state", m_state, "State JSON (rho)")->required();
  m_fid->add_option("--ref", m_ref, "Reference ket JSON (psi)")->required();
  auto* m_wig = metric->add_subcommand("wigner", "Wigner function on a square grid");
  std::optional<int> m_condition;
  double m_range = 5.0;
  int m_points = 101;
  std::string m_out;
  m_wig->add_option("--state", m_state, "State JSON")->required();
  m_wig->add_option("--condition", m_condition, "For two-mode input: herald mode 0 on |n>");
  m_wig->add_option("--x-range", m_range, "Grid half-width in x and p")->capture_default_str();
  m_wig->add_option("--points", m_points, "Points per axis")->capture_default_str();
  m_wig->add_option("--out", m_out, "Output CSV")->required();

  // verify
  auto* verify = app.add_subcommand("verify", "Closed form versus oracle suite");
  verify->require_subcommand(1);
  auto* verify_all_cmd = verify->add_subcommand("all", "Run every check and write the artifacts");
  std::uint64_t verify_seed = 1;
  verify_all_cmd->add_option("--seed", verify_seed, "Seed for sampled checks")->capture_default_str();

  // Global flags are accepted anywhere on the command line.
  app.fallthrough();
  for (auto* group : app.get_subcommands({})) {
    group->fallthrough();
    for (auto* leaf : group->get_subcommands({})) leaf->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (show_defaults) {
    std::cout << defaults_table().dump(2) << "\n";
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  Context ctx;
  if (!out_dir_flag.empty()) {
    ctx.out_dir = out_dir_flag;
  } else if (const char* env = std::getenv("HYBENT_OUT_DIR"); env && *env) {
    ctx.out_dir = env;
  } else {
    ctx.out_dir = ".";
  }

  try {
    if (state_build->parsed()) {
      if (!state_dims.empty()) req.dims = parse_dims(state_dims);
      const BuiltState built = build_state(req);
      const fs::path out = ctx.output(state_out);
      write_json_file(out, to_json(built.state));
      const auto& p = built.params;
      write_manifest(out, "state build",
                     {{"kind", req.kind}, {"alpha", req.alpha}, {"alpha_prime", req.alpha_prime}, {"phi", req.phi},
                      {"n_add", req.n_add}, {"dims", built.state.shape.dims()}},
                     {{"alpha_i", p.alpha_i}, {"alpha_f", p.alpha_f}, {"g", p.g}, {"t", p.t}, {"r", p.r},
                      {"displacement", p.displacement}, {"norm2", built.state.norm2()},
                      {"discarded", built.state.discarded}});
      std::cout << fmt::format("wrote {} (dims {}, alpha_f {})\n", out.string(), to_string(built.state.shape), p.alpha_f);
      return kExitOk;
    }

    if (sweep_small->parsed()) {
      const auto grid = parse_range(small_grid);
      const auto rows = sweep_fidelity_small(grid);
      const fs::path out = ctx.output(small_out);
      write_csv(out, to_table(std::span<const SmallFidelityRow>(rows)));
      write_manifest(out, "sweep fidelity-small", {{"alpha_i", grid}}, {{"rows", rows.size()}});
      std::cout << fmt::format("wrote {} ({} rows)\n", out.string(), rows.size());
      return kExitOk;
    }

    if (sweep_tele->parsed()) {
      const auto grid = parse_range(tele_grid);
      const auto d = parse_dims(tele_dims);
      if (d.size() != 4) throw InvalidInput("teleamp dims need four values (1, 2, 3, 2')");
      const TeleampDims dims{d[0], d[1], d[2], d[3]};
      const TeleampMode mode = teleamp_mode_from_string(tele_mode);
      const auto rows = sweep_teleamp(tele_alpha_i, grid, mode, dims);
      const fs::path out = ctx.output(tele_out);
      write_csv(out, to_table(std::span<const TeleampRow>(rows)));
      double f_min = 1.0;
      for (const auto& r : rows) f_min = std::min(f_min, r.f_oracle);
      json params{{"alpha_i", tele_alpha_i}, {"alpha_f_prime", grid}, {"mode", to_string(mode)}, {"dims", d}};
      if (!tele_report.empty()) {
        const auto report = closed_form_report(tele_alpha_i, grid, dims);
        const fs::path rp = ctx.output(tele_report);
        write_csv(rp, to_table(std::span<const ClosedFormReportRow>(report)));
        params["report"] = rp.filename().string();
      }
      write_manifest(out, "sweep teleamp", params, {{"rows", rows.size()}, {"min_F_oracle", f_min}});
      std::cout << fmt::format("wrote {} ({} rows, min F' {:.8f})\n", out.string(), rows.size(), f_min);
      return kExitOk;
    }

    if (npt_curve_cmd->parsed()) {
      const auto grid = parse_range(npt_grid);
      const auto rows = npt_curve(grid);
      const fs::path out = ctx.output(npt_out);
      write_csv(out, to_table(std::span<const NptRow>(rows)));
      double worst = 0.0;
      for (const auto& r : rows) worst = std::max(worst, r.truncation_delta);
      write_manifest(out, "npt curve", {{"alpha_i", grid}}, {{"rows", rows.size()}, {"max_truncation_delta", worst}});
      std::cout << fmt::format("wrote {} ({} rows)\n", out.string(), rows.size());
      return kExitOk;
    }

    if (hom_sim->parsed()) {
      json descriptor;
      DensityOp rho;
      if (!hom_state.empty()) {
        rho = density_from_any_json(read_json_file(ctx.input(hom_state)));
        descriptor = {{"file", hom_state}};
      } else {
        StateRequest sreq;
        sreq.kind = hom_kind;
        sreq.alpha = hom_alpha;
        if (!hom_dims.empty()) sreq.dims = parse_dims(hom_dims);
        const BuiltState built = build_state(sreq);
        rho = DensityOp::pure(built.state);
        descriptor = {{"kind", hom_kind}, {"alpha", hom_alpha}, {"dims", built.state.shape.dims()}};
      }
      hcfg.phases = hom_phases.empty() ? default_phases() : parse_range(hom_phases);
      hcfg.efficiency = hom_eta.value_or(hom_state.empty() ? default_efficiency(hom_kind) : 1.0);
      const auto samples = sample(rho, hcfg);
      const fs::path out = ctx.output(hom_out);
      write_dataset_csv(out, samples);
      const json meta{{"schema", 1},
                      {"state", descriptor},
                      {"efficiency", hcfg.efficiency},
                      {"seed", hcfg.seed},
                      {"phases", hcfg.phases},
                      {"state_phase", hcfg.state_phase},
                      {"n_samples", hcfg.n_samples},
                      {"x_range", hcfg.x_range > 0.0 ? hcfg.x_range : default_x_range(apply_loss(rho, hcfg.efficiency, std::array<int, 2>{0, 1}))},
                      {"grid_points", hcfg.grid_points}};
      write_json_file(sidecar_path(out), meta);
      write_manifest(out, "homodyne simulate", meta, {{"rows", samples.size()}, {"sidecar", sidecar_path(out).filename().string()}});
      std::cout << fmt::format("wrote {} ({} events, efficiency {})\n", out.string(), samples.size(), hcfg.efficiency);
      return kExitOk;
    }

    if (tomo_rec->parsed()) {
      const fs::path data_path = ctx.input(tomo_data);
      const auto samples = read_dataset_csv(data_path);
      tcfg.dims = ModeShape(parse_dims(tomo_dims));
      double eta = 1.0;
      if (tomo_eta) {
        eta = *tomo_eta;
      } else if (fs::exists(sidecar_path(data_path))) {
        eta = read_json_file(sidecar_path(data_path)).at("efficiency").get<double>();
      }
      tcfg.efficiency = eta;
      const TomoResult res = reconstruct(samples, tcfg);
      const fs::path out = ctx.output(tomo_out);
      write_json_file(out, to_json(res.rho));
      fs::path report = out;
      report.replace_extension(".report.json");
      const json rep{{"efficiency", eta},
                     {"dims", tcfg.dims.dims()},
                     {"iterations", res.iterations},
                     {"converged", res.converged},
                     {"final_loglik", res.loglik_trace.back()},
                     {"loglik_trace", res.loglik_trace},
                     {"used", res.used},
                     {"dropped", res.dropped},
                     {"identity_deficit", res.identity_deficit}};
      write_json_file(report, rep);
      write_manifest(out, "tomo reconstruct",
                     {{"data", tomo_data}, {"dims", tcfg.dims.dims()}, {"bin_width", tcfg.bin_width}, {"x_range", tcfg.x_range},
                      {"efficiency", eta}, {"max_iter", tcfg.max_iter}, {"tol", tcfg.tol}, {"dilution", tcfg.dilution}},
                     {{"iterations", res.iterations}, {"converged", res.converged}, {"report", report.filename().string()}});
      std::cout << fmt::format("wrote {} ({} iterations, converged {}, loglik {})\n", out.string(), res.iterations,
                               res.converged, res.loglik_trace.back());
      return kExitOk;
    }

    if (m_npt->parsed()) {
      const DensityOp rho = density_from_any_json(read_json_file(ctx.input(m_state)));
      std::cout << fmt::format("{}\n", npt(rho, m_mode));
      return kExitOk;
    }
    if (m_fid->parsed()) {
      const DensityOp rho = density_from_any_json(read_json_file(ctx.input(m_state)));
      const Ket ref = ket_from_json(read_json_file(ctx.input(m_ref)));
      std::cout << fmt::format("{}\n", fidelity(rho, ref));
      return kExitOk;
    }
    if (m_wig->parsed()) {
      DensityOp rho = density_from_any_json(read_json_file(ctx.input(m_state)));
      if (m_condition) rho = condition_on_mode1(rho, *m_condition).state;
      const WignerGrid g = wigner(rho, WignerWindow{-m_range, m_range, m_points, -m_range, m_range, m_points});
      const fs::path out = ctx.output(m_out);
      write_csv(out, to_table(g));
      write_manifest(out, "metric wigner",
                     {{"state", m_state}, {"condition", m_condition ? json(*m_condition) : json(nullptr)},
                      {"x_range", m_range}, {"points", m_points}},
                     {{"integral", g.integral}, {"status", g.status}});
      std::cout << fmt::format("wrote {} (integral {:.6f}, {})\n", out.string(), g.integral, g.status);
      if (g.status != "ok") std::cerr << "warning: grid does not hold the state's Wigner mass\n";
      return kExitOk;
    }

    if (verify_all_cmd->parsed()) {
      fs::create_directories(ctx.out_dir);
      const auto rows = verify_all(ctx.out_dir, verify_seed, std::cout);
      int failed = 0;
      json table = json::array();
      for (const auto& r : rows) {
        failed += r.status == "FAIL";
        table.push_back({{"criterion", r.criterion}, {"name", r.name}, {"status", r.status}});
      }
      write_manifest(ctx.out_dir / "verify", "verify all", {{"seed", verify_seed}}, {{"failed", failed}, {"checks", table}});
      return failed == 0 ? kExitOk : kExitFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  std::cerr << app.help();
  return kExitUsage;
}

}  // namespace hybent::cli
