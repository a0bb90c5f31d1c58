#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "hybent/artifacts.hpp"
#include "hybent/cli.hpp"
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

class Table {
 public:
  explicit Table(std::ostream& os) : os_(os) {}

  void check(int criterion, const std::string& name, bool ok, const std::string& detail) {
    add(criterion, name, ok ? "PASS" : "FAIL", detail);
  }
  void report(int criterion, const std::string& name, const std::string& detail) { add(criterion, name, "REPORT", detail); }
  std::vector<VerifyRow> rows() const { return rows_; }

 private:
  void add(int criterion, const std::string& name, const std::string& status, const std::string& detail) {
    rows_.push_back({criterion, name, status, detail});
    os_ << fmt::format("[{}] {:<6} {:<44} {}\n", criterion, status, name, detail) << std::flush;
  }

  std::ostream& os_;
  std::vector<VerifyRow> rows_;
};

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

void gain_and_pacs(Table& t) {
  const double ga = gain(1, 2.0) * 2.0;
  t.check(1, "g alpha at alpha=2", std::abs(ga - 2.414) <= 1e-3, fmt::format("{:.6f}", ga));
  for (const auto& [alpha, target, tol] : {std::tuple{2.0, 0.98, 5e-3}, std::tuple{4.0, 0.998, 1e-3}}) {
    const double closed = fidelity_pacs_coherent(alpha, 1);
    const double numeric = fidelity_pacs_coherent_numeric(alpha, 1, default_hybrid_dims(alpha).dim(1));
    t.check(1, fmt::format("PACS fidelity at alpha={}", alpha), std::abs(closed - target) <= tol,
            fmt::format("closed {:.6f}", closed));
    t.check(1, fmt::format("PACS closed vs numeric at alpha={}", alpha), std::abs(closed - numeric) <= 1e-6,
            fmt::format("|diff| {:.2e}", std::abs(closed - numeric)));
  }
}

void symmetric(Table& t, const fs::path& dir) {
  for (const auto& [ai, f_target, af_target] : {std::tuple{2.0, 0.991, 0.207}, std::tuple{1.0, 0.946, 0.309}}) {
    const auto s = fidelity_symmetric(ai);
    const double numeric = fidelity_symmetric_numeric(ai, ModeShape({3, 30}));
    t.check(2, fmt::format("symmetric fidelity at alpha_i={}", ai),
            std::abs(s.fidelity - f_target) <= 2e-3 && std::abs(s.alpha_f - af_target) <= 3e-3,
            fmt::format("F {:.6f}, alpha_f {:.6f}", s.fidelity, s.alpha_f));
    t.check(2, fmt::format("symmetric closed vs numeric at alpha_i={}", ai), std::abs(s.fidelity - numeric) <= 1e-6,
            fmt::format("|diff| {:.2e}", std::abs(s.fidelity - numeric)));
  }
  std::vector<double> grid;
  for (int k = 0; k <= 14; ++k) grid.push_back(0.5 + 0.25 * k);
  const auto rows = sweep_fidelity_small(grid);
  write_csv(dir / "fidelity_small.csv", to_table(std::span<const SmallFidelityRow>(rows)));
  double worst = 0.0;
  double gap = 0.0;
  for (const auto& r : rows) {
    worst = std::max(worst, std::abs(r.f_closed - r.f_oracle));
    gap = std::max(gap, r.delta);
  }
  t.check(2, "small-state sweep closed vs numeric", worst <= 1e-6, fmt::format("max |diff| {:.2e}", worst));
  t.report(2, "free (alpha_i, displacement) search gain", fmt::format("max F_free - F_closed {:.4f}", gap));
}

void teleamp(Table& t, const fs::path& dir) {
  std::vector<double> grid;
  for (int k = 0; k <= 15; ++k) grid.push_back(std::round((0.5 + 0.1 * k) * 1e12) / 1e12);

  std::vector<std::vector<TeleampRow>> opt;
  for (const auto& [ai, threshold] : {std::pair{1.0, 0.999}, std::pair{2.0, 0.9999}}) {
    auto rows = sweep_teleamp(ai, grid, TeleampMode::kOptimized);
    write_csv(dir / fmt::format("teleamp_alpha_i_{}.csv", ai), to_table(std::span<const TeleampRow>(rows)));
    std::vector<double> f, ov, p;
    bool dominates = true;
    for (const auto& r : rows) {
      f.push_back(r.f_oracle);
      ov.push_back(r.outcome_overlap);
      p.push_back(r.p_oracle);
      dominates = dominates && r.f_oracle >= r.f_small;
    }
    t.check(3, fmt::format("teleamp F' > {} at alpha_i={}", threshold, ai), min_of(f) > threshold,
            fmt::format("min F' {:.8f}", min_of(f)));
    t.check(3, fmt::format("outcome (1,0) = (0,1) at alpha_i={}", ai), min_of(ov) >= 1.0 - 1e-8,
            fmt::format("min |<10|01>| {:.12f}", min_of(ov)));
    t.check(3, fmt::format("P in (0, 1) at alpha_i={}", ai), min_of(p) > 0.0 && max_of(p) < 1.0,
            fmt::format("P in [{:.4g}, {:.4g}]", min_of(p), max_of(p)));
    t.check(3, fmt::format("F' >= small-state F at alpha_i={}", ai), dominates, fmt::format("F small {:.6f}", rows[0].f_small));

    const auto fixed = sweep_teleamp(ai, grid, TeleampMode::kFixed);
    write_csv(dir / fmt::format("teleamp_fixed_alpha_i_{}.csv", ai), to_table(std::span<const TeleampRow>(fixed)));
    std::vector<double> ff;
    for (const auto& r : fixed) ff.push_back(r.f_oracle);
    t.report(3, fmt::format("fixed-mapping F' at alpha_i={}", ai), fmt::format("min F' {:.6f}", min_of(ff)));
    opt.push_back(std::move(rows));
  }
  bool lower = true;
  for (std::size_t k = 0; k < grid.size(); ++k) lower = lower && opt[1][k].p_oracle < opt[0][k].p_oracle;
  t.check(3, "P(alpha_i=2) < P(alpha_i=1)", lower, "pointwise over the grid");

  std::vector<ClosedFormReportRow> report;
  for (double ai : {1.0, 2.0}) {
    const auto r = closed_form_report(ai, grid);
    report.insert(report.end(), r.begin(), r.end());
  }
  write_csv(dir / "teleamp_closed_form_report.csv", to_table(std::span<const ClosedFormReportRow>(report)));
  double s_printed = 1.0, s_flipped = 1.0, df = 0.0, dp1 = 0.0, dp2 = 0.0, dp3 = 0.0;
  for (const auto& r : report) {
    s_printed = std::min(s_printed, r.state_fidelity_printed);
    s_flipped = std::min(s_flipped, r.state_fidelity_flipped);
    df = std::max(df, std::abs(r.f_closed - r.f_oracle));
    dp1 = std::max(dp1, std::abs(r.p_printed - r.p_oracle));
    dp2 = std::max(dp2, std::abs(r.p_gain_squared - r.p_oracle));
    dp3 = std::max(dp3, std::abs(r.p_gain_squared_output - r.p_oracle));
  }
  t.report(3, "printed output state vs oracle", fmt::format("min fidelity {:.6f} (sign-flipped {:.8f})", s_printed, s_flipped));
  t.report(3, "printed F' vs oracle (fixed mapping)", fmt::format("max |diff| {:.3e}", df));
  t.report(3, "printed P vs oracle", fmt::format("max |diff| (g-1): {:.3e}, g^2-1: {:.3e}, g^2-1 & alpha_f': {:.3e}", dp1, dp2, dp3));
}

void npt_suite(Table& t, const fs::path& dir) {
  const Ket plus(ModeShape({3}), (CVector(3) << 1.0, 1.0, 0.0).finished() / std::sqrt(2.0));
  const double prod = npt(DensityOp::pure(tensor(plus, coherent(0.7, 20))), 0);
  t.check(4, "NPT of a product state", std::abs(prod) <= 1e-10, fmt::format("{:.2e}", prod));

  CVector bell = CVector::Zero(9);
  bell(0) = bell(4) = 1.0 / std::sqrt(2.0);
  const double b = npt(DensityOp::pure(Ket(ModeShape({3, 3}), bell)), 0);
  t.check(4, "NPT of an embedded Bell state", std::abs(b - 0.5) <= 1e-10, fmt::format("{:.12f}", b));

  const Ket pre = resize_mode(hybrid_pre(1.4, 0.0, ModeShape({3, 30})), 1, 60);
  Ket moved = apply_displacement(pre, 1, cplx(0.3, -0.2));
  moved = apply(phase_shift_op(0.7, 3), moved, std::array<int, 1>{0});
  const double n0 = npt(DensityOp::pure(pre), 0);
  const double n1 = npt(DensityOp::pure(moved.normalized_copy()), 0);
  t.check(4, "NPT invariant under local unitaries", std::abs(n0 - n1) <= 1e-8, fmt::format("|diff| {:.2e}", std::abs(n0 - n1)));

  double worst = 0.0;
  for (double ai : {1.4, 2.0}) {
    const ModeShape dims = default_hybrid_dims(ai);
    const double a = npt(DensityOp::pure(hybrid_pre(ai, 0.0, dims)), 0);
    const double s = npt(DensityOp::pure(hybrid_symmetric(ai, dims).state), 0);
    worst = std::max(worst, std::abs(a - s));
  }
  t.check(4, "NPT(pre) = NPT(symmetric)", worst <= 1e-8, fmt::format("max |diff| {:.2e}", worst));

  std::vector<double> grid;
  for (int k = 0; k <= 37; ++k) grid.push_back(std::round((1.4 + 0.05 * k) * 1e12) / 1e12);
  const auto rows = npt_curve(grid);
  write_csv(dir / "npt_curve.csv", to_table(std::span<const NptRow>(rows)));
  double delta = 0.0;
  double lo = 1e9;
  for (const auto& r : rows) {
    delta = std::max(delta, r.truncation_delta);
    lo = std::min(lo, r.npt);
  }
  t.check(4, "NPT curve truncation convergence", delta < 1e-6, fmt::format("max delta {:.2e}", delta));
  t.check(4, "NPT curve positive", lo > 0.0, fmt::format("min {:.6f}", lo));
  t.report(4, "NPT golden values", fmt::format("alpha_i=1.4: {:.10f}, alpha_i=3.25: {:.10f}", rows.front().npt, rows.back().npt));
}

void tomography_lite(Table& t, const fs::path& dir, std::uint64_t seed) {
  const Ket truth = hybrid_pre(1.4, 0.0, default_hybrid_dims(1.4));
  HomodyneConfig h;
  h.phases = default_phases();
  h.n_samples = 100000;
  h.efficiency = 0.61;
  h.seed = seed;
  const auto samples = sample(DensityOp::pure(truth), h);
  write_dataset_csv(dir / "homodyne_hybrid_pre.csv", samples);
  write_json_file(dir / "homodyne_hybrid_pre.meta.json",
                  json{{"schema", 1}, {"state", {{"kind", "hybrid-pre"}, {"alpha", 1.4}}}, {"efficiency", h.efficiency},
                       {"seed", seed}, {"phases", h.phases}, {"n_samples", h.n_samples}, {"state_phase", 0.0}});
  TomoConfig cfg;
  cfg.efficiency = h.efficiency;
  const TomoResult res = reconstruct(samples, cfg);
  write_json_file(dir / "tomo_rho.json", to_json(res.rho));
  write_json_file(dir / "tomo_report.json", json{{"iterations", res.iterations}, {"converged", res.converged},
                                                 {"final_loglik", res.loglik_trace.back()}, {"used", res.used},
                                                 {"dropped", res.dropped}, {"identity_deficit", res.identity_deficit}});
  const Ket cropped = resize_mode(truth, 1, 10, 1.0).normalized_copy();
  const double f = fidelity(res.rho, cropped);
  const double n_rec = npt(res.rho, 0);
  const double n_true = npt(DensityOp::pure(truth), 0);
  const auto pops = photon_distribution(res.rho, 0);
  t.report(5, "tomography round trip (1e5 events, eta 0.61)",
           fmt::format("F {:.4f}, NPT {:.4f} vs {:.4f}, mode-1 pops ({:.3f}, {:.3f}, {:.3f}), {} iterations", f, n_rec,
                       n_true, pops[0], pops[1], pops[2], res.iterations));
}

void conventions(Table& t, const fs::path& dir, std::uint64_t seed) {
  HomodyneConfig h;
  h.phases = default_phases();
  h.n_samples = 100000;
  h.seed = seed;
  const auto vac = sample(DensityOp::pure(basis_ket(ModeShape({2, 2}), std::array<int, 2>{0, 0})), h);
  double m = 0.0, s2 = 0.0;
  for (const auto& q : vac) m += q.x1;
  m /= static_cast<double>(vac.size());
  for (const auto& q : vac) s2 += (q.x1 - m) * (q.x1 - m);
  const double var = s2 / static_cast<double>(vac.size() - 1);
  t.check(6, "vacuum quadrature variance", std::abs(var - 0.5) <= 0.01, fmt::format("{:.5f}", var));

  const double w0 = wigner_point(DensityOp::pure(fock_ket(0, 10)), 0.0, 0.0);
  const double w1 = wigner_point(DensityOp::pure(fock_ket(1, 10)), 0.0, 0.0);
  t.check(6, "W_vac(0,0) = 1/pi", std::abs(w0 - 1.0 / M_PI) <= 1e-6, fmt::format("{:.10f}", w0));
  t.check(6, "W_1(0,0) = -1/pi", std::abs(w1 + 1.0 / M_PI) <= 1e-6, fmt::format("{:.10f}", w1));

  const DensityOp pre = DensityOp::pure(hybrid_pre(1.4, 0.0, default_hybrid_dims(1.4)));
  const DensityOp herald0 = condition_on_mode1(pre, 0).state;
  const DensityOp herald1 = condition_on_mode1(pre, 1).state;
  const WignerWindow win{-5.0, 5.0, 101, -5.0, 5.0, 101};
  const WignerGrid g0 = wigner(herald0, win);
  const WignerGrid g1 = wigner(herald1, win);
  write_csv(dir / "wigner_vacuum_herald.csv", to_table(g0));
  write_csv(dir / "wigner_photon_herald.csv", to_table(g1));
  t.check(6, "vacuum-heralded Wigner has a negative dip", g0.values.minCoeff() < 0.0, fmt::format("min {:.5f}", g0.values.minCoeff()));
  t.check(6, "photon-heralded Wigner is non-negative", g1.values.minCoeff() >= -1e-6, fmt::format("min {:.2e}", g1.values.minCoeff()));

  // Marginal over p versus the theta = 0 quadrature density.
  const WignerGrid wide = wigner(herald0, WignerWindow{-7.0, 7.0, 141, -8.0, 8.0, 161});
  const QuadGrid qg{-7.0, 7.0, 141};
  const Eigen::VectorXd pdf = quad_pdf_single(herald0, 0.0, qg);
  const double dp = (wide.p_max - wide.p_min) / (wide.n_p - 1);
  double l1 = 0.0;
  for (int i = 0; i < wide.n_x; ++i) {
    double marg = 0.0;
    for (int j = 0; j < wide.n_p; ++j) marg += wide.values(i, j) * ((j == 0 || j == wide.n_p - 1) ? 0.5 : 1.0);
    l1 += std::abs(marg * dp - pdf(i)) * qg.dx();
  }
  t.check(6, "Wigner marginal vs quadrature density (L1)", l1 < 1e-4, fmt::format("{:.2e}", l1));
}

}  // namespace

std::vector<VerifyRow> verify_all(const fs::path& out_dir, std::uint64_t seed, std::ostream& os) {
  Table t(os);
  gain_and_pacs(t);
  symmetric(t, out_dir);
  teleamp(t, out_dir);
  npt_suite(t, out_dir);
  tomography_lite(t, out_dir, seed);
  conventions(t, out_dir, seed);

  json summary = json::array();
  for (const auto& r : t.rows()) {
    summary.push_back({{"criterion", r.criterion}, {"name", r.name}, {"status", r.status}, {"detail", r.detail}});
  }
  write_json_file(out_dir / "verify_summary.json", json{{"seed", seed}, {"checks", summary}});
  return t.rows();
}

}  // namespace hybent::cli
