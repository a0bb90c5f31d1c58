#include "hybent/teleamp.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "hybent/optimize.hpp"
#include "hybent/parallel.hpp"
#include "hybent/states.hpp"

namespace hybent {

namespace {

double n_o_closed(double alpha_f) { return 1.0 / std::sqrt(2.0 * (1.0 - std::exp(-4.0 * alpha_f * alpha_f))); }

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw InvalidInput("alpha_f' grid is empty");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw InvalidInput("alpha_f' grid must be strictly ascending");
  }
}

// Coefficients of the output on {|0>|a'>, |0>|-a'>, |1>|a'>, |1>|-a'>} for outcome (1,0),
// up to the common factor returned in `scale`.
struct ReducedAmplitudes {
  std::array<double, 4> x;
  double scale;
};

ReducedAmplitudes reduced_amplitudes(const TeleampParams& p) {
  // Mode 2 after D(-beta): branch |1>_1 -> |u>, branch |0>_1 -> (a^dag + beta)|u>/n,
  // u = alpha_i - beta. Projection onto |1,0> after the 50:50 splitter keeps
  // (phi_1 v_0 + phi_0 v_1)/sqrt(2) with v the mode-3 channel component.
  const double a = p.alpha_f;
  const double beta = p.displacement;
  const double u = p.alpha_i - beta;
  const double n = std::sqrt(1.0 + p.alpha_i * p.alpha_i);
  const double x10 = u + a;
  const double x11 = -(u - a);
  const double x00 = (1.0 + beta * (u + a)) / n;
  const double x01 = -(1.0 + beta * (u - a)) / n;
  const double scale = p.n_prime * std::exp(-0.5 * a * a) * std::exp(-0.5 * u * u) / 2.0;
  return {{x00, x01, x10, x11}, scale};
}

Ket normalize_audited(const Ket& k, const char* what) {
  const double n2 = k.norm2();
  if (!(n2 > 1e-300)) throw DegenerateOutcome(fmt::format("{}: zero-probability outcome", what));
  return k.normalized_copy();
}

Ket coherent_checked(double alpha, int d) {
  Ket c = coherent(alpha, d);
  if (!c.normalized) {
    throw TruncationError(fmt::format("coherent amplitude {} needs more than {} levels", alpha, d));
  }
  return c;
}

// Unnormalized coefficients of the printed output state on
// |0>|a'>, |0>|-a'>, |1>|-a'>.
std::array<double, 3> printed_coefficients(const TeleampParams& p) {
  const double ai = p.alpha_i;
  const double af2 = p.alpha_f * p.alpha_f;
  const double c1 = (p.g * ai - ai) * std::exp(-2.0 * af2);
  const double c2 = p.g * ai * std::exp(-4.0 * af2) - ai;
  const double c3 = -std::sqrt(1.0 + ai * ai) / (2.0 * p.n_o * p.n_o);
  return {c1, c2, c3};
}

}  // namespace

TeleampParams make_teleamp_params(double alpha_i, double alpha_f_prime) {
  const HybridParams h = make_hybrid_params(alpha_i);
  if (!(alpha_i > 0.0)) throw InvalidInput("teleamp needs alpha_i > 0");
  return make_teleamp_params(alpha_i, alpha_f_prime, h.alpha_f, h.displacement);
}

TeleampParams make_teleamp_params(double alpha_i, double alpha_f_prime, double alpha_f, double displacement) {
  TeleampParams p;
  p.alpha_i = alpha_i;
  p.alpha_f_prime = alpha_f_prime;
  p.alpha_f = alpha_f;
  p.displacement = displacement;
  if (alpha_i > 0.0) p.g = gain(1, alpha_i);
  p.n_prime = ecs_norm_closed(alpha_f, alpha_f_prime);
  p.n_o = n_o_closed(alpha_f);
  validate(p);
  return p;
}

void validate(const TeleampParams& p) {
  for (double v : {p.alpha_i, p.alpha_f, p.alpha_f_prime, p.displacement}) {
    if (!std::isfinite(v)) throw InvalidInput("teleamp parameters must be finite");
  }
  if (!(p.alpha_i > 0.0)) throw InvalidInput("teleamp needs alpha_i > 0");
  if (!(p.alpha_f_prime > p.alpha_f && p.alpha_f > 0.0)) {
    throw InvalidInput(fmt::format("teleamp needs alpha_f' > alpha_f > 0 (got alpha_f={}, alpha_f'={})", p.alpha_f,
                                   p.alpha_f_prime));
  }
  if (std::abs(p.n_o - n_o_closed(p.alpha_f)) > 1e-12) throw InvalidInput("N_o inconsistent with alpha_f");
  if (std::abs(p.n_prime - ecs_norm_closed(p.alpha_f, p.alpha_f_prime)) > 1e-12) {
    throw InvalidInput("N' inconsistent with alpha_f, alpha_f'");
  }
}

BellProjection bell_project(const Ket& psi_s, const Ket& ecs_channel, BellOutcome outcome) {
  if (psi_s.shape.modes() != 2 || ecs_channel.shape.modes() != 2) {
    throw InvalidInput("bell_project needs two-mode inputs");
  }
  if (psi_s.shape.dim(1) != ecs_channel.shape.dim(0)) {
    throw InvalidInput("bell_project: modes 2 and 3 must share a truncation");
  }
  for (const Ket* k : {&psi_s, &ecs_channel}) {
    if (std::abs(k->norm2() - 1.0) > 1e-10) throw TruncationError("bell_project: input failed the norm audit");
  }
  const Ket joint = tensor(psi_s, ecs_channel);  // (1, 2, 3, 2')
  const std::array<int, 2> mixed{1, 2};
  const Ket mixed_state = apply(beam_splitter_op(M_PI / 4.0, 1, 2, joint.shape), joint, mixed);

  const int n2 = outcome == BellOutcome::k10 ? 1 : 0;
  const int n3 = outcome == BellOutcome::k10 ? 0 : 1;
  const Projection first = project_mode(mixed_state, 1, n2);  // -> (1, 3, 2')
  Projection second = project_mode(first.state, 1, n3);       // -> (1, 2')
  Ket out = second.state;
  if (outcome == BellOutcome::k01) {
    out = apply(phase_shift_op(M_PI, out.shape.dim(1)), out, std::array<int, 1>{1});
  }
  const double prob = out.norm2();
  return {normalize_audited(out, "bell_project"), prob};
}

Ket teleamp_input(const TeleampParams& p, const TeleampDims& dims) {
  const int build = std::max(dims.d2, default_hybrid_dims(p.alpha_i).dim(1));
  return hybrid_displaced(p.alpha_i, p.displacement, 0.0, ModeShape({dims.d1, dims.d2}), build);
}

TeleampResult teleamp_oracle(const TeleampParams& p, const TeleampDims& dims) {
  validate(p);
  if (dims.d2 != dims.d3) throw InvalidInput("teleamp: modes 2 and 3 must share a truncation");
  const Ket psi_s = teleamp_input(p, dims);
  const Ket channel = ecs(p.alpha_f, p.alpha_f_prime, ModeShape({dims.d3, dims.d2p}));
  const BellProjection r10 = bell_project(psi_s, channel, BellOutcome::k10);
  const BellProjection r01 = bell_project(psi_s, channel, BellOutcome::k01);

  TeleampResult res;
  res.out_state = r10.state;
  res.p_10 = r10.probability;
  res.p_01 = r01.probability;
  res.p_total = res.p_10 + res.p_01;
  res.outcome_overlap = std::abs(r10.state.amps.dot(r01.state.amps));
  const Ket ideal = ideal_hybrid(p.alpha_f_prime, ModeShape({dims.d1, dims.d2p}));
  res.fidelity_prime = std::norm(ideal.amps.dot(res.out_state.amps));
  return res;
}

ReducedTeleamp teleamp_reduced(const TeleampParams& p) {
  const auto [x, scale] = reduced_amplitudes(p);
  const double s = std::exp(-2.0 * p.alpha_f_prime * p.alpha_f_prime);
  const double norm2 = x[0] * x[0] + x[1] * x[1] + 2.0 * x[0] * x[1] * s + x[2] * x[2] + x[3] * x[3] + 2.0 * x[2] * x[3] * s;
  // Ideal target (|0>|a'> + |1>|-a'>)/sqrt(2).
  const double ov = (x[0] + x[1] * s + x[2] * s + x[3]) / std::sqrt(2.0);
  const double prob = scale * scale * norm2;
  return {ov * ov / norm2, prob, prob};
}

TeleampParams optimize_teleamp(double alpha_i, double alpha_f_prime) {
  const TeleampParams start = make_teleamp_params(alpha_i, alpha_f_prime);
  auto objective = [&](const std::vector<double>& x) {
    const double beta = x[0];
    const double a = x[1];
    if (!(a > 1e-6 && a < alpha_f_prime - 1e-6)) return 1.0;
    TeleampParams p = start;
    p.displacement = beta;
    p.alpha_f = a;
    p.n_prime = ecs_norm_closed(a, alpha_f_prime);
    return -teleamp_reduced(p).fidelity_prime;
  };
  auto best = nelder_mead(objective, {start.displacement, start.alpha_f}, 0.05, 1e-15);
  // A restart from the converged point shakes off a collapsed simplex.
  best = nelder_mead(objective, best.x, 0.01, 1e-15);
  if (-best.value < teleamp_reduced(start).fidelity_prime) return start;
  return make_teleamp_params(alpha_i, alpha_f_prime, best.x[1], best.x[0]);
}

Ket teleamp_output_closed_form(const TeleampParams& p, const TeleampDims& dims, bool flip_minus_branch) {
  validate(p);
  const auto [c1, c2, c3] = printed_coefficients(p);
  const double sgn = flip_minus_branch ? -1.0 : 1.0;
  const Ket plus = coherent_checked(p.alpha_f_prime, dims.d2p);
  const Ket minus = coherent_checked(-p.alpha_f_prime, dims.d2p);
  const Ket zero = fock_ket(0, dims.d1);
  const Ket one = fock_ket(1, dims.d1);
  CVector v = c1 * tensor(zero, plus).amps + sgn * c2 * tensor(zero, minus).amps + sgn * c3 * tensor(one, minus).amps;
  return normalize_audited(Ket(ModeShape({dims.d1, dims.d2p}), std::move(v)), "teleamp_output_closed_form");
}

double teleamp_fidelity_closed(const TeleampParams& p) {
  validate(p);
  const auto [c1, c2, c3] = printed_coefficients(p);
  // The normalization is taken from the unnormalized printed state itself.
  const double s = std::exp(-2.0 * p.alpha_f_prime * p.alpha_f_prime);
  const double norm2 = c1 * c1 + c2 * c2 + c3 * c3 + 2.0 * c1 * c2 * s;
  const double e2 = std::exp(-2.0 * p.alpha_f * p.alpha_f);
  const double bracket = c1 + c2 * e2 + std::sqrt(1.0 + p.alpha_i * p.alpha_i) / (2.0 * p.n_o * p.n_o);
  return bracket * bracket / (2.0 * norm2);
}

double teleamp_success_prob_closed(const TeleampParams& p, SuccessProbForm form) {
  validate(p);
  const double ai2 = p.alpha_i * p.alpha_i;
  const double af2 = p.alpha_f * p.alpha_f;
  const double x = form == SuccessProbForm::kPrinted ? (p.g - 1.0) * ai2 : (p.g * p.g - 1.0) * ai2;
  const double last = form == SuccessProbForm::kGainSquaredOutput ? std::exp(-2.0 * p.alpha_f_prime * p.alpha_f_prime)
                                                                   : std::exp(-2.0 * af2);
  const double c = 1.0 - x / 2.0;
  const double pref = p.n_prime * p.n_prime * std::exp(-2.0 * af2) / (2.0 * (ai2 + 1.0));
  return pref * (1.0 + c * c + 4.0 * (ai2 + 1.0) * af2 - 2.0 * c * last);
}

std::string to_string(TeleampMode mode) { return mode == TeleampMode::kFixed ? "fixed" : "optimized"; }

TeleampMode teleamp_mode_from_string(const std::string& s) {
  if (s == "fixed") return TeleampMode::kFixed;
  if (s == "optimized") return TeleampMode::kOptimized;
  throw InvalidInput("teleamp mode must be 'fixed' or 'optimized', got '" + s + "'");
}

std::vector<TeleampRow> sweep_teleamp(double alpha_i, std::span<const double> grid, TeleampMode mode,
                                      const TeleampDims& dims) {
  check_grid(grid);
  const double f_small = fidelity_symmetric(alpha_i).fidelity;
  std::vector<TeleampRow> rows(grid.size());
  parallel_for(rows.size(), [&](std::size_t k) {
    const double afp = grid[k];
    const TeleampParams fixed = make_teleamp_params(alpha_i, afp);
    const TeleampParams p = mode == TeleampMode::kFixed ? fixed : optimize_teleamp(alpha_i, afp);
    const TeleampResult r = teleamp_oracle(p, dims);
    rows[k] = TeleampRow{alpha_i,
                         p.alpha_f,
                         afp,
                         p.displacement,
                         teleamp_fidelity_closed(fixed),
                         r.fidelity_prime,
                         teleamp_success_prob_closed(fixed),
                         r.p_total,
                         f_small,
                         r.outcome_overlap};
  });
  std::sort(rows.begin(), rows.end(), [](const TeleampRow& a, const TeleampRow& b) { return a.alpha_f_prime < b.alpha_f_prime; });
  return rows;
}

std::vector<ClosedFormReportRow> closed_form_report(double alpha_i, std::span<const double> grid,
                                                    const TeleampDims& dims) {
  check_grid(grid);
  std::vector<ClosedFormReportRow> rows(grid.size());
  parallel_for(rows.size(), [&](std::size_t k) {
    const TeleampParams p = make_teleamp_params(alpha_i, grid[k]);
    const TeleampResult r = teleamp_oracle(p, dims);
    const Ket printed = teleamp_output_closed_form(p, dims, false);
    const Ket flipped = teleamp_output_closed_form(p, dims, true);
    rows[k] = ClosedFormReportRow{alpha_i,
                                  grid[k],
                                  r.fidelity_prime,
                                  teleamp_fidelity_closed(p),
                                  std::norm(printed.amps.dot(r.out_state.amps)),
                                  std::norm(flipped.amps.dot(r.out_state.amps)),
                                  r.p_total,
                                  teleamp_success_prob_closed(p, SuccessProbForm::kPrinted),
                                  teleamp_success_prob_closed(p, SuccessProbForm::kGainSquared),
                                  teleamp_success_prob_closed(p, SuccessProbForm::kGainSquaredOutput)};
  });
  return rows;
}

}  // namespace hybent
