#include "hybent/states.hpp"

#include <cmath>

#include <boost/math/special_functions/laguerre.hpp>
#include <fmt/format.h>

#include "hybent/optimize.hpp"
#include "hybent/parallel.hpp"

namespace hybent {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw InvalidInput(fmt::format("{} must be finite", what));
}

Ket coherent_audited(double alpha, int d) {
  Ket c = coherent(alpha, d);
  if (!c.normalized) {
    throw TruncationError(
        fmt::format("coherent amplitude {} needs more than {} levels (tail {:.3g})", alpha, d, c.discarded));
  }
  return c;
}

double overlap_real(double a, double b) { return std::exp(-0.5 * (a - b) * (a - b)); }

}  // namespace

double gain(int n_add, double alpha) {
  if (n_add < 1) throw InvalidInput("gain: n_add must be >= 1");
  require_finite(alpha, "alpha");
  if (!(alpha > 0.0)) throw InvalidInput("gain: alpha must be > 0 (g diverges at 0)");
  return 0.5 + std::sqrt(0.25 + n_add / (alpha * alpha));
}

double balancing_t(double alpha) { return 1.0 / std::sqrt(alpha * alpha + 2.0); }

double pacs_norm(double alpha, int n_add) {
  return std::tgamma(n_add + 1.0) * boost::math::laguerre(static_cast<unsigned>(n_add), -alpha * alpha);
}

HybridParams make_hybrid_params(double alpha_i, double phi) {
  HybridParams p;
  p.alpha_i = alpha_i;
  p.n_add = 1;
  p.phi = phi;
  p.t = balancing_t(alpha_i);
  p.r = std::sqrt(1.0 - p.t * p.t);
  if (alpha_i > 0.0) {
    p.g = gain(1, alpha_i);
    p.alpha_f = (p.g * alpha_i - alpha_i) / 2.0;
    p.displacement = (alpha_i + p.g * alpha_i) / 2.0;
  }
  return p;
}

Ket photon_added_coherent(double alpha, int n_add, int d) {
  require_finite(alpha, "alpha");
  if (n_add < 0) throw InvalidInput("photon_added_coherent: n_add < 0");
  if (d <= n_add) throw InvalidInput("photon_added_coherent: d must exceed n_add");
  const double norm = pacs_norm(alpha, n_add);
  CVector v = CVector::Zero(d);
  // <m|(a^dag)^n|alpha> = sqrt(m!/(m-n)!) <m-n|alpha>
  for (int m = n_add; m < d; ++m) {
    const int k = m - n_add;
    const double log_mag = -0.5 * alpha * alpha + 0.5 * (std::lgamma(m + 1.0) - 2.0 * std::lgamma(k + 1.0));
    const double sign = (alpha < 0.0 && k % 2 == 1) ? -1.0 : 1.0;
    const double mag = (k == 0) ? std::exp(log_mag) : (alpha == 0.0 ? 0.0 : std::exp(log_mag + k * std::log(std::abs(alpha))));
    v(m) = sign * mag / std::sqrt(norm);
  }
  const double tail = std::max(0.0, 1.0 - v.squaredNorm());
  if (tail > kTruncationTol) {
    throw TruncationError(fmt::format("photon-added coherent state (alpha={}, n={}) needs more than {} levels (tail {:.3g})",
                                      alpha, n_add, d, tail));
  }
  v /= v.norm();
  return Ket(ModeShape({d}), std::move(v), true, tail);
}

double fidelity_pacs_coherent(double alpha, int n_add) {
  const double g = gain(n_add, alpha);
  return std::pow(g * alpha, 2.0 * n_add) * std::exp(-alpha * alpha * (g - 1.0) * (g - 1.0)) / pacs_norm(alpha, n_add);
}

double fidelity_pacs_coherent_numeric(double alpha, int n_add, int d) {
  const double g = gain(n_add, alpha);
  const Ket target = coherent_audited(g * alpha, d);
  const Ket pacs = photon_added_coherent(alpha, n_add, d);
  return std::norm(target.amps.dot(pacs.amps));
}

SuperposedAddition apply_superposed_addition(double r, double t, const Ket& input) {
  if (std::abs(r * r + t * t - 1.0) > 1e-12) throw InvalidInput("superposed addition needs r^2 + t^2 = 1");
  if (input.shape.modes() != 2) throw InvalidInput("superposed addition acts on a two-mode ket");
  const Ket on1 = apply_creation(input, 0);
  const Ket on2 = apply_creation(input, 1);
  CVector v = r * on1.amps + t * on2.amps;
  const double n2 = v.squaredNorm();
  if (!(n2 > 0.0)) throw InvalidInput("superposed addition produced a zero vector");
  v /= std::sqrt(n2);
  return {Ket(input.shape, std::move(v), true, on1.discarded + on2.discarded), n2};
}

ModeShape default_hybrid_dims(double alpha_i) {
  const double a = std::abs(alpha_i);
  if (a <= 2.0) return ModeShape({3, 30});
  if (a <= 3.25) return ModeShape({3, 50});
  const double amp = a > 0.0 ? gain(1, a) * a : 0.0;
  const double lambda = amp * amp;
  return ModeShape({3, static_cast<int>(std::ceil(lambda + 10.0 * std::sqrt(lambda) + 15.0))});
}

Ket hybrid_pre(double alpha_i, double phi, const ModeShape& dims) {
  require_finite(alpha_i, "alpha_i");
  require_finite(phi, "phi");
  if (dims.modes() != 2) throw InvalidInput("hybrid_pre needs a two-mode shape");
  const int d1 = dims.dim(0);
  const int d2 = dims.dim(1);
  const Ket coh = coherent_audited(alpha_i, d2);
  const Ket pacs = photon_added_coherent(alpha_i, 1, d2);
  const Ket one = fock_ket(1, d1);
  const Ket zero = fock_ket(0, d1);
  CVector v = (tensor(one, coh).amps + std::polar(1.0, phi) * tensor(zero, pacs).amps) / std::sqrt(2.0);
  const double lost = 1.0 - v.squaredNorm();
  v /= v.norm();
  return Ket(dims, std::move(v), true, std::max(lost, 0.0));
}

Ket hybrid_displaced(double alpha_i, double displacement, double phi, const ModeShape& dims, int build_dim) {
  const ModeShape build({dims.dim(0), std::max(build_dim, dims.dim(1))});
  const Ket pre = hybrid_pre(alpha_i, phi, build);
  const Ket moved = apply_displacement(pre, 1, cplx(-displacement, 0.0), kTruncationTol);
  return resize_mode(moved, 1, dims.dim(1), kTruncationTol).normalized_copy();
}

SymmetricHybrid hybrid_symmetric(double alpha_i, const ModeShape& dims) {
  if (!(alpha_i > 0.0)) throw InvalidInput("hybrid_symmetric needs alpha_i > 0");
  const HybridParams p = make_hybrid_params(alpha_i);
  const int build = std::max(dims.dim(1), default_hybrid_dims(alpha_i).dim(1));
  return {hybrid_displaced(alpha_i, p.displacement, 0.0, dims, build), p};
}

SymmetricFidelity fidelity_symmetric(double alpha_i) {
  const HybridParams p = make_hybrid_params(alpha_i);
  if (!(alpha_i > 0.0)) throw InvalidInput("fidelity_symmetric needs alpha_i > 0");
  const double ga = p.g * alpha_i;
  const double a2 = 1.0 + alpha_i * alpha_i;
  const double f = 0.25 * (1.0 + ga * ga * std::exp(-4.0 * p.alpha_f * p.alpha_f) / a2 +
                           2.0 * ga * std::exp(-2.0 * p.alpha_f * p.alpha_f) / std::sqrt(a2));
  return {f, p.alpha_f};
}

double fidelity_symmetric_numeric(double alpha_i, const ModeShape& dims) {
  const auto sym = hybrid_symmetric(alpha_i, dims);
  const Ket ideal = ideal_hybrid(sym.params.alpha_f, dims);
  return std::norm(ideal.amps.dot(sym.state.amps));
}

double fidelity_displaced_analytic(double alpha_i, double displacement, double alpha_target) {
  // D(-b) a^dag |a> = (a^dag + b)|a - b>, and <c|a^dag|u> = c <c|u> for real c.
  const double u = alpha_i - displacement;
  const double n = std::sqrt(1.0 + alpha_i * alpha_i);
  const double amp = 0.5 * ((alpha_target + displacement) * overlap_real(alpha_target, u) / n +
                            overlap_real(-alpha_target, u));
  return amp * amp;
}

Ket ideal_hybrid(double alpha, const ModeShape& dims) {
  require_finite(alpha, "alpha");
  if (dims.modes() != 2) throw InvalidInput("ideal_hybrid needs a two-mode shape");
  const Ket plus = coherent_audited(alpha, dims.dim(1));
  const Ket minus = coherent_audited(-alpha, dims.dim(1));
  CVector v = (tensor(fock_ket(0, dims.dim(0)), plus).amps + tensor(fock_ket(1, dims.dim(0)), minus).amps) / std::sqrt(2.0);
  v /= v.norm();
  return Ket(dims, std::move(v), true, plus.discarded);
}

double ecs_norm_closed(double a, double b) { return 1.0 / std::sqrt(2.0 * (1.0 - std::exp(-2.0 * a * a - 2.0 * b * b))); }

Ket ecs(double a, double b, const ModeShape& dims) {
  require_finite(a, "alpha_f");
  require_finite(b, "alpha_f_prime");
  if (a == 0.0 && b == 0.0) throw InvalidInput("ecs: zero-norm state for alpha_f = alpha_f' = 0");
  if (!(b > a && a > 0.0)) throw InvalidInput("ecs needs alpha_f' > alpha_f > 0");
  if (dims.modes() != 2) throw InvalidInput("ecs needs a two-mode shape");
  const Ket ap = coherent_audited(a, dims.dim(0));
  const Ket am = coherent_audited(-a, dims.dim(0));
  const Ket bp = coherent_audited(b, dims.dim(1));
  const Ket bm = coherent_audited(-b, dims.dim(1));
  CVector v = tensor(ap, bp).amps - tensor(am, bm).amps;
  const double n = ecs_norm_closed(a, b);
  const double mismatch = std::abs(v.squaredNorm() - 1.0 / (n * n)) * n * n;
  if (mismatch > kTruncationTol) {
    throw TruncationError(fmt::format("ecs norm differs from closed form by {:.3g}; increase dims", mismatch));
  }
  v *= n;
  return Ket(dims, std::move(v), true, mismatch);
}

std::vector<SmallFidelityRow> sweep_fidelity_small(std::span<const double> alpha_i_grid) {
  std::vector<SmallFidelityRow> rows(alpha_i_grid.size());
  parallel_for(rows.size(), [&](std::size_t k) {
    const double ai = alpha_i_grid[k];
    SmallFidelityRow row{};
    row.alpha_i = ai;
    const auto closed = fidelity_symmetric(ai);
    row.alpha_f = closed.alpha_f;
    row.f_closed = closed.fidelity;
    row.f_oracle = fidelity_symmetric_numeric(ai, default_hybrid_dims(ai));

    // Free search: any seed amplitude and displacement, scored against Psi(alpha_f).
    double best = -1.0;
    double best_ai = ai;
    double best_b = make_hybrid_params(ai).displacement;
    for (int i = 0; i <= 300; ++i) {
      const double a = 0.05 + 0.02 * i;
      for (int j = 0; j <= 400; ++j) {
        const double b = 0.02 * j;
        const double f = fidelity_displaced_analytic(a, b, row.alpha_f);
        if (f > best) {
          best = f;
          best_ai = a;
          best_b = b;
        }
      }
    }
    const auto refined = nelder_mead(
        [&](const std::vector<double>& x) {
          if (x[0] <= 0.0) return 1.0;
          return -fidelity_displaced_analytic(x[0], x[1], row.alpha_f);
        },
        {best_ai, best_b}, 0.01);
    if (-refined.value > best) {
      best = -refined.value;
      best_ai = refined.x[0];
      best_b = refined.x[1];
    }
    row.f_free = best;
    row.alpha_i_free = best_ai;
    row.displacement_free = best_b;
    row.delta = best - row.f_closed;
    rows[k] = row;
  });
  return rows;
}

BuiltState build_state(const StateRequest& req) {
  auto dims_or = [&](ModeShape fallback) { return req.dims.empty() ? fallback : ModeShape(req.dims); };
  if (req.kind == "coherent") {
    const ModeShape s = dims_or(ModeShape({std::max(30, default_hybrid_dims(req.alpha).dim(1))}));
    HybridParams p;
    p.alpha_i = req.alpha;
    return {coherent(req.alpha, s.dim(0)), p};
  }
  if (req.kind == "pacs") {
    const ModeShape s = dims_or(ModeShape({default_hybrid_dims(req.alpha).dim(1)}));
    HybridParams p;
    p.alpha_i = req.alpha;
    p.n_add = req.n_add;
    if (req.alpha > 0.0) p.g = gain(req.n_add, req.alpha);
    return {photon_added_coherent(req.alpha, req.n_add, s.dim(0)), p};
  }
  if (req.kind == "hybrid-pre") {
    return {hybrid_pre(req.alpha, req.phi, dims_or(default_hybrid_dims(req.alpha))), make_hybrid_params(req.alpha, req.phi)};
  }
  if (req.kind == "hybrid-sym") {
    auto sym = hybrid_symmetric(req.alpha, dims_or(ModeShape({3, 20})));
    return {std::move(sym.state), sym.params};
  }
  if (req.kind == "ideal-hybrid") {
    HybridParams p;
    p.alpha_f = req.alpha;
    return {ideal_hybrid(req.alpha, dims_or(ModeShape({3, 30}))), p};
  }
  if (req.kind == "ecs") {
    HybridParams p;
    p.alpha_f = req.alpha;
    return {ecs(req.alpha, req.alpha_prime, dims_or(ModeShape({20, 30}))), p};
  }
  throw InvalidInput("unknown state kind '" + req.kind + "'");
}

}  // namespace hybent
