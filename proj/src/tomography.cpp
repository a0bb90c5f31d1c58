#include "hybent/tomography.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "hybent/parallel.hpp"

namespace hybent {

namespace {

constexpr double kMinProbability = 1e-15;
constexpr int kWindow = 10;

/// I_i[m][n] = integral of psi_m psi_n over bin i (20-point Gauss-Legendre per bin).
std::vector<Eigen::MatrixXd> bin_integrals(int d, int n_bins, double x_range, double width) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& nodes = Rule::abscissa();
  const auto& weights = Rule::weights();
  std::vector<Eigen::MatrixXd> out(n_bins, Eigen::MatrixXd::Zero(d, d));
  for (int i = 0; i < n_bins; ++i) {
    const double lo = -x_range + width * i;
    const double mid = lo + 0.5 * width;
    const double half = 0.5 * width;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      for (double sgn : {-1.0, 1.0}) {
        const Eigen::VectorXd psi = quadrature_wavefunctions(mid + sgn * half * nodes[k], d);
        out[i] += weights[k] * half * psi * psi.transpose();
      }
    }
  }
  return out;
}

std::vector<CMatrix> phased_ops(const std::vector<Eigen::MatrixXd>& base, double theta, double eta) {
  std::vector<CMatrix> ops;
  ops.reserve(base.size());
  for (const auto& b : base) {
    const auto d = b.rows();
    CMatrix op(d, d);
    // <m|Pi|n> = e^{i(m-n)theta} integral psi_m psi_n
    for (Eigen::Index m = 0; m < d; ++m)
      for (Eigen::Index n = 0; n < d; ++n) op(m, n) = std::polar(b(m, n), static_cast<double>(m - n) * theta);
    ops.push_back(loss_adjoint(op, eta));
  }
  return ops;
}

double deficit(const std::vector<Eigen::MatrixXd>& base) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(base.front().rows(), base.front().cols());
  for (const auto& b : base) sum += b;
  return (Eigen::MatrixXd::Identity(sum.rows(), sum.cols()) - sum).cwiseAbs().maxCoeff();
}

// Flattened operators for the matrix-product form of p and R.
struct PhaseOps {
  CMatrix a_vec;  ///< (da^2 x n_bins): column i = A_i flattened as (a, a')
  CMatrix b_flat; ///< (n_bins x db^2): row j = B_j flattened as (b, b')
};

std::vector<PhaseOps> flatten(const Povm& povm) {
  const int da = povm.dims.dim(0);
  const int db = povm.dims.dim(1);
  std::vector<PhaseOps> out(povm.phases.size());
  for (std::size_t t = 0; t < povm.phases.size(); ++t) {
    out[t].a_vec.resize(da * da, povm.n_bins);
    out[t].b_flat.resize(povm.n_bins, db * db);
    for (int i = 0; i < povm.n_bins; ++i) {
      for (int a = 0; a < da; ++a)
        for (int a2 = 0; a2 < da; ++a2) out[t].a_vec(a * da + a2, i) = povm.mode_a[t][i](a, a2);
      for (int b = 0; b < db; ++b)
        for (int b2 = 0; b2 < db; ++b2) out[t].b_flat(i, b * db + b2) = povm.mode_b[t][i](b, b2);
    }
  }
  return out;
}

/// Q[(b,b'), (a,a')] = rho[(a',b'), (a,b)], so that Tr[(A (x) B) rho] = B_flat * Q * A_vec.
CMatrix rearrange(const CMatrix& rho, int da, int db) {
  CMatrix q(db * db, da * da);
  for (int a = 0; a < da; ++a)
    for (int a2 = 0; a2 < da; ++a2)
      for (int b = 0; b < db; ++b)
        for (int b2 = 0; b2 < db; ++b2) q(b * db + b2, a * da + a2) = rho(a2 * db + b2, a * db + b);
  return q;
}

std::vector<Eigen::MatrixXd> probabilities_flat(const std::vector<PhaseOps>& ops, const CMatrix& rho, int da, int db) {
  const CMatrix q = rearrange(rho, da, db);
  std::vector<Eigen::MatrixXd> out(ops.size());
  for (std::size_t t = 0; t < ops.size(); ++t) {
    // (n_bins_j x n_bins_i), transposed to (i, j)
    out[t] = (ops[t].b_flat * (q * ops[t].a_vec)).real().transpose();
  }
  return out;
}

double loglik_from(const BinnedData& data, const std::vector<Eigen::MatrixXd>& p, std::vector<ZeroBin>* zero_bins) {
  double acc = 0.0;
  bool zero = false;
  const double total = static_cast<double>(data.used);
  for (std::size_t t = 0; t < data.counts.size(); ++t) {
    const auto& c = data.counts[t];
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        if (c(i, j) == 0.0) continue;
        if (!(p[t](i, j) > 0.0)) {
          zero = true;
          if (zero_bins) zero_bins->push_back({static_cast<int>(t), static_cast<int>(i), static_cast<int>(j)});
          continue;
        }
        acc += c(i, j) / total * std::log(p[t](i, j));
      }
    }
  }
  return zero ? -std::numeric_limits<double>::infinity() : acc;
}

}  // namespace

int bin_count(const TomoConfig& cfg) { return static_cast<int>(std::lround(2.0 * cfg.x_range / cfg.bin_width)); }

void validate(const TomoConfig& cfg) {
  if (cfg.dims.modes() != 2 || cfg.dims.dim(0) < 2 || cfg.dims.dim(1) < 2) {
    throw InvalidInput("tomography needs two-mode dims of at least (2, 2)");
  }
  if (!(cfg.bin_width > 0.0) || !(cfg.x_range > 0.0)) throw InvalidInput("bin width and x range must be positive");
  if (std::abs(bin_count(cfg) * cfg.bin_width - 2.0 * cfg.x_range) > 1e-9 * cfg.x_range) {
    throw InvalidInput(fmt::format("bin width {} does not partition [-{}, {}]", cfg.bin_width, cfg.x_range, cfg.x_range));
  }
  if (!(cfg.efficiency > 0.0 && cfg.efficiency <= 1.0)) throw InvalidInput("efficiency must be in (0, 1]");
  if (cfg.max_iter < 1) throw InvalidInput("max_iter must be >= 1");
  if (!(cfg.tol >= 0.0)) throw InvalidInput("tol must be >= 0");
  if (!(cfg.dilution > 0.0 && cfg.dilution <= 1.0)) throw InvalidInput("dilution must be in (0, 1]");
}

CMatrix Povm::element(int phase, int i, int j) const {
  const CMatrix& a = mode_a.at(phase).at(i);
  const CMatrix& b = mode_b.at(phase).at(j);
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

Povm build_povm(const TomoConfig& cfg, std::span<const double> phases) {
  validate(cfg);
  if (phases.empty()) throw InvalidInput("build_povm: no phases");
  Povm povm;
  povm.dims = cfg.dims;
  povm.phases.assign(phases.begin(), phases.end());
  povm.n_bins = bin_count(cfg);
  povm.bin_width = cfg.bin_width;
  povm.x_range = cfg.x_range;
  povm.efficiency = cfg.efficiency;
  const auto base_a = bin_integrals(cfg.dims.dim(0), povm.n_bins, cfg.x_range, cfg.bin_width);
  const auto base_b = bin_integrals(cfg.dims.dim(1), povm.n_bins, cfg.x_range, cfg.bin_width);
  povm.identity_deficit = std::max(deficit(base_a), deficit(base_b));
  if (povm.identity_deficit > 1e-3) {
    throw TruncationError(fmt::format("quadrature bins on +-{} miss {:.3g} of the identity; widen the range",
                                      cfg.x_range, povm.identity_deficit));
  }
  for (double theta : phases) {
    povm.mode_a.push_back(phased_ops(base_a, theta, cfg.efficiency));
    povm.mode_b.push_back(phased_ops(base_b, theta, cfg.efficiency));
  }
  return povm;
}

BinnedData bin_data(std::span<const QuadSample> samples, const TomoConfig& cfg) {
  validate(cfg);
  if (samples.empty()) throw InvalidInput("tomography: empty dataset");
  BinnedData data;
  if (!cfg.phases.empty()) {
    data.phases = cfg.phases;
  } else {
    for (const auto& s : samples) data.phases.push_back(s.theta);
    std::sort(data.phases.begin(), data.phases.end());
    data.phases.erase(std::unique(data.phases.begin(), data.phases.end()), data.phases.end());
  }
  const int nb = bin_count(cfg);
  data.counts.assign(data.phases.size(), Eigen::MatrixXd::Zero(nb, nb));
  for (const auto& s : samples) {
    const auto it = std::lower_bound(data.phases.begin(), data.phases.end(), s.theta - 1e-12);
    if (it == data.phases.end() || std::abs(*it - s.theta) > 1e-12) {
      throw InvalidInput(fmt::format("event {}: phase {} is not in the configured phase set", s.event_id, s.theta));
    }
    const double fi = std::floor((s.x1 + cfg.x_range) / cfg.bin_width);
    const double fj = std::floor((s.x2 + cfg.x_range) / cfg.bin_width);
    if (fi < 0 || fj < 0 || fi >= nb || fj >= nb) {
      ++data.dropped;
      continue;
    }
    data.counts[static_cast<std::size_t>(it - data.phases.begin())](static_cast<Eigen::Index>(fi),
                                                                    static_cast<Eigen::Index>(fj)) += 1.0;
    ++data.used;
  }
  if (data.used == 0) throw InvalidInput("tomography: every sample fell outside the quadrature range");
  return data;
}

std::vector<Eigen::MatrixXd> probabilities(const Povm& povm, const DensityOp& rho) {
  if (!(rho.shape() == povm.dims)) throw InvalidInput("probabilities: state and POVM dims differ");
  return probabilities_flat(flatten(povm), rho.matrix(), povm.dims.dim(0), povm.dims.dim(1));
}

double loglik(const BinnedData& data, const DensityOp& rho, const Povm& povm, std::vector<ZeroBin>* zero_bins) {
  if (data.phases != povm.phases) throw InvalidInput("loglik: data and POVM phase sets differ");
  return loglik_from(data, probabilities(povm, rho), zero_bins);
}

TomoResult reconstruct(const BinnedData& data, const Povm& povm, const TomoConfig& cfg) {
  validate(cfg);
  if (data.phases != povm.phases) throw InvalidInput("reconstruct: data and POVM phase sets differ");
  const int da = povm.dims.dim(0);
  const int db = povm.dims.dim(1);
  const auto n = static_cast<Eigen::Index>(povm.dims.total());
  const auto ops = flatten(povm);
  const double total = static_cast<double>(data.used);

  CMatrix rho = CMatrix::Identity(n, n) / static_cast<double>(n);
  auto p = probabilities_flat(ops, rho, da, db);
  TomoResult res;
  res.used = data.used;
  res.dropped = data.dropped;
  res.identity_deficit = povm.identity_deficit;
  res.loglik_trace.push_back(loglik_from(data, p, nullptr));

  for (int it = 1; it <= cfg.max_iter; ++it) {
    // R = sum_i A_i (x) S_i with S_i = sum_j (f_ij / p_ij) B_j, accumulated in phase order.
    CMatrix r = CMatrix::Zero(n, n);
    for (std::size_t t = 0; t < ops.size(); ++t) {
      const auto& c = data.counts[t];
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(c.rows(), c.cols());
      for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
          if (c(i, j) == 0.0) continue;
          if (!(p[t](i, j) >= kMinProbability)) {
            throw StalledLikelihood(fmt::format(
                "iteration {}: bin (phase {}, {}, {}) has {} counts but probability {:.3g}", it, t, i, j, c(i, j), p[t](i, j)));
          }
          w(i, j) = c(i, j) / total / p[t](i, j);
        }
      }
      const CMatrix s = ops[t].b_flat.transpose() * w.transpose().cast<cplx>();  // (db^2 x n_bins_i)
      const CMatrix k = ops[t].a_vec * s.transpose();                           // (da^2 x db^2)
      for (int a = 0; a < da; ++a)
        for (int a2 = 0; a2 < da; ++a2)
          for (int b = 0; b < db; ++b)
            for (int b2 = 0; b2 < db; ++b2) r(a * db + b, a2 * db + b2) += k(a * da + a2, b * db + b2);
    }
    if (cfg.dilution < 1.0) r = (1.0 - cfg.dilution) * CMatrix::Identity(n, n) + cfg.dilution * r;
    CMatrix next = r * rho * r;
    next = 0.5 * (next + next.adjoint());
    rho = next / next.trace().real();

    p = probabilities_flat(ops, rho, da, db);
    res.loglik_trace.push_back(loglik_from(data, p, nullptr));
    res.iterations = it;
    if (it >= kWindow) {
      const double now = res.loglik_trace.back();
      const double then = res.loglik_trace[res.loglik_trace.size() - 1 - kWindow];
      if (std::abs(now - then) <= cfg.tol * std::abs(now)) {
        res.converged = true;
        break;
      }
    }
  }
  res.rho = DensityOp(povm.dims, rho);
  return res;
}

TomoResult reconstruct(std::span<const QuadSample> samples, const TomoConfig& cfg) {
  const BinnedData data = bin_data(samples, cfg);
  const Povm povm = build_povm(cfg, data.phases);
  return reconstruct(data, povm, cfg);
}

}  // namespace hybent
