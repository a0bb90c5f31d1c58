#include "hybent/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "hybent/parallel.hpp"
#include "hybent/states.hpp"

namespace hybent {

namespace {

void require_two_modes(const ModeShape& s, const char* what) {
  if (s.modes() != 2) throw InvalidInput(fmt::format("{} needs a two-mode state, got {}", what, to_string(s)));
}

// exp(r (a^dag - a)) = V exp(-i r L) V^dag from one Hermitian eigendecomposition
// of i(a^dag - a); reused for every grid point.
class DisplacementKernel {
 public:
  DisplacementKernel(int d, double r_max) : d_(d), d_work_(displacement_work_dim(cplx(r_max, 0.0), d)) {
    const CMatrix gen = creation_op(d_work_).matrix - annihilation_op(d_work_).matrix;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(cplx(0.0, 1.0) * gen);
    v_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
    v_head_adj_ = v_.topRows(d_).adjoint();
  }

  /// <D(-alpha) w | Pi | D(-alpha) w> for a d-level vector w, alpha = r e^{i phi}.
  double displaced_parity(const CVector& w, double r, double phi) const {
    CVector rotated(d_);
    for (int n = 0; n < d_; ++n) rotated(n) = std::polar(1.0, -phi * n) * w(n);
    CVector y = v_head_adj_ * rotated;
    for (Eigen::Index k = 0; k < y.size(); ++k) y(k) *= std::polar(1.0, r * lambda_(k));
    const CVector z = v_ * y;
    double acc = 0.0;
    for (Eigen::Index n = 0; n < z.size(); ++n) acc += (n % 2 == 0 ? 1.0 : -1.0) * std::norm(z(n));
    return acc;
  }

 private:
  int d_;
  int d_work_;
  CMatrix v_;
  CMatrix v_head_adj_;
  Eigen::VectorXd lambda_;
};

struct Spectrum {
  std::vector<double> weights;
  std::vector<CVector> vectors;
};

Spectrum spectrum(const DensityOp& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  Spectrum s;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    // Negligible weights cannot move W beyond rounding; negative noise is kept.
    if (std::abs(es.eigenvalues()(k)) < 1e-14) continue;
    s.weights.push_back(es.eigenvalues()(k));
    s.vectors.push_back(es.eigenvectors().col(k));
  }
  return s;
}

double wigner_value(const DisplacementKernel& kernel, const Spectrum& sp, double x, double p) {
  const double r = std::hypot(x, p) / std::sqrt(2.0);
  const double phi = std::atan2(p, x);
  double w = 0.0;
  for (std::size_t j = 0; j < sp.weights.size(); ++j) w += sp.weights[j] * kernel.displaced_parity(sp.vectors[j], r, phi);
  return w / M_PI;
}

void require_single_mode(const DensityOp& rho) {
  if (rho.shape().modes() != 1) throw InvalidInput("wigner needs a single-mode state");
}

}  // namespace

double fidelity(const DensityOp& rho, const Ket& psi) {
  if (!(rho.shape() == psi.shape)) throw InvalidInput("fidelity: shape mismatch");
  const Ket unit = psi.normalized_copy();
  return (unit.amps.adjoint() * rho.matrix() * unit.amps)(0, 0).real();
}

cplx overlap(const Ket& psi, const Ket& phi) {
  if (!(psi.shape == phi.shape)) throw InvalidInput("overlap: shape mismatch");
  return psi.amps.dot(phi.amps);
}

CMatrix partial_transpose(const DensityOp& rho, int mode) {
  require_two_modes(rho.shape(), "partial_transpose");
  if (mode != 0 && mode != 1) throw InvalidInput("partial_transpose: mode must be 0 or 1");
  const int da = rho.shape().dim(0);
  const int db = rho.shape().dim(1);
  const CMatrix& m = rho.matrix();
  CMatrix out(m.rows(), m.cols());
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b)
      for (int a2 = 0; a2 < da; ++a2)
        for (int b2 = 0; b2 < db; ++b2) {
          const Eigen::Index row = a * db + b;
          const Eigen::Index col = a2 * db + b2;
          out(row, col) = mode == 0 ? m(a2 * db + b, a * db + b2) : m(a * db + b2, a2 * db + b);
        }
  return out;
}

double npt(const DensityOp& rho, int mode) {
  const CMatrix pt = partial_transpose(rho, mode);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(pt, Eigen::EigenvaluesOnly);
  double neg = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) < 0.0) neg -= es.eigenvalues()(k);
  }
  return neg;
}

double npt_pure(const Ket& psi) {
  require_two_modes(psi.shape, "npt_pure");
  const int da = psi.shape.dim(0);
  const int db = psi.shape.dim(1);
  CMatrix m(da, db);
  for (int a = 0; a < da; ++a)
    for (int b = 0; b < db; ++b) m(a, b) = psi[static_cast<std::size_t>(a * db + b)];
  m /= std::sqrt(psi.norm2());
  Eigen::JacobiSVD<CMatrix> svd(m);
  const double s = svd.singularValues().sum();
  return (s * s - 1.0) / 2.0;
}

std::vector<NptRow> npt_curve(std::span<const double> grid) {
  for (double a : grid) {
    if (!(a >= 0.5 && a <= 4.0)) throw InvalidInput(fmt::format("npt_curve: alpha_i {} outside [0.5, 4]", a));
  }
  std::vector<NptRow> rows(grid.size());
  parallel_for(rows.size(), [&](std::size_t k) {
    const double a = grid[k];
    const ModeShape dims = default_hybrid_dims(a);
    const double v = npt(DensityOp::pure(hybrid_pre(a, 0.0, dims)), 0);
    const double v2 = npt(DensityOp::pure(hybrid_pre(a, 0.0, ModeShape({dims.dim(0), 2 * dims.dim(1)}))), 0);
    rows[k] = {a, v, dims.dim(1), std::abs(v2 - v)};
  });
  return rows;
}

double WignerGrid::x(int i) const { return n_x == 1 ? x_min : x_min + (x_max - x_min) * i / (n_x - 1); }
double WignerGrid::p(int j) const { return n_p == 1 ? p_min : p_min + (p_max - p_min) * j / (n_p - 1); }

WignerGrid wigner(const DensityOp& rho, const WignerWindow& win) {
  require_single_mode(rho);
  if (win.n_x < 2 || win.n_p < 2 || !(win.x_max > win.x_min) || !(win.p_max > win.p_min)) {
    throw InvalidInput("wigner: grid needs at least 2x2 points and positive extents");
  }
  WignerGrid g{win.x_min, win.x_max, win.p_min, win.p_max, win.n_x, win.n_p,
               Eigen::MatrixXd(win.n_x, win.n_p), 0.0, "ok"};
  const double r_max = std::hypot(std::max(std::abs(win.x_min), std::abs(win.x_max)),
                                  std::max(std::abs(win.p_min), std::abs(win.p_max))) / std::sqrt(2.0);
  const DisplacementKernel kernel(rho.shape().dim(0), r_max);
  const Spectrum sp = spectrum(rho);
  parallel_for(static_cast<std::size_t>(win.n_x), [&](std::size_t i) {
    const int ii = static_cast<int>(i);
    for (int j = 0; j < win.n_p; ++j) g.values(ii, j) = wigner_value(kernel, sp, g.x(ii), g.p(j));
  });
  const double dx = (win.x_max - win.x_min) / (win.n_x - 1);
  const double dp = (win.p_max - win.p_min) / (win.n_p - 1);
  g.integral = g.values.sum() * dx * dp;
  if (std::abs(g.integral - 1.0) > 0.01) g.status = "warning";
  return g;
}

double wigner_point(const DensityOp& rho, double x, double p) {
  require_single_mode(rho);
  const DisplacementKernel kernel(rho.shape().dim(0), std::hypot(x, p) / std::sqrt(2.0));
  return wigner_value(kernel, spectrum(rho), x, p);
}

Conditioned condition_on_mode1(const DensityOp& rho, int fock_n) {
  require_two_modes(rho.shape(), "condition_on_mode1");
  const int da = rho.shape().dim(0);
  const int db = rho.shape().dim(1);
  if (fock_n < 0 || fock_n >= da) throw InvalidInput(fmt::format("fock_n {} out of range for dim {}", fock_n, da));
  const CMatrix block = rho.matrix().block(fock_n * db, fock_n * db, db, db);
  const double prob = block.trace().real();
  if (!(prob > 1e-14)) throw DegenerateOutcome(fmt::format("conditioning on |{}> has zero probability", fock_n));
  return {DensityOp::normalized(ModeShape({db}), block), prob};
}

}  // namespace hybent
