#include "hybent/homodyne.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include <boost/math/special_functions/binomial.hpp>
#include <fmt/format.h>

#include "hybent/parallel.hpp"

namespace hybent {

namespace {

constexpr std::uint64_t kBlockSize = 4096;

using RowMajorXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Upper-triangle pair index for m <= n < d.
int pair_index(int m, int n, int d) { return m * d - m * (m - 1) / 2 + (n - m); }
int pair_count(int d) { return d * (d + 1) / 2; }

/// Cumulative trapezoid integrals of psi_m psi_n (m <= n) on the grid.
RowMajorXd cumulative_tables(const QuadGrid& grid, int d) {
  const Eigen::MatrixXd psi = quadrature_wavefunctions(grid, d);
  RowMajorXd c = RowMajorXd::Zero(grid.n, pair_count(d));
  const double half = 0.5 * grid.dx();
  for (int k = 1; k < grid.n; ++k) {
    for (int m = 0; m < d; ++m) {
      for (int n = m; n < d; ++n) {
        const int j = pair_index(m, n, d);
        c(k, j) = c(k - 1, j) + half * (psi(k - 1, m) * psi(k - 1, n) + psi(k, m) * psi(k, n));
      }
    }
  }
  return c;
}

/// Coefficients turning the pair tables into the density of an operator s at phase theta.
Eigen::VectorXd pair_coefficients(const CMatrix& s, double theta) {
  const int d = static_cast<int>(s.rows());
  Eigen::VectorXd c(pair_count(d));
  for (int m = 0; m < d; ++m) {
    c(pair_index(m, m, d)) = s(m, m).real();
    for (int n = m + 1; n < d; ++n) c(pair_index(m, n, d)) = 2.0 * (s(m, n) * std::polar(1.0, -(m - n) * theta)).real();
  }
  return c;
}

// Inverts a (numerically) nondecreasing tabulated CDF by bisection plus linear
// interpolation inside the bracketing cell.
template <typename F>
double invert_cdf(F&& cdf, double target, const QuadGrid& grid) {
  int lo = 0;
  int hi = grid.n - 1;
  double f_lo = cdf(lo);
  double f_hi = cdf(hi);
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const double f_mid = cdf(mid);
    if (f_mid <= target) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  const double span = f_hi - f_lo;
  const double frac = span > 0.0 ? std::clamp((target - f_lo) / span, 0.0, 1.0) : 0.5;
  return grid.x(lo) + frac * grid.dx();
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidInput(fmt::format("{}:{}: cannot parse '{}' as a number", path.string(), line, s));
  }
  return v;
}

}  // namespace

Eigen::VectorXd quadrature_wavefunctions(double x, int d) {
  Eigen::VectorXd psi(d);
  if (d == 0) return psi;
  psi(0) = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (d > 1) psi(1) = std::sqrt(2.0) * x * psi(0);
  for (int n = 1; n + 1 < d; ++n) {
    psi(n + 1) = std::sqrt(2.0 / (n + 1)) * x * psi(n) - std::sqrt(static_cast<double>(n) / (n + 1)) * psi(n - 1);
  }
  return psi;
}

Eigen::MatrixXd quadrature_wavefunctions(const QuadGrid& grid, int d) {
  Eigen::MatrixXd out(grid.n, d);
  for (int k = 0; k < grid.n; ++k) out.row(k) = quadrature_wavefunctions(grid.x(k), d).transpose();
  return out;
}

std::vector<CMatrix> loss_kraus(double eta, int d) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidInput(fmt::format("efficiency {} outside (0, 1]", eta));
  std::vector<CMatrix> ks;
  for (int k = 0; k < d; ++k) {
    CMatrix e = CMatrix::Zero(d, d);
    for (int n = k; n < d; ++n) {
      const double c = boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), static_cast<unsigned>(k));
      e(n - k, n) = std::sqrt(c * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
    }
    ks.push_back(std::move(e));
  }
  return ks;
}

DensityOp apply_loss(const DensityOp& rho, double eta, std::span<const int> modes) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidInput(fmt::format("efficiency {} outside (0, 1]", eta));
  if (eta == 1.0) return rho;
  CMatrix m = rho.matrix();
  for (int mode : modes) {
    rho.shape().check_mode(mode);
    const int d = rho.shape().dim(mode);
    CMatrix acc = CMatrix::Zero(m.rows(), m.cols());
    for (const CMatrix& e : loss_kraus(eta, d)) {
      acc += sandwich(LinOp(ModeShape({d}), e), m, rho.shape(), std::array<int, 1>{mode});
    }
    m = std::move(acc);
  }
  return DensityOp(rho.shape(), 0.5 * (m + m.adjoint()));
}

CMatrix loss_adjoint(const CMatrix& op, double eta) {
  if (eta == 1.0) return op;
  CMatrix acc = CMatrix::Zero(op.rows(), op.cols());
  for (const CMatrix& e : loss_kraus(eta, static_cast<int>(op.rows()))) acc += e.adjoint() * op * e;
  return acc;
}

Eigen::VectorXd quad_pdf_single(const DensityOp& rho_single, double theta, const QuadGrid& grid) {
  if (rho_single.shape().modes() != 1) throw InvalidInput("single-mode quad_pdf needs a single-mode state");
  const int d = rho_single.shape().dim(0);
  const Eigen::MatrixXd psi = quadrature_wavefunctions(grid, d);
  CVector phase(d);
  for (int m = 0; m < d; ++m) phase(m) = std::polar(1.0, -m * theta);
  Eigen::VectorXd p(grid.n);
  for (int k = 0; k < grid.n; ++k) {
    const CVector phi = psi.row(k).transpose().cast<cplx>().cwiseProduct(phase);
    p(k) = (phi.transpose() * rho_single.matrix() * phi.conjugate())(0, 0).real();
  }
  return p;
}

Eigen::MatrixXd quad_pdf(const DensityOp& rho, double theta, const QuadGrid& grid, double norm_tol) {
  if (rho.shape().modes() != 2) throw InvalidInput("quad_pdf needs a two-mode state");
  const int da = rho.shape().dim(0);
  const int db = rho.shape().dim(1);
  const Eigen::MatrixXd psi_a = quadrature_wavefunctions(grid, da);
  const Eigen::MatrixXd psi_b = quadrature_wavefunctions(grid, db);
  CMatrix phi_b(grid.n, db);
  for (int k = 0; k < grid.n; ++k)
    for (int m = 0; m < db; ++m) phi_b(k, m) = psi_b(k, m) * std::polar(1.0, -m * theta);

  Eigen::MatrixXd p(grid.n, grid.n);
  parallel_for(static_cast<std::size_t>(grid.n), [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    // sigma(x1) = sum_{m1,n1} phi_m1(x1) conj(phi_n1(x1)) rho[(m1,.),(n1,.)]
    CMatrix sigma = CMatrix::Zero(db, db);
    for (int m1 = 0; m1 < da; ++m1) {
      for (int n1 = 0; n1 < da; ++n1) {
        const cplx w = psi_a(k, m1) * psi_a(k, n1) * std::polar(1.0, -(m1 - n1) * theta);
        sigma += w * rho.matrix().block(m1 * db, n1 * db, db, db);
      }
    }
    const CMatrix t = phi_b * sigma;
    for (int l = 0; l < grid.n; ++l) p(k, l) = phi_b.row(l).dot(t.row(l)).real();
  });
  const double mass = p.sum() * grid.dx() * grid.dx();
  if (std::abs(mass - 1.0) > norm_tol) {
    throw TruncationError(fmt::format("quadrature grid [{}, {}] holds {:.9f} of the probability; widen it", grid.x_min,
                                      grid.x_max, mass));
  }
  return p;
}

std::vector<double> default_phases(int n) {
  if (n < 1) throw InvalidInput("default_phases: need at least one phase");
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = M_PI * k / n;
  return out;
}

void validate(const HomodyneConfig& cfg) {
  if (cfg.phases.empty()) throw InvalidInput("homodyne: phase set is empty");
  for (std::size_t k = 0; k < cfg.phases.size(); ++k) {
    const double t = cfg.phases[k];
    if (!(t >= 0.0 && t <= M_PI)) throw InvalidInput(fmt::format("homodyne: phase {} outside [0, pi]", t));
    if (k > 0 && !(t > cfg.phases[k - 1])) throw InvalidInput("homodyne: phases must be strictly ascending");
  }
  if (cfg.n_samples < 1) throw InvalidInput("homodyne: n_samples must be >= 1");
  if (!(cfg.efficiency > 0.0 && cfg.efficiency <= 1.0)) throw InvalidInput("homodyne: efficiency must be in (0, 1]");
  if (!std::isfinite(cfg.state_phase)) throw InvalidInput("homodyne: state phase must be finite");
  if (cfg.x_range < 0.0 || !std::isfinite(cfg.x_range)) throw InvalidInput("homodyne: x_range must be >= 0");
  if (cfg.grid_points < 16) throw InvalidInput("homodyne: grid needs at least 16 points");
}

double default_x_range(const DensityOp& rho) {
  double n_max = 0.0;
  for (int m = 0; m < rho.shape().modes(); ++m) n_max = std::max(n_max, mean_photon(rho, m));
  return 4.0 + std::sqrt(2.0) * std::sqrt(n_max);
}

std::vector<QuadSample> sample(const DensityOp& rho_in, const HomodyneConfig& cfg) {
  validate(cfg);
  if (rho_in.shape().modes() != 2) throw InvalidInput("homodyne sampling needs a two-mode state");
  const std::array<int, 2> both{0, 1};
  DensityOp rho = apply_loss(rho_in, cfg.efficiency, both);
  if (cfg.state_phase != 0.0) {
    rho = apply(phase_shift_op(-cfg.state_phase, rho.shape().dim(0)), rho, std::array<int, 1>{0});
  }
  const int da = rho.shape().dim(0);
  const int db = rho.shape().dim(1);
  const double half_width = cfg.x_range > 0.0 ? cfg.x_range : default_x_range(rho);
  const QuadGrid grid{-half_width, half_width, cfg.grid_points};

  const RowMajorXd table_a = cumulative_tables(grid, da);
  const RowMajorXd table_b = cumulative_tables(grid, db);
  const CMatrix rho_a = partial_trace(rho, std::array<int, 1>{0}).matrix();

  // Marginal CDF of x1 for every phase.
  std::vector<Eigen::VectorXd> cdf_a;
  for (double theta : cfg.phases) {
    Eigen::VectorXd c = table_a * pair_coefficients(rho_a, theta);
    if (std::abs(c(grid.n - 1) - 1.0) > 1e-6) {
      throw TruncationError(fmt::format("quadrature grid +-{} holds {:.9f} of the x1 probability; widen it", half_width,
                                        c(grid.n - 1)));
    }
    cdf_a.push_back(std::move(c));
  }

  const std::size_t n_phase = cfg.phases.size();
  std::vector<QuadSample> out(cfg.n_samples);
  const std::uint64_t n_blocks = (cfg.n_samples + kBlockSize - 1) / kBlockSize;
  parallel_for(n_blocks, [&](std::size_t block) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(block)));
    const std::uint64_t begin = block * kBlockSize;
    const std::uint64_t end = std::min<std::uint64_t>(begin + kBlockSize, cfg.n_samples);
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::size_t ph = i % n_phase;
      const double theta = cfg.phases[ph];
      const double u1 = uniform01(rng);
      const double u2 = uniform01(rng);

      const Eigen::VectorXd& ca = cdf_a[ph];
      const double x1 = invert_cdf([&](int k) { return ca(k); }, u1 * ca(grid.n - 1), grid);

      // Conditional mode-2 operator at the sampled x1.
      const Eigen::VectorXd psi1 = quadrature_wavefunctions(x1, da);
      CMatrix sigma = CMatrix::Zero(db, db);
      for (int m1 = 0; m1 < da; ++m1) {
        for (int n1 = 0; n1 < da; ++n1) {
          const cplx w = psi1(m1) * psi1(n1) * std::polar(1.0, -(m1 - n1) * theta);
          sigma += w * rho.matrix().block(m1 * db, n1 * db, db, db);
        }
      }
      const Eigen::VectorXd coeff = pair_coefficients(sigma, theta);
      auto cdf_b = [&](int k) { return table_b.row(k).dot(coeff.transpose()); };
      const double total = cdf_b(grid.n - 1);
      const double x2 = invert_cdf(cdf_b, u2 * total, grid);
      out[i] = QuadSample{i, theta, x1, x2};
    }
  });
  return out;
}

void write_dataset_csv(const std::filesystem::path& path, std::span<const QuadSample> samples) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "event_id,theta,x1,x2\n");
  for (const auto& s : samples) {
    fmt::format_to(std::back_inserter(buf), "{},{:.17g},{:.17g},{:.17g}\n", s.event_id, s.theta, s.x1, s.x2);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + path.string());
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::vector<QuadSample> read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot read " + path.string());
  std::string line;
  if (!std::getline(f, line) || line != "event_id,theta,x1,x2") {
    throw InvalidInput(path.string() + ": expected header event_id,theta,x1,x2");
  }
  std::vector<QuadSample> out;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find(',', start)) != std::string::npos; start = pos + 1) {
      cols.push_back(line.substr(start, pos - start));
    }
    cols.push_back(line.substr(start));
    if (cols.size() != 4) throw InvalidInput(fmt::format("{}:{}: expected 4 columns", path.string(), lineno));
    std::uint64_t id = 0;
    const auto [ptr, ec] = std::from_chars(cols[0].data(), cols[0].data() + cols[0].size(), id);
    if (ec != std::errc() || ptr != cols[0].data() + cols[0].size()) {
      throw InvalidInput(fmt::format("{}:{}: bad event_id '{}'", path.string(), lineno, cols[0]));
    }
    out.push_back({id, parse_double(cols[1], path, lineno), parse_double(cols[2], path, lineno),
                   parse_double(cols[3], path, lineno)});
  }
  return out;
}

}  // namespace hybent
