#include <array>
#include <cmath>

#include "doctest.h"
#include "hybent/homodyne.hpp"
#include "hybent/states.hpp"
#include "support.hpp"

using namespace hybent;
using hybent::test::golden;

namespace {

DensityOp random_density(int d, unsigned seed) {
  std::srand(seed);
  const CMatrix a = CMatrix::Random(d, d);
  return DensityOp::normalized(ModeShape{d}, a * a.adjoint());
}

struct Moments {
  double mean1 = 0, var1 = 0, mean2 = 0, var2 = 0, cov = 0;
};

Moments moments(const std::vector<QuadSample>& s) {
  Moments m;
  const double n = static_cast<double>(s.size());
  for (const auto& q : s) {
    m.mean1 += q.x1 / n;
    m.mean2 += q.x2 / n;
  }
  for (const auto& q : s) {
    m.var1 += (q.x1 - m.mean1) * (q.x1 - m.mean1) / n;
    m.var2 += (q.x2 - m.mean2) * (q.x2 - m.mean2) / n;
    m.cov += (q.x1 - m.mean1) * (q.x2 - m.mean2) / n;
  }
  return m;
}

}  // namespace

TEST_CASE("quadrature wavefunctions match the Hermite-function reference") {
  const auto& h = golden()["hermite"];
  for (std::size_t k = 0; k < h["x"].size(); ++k) {
    const Eigen::VectorXd psi = quadrature_wavefunctions(h["x"][k].get<double>(), 6);
    for (int n = 0; n < 6; ++n) CHECK(psi(n) == doctest::Approx(h["psi"][k][n].get<double>()).epsilon(1e-13));
  }
}

TEST_CASE("loss Kraus operators are complete") {
  const auto ks = loss_kraus(0.37, 7);
  CMatrix sum = CMatrix::Zero(7, 7);
  for (const auto& k : ks) sum += k.adjoint() * k;
  CHECK((sum - CMatrix::Identity(7, 7)).norm() < 1e-13);
  CHECK_THROWS_AS(loss_kraus(0.0, 3), InvalidInput);
  CHECK_THROWS_AS(loss_kraus(1.2, 3), InvalidInput);
}

TEST_CASE("loss on Fock and coherent states") {
  const std::array<int, 1> m0{0};
  const DensityOp one = apply_loss(DensityOp::pure(fock_ket(1, 4)), 0.61, m0);
  CHECK(one.matrix()(0, 0).real() == doctest::Approx(0.39));
  CHECK(one.matrix()(1, 1).real() == doctest::Approx(0.61));
  const DensityOp two = apply_loss(DensityOp::pure(fock_ket(2, 4)), 0.5, m0);
  CHECK(two.matrix()(0, 0).real() == doctest::Approx(0.25));
  CHECK(two.matrix()(1, 1).real() == doctest::Approx(0.5));
  CHECK(two.matrix()(2, 2).real() == doctest::Approx(0.25));
  // A coherent state stays pure with amplitude sqrt(eta) alpha.
  const DensityOp coh = apply_loss(DensityOp::pure(coherent(cplx(1.0, 0.5), 30)), 0.64, m0);
  CHECK(coh.purity() == doctest::Approx(1.0).epsilon(1e-10));
  const Ket expect = coherent(cplx(0.8, 0.4), 30);
  CHECK((expect.amps.adjoint() * coh.matrix() * expect.amps)(0).real() == doctest::Approx(1.0).epsilon(1e-10));
  // Unit efficiency is the identity channel.
  const DensityOp r = random_density(5, 3);
  CHECK((apply_loss(r, 1.0, m0).matrix() - r.matrix()).norm() == 0.0);
}

TEST_CASE("adjoint loss is dual to the loss channel") {
  const int d = 6;
  const DensityOp rho = random_density(d, 11);
  std::srand(12);
  CMatrix op = CMatrix::Random(d, d);
  op = (op + op.adjoint()).eval();
  const std::array<int, 1> m0{0};
  const double lhs = (apply_loss(rho, 0.7, m0).matrix() * op).trace().real();
  const double rhs = (rho.matrix() * loss_adjoint(op, 0.7)).trace().real();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("single-photon quadrature density") {
  const QuadGrid g{-6, 6, 601};
  const Eigen::VectorXd p = quad_pdf_single(DensityOp::pure(fock_ket(1, 5)), 0.7, g);
  for (int k = 0; k < g.n; k += 37) {
    const double x = g.x(k);
    CHECK(p(k) == doctest::Approx(2.0 * x * x * std::exp(-x * x) / std::sqrt(M_PI)).epsilon(1e-12));
  }
}

TEST_CASE("coherent quadrature density has the rotated mean and vacuum variance") {
  const cplx alpha(1.2, 0.7);
  const QuadGrid g{-8, 8, 2001};
  for (double theta : {0.0, 0.6, 1.9}) {
    const Eigen::VectorXd p = quad_pdf_single(DensityOp::pure(coherent(alpha, 30)), theta, g);
    double mass = 0, mean = 0, second = 0;
    for (int k = 0; k < g.n; ++k) {
      mass += p(k) * g.dx();
      mean += g.x(k) * p(k) * g.dx();
      second += g.x(k) * g.x(k) * p(k) * g.dx();
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mean == doctest::Approx(std::sqrt(2.0) * (alpha * std::polar(1.0, -theta)).real()).epsilon(1e-9));
    CHECK(second - mean * mean == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("two-mode density marginal equals the reduced single-mode density") {
  const DensityOp rho = DensityOp::pure(hybrid_pre(1.0, 0.3, ModeShape{3, 25}));
  const QuadGrid g{-7, 7, 281};
  const Eigen::MatrixXd p = quad_pdf(rho, 0.8, g);
  CHECK(p.sum() * g.dx() * g.dx() == doctest::Approx(1.0).epsilon(1e-8));
  const std::array<int, 1> keep1{1};
  const Eigen::VectorXd single = quad_pdf_single(partial_trace(rho, keep1), 0.8, g);
  const Eigen::VectorXd marginal = p.colwise().sum().transpose() * g.dx();
  CHECK((marginal - single).cwiseAbs().maxCoeff() < 1e-10);
  const QuadGrid narrow{-1, 1, 41};
  CHECK_THROWS_AS(quad_pdf(rho, 0.0, narrow), TruncationError);
}

TEST_CASE("sampler is deterministic per seed and per block") {
  const DensityOp rho = DensityOp::pure(hybrid_pre(1.0, 0.0, ModeShape{3, 25}));
  HomodyneConfig cfg;
  cfg.phases = default_phases();
  cfg.n_samples = 9000;
  cfg.grid_points = 1024;
  cfg.seed = 42;
  const auto a = sample(rho, cfg);
  const auto b = sample(rho, cfg);
  REQUIRE(a.size() == 9000);
  bool same = true;
  for (std::size_t k = 0; k < a.size(); ++k) same = same && a[k].x1 == b[k].x1 && a[k].x2 == b[k].x2;
  CHECK(same);
  cfg.n_samples = 5000;
  const auto prefix = sample(rho, cfg);
  bool prefix_same = true;
  for (std::size_t k = 0; k < prefix.size(); ++k) prefix_same = prefix_same && prefix[k].x1 == a[k].x1;
  CHECK(prefix_same);
  CHECK(a[10].theta == cfg.phases[10 % cfg.phases.size()]);
  cfg.seed = 43;
  CHECK(sample(rho, cfg)[0].x1 != a[0].x1);
}

TEST_CASE("vacuum samples have variance one half and no correlation") {
  const DensityOp vac = DensityOp::pure(tensor(fock_ket(0, 3), fock_ket(0, 5)));
  HomodyneConfig cfg;
  cfg.phases = default_phases();
  cfg.n_samples = 100000;
  cfg.seed = 5;
  const Moments m = moments(sample(vac, cfg));
  CHECK(std::abs(m.mean1) < 0.01);
  CHECK(m.var1 == doctest::Approx(0.5).epsilon(0.02));
  CHECK(m.var2 == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(m.cov) < 0.01);
}

TEST_CASE("loss shrinks the coherent mean by sqrt(eta)") {
  const DensityOp rho = DensityOp::pure(tensor(fock_ket(0, 2), coherent(2.0, 30)));
  HomodyneConfig cfg;
  cfg.phases = {0.0};
  cfg.n_samples = 40000;
  cfg.efficiency = 0.5;
  const Moments m = moments(sample(rho, cfg));
  CHECK(m.mean2 == doctest::Approx(std::sqrt(2.0) * std::sqrt(0.5) * 2.0).epsilon(0.01));
  CHECK(m.var2 == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("sampler configuration is validated") {
  HomodyneConfig cfg;
  cfg.phases = {};
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
  cfg.phases = {0.5, 0.2};
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
  cfg.phases = {0.0, 4.0};
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
  cfg.phases = {0.0};
  cfg.efficiency = 0.0;
  CHECK_THROWS_AS(validate(cfg), InvalidInput);
}

TEST_CASE("dataset CSV round trip is exact") {
  const auto dir = hybent::test::scratch_dir("homodyne_csv");
  const DensityOp rho = DensityOp::pure(hybrid_pre(1.0, 0.0, ModeShape{3, 25}));
  HomodyneConfig cfg;
  cfg.phases = default_phases(7);
  cfg.n_samples = 500;
  cfg.grid_points = 512;
  const auto s = sample(rho, cfg);
  write_dataset_csv(dir / "d.csv", s);
  const auto back = read_dataset_csv(dir / "d.csv");
  REQUIRE(back.size() == s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(back[k].event_id == s[k].event_id);
    CHECK(back[k].theta == s[k].theta);
    CHECK(back[k].x1 == s[k].x1);
    CHECK(back[k].x2 == s[k].x2);
  }
  CHECK_THROWS_AS(read_dataset_csv(dir / "missing.csv"), InvalidInput);
}
