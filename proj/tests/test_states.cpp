#include <array>
#include <cmath>

#include "doctest.h"
#include "hybent/fock.hpp"
#include "hybent/metrics.hpp"
#include "hybent/states.hpp"
#include "support.hpp"

using namespace hybent;
using hybent::test::golden;

TEST_CASE("gain at alpha = 2 matches the reference") {
  CHECK(gain(1, 2.0) * 2.0 == doctest::Approx(golden()["gain_alpha_2"].get<double>()).epsilon(1e-14));
  CHECK_THROWS_AS(gain(1, 0.0), InvalidInput);
}

TEST_CASE("photon-added coherent fidelity: closed form and numeric agree with the reference") {
  for (const auto& [key, val] : golden()["pacs_fidelity"].items()) {
    const double alpha = std::stod(key);
    const double ref = val.get<double>();
    CAPTURE(alpha);
    CHECK(fidelity_pacs_coherent(alpha, 1) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(fidelity_pacs_coherent_numeric(alpha, 1, 80) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("pacs_norm is n! L_n(-alpha^2)") {
  CHECK(pacs_norm(1.5, 1) == doctest::Approx(1.0 + 2.25));
  CHECK(pacs_norm(1.5, 2) == doctest::Approx(2.0 * (1.0 + 2 * 2.25 + 2.25 * 2.25 / 2.0)));
}

TEST_CASE("hybrid_pre at alpha 0 is a single-photon ebit") {
  const ModeShape s{3, 5};
  const Ket psi = hybrid_pre(0.0, 0.0, s);
  const std::array<int, 2> a{1, 0}, b{0, 1};
  CHECK(psi[s.index(a)].real() == doctest::Approx(M_SQRT1_2));
  CHECK(psi[s.index(b)].real() == doctest::Approx(M_SQRT1_2));
}

TEST_CASE("hybrid_pre has balanced discrete populations and is entangled") {
  const Ket psi = hybrid_pre(1.4, 0.0, default_hybrid_dims(1.4));
  const DensityOp rho = DensityOp::pure(psi);
  const auto p = photon_distribution(rho, 0);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-10));
  const std::array<int, 1> keep{0};
  CHECK(partial_trace(rho, keep).purity() < 0.99);
}

TEST_CASE("superposed addition at the balancing weight reproduces hybrid_pre") {
  for (double a : {0.5, 1.0, 1.4, 2.0, 3.25}) {
    CAPTURE(a);
    const ModeShape s = default_hybrid_dims(a);
    const Ket input = tensor(fock_ket(0, s.dim(0)), coherent(a, s.dim(1)));
    const double t = balancing_t(a);
    const auto added = apply_superposed_addition(std::sqrt(1.0 - t * t), t, input);
    const Ket direct = hybrid_pre(a, 0.0, s);
    CHECK(std::norm(direct.amps.dot(added.state.amps)) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("symmetric hybrid fidelity and amplitude match the reference") {
  for (const auto& [key, val] : golden()["symmetric"].items()) {
    const double ai = std::stod(key);
    CAPTURE(ai);
    const SymmetricFidelity f = fidelity_symmetric(ai);
    CHECK(f.alpha_f == doctest::Approx(val["alpha_f"].get<double>()).epsilon(1e-12));
    CHECK(f.fidelity == doctest::Approx(val["fidelity"].get<double>()).epsilon(1e-9));
    CHECK(fidelity_symmetric_numeric(ai, default_hybrid_dims(ai)) ==
          doctest::Approx(val["fidelity"].get<double>()).epsilon(1e-9));
  }
}

TEST_CASE("ECS normalization closed form matches the numeric norm") {
  const Ket e = ecs(0.31, 1.58, ModeShape{20, 30});
  CHECK(e.norm2() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(ecs(1.0, 0.5, ModeShape{20, 20}), InvalidInput);
}

TEST_CASE("ideal hybrid at alpha 0 is a product state") {
  const Ket psi = ideal_hybrid(0.0, ModeShape{3, 4});
  CHECK(npt(DensityOp::pure(psi)) < 1e-12);
}

TEST_CASE("small-fidelity sweep rows are consistent") {
  const std::array<double, 3> grid{0.5, 1.0, 2.0};
  const auto rows = sweep_fidelity_small(grid);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.f_closed == doctest::Approx(r.f_oracle).epsilon(1e-8));
    CHECK(r.f_free >= r.f_closed - 1e-12);
    CHECK(r.delta == doctest::Approx(r.f_free - r.f_closed));
  }
}

TEST_CASE("state builder rejects unknown kinds and under-sized dims") {
  StateRequest req;
  req.kind = "squeezed";
  CHECK_THROWS_AS(build_state(req), InvalidInput);
  req.kind = "hybrid-pre";
  req.alpha = 1.4;
  req.dims = {3, 10};
  CHECK_THROWS_AS(build_state(req), TruncationError);
}
