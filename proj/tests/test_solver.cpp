#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "support/models.hpp"
#include "tefcorr/errors.hpp"
#include "tefcorr/exact.hpp"
#include "tefcorr/solver.hpp"

using namespace tefcorr;
using namespace tefcorr::testing;

namespace {

double max_gap(const Solution& s, const CorrelationTable& rho) {
  double gap = 0.0;
  const auto& d = s.phi.domain();
  for (std::size_t i = 0; i < d.size(); ++i) {
    gap = std::max(gap, std::abs(s.phi.values()[i] - rho(d.config(i))));
  }
  return gap;
}

}  // namespace

TEST_CASE("zero field: both routes give |X|^-|I|") {
  for (int q : {2, 3}) {
    const auto f = zero_field(1, q);
    const auto w = Window::box(Site{0}, Site{4});
    for (const auto& s : {solve_finite_volume(*f, w), solve_finite_volume_direct(*f, w)}) {
      const auto& d = s.phi.domain();
      for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(std::abs(s.phi.values()[i] - std::pow(q, -static_cast<double>(d.config(i).size()))) <=
              1e-14);
      }
    }
  }
}

TEST_CASE("ln 2 pair is outside the gate and needs the override") {
  const auto f = two_site_ln2();
  const auto w = Window::box(Site{0}, Site{1});
  CHECK_THROWS_AS(solve_finite_volume(*f, w), GateError);
  SolveOptions o;
  o.override_gate = true;
  const auto s = solve_finite_volume(*f, w, o);
  CHECK(s.report.gate_overridden);
  CHECK_FALSE(s.report.gate_passed);
  CHECK(s.report.max_iterations == kOverrideMaxIterations);
  CHECK(std::abs(s.phi(Configuration::singleton(Site{0}, 1)) - 3.0 / 7.0) <= 1e-12);
  CHECK(std::abs(s.phi(Configuration({{Site{0}, 1}, {Site{1}, 1}})) - 1.0 / 7.0) <= 1e-12);
  const auto direct = solve_finite_volume_direct(*f, w, o);
  CHECK(std::abs(direct.phi(Configuration::singleton(Site{1}, 1)) - 3.0 / 7.0) <= 1e-14);
}

TEST_CASE("iterative, direct and exact agree on gated random fields") {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 6; ++k) {
    const int d = 1 + k % 2;
    const int q = 2 + (k / 2) % 2;
    const auto f = random_gated_field(rng, d, q, 1, q == 2 ? 0.04 : 0.02);
    const Window w = d == 1 ? Window::box(Site{0}, Site{6}) : Window::box(Site{0, 0}, Site{1, 2});
    const auto rho = rho_exact(*f, w);
    const auto it = solve_finite_volume(*f, w);
    const auto dir = solve_finite_volume_direct(*f, w);
    CAPTURE(k);
    CHECK(it.report.gate_passed);
    CHECK(max_gap(it, rho) <= 1e-8);
    CHECK(max_gap(dir, rho) <= 1e-8);
    CHECK(it.report.iterations <= it.report.max_iterations);
    CHECK(it.report.empirical_contraction_rate <= it.report.operator_norm_bound);
    CHECK(it.report.residual_norm <= kResidualTolerance);
  }
}

TEST_CASE("initialisation does not change the fixed point") {
  const auto f = chain(0.03);
  const auto w = Window::box(Site{0}, Site{7});
  SolveOptions zero;
  zero.init = Initialization::Zero;
  const auto a = solve_finite_volume(*f, w);
  const auto b = solve_finite_volume(*f, w, zero);
  for (std::size_t i = 0; i < a.phi.values().size(); ++i) {
    CHECK(std::abs(a.phi.values()[i] - b.phi.values()[i]) <= 1e-11);
  }
  CHECK(b.report.iterations >= a.report.iterations);
}

TEST_CASE("predicted iteration cap") {
  CHECK(predicted_max_iterations(0.5) == 400);
  CHECK(predicted_max_iterations(1.2) == kOverrideMaxIterations);
  CHECK(predicted_max_iterations(0.0) >= 1);
}

TEST_CASE("ungated strong coupling diverges under override") {
  const auto f = chain(3.0);
  SolveOptions o;
  o.override_gate = true;
  CHECK_THROWS_AS(solve_finite_volume(*f, Window::box(Site{0}, Site{5}), o), DivergenceError);
}

TEST_CASE("direct route refuses oversized systems") {
  const auto f = chain(0.03);
  CHECK_THROWS_AS(solve_finite_volume_direct(*f, Window::box(Site{0}, Site{14})), ResourceError);
}

TEST_CASE("infinite-volume centre value approaches the transfer-matrix limit") {
  const auto f = chain(0.03);
  const auto s = solve_infinite_volume(*f, Window::box(Site{-6}, Site{6}), 3);
  CHECK(s.report.trusted_depth.has_value());
  CHECK(s.report.dropped_mass >= 0.0);
  const auto t = solve_infinite_volume(*f, Window::box(Site{-8}, Site{8}), 3);
  CHECK(std::abs(s.phi(Configuration::singleton(Site{0}, 1)) -
                 t.phi(Configuration::singleton(Site{0}, 1))) <= 1e-6);
}

TEST_CASE("operator norm certificate reports the gate bound") {
  const auto f = chain(0.03);
  const auto s = solve_finite_volume(*f, Window::box(Site{0}, Site{5}));
  const auto cert = operator_norm_certificate(*f, &s.report);
  CHECK(cert.bound == doctest::Approx(field_bounds(*f).gate_lhs()));
  REQUIRE(cert.empirical.has_value());
  CHECK(*cert.empirical <= cert.bound);
}
