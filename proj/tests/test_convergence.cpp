#include <cmath>

#include "doctest.h"
#include "support/models.hpp"
#include "tefcorr/convergence.hpp"
#include "tefcorr/errors.hpp"
#include "tefcorr/exact.hpp"

using namespace tefcorr;
using namespace tefcorr::testing;

namespace {

std::vector<Window> centred(std::initializer_list<int> half) {
  std::vector<Window> out;
  for (int h : half) out.push_back(Window::box(Site{-h}, Site{h}));
  return out;
}

}  // namespace

TEST_CASE("centre correlation of short chains against transfer matrices") {
  const auto f = chain(0.2);
  const auto centre = Configuration::singleton(Site{0}, 1);
  CHECK(std::abs(rho_exact(*f, Window::box(Site{-2}, Site{2}))(centre) - 0.45497808203919005) <= 1e-14);
  CHECK(std::abs(rho_exact(*f, Window::box(Site{-4}, Site{4}))(centre) - 0.454867952494746) <= 1e-14);
  const std::vector<Configuration> probe{centre};
  CHECK(std::abs(rho_exact_probes(*f, Window::box(Site{-8}, Site{8}), probe)[0] -
                 0.45486768189367743) <= 1e-14);
}

TEST_CASE("deviation profile of the J = 0.2 chain") {
  const auto f = chain(0.2);
  const auto series = convergence_profile(*f, centred({2, 4, 6, 8}),
                                          {Configuration::singleton(Site{0}, 1)});
  REQUIRE(series.rows.size() == 4);
  // Infinite-volume deviations from a transfer matrix; the reference here is a
  // finite window of 21 sites, which differs by about 4e-15.
  const double expected[] = {1.104001e-4, 2.706027e-7, 6.632832e-10, 1.625811e-12};
  const std::int64_t depth[] = {3, 5, 7, 9};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(series.rows[i].d == depth[i]);
    CHECK(std::abs(series.rows[i].max_abs_deviation - expected[i]) <= 1e-6 * expected[i] + 1e-14);
  }
  for (std::size_t i = 1; i < 4; ++i) {
    CHECK(series.rows[i].max_abs_deviation < series.rows[i - 1].max_abs_deviation);
  }
  CHECK_FALSE(series.bound_available);
  CHECK(std::isnan(series.rows[0].epsilon_bound));
  CHECK(series.gate_lhs > 1.0);
}

TEST_CASE("gated chain: deviations lie below the bound") {
  const auto f = chain(0.03);
  const auto series = convergence_profile(*f, centred({1, 2, 3, 4}),
                                          {Configuration::singleton(Site{0}, 1)});
  CHECK(series.bound_available);
  for (const auto& row : series.rows) {
    CHECK(row.within_bound);
    CHECK(row.max_abs_deviation <= row.epsilon_bound);
  }
}

TEST_CASE("epsilon bound of the J = 0.02 chain") {
  const auto f = chain(0.02);
  const auto c = convergence_constants(*f);
  CHECK(c.delta_norm == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(tail_f_bound(c, 0) - 0.09205333124618692) <= 1e-14);
  CHECK(tail_f_bound(c, 1) == 0.0);
  const double expected[] = {2.003791140145893,  1.3367037673372197,  0.8916982043764419,
                             0.5948406124956921, 0.39681066142965327, 0.26470738163557933};
  for (int d = 0; d < 6; ++d) {
    CAPTURE(d);
    CHECK(std::abs(epsilon_bound(c, d) - expected[d]) <= 1e-13);
  }
}

TEST_CASE("epsilon bound is nonincreasing and reaches any target") {
  for (double J : {0.005, 0.02, 0.03}) {
    const auto c = convergence_constants(*chain(J));
    double last = epsilon_bound(c, 0);
    for (int d = 1; d < 60; ++d) {
      const double e = epsilon_bound(c, d);
      CHECK(e <= last);
      last = e;
    }
    const auto depth = trusted_depth(c, 1e-6);
    REQUIRE(depth.has_value());
    CHECK(epsilon_bound(c, *depth) <= 1e-6);
    if (*depth > 0) CHECK(epsilon_bound(c, *depth - 1) > 1e-6);
  }
}

TEST_CASE("epsilon bound needs a certified contraction") {
  CHECK_THROWS_AS(epsilon_bound(*chain(0.2), 3), GateError);
}

TEST_CASE("profile arguments are validated") {
  const auto f = chain(0.03);
  const auto probe = Configuration::singleton(Site{0}, 1);
  CHECK_THROWS(convergence_profile(*f, centred({3, 2}), {probe}));
  CHECK_THROWS(convergence_profile(*f, centred({1, 2}), {Configuration::singleton(Site{5}, 1)}));
  CHECK(grow_window(Window::box(Site{0, 0}, Site{1, 1}), 2) == Window::box(Site{-2, -2}, Site{3, 3}));
}
