#include <cmath>
#include <random>

#include "doctest.h"
#include "support/models.hpp"
#include "tefcorr/bounds.hpp"

using namespace tefcorr;
using namespace tefcorr::testing;

namespace {

bool close(double a, double b, double rel = 1e-13) {
  return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

}  // namespace

TEST_CASE("contraction constants against independent closed forms") {
  const auto a = contraction_constants(0.0, 0.0, 1);
  CHECK(a.C1 == 0.5);
  CHECK(a.C1_prime == 0.5);
  CHECK(a.C2 == 0.0);
  CHECK(a.gate_lhs() == 0.5);
  CHECK(a.passes());

  const auto b = contraction_constants(0.1, 0.05, 1);
  CHECK(close(b.C1, 0.52497918747894));
  CHECK(close(b.C1_prime, 0.5801917305967077));
  CHECK(close(b.C2, 0.3377806934598468));
  CHECK(close(b.gate_lhs(), 0.7761692956973323));
  CHECK(close(b.contraction_lhs, 0.7023070214775633));
  CHECK(b.C1_max() == b.C1_prime);

  const auto c = contraction_constants(0.4, 0.4, 1);
  CHECK(close(c.gate_lhs(), 5.413843384502553));
  CHECK(close(c.contraction_lhs, 3.6290077467294926));
  CHECK_FALSE(c.passes());

  CHECK(close(contraction_constants(2.0, 2.0, 2).gate_lhs(), 422405.22590928857));
}

TEST_CASE("pair-potential sufficiency condition") {
  CHECK(close(pair_potential_sufficiency(0.0, 1).lhs, 0.5));
  const auto weak = pair_potential_sufficiency(0.05, 1);
  CHECK(close(weak.lhs, 0.7761692956973323));
  CHECK(weak.passes);
  const auto strong = pair_potential_sufficiency(1.0, 1);
  CHECK(close(strong.lhs, 946.0918251702647, 1e-12));
  CHECK_FALSE(strong.passes);
}

TEST_CASE("chain norms and decay sums") {
  for (double J : {0.03, 0.2, -0.4}) {
    const auto f = chain(J);
    CHECK(close(norm_delta1(*f), 2 * std::abs(J)));
    CHECK(close(norm_delta1_scan(*f), 2 * std::abs(J)));
    const auto decay = decay_sums(*f);
    CHECK(close(decay.D(), 2 * std::abs(J)));
    CHECK(close(decay.sigma_beyond(0), 2 * std::abs(J)));
    CHECK(decay.sigma_beyond(1) == 0.0);
    CHECK(close(site_shift(*f, Site{0}, Site{1}), std::abs(J)));
    CHECK(site_shift(*f, Site{0}, Site{2}) == 0.0);
    // Only the right neighbour of 0 lies outside {-5..0}.
    CHECK(close(decay.sigma(Window::box(Site{-5}, Site{0}), Site{0}), std::abs(J)));
  }
}

TEST_CASE("field bounds of the zero field") {
  const auto b = field_bounds(*zero_field(1, 2));
  CHECK(b.norm_delta1 == 0.0);
  CHECK(b.D == 0.0);
  CHECK(b.gate_lhs() == 0.5);
  const auto b3 = field_bounds(*zero_field(2, 3));
  CHECK(b3.n_star == 2);
  CHECK(close(b3.gate_lhs(), 2.0 / 3.0));
}

TEST_CASE("gate bound grows with the coupling strength") {
  double last = 0.0;
  for (double J : {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5}) {
    const double g = field_bounds(*chain(J)).gate_lhs();
    CHECK(g >= last);
    last = g;
  }
}

TEST_CASE("norm scan agrees with the closed form on random fields") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 6; ++k) {
    const PairPotentialField f(random_potential(rng, 1 + k % 2, 2 + k % 2, 1, 0.5));
    CHECK(close(norm_delta1(f), norm_delta1_scan(f), 1e-14));
  }
}

TEST_CASE("potential norm bounds the field constants") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 10; ++k) {
    const PairPotential p = random_potential(rng, 1 + k % 2, 2 + k % 2, 1 + k % 3 / 2, 0.05);
    const PairPotentialField f(p);
    const auto b = field_bounds(f);
    CHECK(b.norm_delta1 <= 2 * p.vacuum_norm() + 1e-15);
    CHECK(b.D <= p.vacuum_norm() + 1e-15);
  }
}
