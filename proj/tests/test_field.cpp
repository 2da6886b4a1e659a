#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "support/models.hpp"
#include "tefcorr/errors.hpp"
#include "tefcorr/field.hpp"

using namespace tefcorr;
using namespace tefcorr::testing;

namespace {

// Sum of Phi over unordered pairs inside the support plus one-body terms.
double pair_energy(const PairPotential& p, const Configuration& c) {
  double e = 0.0;
  const auto entries = c.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    e += p.one_body(entries[i].first, entries[i].second);
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      e += p.coupling(entries[i].first, entries[j].first, entries[i].second, entries[j].second);
    }
  }
  return e;
}

Configuration random_config(std::mt19937_64& rng, std::span<const Site> sites, int q) {
  std::uniform_int_distribution<int> d(0, q - 1);
  Configuration c;
  for (const auto& s : sites) c.set(s, static_cast<Spin>(d(rng)));
  return c;
}

}  // namespace

TEST_CASE("hand-computed single-site energies of a chain") {
  const auto f = chain(0.2);
  const auto z = Configuration::singleton(Site{1}, 1);
  CHECK(f->eval(Site{0}, z, 1, 0) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(f->eval(Site{0}, z, 0, 1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(f->eval(Site{0}, Configuration{}, 1, 0) == 0.0);
  CHECK(f->eval(Site{0}, Configuration::singleton(Site{2}, 1), 1, 0) == 0.0);
  // An entry of the boundary at t itself is ignored.
  CHECK(f->eval(Site{0}, concat(z, Configuration::singleton(Site{0}, 1)), 1, 0) ==
        doctest::Approx(-0.2));
}

TEST_CASE("volume energy of a bonded pair") {
  const auto f = chain(0.2);
  const auto w = Window::box(Site{0}, Site{1});
  const auto both = Configuration({{Site{0}, 1}, {Site{1}, 1}});
  CHECK(delta_volume(*f, w, {}, both, {}) == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(delta_volume(*f, w, {}, {}, both) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("volume energy matches direct pair sums and ignores the enumeration") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 2;
    const int q = 2 + (trial / 2) % 2;
    const int range = 1 + (trial / 4) % 2;
    const PairPotential p = random_potential(rng, d, q, range, 0.5);
    const PairPotentialField f(p);
    const Window vol = d == 1 ? Window::box(Site{0}, Site{4}) : Window::box(Site{0, 0}, Site{1, 2});
    const Window outer = d == 1 ? Window::box(Site{-2}, Site{6}) : Window::box(Site{-2, -2}, Site{3, 4});
    std::vector<Site> ring;
    for (const auto& s : outer.sites()) {
      if (!vol.contains(s)) ring.push_back(s);
    }
    const auto z = random_config(rng, ring, q);
    const auto x = random_config(rng, vol.sites(), q);
    const auto u = random_config(rng, vol.sites(), q);
    const double direct = pair_energy(p, concat(x, z)) - pair_energy(p, concat(u, z));
    const double lex = delta_volume(f, vol, z, x, u);
    // Delta(x, u) = sum Phi(u) - sum Phi(x).
    CHECK(std::abs(lex + direct) < 1e-12);
    std::vector<Site> order(vol.sites().begin(), vol.sites().end());
    for (int k = 0; k < 5; ++k) {
      std::shuffle(order.begin(), order.end(), rng);
      CHECK(std::abs(delta_volume(f, vol, z, x, u, order) - lex) < 1e-12);
    }
  }
}

TEST_CASE("delta_volume rejects malformed arguments") {
  const auto f = chain(0.2);
  const auto w = Window::box(Site{0}, Site{1});
  const auto inside = Configuration::singleton(Site{0}, 1);
  CHECK_THROWS_AS(delta_volume(*f, w, inside, {}, {}), DomainError);
  CHECK_THROWS_AS(delta_volume(*f, w, {}, Configuration::singleton(Site{3}, 1), {}), DomainError);
  const std::vector<Site> partial{Site{0}};
  CHECK_THROWS_AS(delta_volume(*f, w, {}, {}, {}, partial), DomainError);
}

TEST_CASE("pair potential bookkeeping") {
  PairPotential p(1, SpinSpace::integers(3), 2);
  CHECK(p.neighbourhood().size() == 4);
  p.set_coupling(Site{1}, 1, 2, 0.3);
  CHECK(p.coupling(Site{0}, Site{1}, 1, 2) == 0.3);
  CHECK(p.coupling(Site{1}, Site{0}, 2, 1) == 0.3);
  CHECK(p.coupling(Site{0}, Site{3}, 1, 2) == 0.0);
  CHECK(p.is_vacuum_potential());
  CHECK(p.vacuum_norm() == doctest::Approx(0.3));
  p.set_coupling(Site{2}, 1, 1, -0.1);
  CHECK(p.vacuum_norm() == doctest::Approx(0.5));
  p.set_bond(Site{0}, Site{1}, 1, 1, 0.2);
  CHECK_THROWS_AS(p.validate(), ModelError);
  p.set_scan_window(Window::box(Site{-1}, Site{2}));
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("closed-form norm agrees with the boundary scan") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const PairPotentialField f(random_potential(rng, 1 + trial % 2, 2 + trial % 3 / 2, 1, 0.5));
    const auto z_sites = ball(Site::origin(f.dimension()), 1);
    double scan = 0.0;
    const auto q = f.spins().size();
    std::vector<Site> ring;
    for (const auto& s : z_sites) {
      if (s != Site::origin(f.dimension())) ring.push_back(s);
    }
    for (const auto& z : enumerate_configs(Window(ring), f.spins(), false)) {
      for (Spin x = 0; x < q; ++x) {
        for (Spin u = 0; u < q; ++u) {
          scan = std::max(scan, std::abs(f.eval(Site::origin(f.dimension()), z, x, u)));
        }
      }
    }
    CHECK(std::abs(*f.exact_norm() - scan) < 1e-14);
  }
}
