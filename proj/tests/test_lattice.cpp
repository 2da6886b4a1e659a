#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "tefcorr/errors.hpp"
#include "tefcorr/lattice.hpp"

using namespace tefcorr;

TEST_CASE("chebyshev and set distances") {
  CHECK(chebyshev_distance(Site{0, 0}, Site{3, -1}) == 3);
  CHECK(chebyshev_distance(Site{2}, Site{2}) == 0);
  const std::vector<Site> a{Site{0, 0}, Site{5, 5}};
  const std::vector<Site> b{Site{2, 1}, Site{7, 4}};
  CHECK(set_distance(a, b) == 2);
}

TEST_CASE("distance to the complement of a box") {
  const auto w = Window::box(Site{0, 0}, Site{4, 4});
  CHECK(distance_to_complement(Site{0, 0}, w) == 1);
  CHECK(distance_to_complement(Site{2, 2}, w) == 3);
  CHECK(distance_to_complement(Site{7, 2}, w) == 0);
  const std::vector<Site> pair{Site{2, 2}, Site{1, 2}};
  CHECK(distance_to_complement(pair, w) == 2);
}

TEST_CASE("interior shrinks a box one layer per unit of depth") {
  const auto w = Window::box(Site{0, 0}, Site{4, 4});
  CHECK(interior(w, 0).size() == 25);
  const auto one = interior(w, 1);
  const auto inner = Window::box(Site{1, 1}, Site{3, 3});
  CHECK(one == std::vector<Site>(inner.sites().begin(), inner.sites().end()));
  const auto two = interior(w, 2);
  REQUIRE(two.size() == 1);
  CHECK(two[0] == Site{2, 2});
  CHECK(interior(w, 3).empty());
}

TEST_CASE("ball sizes") {
  CHECK(ball(Site{0}, 2).size() == 5);
  CHECK(ball(Site{1, 1}, 1).size() == 9);
  CHECK(ball(Site{0, 0, 0}, 0).size() == 1);
}

TEST_CASE("configurations keep only non-vacuum spins in site order") {
  Configuration x;
  x.set(Site{3}, 1);
  x.set(Site{-1}, 2);
  x.set(Site{0}, 0);
  CHECK(x.size() == 2);
  CHECK(x.entries()[0].first == Site{-1});
  CHECK(x.at(Site{3}) == 1);
  CHECK(x.at(Site{5}) == kVacuum);
  x.set(Site{3}, kVacuum);
  CHECK(x.size() == 1);
}

TEST_CASE("concat and split_min") {
  const auto a = Configuration::singleton(Site{2}, 1);
  const auto b = Configuration({{Site{0}, 1}, {Site{5}, 2}});
  const auto ab = concat(a, b);
  CHECK(ab.size() == 3);
  CHECK_THROWS_AS(concat(a, ab), DomainError);
  const auto sp = split_min(ab);
  CHECK(sp.t == Site{0});
  CHECK(sp.spin == 1);
  CHECK(sp.rest == Configuration({{Site{2}, 1}, {Site{5}, 2}}));
  CHECK_THROWS_AS(split_min(Configuration{}), DomainError);
}

TEST_CASE("enumeration visits |X|^|window| distinct configurations") {
  const auto w = Window::box(Site{0}, Site{3});
  for (int q : {2, 3}) {
    const auto spins = SpinSpace::integers(q);
    for (bool star : {false, true}) {
      const auto all = enumerate_configs(w, spins, star);
      std::set<Configuration> distinct(all.begin(), all.end());
      const std::size_t expected = static_cast<std::size_t>(std::pow(q, 4));
      CHECK(all.size() == expected);
      CHECK(distinct.size() == expected);
    }
  }
  CHECK(*configuration_count(w, SpinSpace::integers(3)) == 81);
  CHECK_THROWS_AS(enumerate_configs(Window::box(Site{0}, Site{30}), SpinSpace::integers(2), false),
                  ResourceError);
}

TEST_CASE("spin labels round-trip with a non-leading vacuum") {
  SpinSpace s({"up", "empty", "down"}, 1);
  CHECK(s.n_star() == 2);
  CHECK(s.label(kVacuum) == "empty");
  for (const auto& l : s.labels()) CHECK(s.label(s.parse(l)) == l);
  CHECK_FALSE(s.find("sideways").has_value());
}

TEST_CASE("window string lists every site") {
  const auto w = Window::box(Site{0}, Site{1});
  CHECK(w.str() == "{(0) (1)}");
  CHECK(Configuration({{Site{0}, 1}, {Site{1}, 1}}).str() == "{(0)=1 (1)=1}");
}
