#include <cmath>
#include <sstream>

#include "doctest.h"
#include "tefcorr/bounds.hpp"
#include "tefcorr/model_io.hpp"

using namespace tefcorr;

namespace {

const char* kChain =
    "# chain\n"
    "dimension = 1\n"
    "spins = 0 1\n"
    "vacuum = 0\n"
    "range = 1\n"
    "coupling = 1 : 1 1 : 0.2   # nearest neighbour\n";

}  // namespace

TEST_CASE("a chain model parses into the expected field") {
  const auto m = parse_model(kChain);
  CHECK(m.field->dimension() == 1);
  CHECK(m.potential->coupling(Site{0}, Site{1}, 1, 1) == 0.2);
  CHECK(m.potential->coupling(Site{0}, Site{-1}, 1, 1) == 0.2);
  CHECK_FALSE(m.perturbed);
  CHECK(m.digest.size() == 16);
  CHECK(norm_delta1(*m.field) == doctest::Approx(0.4));
}

TEST_CASE("digest depends on the bytes of the model") {
  CHECK(parse_model(kChain).digest == parse_model(kChain).digest);
  CHECK(parse_model(kChain).digest != parse_model(std::string(kChain) + "\n").digest);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("parse errors carry line and column") {
  auto position = [](const std::string& text) {
    try {
      parse_model(text, "m");
    } catch (const InputError& e) {
      return std::make_pair(e.line(), e.column());
    }
    return std::make_pair(std::size_t{0}, std::size_t{0});
  };
  const std::string head = "dimension = 1\nspins = 0 1\nvacuum = 0\nrange = 1\n";
  CHECK(position(head + "coupling = 1 : 1 1 : abc\n") == std::make_pair(std::size_t{5}, std::size_t{22}));
  CHECK(position(head + "colour = red\n").first == 5);
  CHECK(position(head + "coupling = 1 : 1 7 : 0.1\n").first == 5);
  CHECK(position("dimension = 1\nspins = 0 1\nrange = 1\n").first == 1);
  CHECK(position("dimension = 9\nspins = 0 1\nvacuum = 0\nrange = 1\n") ==
        std::make_pair(std::size_t{1}, std::size_t{13}));
  CHECK(position(head + "coupling = 3 : 1 1 : 0.1\n").first == 5);
}

TEST_CASE("perturbations and site-specific terms") {
  const std::string text = std::string(kChain) +
                           "scan_window = 0 : 3\n"
                           "onebody_at = 2 : 1 : 0.5\n"
                           "perturb = 0 : 1 0 : 1=1 : 0.1\n";
  const auto m = parse_model(text);
  CHECK(m.perturbed);
  CHECK(m.potential->one_body(Site{2}, 1) == 0.5);
  CHECK(m.field->eval(Site{0}, Configuration::singleton(Site{1}, 1), 1, 0) ==
        doctest::Approx(-0.1));
}

TEST_CASE("windows and probes") {
  CHECK(parse_window("0:7", 1) == Window::box(Site{0}, Site{7}));
  CHECK(parse_window("0,0:2,1", 2).size() == 6);
  CHECK_THROWS_AS(parse_window("3:1", 1), InputError);
  CHECK_THROWS_AS(parse_window("0:1", 2), InputError);
  const auto spins = SpinSpace::integers(3);
  const auto probes = parse_probes("0,0=1;0,1=2\n# comment\n\n1,1=1\n", spins, 2);
  REQUIRE(probes.size() == 2);
  CHECK(probes[0] == Configuration({{Site{0, 0}, 1}, {Site{0, 1}, 2}}));
  CHECK_THROWS_AS(parse_probes("0,0=0\n", spins, 2), InputError);
  CHECK_THROWS_AS(parse_probes("0,0=1;0,0=2\n", spins, 2), InputError);
}

TEST_CASE("doubles are printed with round-trip precision") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 7.0)) == 1.0 / 7.0);
  std::ostringstream os;
  write_header(os, {{"tool", "tefcorr"}, {"seed", "0"}});
  CHECK(os.str() == "# tool\ttefcorr\n# seed\t0\n");
}
