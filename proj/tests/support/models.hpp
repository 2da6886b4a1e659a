#pragma once

// Field factories shared by the unit tests and the acceptance binary.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "tefcorr/field.hpp"

namespace tefcorr::testing {

inline std::shared_ptr<const PairPotentialField> make_field(PairPotential p) {
  p.validate();
  return std::make_shared<PairPotentialField>(std::move(p));
}

/// No interaction at all: rho(x) = |X|^-|I|.
inline std::shared_ptr<const PairPotentialField> zero_field(int dimension = 1, int q = 2) {
  return make_field(PairPotential(dimension, SpinSpace::integers(q), 1));
}

/// Nearest-neighbour chain with Phi(1, 1) = J.
inline std::shared_ptr<const PairPotentialField> chain(double J) {
  PairPotential p(1, SpinSpace::integers(2), 1);
  p.set_coupling(Site{1}, 1, 1, J);
  return make_field(std::move(p));
}

inline std::shared_ptr<const PairPotentialField> two_site_ln2() { return chain(std::log(2.0)); }

/// 2-d, three spins, all eight neighbours coupled by a symmetric table.
inline std::shared_ptr<const PairPotentialField> square_three_spin() {
  PairPotential p(2, SpinSpace::integers(3), 1);
  const double table[3][3] = {{0, 0, 0}, {0, 0.1, -0.05}, {0, -0.05, 0.07}};
  for (const auto& o : p.neighbourhood()) {
    if (o < Site::origin(2)) continue;
    for (Spin a = 1; a < 3; ++a) {
      for (Spin b = 1; b < 3; ++b) p.set_coupling(o, a, b, table[a][b]);
    }
  }
  return make_field(std::move(p));
}

/// Homogeneous vacuum pair potential with couplings uniform in [-scale, scale].
/// Each unordered offset pair {o, -o} gets its own table, and tables are
/// symmetric in the spin pair when `symmetric_spins` holds.
inline PairPotential random_potential(std::mt19937_64& rng, int dimension, int q, int range,
                                      double scale, bool symmetric_spins = false) {
  PairPotential p(dimension, SpinSpace::integers(q), range);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (const auto& o : p.neighbourhood()) {
    if (o < Site::origin(dimension)) continue;
    for (Spin a = 1; a < q; ++a) {
      for (Spin b = 1; b < q; ++b) {
        if (symmetric_spins && b < a) continue;
        const double v = u(rng);
        p.set_coupling(o, a, b, v);
        if (symmetric_spins && a != b) p.set_coupling(o, b, a, v);
      }
    }
  }
  return p;
}

/// A random potential rescaled so that ||Phi|| equals `norm`.
inline std::shared_ptr<const PairPotentialField> random_gated_field(std::mt19937_64& rng,
                                                                    int dimension, int q,
                                                                    int range, double norm) {
  PairPotential raw = random_potential(rng, dimension, q, range, 1.0);
  const double scale = norm / raw.vacuum_norm();
  PairPotential p(dimension, SpinSpace::integers(q), range);
  for (const auto& o : raw.neighbourhood()) {
    for (Spin a = 1; a < q; ++a) {
      for (Spin b = 1; b < q; ++b) {
        p.set_coupling(o, a, b, scale * raw.coupling(Site::origin(dimension), o, a, b));
      }
    }
  }
  return make_field(std::move(p));
}

/// A 1-d two-state field from a three-body Hamiltonian
/// H = -K sum_t n_t n_{t+1} n_{t+2}.  Consistent, but not a pair field, so
/// the environment condition fails.
class TripleField final : public OnePointEnergyField {
 public:
  explicit TripleField(double K) : K_(K), spins_(SpinSpace::integers(2)) {}

  int dimension() const override { return 1; }
  const SpinSpace& spins() const override { return spins_; }
  double eval(const Site& t, const Configuration& z, Spin x, Spin u) const override {
    auto n = [&](std::int64_t o) -> double {
      const Site s = t + Site{o};
      return z.at(s) != kVacuum ? 1.0 : 0.0;
    };
    const double m = n(-2) * n(-1) + n(-1) * n(1) + n(1) * n(2);
    return K_ * m * (static_cast<double>(u) - static_cast<double>(x));
  }
  std::optional<int> dependence_range() const override { return 2; }
  std::vector<Site> scan_sites() const override { return {Site{0}}; }

 private:
  double K_;
  SpinSpace spins_;
};

}  // namespace tefcorr::testing
