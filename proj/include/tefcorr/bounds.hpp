#pragma once

// Scalar bounds of a one-point field: the sup-norm of Delta_1, the decay
// constant D, tail sums sigma, and the contraction constants C1, C1', C2.

#include <cstdint>
#include <vector>

#include "tefcorr/field.hpp"

namespace tefcorr {

/// sup |Delta_t^z(x, u)| over scan sites, spin pairs and boundaries.  Uses the
/// field's closed form when it has one, otherwise norm_delta1_scan.
double norm_delta1(const OnePointEnergyField& field);

/// Exhaustive scan over all boundaries on the dependence ball of each scan site.
double norm_delta1_scan(const OnePointEnergyField& field,
                        std::uint64_t budget = kDefaultEnumerationBudget);

/// Single-site shift sup_{a in X, y in X} |Delta_s^{t->a}(y, vac) - Delta_s(y, vac)|.
double site_shift(const OnePointEnergyField& field, const Site& t, const Site& s);

/// Decay data of a finite-range field, per scan site and offset.
class DecayProfile {
 public:
  DecayProfile(int range, double D, std::vector<Site> offsets,
               std::vector<std::vector<double>> shifts, std::vector<Site> anchors);

  int range() const noexcept { return range_; }
  /// D = sup_t sup_x sum_{s != t} sup_y |Delta_s^{t->x}(y, vac) - Delta_s(y, vac)|.
  double D() const noexcept { return D_; }

  /// sigma(window) seen from the anchor t: sum over s outside the window of
  /// site_shift(t, s).  Anchors not in the scan set use the background row.
  double sigma(const Window& window, const Site& t) const;

  /// sup_t of the shift sum over |s - t| > r, i.e. sigma(ball(t, r)).
  double sigma_beyond(std::int64_t r) const;

 private:
  std::size_t anchor_row(const Site& t) const;

  int range_;
  double D_;
  std::vector<Site> offsets_;
  std::vector<std::vector<double>> shifts_;  // [anchor][offset]
  std::vector<Site> anchors_;
};

/// D and the per-offset shifts; the field must have finite range.
DecayProfile decay_sums(const OnePointEnergyField& field);

struct FieldBounds {
  double norm_delta1 = 0.0;
  double D = 0.0;
  int n_star = 1;
  /// e^n N / (1 + e^n N) as displayed with the constants.
  double C1 = 0.0;
  /// e^n N / (1 + e^{-n} N), the per-configuration bound of the contraction proof.
  double C1_prime = 0.0;
  double C2 = 0.0;
  /// C1 (1 + C2).
  double contraction_lhs = 0.0;
  /// C1' (1 + C2).
  double contraction_lhs_prime = 0.0;

  /// max(C1, C1') (1 + C2): the certified bound on the operator norm.
  double gate_lhs() const;
  bool passes() const { return gate_lhs() < 1.0; }
  double C1_max() const;
};

/// Closed forms for given ||Delta_1||, D and N_X.
FieldBounds contraction_constants(double norm_delta1, double D, int n_star);

FieldBounds field_bounds(const OnePointEnergyField& field);

struct SufficiencyResult {
  double lhs = 0.0;
  bool passes = false;
};

/// Sufficient contraction condition for a pair potential: the C1' (1 + C2)
/// form evaluated at ||Delta_1|| = 2 ||Phi|| and D = ||Phi||.
SufficiencyResult pair_potential_sufficiency(double phi_norm, int n_star);

}  // namespace tefcorr
