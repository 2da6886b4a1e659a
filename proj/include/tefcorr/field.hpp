#pragma once

// One-point transition energy fields and their extension to finite volumes.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tefcorr/lattice.hpp"

namespace tefcorr {

/// Evaluator for the single-site transition energies Delta_t^z(x, u).
///
/// The boundary z has finite support in t^c and is the vacuum elsewhere.  An
/// entry of z at t itself is ignored.  Implementations must be pure and safe
/// to call concurrently.
class OnePointEnergyField {
 public:
  virtual ~OnePointEnergyField() = default;

  virtual int dimension() const = 0;
  virtual const SpinSpace& spins() const = 0;

  virtual double eval(const Site& t, const Configuration& boundary, Spin x, Spin u) const = 0;

  /// Largest Chebyshev distance at which a boundary spin can change eval;
  /// nullopt when the dependence is not finite-range.
  virtual std::optional<int> dependence_range() const = 0;

  /// Sites over which lattice-wide suprema are taken.  Translation-invariant
  /// fields return a single reference site.
  virtual std::vector<Site> scan_sites() const = 0;

  virtual bool homogeneous() const { return scan_sites().size() == 1; }

  /// Closed-form sup |Delta_t^z(x,u)| when the field knows it.
  virtual std::optional<double> exact_norm() const { return std::nullopt; }
};

/// A pair interaction Phi_ts(a, b) of finite range with optional one-body
/// terms.  Homogeneous couplings are stored per offset s - t; site-specific
/// overrides (bonds, one-body terms) require a declared scan window that
/// contains every overridden site.
class PairPotential {
 public:
  PairPotential(int dimension, SpinSpace spins, int range);

  int dimension() const noexcept { return dimension_; }
  const SpinSpace& spins() const noexcept { return spins_; }
  int range() const noexcept { return range_; }

  /// Sets Phi for the offset s - t and also the mirrored entry (-offset, b, a).
  void set_coupling(const Site& offset, Spin a, Spin b, double value);
  /// Site-specific Phi_ts(a, b); mirrored onto Phi_st(b, a).
  void set_bond(const Site& t, const Site& s, Spin a, Spin b, double value);
  /// One-body energy of spin a at every site.
  void set_one_body(Spin a, double value);
  void set_one_body_at(const Site& t, Spin a, double value);
  void set_scan_window(Window window);

  double coupling(const Site& t, const Site& s, Spin a, Spin b) const;
  double one_body(const Site& t, Spin a) const;

  bool homogeneous() const noexcept { return bonds_.empty() && one_body_at_.empty(); }
  /// True when Phi vanishes whenever one argument is the vacuum.
  bool is_vacuum_potential() const;
  const std::optional<Window>& scan_window() const noexcept { return scan_window_; }

  /// All offsets o != 0 with |o| <= range, lexicographic.
  const std::vector<Site>& neighbourhood() const noexcept { return offsets_; }

  /// Checks symmetry, range and scan-window invariants; throws ModelError.
  void validate() const;

  /// ||Phi|| = sup_t sup_{x != vac} sum_s sup_{y != vac} |Phi_ts(x, y)|.
  double vacuum_norm() const;

  /// Sites at which suprema over the lattice are evaluated.
  std::vector<Site> scan_sites() const;

 private:
  using Table = std::vector<double>;  // |X| x |X|, row-major in (a, b)

  std::size_t offset_slot(const Site& offset) const;
  Table& bond_table(const Site& t, const Site& s);

  int dimension_;
  SpinSpace spins_;
  int range_;
  std::vector<Site> offsets_;
  std::vector<Table> offset_tables_;
  std::map<std::pair<Site, Site>, Table> bonds_;
  Table one_body_;
  std::map<Site, Table> one_body_at_;
  std::optional<Window> scan_window_;
};

/// Delta_t^z(x, u) = sum_{s != t} (Phi_ts(u z_s) - Phi_ts(x z_s)) + h_t(u) - h_t(x).
class PairPotentialField final : public OnePointEnergyField {
 public:
  explicit PairPotentialField(PairPotential potential);

  int dimension() const override { return potential_.dimension(); }
  const SpinSpace& spins() const override { return potential_.spins(); }
  double eval(const Site& t, const Configuration& boundary, Spin x, Spin u) const override;
  std::optional<int> dependence_range() const override { return potential_.range(); }
  std::vector<Site> scan_sites() const override { return potential_.scan_sites(); }
  std::optional<double> exact_norm() const override;

  const PairPotential& potential() const noexcept { return potential_; }

 private:
  PairPotential potential_;
};

/// Adds a fixed value to one evaluator entry Delta_t^z(x, u) for one site,
/// one ordered spin pair and one boundary pattern on the range-ball of t.
/// Used to exercise the consistency checkers with a known defect.
struct FieldPerturbation {
  Site t;
  Spin x;
  Spin u;
  Configuration boundary;
  double value;
};

class PerturbedField final : public OnePointEnergyField {
 public:
  PerturbedField(std::shared_ptr<const OnePointEnergyField> base,
                 std::vector<FieldPerturbation> perturbations);

  int dimension() const override { return base_->dimension(); }
  const SpinSpace& spins() const override { return base_->spins(); }
  double eval(const Site& t, const Configuration& boundary, Spin x, Spin u) const override;
  std::optional<int> dependence_range() const override { return base_->dependence_range(); }
  std::vector<Site> scan_sites() const override;

 private:
  std::shared_ptr<const OnePointEnergyField> base_;
  std::vector<FieldPerturbation> perturbations_;
};

/// The volume transition energy Delta_V^z(x, u) assembled by telescoping
/// single-site energies along `enumeration` (a permutation of the volume).
/// x and u are configurations supported in the volume; z lies outside it.
double delta_volume(const OnePointEnergyField& field, const Window& volume,
                    const Configuration& boundary, const Configuration& x, const Configuration& u,
                    std::span<const Site> enumeration);

/// delta_volume with the lexicographic enumeration of the volume.
double delta_volume(const OnePointEnergyField& field, const Window& volume,
                    const Configuration& boundary, const Configuration& x,
                    const Configuration& u);

}  // namespace tefcorr
