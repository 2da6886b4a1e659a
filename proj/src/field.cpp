#include "tefcorr/field.hpp"

#include <algorithm>
#include <cmath>

#include "tefcorr/errors.hpp"

namespace tefcorr {

// ---------------------------------------------------------------------------
// PairPotential

PairPotential::PairPotential(int dimension, SpinSpace spins, int range)
    : dimension_(dimension), spins_(std::move(spins)), range_(range) {
  if (dimension < 1 || dimension > kMaxDimension) {
    throw ModelError("dimension must be in 1.." + std::to_string(kMaxDimension));
  }
  if (range < 0) throw ModelError("potential range must be nonnegative");
  for (const auto& o : ball(Site::origin(dimension), range)) {
    if (o != Site::origin(dimension)) offsets_.push_back(o);
  }
  const std::size_t q = spins_.size();
  offset_tables_.assign(offsets_.size(), Table(q * q, 0.0));
  one_body_.assign(q, 0.0);
}

std::size_t PairPotential::offset_slot(const Site& offset) const {
  auto it = std::lower_bound(offsets_.begin(), offsets_.end(), offset);
  if (it == offsets_.end() || *it != offset) {
    throw ModelError("coupling offset " + offset.str() + " outside range " +
                     std::to_string(range_));
  }
  return static_cast<std::size_t>(it - offsets_.begin());
}

void PairPotential::set_coupling(const Site& offset, Spin a, Spin b, double value) {
  if (offset.dimension() != dimension_) throw ModelError("coupling offset has wrong dimension");
  const std::size_t q = spins_.size();
  if (a >= q || b >= q) throw ModelError("coupling spin out of range");
  if (!std::isfinite(value)) throw ModelError("coupling value must be finite");
  offset_tables_[offset_slot(offset)][a * q + b] = value;
  offset_tables_[offset_slot(-offset)][b * q + a] = value;
}

PairPotential::Table& PairPotential::bond_table(const Site& t, const Site& s) {
  auto it = bonds_.find({t, s});
  if (it != bonds_.end()) return it->second;
  return bonds_.emplace(std::make_pair(t, s), offset_tables_[offset_slot(s - t)]).first->second;
}

void PairPotential::set_bond(const Site& t, const Site& s, Spin a, Spin b, double value) {
  if (t.dimension() != dimension_ || s.dimension() != dimension_) {
    throw ModelError("bond sites have wrong dimension");
  }
  const std::size_t q = spins_.size();
  if (a >= q || b >= q) throw ModelError("bond spin out of range");
  if (!std::isfinite(value)) throw ModelError("bond value must be finite");
  bond_table(t, s)[a * q + b] = value;
  bond_table(s, t)[b * q + a] = value;
}

void PairPotential::set_one_body(Spin a, double value) {
  if (a >= spins_.size()) throw ModelError("one-body spin out of range");
  if (!std::isfinite(value)) throw ModelError("one-body value must be finite");
  one_body_[a] = value;
}

void PairPotential::set_one_body_at(const Site& t, Spin a, double value) {
  if (t.dimension() != dimension_) throw ModelError("one-body site has wrong dimension");
  if (a >= spins_.size()) throw ModelError("one-body spin out of range");
  if (!std::isfinite(value)) throw ModelError("one-body value must be finite");
  auto it = one_body_at_.try_emplace(t, one_body_).first;
  it->second[a] = value;
}

void PairPotential::set_scan_window(Window window) {
  if (window.dimension() != dimension_) throw ModelError("scan window has wrong dimension");
  scan_window_ = std::move(window);
}

double PairPotential::coupling(const Site& t, const Site& s, Spin a, Spin b) const {
  const std::size_t q = spins_.size();
  if (!bonds_.empty()) {
    auto it = bonds_.find({t, s});
    if (it != bonds_.end()) return it->second[a * q + b];
  }
  const Site o = s - t;
  auto it = std::lower_bound(offsets_.begin(), offsets_.end(), o);
  if (it == offsets_.end() || *it != o) return 0.0;
  return offset_tables_[static_cast<std::size_t>(it - offsets_.begin())][a * q + b];
}

double PairPotential::one_body(const Site& t, Spin a) const {
  if (!one_body_at_.empty()) {
    auto it = one_body_at_.find(t);
    if (it != one_body_at_.end()) return it->second[a];
  }
  return one_body_[a];
}

bool PairPotential::is_vacuum_potential() const {
  const std::size_t q = spins_.size();
  auto vacuum_free = [&](const Table& tab) {
    for (std::size_t k = 0; k < q; ++k) {
      if (tab[k] != 0.0 || tab[k * q] != 0.0) return false;
    }
    return true;
  };
  for (const auto& tab : offset_tables_) {
    if (!vacuum_free(tab)) return false;
  }
  for (const auto& [key, tab] : bonds_) {
    if (!vacuum_free(tab)) return false;
  }
  return true;
}

void PairPotential::validate() const {
  if (homogeneous()) return;
  if (!scan_window_) {
    throw ModelError("site-specific terms require a scan window");
  }
  for (const auto& [key, tab] : bonds_) {
    if (!scan_window_->contains(key.first) || !scan_window_->contains(key.second)) {
      throw ModelError("bond " + key.first.str() + "-" + key.second.str() +
                       " leaves the scan window");
    }
    if (chebyshev_distance(key.first, key.second) > range_ || key.first == key.second) {
      throw ModelError("bond " + key.first.str() + "-" + key.second.str() + " outside range");
    }
  }
  for (const auto& [t, tab] : one_body_at_) {
    if (!scan_window_->contains(t)) {
      throw ModelError("one-body term at " + t.str() + " leaves the scan window");
    }
  }
}

std::vector<Site> PairPotential::scan_sites() const {
  if (homogeneous()) return {Site::origin(dimension_)};
  validate();
  std::vector<Site> out(scan_window_->sites().begin(), scan_window_->sites().end());
  // One background site whose range-ball misses the window entirely.
  std::int64_t far = scan_window_->sites().front()[0];
  for (const auto& s : scan_window_->sites()) far = std::max<std::int64_t>(far, s[0]);
  std::vector<std::int64_t> coords(dimension_);
  for (int i = 0; i < dimension_; ++i) coords[i] = scan_window_->sites().front()[i];
  coords[0] = far + 2 * std::int64_t{range_} + 1;
  out.emplace_back(std::span<const std::int64_t>(coords));
  return out;
}

double PairPotential::vacuum_norm() const {
  const std::size_t q = spins_.size();
  double best = 0.0;
  for (const auto& t : scan_sites()) {
    for (Spin x = 1; x < q; ++x) {
      double sum = 0.0;
      for (const auto& o : offsets_) {
        const Site s = t + o;
        double sup = 0.0;
        for (Spin y = 1; y < q; ++y) sup = std::max(sup, std::abs(coupling(t, s, x, y)));
        sum += sup;
      }
      best = std::max(best, sum);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// PairPotentialField

PairPotentialField::PairPotentialField(PairPotential potential)
    : potential_(std::move(potential)) {
  potential_.validate();
}

double PairPotentialField::eval(const Site& t, const Configuration& boundary, Spin x,
                                Spin u) const {
  if (x == u) return 0.0;
  double e = potential_.one_body(t, u) - potential_.one_body(t, x);
  for (const auto& o : potential_.neighbourhood()) {
    const Site s = t + o;
    const Spin zs = boundary.at(s);
    e += potential_.coupling(t, s, u, zs) - potential_.coupling(t, s, x, zs);
  }
  return e;
}

std::optional<double> PairPotentialField::exact_norm() const {
  // The boundary spins enter additively, so the sup over z factorises site by site.
  const std::size_t q = potential_.spins().size();
  double best = 0.0;
  for (const auto& t : potential_.scan_sites()) {
    for (Spin x = 0; x < q; ++x) {
      for (Spin u = 0; u < q; ++u) {
        if (x == u) continue;
        const double dh = potential_.one_body(t, u) - potential_.one_body(t, x);
        double hi = dh, lo = dh;
        for (const auto& o : potential_.neighbourhood()) {
          const Site s = t + o;
          double mx = -INFINITY, mn = INFINITY;
          for (Spin z = 0; z < q; ++z) {
            const double v = potential_.coupling(t, s, u, z) - potential_.coupling(t, s, x, z);
            mx = std::max(mx, v);
            mn = std::min(mn, v);
          }
          hi += mx;
          lo += mn;
        }
        best = std::max({best, hi, -lo});
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// PerturbedField

PerturbedField::PerturbedField(std::shared_ptr<const OnePointEnergyField> base,
                               std::vector<FieldPerturbation> perturbations)
    : base_(std::move(base)), perturbations_(std::move(perturbations)) {
  if (!base_) throw ModelError("perturbed field needs a base field");
  const auto range = base_->dependence_range();
  if (!range) throw ModelError("perturbations need a finite-range base field");
  for (const auto& p : perturbations_) {
    for (const auto& [s, spin] : p.boundary.entries()) {
      if (s == p.t || chebyshev_distance(s, p.t) > *range) {
        throw ModelError("perturbation boundary site " + s.str() + " outside the range-ball");
      }
    }
  }
}

double PerturbedField::eval(const Site& t, const Configuration& boundary, Spin x, Spin u) const {
  double e = base_->eval(t, boundary, x, u);
  const int range = *base_->dependence_range();
  for (const auto& p : perturbations_) {
    if (p.t != t || p.x != x || p.u != u) continue;
    const Configuration local = boundary.restricted(
        [&](const Site& s) { return s != t && chebyshev_distance(s, t) <= range; });
    if (local == p.boundary) e += p.value;
  }
  return e;
}

std::vector<Site> PerturbedField::scan_sites() const {
  std::vector<Site> out = base_->scan_sites();
  for (const auto& p : perturbations_) out.push_back(p.t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Volume energies

double delta_volume(const OnePointEnergyField& field, const Window& volume,
                    const Configuration& boundary, const Configuration& x, const Configuration& u,
                    std::span<const Site> enumeration) {
  if (enumeration.size() != volume.size()) {
    throw DomainError("enumeration is not a permutation of the volume");
  }
  {
    std::vector<Site> sorted(enumeration.begin(), enumeration.end());
    std::sort(sorted.begin(), sorted.end());
    if (!std::equal(sorted.begin(), sorted.end(), volume.sites().begin())) {
      throw DomainError("enumeration is not a permutation of the volume");
    }
  }
  for (const auto& [s, spin] : boundary.entries()) {
    if (volume.contains(s)) throw DomainError("boundary overlaps the volume at " + s.str());
  }
  for (const auto* c : {&x, &u}) {
    for (const auto& [s, spin] : c->entries()) {
      if (!volume.contains(s)) throw DomainError("configuration leaves the volume at " + s.str());
    }
  }
  // Step k sees u on the already-visited sites and x on the remaining ones.
  Configuration current = concat(boundary, x);
  double total = 0.0;
  for (const auto& t : enumeration) {
    const Spin xt = x.at(t);
    const Spin ut = u.at(t);
    current.set(t, kVacuum);
    total += field.eval(t, current, xt, ut);
    current.set(t, ut);
  }
  return total;
}

double delta_volume(const OnePointEnergyField& field, const Window& volume,
                    const Configuration& boundary, const Configuration& x,
                    const Configuration& u) {
  return delta_volume(field, volume, boundary, x, u, volume.sites());
}

}  // namespace tefcorr
