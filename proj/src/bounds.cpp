#include "tefcorr/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "tefcorr/errors.hpp"

namespace tefcorr {

namespace {

int finite_range(const OnePointEnergyField& field, const char* what) {
  const auto r = field.dependence_range();
  if (!r) throw ModelError(std::string(what) + " needs a finite-range field");
  return *r;
}

std::vector<Site> punctured_ball(const Site& t, int r) {
  std::vector<Site> out;
  for (const auto& s : ball(t, r)) {
    if (s != t) out.push_back(s);
  }
  return out;
}

}  // namespace

double norm_delta1(const OnePointEnergyField& field) {
  if (auto n = field.exact_norm()) return *n;
  return norm_delta1_scan(field);
}

double norm_delta1_scan(const OnePointEnergyField& field, std::uint64_t budget) {
  const int range = finite_range(field, "norm scan");
  const auto& spins = field.spins();
  const std::size_t q = spins.size();
  double best = 0.0;
  for (const auto& t : field.scan_sites()) {
    const auto around = punctured_ball(t, range);
    auto visit = [&](const Configuration& z) {
      for (Spin x = 0; x < q; ++x) {
        for (Spin u = 0; u < q; ++u) {
          if (x != u) best = std::max(best, std::abs(field.eval(t, z, x, u)));
        }
      }
    };
    if (around.empty()) {
      visit(Configuration{});
    } else {
      for_each_configuration(Window(around), spins, false, visit, budget);
    }
  }
  return best;
}

double site_shift(const OnePointEnergyField& field, const Site& t, const Site& s) {
  const std::size_t q = field.spins().size();
  const Configuration empty;
  double best = 0.0;
  for (Spin a = 1; a < q; ++a) {
    const auto boundary = Configuration::singleton(t, a);
    for (Spin y = 1; y < q; ++y) {
      best = std::max(best, std::abs(field.eval(s, boundary, y, kVacuum) -
                                     field.eval(s, empty, y, kVacuum)));
    }
  }
  return best;
}

DecayProfile::DecayProfile(int range, double D, std::vector<Site> offsets,
                           std::vector<std::vector<double>> shifts, std::vector<Site> anchors)
    : range_(range),
      D_(D),
      offsets_(std::move(offsets)),
      shifts_(std::move(shifts)),
      anchors_(std::move(anchors)) {}

std::size_t DecayProfile::anchor_row(const Site& t) const {
  if (anchors_.size() == 1) return 0;
  auto it = std::find(anchors_.begin(), anchors_.end(), t);
  if (it != anchors_.end()) return static_cast<std::size_t>(it - anchors_.begin());
  return anchors_.size() - 1;
}

double DecayProfile::sigma(const Window& window, const Site& t) const {
  const auto& row = shifts_[anchor_row(t)];
  double sum = 0.0;
  for (std::size_t k = 0; k < offsets_.size(); ++k) {
    if (!window.contains(t + offsets_[k])) sum += row[k];
  }
  return sum;
}

double DecayProfile::sigma_beyond(std::int64_t r) const {
  double best = 0.0;
  const Site origin = Site::origin(offsets_.empty() ? 1 : offsets_.front().dimension());
  for (const auto& row : shifts_) {
    double sum = 0.0;
    for (std::size_t k = 0; k < offsets_.size(); ++k) {
      if (chebyshev_distance(offsets_[k], origin) > r) sum += row[k];
    }
    best = std::max(best, sum);
  }
  return best;
}

DecayProfile decay_sums(const OnePointEnergyField& field) {
  const int range = finite_range(field, "decay sums");
  const std::size_t q = field.spins().size();
  const Site origin = Site::origin(field.dimension());
  const auto offsets = punctured_ball(origin, range);
  auto anchors = field.scan_sites();
  std::vector<std::vector<double>> shifts;
  double D = 0.0;
  const Configuration empty;
  for (const auto& t : anchors) {
    std::vector<double> row;
    row.reserve(offsets.size());
    for (const auto& o : offsets) row.push_back(site_shift(field, t, t + o));
    shifts.push_back(std::move(row));
    for (Spin x = 1; x < q; ++x) {
      const auto boundary = Configuration::singleton(t, x);
      double sum = 0.0;
      for (const auto& o : offsets) {
        const Site s = t + o;
        double sup = 0.0;
        for (Spin y = 1; y < q; ++y) {
          sup = std::max(sup, std::abs(field.eval(s, boundary, y, kVacuum) -
                                       field.eval(s, empty, y, kVacuum)));
        }
        sum += sup;
      }
      D = std::max(D, sum);
    }
  }
  if (!std::isfinite(D)) throw ModelError("decay sum is not finite");
  return DecayProfile(range, D, offsets, std::move(shifts), std::move(anchors));
}

double FieldBounds::C1_max() const { return std::max(C1, C1_prime); }

double FieldBounds::gate_lhs() const { return C1_max() * (1.0 + C2); }

FieldBounds contraction_constants(double norm_delta1, double D, int n_star) {
  if (n_star < 1) throw DomainError("N_X must be positive");
  if (!(norm_delta1 >= 0.0) || !(D >= 0.0)) throw DomainError("bounds must be nonnegative");
  FieldBounds b;
  b.norm_delta1 = norm_delta1;
  b.D = D;
  b.n_star = n_star;
  const double en = std::exp(norm_delta1) * n_star;
  b.C1 = en / (1.0 + en);
  b.C1_prime = en / (1.0 + std::exp(-norm_delta1) * n_star);
  b.C2 = 2.0 * (1.0 + 2.0 * en) * std::expm1(std::expm1(D));
  b.contraction_lhs = b.C1 * (1.0 + b.C2);
  b.contraction_lhs_prime = b.C1_prime * (1.0 + b.C2);
  return b;
}

FieldBounds field_bounds(const OnePointEnergyField& field) {
  return contraction_constants(norm_delta1(field), decay_sums(field).D(), field.spins().n_star());
}

SufficiencyResult pair_potential_sufficiency(double phi_norm, int n_star) {
  const auto b = contraction_constants(2.0 * phi_norm, phi_norm, n_star);
  return {b.contraction_lhs_prime, b.contraction_lhs_prime < 1.0};
}

}  // namespace tefcorr
