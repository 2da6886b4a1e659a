#include "tefcorr/operator.hpp"

#include <algorithm>
#include <cmath>

#include "tefcorr/errors.hpp"
#include "tefcorr/parallel.hpp"

namespace tefcorr {

namespace {

int radius_of(const OnePointEnergyField& field, const KernelTruncation& truncation) {
  if (truncation.interaction_radius) {
    if (*truncation.interaction_radius < 0) throw DomainError("interaction radius is negative");
    return *truncation.interaction_radius;
  }
  const auto r = field.dependence_range();
  if (!r) throw ModelError("kernel sums need a finite-range field or an explicit radius");
  return *r;
}

struct LocalWeights {
  std::vector<double> w;  // w[a] = e^{Delta_t^{x'}(a, vac)}, w[0] = 1
  double W = 0.0;         // sum over non-vacuum a
};

LocalWeights local_weights(const OnePointEnergyField& field, const Site& t,
                           const Configuration& rest) {
  const std::size_t q = field.spins().size();
  LocalWeights lw;
  lw.w.assign(q, 1.0);
  for (Spin a = 1; a < q; ++a) {
    lw.w[a] = std::exp(field.eval(t, rest, a, kVacuum));
    lw.W += lw.w[a];
  }
  return lw;
}

}  // namespace

double gamma(const OnePointEnergyField& field, const Configuration& x) {
  if (x.empty()) throw DomainError("gamma needs a nonempty configuration");
  const auto split = split_min(x);
  const auto lw = local_weights(field, split.t, split.rest);
  return lw.w[split.spin] / (1.0 + lw.W);
}

double delta_fn(const OnePointEnergyField& field, const Configuration& x) {
  if (x.empty()) throw DomainError("delta needs a nonempty configuration");
  return x.size() == 1 ? gamma(field, x) : 0.0;
}

double kernel(const OnePointEnergyField& field, const Site& t, Spin xt, const Configuration& y) {
  if (y.contains(t)) throw DomainError("kernel configuration overlaps its anchor site");
  if (xt == kVacuum) return 0.0;
  const auto boundary = Configuration::singleton(t, xt);
  const Configuration empty;
  double k = 1.0;
  for (const auto& [s, ys] : y.entries()) {
    k *= std::expm1(field.eval(s, boundary, ys, kVacuum) - field.eval(s, empty, ys, kVacuum));
  }
  return k;
}

double apply_G(const OnePointEnergyField& field, const SupportedFunction& phi,
               const Configuration& x, const KernelTruncation& truncation) {
  if (x.empty()) throw DomainError("G needs a nonempty configuration");
  const int radius = radius_of(field, truncation);
  const auto split = split_min(x);
  const std::size_t q = field.spins().size();
  std::vector<Site> free;
  for (const auto& s : phi.domain().window().sites()) {
    if (!x.contains(s) && chebyshev_distance(s, split.t) <= radius) free.push_back(s);
  }
  std::vector<Spin> y(free.size(), 0);
  double total = 0.0;
  while (true) {
    std::size_t k = 0;
    while (k < y.size() && ++y[k] == q) y[k++] = 0;
    if (k == y.size()) break;
    Configuration yc;
    for (std::size_t j = 0; j < free.size(); ++j) yc.set(free[j], y[j]);
    if (yc.size() > truncation.j_max) continue;
    const double K = kernel(field, split.t, split.spin, yc);
    if (K == 0.0 || std::abs(K) < truncation.term_floor) continue;
    const Configuration base = concat(split.rest, yc);
    double bracket = phi(base);
    for (Spin a = 1; a < q; ++a) bracket -= phi(base.with(split.t, a));
    total += K * bracket;
  }
  return total;
}

double apply_K_at(const OnePointEnergyField& field, const SupportedFunction& phi,
                  const Configuration& x, const KernelTruncation& truncation) {
  if (x.empty()) throw DomainError("K needs a nonempty configuration");
  const auto split = split_min(x);
  const auto lw = local_weights(field, split.t, split.rest);
  const double g = lw.w[split.spin] / (1.0 + lw.W);
  const double S = x.size() > 1 ? phi(split.rest) : 0.0;
  double T = (1.0 + lw.W) * apply_G(field, phi, x, truncation);
  for (Spin b = 1; b < lw.w.size(); ++b) {
    T -= lw.w[b] * apply_G(field, phi, split.rest.with(split.t, b), truncation);
  }
  return g * (S + T);
}

SupportedFunction apply_K(const OnePointEnergyField& field, const SupportedFunction& phi,
                          const KernelTruncation& truncation,
                          const std::optional<Window>& projection) {
  SupportedFunction out(phi.domain_ptr());
  const auto& dom = phi.domain();
  auto vals = out.values();
  parallel_for(dom.size(), [&](std::size_t i) {
    if (projection && !dom.supported_in(i, *projection)) return;
    vals[i] = apply_K_at(field, phi, dom.config(i), truncation);
  }, 16);
  return out;
}

SupportedFunction delta_function(const OnePointEnergyField& field,
                                 std::shared_ptr<const FunctionDomain> domain) {
  SupportedFunction out(domain);
  for (std::size_t i = 0; i < domain->size(); ++i) {
    if (domain->config(i).size() == 1) out.values()[i] = gamma(field, domain->config(i));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse assembly

namespace {

using Entry = std::pair<std::uint16_t, Spin>;

/// Kernel factors around one anchor: for each neighbour index j in the
/// window, f[(a * q + y)] = e^{Delta_s^{t->a}(y) - Delta_s(y)} - 1.
struct Neighbour {
  std::uint16_t index;
  std::vector<double> f;
};

std::vector<std::vector<Neighbour>> neighbour_tables(const OnePointEnergyField& field,
                                                     const Window& window, int radius) {
  const std::size_t q = field.spins().size();
  const Configuration empty;
  std::vector<std::vector<Neighbour>> out(window.size());
  parallel_for(window.size(), [&](std::size_t ti) {
    const Site& t = window[ti];
    for (const auto& s : ball(t, radius)) {
      if (s == t) continue;
      const auto j = window.index_of(s);
      if (!j) continue;
      Neighbour nb{static_cast<std::uint16_t>(*j), std::vector<double>(q * q, 0.0)};
      bool any = false;
      for (Spin a = 1; a < q; ++a) {
        const auto boundary = Configuration::singleton(t, a);
        for (Spin y = 1; y < q; ++y) {
          const double v =
              std::expm1(field.eval(s, boundary, y, kVacuum) - field.eval(s, empty, y, kVacuum));
          nb.f[a * q + y] = v;
          any = any || v != 0.0;
        }
      }
      if (any) out[ti].push_back(std::move(nb));
    }
  }, 8);
  return out;
}

}  // namespace

AssembledOperator::AssembledOperator(const OnePointEnergyField& field,
                                     std::shared_ptr<const FunctionDomain> domain,
                                     const KernelTruncation& truncation)
    : domain_(std::move(domain)) {
  const auto& dom = *domain_;
  const std::size_t q = field.spins().size();
  if (q != dom.spin_count()) throw DomainError("field and domain disagree on the spin count");
  const int radius = radius_of(field, truncation);
  const auto neighbours = neighbour_tables(field, dom.window(), radius);

  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    double dropped = 0.0;
  };
  std::vector<Row> rows(dom.size());
  delta_.assign(dom.size(), 0.0);

  parallel_for(dom.size(), [&](std::size_t i) {
    Row& row = rows[i];
    const auto entries = dom.entries(i);
    const std::uint16_t ti = entries.front().first;
    const Spin xt = entries.front().second;
    const Site& t = dom.window()[ti];
    const std::span<const Entry> rest_entries = entries.subspan(1);
    Configuration rest;
    for (const auto& [idx, spin] : rest_entries) rest.set(dom.window()[idx], spin);
    const auto lw = local_weights(field, t, rest);
    const double g = lw.w[xt] / (1.0 + lw.W);
    if (entries.size() == 1) delta_[i] = g;

    std::vector<Entry> key_entries;
    auto add = [&](std::span<const Entry> base, std::span<const Entry> extra,
                   std::optional<Entry> anchor, double c) {
      key_entries.assign(base.begin(), base.end());
      key_entries.insert(key_entries.end(), extra.begin(), extra.end());
      if (anchor) key_entries.push_back(*anchor);
      std::optional<std::size_t> col;
      if (!key_entries.empty() && key_entries.size() <= dom.k_max()) {
        std::sort(key_entries.begin(), key_entries.end());
        col = dom.find(make_key(key_entries));
      }
      if (col) {
        row.terms.emplace_back(*col, c);
      } else {
        row.dropped += std::abs(c);
      }
    };

    if (entries.size() > 1) add(rest_entries, {}, std::nullopt, g);

    // Neighbours of t outside the support of x.
    std::vector<const Neighbour*> free;
    for (const auto& nb : neighbours[ti]) {
      bool occupied = false;
      for (const auto& [idx, spin] : entries) occupied = occupied || idx == nb.index;
      if (!occupied) free.push_back(&nb);
    }
    std::vector<Spin> y(free.size(), 0);
    std::vector<Entry> ye;
    std::vector<double> K(q);
    while (true) {
      std::size_t k = 0;
      while (k < y.size() && ++y[k] == q) y[k++] = 0;
      if (k == y.size()) break;
      ye.clear();
      for (std::size_t j = 0; j < free.size(); ++j) {
        if (y[j] != kVacuum) ye.emplace_back(free[j]->index, y[j]);
      }
      if (ye.size() > truncation.j_max) continue;
      double kmax = 0.0;
      K[0] = 0.0;
      for (Spin a = 1; a < q; ++a) {
        double prod = 1.0;
        for (std::size_t j = 0; j < free.size(); ++j) {
          if (y[j] != kVacuum) prod *= free[j]->f[a * q + y[j]];
        }
        K[a] = prod;
        kmax = std::max(kmax, std::abs(prod));
      }
      if (kmax == 0.0) continue;
      double c = (1.0 + lw.W) * K[xt];
      for (Spin b = 1; b < q; ++b) c -= lw.w[b] * K[b];
      c *= g;
      if (kmax < truncation.term_floor) {
        row.dropped += std::abs(c) * static_cast<double>(q);
        continue;
      }
      std::sort(ye.begin(), ye.end());
      add(rest_entries, ye, std::nullopt, c);
      for (Spin b = 1; b < q; ++b) add(rest_entries, ye, Entry{ti, b}, -c);
    }

    std::stable_sort(row.terms.begin(), row.terms.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<std::size_t, double>> merged;
    for (const auto& [col, v] : row.terms) {
      if (!merged.empty() && merged.back().first == col) {
        merged.back().second += v;
      } else {
        merged.emplace_back(col, v);
      }
    }
    row.terms.clear();
    for (const auto& m : merged) {
      if (m.second != 0.0) row.terms.push_back(m);
    }
  }, 32);

  row_start_.reserve(dom.size() + 1);
  row_start_.push_back(0);
  for (const auto& row : rows) {
    for (const auto& [col, v] : row.terms) {
      cols_.push_back(col);
      vals_.push_back(v);
    }
    row_start_.push_back(cols_.size());
    dropped_mass_ = std::max(dropped_mass_, row.dropped);
  }
}

void AssembledOperator::apply(std::span<const double> phi, std::span<double> out) const {
  parallel_for(rows(), [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) s += vals_[k] * phi[cols_[k]];
    out[i] = s;
  }, 512);
}

}  // namespace tefcorr
