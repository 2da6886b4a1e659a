#include "tefcorr/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tefcorr/errors.hpp"
#include "tefcorr/exact.hpp"
#include "tefcorr/solver.hpp"

namespace tefcorr {

ConvergenceConstants convergence_constants(const OnePointEnergyField& field) {
  ConvergenceConstants c{field_bounds(field), decay_sums(field), 0.0};
  const std::size_t q = field.spins().size();
  const Configuration empty;
  for (const auto& t : field.scan_sites()) {
    double W = 0.0;
    for (Spin a = 1; a < q; ++a) W += std::exp(field.eval(t, empty, a, kVacuum));
    c.delta_norm = std::max(c.delta_norm, W / (1.0 + W));
  }
  return c;
}

double tail_f_bound(const ConvergenceConstants& c, std::int64_t r) {
  if (r < 0) throw DomainError("tail distance must be nonnegative");
  const double sigma = c.decay.sigma_beyond(r);
  return 4.0 * c.bounds.C1_max() * std::exp(c.bounds.norm_delta1) * std::expm1(std::expm1(sigma));
}

double tail_f_bound(const OnePointEnergyField& field, std::int64_t r) {
  return tail_f_bound(convergence_constants(field), r);
}

double epsilon_bound(const ConvergenceConstants& c, std::int64_t d) {
  if (d < 0) throw DomainError("depth must be nonnegative");
  const double B = c.bounds.gate_lhs();
  if (!(B < 1.0)) {
    throw GateError("epsilon bound needs a certified contraction (bound " + std::to_string(B) +
                        ")",
                    B);
  }
  const double geometric_scale = 2.0 / (1.0 - B);
  const double tail_scale = 2.0 / ((1.0 - B) * (1.0 - B));
  double best = geometric_scale * B;  // n = 0
  for (std::int64_t r = 1; r <= std::max<std::int64_t>(d, 1); ++r) {
    const std::int64_t n = d / r;
    if (n == 0) break;
    const double tail = tail_scale * tail_f_bound(c, r);
    // For fixed r the geometric term is smallest at the largest n.
    const double value = geometric_scale * std::pow(B, static_cast<double>(n + 1)) + tail;
    best = std::min(best, value);
  }
  return c.delta_norm * best;
}

double epsilon_bound(const OnePointEnergyField& field, std::int64_t d) {
  return epsilon_bound(convergence_constants(field), d);
}

std::optional<std::int64_t> trusted_depth(const ConvergenceConstants& c, double target,
                                          std::int64_t limit) {
  for (std::int64_t d = 0; d <= limit; ++d) {
    if (epsilon_bound(c, d) <= target) return d;
  }
  return std::nullopt;
}

Window grow_window(const Window& window, int margin) {
  if (margin < 0) throw DomainError("margin must be nonnegative");
  std::set<Site> sites;
  for (const auto& s : window.sites()) {
    for (const auto& b : ball(s, margin)) sites.insert(b);
  }
  return Window(std::vector<Site>(sites.begin(), sites.end()));
}

namespace {

bool enumerable(const Window& window, std::size_t q) {
  const auto count = configuration_count(window, SpinSpace::integers(static_cast<int>(q)));
  return count && *count <= kDefaultEnumerationBudget;
}

struct WindowValues {
  std::vector<double> values;
  std::size_t iterations = 0;
  double residual = 0.0;
};

WindowValues window_values(const OnePointEnergyField& field, const Window& window,
                           const std::vector<Configuration>& probes, WindowRoute route,
                           const ConvergenceOptions& options, const FieldBounds& bounds) {
  if (route == WindowRoute::Exact && enumerable(window, field.spins().size())) {
    return {rho_exact_probes(field, window, probes), 0, 0.0};
  }
  SolveOptions so;
  so.override_gate = options.override_gate;
  so.bounds = bounds;
  const auto sol = solve_finite_volume(field, window, so);
  WindowValues out;
  for (const auto& p : probes) out.values.push_back(sol.phi(p));
  out.iterations = sol.report.iterations;
  out.residual = sol.report.residual_norm;
  return out;
}

}  // namespace

ConvergenceSeries convergence_profile(const OnePointEnergyField& field,
                                      const std::vector<Window>& windows,
                                      const std::vector<Configuration>& probes,
                                      const ConvergenceOptions& options) {
  if (windows.empty()) throw DomainError("convergence study needs at least one window");
  if (probes.empty()) throw DomainError("convergence study needs at least one probe");
  for (std::size_t k = 1; k < windows.size(); ++k) {
    if (!windows[k].contains_all(windows[k - 1].sites()) || windows[k] == windows[k - 1]) {
      throw DomainError("windows must be strictly increasing: " + windows[k].str() +
                        " does not extend " + windows[k - 1].str());
    }
  }
  for (const auto& p : probes) {
    if (p.empty()) throw DomainError("probes must be nonempty configurations");
    const auto support = p.support();
    if (!windows.front().contains_all(support)) {
      throw DomainError("probe " + p.str() + " outside window " + windows.front().str());
    }
  }

  const auto constants = convergence_constants(field);
  ConvergenceSeries series;
  series.gate_lhs = constants.bounds.gate_lhs();
  series.bound_available = constants.bounds.passes();

  const Window ref_window = grow_window(windows.back(), options.reference_margin);
  std::vector<double> reference;
  if (enumerable(ref_window, field.spins().size())) {
    reference = rho_exact_probes(field, ref_window, probes);
    series.reference = "exact enumeration on " + ref_window.str();
  } else {
    SolveOptions so;
    so.override_gate = options.override_gate;
    so.bounds = constants.bounds;
    const auto sol = solve_infinite_volume(field, ref_window, options.k_max, so);
    for (const auto& p : probes) reference.push_back(sol.phi(p));
    series.reference = "infinite-volume iteration on " + ref_window.str() +
                       " with k_max " + std::to_string(options.k_max);
  }

  for (const auto& window : windows) {
    const auto values =
        window_values(field, window, probes, options.route, options, constants.bounds);
    ConvergenceRow row;
    row.window = window.str();
    row.window_size = window.size();
    row.iterations = values.iterations;
    row.residual = values.residual;
    row.d = std::numeric_limits<std::int64_t>::max();
    row.within_bound = series.bound_available;
    row.epsilon_bound = std::nan("");
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const auto support = probes[k].support();
      const std::int64_t d = distance_to_complement(support, window);
      const double dev = std::abs(values.values[k] - reference[k]);
      row.max_abs_deviation = std::max(row.max_abs_deviation, dev);
      if (d < row.d) {
        row.d = d;
        if (series.bound_available) row.epsilon_bound = epsilon_bound(constants, d - 1);
      }
      if (series.bound_available && !(dev <= epsilon_bound(constants, d - 1))) {
        row.within_bound = false;
      }
    }
    series.rows.push_back(std::move(row));
  }
  return series;
}

}  // namespace tefcorr
