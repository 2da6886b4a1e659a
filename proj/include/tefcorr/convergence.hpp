#pragma once

// Window-convergence bounds and the empirical convergence study.
//
// tail_f_bound and epsilon_bound follow the chain of estimates used to show
// that finite-volume correlations converge; they are derived from that proof
// chain and are not closed forms stated elsewhere.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tefcorr/bounds.hpp"
#include "tefcorr/field.hpp"

namespace tefcorr {

/// Precomputed ingredients shared by the bound functions.
struct ConvergenceConstants {
  FieldBounds bounds;
  DecayProfile decay;
  /// ||delta|| = sup_t W/(1+W) with W = sum_{a != vac} e^{Delta_t(a, vac)}.
  double delta_norm = 0.0;
};

ConvergenceConstants convergence_constants(const OnePointEnergyField& field);

/// f(r) = 4 max(C1, C1') e^{||Delta_1||} (exp(e^{sigma_r} - 1) - 1), where
/// sigma_r is the kernel shift mass at distance greater than r.
double tail_f_bound(const ConvergenceConstants& c, std::int64_t r);
double tail_f_bound(const OnePointEnergyField& field, std::int64_t r);

/// ||delta|| min over n >= 0, r >= 1, n r <= d of
///   2 B^{n+1} / (1 - B) + [n > 0] 2 f(r) / (1 - B)^2,   B = gate bound.
/// Throws GateError when B >= 1.
double epsilon_bound(const ConvergenceConstants& c, std::int64_t d);
double epsilon_bound(const OnePointEnergyField& field, std::int64_t d);

/// Smallest d <= limit with epsilon_bound(d) <= target, if any.
std::optional<std::int64_t> trusted_depth(const ConvergenceConstants& c, double target = 1e-6,
                                          std::int64_t limit = 1000);

enum class WindowRoute { Exact, Solve };

struct ConvergenceOptions {
  WindowRoute route = WindowRoute::Exact;
  /// The reference window is the largest window grown by this many sites.
  int reference_margin = 2;
  bool override_gate = false;
  std::size_t k_max = 4;
};

struct ConvergenceRow {
  std::string window;
  std::size_t window_size = 0;
  /// min over probes of d(I, window^c).
  std::int64_t d = 0;
  double max_abs_deviation = 0.0;
  /// Pointwise bound epsilon(d_probe - 1) at the closest probe; NaN when the
  /// gate fails and no bound is available.
  double epsilon_bound = 0.0;
  /// Every probe satisfies |deviation| <= epsilon(d_probe - 1).
  bool within_bound = false;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct ConvergenceSeries {
  std::vector<ConvergenceRow> rows;
  std::string reference;  // description of the reference computation
  bool bound_available = false;
  double gate_lhs = 0.0;
};

/// Deviations of rho_window from a reference on an outer window for each of
/// the given increasing windows.  Probes must lie in the smallest window.
ConvergenceSeries convergence_profile(const OnePointEnergyField& field,
                                      const std::vector<Window>& windows,
                                      const std::vector<Configuration>& probes,
                                      const ConvergenceOptions& options = {});

/// The window grown by `margin` sites along every axis.
Window grow_window(const Window& window, int margin);

}  // namespace tefcorr
