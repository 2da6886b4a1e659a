#pragma once

// Fixed-point solvers for phi = delta + K phi on a window.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tefcorr/bounds.hpp"
#include "tefcorr/operator.hpp"

namespace tefcorr {

inline constexpr double kUpdateTolerance = 1e-12;
inline constexpr double kResidualTolerance = 1e-10;
/// Update norms at or below this are rounding noise and do not enter the
/// empirical contraction rate.
inline constexpr double kRateNoiseFloor = 1e-11;
inline constexpr std::size_t kOverrideMaxIterations = 1000;

enum class Initialization { Delta, Zero };

struct SolveOptions {
  double update_tol = kUpdateTolerance;
  double residual_tol = kResidualTolerance;
  KernelTruncation truncation{};
  Initialization init = Initialization::Delta;
  /// Iterate even when the contraction gate fails.
  bool override_gate = false;
  /// Precomputed bounds; computed from the field when absent.
  std::optional<FieldBounds> bounds;
};

struct SolveReport {
  std::string route;  // "iterative" or "direct"
  std::size_t iterations = 0;
  std::size_t max_iterations = 0;
  double final_update_norm = 0.0;
  double residual_norm = 0.0;
  /// max(C1, C1') (1 + C2).
  double operator_norm_bound = 0.0;
  bool gate_passed = false;
  bool gate_overridden = false;
  /// Largest ratio of successive update norms above the noise floor.
  double empirical_contraction_rate = 0.0;
  std::vector<double> update_norms;
  /// Coefficient mass of terms outside the table domain (k_max truncation).
  double dropped_mass = 0.0;
  std::size_t unknowns = 0;
  /// Infinite-volume solves: smallest depth d with epsilon_bound(d) <= 1e-6.
  std::optional<std::size_t> trusted_depth;
};

struct Solution {
  SupportedFunction phi;
  SolveReport report;
};

/// max_iters = 10 ceil(log tol / log bound); kOverrideMaxIterations when the
/// bound does not certify a contraction.
std::size_t predicted_max_iterations(double bound, double tol = kUpdateTolerance);

/// Iterates phi <- psi delta + psi K phi on configurations supported in the
/// window.  Throws GateError when the gate fails without override and
/// DivergenceError when the stopping rule is not met within max_iters.
Solution solve_finite_volume(const OnePointEnergyField& field, const Window& window,
                             const SolveOptions& options = {});

inline constexpr std::uint64_t kDirectUnknownLimit = std::uint64_t{1} << 14;

/// Sparse LU solve of (1 - psi K psi) phi = psi delta; at most 2^14 unknowns.
Solution solve_finite_volume_direct(const OnePointEnergyField& field, const Window& window,
                                    const SolveOptions& options = {});

/// Iterates the unprojected operator on configurations in `window` with at
/// most k_max sites; lookups outside the table read as zero.
Solution solve_infinite_volume(const OnePointEnergyField& field, const Window& window,
                               std::size_t k_max = 4, const SolveOptions& options = {});

/// Runs the iteration on a prebuilt operator.
Solution iterate(const AssembledOperator& op, const SolveOptions& options, double bound,
                 bool gate_passed);

struct OperatorNormCertificate {
  double bound = 0.0;
  std::optional<double> empirical;
};

OperatorNormCertificate operator_norm_certificate(const OnePointEnergyField& field,
                                                  const SolveReport* report = nullptr);

}  // namespace tefcorr
