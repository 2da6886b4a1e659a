#pragma once

// Numerical verification of the identities a transition energy field must
// satisfy, on randomized or exhaustive instance plans.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tefcorr/field.hpp"

namespace tefcorr {

inline constexpr double kIdentityTolerance = 1e-10;

struct IdentityResult {
  std::string identity;
  double max_residual = 0.0;
  std::size_t instances = 0;
  std::string witness;  // worst instance, empty when every residual is zero
};

struct ConsistencyReport {
  double tolerance = kIdentityTolerance;
  std::vector<IdentityResult> identities;

  bool passed() const;
  double max_residual() const;
  /// The identity with the largest residual (first one on ties).
  const IdentityResult& worst() const;
};

struct SamplePlan {
  std::uint64_t seed = 0;
  std::size_t instances = 10000;
  /// Enumerate every instance inside `region` instead of sampling.
  bool exhaustive = false;
  /// Region for exhaustive plans; randomized plans sample around scan sites.
  std::optional<Window> region;
};

/// Cocycle, antisymmetry and the two-site exchange identity
/// Delta_t^{zy}(x,u) + Delta_s^{zu}(y,v) = Delta_s^{zx}(y,v) + Delta_t^{zv}(x,u).
ConsistencyReport check_one_point_consistency(const OnePointEnergyField& field,
                                              const SamplePlan& plan,
                                              double tol = kIdentityTolerance);

/// Volume cocycle, antisymmetry and the split identity
/// Delta_{L u V}^z(xy, uv) = Delta_L^{zy}(x, u) + Delta_V^{zu}(y, v).
ConsistencyReport check_field_consistency(const OnePointEnergyField& field,
                                          const SamplePlan& plan,
                                          double tol = kIdentityTolerance);

/// Environment condition:
/// Delta_t^{zy}(x,vac) - Delta_t^{zv}(x,vac) = Delta_t^{y}(x,vac) - Delta_t^{v}(x,vac).
ConsistencyReport check_environment_condition(const OnePointEnergyField& field,
                                              const SamplePlan& plan,
                                              double tol = kIdentityTolerance);

/// Exhaustive environment check over every t, s, I inside a small volume.
ConsistencyReport check_environment_condition_exhaustive(const OnePointEnergyField& field,
                                                         const Window& volume,
                                                         double tol = kIdentityTolerance);

}  // namespace tefcorr
