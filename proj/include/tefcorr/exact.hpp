#pragma once

// Exact finite-volume Gibbs distributions and correlation functions by full
// enumeration of X^window.

#include <cstdint>
#include <optional>
#include <vector>

#include "tefcorr/field.hpp"

namespace tefcorr {

/// Dense indexing of X^window: site i of the window is digit i in base |X|.
class WindowCodec {
 public:
  WindowCodec(Window window, std::size_t q);

  const Window& window() const noexcept { return window_; }
  std::size_t base() const noexcept { return q_; }
  std::uint64_t size() const noexcept { return size_; }
  std::uint64_t power(std::size_t site_index) const { return powers_[site_index]; }

  /// nullopt when the configuration leaves the window.
  std::optional<std::uint64_t> encode(const Configuration& x) const;
  Configuration decode(std::uint64_t code) const;
  Spin digit(std::uint64_t code, std::size_t site_index) const {
    return static_cast<Spin>((code / powers_[site_index]) % q_);
  }

 private:
  Window window_;
  std::size_t q_;
  std::uint64_t size_;
  std::vector<std::uint64_t> powers_;
};

/// Delta_window(x, ref) for every x in X^window, indexed by WindowCodec code.
/// Built from single-site energies; |values| > 700 raises ModelError.
std::vector<double> volume_energies(const OnePointEnergyField& field, const WindowCodec& codec,
                                    const Configuration& reference);

double partition_function(const OnePointEnergyField& field, const Window& window,
                          std::uint64_t budget = kDefaultEnumerationBudget);

struct GibbsTable {
  WindowCodec codec;
  std::vector<double> probabilities;  // by code

  double probability(const Configuration& x) const;
  double total() const;
};

/// P(x) = e^{Delta(x, ref)} / sum_z e^{Delta(z, ref)}; the default reference
/// is the all-vacuum configuration.
GibbsTable gibbs_distribution(const OnePointEnergyField& field, const Window& window,
                              const Configuration& reference = {},
                              std::uint64_t budget = kDefaultEnumerationBudget);

/// rho_window(x) for every configuration supported in the window.
class CorrelationTable {
 public:
  CorrelationTable(WindowCodec codec, std::vector<double> values, double partition,
                   double route_gap);

  const Window& window() const noexcept { return codec_.window(); }
  const WindowCodec& codec() const noexcept { return codec_; }
  /// rho(x); 0 when the support of x is not contained in the window.
  double operator()(const Configuration& x) const;
  /// rho of the configuration whose non-vacuum digits are those of `code`.
  double by_code(std::uint64_t code) const { return values_[code]; }
  std::uint64_t size() const noexcept { return values_.size(); }

  double partition() const noexcept { return partition_; }
  /// Max difference between the partition-function route and the
  /// Gibbs-marginal route.
  double route_gap() const noexcept { return route_gap_; }

 private:
  WindowCodec codec_;
  std::vector<double> values_;
  double partition_;
  double route_gap_;
};

/// Computes rho by normalising summed weights and, independently, by
/// marginalising a Gibbs table built against a non-vacuum reference.
CorrelationTable rho_exact(const OnePointEnergyField& field, const Window& window,
                           std::uint64_t budget = kDefaultEnumerationBudget);

/// rho on the probes only, for windows too large to tabulate every marginal.
std::vector<double> rho_exact_probes(const OnePointEnergyField& field, const Window& window,
                                     const std::vector<Configuration>& probes,
                                     std::uint64_t budget = std::uint64_t{1} << 26);

inline constexpr double kCorrelationTolerance = 1e-9;

struct CorrelationCheck {
  double max_residual = 0.0;
  Configuration worst;
  std::uint64_t checked = 0;
  double tolerance = kCorrelationTolerance;
  bool passed() const { return max_residual <= tolerance; }
};

/// G_window(x) = sum_{nonempty J in window \ I} sum_{y in X_*^J} K(x_t y)
///   (rho(x' y) - sum_{a != vac} rho(a x' y)),  t = min support site of x.
double finite_volume_G(const OnePointEnergyField& field, const CorrelationTable& table,
                       const Configuration& x);

/// Checks rho(x) = gamma(x) [rho(x') + sum_{a in X} w_a (G(x) - G(a x'))] for
/// every nonempty x supported in the window.  The environment condition is
/// checked first; a violation raises PreconditionError.
CorrelationCheck verify_correlation_equation(const OnePointEnergyField& field,
                                             const CorrelationTable& table,
                                             double tol = kCorrelationTolerance);

}  // namespace tefcorr
