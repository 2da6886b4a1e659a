#pragma once

// The correlation operator K = gamma (S + T) and its free term delta on
// window-supported function tables.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "tefcorr/field.hpp"
#include "tefcorr/supported_function.hpp"

namespace tefcorr {

/// Which J-terms of the kernel sums are kept.  For finite-range fields a
/// radius equal to the range keeps every nonzero term.
struct KernelTruncation {
  /// Sites farther than this from t are left out of J; nullopt uses the
  /// field's dependence range.
  std::optional<int> interaction_radius;
  std::size_t j_max = std::numeric_limits<std::size_t>::max();
  /// Terms whose kernel magnitude is below the floor are dropped.
  double term_floor = 0.0;
};

/// gamma(x) = e^{Delta_t^{x'}(x_t, vac)} / sum_{a in X} e^{Delta_t^{x'}(a, vac)}.
double gamma(const OnePointEnergyField& field, const Configuration& x);

/// gamma(x) for singletons, 0 otherwise.
double delta_fn(const OnePointEnergyField& field, const Configuration& x);

/// K_{t u J}(x_t y) = prod_{s in J} (e^{Delta_s^{x_t}(y_s, vac) - Delta_s(y_s, vac)} - 1).
double kernel(const OnePointEnergyField& field, const Site& t, Spin xt, const Configuration& y);

/// (G phi)(x) = sum_J sum_{y in X_*^J} K(x_t y) (phi(x' y) - sum_{a != vac} phi(a x' y)),
/// J over nonempty subsets of the phi window outside the support of x.
double apply_G(const OnePointEnergyField& field, const SupportedFunction& phi,
               const Configuration& x, const KernelTruncation& truncation = {});

/// (K phi)(x) at one configuration, straight from the definition.
double apply_K_at(const OnePointEnergyField& field, const SupportedFunction& phi,
                  const Configuration& x, const KernelTruncation& truncation = {});

/// K phi on the domain of phi; with a projection window the result is
/// psi_window K phi.
SupportedFunction apply_K(const OnePointEnergyField& field, const SupportedFunction& phi,
                          const KernelTruncation& truncation = {},
                          const std::optional<Window>& projection = std::nullopt);

/// delta tabulated on a domain.
SupportedFunction delta_function(const OnePointEnergyField& field,
                                 std::shared_ptr<const FunctionDomain> domain);

/// K as a sparse matrix on a fixed domain: (K phi)_i = sum_j A_ij phi_j.
/// Terms that reference configurations outside the domain are dropped and
/// their absolute coefficients accumulated per row.
class AssembledOperator {
 public:
  AssembledOperator(const OnePointEnergyField& field, std::shared_ptr<const FunctionDomain> domain,
                    const KernelTruncation& truncation = {});

  const FunctionDomain& domain() const noexcept { return *domain_; }
  const std::shared_ptr<const FunctionDomain>& domain_ptr() const noexcept { return domain_; }
  std::size_t rows() const noexcept { return domain_->size(); }
  std::size_t nonzeros() const noexcept { return cols_.size(); }

  /// out = A phi; out must not alias phi.
  void apply(std::span<const double> phi, std::span<double> out) const;

  const std::vector<double>& delta() const noexcept { return delta_; }

  /// max over rows of the absolute coefficient mass that was dropped.
  double dropped_mass() const noexcept { return dropped_mass_; }

  std::span<const std::size_t> row_start() const noexcept { return row_start_; }
  std::span<const std::size_t> cols() const noexcept { return cols_; }
  std::span<const double> coefficients() const noexcept { return vals_; }

 private:
  std::shared_ptr<const FunctionDomain> domain_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
  std::vector<double> delta_;
  double dropped_mass_ = 0.0;
};

}  // namespace tefcorr
