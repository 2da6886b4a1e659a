#pragma once

// Tabulated functions on configurations supported in a window with at most
// k_max sites.  Entries outside the stored domain read as zero.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tefcorr/lattice.hpp"

namespace tefcorr {

/// Packed sorted list of (window index, spin) pairs; up to 16 sites.
struct ConfigKey {
  std::array<std::uint64_t, 4> words{};
  friend bool operator==(const ConfigKey&, const ConfigKey&) = default;
};

struct ConfigKeyHash {
  std::size_t operator()(const ConfigKey& k) const noexcept;
};

inline constexpr std::size_t kMaxKeySites = 16;
inline constexpr std::size_t kMaxKeyWindow = 4095;

/// Builds keys from (window index, spin) pairs sorted by index.
ConfigKey make_key(std::span<const std::pair<std::uint16_t, Spin>> entries);

/// The nonempty configurations on a window with at most k_max sites, ordered
/// by support size, then support, then spins.  Entries sharing a support form
/// a contiguous group.
class FunctionDomain {
 public:
  FunctionDomain(Window window, std::size_t q, std::size_t k_max);

  const Window& window() const noexcept { return window_; }
  std::size_t spin_count() const noexcept { return q_; }
  std::size_t k_max() const noexcept { return k_max_; }
  std::size_t size() const noexcept { return configs_.size(); }

  const Configuration& config(std::size_t i) const { return configs_[i]; }
  std::span<const std::pair<std::uint16_t, Spin>> entries(std::size_t i) const;

  std::optional<std::size_t> find(const Configuration& x) const;
  std::optional<std::size_t> find(const ConfigKey& key) const;

  /// Group boundaries: group g covers [group_start(g), group_start(g + 1)).
  std::size_t group_count() const noexcept { return group_start_.size() - 1; }
  std::size_t group_start(std::size_t g) const { return group_start_[g]; }
  std::size_t group_of(std::size_t i) const { return group_[i]; }

  /// True when every site of configuration i lies in `sub`.
  bool supported_in(std::size_t i, const Window& sub) const;

 private:
  Window window_;
  std::size_t q_;
  std::size_t k_max_;
  std::vector<Configuration> configs_;
  std::vector<std::pair<std::uint16_t, Spin>> flat_;
  std::vector<std::size_t> flat_start_;
  std::unordered_map<ConfigKey, std::size_t, ConfigKeyHash> index_;
  std::vector<std::size_t> group_start_;
  std::vector<std::size_t> group_;
};

/// Number of configurations FunctionDomain(window, q, k_max) would hold.
std::uint64_t domain_size(std::size_t window_size, std::size_t q, std::size_t k_max);

class SupportedFunction {
 public:
  explicit SupportedFunction(std::shared_ptr<const FunctionDomain> domain);
  SupportedFunction(std::shared_ptr<const FunctionDomain> domain, std::vector<double> values);

  const FunctionDomain& domain() const noexcept { return *domain_; }
  const std::shared_ptr<const FunctionDomain>& domain_ptr() const noexcept { return domain_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// phi(x); 0 outside the domain.
  double operator()(const Configuration& x) const;
  void set(const Configuration& x, double v);

 private:
  std::shared_ptr<const FunctionDomain> domain_;
  std::vector<double> values_;
};

/// ||phi|| = max over supports I of sum_{x in X_*^I} |phi(x)|.
double bstar_norm(const SupportedFunction& phi);
double bstar_norm(const FunctionDomain& domain, std::span<const double> values);

/// psi_sub phi: keeps entries supported in `sub`, zeroes the rest.
SupportedFunction project(const SupportedFunction& phi, const Window& sub);

}  // namespace tefcorr
