#pragma once

// Lattice geometry, spin alphabets and finite-support configurations.
//
// Sites live in Z^d (d <= kMaxDimension) and are ordered lexicographically.
// Configurations store non-vacuum spins only; every site that is absent from
// a configuration carries the vacuum.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tefcorr {

inline constexpr int kMaxDimension = 4;
using Coord = std::int32_t;

class Site {
 public:
  Site() = default;
  Site(std::initializer_list<std::int64_t> coords);
  explicit Site(std::span<const std::int64_t> coords);

  /// The origin of Z^d.
  static Site origin(int dimension);

  int dimension() const noexcept { return dim_; }
  Coord operator[](int axis) const noexcept { return c_[static_cast<std::size_t>(axis)]; }

  /// Checked coordinate-wise arithmetic; overflow raises ModelError.
  Site operator+(const Site& other) const;
  Site operator-(const Site& other) const;
  Site operator-() const;

  std::string str() const;

  // Lexicographic on coordinates for sites of equal dimension.
  friend auto operator<=>(const Site&, const Site&) = default;

 private:
  std::array<Coord, kMaxDimension> c_{};
  std::uint8_t dim_ = 0;
};

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept;
};

/// Internal spin code. 0 is always the vacuum; 1..N_X are the other symbols.
using Spin = std::uint8_t;
inline constexpr Spin kVacuum = 0;

/// Finite alphabet X with a distinguished vacuum symbol.
class SpinSpace {
 public:
  SpinSpace(std::vector<std::string> labels, std::size_t vacuum_index);

  /// Labels "0", "1", ..., "q-1" with vacuum "0".
  static SpinSpace integers(int q);

  std::size_t size() const noexcept { return labels_.size(); }
  /// N_X = |X| - 1.
  int n_star() const noexcept { return static_cast<int>(labels_.size()) - 1; }
  std::size_t vacuum_index() const noexcept { return vacuum_index_; }

  const std::string& label(Spin s) const;
  Spin parse(const std::string& label) const;
  std::optional<Spin> find(const std::string& label) const;
  std::span<const std::string> labels() const noexcept { return labels_; }

  friend bool operator==(const SpinSpace&, const SpinSpace&) = default;

 private:
  std::vector<std::string> labels_;
  std::size_t vacuum_index_;
  std::vector<std::size_t> internal_to_label_;
};

/// A finite nonempty set of sites, stored in lexicographic order.
class Window {
 public:
  explicit Window(std::vector<Site> sites);

  /// Axis-aligned box with inclusive corners.
  static Window box(const Site& lo, const Site& hi);

  std::size_t size() const noexcept { return sites_.size(); }
  int dimension() const noexcept { return sites_.front().dimension(); }
  std::span<const Site> sites() const noexcept { return sites_; }
  const Site& operator[](std::size_t i) const noexcept { return sites_[i]; }

  bool contains(const Site& s) const;
  std::optional<std::size_t> index_of(const Site& s) const;
  bool contains_all(std::span<const Site> sites) const;

  std::string str() const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  std::vector<Site> sites_;
};

/// Chebyshev distance |t - s| = max_j |t_j - s_j|.
std::int64_t chebyshev_distance(const Site& t, const Site& s);

/// d(T, S) = min over pairs of Chebyshev distances; both sets nonempty.
std::int64_t set_distance(std::span<const Site> T, std::span<const Site> S);

/// d(s, window^c): distance from a site to the complement of a finite window
/// (0 when the site is outside the window).
std::int64_t distance_to_complement(const Site& s, const Window& window);

/// d(I, window^c) for a nonempty site set.
std::int64_t distance_to_complement(std::span<const Site> sites, const Window& window);

/// All sites of the closed ball {s : |s - center| <= r}, lexicographic.
std::vector<Site> ball(const Site& center, int r);

/// Window(r) = {s in window : d(s, window^c) > r}; may be empty.
std::vector<Site> interior(const Window& window, std::int64_t r);

/// A finite-support configuration with non-vacuum values.
class Configuration {
 public:
  using Entry = std::pair<Site, Spin>;

  Configuration() = default;
  explicit Configuration(std::vector<Entry> entries);

  static Configuration singleton(const Site& t, Spin x);

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  std::span<const Entry> entries() const noexcept { return entries_; }

  /// Spin at s; kVacuum when s is not in the support.
  Spin at(const Site& s) const;
  bool contains(const Site& s) const;
  std::vector<Site> support() const;

  /// Sets the spin at s; assigning the vacuum removes s from the support.
  void set(const Site& s, Spin x);
  Configuration with(const Site& s, Spin x) const;
  Configuration without(const Site& s) const;

  /// x_T: restriction to the sites accepted by the predicate.
  Configuration restricted(const std::function<bool(const Site&)>& keep) const;
  Configuration restricted(const Window& window) const;

  std::string str() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;

 private:
  std::vector<Entry> entries_;
};

struct ConfigurationHash {
  std::size_t operator()(const Configuration& c) const noexcept;
};

/// xy: union of two configurations with disjoint supports.
Configuration concat(const Configuration& x, const Configuration& y);

struct MinSplit {
  Site t;
  Spin spin;
  Configuration rest;
};

/// Splits off the lexicographically smallest site of a nonempty configuration.
MinSplit split_min(const Configuration& x);

inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1} << 24;

/// Number of configurations on a window, |X|^|window|, or nullopt on overflow.
std::optional<std::uint64_t> configuration_count(const Window& window, const SpinSpace& spins);

/// Visits configurations with support inside the window.  With star_only the
/// order is by support subset, then spins; otherwise odometer order over
/// X^window.  Both visit (1 + N_X)^|window| = |X|^|window| configurations.
void for_each_configuration(const Window& window, const SpinSpace& spins, bool star_only,
                            const std::function<void(const Configuration&)>& visit,
                            std::uint64_t budget = kDefaultEnumerationBudget);

std::vector<Configuration> enumerate_configs(const Window& window, const SpinSpace& spins,
                                             bool star_only,
                                             std::uint64_t budget = kDefaultEnumerationBudget);

}  // namespace tefcorr
