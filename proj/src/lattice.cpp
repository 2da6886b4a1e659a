#include "tefcorr/lattice.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "tefcorr/errors.hpp"

namespace tefcorr {

namespace {

Coord checked_coord(std::int64_t v) {
  if (v < std::numeric_limits<Coord>::min() || v > std::numeric_limits<Coord>::max()) {
    throw ModelError("site coordinate " + std::to_string(v) + " out of range");
  }
  return static_cast<Coord>(v);
}

void require_same_dimension(const Site& a, const Site& b) {
  if (a.dimension() != b.dimension()) {
    throw ModelError("dimension mismatch: " + a.str() + " vs " + b.str());
  }
}

std::uint64_t mix64(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Site

Site::Site(std::initializer_list<std::int64_t> coords)
    : Site(std::span<const std::int64_t>(coords.begin(), coords.size())) {}

Site::Site(std::span<const std::int64_t> coords) {
  if (coords.empty() || coords.size() > static_cast<std::size_t>(kMaxDimension)) {
    throw ModelError("site dimension must be in 1.." + std::to_string(kMaxDimension));
  }
  dim_ = static_cast<std::uint8_t>(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) c_[i] = checked_coord(coords[i]);
}

Site Site::origin(int dimension) {
  if (dimension < 1 || dimension > kMaxDimension) {
    throw ModelError("site dimension must be in 1.." + std::to_string(kMaxDimension));
  }
  Site s;
  s.dim_ = static_cast<std::uint8_t>(dimension);
  return s;
}

Site Site::operator+(const Site& other) const {
  require_same_dimension(*this, other);
  Site r = *this;
  for (int i = 0; i < dim_; ++i) {
    r.c_[i] = checked_coord(std::int64_t{c_[i]} + other.c_[i]);
  }
  return r;
}

Site Site::operator-(const Site& other) const {
  require_same_dimension(*this, other);
  Site r = *this;
  for (int i = 0; i < dim_; ++i) {
    r.c_[i] = checked_coord(std::int64_t{c_[i]} - other.c_[i]);
  }
  return r;
}

Site Site::operator-() const {
  Site r = *this;
  for (int i = 0; i < dim_; ++i) r.c_[i] = checked_coord(-std::int64_t{c_[i]});
  return r;
}

std::string Site::str() const {
  std::string out = "(";
  for (int i = 0; i < dim_; ++i) {
    if (i) out += ',';
    out += std::to_string(c_[i]);
  }
  return out + ")";
}

std::size_t SiteHash::operator()(const Site& s) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(s.dimension());
  for (int i = 0; i < s.dimension(); ++i) {
    h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s[i])) + 0x9e3779b97f4a7c15ULL));
  }
  return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// SpinSpace

SpinSpace::SpinSpace(std::vector<std::string> labels, std::size_t vacuum_index)
    : labels_(std::move(labels)), vacuum_index_(vacuum_index) {
  if (labels_.size() < 2) throw ModelError("spin space needs at least two symbols");
  if (labels_.size() > 255) throw ModelError("spin space limited to 255 symbols");
  if (vacuum_index_ >= labels_.size()) throw ModelError("vacuum index out of range");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw ModelError("empty spin label");
    for (std::size_t j = 0; j < i; ++j) {
      if (labels_[i] == labels_[j]) throw ModelError("duplicate spin label '" + labels_[i] + "'");
    }
  }
  internal_to_label_.push_back(vacuum_index_);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i != vacuum_index_) internal_to_label_.push_back(i);
  }
}

SpinSpace SpinSpace::integers(int q) {
  std::vector<std::string> labels;
  for (int i = 0; i < q; ++i) labels.push_back(std::to_string(i));
  return SpinSpace(std::move(labels), 0);
}

const std::string& SpinSpace::label(Spin s) const {
  if (s >= internal_to_label_.size()) throw DomainError("spin code out of range");
  return labels_[internal_to_label_[s]];
}

std::optional<Spin> SpinSpace::find(const std::string& label) const {
  for (std::size_t k = 0; k < internal_to_label_.size(); ++k) {
    if (labels_[internal_to_label_[k]] == label) return static_cast<Spin>(k);
  }
  return std::nullopt;
}

Spin SpinSpace::parse(const std::string& label) const {
  if (auto s = find(label)) return *s;
  throw ModelError("unknown spin label '" + label + "'");
}

// ---------------------------------------------------------------------------
// Window

Window::Window(std::vector<Site> sites) : sites_(std::move(sites)) {
  if (sites_.empty()) throw DomainError("window must be nonempty");
  const int d = sites_.front().dimension();
  for (const auto& s : sites_) {
    if (s.dimension() != d) throw ModelError("window sites have mixed dimensions");
  }
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

Window Window::box(const Site& lo, const Site& hi) {
  require_same_dimension(lo, hi);
  const int d = lo.dimension();
  for (int i = 0; i < d; ++i) {
    if (lo[i] > hi[i]) throw DomainError("box corner " + lo.str() + " exceeds " + hi.str());
  }
  std::vector<Site> sites;
  std::vector<std::int64_t> cur(lo.dimension());
  for (int i = 0; i < d; ++i) cur[i] = lo[i];
  while (true) {
    sites.emplace_back(std::span<const std::int64_t>(cur));
    int axis = d - 1;
    while (axis >= 0 && cur[axis] == hi[axis]) {
      cur[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
    ++cur[axis];
  }
  return Window(std::move(sites));
}

bool Window::contains(const Site& s) const {
  return std::binary_search(sites_.begin(), sites_.end(), s);
}

std::optional<std::size_t> Window::index_of(const Site& s) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it == sites_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - sites_.begin());
}

bool Window::contains_all(std::span<const Site> sites) const {
  return std::all_of(sites.begin(), sites.end(), [&](const Site& s) { return contains(s); });
}

std::string Window::str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    if (i) out += ' ';
    out += sites_[i].str();
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Distances

std::int64_t chebyshev_distance(const Site& t, const Site& s) {
  require_same_dimension(t, s);
  std::int64_t best = 0;
  for (int i = 0; i < t.dimension(); ++i) {
    const std::int64_t diff = std::int64_t{t[i]} - s[i];
    best = std::max(best, diff < 0 ? -diff : diff);
  }
  return best;
}

std::int64_t set_distance(std::span<const Site> T, std::span<const Site> S) {
  if (T.empty() || S.empty()) throw DomainError("set_distance needs nonempty sets");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& t : T) {
    for (const auto& s : S) best = std::min(best, chebyshev_distance(t, s));
  }
  return best;
}

std::int64_t distance_to_complement(const Site& s, const Window& window) {
  if (s.dimension() != window.dimension()) throw ModelError("dimension mismatch");
  if (!window.contains(s)) return 0;
  // The nearest outside site lies on the first shell that leaves the window.
  for (int r = 1;; ++r) {
    for (const auto& u : ball(s, r)) {
      if (chebyshev_distance(u, s) == r && !window.contains(u)) return r;
    }
  }
}

std::int64_t distance_to_complement(std::span<const Site> sites, const Window& window) {
  if (sites.empty()) throw DomainError("distance_to_complement needs a nonempty set");
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& s : sites) best = std::min(best, distance_to_complement(s, window));
  return best;
}

std::vector<Site> ball(const Site& center, int r) {
  if (r < 0) throw DomainError("negative ball radius");
  const int d = center.dimension();
  std::vector<std::int64_t> lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = std::int64_t{center[i]} - r;
    hi[i] = std::int64_t{center[i]} + r;
  }
  const Window box = Window::box(Site(std::span<const std::int64_t>(lo)),
                                 Site(std::span<const std::int64_t>(hi)));
  return {box.sites().begin(), box.sites().end()};
}

std::vector<Site> interior(const Window& window, std::int64_t r) {
  if (r < 0) throw DomainError("negative interior depth");
  std::vector<Site> out;
  for (const auto& s : window.sites()) {
    if (distance_to_complement(s, window) > r) out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

Configuration::Configuration(std::vector<Entry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].second == kVacuum) {
      throw DomainError("configuration stores a vacuum value at " + entries_[i].first.str());
    }
    if (i > 0) {
      if (entries_[i].first == entries_[i - 1].first) {
        throw DomainError("configuration has a repeated site " + entries_[i].first.str());
      }
      if (entries_[i].first.dimension() != entries_[0].first.dimension()) {
        throw ModelError("configuration sites have mixed dimensions");
      }
    }
  }
}

Configuration Configuration::singleton(const Site& t, Spin x) {
  return Configuration({{t, x}});
}

Spin Configuration::at(const Site& s) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, const Site& key) { return e.first < key; });
  if (it == entries_.end() || it->first != s) return kVacuum;
  return it->second;
}

bool Configuration::contains(const Site& s) const { return at(s) != kVacuum; }

std::vector<Site> Configuration::support() const {
  std::vector<Site> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

void Configuration::set(const Site& s, Spin x) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, const Site& key) { return e.first < key; });
  const bool present = it != entries_.end() && it->first == s;
  if (x == kVacuum) {
    if (present) entries_.erase(it);
    return;
  }
  if (present) {
    it->second = x;
  } else {
    if (!entries_.empty() && entries_.front().first.dimension() != s.dimension()) {
      throw ModelError("configuration sites have mixed dimensions");
    }
    entries_.insert(it, {s, x});
  }
}

Configuration Configuration::with(const Site& s, Spin x) const {
  Configuration c = *this;
  c.set(s, x);
  return c;
}

Configuration Configuration::without(const Site& s) const { return with(s, kVacuum); }

Configuration Configuration::restricted(const std::function<bool(const Site&)>& keep) const {
  Configuration c;
  for (const auto& e : entries_) {
    if (keep(e.first)) c.entries_.push_back(e);
  }
  return c;
}

Configuration Configuration::restricted(const Window& window) const {
  return restricted([&](const Site& s) { return window.contains(s); });
}

std::string Configuration::str() const {
  if (entries_.empty()) return "{}";
  std::string out = "{";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out += ' ';
    out += entries_[i].first.str() + "=" + std::to_string(entries_[i].second);
  }
  return out + "}";
}

std::size_t ConfigurationHash::operator()(const Configuration& c) const noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  SiteHash sh;
  for (const auto& [s, x] : c.entries()) {
    h = mix64(h ^ sh(s));
    h = mix64(h ^ x);
  }
  return static_cast<std::size_t>(h);
}

Configuration concat(const Configuration& x, const Configuration& y) {
  std::vector<Configuration::Entry> merged;
  merged.reserve(x.size() + y.size());
  auto a = x.entries();
  auto b = y.entries();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      merged.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      merged.push_back(b[j++]);
    } else {
      throw DomainError("concat: supports overlap at " + a[i].first.str());
    }
  }
  return Configuration(std::move(merged));
}

MinSplit split_min(const Configuration& x) {
  if (x.empty()) throw DomainError("split_min of the empty configuration");
  const auto& first = x.entries().front();
  return MinSplit{first.first, first.second, x.without(first.first)};
}

// ---------------------------------------------------------------------------
// Enumeration

std::optional<std::uint64_t> configuration_count(const Window& window, const SpinSpace& spins) {
  std::uint64_t count = 1;
  const std::uint64_t q = spins.size();
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / q) return std::nullopt;
    count *= q;
  }
  return count;
}

void for_each_configuration(const Window& window, const SpinSpace& spins, bool star_only,
                            const std::function<void(const Configuration&)>& visit,
                            std::uint64_t budget) {
  const auto count = configuration_count(window, spins);
  if (!count || *count > budget) {
    throw ResourceError("configuration enumeration on " + std::to_string(window.size()) +
                            " sites exceeds budget",
                        count.value_or(std::numeric_limits<std::uint64_t>::max()), budget);
  }
  const std::size_t n = window.size();
  const int nx = spins.n_star();
  if (star_only) {
    // Supports in order of increasing bitmask, spins in odometer order.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask >> i & 1) idx.push_back(i);
      }
      std::vector<Spin> digit(idx.size(), 1);
      while (true) {
        std::vector<Configuration::Entry> entries;
        entries.reserve(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) entries.emplace_back(window[idx[k]], digit[k]);
        visit(Configuration(std::move(entries)));
        std::size_t k = 0;
        while (k < digit.size() && digit[k] == nx) digit[k++] = 1;
        if (k == digit.size()) break;
        ++digit[k];
      }
    }
    return;
  }
  std::vector<Spin> digit(n, kVacuum);
  const Spin top = static_cast<Spin>(spins.size() - 1);
  while (true) {
    std::vector<Configuration::Entry> entries;
    for (std::size_t i = 0; i < n; ++i) {
      if (digit[i] != kVacuum) entries.emplace_back(window[i], digit[i]);
    }
    visit(Configuration(std::move(entries)));
    std::size_t k = 0;
    while (k < n && digit[k] == top) digit[k++] = kVacuum;
    if (k == n) break;
    ++digit[k];
  }
}

std::vector<Configuration> enumerate_configs(const Window& window, const SpinSpace& spins,
                                             bool star_only, std::uint64_t budget) {
  std::vector<Configuration> out;
  for_each_configuration(
      window, spins, star_only, [&](const Configuration& c) { out.push_back(c); }, budget);
  return out;
}

}  // namespace tefcorr
