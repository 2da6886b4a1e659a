#include "tefcorr/supported_function.hpp"

#include <algorithm>
#include <cmath>

#include "tefcorr/errors.hpp"

namespace tefcorr {

std::size_t ConfigKeyHash::operator()(const ConfigKey& k) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto w : k.words) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 31));
}

ConfigKey make_key(std::span<const std::pair<std::uint16_t, Spin>> entries) {
  if (entries.size() > kMaxKeySites) throw DomainError("configuration too large for a key");
  ConfigKey key;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    // 12 bits of site index plus 4 bits of spin; a zero slot ends the list.
    const std::uint64_t packed =
        (std::uint64_t{entries[i].first} + 1) << 4 | std::uint64_t{entries[i].second};
    key.words[i / 4] |= packed << (16 * (i % 4));
  }
  return key;
}

std::uint64_t domain_size(std::size_t window_size, std::size_t q, std::size_t k_max) {
  // sum_{k=1}^{k_max} C(n, k) (q-1)^k
  long double total = 0, binom = 1, power = 1;
  for (std::size_t k = 1; k <= std::min(k_max, window_size); ++k) {
    binom = binom * static_cast<long double>(window_size - k + 1) / static_cast<long double>(k);
    power *= static_cast<long double>(q - 1);
    total += binom * power;
  }
  return total > 1.8e19L ? UINT64_MAX : static_cast<std::uint64_t>(std::llround(total));
}

FunctionDomain::FunctionDomain(Window window, std::size_t q, std::size_t k_max)
    : window_(std::move(window)), q_(q), k_max_(std::min(k_max, window_.size())) {
  if (q < 2 || q > 16) throw DomainError("spin count must be in 2..16");
  if (window_.size() > kMaxKeyWindow) throw DomainError("window too large for a function table");
  if (k_max_ < 1) throw DomainError("k_max must be positive");
  if (k_max_ > kMaxKeySites) throw DomainError("k_max exceeds " + std::to_string(kMaxKeySites));
  const std::uint64_t total = domain_size(window_.size(), q_, k_max_);
  if (total > (std::uint64_t{1} << 26)) {
    throw ResourceError("function table on " + window_.str() + " too large", total,
                        std::uint64_t{1} << 26);
  }
  const std::size_t n = window_.size();
  configs_.reserve(total);
  group_start_.push_back(0);
  std::vector<std::uint16_t> support;
  std::vector<std::pair<std::uint16_t, Spin>> entries;
  for (std::size_t k = 1; k <= k_max_; ++k) {
    // Supports of size k in lexicographic order of index tuples.
    support.resize(k);
    for (std::size_t i = 0; i < k; ++i) support[i] = static_cast<std::uint16_t>(i);
    while (true) {
      std::vector<Spin> spins(k, 1);
      while (true) {
        entries.clear();
        std::vector<Configuration::Entry> ce;
        for (std::size_t i = 0; i < k; ++i) {
          entries.emplace_back(support[i], spins[i]);
          ce.emplace_back(window_[support[i]], spins[i]);
        }
        flat_start_.push_back(flat_.size());
        flat_.insert(flat_.end(), entries.begin(), entries.end());
        index_.emplace(make_key(entries), configs_.size());
        configs_.emplace_back(std::move(ce));
        group_.push_back(group_start_.size() - 1);
        std::size_t j = k;
        while (j-- > 0) {
          if (++spins[j] < q_) break;
          spins[j] = 1;
        }
        if (j == static_cast<std::size_t>(-1)) break;
      }
      group_start_.push_back(configs_.size());
      std::size_t i = k;
      while (i-- > 0) {
        if (support[i] < n - k + i) break;
      }
      if (i == static_cast<std::size_t>(-1)) break;
      ++support[i];
      for (std::size_t j = i + 1; j < k; ++j) support[j] = static_cast<std::uint16_t>(support[j - 1] + 1);
    }
  }
  flat_start_.push_back(flat_.size());
}

std::span<const std::pair<std::uint16_t, Spin>> FunctionDomain::entries(std::size_t i) const {
  return {flat_.data() + flat_start_[i], flat_start_[i + 1] - flat_start_[i]};
}

std::optional<std::size_t> FunctionDomain::find(const ConfigKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FunctionDomain::find(const Configuration& x) const {
  if (x.empty() || x.size() > k_max_) return std::nullopt;
  std::vector<std::pair<std::uint16_t, Spin>> entries;
  for (const auto& [s, spin] : x.entries()) {
    const auto idx = window_.index_of(s);
    if (!idx || spin >= q_) return std::nullopt;
    entries.emplace_back(static_cast<std::uint16_t>(*idx), spin);
  }
  return find(make_key(entries));
}

bool FunctionDomain::supported_in(std::size_t i, const Window& sub) const {
  for (const auto& [idx, spin] : entries(i)) {
    if (!sub.contains(window_[idx])) return false;
  }
  return true;
}

SupportedFunction::SupportedFunction(std::shared_ptr<const FunctionDomain> domain)
    : domain_(std::move(domain)), values_(domain_->size(), 0.0) {}

SupportedFunction::SupportedFunction(std::shared_ptr<const FunctionDomain> domain,
                                     std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_->size()) throw DomainError("value count does not match domain");
}

double SupportedFunction::operator()(const Configuration& x) const {
  const auto i = domain_->find(x);
  return i ? values_[*i] : 0.0;
}

void SupportedFunction::set(const Configuration& x, double v) {
  const auto i = domain_->find(x);
  if (!i) throw DomainError("configuration " + x.str() + " outside the function domain");
  values_[*i] = v;
}

double bstar_norm(const FunctionDomain& domain, std::span<const double> values) {
  double best = 0.0;
  for (std::size_t g = 0; g < domain.group_count(); ++g) {
    double sum = 0.0;
    for (std::size_t i = domain.group_start(g); i < domain.group_start(g + 1); ++i) {
      sum += std::abs(values[i]);
    }
    best = std::max(best, sum);
  }
  return best;
}

double bstar_norm(const SupportedFunction& phi) { return bstar_norm(phi.domain(), phi.values()); }

SupportedFunction project(const SupportedFunction& phi, const Window& sub) {
  SupportedFunction out(phi.domain_ptr());
  for (std::size_t i = 0; i < phi.domain().size(); ++i) {
    if (phi.domain().supported_in(i, sub)) out.values()[i] = phi.values()[i];
  }
  return out;
}

}  // namespace tefcorr
