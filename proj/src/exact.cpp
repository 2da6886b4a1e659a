#include "tefcorr/exact.hpp"

#include <algorithm>
#include <cmath>

#include "tefcorr/consistency.hpp"
#include "tefcorr/errors.hpp"
#include "tefcorr/parallel.hpp"

namespace tefcorr {

namespace {

constexpr double kMaxExponent = 700.0;
constexpr std::size_t kBlock = 4096;

std::uint64_t checked_size(const Window& window, std::size_t q, std::uint64_t budget) {
  std::uint64_t size = 1;
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (size > budget / q) {
      throw ResourceError("window " + window.str() + " has too many configurations",
                          size > UINT64_MAX / q ? UINT64_MAX : size * q, budget);
    }
    size *= q;
  }
  if (size > budget) throw ResourceError("window " + window.str() + " too large", size, budget);
  return size;
}

/// In place: out[c] = sum of in[c'] over all c' that agree with c on the
/// non-vacuum digits of c.
void superset_sums(std::vector<double>& v, const WindowCodec& codec) {
  const std::size_t q = codec.base();
  for (std::size_t p = 0; p < codec.window().size(); ++p) {
    const std::uint64_t pw = codec.power(p);
    const std::uint64_t span = pw * q;
    const std::uint64_t groups = codec.size() / span;
    parallel_for(groups * pw, [&](std::size_t k) {
      const std::uint64_t hi = k / pw, lo = k % pw;
      const std::uint64_t base = hi * span + lo;
      double s = v[base];
      for (std::size_t a = 1; a < q; ++a) s += v[base + a * pw];
      v[base] = s;
    }, kBlock);
  }
}

double ordered_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

void require_finite_range(const OnePointEnergyField& field) {
  if (!field.dependence_range()) throw ModelError("exact enumeration needs a finite-range field");
}

}  // namespace

// ---------------------------------------------------------------------------
// WindowCodec

WindowCodec::WindowCodec(Window window, std::size_t q) : window_(std::move(window)), q_(q) {
  if (q < 2) throw DomainError("spin space needs at least two symbols");
  size_ = checked_size(window_, q_, UINT64_MAX / q_);
  powers_.resize(window_.size());
  std::uint64_t p = 1;
  for (std::size_t i = 0; i < window_.size(); ++i, p *= q_) powers_[i] = p;
}

std::optional<std::uint64_t> WindowCodec::encode(const Configuration& x) const {
  std::uint64_t code = 0;
  for (const auto& [s, spin] : x.entries()) {
    const auto idx = window_.index_of(s);
    if (!idx) return std::nullopt;
    code += spin * powers_[*idx];
  }
  return code;
}

Configuration WindowCodec::decode(std::uint64_t code) const {
  std::vector<Configuration::Entry> entries;
  for (std::size_t i = 0; i < window_.size(); ++i) {
    const Spin d = digit(code, i);
    if (d != kVacuum) entries.emplace_back(window_[i], d);
  }
  return Configuration(std::move(entries));
}

// ---------------------------------------------------------------------------
// Energies

std::vector<double> volume_energies(const OnePointEnergyField& field, const WindowCodec& codec,
                                    const Configuration& reference) {
  require_finite_range(field);
  const auto ref_code = codec.encode(reference);
  if (!ref_code) throw DomainError("reference configuration leaves the window");
  const std::size_t n = codec.window().size();
  std::vector<Spin> ref(n);
  for (std::size_t i = 0; i < n; ++i) ref[i] = codec.digit(*ref_code, i);
  Configuration ref_head;
  for (std::size_t i = 0; i + 1 < n; ++i) ref_head.set(codec.window()[i], ref[i]);

  std::vector<double> energies(codec.size());
  parallel_chunks(codec.size(), kBlock, [&](std::size_t, std::size_t b, std::size_t e) {
    std::vector<Spin> x(n);
    for (std::size_t code = b; code < e; ++code) {
      for (std::size_t i = 0; i < n; ++i) x[i] = codec.digit(code, i);
      // Step k sees the reference on sites before k and x on sites after k.
      Configuration current = ref_head;
      double total = 0.0;
      for (std::size_t k = n; k-- > 0;) {
        const Site& t = codec.window()[k];
        total += field.eval(t, current, x[k], ref[k]);
        current.set(t, x[k]);
        if (k > 0) current.set(codec.window()[k - 1], kVacuum);
      }
      if (!(std::abs(total) <= kMaxExponent)) {
        throw ModelError("volume energy " + std::to_string(total) + " at " +
                         codec.decode(code).str() + " exceeds the exponent range");
      }
      energies[code] = total;
    }
  });
  return energies;
}

namespace {

std::vector<double> boltzmann_weights(const std::vector<double>& energies) {
  std::vector<double> w(energies.size());
  parallel_for(energies.size(), [&](std::size_t i) { w[i] = std::exp(energies[i]); }, kBlock);
  return w;
}

}  // namespace

double partition_function(const OnePointEnergyField& field, const Window& window,
                          std::uint64_t budget) {
  const std::size_t q = field.spins().size();
  checked_size(window, q, budget);
  const WindowCodec codec(window, q);
  return ordered_sum(boltzmann_weights(volume_energies(field, codec, {})));
}

double GibbsTable::probability(const Configuration& x) const {
  const auto code = codec.encode(x);
  if (!code) throw DomainError("configuration leaves the Gibbs window");
  return probabilities[*code];
}

double GibbsTable::total() const { return ordered_sum(probabilities); }

GibbsTable gibbs_distribution(const OnePointEnergyField& field, const Window& window,
                              const Configuration& reference, std::uint64_t budget) {
  const std::size_t q = field.spins().size();
  checked_size(window, q, budget);
  WindowCodec codec(window, q);
  auto w = boltzmann_weights(volume_energies(field, codec, reference));
  const double z = ordered_sum(w);
  parallel_for(w.size(), [&](std::size_t i) { w[i] /= z; }, kBlock);
  return GibbsTable{std::move(codec), std::move(w)};
}

// ---------------------------------------------------------------------------
// Correlation tables

CorrelationTable::CorrelationTable(WindowCodec codec, std::vector<double> values,
                                   double partition, double route_gap)
    : codec_(std::move(codec)),
      values_(std::move(values)),
      partition_(partition),
      route_gap_(route_gap) {}

double CorrelationTable::operator()(const Configuration& x) const {
  const auto code = codec_.encode(x);
  return code ? values_[*code] : 0.0;
}

CorrelationTable rho_exact(const OnePointEnergyField& field, const Window& window,
                           std::uint64_t budget) {
  const std::size_t q = field.spins().size();
  checked_size(window, q, budget);
  WindowCodec codec(window, q);

  // Route 1: Z^{-1} sum_y exp Delta(xy, vac).
  auto weights = boltzmann_weights(volume_energies(field, codec, {}));
  const double z = ordered_sum(weights);
  superset_sums(weights, codec);
  parallel_for(weights.size(), [&](std::size_t i) { weights[i] /= z; }, kBlock);

  // Route 2: marginals of the Gibbs table taken against the all-top reference.
  Configuration top;
  for (const auto& s : window.sites()) top.set(s, static_cast<Spin>(q - 1));
  auto gibbs = gibbs_distribution(field, window, top, budget);
  superset_sums(gibbs.probabilities, codec);

  double gap = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    gap = std::max(gap, std::abs(weights[i] - gibbs.probabilities[i]));
  }
  return CorrelationTable(std::move(codec), std::move(weights), z, gap);
}

std::vector<double> rho_exact_probes(const OnePointEnergyField& field, const Window& window,
                                     const std::vector<Configuration>& probes,
                                     std::uint64_t budget) {
  const std::size_t q = field.spins().size();
  checked_size(window, q, budget);
  const WindowCodec codec(window, q);
  struct Pattern {
    std::vector<std::pair<std::size_t, Spin>> digits;
  };
  std::vector<Pattern> patterns;
  for (const auto& p : probes) {
    Pattern pat;
    for (const auto& [s, spin] : p.entries()) {
      const auto idx = window.index_of(s);
      if (!idx) throw DomainError("probe " + p.str() + " leaves window " + window.str());
      pat.digits.emplace_back(*idx, spin);
    }
    patterns.push_back(std::move(pat));
  }
  const auto weights = boltzmann_weights(volume_energies(field, codec, {}));
  const std::size_t chunks = (weights.size() + kBlock - 1) / kBlock;
  std::vector<double> partial_z(chunks);
  std::vector<std::vector<double>> partial(patterns.size(), std::vector<double>(chunks));
  parallel_chunks(weights.size(), kBlock, [&](std::size_t c, std::size_t b, std::size_t e) {
    partial_z[c] = pairwise_sum(weights.data() + b, e - b);
    std::vector<double> hit;
    for (std::size_t k = 0; k < patterns.size(); ++k) {
      hit.clear();
      for (std::size_t code = b; code < e; ++code) {
        bool match = true;
        for (const auto& [idx, spin] : patterns[k].digits) {
          if (codec.digit(code, idx) != spin) {
            match = false;
            break;
          }
        }
        if (match) hit.push_back(weights[code]);
      }
      partial[k][c] = pairwise_sum(hit.data(), hit.size());
    }
  });
  const double z = ordered_sum(partial_z);
  std::vector<double> out;
  for (const auto& p : partial) out.push_back(ordered_sum(p) / z);
  return out;
}

// ---------------------------------------------------------------------------
// Correlation equation

namespace {

/// Kernel factors e^{Delta_s^{t->a}(y, vac) - Delta_s(y, vac)} - 1 for all
/// window sites t, s and spins a, y.
class KernelFactors {
 public:
  KernelFactors(const OnePointEnergyField& field, const WindowCodec& codec)
      : n_(codec.window().size()), q_(codec.base()), table_(n_ * n_ * q_ * q_, 0.0),
        active_(n_ * n_ * q_, 0) {
    const auto& w = codec.window();
    const Configuration empty;
    for (std::size_t t = 0; t < n_; ++t) {
      for (std::size_t s = 0; s < n_; ++s) {
        if (s == t) continue;
        for (Spin a = 1; a < q_; ++a) {
          const auto boundary = Configuration::singleton(w[t], a);
          for (Spin y = 1; y < q_; ++y) {
            const double k = std::expm1(field.eval(w[s], boundary, y, kVacuum) -
                                        field.eval(w[s], empty, y, kVacuum));
            table_[index(t, s, a, y)] = k;
            if (k != 0.0) active_[(t * n_ + s) * q_ + a] = 1;
          }
        }
      }
    }
  }

  double operator()(std::size_t t, std::size_t s, Spin a, Spin y) const {
    return table_[index(t, s, a, y)];
  }
  bool active(std::size_t t, std::size_t s, Spin a) const {
    return active_[(t * n_ + s) * q_ + a] != 0;
  }

 private:
  std::size_t index(std::size_t t, std::size_t s, Spin a, Spin y) const {
    return ((t * n_ + s) * q_ + a) * q_ + y;
  }

  std::size_t n_, q_;
  std::vector<double> table_;
  std::vector<char> active_;
};

/// G(a u) with a at window index t and u given by code (digit t vacuum).
double g_value(const CorrelationTable& table, const KernelFactors& kf, std::size_t t, Spin a,
               std::uint64_t u_code) {
  if (a == kVacuum) return 0.0;
  const auto& codec = table.codec();
  const std::size_t n = codec.window().size();
  const std::size_t q = codec.base();
  std::vector<std::size_t> free;
  for (std::size_t s = 0; s < n; ++s) {
    if (s != t && codec.digit(u_code, s) == kVacuum && kf.active(t, s, a)) free.push_back(s);
  }
  // Odometer over y in X^free; digit 0 means "not in J".
  std::vector<Spin> y(free.size(), 0);
  double total = 0.0;
  const std::uint64_t tp = codec.power(t);
  while (true) {
    std::size_t k = 0;
    while (k < y.size() && ++y[k] == q) y[k++] = 0;
    if (k == y.size()) break;
    double K = 1.0;
    std::uint64_t yc = 0;
    for (std::size_t j = 0; j < free.size(); ++j) {
      if (y[j] == kVacuum) continue;
      K *= kf(t, free[j], a, y[j]);
      yc += y[j] * codec.power(free[j]);
    }
    if (K == 0.0) continue;
    double bracket = table.by_code(u_code + yc);
    for (Spin b = 1; b < q; ++b) bracket -= table.by_code(u_code + yc + b * tp);
    total += K * bracket;
  }
  return total;
}

void require_environment(const OnePointEnergyField& field) {
  SamplePlan plan;
  plan.instances = 2000;
  const auto report = check_environment_condition(field, plan);
  if (!report.passed()) {
    throw PreconditionError("environment condition fails: " + report.worst().witness);
  }
}

}  // namespace

double finite_volume_G(const OnePointEnergyField& field, const CorrelationTable& table,
                       const Configuration& x) {
  if (x.empty()) throw DomainError("G needs a nonempty configuration");
  const auto code = table.codec().encode(x);
  if (!code) throw DomainError("configuration " + x.str() + " leaves the table window");
  const KernelFactors kf(field, table.codec());
  const auto split = split_min(x);
  const std::size_t t = *table.window().index_of(split.t);
  return g_value(table, kf, t, split.spin, *code - split.spin * table.codec().power(t));
}

CorrelationCheck verify_correlation_equation(const OnePointEnergyField& field,
                                             const CorrelationTable& table, double tol) {
  require_environment(field);
  const auto& codec = table.codec();
  const std::size_t q = codec.base();
  const KernelFactors kf(field, codec);
  std::vector<double> residual(table.size(), 0.0);
  parallel_for(table.size() - 1, [&](std::size_t i) {
    const std::uint64_t code = i + 1;
    std::size_t t = 0;
    while (codec.digit(code, t) == kVacuum) ++t;
    const Spin xt = codec.digit(code, t);
    const std::uint64_t u_code = code - xt * codec.power(t);
    const Configuration u = codec.decode(u_code);
    const Site& site = codec.window()[t];
    std::vector<double> w(q), g(q);
    double norm = 0.0;
    for (Spin a = 0; a < q; ++a) {
      w[a] = std::exp(field.eval(site, u, a, kVacuum));
      norm += w[a];
      g[a] = g_value(table, kf, t, a, u_code);
    }
    double bracket = table.by_code(u_code);
    for (Spin a = 0; a < q; ++a) bracket += w[a] * (g[xt] - g[a]);
    residual[code] = std::abs(table.by_code(code) - w[xt] / norm * bracket);
  }, 64);
  CorrelationCheck out;
  out.tolerance = tol;
  out.checked = table.size() - 1;
  std::uint64_t arg = 0;
  for (std::uint64_t c = 1; c < table.size(); ++c) {
    if (std::isnan(residual[c]) || residual[c] > out.max_residual) {
      out.max_residual = std::isnan(residual[c]) ? INFINITY : residual[c];
      arg = c;
    }
  }
  if (arg != 0) out.worst = codec.decode(arg);
  return out;
}

}  // namespace tefcorr
