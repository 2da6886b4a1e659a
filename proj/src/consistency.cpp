#include "tefcorr/consistency.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "rng.hpp"
#include "tefcorr/errors.hpp"
#include "tefcorr/parallel.hpp"

namespace tefcorr {

bool ConsistencyReport::passed() const { return max_residual() <= tolerance; }

double ConsistencyReport::max_residual() const {
  double m = 0.0;
  for (const auto& r : identities) m = std::max(m, r.max_residual);
  return m;
}

const IdentityResult& ConsistencyReport::worst() const {
  if (identities.empty()) throw DomainError("empty consistency report");
  std::size_t best = 0;
  for (std::size_t i = 1; i < identities.size(); ++i) {
    if (identities[i].max_residual > identities[best].max_residual) best = i;
  }
  return identities[best];
}

namespace {

constexpr std::uint64_t kExhaustiveBudget = 5'000'000;

int finite_range(const OnePointEnergyField& field) {
  const auto r = field.dependence_range();
  if (!r) throw ModelError("consistency checks need a finite-range field");
  return *r;
}

Spin random_spin(std::mt19937_64& rng, const SpinSpace& spins) {
  return static_cast<Spin>(detail::uniform_index(rng, spins.size()));
}

Configuration random_configuration(std::mt19937_64& rng, const SpinSpace& spins,
                                   std::span<const Site> sites) {
  Configuration c;
  for (const auto& s : sites) c.set(s, random_spin(rng, spins));
  return c;
}

std::string spin_text(const SpinSpace& spins, Spin s) { return spins.label(s); }

std::string config_text(const SpinSpace& spins, const Configuration& c) {
  if (c.empty()) return "{}";
  std::string out = "{";
  bool first = true;
  for (const auto& [s, x] : c.entries()) {
    if (!first) out += ' ';
    first = false;
    out += s.str() + "=" + spins.label(x);
  }
  return out + "}";
}

/// Evaluates `count` instances in parallel; residuals(i) returns one value
/// per identity.  Reduction keeps the first instance attaining the maximum.
template <std::size_t N>
ConsistencyReport run_instances(const std::array<const char*, N>& names, std::size_t count,
                                double tol,
                                const std::function<std::array<double, N>(std::size_t)>& residuals,
                                const std::function<std::string(std::size_t)>& describe) {
  std::vector<std::array<double, N>> values(count);
  parallel_for(count, [&](std::size_t i) { values[i] = residuals(i); });
  ConsistencyReport report;
  report.tolerance = tol;
  for (std::size_t k = 0; k < N; ++k) {
    IdentityResult r;
    r.identity = names[k];
    r.instances = count;
    std::size_t arg = count;
    for (std::size_t i = 0; i < count; ++i) {
      const double v = values[i][k];
      if (std::isnan(v) || v > r.max_residual) {
        r.max_residual = std::isnan(v) ? INFINITY : v;
        arg = i;
        if (std::isnan(v)) break;
      }
    }
    if (arg < count) r.witness = describe(arg) + " residual=" + std::to_string(r.max_residual);
    report.identities.push_back(std::move(r));
  }
  return report;
}

void require_budget(std::uint64_t n, const char* what) {
  if (n > kExhaustiveBudget) {
    throw ResourceError(std::string("exhaustive ") + what + " plan too large", n,
                        kExhaustiveBudget);
  }
}

std::vector<Site> without_sites(std::span<const Site> sites, std::initializer_list<Site> drop) {
  std::vector<Site> out;
  for (const auto& s : sites) {
    if (std::find(drop.begin(), drop.end(), s) == drop.end()) out.push_back(s);
  }
  return out;
}

// -- one-point identities ---------------------------------------------------

struct OnePointInstance {
  Site t, s;
  Configuration z;
  Spin x, u, y, v, mid;
};

std::vector<OnePointInstance> one_point_instances(const OnePointEnergyField& field,
                                                  const SamplePlan& plan) {
  const auto& spins = field.spins();
  const int range = finite_range(field);
  std::vector<OnePointInstance> out;
  if (plan.exhaustive) {
    if (!plan.region) throw DomainError("exhaustive plan needs a region");
    const auto& region = *plan.region;
    const std::uint64_t q = spins.size();
    std::uint64_t per_pair = q * q * q * q * q;
    for (std::size_t i = 0; i + 2 < region.size(); ++i) per_pair *= q;
    require_budget(per_pair * region.size() * (region.size() - 1), "one-point");
    for (const auto& t : region.sites()) {
      for (const auto& s : region.sites()) {
        if (s == t) continue;
        const auto rest = without_sites(region.sites(), {t, s});
        auto visit = [&](const Configuration& z) {
          for (Spin x = 0; x < q; ++x)
            for (Spin u = 0; u < q; ++u)
              for (Spin y = 0; y < q; ++y)
                for (Spin v = 0; v < q; ++v)
                  for (Spin m = 0; m < q; ++m) out.push_back({t, s, z, x, u, y, v, m});
        };
        if (rest.empty()) {
          visit(Configuration{});
        } else {
          for_each_configuration(Window(rest), spins, false, visit);
        }
      }
    }
    return out;
  }
  const auto anchors = field.scan_sites();
  out.reserve(plan.instances);
  for (std::size_t i = 0; i < plan.instances; ++i) {
    auto rng = detail::instance_rng(plan.seed, i);
    const Site t = anchors[detail::uniform_index(rng, anchors.size())];
    const auto region = ball(t, range + 1);
    Site s = t;
    while (s == t) s = region[detail::uniform_index(rng, region.size())];
    Configuration z = random_configuration(rng, spins, without_sites(region, {t, s}));
    OnePointInstance inst{t, s, std::move(z), 0, 0, 0, 0, 0};
    inst.x = random_spin(rng, spins);
    inst.u = random_spin(rng, spins);
    inst.y = random_spin(rng, spins);
    inst.v = random_spin(rng, spins);
    inst.mid = random_spin(rng, spins);
    out.push_back(std::move(inst));
  }
  return out;
}

// -- volume identities ------------------------------------------------------

struct VolumeInstance {
  std::vector<Site> lam, vol;
  Configuration z, x, u, w, y, v;
};

std::vector<VolumeInstance> volume_instances(const OnePointEnergyField& field,
                                             const SamplePlan& plan) {
  const auto& spins = field.spins();
  const int range = finite_range(field);
  std::vector<VolumeInstance> out;
  if (plan.exhaustive) {
    if (!plan.region) throw DomainError("exhaustive plan needs a region");
    const auto& region = *plan.region;
    const std::size_t n = region.size();
    if (n > 12) throw ResourceError("exhaustive volume plan region too large", n, 12);
    // Each site goes to lam (1), vol (2) or the boundary (0).
    std::uint64_t assignments = 1;
    for (std::size_t i = 0; i < n; ++i) assignments *= 3;
    std::uint64_t total = 0;
    const std::uint64_t q = spins.size();
    for (std::uint64_t code = 0; code < assignments; ++code) {
      std::uint64_t c = code, states = 1;
      std::size_t nl = 0, nv = 0, nz = 0;
      for (std::size_t i = 0; i < n; ++i, c /= 3) {
        const auto r = c % 3;
        nl += r == 1;
        nv += r == 2;
        nz += r == 0;
      }
      if (nl == 0 || nv == 0) continue;
      for (std::size_t i = 0; i < 2 * nl + 2 * nv + nz; ++i) states *= q;
      total += states;
    }
    require_budget(total, "volume");
    for (std::uint64_t code = 0; code < assignments; ++code) {
      std::vector<Site> lam, vol, rest;
      std::uint64_t c = code;
      for (std::size_t i = 0; i < n; ++i, c /= 3) {
        const auto r = c % 3;
        (r == 1 ? lam : r == 2 ? vol : rest).push_back(region[i]);
      }
      if (lam.empty() || vol.empty()) continue;
      const Window lw(lam), vw(vol);
      auto zs = rest.empty() ? std::vector<Configuration>{Configuration{}}
                             : enumerate_configs(Window(rest), spins, false);
      const auto lams = enumerate_configs(lw, spins, false);
      const auto vols = enumerate_configs(vw, spins, false);
      for (const auto& z : zs)
        for (const auto& x : lams)
          for (const auto& u : lams)
            for (const auto& y : vols)
              for (const auto& v : vols) out.push_back({lam, vol, z, x, u, Configuration{}, y, v});
    }
    return out;
  }
  const auto anchors = field.scan_sites();
  out.reserve(plan.instances);
  for (std::size_t i = 0; i < plan.instances; ++i) {
    auto rng = detail::instance_rng(plan.seed, i);
    const Site t = anchors[detail::uniform_index(rng, anchors.size())];
    auto region = ball(t, range + 1);
    std::shuffle(region.begin(), region.end(), rng);
    const std::size_t nl = 1 + detail::uniform_index(rng, std::min<std::size_t>(3, region.size() - 1));
    const std::size_t nv = 1 + detail::uniform_index(rng, std::min<std::size_t>(3, region.size() - nl));
    std::vector<Site> lam(region.begin(), region.begin() + nl);
    std::vector<Site> vol(region.begin() + nl, region.begin() + nl + nv);
    std::vector<Site> rest(region.begin() + nl + nv, region.end());
    std::sort(lam.begin(), lam.end());
    std::sort(vol.begin(), vol.end());
    std::sort(rest.begin(), rest.end());
    VolumeInstance inst;
    inst.z = random_configuration(rng, spins, rest);
    inst.x = random_configuration(rng, spins, lam);
    inst.u = random_configuration(rng, spins, lam);
    inst.w = random_configuration(rng, spins, lam);
    inst.y = random_configuration(rng, spins, vol);
    inst.v = random_configuration(rng, spins, vol);
    inst.lam = std::move(lam);
    inst.vol = std::move(vol);
    out.push_back(std::move(inst));
  }
  return out;
}

// -- environment condition --------------------------------------------------

struct EnvironmentInstance {
  Site t, s;
  Configuration z;
  Spin x, y, v;
};

double environment_residual(const OnePointEnergyField& field, const EnvironmentInstance& e) {
  const Configuration zy = e.z.with(e.s, e.y);
  const Configuration zv = e.z.with(e.s, e.v);
  const Configuration y = Configuration{}.with(e.s, e.y);
  const Configuration v = Configuration{}.with(e.s, e.v);
  return std::abs(field.eval(e.t, zy, e.x, kVacuum) - field.eval(e.t, zv, e.x, kVacuum) -
                  field.eval(e.t, y, e.x, kVacuum) + field.eval(e.t, v, e.x, kVacuum));
}

ConsistencyReport run_environment(const OnePointEnergyField& field,
                                  const std::vector<EnvironmentInstance>& inst, double tol) {
  const auto& spins = field.spins();
  return run_instances<1>(
      {"environment"}, inst.size(), tol,
      [&](std::size_t i) { return std::array<double, 1>{environment_residual(field, inst[i])}; },
      [&](std::size_t i) {
        const auto& e = inst[i];
        return "t=" + e.t.str() + " s=" + e.s.str() + " z=" + config_text(spins, e.z) +
               " x=" + spin_text(spins, e.x) + " y=" + spin_text(spins, e.y) +
               " v=" + spin_text(spins, e.v);
      });
}

}  // namespace

ConsistencyReport check_one_point_consistency(const OnePointEnergyField& field,
                                              const SamplePlan& plan, double tol) {
  const auto inst = one_point_instances(field, plan);
  const auto& spins = field.spins();
  return run_instances<3>(
      {"cocycle", "antisymmetry", "two-site exchange"}, inst.size(), tol,
      [&](std::size_t i) {
        const auto& p = inst[i];
        const double a = field.eval(p.t, p.z, p.x, p.u);
        const double cocycle = a - field.eval(p.t, p.z, p.x, p.mid) - field.eval(p.t, p.z, p.mid, p.u);
        const double anti = a + field.eval(p.t, p.z, p.u, p.x);
        const double exchange = field.eval(p.t, p.z.with(p.s, p.y), p.x, p.u) +
                                field.eval(p.s, p.z.with(p.t, p.u), p.y, p.v) -
                                field.eval(p.s, p.z.with(p.t, p.x), p.y, p.v) -
                                field.eval(p.t, p.z.with(p.s, p.v), p.x, p.u);
        return std::array<double, 3>{std::abs(cocycle), std::abs(anti), std::abs(exchange)};
      },
      [&](std::size_t i) {
        const auto& p = inst[i];
        return "t=" + p.t.str() + " s=" + p.s.str() + " z=" + config_text(spins, p.z) +
               " x=" + spin_text(spins, p.x) + " u=" + spin_text(spins, p.u) +
               " y=" + spin_text(spins, p.y) + " v=" + spin_text(spins, p.v) +
               " mid=" + spin_text(spins, p.mid);
      });
}

ConsistencyReport check_field_consistency(const OnePointEnergyField& field,
                                          const SamplePlan& plan, double tol) {
  const auto inst = volume_instances(field, plan);
  const auto& spins = field.spins();
  return run_instances<3>(
      {"volume cocycle", "volume antisymmetry", "volume split"}, inst.size(), tol,
      [&](std::size_t i) {
        const auto& p = inst[i];
        const Window lam(p.lam), vol(p.vol);
        std::vector<Site> both = p.lam;
        both.insert(both.end(), p.vol.begin(), p.vol.end());
        const Window joint(both);
        const double a = delta_volume(field, lam, p.z, p.x, p.u);
        const double cocycle =
            a - delta_volume(field, lam, p.z, p.x, p.w) - delta_volume(field, lam, p.z, p.w, p.u);
        const double anti = a + delta_volume(field, lam, p.z, p.u, p.x);
        const double split = delta_volume(field, joint, p.z, concat(p.x, p.y), concat(p.u, p.v)) -
                             delta_volume(field, lam, concat(p.z, p.y), p.x, p.u) -
                             delta_volume(field, vol, concat(p.z, p.u), p.y, p.v);
        return std::array<double, 3>{std::abs(cocycle), std::abs(anti), std::abs(split)};
      },
      [&](std::size_t i) {
        const auto& p = inst[i];
        return "L=" + Window(p.lam).str() + " V=" + Window(p.vol).str() +
               " z=" + config_text(spins, p.z) + " x=" + config_text(spins, p.x) +
               " u=" + config_text(spins, p.u) + " w=" + config_text(spins, p.w) +
               " y=" + config_text(spins, p.y) + " v=" + config_text(spins, p.v);
      });
}

ConsistencyReport check_environment_condition(const OnePointEnergyField& field,
                                              const SamplePlan& plan, double tol) {
  if (plan.exhaustive) {
    if (!plan.region) throw DomainError("exhaustive plan needs a region");
    return check_environment_condition_exhaustive(field, *plan.region, tol);
  }
  const int range = finite_range(field);
  const auto& spins = field.spins();
  const auto anchors = field.scan_sites();
  std::vector<EnvironmentInstance> inst;
  inst.reserve(plan.instances);
  for (std::size_t i = 0; i < plan.instances; ++i) {
    auto rng = detail::instance_rng(plan.seed, i);
    const Site t = anchors[detail::uniform_index(rng, anchors.size())];
    const auto region = ball(t, range + 1);
    Site s = t;
    while (s == t) s = region[detail::uniform_index(rng, region.size())];
    EnvironmentInstance e{t, s, random_configuration(rng, spins, without_sites(region, {t, s})),
                          random_spin(rng, spins), random_spin(rng, spins),
                          random_spin(rng, spins)};
    inst.push_back(std::move(e));
  }
  return run_environment(field, inst, tol);
}

ConsistencyReport check_environment_condition_exhaustive(const OnePointEnergyField& field,
                                                         const Window& volume, double tol) {
  const auto& spins = field.spins();
  const std::uint64_t q = spins.size();
  std::uint64_t per_pair = q * q * q;
  for (std::size_t i = 0; i + 2 < volume.size(); ++i) per_pair *= q;
  require_budget(per_pair * volume.size() * (volume.size() - 1), "environment");
  std::vector<EnvironmentInstance> inst;
  for (const auto& t : volume.sites()) {
    for (const auto& s : volume.sites()) {
      if (s == t) continue;
      const auto rest = without_sites(volume.sites(), {t, s});
      auto visit = [&](const Configuration& z) {
        for (Spin x = 0; x < q; ++x)
          for (Spin y = 0; y < q; ++y)
            for (Spin v = 0; v < q; ++v) inst.push_back({t, s, z, x, y, v});
      };
      if (rest.empty()) {
        visit(Configuration{});
      } else {
        for_each_configuration(Window(rest), spins, false, visit);
      }
    }
  }
  return run_environment(field, inst, tol);
}

}  // namespace tefcorr
