#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "tefcorr/bounds.hpp"
#include "tefcorr/consistency.hpp"
#include "tefcorr/convergence.hpp"
#include "tefcorr/errors.hpp"
#include "tefcorr/exact.hpp"
#include "tefcorr/model_io.hpp"
#include "tefcorr/parallel.hpp"
#include "tefcorr/solver.hpp"

namespace tefcorr::cli {

namespace {

struct Args {
  std::string model_path;
  std::vector<std::string> windows;
  std::string probes_path;
  std::string out_path;
  std::optional<double> tol;
  std::size_t kmax = 4;
  std::uint64_t seed = 0;
  std::size_t instances = 10000;
  bool override_gate = false;
  bool exhaustive = false;
  unsigned threads = 1;
  std::string mode = "finite";
  std::string init = "delta";
  std::string route = "exact";
  int ref_margin = 2;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

HeaderFields base_header(const std::string& command, const Model& model, const Args& a) {
  return {{"tool", std::string(kToolName) + " " + kToolVersion},
          {"command", command},
          {"model_digest", model.digest},
          {"seed", std::to_string(a.seed)}};
}

void add_tolerances(HeaderFields& h, std::initializer_list<std::pair<const char*, double>> tols) {
  for (const auto& [k, v] : tols) h.emplace_back(k, format_double(v));
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot write " + path);
  return os;
}

std::vector<Configuration> probes_of(const Args& a, const Model& m) {
  if (a.probes_path.empty()) return {};
  return load_probes(a.probes_path, m.field->spins(), m.field->dimension());
}

Window single_window(const Args& a, const Model& m) {
  if (a.windows.size() != 1) throw UsageError("exactly one --window is required");
  return parse_window(a.windows.front(), m.field->dimension());
}

int cmd_verify(const Args& a, std::ostream& out, std::ostream& err) {
  const Model m = load_model(a.model_path);
  const double tol = a.tol.value_or(kIdentityTolerance);
  SamplePlan plan;
  plan.seed = a.seed;
  plan.instances = a.instances;
  if (a.exhaustive) {
    const Window region = single_window(a, m);
    if (region.size() > 4) throw UsageError("exhaustive mode needs a window of at most 4 sites");
    plan.exhaustive = true;
    plan.region = region;
  }
  auto header = base_header("verify", m, a);
  header.emplace_back("plan", a.exhaustive ? "exhaustive" : "randomized");
  if (!a.exhaustive) header.emplace_back("instances", std::to_string(a.instances));
  add_tolerances(header, {{"tolerance", tol}});

  std::vector<ConsistencyReport> reports{check_one_point_consistency(*m.field, plan, tol),
                                         check_field_consistency(*m.field, plan, tol),
                                         check_environment_condition(*m.field, plan, tol)};
  std::ostringstream body;
  write_header(body, header);
  body << "identity\tmax_residual\tinstances\tstatus\n";
  bool ok = true;
  for (const auto& r : reports) {
    for (const auto& id : r.identities) {
      const bool pass = id.max_residual <= tol;
      ok = ok && pass;
      body << id.identity << '\t' << format_double(id.max_residual) << '\t' << id.instances
           << '\t' << (pass ? "pass" : "FAIL") << '\n';
      if (!pass) err << "witness for " << id.identity << ": " << id.witness << '\n';
    }
  }
  out << body.str();
  if (!a.out_path.empty()) open_output(a.out_path) << body.str();
  return ok ? kOk : kIdentityFailure;
}

int cmd_exact(const Args& a, std::ostream& out, std::ostream& err) {
  const Model m = load_model(a.model_path);
  const Window window = single_window(a, m);
  const double tol = a.tol.value_or(kCorrelationTolerance);
  const auto probes = probes_of(a, m);
  const auto table = rho_exact(*m.field, window);
  const auto check = verify_correlation_equation(*m.field, table, tol);

  auto header = base_header("exact", m, a);
  header.emplace_back("window", window.str());
  add_tolerances(header, {{"tolerance", tol}});
  write_header(out, header);
  out << "partition_function\t" << format_double(table.partition()) << '\n'
      << "route_gap\t" << format_double(table.route_gap()) << '\n'
      << "correlation_equation_residual\t" << format_double(check.max_residual) << '\n'
      << "configurations_checked\t" << check.checked << '\n'
      << "correlation_equation\t" << (check.passed() ? "pass" : "FAIL") << '\n';
  for (const auto& p : probes) out << "rho\t" << p.str() << '\t' << format_double(table(p)) << '\n';
  if (!a.out_path.empty()) {
    auto os = open_output(a.out_path);
    write_header(os, header);
    write_correlation_table(os, table, m.field->spins());
  }
  if (!check.passed()) {
    err << "correlation equation fails at " << check.worst.str() << '\n';
    return kIdentityFailure;
  }
  return kOk;
}

int cmd_solve(const Args& a, std::ostream& out, std::ostream&) {
  const Model m = load_model(a.model_path);
  const Window window = single_window(a, m);
  SolveOptions opts;
  opts.override_gate = a.override_gate;
  if (a.tol) opts.update_tol = *a.tol;
  if (a.init == "zero") {
    opts.init = Initialization::Zero;
  } else if (a.init != "delta") {
    throw UsageError("--init must be delta or zero");
  }
  const auto probes = probes_of(a, m);
  Solution sol = [&] {
    if (a.mode == "finite") return solve_finite_volume(*m.field, window, opts);
    if (a.mode == "direct") return solve_finite_volume_direct(*m.field, window, opts);
    if (a.mode == "infinite") return solve_infinite_volume(*m.field, window, a.kmax, opts);
    throw UsageError("--mode must be finite, direct or infinite");
  }();

  auto header = base_header("solve", m, a);
  header.emplace_back("window", window.str());
  header.emplace_back("mode", a.mode);
  if (a.mode == "infinite") header.emplace_back("k_max", std::to_string(a.kmax));
  add_tolerances(header, {{"update_tolerance", opts.update_tol},
                          {"residual_tolerance", opts.residual_tol}});
  write_header(out, header);
  write_solve_report(out, sol.report);
  if (a.mode != "infinite") {
    const auto count = configuration_count(window, m.field->spins());
    if (count && *count <= kDefaultEnumerationBudget) {
      const auto table = rho_exact(*m.field, window);
      double dev = 0.0;
      for (std::size_t i = 0; i < sol.phi.domain().size(); ++i) {
        dev = std::max(dev, std::abs(sol.phi.values()[i] - table(sol.phi.domain().config(i))));
      }
      out << "max_deviation_vs_exact\t" << format_double(dev) << '\n';
    }
  }
  for (const auto& p : probes) out << "rho\t" << p.str() << '\t' << format_double(sol.phi(p)) << '\n';
  if (!a.out_path.empty()) {
    auto os = open_output(a.out_path);
    write_header(os, header);
    write_function(os, sol.phi, m.field->spins());
  }
  return kOk;
}

int cmd_converge(const Args& a, std::ostream& out, std::ostream&) {
  const Model m = load_model(a.model_path);
  if (a.windows.size() < 2) throw UsageError("converge needs at least two --window values");
  if (a.probes_path.empty()) throw UsageError("converge needs --probes");
  std::vector<Window> windows;
  for (const auto& w : a.windows) windows.push_back(parse_window(w, m.field->dimension()));
  const auto probes = probes_of(a, m);
  ConvergenceOptions opts;
  opts.reference_margin = a.ref_margin;
  opts.override_gate = a.override_gate;
  opts.k_max = a.kmax;
  if (a.route == "solve") {
    opts.route = WindowRoute::Solve;
  } else if (a.route != "exact") {
    throw UsageError("--route must be exact or solve");
  }
  const auto series = convergence_profile(*m.field, windows, probes, opts);
  auto header = base_header("converge", m, a);
  header.emplace_back("route", a.route);
  header.emplace_back("reference_margin", std::to_string(a.ref_margin));
  add_tolerances(header, {{"update_tolerance", kUpdateTolerance},
                          {"residual_tolerance", kResidualTolerance}});
  std::ostringstream body;
  write_header(body, header);
  write_series(body, series);
  out << body.str();
  if (!a.out_path.empty()) open_output(a.out_path) << body.str();
  return kOk;
}

int cmd_bounds(const Args& a, std::ostream& out, std::ostream&) {
  const Model m = load_model(a.model_path);
  const auto b = field_bounds(*m.field);
  write_header(out, base_header("bounds", m, a));
  out << "norm_delta1\t" << format_double(b.norm_delta1) << '\n'
      << "D\t" << format_double(b.D) << '\n'
      << "N_X\t" << b.n_star << '\n'
      << "C1\t" << format_double(b.C1) << '\n'
      << "C1_prime\t" << format_double(b.C1_prime) << '\n'
      << "C2\t" << format_double(b.C2) << '\n'
      << "contraction_lhs\t" << format_double(b.contraction_lhs) << '\n'
      << "contraction_lhs_prime\t" << format_double(b.contraction_lhs_prime) << '\n'
      << "gate_lhs\t" << format_double(b.gate_lhs()) << '\n'
      << "gate\t" << (b.passes() ? "pass" : "fail") << '\n';
  if (!m.perturbed && m.potential->is_vacuum_potential()) {
    const double phi = m.potential->vacuum_norm();
    const auto s = pair_potential_sufficiency(phi, b.n_star);
    out << "phi_norm\t" << format_double(phi) << '\n'
        << "pair_potential_lhs\t" << format_double(s.lhs) << '\n'
        << "pair_potential_condition\t" << (s.passes ? "pass" : "fail") << '\n';
  } else {
    out << "pair_potential_condition\tn/a\n";
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transition energy fields, exact correlations and correlation-equation solvers",
               kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  Args a;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", a.model_path, "Model definition file")->required();
    sub->add_option("--seed", a.seed, "Seed for randomized checks");
    sub->add_option("--out", a.out_path, "Output file");
    sub->add_option("--threads", a.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    sub->add_option("--tol", a.tol, "Tolerance");
  };
  auto* verify = app.add_subcommand("verify", "Check the transition energy field identities");
  common(verify);
  verify->add_option("--instances", a.instances, "Randomized instances per identity");
  verify->add_flag("--exhaustive", a.exhaustive, "Enumerate every instance in --window");
  verify->add_option("--window", a.windows, "Region for exhaustive checks (lo:hi)");

  auto* exact = app.add_subcommand("exact", "Exact correlation table by enumeration");
  common(exact);
  exact->add_option("--window", a.windows, "Window (lo:hi)")->required();
  exact->add_option("--probes", a.probes_path, "Configurations to print");

  auto* solve = app.add_subcommand("solve", "Solve the correlation equation by iteration");
  common(solve);
  solve->add_option("--window", a.windows, "Window (lo:hi)")->required();
  solve->add_option("--mode", a.mode, "finite, direct or infinite");
  solve->add_option("--kmax", a.kmax, "Largest support for infinite-volume tables");
  solve->add_option("--init", a.init, "delta or zero");
  solve->add_flag("--override-gate", a.override_gate, "Iterate without a certified contraction");
  solve->add_option("--probes", a.probes_path, "Configurations to print");

  auto* converge = app.add_subcommand("converge", "Window convergence study");
  common(converge);
  converge->add_option("--window", a.windows, "Increasing windows (repeat)")->required();
  converge->add_option("--probes", a.probes_path, "Probe configurations");
  converge->add_option("--route", a.route, "exact or solve");
  converge->add_option("--ref-margin", a.ref_margin, "Reference window margin");
  converge->add_option("--kmax", a.kmax, "Largest support for the iterative reference");
  converge->add_flag("--override-gate", a.override_gate, "Iterate without a certified contraction");

  auto* bounds = app.add_subcommand("bounds", "Contraction constants");
  common(bounds);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << ' ' << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kInputError;
  }

  set_thread_count(a.threads);
  try {
    if (verify->parsed()) return cmd_verify(a, out, err);
    if (exact->parsed()) return cmd_exact(a, out, err);
    if (solve->parsed()) return cmd_solve(a, out, err);
    if (converge->parsed()) return cmd_converge(a, out, err);
    return cmd_bounds(a, out, err);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kInputError;
  } catch (const ResourceError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const GateError& e) {
    err << "gate failure: " << e.what() << '\n';
    return kGateFailure;
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << '\n';
    return kDivergence;
  } catch (const PreconditionError& e) {
    err << "precondition failure: " << e.what() << '\n';
    return kIdentityFailure;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace tefcorr::cli
