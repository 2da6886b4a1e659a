#include "tefcorr/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

#include "tefcorr/convergence.hpp"
#include "tefcorr/errors.hpp"

namespace tefcorr {

std::size_t predicted_max_iterations(double bound, double tol) {
  if (!(bound > 0.0) || !(bound < 1.0)) return kOverrideMaxIterations;
  return 10 * static_cast<std::size_t>(std::ceil(std::log(tol) / std::log(bound)));
}

namespace {

struct Gate {
  double bound;
  bool passed;
};

Gate check_gate(const OnePointEnergyField& field, const SolveOptions& options) {
  const FieldBounds b = options.bounds ? *options.bounds : field_bounds(field);
  const Gate gate{b.gate_lhs(), b.passes()};
  if (!gate.passed && !options.override_gate) {
    throw GateError("contraction not certified: max(C1, C1')(1 + C2) = " +
                        std::to_string(gate.bound) + " >= 1",
                    gate.bound);
  }
  return gate;
}

std::vector<double> residual_vector(const AssembledOperator& op, std::span<const double> phi) {
  std::vector<double> r(op.rows());
  op.apply(phi, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = phi[i] - op.delta()[i] - r[i];
  return r;
}

}  // namespace

Solution iterate(const AssembledOperator& op, const SolveOptions& options, double bound,
                 bool gate_passed) {
  SolveReport report;
  report.route = "iterative";
  report.operator_norm_bound = bound;
  report.gate_passed = gate_passed;
  report.gate_overridden = !gate_passed;
  report.max_iterations =
      gate_passed ? predicted_max_iterations(bound, options.update_tol) : kOverrideMaxIterations;
  report.dropped_mass = op.dropped_mass();
  report.unknowns = op.rows();

  const auto& dom = op.domain();
  const std::size_t n = op.rows();
  std::vector<double> phi =
      options.init == Initialization::Delta ? op.delta() : std::vector<double>(n, 0.0);
  std::vector<double> next(n), diff(n);
  double previous = -1.0;
  while (true) {
    if (report.iterations >= report.max_iterations) {
      throw DivergenceError("no convergence after " + std::to_string(report.iterations) +
                                " iterations (contraction rate estimate " +
                                std::to_string(report.empirical_contraction_rate) + ")",
                            report.empirical_contraction_rate, report.iterations);
    }
    op.apply(phi, next);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] += op.delta()[i];
      diff[i] = next[i] - phi[i];
    }
    phi.swap(next);
    ++report.iterations;
    const double update = bstar_norm(dom, diff);
    report.update_norms.push_back(update);
    report.final_update_norm = update;
    if (previous > kRateNoiseFloor) {
      report.empirical_contraction_rate =
          std::max(report.empirical_contraction_rate, update / previous);
    }
    previous = update;
    if (!std::isfinite(update) || update > 1e150) {
      throw DivergenceError("iteration diverged after " + std::to_string(report.iterations) +
                                " iterations (contraction rate estimate " +
                                std::to_string(report.empirical_contraction_rate) + ")",
                            report.empirical_contraction_rate, report.iterations);
    }
    if (update <= options.update_tol) {
      report.residual_norm = bstar_norm(dom, residual_vector(op, phi));
      if (report.residual_norm <= options.residual_tol) break;
    }
  }
  return {SupportedFunction(op.domain_ptr(), std::move(phi)), std::move(report)};
}

Solution solve_finite_volume(const OnePointEnergyField& field, const Window& window,
                             const SolveOptions& options) {
  const Gate gate = check_gate(field, options);
  auto dom = std::make_shared<const FunctionDomain>(window, field.spins().size(), window.size());
  const AssembledOperator op(field, dom, options.truncation);
  return iterate(op, options, gate.bound, gate.passed);
}

Solution solve_finite_volume_direct(const OnePointEnergyField& field, const Window& window,
                                    const SolveOptions& options) {
  const Gate gate = check_gate(field, options);
  const std::uint64_t unknowns =
      domain_size(window.size(), field.spins().size(), window.size());
  if (unknowns > kDirectUnknownLimit) {
    throw ResourceError("direct solve on " + window.str() + " has too many unknowns", unknowns,
                        kDirectUnknownLimit);
  }
  auto dom = std::make_shared<const FunctionDomain>(window, field.spins().size(), window.size());
  const AssembledOperator op(field, dom, options.truncation);
  const auto n = static_cast<Eigen::Index>(op.rows());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(op.nonzeros() + op.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    triplets.emplace_back(i, i, 1.0);
    for (std::size_t k = op.row_start()[i]; k < op.row_start()[i + 1]; ++k) {
      triplets.emplace_back(i, static_cast<Eigen::Index>(op.cols()[k]), -op.coefficients()[k]);
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    throw DivergenceError("direct solve: matrix 1 - K is singular", gate.bound, 0);
  }
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs[i] = op.delta()[static_cast<std::size_t>(i)];
  const Eigen::VectorXd x = lu.solve(rhs);
  std::vector<double> phi(x.data(), x.data() + n);

  SolveReport report;
  report.route = "direct";
  report.operator_norm_bound = gate.bound;
  report.gate_passed = gate.passed;
  report.gate_overridden = !gate.passed;
  report.unknowns = op.rows();
  report.dropped_mass = op.dropped_mass();
  report.residual_norm = bstar_norm(*dom, residual_vector(op, phi));
  return {SupportedFunction(dom, std::move(phi)), std::move(report)};
}

Solution solve_infinite_volume(const OnePointEnergyField& field, const Window& window,
                               std::size_t k_max, const SolveOptions& options) {
  const FieldBounds b = options.bounds ? *options.bounds : field_bounds(field);
  SolveOptions opts = options;
  opts.bounds = b;
  const Gate gate = check_gate(field, opts);
  auto dom = std::make_shared<const FunctionDomain>(window, field.spins().size(), k_max);
  const AssembledOperator op(field, dom, options.truncation);
  auto solution = iterate(op, opts, gate.bound, gate.passed);
  if (gate.passed) {
    const auto c = convergence_constants(field);
    if (auto d = trusted_depth(c)) solution.report.trusted_depth = static_cast<std::size_t>(*d);
  }
  return solution;
}

OperatorNormCertificate operator_norm_certificate(const OnePointEnergyField& field,
                                                  const SolveReport* report) {
  OperatorNormCertificate cert;
  cert.bound = field_bounds(field).gate_lhs();
  if (report && report->route == "iterative") cert.empirical = report->empirical_contraction_rate;
  return cert;
}

}  // namespace tefcorr
