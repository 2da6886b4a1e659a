#pragma once

// Model files, window and probe specifications, and delimiter-separated
// output.
//
// A model file holds one `key = value` statement per line; `#` starts a
// comment.  Sites are comma-separated integers, fields are separated by `:`.
//
//   dimension   = 1
//   spins       = 0 1            # labels, whitespace separated
//   vacuum      = 0
//   range       = 1
//   coupling    = 1 : 1 1 : 0.2  # offset : a b : Phi
//   onebody     = 1 : 0.5        # a : h(a)
//   onebody_at  = 3 : 1 : 0.2    # site : a : h_t(a)
//   bond        = 0 : 1 : 1 1 : 0.3
//   scan_window = 0 : 5          # lo : hi, inclusive box
//   homogeneous = false
//   perturb     = 0 : 1 0 : 1=1 : 0.1   # site : x u : boundary or - : value

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tefcorr/convergence.hpp"
#include "tefcorr/exact.hpp"
#include "tefcorr/field.hpp"
#include "tefcorr/solver.hpp"
#include "tefcorr/supported_function.hpp"

namespace tefcorr {

/// Malformed input text, with a 1-based position.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& message);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Model {
  std::shared_ptr<const OnePointEnergyField> field;
  /// The pair potential behind the field (perturbations excluded).
  std::shared_ptr<const PairPotential> potential;
  bool perturbed = false;
  std::string digest;
};

Model parse_model(std::string_view text, const std::string& source = "<model>");
Model load_model(const std::string& path);

/// "lo:hi" with comma-separated coordinates, e.g. "0:7" or "0,0:2,2".
Window parse_window(std::string_view spec, int dimension);

/// One probe per line: `site=label;site=label`, e.g. `0,0=1;0,1=1`.
std::vector<Configuration> parse_probes(std::string_view text, const SpinSpace& spins,
                                        int dimension, const std::string& source = "<probes>");
std::vector<Configuration> load_probes(const std::string& path, const SpinSpace& spins,
                                       int dimension);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// %.17g
std::string format_double(double v);

using HeaderFields = std::vector<std::pair<std::string, std::string>>;

void write_header(std::ostream& os, const HeaderFields& fields);

/// Columns: support, spins, value.  Supports and spins are `;`-joined.
void write_correlation_table(std::ostream& os, const CorrelationTable& table,
                             const SpinSpace& spins);
void write_function(std::ostream& os, const SupportedFunction& phi, const SpinSpace& spins);
void write_solve_report(std::ostream& os, const SolveReport& report);
void write_series(std::ostream& os, const ConvergenceSeries& series);

}  // namespace tefcorr
