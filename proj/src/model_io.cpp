#include "tefcorr/model_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "tefcorr/errors.hpp"

namespace tefcorr {

InputError::InputError(const std::string& source, std::size_t line, std::size_t column,
                       const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

namespace {

/// A slice of the input with the 1-based column of its first character.
struct Token {
  std::string_view text;
  std::size_t column;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

Token trim(Token t) {
  while (!t.text.empty() && is_space(t.text.front())) {
    t.text.remove_prefix(1);
    ++t.column;
  }
  while (!t.text.empty() && is_space(t.text.back())) t.text.remove_suffix(1);
  return t;
}

std::vector<Token> split(Token t, char sep) {
  std::vector<Token> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= t.text.size(); ++i) {
    if (i == t.text.size() || t.text[i] == sep) {
      out.push_back(trim({t.text.substr(start, i - start), t.column + start}));
      start = i + 1;
    }
  }
  return out;
}

std::vector<Token> words(Token t) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < t.text.size()) {
    while (i < t.text.size() && is_space(t.text[i])) ++i;
    const std::size_t start = i;
    while (i < t.text.size() && !is_space(t.text[i])) ++i;
    if (i > start) out.push_back({t.text.substr(start, i - start), t.column + start});
  }
  return out;
}

class Context {
 public:
  Context(std::string source, std::size_t line) : source_(std::move(source)), line_(line) {}

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw InputError(source_, line_, at.column, message);
  }

  std::int64_t integer(const Token& t) const {
    std::int64_t v = 0;
    const auto* end = t.text.data() + t.text.size();
    auto [p, ec] = std::from_chars(t.text.data(), end, v);
    if (t.text.empty() || ec != std::errc() || p != end) {
      fail(t, "expected an integer, found '" + std::string(t.text) + "'");
    }
    return v;
  }

  double real(const Token& t) const {
    double v = 0;
    const auto* end = t.text.data() + t.text.size();
    auto [p, ec] = std::from_chars(t.text.data(), end, v);
    if (t.text.empty() || ec != std::errc() || p != end || !std::isfinite(v)) {
      fail(t, "expected a finite number, found '" + std::string(t.text) + "'");
    }
    return v;
  }

  Site site(const Token& t, int dimension) const {
    const auto parts = split(t, ',');
    if (static_cast<int>(parts.size()) != dimension) {
      fail(t, "expected a site with " + std::to_string(dimension) + " coordinates, found '" +
                  std::string(t.text) + "'");
    }
    std::vector<std::int64_t> c;
    for (const auto& p : parts) c.push_back(integer(p));
    try {
      return Site(std::span<const std::int64_t>(c));
    } catch (const std::exception& e) {
      fail(t, e.what());
    }
  }

  Spin spin(const Token& t, const SpinSpace& spins) const {
    const auto s = spins.find(std::string(t.text));
    if (!s) fail(t, "unknown spin label '" + std::string(t.text) + "'");
    return *s;
  }

  Configuration configuration(const Token& t, const SpinSpace& spins, int dimension) const {
    if (t.text == "-") return {};
    Configuration c;
    for (const auto& item : split(t, ';')) {
      if (item.text.empty()) continue;
      const auto kv = split(item, '=');
      if (kv.size() != 2) fail(item, "expected site=label, found '" + std::string(item.text) + "'");
      const Site s = site(kv[0], dimension);
      const Spin x = spin(kv[1], spins);
      if (x == kVacuum) fail(kv[1], "configurations list non-vacuum spins only");
      if (c.contains(s)) fail(kv[0], "site " + s.str() + " listed twice");
      c.set(s, x);
    }
    return c;
  }

  std::vector<Token> fields(const Token& value, std::size_t count, const char* shape) const {
    auto f = split(value, ':');
    if (f.size() != count) fail(value, std::string("expected ") + shape);
    return f;
  }

 private:
  std::string source_;
  std::size_t line_;
};

struct Statement {
  std::string key;
  Token key_token;
  Token value;
  std::size_t line;
};

const char* const kHeaderKeys[] = {"dimension", "spins", "vacuum", "range", "homogeneous",
                                   "scan_window"};
const char* const kTermKeys[] = {"coupling", "onebody", "onebody_at", "bond", "perturb"};

bool is_one_of(const std::string& key, const auto& list) {
  for (const char* k : list) {
    if (key == k) return true;
  }
  return false;
}

}  // namespace

Model parse_model(std::string_view text, const std::string& source) {
  std::vector<Statement> statements;
  std::map<std::string, std::size_t> header;
  {
    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
      const std::size_t eol = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, eol - pos);
      ++line_no;
      pos = eol + 1;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      const Token whole = trim({line, 1});
      if (whole.text.empty()) {
        if (eol == text.size()) break;
        continue;
      }
      const Context ctx(source, line_no);
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) ctx.fail(whole, "expected 'key = value'");
      const Token key = trim({line.substr(0, eq), 1});
      const Token value = trim({line.substr(eq + 1), eq + 2});
      const std::string k(key.text);
      if (!is_one_of(k, kHeaderKeys) && !is_one_of(k, kTermKeys)) {
        ctx.fail(key, "unknown key '" + k + "'");
      }
      if (is_one_of(k, kHeaderKeys)) {
        if (header.count(k)) ctx.fail(key, "duplicate key '" + k + "'");
        header[k] = statements.size();
      }
      statements.push_back({k, key, value, line_no});
      if (eol == text.size()) break;
    }
  }
  auto required = [&](const char* key) -> const Statement& {
    auto it = header.find(key);
    if (it == header.end()) throw InputError(source, 1, 1, std::string("missing key '") + key + "'");
    return statements[it->second];
  };
  auto ctx_of = [&](const Statement& s) { return Context(source, s.line); };

  const auto& dim_st = required("dimension");
  const auto dimension = ctx_of(dim_st).integer(dim_st.value);
  if (dimension < 1 || dimension > kMaxDimension) {
    ctx_of(dim_st).fail(dim_st.value, "dimension must be in 1.." + std::to_string(kMaxDimension));
  }
  const int d = static_cast<int>(dimension);

  const auto& spins_st = required("spins");
  std::vector<std::string> labels;
  for (const auto& w : words(spins_st.value)) labels.emplace_back(w.text);
  const auto& vac_st = required("vacuum");
  std::size_t vacuum_index = labels.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == vac_st.value.text) vacuum_index = i;
  }
  if (vacuum_index == labels.size()) {
    ctx_of(vac_st).fail(vac_st.value, "vacuum '" + std::string(vac_st.value.text) +
                                          "' is not one of the spin labels");
  }
  std::optional<SpinSpace> spins_opt;
  try {
    spins_opt.emplace(labels, vacuum_index);
  } catch (const std::exception& e) {
    ctx_of(spins_st).fail(spins_st.value, e.what());
  }
  const SpinSpace& spins = *spins_opt;

  const auto& range_st = required("range");
  const auto range = ctx_of(range_st).integer(range_st.value);
  if (range < 0 || range > 64) ctx_of(range_st).fail(range_st.value, "range must be in 0..64");

  auto potential = std::make_shared<PairPotential>(d, spins, static_cast<int>(range));
  std::optional<bool> homogeneous;
  if (auto it = header.find("homogeneous"); it != header.end()) {
    const auto& st = statements[it->second];
    if (st.value.text == "true") {
      homogeneous = true;
    } else if (st.value.text == "false") {
      homogeneous = false;
    } else {
      ctx_of(st).fail(st.value, "expected true or false");
    }
  }
  std::size_t validate_line = 1;
  if (auto it = header.find("scan_window"); it != header.end()) {
    const auto& st = statements[it->second];
    validate_line = st.line;
    try {
      potential->set_scan_window(parse_window(st.value.text, d));
    } catch (const std::exception& e) {
      ctx_of(st).fail(st.value, e.what());
    }
  }

  std::vector<FieldPerturbation> perturbations;
  for (const auto& st : statements) {
    if (!is_one_of(st.key, kTermKeys)) continue;
    const Context ctx = ctx_of(st);
    try {
      if (st.key == "coupling") {
        const auto f = ctx.fields(st.value, 3, "offset : a b : value");
        const auto ab = words(f[1]);
        if (ab.size() != 2) ctx.fail(f[1], "expected two spin labels");
        potential->set_coupling(ctx.site(f[0], d), ctx.spin(ab[0], spins), ctx.spin(ab[1], spins),
                                ctx.real(f[2]));
      } else if (st.key == "onebody") {
        const auto f = ctx.fields(st.value, 2, "a : value");
        potential->set_one_body(ctx.spin(f[0], spins), ctx.real(f[1]));
      } else if (st.key == "onebody_at") {
        const auto f = ctx.fields(st.value, 3, "site : a : value");
        potential->set_one_body_at(ctx.site(f[0], d), ctx.spin(f[1], spins), ctx.real(f[2]));
      } else if (st.key == "bond") {
        const auto f = ctx.fields(st.value, 4, "site : site : a b : value");
        const auto ab = words(f[2]);
        if (ab.size() != 2) ctx.fail(f[2], "expected two spin labels");
        potential->set_bond(ctx.site(f[0], d), ctx.site(f[1], d), ctx.spin(ab[0], spins),
                            ctx.spin(ab[1], spins), ctx.real(f[3]));
      } else if (st.key == "perturb") {
        const auto f = ctx.fields(st.value, 4, "site : x u : boundary : value");
        const auto xu = words(f[1]);
        if (xu.size() != 2) ctx.fail(f[1], "expected two spin labels");
        perturbations.push_back({ctx.site(f[0], d), ctx.spin(xu[0], spins), ctx.spin(xu[1], spins),
                                 ctx.configuration(f[2], spins, d), ctx.real(f[3])});
      }
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      ctx.fail(st.value, e.what());
    }
    if (homogeneous && *homogeneous && !potential->homogeneous()) {
      ctx.fail(st.key_token, "site-specific term in a model declared homogeneous");
    }
  }

  Model model;
  try {
    potential->validate();
    auto base = std::make_shared<const PairPotentialField>(*potential);
    model.potential = potential;
    if (perturbations.empty()) {
      model.field = base;
    } else {
      model.field = std::make_shared<const PerturbedField>(base, std::move(perturbations));
      model.perturbed = true;
    }
  } catch (const std::exception& e) {
    throw InputError(source, validate_line, 1, e.what());
  }
  model.digest = fnv1a_hex(text);
  return model;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Model load_model(const std::string& path) { return parse_model(read_file(path), path); }

Window parse_window(std::string_view spec, int dimension) {
  const Context ctx("<window>", 1);
  const auto parts = split({spec, 1}, ':');
  if (parts.size() != 2) ctx.fail({spec, 1}, "window spec must be 'lo:hi'");
  const Site lo = ctx.site(parts[0], dimension);
  const Site hi = ctx.site(parts[1], dimension);
  for (int i = 0; i < dimension; ++i) {
    if (lo[i] > hi[i]) ctx.fail(parts[1], "window corner hi is below lo");
  }
  return Window::box(lo, hi);
}

std::vector<Configuration> parse_probes(std::string_view text, const SpinSpace& spins,
                                        int dimension, const std::string& source) {
  std::vector<Configuration> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const Token t = trim({line, 1});
    if (t.text.empty()) continue;
    const Context ctx(source, line_no);
    auto c = ctx.configuration(t, spins, dimension);
    if (c.empty()) ctx.fail(t, "probe must be nonempty");
    out.push_back(std::move(c));
  }
  if (out.empty()) throw InputError(source, 1, 1, "no probes given");
  return out;
}

std::vector<Configuration> load_probes(const std::string& path, const SpinSpace& spins,
                                       int dimension) {
  return parse_probes(read_file(path), spins, dimension, path);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& os, const HeaderFields& fields) {
  for (const auto& [k, v] : fields) os << "# " << k << '\t' << v << '\n';
}

namespace {

void write_config_columns(std::ostream& os, const Configuration& x, const SpinSpace& spins) {
  if (x.empty()) {
    os << "-\t-";
    return;
  }
  std::string sites, labels;
  for (const auto& [s, spin] : x.entries()) {
    if (!sites.empty()) {
      sites += ';';
      labels += ';';
    }
    sites += s.str();
    labels += spins.label(spin);
  }
  os << sites << '\t' << labels;
}

}  // namespace

void write_correlation_table(std::ostream& os, const CorrelationTable& table,
                             const SpinSpace& spins) {
  os << "support\tspins\tvalue\n";
  for (std::uint64_t code = 0; code < table.size(); ++code) {
    write_config_columns(os, table.codec().decode(code), spins);
    os << '\t' << format_double(table.by_code(code)) << '\n';
  }
}

void write_function(std::ostream& os, const SupportedFunction& phi, const SpinSpace& spins) {
  os << "support\tspins\tvalue\n";
  for (std::size_t i = 0; i < phi.domain().size(); ++i) {
    write_config_columns(os, phi.domain().config(i), spins);
    os << '\t' << format_double(phi.values()[i]) << '\n';
  }
}

void write_solve_report(std::ostream& os, const SolveReport& r) {
  os << "route\t" << r.route << '\n'
     << "unknowns\t" << r.unknowns << '\n'
     << "iterations\t" << r.iterations << '\n'
     << "max_iterations\t" << r.max_iterations << '\n'
     << "final_update_norm\t" << format_double(r.final_update_norm) << '\n'
     << "residual_norm\t" << format_double(r.residual_norm) << '\n'
     << "operator_norm_bound\t" << format_double(r.operator_norm_bound) << '\n'
     << "gate_passed\t" << (r.gate_passed ? "true" : "false") << '\n'
     << "gate_overridden\t" << (r.gate_overridden ? "true" : "false") << '\n'
     << "empirical_contraction_rate\t" << format_double(r.empirical_contraction_rate) << '\n'
     << "dropped_mass\t" << format_double(r.dropped_mass) << '\n';
  if (r.trusted_depth) os << "trusted_depth\t" << *r.trusted_depth << '\n';
}

void write_series(std::ostream& os, const ConvergenceSeries& series) {
  os << "# reference\t" << series.reference << '\n'
     << "# gate_lhs\t" << format_double(series.gate_lhs) << '\n'
     << "# epsilon_bound\t"
     << (series.bound_available ? "derived from proof chain, evaluated at d - 1"
                                : "unavailable (contraction not certified)")
     << '\n';
  os << "window\tsize\td\tmax_abs_deviation\tepsilon_bound\twithin_bound\titerations\tresidual\n";
  for (const auto& r : series.rows) {
    os << r.window << '\t' << r.window_size << '\t' << r.d << '\t'
       << format_double(r.max_abs_deviation) << '\t'
       << (std::isnan(r.epsilon_bound) ? std::string("nan") : format_double(r.epsilon_bound))
       << '\t' << (r.within_bound ? "true" : "false") << '\t' << r.iterations << '\t'
       << format_double(r.residual) << '\n';
  }
}

}  // namespace tefcorr
