#pragma once

// Text grammars for weights, symbols and maps, and the flat key=value run
// configuration consumed by the command-line front end.
//
//   weight:  gaussian:alpha=<f> | fock_sobolev:beta=<f> | gaussian_poly:alpha=<f>,m=<int>
//   symbol:  poly:c0,c1,...,cN            (complex literals a+bi)
//   map:     affine:beta=<c>,gamma=<c> | poly:...
//   density: radial:r2=<f>,r1=<f>,log1p=<f>,log=<f>,const=<f>
//            log rho(r) = r2 r^2 + r1 r + log1p log(1+r) + log log(r) + const

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fockop/classify.hpp"
#include "fockop/errors.hpp"
#include "fockop/operators.hpp"
#include "fockop/symbols.hpp"
#include "fockop/verify.hpp"
#include "fockop/weights.hpp"

namespace fockop {

/// Every problem found in a configuration, each prefixed with its location.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> errors) : Error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s;
    for (const auto& x : e) s += (s.empty() ? "" : "\n") + x;
    return s;
  }
  std::vector<std::string> errors_;
};

namespace grammar {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

inline double parse_real(std::string_view text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf" || t == "infinity") return kInf;
  if (t == "-inf") return kNegInf;
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || std::isnan(v))
    throw DomainError("malformed number: '" + t + "'");
  return v;
}

inline long long parse_integer(std::string_view text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) throw DomainError("malformed integer: '" + t + "'");
  return v;
}

/// a, bi, a+bi, a-bi, with i or j as the imaginary unit.
inline cplx parse_complex(std::string_view text) {
  const std::string t = trim(text);
  const auto bad = [&] { return DomainError("malformed complex literal: '" + t + "'"); };
  if (t.empty()) throw bad();
  const char last = t.back();
  if (last != 'i' && last != 'j') {
    try {
      return {parse_real(t), 0.0};
    } catch (const DomainError&) {
      throw bad();
    }
  }
  const std::string body = t.substr(0, t.size() - 1);
  // Split at the last sign that is not part of an exponent.
  std::size_t split_at = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  const auto imag_of = [&](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_real(s);
  };
  try {
    if (split_at == std::string::npos) return {0.0, imag_of(body)};
    return {parse_real(body.substr(0, split_at)), imag_of(body.substr(split_at))};
  } catch (const DomainError&) {
    throw bad();
  }
}

inline std::string format_complex(cplx c) {
  std::ostringstream os;
  os.precision(17);
  os << c.real();
  if (c.imag() != 0.0) os << (c.imag() < 0 || std::signbit(c.imag()) ? "" : "+") << c.imag() << "i";
  return os.str();
}

// "kind:k1=v1,k2=v2" -> (kind, {k: v}); duplicate or unknown keys rejected.
inline std::pair<std::string, std::map<std::string, std::string>> parse_tagged(std::string_view text,
                                                                              const std::set<std::string>& allowed) {
  const std::string t = trim(text);
  const auto colon = t.find(':');
  if (colon == std::string::npos) throw DomainError("expected '<kind>:<parameters>' in '" + t + "'");
  std::map<std::string, std::string> kv;
  const std::string rest = t.substr(colon + 1);
  if (!trim(rest).empty()) {
    for (const auto& item : split(rest, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw DomainError("expected key=value in '" + item + "'");
      const std::string k = trim(item.substr(0, eq));
      if (!allowed.count(k)) throw DomainError("unknown parameter '" + k + "'");
      if (!kv.emplace(k, trim(item.substr(eq + 1))).second) throw DomainError("duplicate parameter '" + k + "'");
    }
  }
  return {trim(t.substr(0, colon)), kv};
}

inline const std::string& require(const std::map<std::string, std::string>& kv, const std::string& k) {
  const auto it = kv.find(k);
  if (it == kv.end()) throw DomainError("missing parameter '" + k + "'");
  return it->second;
}

inline WeightFunction parse_weight(std::string_view text) {
  const std::string t = trim(text);
  const auto kind = t.substr(0, t.find(':'));
  if (kind == "gaussian") {
    const auto [k, kv] = parse_tagged(t, {"alpha"});
    return WeightFunction::gaussian(parse_real(require(kv, "alpha")));
  }
  if (kind == "fock_sobolev") {
    const auto [k, kv] = parse_tagged(t, {"beta"});
    return WeightFunction::fock_sobolev(parse_real(require(kv, "beta")));
  }
  if (kind == "gaussian_poly") {
    const auto [k, kv] = parse_tagged(t, {"alpha", "m"});
    return WeightFunction::gaussian_poly(parse_real(require(kv, "alpha")),
                                         static_cast<int>(parse_integer(require(kv, "m"))));
  }
  throw DomainError("unknown weight kind '" + kind + "'");
}

inline EntireSymbol parse_symbol(std::string_view text) {
  const std::string t = trim(text);
  if (t.rfind("poly:", 0) != 0) throw DomainError("symbol must have the form poly:c0,c1,...");
  std::vector<cplx> c;
  for (const auto& item : split(t.substr(5), ',')) c.push_back(parse_complex(item));
  return EntireSymbol(std::move(c));
}

inline AffineMap parse_affine(std::string_view text) {
  const auto [kind, kv] = parse_tagged(text, {"beta", "gamma"});
  if (kind != "affine") throw DomainError("map must have the form affine:beta=<c>,gamma=<c>");
  const cplx b = parse_complex(require(kv, "beta"));
  const auto g = kv.find("gamma");
  return AffineMap(b, g == kv.end() ? cplx{} : parse_complex(g->second));
}

inline SelfMap parse_map(std::string_view text) {
  const std::string t = trim(text);
  if (t.rfind("poly:", 0) == 0) return parse_symbol(t);
  return parse_affine(t);
}

inline std::vector<cplx> parse_complex_list(std::string_view text) {
  std::vector<cplx> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_complex(item));
  return out;
}

inline std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_real(item));
  return out;
}

struct RadialDensity {
  double r2 = 0.0, r1 = 0.0, log1p = 0.0, log = 0.0, constant = 0.0;
  double operator()(double r) const {
    double v = r2 * r * r + r1 * r + log1p * std::log1p(r) + constant;
    if (log != 0.0) v += log * std::log(r);
    return v;
  }
};

inline RadialDensity parse_density(std::string_view text) {
  const auto [kind, kv] = parse_tagged(text, {"r2", "r1", "log1p", "log", "const"});
  if (kind != "radial") throw DomainError("density must have the form radial:r2=..,r1=..,log1p=..,log=..,const=..");
  RadialDensity d;
  const auto get = [&](const char* k, double& out) {
    if (auto it = kv.find(k); it != kv.end()) out = parse_real(it->second);
  };
  get("r2", d.r2);
  get("r1", d.r1);
  get("log1p", d.log1p);
  get("log", d.log);
  get("const", d.constant);
  return d;
}

/// "z:m;z:m;..." with z a complex literal (d = 1) or a |-separated tuple.
inline std::vector<MeasureSpec::Atom> parse_atoms(std::string_view text) {
  std::vector<MeasureSpec::Atom> out;
  for (const auto& item : split(text, ';')) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw DomainError("atom must have the form <point>:<mass>");
    MeasureSpec::Atom a;
    for (const auto& c : split(item.substr(0, colon), '|')) a.z.push_back(parse_complex(c));
    a.mass = parse_real(item.substr(colon + 1));
    if (!(a.mass > 0.0)) throw DomainError("atom masses must be positive");
    out.push_back(std::move(a));
  }
  return out;
}

inline OperatorKind parse_operator_kind(std::string_view text) {
  const std::string t = trim(text);
  if (t == "V") return OperatorKind::volterra;
  if (t == "CV") return OperatorKind::composition_volterra;
  if (t == "Kg") return OperatorKind::companion;
  if (t == "K") return OperatorKind::companion_composed;
  if (t == "KT") return OperatorKind::companion_outer;
  if (t == "WC") return OperatorKind::weighted_composition;
  throw DomainError("unknown operator '" + t + "' (expected V, CV, Kg, K, KT, WC)");
}

inline bool parse_bool(std::string_view text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw DomainError("malformed boolean: '" + t + "'");
}

}  // namespace grammar

using grammar::parse_affine;
using grammar::parse_complex;
using grammar::parse_symbol;
using grammar::parse_weight;

enum class Command { weight_show, weight_associated, weight_essential, classify, carleson, verify, sweep, berezin_check };

inline std::optional<Command> command_from_string(std::string_view s) {
  static const std::pair<const char*, Command> table[] = {
      {"weight-show", Command::weight_show},       {"weight-associated", Command::weight_associated},
      {"weight-essential", Command::weight_essential}, {"classify", Command::classify},
      {"carleson", Command::carleson},             {"verify", Command::verify},
      {"sweep", Command::sweep},                   {"berezin-check", Command::berezin_check}};
  for (const auto& [name, c] : table)
    if (s == name) return c;
  return std::nullopt;
}

inline std::string to_string(Command c) {
  switch (c) {
    case Command::weight_show: return "weight-show";
    case Command::weight_associated: return "weight-associated";
    case Command::weight_essential: return "weight-essential";
    case Command::classify: return "classify";
    case Command::carleson: return "carleson";
    case Command::verify: return "verify";
    case Command::sweep: return "sweep";
    case Command::berezin_check: return "berezin-check";
  }
  return "?";
}

/// A validated flat configuration. Values are kept as trimmed text; typed
/// accessors re-parse them (validation has already succeeded).
class RunConfig {
 public:
  struct Entry {
    std::string value;
    std::string origin;  ///< "line N" or "override N"
  };

  Command command() const { return *command_from_string(get("command")); }
  bool has(const std::string& k) const { return entries_.count(k) != 0; }
  const std::string& get(const std::string& k) const {
    const auto it = entries_.find(k);
    if (it == entries_.end()) throw DomainError("missing key: " + k);
    return it->second.value;
  }
  std::string get_or(const std::string& k, const std::string& dflt) const { return has(k) ? get(k) : dflt; }
  double real_or(const std::string& k, double dflt) const { return has(k) ? grammar::parse_real(get(k)) : dflt; }
  long long int_or(const std::string& k, long long dflt) const {
    return has(k) ? grammar::parse_integer(get(k)) : dflt;
  }
  bool bool_or(const std::string& k, bool dflt) const { return has(k) ? grammar::parse_bool(get(k)) : dflt; }
  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

  /// Keys in canonical order: command first, the rest sorted.
  std::vector<std::string> canonical_keys() const {
    std::vector<std::string> keys;
    if (has("command")) keys.push_back("command");
    for (const auto& [k, e] : entries_)
      if (k != "command") keys.push_back(k);
    return keys;
  }

  /// Canonical text: one key=value per line in canonical order.
  std::string serialize() const {
    std::string out;
    for (const auto& k : canonical_keys()) out += k + "=" + get(k) + "\n";
    return out;
  }

  // Typed views.
  WeightFunction weight() const { return parse_weight(get("weight")); }
  EntireSymbol g() const { return parse_symbol(get("g")); }
  SelfMap phi() const { return has("phi") ? grammar::parse_map(get("phi")) : SelfMap(AffineMap::identity()); }
  OperatorKind op() const { return grammar::parse_operator_kind(get("op")); }

  QuadratureOptions quadrature(QuadratureOptions o) const {
    o.r_cap = real_or("r_cap", o.r_cap);
    o.theta_nodes = static_cast<int>(int_or("theta_nodes", o.theta_nodes));
    o.scan_points = static_cast<int>(int_or("scan_points", o.scan_points));
    o.fit_points = static_cast<int>(int_or("fit_points", o.fit_points));
    o.a_margin = real_or("a_margin", o.a_margin);
    o.b_margin = real_or("b_margin", o.b_margin);
    o.kappa_band = real_or("kappa_band", o.kappa_band);
    return o;
  }

  ClassifyOptions classify_options() const {
    ClassifyOptions o;
    const std::string p = get_or("path", "auto");
    o.path = p == "symbolic" ? PathChoice::symbolic : p == "numeric" ? PathChoice::numeric : PathChoice::automatic;
    o.quad = quadrature(o.quad);
    return o;
  }

  OperatorSpec operator_spec() const {
    OperatorSpec s;
    s.kind = op();
    s.g = g();
    s.d = s.g.dimension();
    s.phi = phi();
    if (has("weight")) s.source = weight();
    else if (s.kind == OperatorKind::companion_composed || s.kind == OperatorKind::companion_outer ||
             s.kind == OperatorKind::companion)
      s.source = WeightFunction::gaussian(real_or("alpha", 1.0));
    s.alpha = real_or("alpha", 1.0);
    s.q = real_or("q", 2.0);
    return s;
  }

 private:
  friend RunConfig parse_config(std::string_view, const std::vector<std::string>&);
  std::map<std::string, Entry> entries_;
};

namespace detail {

struct KeyRule {
  const char* key;
  void (*check)(const std::string&);
};

inline void check_positive_real(const std::string& v) {
  const double x = grammar::parse_real(v);
  if (!(x > 0.0)) throw DomainError("value must be positive");
}
inline void check_real(const std::string& v) { grammar::parse_real(v); }
inline void check_q(const std::string& v) {
  const double x = grammar::parse_real(v);
  if (!(x > 0.0)) throw DomainError("q must lie in (0, inf]");
}
inline void check_alpha(const std::string& v) {
  const double x = grammar::parse_real(v);
  if (!(x > 0.0) || std::isinf(x)) throw DomainError("alpha must be positive");
}
inline void check_command(const std::string& v) {
  if (!command_from_string(v)) throw DomainError("unknown command '" + v + "'");
}
inline void check_op(const std::string& v) { grammar::parse_operator_kind(v); }
inline void check_weight(const std::string& v) { parse_weight(v); }
inline void check_symbol(const std::string& v) { parse_symbol(v); }
inline void check_map(const std::string& v) { grammar::parse_map(v); }
inline void check_n_max(const std::string& v) {
  const auto n = grammar::parse_integer(v);
  if (n < 0 || n > 1024) throw DomainError("n_max must lie in [0, 1024]");
}
inline void check_r_cap(const std::string& v) {
  const double x = grammar::parse_real(v);
  if (!(x > 0.0) || x > 1e6) throw DomainError("r_cap must lie in (0, 1e6]");
}
inline void check_count(const std::string& v) {
  const auto n = grammar::parse_integer(v);
  if (n < 16 || n > 100000) throw DomainError("count must lie in [16, 100000]");
}
inline void check_samples(const std::string& v) {
  const auto n = grammar::parse_integer(v);
  if (n < 10 || n > 1000000) throw DomainError("samples must lie in [10, 1e6]");
}
inline void check_points(const std::string& v) {
  const auto n = grammar::parse_integer(v);
  if (n < 2 || n > 100000) throw DomainError("points must lie in [2, 100000]");
}
inline void check_dim(const std::string& v) {
  const auto n = grammar::parse_integer(v);
  if (n < 1 || n > 16) throw DomainError("d must lie in [1, 16]");
}
inline void check_path(const std::string& v) {
  if (v != "auto" && v != "symbolic" && v != "numeric") throw DomainError("path must be auto, symbolic or numeric");
}
inline void check_target(const std::string& v) {
  if (v != "fock" && v != "sup") throw DomainError("target must be fock or sup");
}
inline void check_norm(const std::string& v) {
  if (v != "direct" && v != "derivative") throw DomainError("norm must be direct or derivative");
}
inline void check_family(const std::string& v) {
  if (v != "auto" && v != "kernel" && v != "frame") throw DomainError("family must be auto, kernel or frame");
}
inline void check_sweep_param(const std::string& v) {
  if (v != "beta" && v != "gamma" && v != "q" && v != "alpha")
    throw DomainError("sweep_param must be beta, gamma, q or alpha");
}
inline void check_complex_list(const std::string& v) { grammar::parse_complex_list(v); }
inline void check_real_list(const std::string& v) {
  for (double x : grammar::parse_real_list(v))
    if (!std::isfinite(x)) throw DomainError("list values must be finite");
}
inline void check_bool(const std::string& v) { grammar::parse_bool(v); }
inline void check_density(const std::string& v) { grammar::parse_density(v); }
inline void check_atoms(const std::string& v) { grammar::parse_atoms(v); }
inline void check_margin(const std::string& v) {
  const double x = grammar::parse_real(v);
  if (!(x >= 0.0) || std::isinf(x)) throw DomainError("margin must be finite and non-negative");
}
inline void check_text(const std::string&) {}

inline const std::vector<KeyRule>& key_rules() {
  static const std::vector<KeyRule> rules = {
      {"command", check_command},   {"op", check_op},
      {"weight", check_weight},     {"g", check_symbol},
      {"phi", check_map},           {"alpha", check_alpha},
      {"q", check_q},               {"d", check_dim},
      {"target", check_target},     {"target_weight", check_weight},
      {"path", check_path},         {"a_margin", check_margin},
      {"b_margin", check_margin},   {"kappa_band", check_margin},
      {"n_max", check_n_max},       {"r_cap", check_r_cap},
      {"theta_nodes", check_count}, {"scan_points", check_count},
      {"fit_points", check_count},  {"r_max", check_positive_real},
      {"points", check_points},     {"x_start", check_real},
      {"x_end", check_real},        {"samples", check_samples},
      {"atoms", check_atoms},       {"density", check_density},
      {"w_grid", check_complex_list}, {"u_grid", check_complex_list},
      {"z_grid", check_complex_list}, {"norm", check_norm},
      {"family", check_family},     {"sweep_param", check_sweep_param},
      {"sweep_grid", check_real_list}, {"empirical", check_bool},
      {"timings", check_bool},      {"out", check_text},
      {"csv", check_text},
  };
  return rules;
}

inline std::vector<std::string> required_keys(Command c, const std::map<std::string, RunConfig::Entry>& e) {
  switch (c) {
    case Command::weight_show:
    case Command::weight_associated:
    case Command::weight_essential: return {"weight"};
    case Command::classify: {
      std::vector<std::string> k{"op", "g", "alpha", "q"};
      const auto it = e.find("op");
      const bool companion = it != e.end() && (it->second.value == "K" || it->second.value == "KT" || it->second.value == "Kg");
      const bool sup = e.count("target") && e.at("target").value == "sup";
      if (!companion) k.push_back("weight");
      if (sup) {
        k = {"op", "g", "weight", "target_weight"};
      }
      return k;
    }
    case Command::carleson: return {"weight", "q"};
    case Command::verify: return {"op", "g", "weight", "alpha", "q"};
    case Command::sweep: return {"op", "g", "weight", "alpha", "q", "sweep_param", "sweep_grid"};
    case Command::berezin_check: return {"alpha", "q"};
  }
  return {};
}

}  // namespace detail

/// Parses flat key=value text ('#' starts a comment), then applies
/// command-line overrides "key=value" in order. Reports all errors at once.
inline RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {}) {
  RunConfig cfg;
  std::vector<std::string> errors;
  const auto& rules = detail::key_rules();
  const auto rule_for = [&](const std::string& k) -> const detail::KeyRule* {
    for (const auto& r : rules)
      if (k == r.key) return &r;
    return nullptr;
  };
  const auto ingest = [&](const std::string& raw, const std::string& where, bool allow_replace) {
    std::string line = raw;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = grammar::trim(line);
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + ": expected key=value");
      return;
    }
    const std::string key = grammar::trim(line.substr(0, eq));
    const std::string value = grammar::trim(line.substr(eq + 1));
    const auto* rule = rule_for(key);
    if (!rule) {
      errors.push_back(where + ": unknown key: " + key);
      return;
    }
    if (!allow_replace && cfg.entries_.count(key)) {
      errors.push_back(where + ": duplicate key: " + key);
      return;
    }
    try {
      rule->check(value);
    } catch (const Error& e) {
      errors.push_back(where + ": " + e.what());
      return;
    }
    cfg.entries_[key] = {value, where};
  };

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const auto piece = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    ++line_no;
    ingest(std::string(piece), "line " + std::to_string(line_no), false);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  for (std::size_t i = 0; i < overrides.size(); ++i) ingest(overrides[i], "override " + std::to_string(i + 1), true);

  if (!cfg.has("command")) {
    errors.push_back("missing key: command");
  } else if (const auto c = command_from_string(cfg.get("command"))) {
    for (const auto& k : detail::required_keys(*c, cfg.entries_))
      if (!cfg.has(k)) errors.push_back("missing key: " + k);
    if (*c == Command::carleson && !cfg.has("atoms") && !cfg.has("density"))
      errors.push_back("missing key: atoms or density");
    if (errors.empty()) {
      // Cross-field checks.
      try {
        if (cfg.has("g") && cfg.has("phi")) {
          const int dg = parse_symbol(cfg.get("g")).dimension();
          if (dimension(cfg.phi()) != dg) throw DimensionError("phi and g have different dimensions");
        }
        if (cfg.has("x_start") && cfg.has("x_end") && !(cfg.real_or("x_end", 0) > cfg.real_or("x_start", 0)))
          throw DomainError("x_end must exceed x_start");
      } catch (const Error& e) {
        errors.push_back(e.what());
      }
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

}  // namespace fockop
