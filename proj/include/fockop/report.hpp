#pragma once

// Command execution and deterministic JSON / CSV reports.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fockop/classify.hpp"
#include "fockop/config.hpp"
#include "fockop/verify.hpp"
#include "fockop/weights.hpp"

namespace fockop {

/// Minimal ordered JSON writer: fields appear in insertion order, floats as
/// %.12e, non-finite floats as null.
class JsonWriter {
 public:
  JsonWriter& begin_object() { return open('{'); }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() { return open('['); }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(std::string_view k) {
    separator();
    write_string(k);
    out_ += ": ";
    pending_key_ = true;
    return *this;
  }
  JsonWriter& value(double x) {
    separator();
    if (std::isfinite(x)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12e", x);
      out_ += buf;
    } else {
      out_ += "null";
    }
    return *this;
  }
  JsonWriter& value(long long x) {
    separator();
    out_ += std::to_string(x);
    return *this;
  }
  JsonWriter& value(int x) { return value(static_cast<long long>(x)); }
  JsonWriter& value(bool x) {
    separator();
    out_ += x ? "true" : "false";
    return *this;
  }
  JsonWriter& value(std::string_view s) {
    separator();
    write_string(s);
    return *this;
  }
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& null() {
    separator();
    out_ += "null";
    return *this;
  }
  template <class T>
  JsonWriter& field(std::string_view k, const T& v) {
    key(k);
    return value(v);
  }

  std::string str() const { return out_ + "\n"; }

 private:
  JsonWriter& open(char c) {
    separator();
    out_ += c;
    first_.push_back(true);
    return *this;
  }
  JsonWriter& close(char c) {
    const bool empty = first_.back();
    first_.pop_back();
    if (!empty) {
      out_ += '\n';
      indent();
    }
    out_ += c;
    return *this;
  }
  void separator() {
    if (pending_key_) {
      pending_key_ = false;
      return;
    }
    if (first_.empty()) return;
    if (!first_.back()) out_ += ',';
    first_.back() = false;
    out_ += '\n';
    indent();
  }
  void indent() { out_.append(2 * first_.size(), ' '); }
  void write_string(std::string_view s) {
    out_ += '"';
    for (const char ch : s) {
      switch (ch) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(ch) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", ch);
            out_ += buf;
          } else {
            out_ += ch;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<bool> first_;
  bool pending_key_ = false;
};

inline void write_verdict(JsonWriter& j, const Verdict& v) {
  j.begin_object();
  j.field("status", to_string(v.status));
  j.field("criterion", v.criterion);
  j.field("path", to_string(v.path));
  j.field("a", v.a);
  j.field("b", v.b);
  j.field("kappa", v.kappa);
  j.field("log_integral", v.log_integral);
  j.field("compact_note", v.compact_note);
  j.end_object();
}

struct RunOutput {
  int exit_code = 0;
  std::string json;
  std::string csv;       ///< empty when the command has no plot data
  std::string message;   ///< error text for exit code 1
};

namespace detail {

inline bool decisive(Status s) { return s != Status::inconclusive; }

inline std::vector<double> linear_grid(double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = hi * i / (n - 1);
  return g;
}

}  // namespace detail

/// Executes a validated configuration. Exit codes: 0 decisive, 2 inconclusive,
/// 1 error. The caller writes json / csv where configured.
inline RunOutput run(const RunConfig& cfg) {
  RunOutput res;
  const auto t0 = std::chrono::steady_clock::now();
  JsonWriter j;
  j.begin_object();
  j.field("command", to_string(cfg.command()));
  j.key("inputs").begin_object();
  for (const auto& k : cfg.canonical_keys())
    if (k != "command" && k != "out" && k != "csv") j.field(k, cfg.get(k));
  j.end_object();

  std::string csv;
  int code = 0;
  try {
    switch (cfg.command()) {
      case Command::weight_show:
      case Command::weight_associated: {
        const WeightFunction w = cfg.weight();
        const auto n_max = cfg.int_or("n_max", 200);
        const AssociatedWeight env(w, n_max);
        const auto grid = detail::linear_grid(cfg.real_or("r_max", 10.0), static_cast<int>(cfg.int_or("points", 101)));
        j.key("weight_table").begin_array();
        csv = "r,omega,omega_tilde\n";
        for (double r : grid) {
          const double lw = w.log_value(r), le = env.log_value(r);
          j.begin_array().value(r).value(lw).value(le).end_array();
          csv += format_float(r) + "," + format_float(std::exp(lw)) + "," + format_float(std::exp(le)) + "\n";
        }
        j.end_array();
        if (cfg.command() == Command::weight_associated) {
          j.key("details").begin_object();
          j.field("n_max", static_cast<long long>(n_max));
          j.key("conjugates").begin_array();
          for (double c : env.conjugate_table()) j.value(c);
          j.end_array();
          j.end_object();
        }
        break;
      }
      case Command::weight_essential: {
        const auto rep = essentiality_test(cfg.weight(), cfg.real_or("x_start", 0.0), cfg.real_or("x_end", 30.0),
                                           static_cast<int>(cfg.int_or("samples", 1000)));
        const bool ok = rep.status == Essentiality::essential_certified;
        j.key("details").begin_object();
        j.field("status", ok ? "essential_certified" : "inconclusive");
        j.field("x_start", rep.x_start);
        j.field("x_end", rep.x_end);
        j.field("samples", rep.samples);
        j.field("min_second_derivative", rep.min_second_derivative);
        j.field("tail_non_decreasing", rep.tail_non_decreasing);
        j.end_object();
        code = ok ? 0 : 2;
        break;
      }
      case Command::classify: {
        const auto opt = cfg.classify_options();
        Verdict v;
        if (cfg.get_or("target", "fock") == "sup") {
          if (cfg.op() != OperatorKind::weighted_composition) throw DomainError("target=sup applies to op=WC");
          v = classify_weighted_comp(cfg.weight(), cfg.g(), cfg.phi(),
                                     CompositionTarget::weighted_sup(parse_weight(cfg.get("target_weight"))), opt);
        } else {
          v = classify(cfg.operator_spec(), opt);
        }
        j.key("verdict");
        write_verdict(j, v);
        code = detail::decisive(v.status) ? 0 : 2;
        break;
      }
      case Command::carleson: {
        MeasureSpec mu;
        mu.dimension = static_cast<int>(cfg.int_or("d", 1));
        if (cfg.has("atoms")) mu.atoms = grammar::parse_atoms(cfg.get("atoms"));
        if (cfg.has("density")) mu.log_density = grammar::parse_density(cfg.get("density"));
        const Verdict v = carleson_check(cfg.weight(), mu, cfg.real_or("q", 2.0), cfg.classify_options());
        j.key("verdict");
        write_verdict(j, v);
        code = detail::decisive(v.status) ? 0 : 2;
        break;
      }
      case Command::verify: {
        const OperatorSpec s = cfg.operator_spec();
        const Verdict v = classify(s, cfg.classify_options());
        VerifyOptions vo;
        vo.norm = cfg.get_or("norm", "direct") == "derivative" ? NormMethod::derivative : NormMethod::direct;
        const std::string fam = cfg.get_or("family", "auto");
        vo.family = fam == "kernel" ? TestFamily::kernel : fam == "frame" ? TestFamily::frame : TestFamily::automatic;
        const auto w_grid = cfg.has("w_grid") ? grammar::parse_complex_list(cfg.get("w_grid")) : default_w_grid();
        const auto lb = empirical_lower_bound(s, w_grid, vo);
        const double growth = lower_bound_growth(lb);
        const bool consistent = !(v.status == Status::bounded && growth > kConsistencyNats);
        j.key("verdict");
        write_verdict(j, v);
        j.key("details").begin_object();
        j.key("lower_bounds").begin_array();
        csv = "w_re,w_im,log_lower_bound\n";
        for (const auto& p : lb) {
          j.begin_object();
          j.field("w_re", p.w.real()).field("w_im", p.w.imag());
          j.field("log_value", p.log_value).field("degree", p.degree).field("skipped", p.skipped);
          if (!p.note.empty()) j.field("note", p.note);
          j.end_object();
          csv += format_float(p.w.real()) + "," + format_float(p.w.imag()) + "," + format_float(p.log_value) + "\n";
        }
        j.end_array();
        j.field("growth", growth);
        j.field("spread", lower_bound_spread(lb));
        j.field("consistent", consistent);
        j.end_object();
        if (!consistent) throw Error("bounded verdict contradicted by lower-bound growth");
        code = detail::decisive(v.status) ? 0 : 2;
        break;
      }
      case Command::sweep: {
        SweepPlan plan;
        plan.base = cfg.operator_spec();
        const std::string p = cfg.get("sweep_param");
        plan.parameter = p == "beta" ? SweepParameter::beta
                         : p == "gamma" ? SweepParameter::gamma
                         : p == "q"     ? SweepParameter::q
                                        : SweepParameter::alpha;
        plan.grid = grammar::parse_real_list(cfg.get("sweep_grid"));
        if (cfg.has("w_grid")) plan.w_grid = grammar::parse_complex_list(cfg.get("w_grid"));
        plan.classify = cfg.classify_options();
        plan.verify.norm = cfg.get_or("norm", "direct") == "derivative" ? NormMethod::derivative : NormMethod::direct;
        plan.empirical = cfg.bool_or("empirical", true);
        const auto rows = sweep(plan);
        csv = sweep_csv(rows);
        if (cfg.has("csv")) j.field("sweep_csv_path", cfg.get("csv"));
        j.key("details").begin_object();
        j.key("rows").begin_array();
        bool all_decisive = true;
        for (const auto& r : rows) {
          j.begin_object();
          j.field("param", r.parameter);
          j.key("verdict");
          write_verdict(j, r.verdict);
          j.field("max_lower_bound", r.max_lower_bound);
          j.field("growth", r.growth);
          j.field("consistent", r.consistent);
          if (!r.error.empty()) j.field("error", r.error);
          j.end_object();
          all_decisive = all_decisive && detail::decisive(r.verdict.status);
        }
        j.end_array();
        j.field("consistent", sweep_consistent(rows));
        j.end_object();
        if (!sweep_consistent(rows)) throw Error("sweep consistency invariant violated");
        code = all_decisive ? 0 : 2;
        break;
      }
      case Command::berezin_check: {
        const double alpha = cfg.real_or("alpha", 1.0), q = cfg.real_or("q", 2.0);
        const auto u_grid = cfg.has("u_grid") ? grammar::parse_complex_list(cfg.get("u_grid"))
                                              : std::vector<cplx>{0.0, 1.0, 2.0, 3.0};
        j.key("details").begin_object();
        j.key("reductions").begin_array();
        double worst = 0.0;
        for (const cplx u : u_grid) {
          const auto br = berezin_reduce(u, alpha, q);
          worst = std::max(worst, br.abs_log_error());
          j.begin_object();
          j.field("u_re", u.real()).field("u_im", u.imag());
          j.field("log_numeric", br.log_numeric).field("log_closed_form", br.log_closed_form);
          j.field("abs_log_error", br.abs_log_error());
          j.end_object();
        }
        j.end_array();
        j.field("max_abs_log_error", worst);
        if (cfg.has("g")) {
          const auto kind = cfg.has("op") ? cfg.op() : OperatorKind::volterra;
          const auto z_grid = cfg.has("z_grid") ? grammar::parse_complex_list(cfg.get("z_grid"))
                                                : std::vector<cplx>{0.5, 1.0, cplx(1.0, 1.0), 2.0};
          j.field("equivalence_deviation", berezin_equivalence_check(cfg.g(), cfg.phi(), alpha, q, z_grid, kind));
        }
        j.end_object();
        break;
      }
    }
  } catch (const std::exception& e) {
    code = 1;
    res.message = e.what();
    j.field("error", res.message);
  }
  if (cfg.bool_or("timings", false)) {
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    j.key("timings").begin_object().field("total_seconds", dt).end_object();
  } else {
    j.key("timings").null();
  }
  j.end_object();
  res.exit_code = code;
  res.json = j.str();
  res.csv = std::move(csv);
  return res;
}

}  // namespace fockop
