#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "unb/analytic.hpp"
#include "unb/optimize.hpp"
#include "unb/simulate.hpp"

namespace unb::cli {
namespace {

struct VariableName {
  Variable var;
  const char* name;
};

constexpr VariableName kVariables[] = {
    {Variable::TauDb, "tau_db"},
    {Variable::Bands, "m"},
    {Variable::Repetitions, "n"},
    {Variable::Gamma, "gamma"},
    {Variable::DeviceDensity, "lambda_iot"},
    {Variable::DevicesPerBs, "lambda_iot_per_bs"},
    {Variable::IncumbentDensity, "lambda_i"},
    {Variable::IncumbentPerBs, "lambda_i_per_bs"},
};

int as_integer(double x, const char* what) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9) throw std::invalid_argument(std::string(what) + " must be an integer");
  return static_cast<int>(r);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

Scenario scenario_of(const ExperimentConfig& cfg, const NamedProtocol& proto) {
  return scenario_for(make_scenario(cfg.net, cfg.inc), proto);
}

ProtocolSpec spec_for(const ExperimentConfig& cfg, const NamedProtocol& proto, int bands) {
  ProtocolSpec spec = proto.spec;
  if (cfg.proto.band_probs.size() == static_cast<std::size_t>(bands)) {
    spec.band_probs = cfg.proto.band_probs;
  }
  return spec;
}

bool uniform_probs(const ProtocolSpec& spec, int bands) {
  for (double p : spec.band_probs) {
    if (std::abs(p - 1.0 / bands) > 1e-12) return false;
  }
  return true;
}

struct CapacityValue {
  analytic::Capacity cap;
  bool closed_form = true;
};

CapacityValue capacity(double gamma, const Scenario& sc, const ProtocolSpec& spec) {
  const bool random = spec.hopping == Hopping::Random;
  if (random && spec.protocol == Protocol::NearestBS && sc.net.repetitions == 1) {
    return {analytic::tc_nearest(gamma, sc)};
  }
  if (random && (spec.protocol == Protocol::NoAssociation ||
                 spec.protocol == Protocol::BenchmarkMultiband)) {
    return {analytic::tc_no_assoc(gamma, sc)};
  }
  if (random && spec.protocol == Protocol::BandConstrained && uniform_probs(spec, sc.net.bands)) {
    const auto& terms = sc.derived.band_incumbent_terms;
    const bool homogeneous = std::adjacent_find(terms.begin(), terms.end(), std::not_equal_to<>()) == terms.end();
    if (sc.inc.kind == IncumbentKind::TypeI || homogeneous) {
      return {analytic::tc_band_constrained(gamma, sc)};
    }
  }
  return {analytic::tc_numeric(gamma, sc, spec), false};
}

class Csv {
 public:
  explicit Csv(std::ostream& out) : out_(out) {}
  Csv& header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      if (!first) out_ << ',';
      out_ << c;
      first = false;
    }
    out_ << '\n';
    return *this;
  }
  template <typename... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((emit(cells, first)), ...);
    out_ << '\n';
  }

 private:
  void emit(double v, bool& first) { emit(format_number(v), first); }
  void emit(int v, bool& first) { emit(std::to_string(v), first); }
  void emit(std::int64_t v, bool& first) { emit(std::to_string(v), first); }
  void emit(const char* v, bool& first) { emit(std::string(v), first); }
  void emit(const std::string& v, bool& first) {
    if (!first) out_ << ',';
    first = false;
    if (v.find_first_of(",\"\n") == std::string::npos) {
      out_ << v;
      return;
    }
    out_ << '"';
    for (char c : v) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }
  std::ostream& out_;
};

std::string variable_name(const SweepSpec& sweep) {
  return sweep.variable ? to_string(*sweep.variable) : "none";
}

std::vector<double> sweep_values(const SweepSpec& sweep) {
  if (!sweep.variable) return {0.0};
  return sweep.values;
}

ExperimentConfig point(const ExperimentConfig& cfg, const SweepSpec& sweep, double x) {
  return sweep.variable ? apply(cfg, *sweep.variable, x) : cfg;
}

double quantile(std::vector<double> samples, double q) {
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  idx = std::clamp<std::size_t>(idx, 1, n) - 1;
  return samples[idx];
}

double to_db(double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return linear_to_db(x);
}

}  // namespace

Variable parse_variable(const std::string& name) {
  for (const auto& v : kVariables) {
    if (name == v.name) return v.var;
  }
  throw std::invalid_argument("unknown sweep variable '" + name + "'");
}

const char* to_string(Variable v) {
  for (const auto& e : kVariables) {
    if (e.var == v) return e.name;
  }
  return "?";
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
    const double start = parse_double(parts[0]);
    const double stop = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 1'000'000) throw std::invalid_argument("range has too many points");
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  }
  if (out.empty()) throw std::invalid_argument("range is empty");
  return out;
}

SweepSpec make_sweep(const ExperimentConfig& cfg, const std::string& variable,
                     const std::string& range, const std::vector<std::string>& protocols) {
  SweepSpec s;
  if (variable.empty() != range.empty()) {
    throw std::invalid_argument("--var and --range must be given together");
  }
  if (!variable.empty()) {
    s.variable = parse_variable(variable);
    s.values = parse_range(range);
  }
  if (protocols.empty()) {
    NamedProtocol p = parse_protocol(cfg.protocol_name);
    p.spec = cfg.proto;
    s.protocols.push_back(p);
  } else {
    for (const auto& name : protocols) s.protocols.push_back(parse_protocol(name));
  }
  return s;
}

ExperimentConfig apply(const ExperimentConfig& cfg, Variable var, double x) {
  ExperimentConfig out = cfg;
  auto& net = out.net;
  const double activity = net.packets_per_period * net.tx_duration_s / net.period_s;
  auto set_incumbents = [&](double density) {
    if (out.inc.kind == IncumbentKind::TypeI) {
      out.inc.wideband.density = density;
    } else {
      for (auto& band : out.inc.per_band) band.density = density;
    }
  };
  switch (var) {
    case Variable::TauDb: net.sinr_threshold = db_to_linear(x); break;
    case Variable::Bands: {
      net.bands = as_integer(x, "m");
      if (net.bands < 1) throw std::invalid_argument("m must be positive");
      if (out.inc.kind == IncumbentKind::TypeII && !out.inc.per_band.empty()) {
        out.inc.per_band.resize(net.bands, out.inc.per_band.back());
      }
      if (out.proto.band_probs.size() != static_cast<std::size_t>(net.bands)) out.proto.band_probs.clear();
      break;
    }
    case Variable::Repetitions: net.repetitions = as_integer(x, "n"); break;
    case Variable::Gamma: out.gamma = x; break;
    case Variable::DeviceDensity: net.device_density = x; break;
    case Variable::DevicesPerBs: net.device_density = x * net.bs_density; break;
    case Variable::IncumbentDensity: set_incumbents(x); break;
    case Variable::IncumbentPerBs: set_incumbents(x * activity * net.bs_density); break;
  }
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

int cmd_analytic(const ExperimentConfig& cfg, const SweepSpec& sweep, const AnalyticOptions& opts,
                 std::ostream& out, std::ostream& err) {
  Csv csv(out);
  csv.header({"variable", "x", "protocol", "metric", "y", "method", "flags"});
  const std::string var = variable_name(sweep);
  const bool capacity_sweep = sweep.variable == Variable::Gamma;
  try {
    for (double x : sweep_values(sweep)) {
      const ExperimentConfig at = point(cfg, sweep, x);
      for (const auto& proto : sweep.protocols) {
        const Scenario sc = scenario_of(at, proto);
        const ProtocolSpec spec = spec_for(at, proto, sc.net.bands);
        if (capacity_sweep) {
          const auto c = capacity(at.gamma, sc, spec);
          const char* method = c.closed_form ? "analytic" : "analytic-numeric";
          const std::string flags = c.cap.clamped ? "clamped" : "";
          csv.row(var, x, proto.name, "capacity", c.cap.density, method, flags);
          if (sc.net.bs_density > 0.0) {
            csv.row(var, x, proto.name, "capacity_per_bs", c.cap.density / sc.net.bs_density, method, flags);
          }
          continue;
        }
        const auto ps = analytic::success_probability(sc, spec);
        csv.row(var, x, proto.name, "ps", ps.value, "analytic", ps.degenerate ? "degenerate" : "");
        const bool quadrature_ok = spec.hopping == Hopping::Random &&
                                   (spec.protocol == Protocol::NearestBS ||
                                    spec.protocol == Protocol::NoAssociation ||
                                    spec.protocol == Protocol::BenchmarkMultiband);
        if (opts.exact_noise && quadrature_ok) {
          const auto q = analytic::ps_exact_with_noise(
              sc, spec.protocol == Protocol::NearestBS ? Protocol::NearestBS : Protocol::NoAssociation);
          csv.row(var, x, proto.name, "ps_noise", q.value, "quadrature", q.converged ? "" : "unconverged");
        }
      }
    }
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, const SweepSpec& sweep, const SimulateOptions& opts,
                 std::ostream& out, std::ostream& err) {
  if (sweep.variable == Variable::Gamma) {
    err << "error: gamma sweeps apply to capacity and are analytic only\n";
    return 2;
  }
  Csv csv(out);
  csv.header({"variable", "x", "protocol", "metric", "y", "wilson_lo", "wilson_hi", "realizations",
              "method", "flags"});
  const std::string var = variable_name(sweep);
  auto emit_quantiles = [&](const std::string& name, const std::vector<double>& samples) {
    for (double q : opts.sinr_quantiles) {
      csv.row("quantile", q, name, "sinr_db", to_db(quantile(samples, q)), "", "",
              static_cast<std::int64_t>(samples.size()), "mc", "");
    }
  };
  try {
    for (const auto& proto : sweep.protocols) {
      auto emit = [&](double x, const sim::SuccessEstimate& e) {
        const std::string flags = e.no_station > 0 ? "no_station=" + std::to_string(e.no_station) : "";
        csv.row(var, x, proto.name, "ps", e.p_hat, e.wilson_lo, e.wilson_hi, e.realizations, "mc", flags);
      };
      if (sweep.variable == Variable::TauDb) {
        // One run covers the whole threshold curve through the best-SINR samples.
        const Scenario sc = scenario_of(cfg, proto);
        sim::SimConfig sim = cfg.sim;
        sim.record_sinr = true;
        const auto base = sim::run(sc, spec_for(cfg, proto, sc.net.bands), sim);
        for (double x : sweep.values) {
          auto e = sim::estimate_at(base.max_sinr, db_to_linear(x));
          e.no_station = base.no_station;
          emit(x, e);
        }
        emit_quantiles(proto.name, base.max_sinr);
        continue;
      }
      for (double x : sweep_values(sweep)) {
        const ExperimentConfig at = point(cfg, sweep, x);
        const Scenario sc = scenario_of(at, proto);
        sim::SimConfig sim = at.sim;
        sim.record_sinr = !opts.sinr_quantiles.empty();
        const auto e = sim::run(sc, spec_for(at, proto, sc.net.bands), sim);
        emit(x, e);
        if (!e.max_sinr.empty()) emit_quantiles(proto.name, e.max_sinr);
      }
    }
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep, std::ostream& out,
              std::ostream& err) {
  if (sweep.variable == Variable::Gamma) {
    err << "error: gamma sweeps apply to capacity and are analytic only\n";
    return 2;
  }
  Csv csv(out);
  csv.header({"variable", "x", "protocol", "analytic", "mc", "wilson_lo", "wilson_hi", "abs_diff"});
  const std::string var = variable_name(sweep);
  try {
    for (const auto& proto : sweep.protocols) {
      std::vector<double> samples;
      if (sweep.variable == Variable::TauDb) {
        const Scenario sc = scenario_of(cfg, proto);
        sim::SimConfig sim = cfg.sim;
        sim.record_sinr = true;
        samples = sim::run(sc, spec_for(cfg, proto, sc.net.bands), sim).max_sinr;
      }
      for (double x : sweep_values(sweep)) {
        const ExperimentConfig at = point(cfg, sweep, x);
        const Scenario sc = scenario_of(at, proto);
        const ProtocolSpec spec = spec_for(at, proto, sc.net.bands);
        const double a = analytic::success_probability(sc, spec).value;
        const auto e = samples.empty() ? sim::run(sc, spec, at.sim)
                                       : sim::estimate_at(samples, sc.net.sinr_threshold);
        csv.row(var, x, proto.name, a, e.p_hat, e.wilson_lo, e.wilson_hi, std::abs(a - e.p_hat));
      }
    }
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}

int cmd_optimize(const ExperimentConfig& cfg, const SweepSpec& sweep, std::ostream& out,
                 std::ostream& err) {
  Csv csv(out);
  csv.header({"variable", "x", "quantity", "index", "value"});
  const std::string var = variable_name(sweep);
  int status = 0;
  for (double x : sweep_values(sweep)) {
    try {
      const ExperimentConfig at = point(cfg, sweep, x);
      const Scenario sc = make_scenario(at.net, at.inc);
      try {
        const auto choice = optimize::optimal_repetitions(sc, at.n_max);
        csv.row(var, x, "n_star", "", choice.repetitions);
        csv.row(var, x, "n_star_saturated", "", choice.saturated ? 1 : 0);
        csv.row(var, x, "repetition_ratio", "", choice.ratio);
      } catch (const std::domain_error& ex) {
        if (sc.derived.incumbent_term > 0.0) throw;
        // No interference of either kind: a single transmission suffices.
        csv.row(var, x, "n_star", "", 1);
        csv.row(var, x, "n_star_saturated", "", 0);
      }

      NetworkConfig single = at.net;
      single.repetitions = 1;
      const Scenario one = with_net(sc, single);
      csv.row(var, x, "epsilon", "", at.epsilon);
      csv.row(var, x, "resource_nearest", "", optimize::min_resource_product(at.epsilon, one, Protocol::NearestBS));
      csv.row(var, x, "resource_no_assoc", "", optimize::min_resource_product(at.epsilon, one, Protocol::NoAssociation));
      csv.row(var, x, "bs_density_reduction", "", optimize::bs_density_reduction(at.epsilon));

      const auto bc = optimize::optimize_band_constrained(optimize::band_costs(sc));
      for (std::size_t m = 0; m < bc.p.size(); ++m) {
        csv.row(var, x, "p_band_constrained", static_cast<int>(m), bc.p[m]);
      }
      csv.row(var, x, "kkt_band_constrained", "", bc.kkt_residual);
      const auto bh = optimize::optimize_band_hopped(sc);
      for (std::size_t m = 0; m < bh.p.size(); ++m) {
        csv.row(var, x, "p_band_hopped", static_cast<int>(m), bh.p[m]);
      }
      csv.row(var, x, "kkt_band_hopped", "", bh.kkt_residual);
      csv.row(var, x, "converged_band_hopped", "", bh.converged ? 1 : 0);
      if (!bh.converged) {
        err << "warning: band-hopped optimizer stopped after " << bh.iterations
            << " iterations with gradient-mapping norm " << format_number(bh.kkt_residual) << '\n';
      }
    } catch (const ConfigError& ex) {
      err << "error: " << ex.what() << '\n';
      return 2;
    } catch (const std::exception& ex) {
      err << "error at " << var << "=" << format_number(x) << ": " << ex.what() << '\n';
      status = 1;
    }
  }
  return status;
}

}  // namespace unb::cli
