#include "unb/config_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace unb {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::optional<double> number(const std::string& key) {
    auto it = find(key);
    if (!it) return std::nullopt;
    return parse_number(key, *it);
  }

  std::optional<long long> integer(const std::string& key) {
    auto it = find(key);
    if (!it) return std::nullopt;
    long long v = 0;
    const auto& s = it->value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail(*it, key, "expected an integer");
      return std::nullopt;
    }
    return v;
  }

  std::optional<std::vector<double>> list(const std::string& key) {
    auto it = find(key);
    if (!it) return std::nullopt;
    std::vector<double> out;
    std::stringstream ss(it->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      Entry e{trim(item), it->line};
      auto v = parse_number(key, e);
      if (!v) return std::nullopt;
      out.push_back(*v);
    }
    if (out.empty()) fail(*it, key, "expected a comma-separated list");
    return out;
  }

  std::optional<std::string> text(const std::string& key) {
    auto it = find(key);
    if (!it) return std::nullopt;
    return it->value;
  }

  std::optional<bool> boolean(const std::string& key) {
    auto it = find(key);
    if (!it) return std::nullopt;
    if (it->value == "true" || it->value == "1" || it->value == "yes") return true;
    if (it->value == "false" || it->value == "0" || it->value == "no") return false;
    fail(*it, key, "expected true or false");
    return std::nullopt;
  }

  void reject(const std::string& key, const std::string& message) {
    const auto& e = entries_.at(key);
    fail(e, key, message);
  }

  /// Reports keys never read.
  void finish() {
    for (const auto& [key, e] : entries_) {
      if (!used_.count(key)) fail(e, key, "unknown key");
    }
    if (!errors_.empty()) throw ConfigError(errors_);
  }

 private:
  const Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  std::optional<double> parse_number(const std::string& key, const Entry& e) {
    double v = 0.0;
    const auto& s = e.value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail(e, key, "expected a number");
      return std::nullopt;
    }
    return v;
  }

  void fail(const Entry& e, const std::string& key, const std::string& message) {
    std::ostringstream os;
    os << source_ << ":" << e.line << ": " << key << ": " << message;
    errors_.push_back(os.str());
  }

  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
  std::string source_;
  std::vector<std::string> errors_;
};

// Returns the value given either directly or through the dB variant.
std::optional<double> either(Reader& r, const std::string& linear, const std::string& db,
                             double (*convert)(double)) {
  auto a = r.number(linear);
  auto b = r.number(db);
  if (a && b) r.reject(db, "given together with " + linear);
  if (b) return convert(*b);
  return a;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::vector<std::string> syntax;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      syntax.push_back(source + ":" + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (key == "B") key = "big_b";
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty()) {
      syntax.push_back(source + ":" + std::to_string(line_no) + ": empty key or value");
      continue;
    }
    if (!entries.emplace(key, Entry{value, line_no}).second) {
      syntax.push_back(source + ":" + std::to_string(line_no) + ": duplicate key " + key);
    }
  }
  if (!syntax.empty()) throw ConfigError(syntax);

  Reader r(std::move(entries), source);
  ExperimentConfig cfg;
  auto& net = cfg.net;
  auto set = [](auto& field, auto opt) {
    if (opt) field = static_cast<std::remove_reference_t<decltype(field)>>(*opt);
  };

  set(net.signal_bw_hz, r.number("b"));
  set(net.band_bw_hz, r.number("big_b"));
  set(net.bands, r.integer("m"));
  set(net.repetitions, r.integer("n"));
  set(net.packets_per_period, r.integer("k"));
  set(net.tx_duration_s, r.number("t"));
  set(net.period_s, r.number("t_tot"));
  set(net.tx_power_w, either(r, "p_iot", "p_iot_dbm", dbm_to_watts));
  set(net.noise_power_w, either(r, "p_n", "p_n_dbm", dbm_to_watts));
  set(net.bs_density, r.number("lambda_b"));
  set(net.path_loss_exp, r.number("alpha"));
  set(net.sinr_threshold, either(r, "tau", "tau_db", db_to_linear));
  set(net.beta_time, r.number("beta_t"));
  set(net.beta_freq, r.number("beta_f"));
  set(net.center_freq_hz, r.number("f_c"));

  const double activity = net.packets_per_period * net.tx_duration_s / net.period_s;
  {
    auto direct = r.number("lambda_iot");
    auto per_bs = r.number("lambda_iot_per_bs");
    if (direct && per_bs) r.reject("lambda_iot_per_bs", "given together with lambda_iot");
    if (per_bs) net.device_density = *per_bs * net.bs_density;
    if (direct) net.device_density = *direct;
  }

  // Incumbent densities per BS follow the effective-active convention:
  // devices_per_bs * lambda_T * lambda_B.
  auto inc_density = [&](const std::string& direct_key, const std::string& per_bs_key)
      -> std::optional<std::vector<double>> {
    auto direct = r.list(direct_key);
    auto per_bs = r.list(per_bs_key);
    if (direct && per_bs) r.reject(per_bs_key, "given together with " + direct_key);
    if (per_bs) {
      for (double& v : *per_bs) v *= activity * net.bs_density;
      return per_bs;
    }
    return direct;
  };

  auto& inc = cfg.inc;
  if (auto kind = r.text("incumbent_type")) {
    if (*kind == "I" || *kind == "1" || *kind == "type1") {
      inc.kind = IncumbentKind::TypeI;
    } else if (*kind == "II" || *kind == "2" || *kind == "type2") {
      inc.kind = IncumbentKind::TypeII;
    } else {
      r.reject("incumbent_type", "expected I or II");
    }
  }
  set(inc.tx_power_w, either(r, "p_i", "p_i_dbm", dbm_to_watts));
  set(inc.wideband.bandwidth_hz, r.number("b_i0"));
  if (auto d = inc_density("lambda_i0", "lambda_i0_per_bs")) {
    if (d->size() != 1) r.reject(r.has("lambda_i0") ? "lambda_i0" : "lambda_i0_per_bs", "expected one value");
    inc.wideband.density = d->front();
  }
  auto widths = r.list("b_im");
  auto densities = inc_density("lambda_im", "lambda_im_per_bs");
  if (inc.kind == IncumbentKind::TypeII) {
    const std::size_t count = densities ? densities->size() : (widths ? widths->size() : 0);
    for (std::size_t m = 0; m < count; ++m) {
      IncumbentBand band{125e3, 0.0};
      if (widths && m < widths->size()) band.bandwidth_hz = (*widths)[m];
      if (densities && m < densities->size()) band.density = (*densities)[m];
      inc.per_band.push_back(band);
    }
    if (widths && densities && widths->size() != densities->size()) {
      r.reject("b_im", "b_im and lambda_im lengths differ");
    }
  } else if (widths || densities) {
    r.reject(widths ? "b_im" : (r.has("lambda_im") ? "lambda_im" : "lambda_im_per_bs"),
             "per-band incumbents need incumbent_type = II");
  }

  if (auto name = r.text("protocol")) {
    try {
      const auto named = parse_protocol(*name);
      cfg.proto = named.spec;
      cfg.protocol_name = named.name;
    } catch (const std::invalid_argument& ex) {
      r.reject("protocol", ex.what());
    }
  }
  if (auto h = r.text("hopping")) {
    if (*h == "random") {
      cfg.proto.hopping = Hopping::Random;
    } else if (*h == "pn") {
      cfg.proto.hopping = Hopping::PN;
    } else {
      r.reject("hopping", "expected random or pn");
    }
  }
  if (auto p = r.list("p")) cfg.proto.band_probs = *p;

  auto& sim = cfg.sim;
  set(sim.region_radius, r.number("region_radius"));
  set(sim.realizations, r.integer("realizations"));
  if (auto seed = r.integer("seed")) sim.seed = static_cast<std::uint64_t>(*seed);
  set(sim.noise_enabled, r.boolean("noise_enabled"));
  set(sim.workers, r.integer("workers"));
  auto slotting = [&](const std::string& key) -> std::optional<bool> {
    auto v = r.text(key);
    if (!v) return std::nullopt;
    if (*v == "slotted") return true;
    if (*v == "unslotted") return false;
    r.reject(key, "expected slotted or unslotted");
    return std::nullopt;
  };
  auto at = slotting("access_time");
  auto af = slotting("access_freq");
  if (at || af) {
    sim::AccessMode mode = sim::default_access(net);
    if (at) mode.slotted_time = *at;
    if (af) mode.slotted_freq = *af;
    sim.access = mode;
  }

  set(cfg.gamma, r.number("gamma"));
  set(cfg.epsilon, r.number("epsilon"));
  set(cfg.n_max, r.integer("n_max"));

  r.finish();
  if (auto v = validate(cfg.net, cfg.inc, cfg.proto); !v.empty()) throw ConfigError(std::move(v));
  if (sim.realizations < 1) throw ConfigError({"realizations must be at least 1"});
  if (sim.region_radius < 0.0) throw ConfigError({"region_radius must be non-negative"});
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path});
  return parse_config(in, path);
}

NamedProtocol parse_protocol(const std::string& name) {
  NamedProtocol out;
  out.name = name;
  std::string base = name;
  const std::string suffix = "-pn";
  if (base.size() > suffix.size() && base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0) {
    base.resize(base.size() - suffix.size());
    out.spec.hopping = Hopping::PN;
  }
  if (base == "nearest") {
    out.spec.protocol = Protocol::NearestBS;
  } else if (base == "no-assoc") {
    out.spec.protocol = Protocol::NoAssociation;
  } else if (base == "sigfox") {
    out.spec.protocol = Protocol::NoAssociation;
    out.single_band = true;
  } else if (base == "sigfox-nearest") {
    out.spec.protocol = Protocol::NearestBS;
    out.single_band = true;
  } else if (base == "benchmark") {
    out.spec.protocol = Protocol::BenchmarkMultiband;
  } else if (base == "band-constrained") {
    out.spec.protocol = Protocol::BandConstrained;
  } else if (base == "band-hopped") {
    out.spec.protocol = Protocol::BandHopped;
  } else {
    throw std::invalid_argument("unknown protocol '" + name + "'");
  }
  if (out.spec.hopping == Hopping::PN && out.spec.protocol != Protocol::NearestBS &&
      out.spec.protocol != Protocol::NoAssociation) {
    throw std::invalid_argument("protocol '" + name + "': PN hopping needs nearest or no-assoc");
  }
  return out;
}

Scenario scenario_for(const Scenario& sc, const NamedProtocol& proto) {
  return proto.single_band ? single_band(sc) : sc;
}

}  // namespace unb
