#include "unb/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace unb {
namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& s : v) os << "\n  - " << s;
  return os.str();
}

void check_network(const NetworkConfig& c, std::vector<std::string>& out) {
  auto need = [&out](bool ok, const char* msg) {
    if (!ok) out.emplace_back(msg);
  };
  need(c.signal_bw_hz > 0.0, "b (signal bandwidth) must be positive");
  need(c.band_bw_hz > 0.0, "B (band bandwidth) must be positive");
  need(c.signal_bw_hz < c.band_bw_hz, "b must be smaller than B");
  need(c.bands >= 1, "M (bands) must be a positive integer");
  need(c.repetitions >= 1, "N (repetitions) must be a positive integer");
  need(c.repetitions <= 60, "N (repetitions) must not exceed 60");
  need(c.packets_per_period >= 1, "K (packets per period) must be a positive integer");
  need(c.period_s > 0.0, "t_tot (reporting period) must be positive");
  need(c.tx_duration_s > 0.0, "t (transmission duration) must be positive");
  need(c.packets_per_period * c.tx_duration_s <= c.period_s,
       "K*T must not exceed t_tot (duty-cycle feasibility)");
  need(c.tx_power_w > 0.0, "p_iot (UNB transmit power) must be positive");
  need(c.noise_power_w >= 0.0, "p_n (noise power) must be non-negative");
  need(c.bs_density >= 0.0, "lambda_b (BS density) must be non-negative");
  need(c.device_density >= 0.0, "lambda_iot (device density) must be non-negative");
  need(c.path_loss_exp > 2.0, "alpha must exceed 2");
  need(c.sinr_threshold > 0.0, "tau (SINR threshold) must be positive");
  need(c.beta_time >= 1.0 && c.beta_time <= 2.0, "beta_t must lie in [1, 2]");
  need(c.beta_freq >= 1.0 && c.beta_freq <= 2.0, "beta_f must lie in [1, 2]");
  need(c.center_freq_hz >= 0.0, "f_c must be non-negative");
}

void check_incumbents(const NetworkConfig& c, const IncumbentConfig& inc,
                      std::vector<std::string>& out) {
  if (inc.tx_power_w < 0.0) out.emplace_back("p_i (incumbent power) must be non-negative");
  if (inc.kind == IncumbentKind::TypeI) {
    if (!(inc.wideband.bandwidth_hz > 0.0)) out.emplace_back("b_i0 must be positive");
    if (inc.wideband.density < 0.0) out.emplace_back("lambda_i0 must be non-negative");
    return;
  }
  if (inc.per_band.size() != static_cast<std::size_t>(std::max(c.bands, 0))) {
    std::ostringstream os;
    os << "Type-II incumbent list has " << inc.per_band.size() << " entries but M = "
       << c.bands;
    out.push_back(os.str());
  }
  for (std::size_t m = 0; m < inc.per_band.size(); ++m) {
    const auto& band = inc.per_band[m];
    if (!(band.bandwidth_hz > 0.0) || band.bandwidth_hz > c.band_bw_hz) {
      std::ostringstream os;
      os << "b_im[" << m << "] must lie in (0, B]";
      out.push_back(os.str());
    }
    if (band.density < 0.0) {
      std::ostringstream os;
      os << "lambda_im[" << m << "] must be non-negative";
      out.push_back(os.str());
    }
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

std::vector<std::string> validate(const NetworkConfig& cfg, const IncumbentConfig& inc) {
  std::vector<std::string> out;
  check_network(cfg, out);
  check_incumbents(cfg, inc, out);
  return out;
}

std::vector<std::string> validate(const NetworkConfig& cfg, const IncumbentConfig& inc,
                                  const ProtocolSpec& proto) {
  auto out = validate(cfg, inc);
  if (!proto.band_probs.empty()) {
    if (proto.band_probs.size() != static_cast<std::size_t>(std::max(cfg.bands, 0))) {
      out.emplace_back("band probability vector p must have M entries");
    }
    double sum = 0.0;
    bool negative = false;
    for (double p : proto.band_probs) {
      negative = negative || p < 0.0 || !std::isfinite(p);
      sum += p;
    }
    if (negative) out.emplace_back("band probabilities p must be non-negative");
    if (std::abs(sum - 1.0) > 1e-9) out.emplace_back("band probabilities p must sum to 1");
  }
  if (proto.hopping == Hopping::PN && proto.protocol != Protocol::NearestBS &&
      proto.protocol != Protocol::NoAssociation) {
    out.emplace_back("PN hopping is only defined for the nearest-BS and no-association protocols");
  }
  return out;
}

DerivedParams derive_params(const NetworkConfig& cfg, const IncumbentConfig& inc) {
  if (auto v = validate(cfg, inc); !v.empty()) throw ConfigError(std::move(v));

  DerivedParams d;
  const double M = cfg.bands;
  const double B = cfg.band_bw_hz;
  const double b = cfg.signal_bw_hz;
  d.activity = cfg.packets_per_period * cfg.tx_duration_s / cfg.period_s;
  d.delta = 2.0 / cfg.path_loss_exp;
  d.xi = std::sin(std::numbers::pi * d.delta) / (d.delta * std::numbers::pi);
  d.noise_ratio = cfg.noise_power_w / cfg.tx_power_w;
  d.unb_interferer_density = cfg.repetitions * cfg.beta_time * d.activity *
                             (cfg.beta_freq * b / (M * B)) * cfg.device_density;

  auto power_ratio = [&](double incumbent_bw) {
    return inc.tx_power_w * b / incumbent_bw / cfg.tx_power_w;
  };

  if (inc.kind == IncumbentKind::TypeI) {
    const auto& w = inc.wideband;
    const double ratio = power_ratio(w.bandwidth_hz);
    const double scaled = std::pow(ratio, d.delta);
    d.incumbent_power_ratio = {ratio};
    d.incumbent_density = std::min(1.0, w.bandwidth_hz / (M * B)) * w.density;
    d.incumbent_density_total = (w.bandwidth_hz / B) * w.density;
    d.incumbent_term = scaled * d.incumbent_density;
    d.incumbent_term_total = scaled * d.incumbent_density_total;
    d.band_incumbent_terms.assign(cfg.bands, d.incumbent_term);
  } else {
    double density_sum = 0.0;
    double total = 0.0;
    double term_sum = 0.0;
    double term_total = 0.0;
    for (const auto& band : inc.per_band) {
      const double ratio = power_ratio(band.bandwidth_hz);
      const double scaled = std::pow(ratio, d.delta);
      const double occupied = (band.bandwidth_hz / B) * band.density;
      d.incumbent_power_ratio.push_back(ratio);
      d.band_incumbent_terms.push_back(scaled * occupied);
      density_sum += occupied;
      total += band.bandwidth_hz * band.density;
      term_sum += scaled * occupied;
      term_total += scaled * band.bandwidth_hz * band.density;
    }
    d.incumbent_density = (1.0 / M) * density_sum;
    d.incumbent_density_total = (1.0 / B) * total;
    d.incumbent_term = (1.0 / M) * term_sum;
    d.incumbent_term_total = (1.0 / B) * term_total;
  }
  return d;
}

Scenario make_scenario(const NetworkConfig& cfg, const IncumbentConfig& inc) {
  return Scenario{cfg, inc, derive_params(cfg, inc)};
}

Scenario single_band(const Scenario& sc) {
  NetworkConfig net = sc.net;
  net.bands = 1;
  IncumbentConfig inc = sc.inc;
  if (inc.kind == IncumbentKind::TypeII && !inc.per_band.empty()) inc.per_band.resize(1);
  return make_scenario(net, inc);
}

Scenario with_net(const Scenario& sc, const NetworkConfig& net) {
  IncumbentConfig inc = sc.inc;
  if (inc.kind == IncumbentKind::TypeII && net.bands != sc.net.bands && !inc.per_band.empty()) {
    // Extra bands inherit the last band's network; used by M sweeps.
    inc.per_band.resize(net.bands, inc.per_band.back());
  }
  return make_scenario(net, inc);
}

std::vector<double> resolve_band_probs(const ProtocolSpec& proto, int bands) {
  if (!proto.band_probs.empty()) return proto.band_probs;
  return std::vector<double>(bands, 1.0 / bands);
}

namespace {
double lora_density(const NetworkConfig& net, double devices_per_bs) {
  const double activity = net.packets_per_period * net.tx_duration_s / net.period_s;
  return devices_per_bs * activity * net.bs_density;
}
}  // namespace

IncumbentConfig lora_type1(const NetworkConfig& net, double devices_per_bs) {
  IncumbentConfig inc;
  inc.kind = IncumbentKind::TypeI;
  inc.wideband = {125e3, lora_density(net, devices_per_bs)};
  return inc;
}

IncumbentConfig lora_type2(const NetworkConfig& net, const std::vector<double>& devices_per_bs) {
  IncumbentConfig inc;
  inc.kind = IncumbentKind::TypeII;
  for (double n : devices_per_bs) inc.per_band.push_back({125e3, lora_density(net, n)});
  return inc;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::NearestBS: return "nearest";
    case Protocol::NoAssociation: return "no-assoc";
    case Protocol::BenchmarkMultiband: return "benchmark";
    case Protocol::BandConstrained: return "band-constrained";
    case Protocol::BandHopped: return "band-hopped";
  }
  return "?";
}

const char* to_string(Hopping h) { return h == Hopping::PN ? "pn" : "random"; }

}  // namespace unb
