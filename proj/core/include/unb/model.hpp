#ifndef UNB_MODEL_HPP
#define UNB_MODEL_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace unb {

/// Physical and protocol parameters of the ultra-narrowband network.
///
/// Units are fixed throughout the library: Hz, seconds, watts, km and
/// per-km^2 densities. dB quantities are converted at the I/O boundary.
struct NetworkConfig {
  double signal_bw_hz = 600.0;           // b
  double band_bw_hz = 200e3;             // B
  int bands = 5;                         // M
  int repetitions = 3;                   // N
  int packets_per_period = 6;            // K
  double period_s = 3600.0;              // T_tot
  double tx_duration_s = 26.0 * 8.0 / 600.0;  // T
  double tx_power_w = 0.025118864315095794;   // P_IoT, 14 dBm
  double noise_power_w = 2.5118864315095717e-18;  // P_N, -146 dBm over b
  double bs_density = 0.04;              // lambda_B
  double device_density = 1200.0;        // lambda_IoT
  double path_loss_exp = 3.5;            // alpha
  double sinr_threshold = 1.0;           // tau (linear)
  double beta_time = 2.0;                // 1 slotted .. 2 unslotted
  double beta_freq = 2.0;
  double center_freq_hz = 902e6;         // bookkeeping only

  bool operator==(const NetworkConfig&) const = default;
};

enum class IncumbentKind { TypeI, TypeII };

/// One interfering network: occupied bandwidth and effective active density.
struct IncumbentBand {
  double bandwidth_hz = 0.0;
  double density = 0.0;

  bool operator==(const IncumbentBand&) const = default;
};

/// Type-I: one wideband network (`wideband`) anywhere in the M*B span.
/// Type-II: one network per multiplexing band (`per_band`, size M).
struct IncumbentConfig {
  IncumbentKind kind = IncumbentKind::TypeI;
  double tx_power_w = 0.025118864315095794;  // P_I over its own bandwidth
  IncumbentBand wideband{125e3, 0.0};
  std::vector<IncumbentBand> per_band;

  bool operator==(const IncumbentConfig&) const = default;
};

enum class Protocol {
  NearestBS,
  NoAssociation,
  BenchmarkMultiband,
  BandConstrained,
  BandHopped,
};

enum class Hopping { Random, PN };

struct ProtocolSpec {
  Protocol protocol = Protocol::NoAssociation;
  Hopping hopping = Hopping::Random;
  /// BS band-selection probabilities; empty means uniform. Only used by the
  /// band-constrained and band-hopped protocols.
  std::vector<double> band_probs;
};

/// Quantities every closed form consumes, computed once from the configs.
struct DerivedParams {
  double activity = 0.0;       // lambda_T = K T / T_tot
  double delta = 0.0;          // 2 / alpha
  double xi = 0.0;             // sin(pi delta) / (delta pi)
  double noise_ratio = 0.0;    // P_N / P_IoT
  double unb_interferer_density = 0.0;   // lambda~_IoT
  double incumbent_density = 0.0;        // lambda~_I
  double incumbent_density_total = 0.0;  // lambda~~_I
  /// P_I b / B_I / P_IoT; per band for Type-II, one entry for Type-I.
  std::vector<double> incumbent_power_ratio;
  /// P^_I^delta lambda~_I, the incumbent contribution to the single-band and
  /// benchmark denominators (averaged over bands for Type-II).
  double incumbent_term = 0.0;
  /// P^_I^delta lambda~~_I used by the resource bound.
  double incumbent_term_total = 0.0;
  /// Per-band incumbent contribution seen by a device transmitting in band m.
  std::vector<double> band_incumbent_terms;
};

/// A validated configuration with its derived parameters.
struct Scenario {
  NetworkConfig net;
  IncumbentConfig inc;
  DerivedParams derived;
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

std::vector<std::string> validate(const NetworkConfig& cfg, const IncumbentConfig& inc);
std::vector<std::string> validate(const NetworkConfig& cfg, const IncumbentConfig& inc,
                                  const ProtocolSpec& proto);

/// Throws ConfigError listing every violated invariant.
DerivedParams derive_params(const NetworkConfig& cfg, const IncumbentConfig& inc);

Scenario make_scenario(const NetworkConfig& cfg, const IncumbentConfig& inc);

/// Single-band view of a scenario (M = 1). Type-II keeps only the first band,
/// which makes Type-I and Type-II coincide when they describe the same network.
Scenario single_band(const Scenario& sc);

/// Same scenario with a different parameter; derived values are recomputed.
Scenario with_net(const Scenario& sc, const NetworkConfig& net);

/// Band probabilities of a protocol spec, expanded to M entries (uniform when empty).
std::vector<double> resolve_band_probs(const ProtocolSpec& proto, int bands);

/// LoRa-like incumbents over 125 kHz at 14 dBm. Densities are given as active
/// devices per UNB BS and scaled by the UNB activity factor, so the effective
/// density is devices_per_bs * lambda_T * lambda_B.
IncumbentConfig lora_type1(const NetworkConfig& net, double devices_per_bs = 1000.0);
IncumbentConfig lora_type2(const NetworkConfig& net, const std::vector<double>& devices_per_bs);

double db_to_linear(double db);
double dbm_to_watts(double dbm);
double linear_to_db(double x);

const char* to_string(Protocol p);
const char* to_string(Hopping h);

}  // namespace unb

#endif  // UNB_MODEL_HPP
