#ifndef UNB_SIMULATE_HPP
#define UNB_SIMULATE_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "unb/model.hpp"
#include "unb/rng.hpp"

namespace unb::sim {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Homogeneous PPP on the disc of the given radius centred at the origin.
std::vector<Point> sample_hppp(double density, double radius, Rng& rng);

/// Time and frequency slotting. Slotted time uses a grid of length T,
/// slotted frequency a channel grid of width b.
struct AccessMode {
  bool slotted_time = false;
  bool slotted_freq = false;

  bool operator==(const AccessMode&) const = default;
};

/// Slotted in a dimension when its overlap factor is below 1.5.
AccessMode default_access(const NetworkConfig& net);

/// One transmission of a packet. `start` and `carrier` (Hz above the lower
/// edge of the M*B span) are always filled; `slot` and `channel` are grid
/// indices, meaningful only in the corresponding slotted mode.
struct Transmission {
  double start = 0.0;
  double carrier = 0.0;
  std::int64_t slot = 0;
  std::int64_t channel = 0;
  int band = 0;
};

/// Strict overlap in both time and frequency: |dt| < T and |df| < b when
/// unslotted, equal slot or channel when slotted. Symmetric.
bool overlap(const Transmission& a, const Transmission& b, const AccessMode& access,
             const NetworkConfig& net);

/// How a device picks bands for its repetitions.
enum class BandMode {
  Wideband,  // carriers anywhere in the M*B span
  PerPacket, // one uniform band for all repetitions
  PerRepetition,
};

struct Packet {
  /// Hopping pattern: channel index when frequency-slotted, base carrier
  /// offset (Hz) otherwise. Only set under PN hopping.
  double pattern = -1.0;
  std::vector<Transmission> reps;
};

/// Draws packet marks. Random hopping draws every carrier independently; PN
/// hopping draws one pattern that fixes all N carriers.
class TrafficModel {
 public:
  TrafficModel(const NetworkConfig& net, const AccessMode& access, Hopping hopping,
               BandMode bands);

  /// Packet whose first repetition starts at `start` (quantized when slotted).
  Packet draw(Rng& rng, double start) const;
  /// Same draw into an existing packet, reusing its storage.
  void draw_into(Rng& rng, double start, Packet& pkt) const;

  /// Packet-level interference under PN hopping: same pattern and
  /// overlapping packet durations.
  bool pn_collide(const Packet& a, const Packet& b) const;

  /// Law of one repetition's carrier for one class of packets: uniform on
  /// [lo, hi) of the frequency axis (Hz, or channel units when
  /// frequency-slotted), chosen with probability `weight`. `band` < 0 means
  /// the band follows from the carrier.
  struct CarrierClass {
    double lo = 0.0;
    double hi = 0.0;
    double weight = 1.0;
    int band = -1;
  };
  std::vector<CarrierClass> carrier_classes() const;

  /// Axis positions whose carriers overlap `tx` in frequency.
  std::pair<double, double> overlap_interval(const Transmission& tx) const;

  /// Fills carrier, channel and band from an axis position.
  void place(double x, int band, Transmission& tx) const;
  /// Start times and slots of every repetition.
  void set_times(double start, Packet& pkt) const;
  /// Carriers of a PN packet from its pattern.
  void set_pattern(double pattern, Packet& pkt) const;

  std::int64_t channels() const noexcept { return channels_; }
  const AccessMode& access() const noexcept { return access_; }

 private:
  int band_of(double carrier) const;

  NetworkConfig net_;
  AccessMode access_;
  Hopping hopping_;
  BandMode bands_;
  std::int64_t channels_;           // floor(M B / b)
  std::int64_t channels_per_band_;  // floor(B / b)
};

/// Typical packet of one device: start uniform over the reporting period.
Packet generate_traffic(const NetworkConfig& net, const AccessMode& access, Hopping hopping,
                        Rng& rng);

struct SimConfig {
  double region_radius = 0.0;  // km; 0 selects default_region_radius
  std::int64_t realizations = 10000;
  std::uint64_t seed = 1;
  bool noise_enabled = true;
  std::optional<AccessMode> access;  // empty: default_access(net)
  bool record_sinr = false;
  unsigned workers = 0;  // 0: hardware concurrency
};

/// max(10 / sqrt(pi lambda_B), interference length scale * tail factor),
/// capped so that the expected BS count stays manageable.
double default_region_radius(const Scenario& sc);

struct BaseStation {
  Point pos;
  double distance = 0.0;
  int band = 0;  // listening band for band-constrained and band-hopped
};

struct Interferer {
  Point pos;
  double weight = 1.0;  // 1 for UNB devices, P^_I for incumbents
  std::uint64_t id = 0;
  bool incumbent = false;
};

/// One spatial draw around the typical device at the origin. Fading is not
/// stored; it is a deterministic function of (seed, realization, link).
struct Realization {
  std::int64_t index = 0;
  double radius = 0.0;
  std::vector<BaseStation> stations;  // sorted by distance
  Packet typical;
  std::vector<std::vector<Interferer>> interferers;  // per typical repetition
  std::size_t candidate_packets = 0;  // UNB packets drawn that may overlap in frequency
};

struct Outcome {
  double max_sinr = 0.0;  // 0 when no eligible BS
  int best_rep = -1;
  int best_station = -1;
  bool has_station = false;
};

/// Everything one run needs, resolved once.
class Engine {
 public:
  Engine(const Scenario& sc, const ProtocolSpec& proto, const SimConfig& sim);

  Realization draw(std::int64_t index) const;
  Outcome evaluate(const Realization& r) const;
  /// Unit-mean exponential fading power of one link.
  double fading(std::int64_t index, int rep, std::uint64_t source, int station) const;

  double radius() const noexcept { return radius_; }
  const AccessMode& access() const noexcept { return access_; }

 private:
  Scenario sc_;
  ProtocolSpec proto_;
  SimConfig sim_;
  AccessMode access_;
  double radius_;
  std::vector<double> band_probs_;
  TrafficModel traffic_;
};

struct SuccessEstimate {
  double p_hat = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
  std::int64_t successes = 0;
  std::int64_t realizations = 0;
  std::int64_t no_station = 0;  // realizations without any eligible BS
  std::vector<double> max_sinr;  // per realization, when recorded
};

/// 95% Wilson score interval.
std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t n);

/// Estimate at threshold `tau` from recorded max-SINR samples.
SuccessEstimate estimate_at(std::span<const double> max_sinr, double tau);

/// Monte Carlo success probability. Deterministic for a given seed whatever
/// the worker count. Errors are rethrown with the realization index.
SuccessEstimate run(const Scenario& sc, const ProtocolSpec& proto, const SimConfig& sim);

/// Writes the first `limit` realizations as JSON lines.
void dump_realizations(const Scenario& sc, const ProtocolSpec& proto, const SimConfig& sim,
                       std::int64_t limit, std::ostream& out);

}  // namespace unb::sim

#endif  // UNB_SIMULATE_HPP
