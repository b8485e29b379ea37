#include "unb/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace unb::sim {
namespace {

// Substream tags.
constexpr std::uint64_t kStations = 1;
constexpr std::uint64_t kTraffic = 2;
constexpr std::uint64_t kPositions = 3;
constexpr std::uint64_t kIncumbents = 4;
constexpr std::uint64_t kFading = 5;

constexpr std::uint64_t kSignalSource = ~std::uint64_t{0};
constexpr std::uint64_t kIncumbentFlag = std::uint64_t{1} << 62;

// Fraction of mean interference allowed to lie beyond the region.
constexpr double kTailFraction = 0.01;

double circular_distance(double a, double b, double span) {
  double d = std::fmod(std::abs(a - b), span);
  return std::min(d, span - d);
}

Point disc_point(double radius, double u, double v) {
  const double r = radius * std::sqrt(u);
  const double theta = 2.0 * std::numbers::pi * v;
  return {r * std::cos(theta), r * std::sin(theta)};
}

BandMode band_mode(Protocol p) {
  switch (p) {
    case Protocol::BandConstrained: return BandMode::PerPacket;
    case Protocol::BandHopped: return BandMode::PerRepetition;
    default: return BandMode::Wideband;
  }
}

}  // namespace

std::vector<Point> sample_hppp(double density, double radius, Rng& rng) {
  if (density < 0.0 || radius < 0.0) throw std::invalid_argument("HPPP needs non-negative density and radius");
  const auto count = rng.poisson(density * std::numbers::pi * radius * radius);
  std::vector<Point> pts;
  pts.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double u = rng.uniform();
    const double v = rng.uniform();
    pts.push_back(disc_point(radius, u, v));
  }
  return pts;
}

AccessMode default_access(const NetworkConfig& net) {
  return {net.beta_time < 1.5, net.beta_freq < 1.5};
}

bool overlap(const Transmission& a, const Transmission& b, const AccessMode& access,
             const NetworkConfig& net) {
  const bool time = access.slotted_time ? a.slot == b.slot
                                        : std::abs(a.start - b.start) < net.tx_duration_s;
  if (!time) return false;
  return access.slotted_freq ? a.channel == b.channel
                             : std::abs(a.carrier - b.carrier) < net.signal_bw_hz;
}

TrafficModel::TrafficModel(const NetworkConfig& net, const AccessMode& access, Hopping hopping,
                           BandMode bands)
    : net_(net),
      access_(access),
      hopping_(hopping),
      bands_(bands),
      channels_(static_cast<std::int64_t>(std::floor(net.bands * net.band_bw_hz / net.signal_bw_hz))),
      channels_per_band_(static_cast<std::int64_t>(std::floor(net.band_bw_hz / net.signal_bw_hz))) {
  if (hopping == Hopping::PN && bands != BandMode::Wideband) {
    throw std::invalid_argument("PN hopping is only defined for wideband access");
  }
}

void TrafficModel::place(double x, int band, Transmission& tx) const {
  if (access_.slotted_freq) {
    tx.channel = static_cast<std::int64_t>(std::floor(x));
    if (bands_ == BandMode::Wideband) {
      tx.carrier = (static_cast<double>(tx.channel) + 0.5) * net_.signal_bw_hz;
      tx.band = band_of(tx.carrier);
    } else {
      // Each band carries its own grid of floor(B / b) channels.
      const auto m = tx.channel / channels_per_band_;
      const auto k = tx.channel % channels_per_band_;
      tx.carrier = static_cast<double>(m) * net_.band_bw_hz + (static_cast<double>(k) + 0.5) * net_.signal_bw_hz;
      tx.band = static_cast<int>(m);
    }
    return;
  }
  tx.carrier = x;
  tx.channel = static_cast<std::int64_t>(std::floor(x / net_.signal_bw_hz));
  tx.band = band >= 0 ? band : band_of(x);
}

int TrafficModel::band_of(double carrier) const {
  return std::clamp(static_cast<int>(carrier / net_.band_bw_hz), 0, net_.bands - 1);
}

std::vector<TrafficModel::CarrierClass> TrafficModel::carrier_classes() const {
  std::vector<CarrierClass> out;
  const bool slotted = access_.slotted_freq;
  const double unit = slotted ? static_cast<double>(channels_per_band_) : net_.band_bw_hz;
  switch (bands_) {
    case BandMode::Wideband:
      out.push_back({0.0, slotted ? static_cast<double>(channels_) : net_.bands * net_.band_bw_hz, 1.0, -1});
      break;
    case BandMode::PerRepetition:
      // A uniform band followed by a uniform carrier in it is uniform overall.
      out.push_back({0.0, net_.bands * unit, 1.0, -1});
      break;
    case BandMode::PerPacket:
      for (int m = 0; m < net_.bands; ++m) out.push_back({m * unit, (m + 1) * unit, 1.0 / net_.bands, m});
      break;
  }
  return out;
}

std::pair<double, double> TrafficModel::overlap_interval(const Transmission& tx) const {
  if (access_.slotted_freq) {
    const auto c = static_cast<double>(tx.channel);
    return {c, c + 1.0};
  }
  return {tx.carrier - net_.signal_bw_hz, tx.carrier + net_.signal_bw_hz};
}

void TrafficModel::set_times(double start, Packet& pkt) const {
  const int n_reps = net_.repetitions;
  const double t = net_.tx_duration_s;
  pkt.reps.resize(n_reps);
  std::int64_t first_slot = 0;
  if (access_.slotted_time) {
    // PN packets occupy frames of N slots so that co-pattern packets align.
    const std::int64_t frame_len = hopping_ == Hopping::PN ? n_reps : 1;
    first_slot = static_cast<std::int64_t>(std::floor(start / (frame_len * t))) * frame_len;
    start = static_cast<double>(first_slot) * t;
  }
  for (int n = 0; n < n_reps; ++n) {
    pkt.reps[n].start = start + n * t;
    pkt.reps[n].slot = first_slot + n;
  }
}

void TrafficModel::set_pattern(double pattern, Packet& pkt) const {
  const int n_reps = net_.repetitions;
  pkt.pattern = pattern;
  pkt.reps.resize(n_reps);
  if (access_.slotted_freq) {
    const auto k = static_cast<std::int64_t>(pattern);
    const std::int64_t hop = std::max<std::int64_t>(1, channels_ / n_reps);
    for (int n = 0; n < n_reps; ++n) place(static_cast<double>((k + n * hop) % channels_), -1, pkt.reps[n]);
    return;
  }
  const double span = net_.bands * net_.band_bw_hz;
  for (int n = 0; n < n_reps; ++n) {
    place(std::fmod(pattern + n * (std::numbers::phi - 1.0) * span, span), -1, pkt.reps[n]);
  }
}

Packet TrafficModel::draw(Rng& rng, double start) const {
  Packet pkt;
  draw_into(rng, start, pkt);
  return pkt;
}

void TrafficModel::draw_into(Rng& rng, double start, Packet& pkt) const {
  set_times(start, pkt);
  pkt.pattern = -1.0;
  if (hopping_ == Hopping::PN) {
    const double pattern = access_.slotted_freq
                               ? static_cast<double>(rng.below(channels_))
                               : rng.uniform(0.0, net_.bands * net_.band_bw_hz);
    set_pattern(pattern, pkt);
    return;
  }
  const auto classes = carrier_classes();
  std::size_t cls = 0;
  if (bands_ == BandMode::PerPacket) cls = rng.below(classes.size());
  for (auto& tx : pkt.reps) {
    const auto& c = classes[cls];
    const double x = access_.slotted_freq
                         ? c.lo + static_cast<double>(rng.below(static_cast<std::uint64_t>(c.hi - c.lo)))
                         : rng.uniform(c.lo, c.hi);
    place(x, c.band, tx);
  }
}

bool TrafficModel::pn_collide(const Packet& a, const Packet& b) const {
  const double span = net_.bands * net_.band_bw_hz;
  const bool same_pattern = access_.slotted_freq
                                ? a.pattern == b.pattern
                                : circular_distance(a.pattern, b.pattern, span) < net_.signal_bw_hz;
  if (!same_pattern) return false;
  if (access_.slotted_time) return a.reps.front().slot == b.reps.front().slot;
  return std::abs(a.reps.front().start - b.reps.front().start) <
         net_.repetitions * net_.tx_duration_s;
}

Packet generate_traffic(const NetworkConfig& net, const AccessMode& access, Hopping hopping,
                        Rng& rng) {
  const TrafficModel model(net, access, hopping, BandMode::Wideband);
  return model.draw(rng, rng.uniform(0.0, net.period_s));
}

double default_region_radius(const Scenario& sc) {
  const double bs = sc.net.bs_density;
  const double base = bs > 0.0 ? 10.0 / std::sqrt(std::numbers::pi * bs) : 10.0;
  double density = sc.derived.unb_interferer_density + sc.derived.incumbent_term;
  for (double term : sc.derived.band_incumbent_terms) {
    density = std::min(density, sc.derived.unb_interferer_density + term);
  }
  if (!(density > 0.0)) return base;
  // Interferers beyond q * l carry about kTailFraction of the mean
  // interference seen at the typical BS distance scale l.
  const double alpha = sc.net.path_loss_exp;
  const double scale = std::sqrt(sc.derived.xi / (std::numbers::pi * density));
  const double factor =
      std::min(30.0, std::pow(2.0 * sc.derived.xi / ((alpha - 2.0) * kTailFraction),
                              1.0 / (alpha - 2.0)));
  double radius = std::max(base, scale * factor);
  if (bs > 0.0) radius = std::min(radius, std::max(base, std::sqrt(2e4 / (std::numbers::pi * bs))));
  return radius;
}

namespace {

// Runs before any member is built, so invalid input surfaces as ConfigError.
const Scenario& checked(const Scenario& sc, const ProtocolSpec& proto) {
  if (auto v = validate(sc.net, sc.inc, proto); !v.empty()) throw ConfigError(std::move(v));
  return sc;
}

}  // namespace

Engine::Engine(const Scenario& sc, const ProtocolSpec& proto, const SimConfig& sim)
    : sc_(checked(sc, proto)),
      proto_(proto),
      sim_(sim),
      access_(sim.access.value_or(default_access(sc.net))),
      radius_(sim.region_radius > 0.0 ? sim.region_radius : default_region_radius(sc)),
      band_probs_(resolve_band_probs(proto, sc.net.bands)),
      traffic_(sc.net, access_, proto.hopping, band_mode(proto.protocol)) {
  if (sim.realizations < 1) throw std::invalid_argument("realizations must be at least 1");
  if (sim.region_radius < 0.0) throw std::invalid_argument("region_radius must be positive");
}

double Engine::fading(std::int64_t index, int rep, std::uint64_t source, int station) const {
  const auto bits = hash_counters({sim_.seed, static_cast<std::uint64_t>(index), kFading,
                                   static_cast<std::uint64_t>(rep), source,
                                   static_cast<std::uint64_t>(station)});
  return -std::log(open_unit(bits));
}

Realization Engine::draw(std::int64_t index) const {
  const auto& net = sc_.net;
  const auto idx = static_cast<std::uint64_t>(index);
  const double area = std::numbers::pi * radius_ * radius_;
  const int n_reps = net.repetitions;
  const double t = net.tx_duration_s;
  const double span = net.bands * net.band_bw_hz;

  Realization r;
  r.index = index;
  r.radius = radius_;

  Rng bs_rng(sim_.seed, idx, kStations);
  const auto bs_points = sample_hppp(net.bs_density, radius_, bs_rng);
  const bool banded_bs = proto_.protocol == Protocol::BandConstrained ||
                         proto_.protocol == Protocol::BandHopped;
  r.stations.reserve(bs_points.size());
  for (const auto& pt : bs_points) {
    BaseStation st{pt, std::hypot(pt.x, pt.y), 0};
    if (banded_bs) {
      double u = bs_rng.uniform();
      int m = 0;
      while (m + 1 < net.bands && u >= band_probs_[m]) u -= band_probs_[m++];
      // Skip trailing zero-probability bands left by rounding.
      while (m > 0 && band_probs_[m] == 0.0) --m;
      st.band = m;
    }
    r.stations.push_back(st);
  }
  std::sort(r.stations.begin(), r.stations.end(),
            [](const BaseStation& a, const BaseStation& b) { return a.distance < b.distance; });

  Rng traffic_rng(sim_.seed, idx, kTraffic);
  r.typical = traffic_.draw(traffic_rng, traffic_rng.uniform(0.0, net.period_s));
  r.interferers.assign(n_reps, {});

  // Other packets whose first repetition starts within N T of the typical
  // one are the only ones that can overlap it. Of those, only packets with a
  // repetition on a carrier overlapping a typical carrier can interfere; by
  // Poisson thinning they are drawn directly, conditioned on that event.
  const double t0 = r.typical.reps.front().start;
  const double window = n_reps * t;
  const double expected =
      net.device_density * area * net.packets_per_period / net.period_s * 2.0 * window;
  auto position = [&](std::uint64_t i) {
    const auto h1 = hash_counters({sim_.seed, idx, kPositions, i, 0});
    const auto h2 = hash_counters({sim_.seed, idx, kPositions, i, 1});
    return disc_point(radius_, open_unit(h1), open_unit(h2));
  };
  Packet pkt;
  std::uint64_t next = 0;
  if (proto_.hopping == Hopping::PN) {
    const bool slotted = access_.slotted_freq;
    const double same = slotted ? 1.0 / static_cast<double>(traffic_.channels())
                                : std::min(1.0, 2.0 * net.signal_bw_hz / span);
    const auto count = traffic_rng.poisson(expected * same);
    r.candidate_packets = count;
    for (; next < count; ++next) {
      traffic_.set_times(traffic_rng.uniform(t0 - window, t0 + window), pkt);
      double pattern = r.typical.pattern;
      if (!slotted) {
        pattern = std::fmod(pattern + traffic_rng.uniform(-net.signal_bw_hz, net.signal_bw_hz) + span, span);
      }
      traffic_.set_pattern(pattern, pkt);
      if (!traffic_.pn_collide(r.typical, pkt)) continue;
      const Point pos = position(next);
      for (int n = 0; n < n_reps; ++n) r.interferers[n].push_back({pos, 1.0, next << 8, false});
    }
  } else {
    std::vector<std::pair<double, double>> hot;
    for (const auto& tx : r.typical.reps) hot.push_back(traffic_.overlap_interval(tx));
    std::sort(hot.begin(), hot.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& iv : hot) {
      if (!merged.empty() && iv.first <= merged.back().second) {
        merged.back().second = std::max(merged.back().second, iv.second);
      } else {
        merged.push_back(iv);
      }
    }
    std::vector<std::pair<double, double>> pieces;
    for (const auto& cls : traffic_.carrier_classes()) {
      pieces.clear();
      double mass = 0.0;
      for (const auto& iv : merged) {
        const double lo = std::max(iv.first, cls.lo);
        const double hi = std::min(iv.second, cls.hi);
        if (hi > lo) {
          pieces.emplace_back(lo, hi);
          mass += hi - lo;
        }
      }
      if (!(mass > 0.0)) continue;
      // q: chance one repetition lands in the hot set; p_hit: at least one does.
      const double q = std::min(1.0, mass / (cls.hi - cls.lo));
      const double p_hit = q >= 1.0 ? 1.0 : -std::expm1(n_reps * std::log1p(-q));
      const auto count = traffic_rng.poisson(expected * cls.weight * p_hit);
      r.candidate_packets += count;
      auto hot_point = [&](double u) {
        u *= mass;
        for (const auto& pc : pieces) {
          const double len = pc.second - pc.first;
          if (u < len) return pc.first + u;
          u -= len;
        }
        return std::nextafter(pieces.back().second, pieces.back().first);
      };
      for (std::uint64_t c = 0; c < count; ++c, ++next) {
        traffic_.set_times(traffic_rng.uniform(t0 - window, t0 + window), pkt);
        pkt.pattern = -1.0;
        // Index of the first repetition in the hot set, given there is one.
        double u = traffic_rng.uniform() * p_hit;
        double pj = q;
        int first = 0;
        while (first < n_reps - 1 && u >= pj) {
          u -= pj;
          pj *= 1.0 - q;
          ++first;
        }
        for (int j = 0; j < n_reps; ++j) {
          auto& tx = pkt.reps[j];
          if (j == first || (j > first && traffic_rng.uniform() < q)) {
            traffic_.place(hot_point(traffic_rng.uniform()), cls.band, tx);
          } else {
            // Lands outside every typical carrier, so its value is irrelevant.
            tx.carrier = std::numeric_limits<double>::quiet_NaN();
            tx.channel = -1;
            tx.band = std::max(cls.band, 0);
          }
        }
        for (int n = 0; n < n_reps; ++n) {
          for (int j = 0; j < n_reps; ++j) {
            if (overlap(r.typical.reps[n], pkt.reps[j], access_, net)) {
              r.interferers[n].push_back(
                  {position(next), 1.0, (next << 8) | static_cast<std::uint64_t>(j), false});
            }
          }
        }
      }
    }
  }

  // Incumbents: an independent draw for every repetition.
  Rng inc_rng(sim_.seed, idx, kIncumbents);
  const auto& ratio = sc_.derived.incumbent_power_ratio;
  for (int n = 0; n < n_reps; ++n) {
    const auto& tx = r.typical.reps[n];
    double density = 0.0;
    double width = 0.0;
    double lo = 0.0;
    double range = span;
    double weight = 0.0;
    if (sc_.inc.kind == IncumbentKind::TypeI) {
      density = sc_.inc.wideband.density;
      width = sc_.inc.wideband.bandwidth_hz;
      weight = ratio.front();
    } else {
      const auto& band = sc_.inc.per_band[tx.band];
      density = band.density;
      width = band.bandwidth_hz;
      lo = tx.band * net.band_bw_hz;
      range = net.band_bw_hz;
      weight = ratio[tx.band];
    }
    const auto k_count = inc_rng.poisson(density * area);
    for (std::uint64_t k = 0; k < k_count; ++k) {
      const double centre = inc_rng.uniform(lo, lo + range);
      const double u = inc_rng.uniform();
      const double v = inc_rng.uniform();
      // Occupied band wraps around the span it lives in.
      const bool covers = width >= range || circular_distance(centre, tx.carrier, range) < 0.5 * width;
      if (!covers) continue;
      const std::uint64_t id = kIncumbentFlag | (static_cast<std::uint64_t>(n) << 40) | k;
      r.interferers[n].push_back({disc_point(radius_, u, v), weight, id, true});
    }
  }
  return r;
}

Outcome Engine::evaluate(const Realization& r) const {
  const auto& net = sc_.net;
  const double half_alpha = 0.5 * net.path_loss_exp;
  const double noise = sim_.noise_enabled ? sc_.derived.noise_ratio : 0.0;
  Outcome out;
  const int n_stations = static_cast<int>(r.stations.size());
  // A PN interferer is the same transmitter with the same fading in every
  // repetition; only incumbents and the signal change.
  const bool frozen = proto_.hopping == Hopping::PN;
  for (int n = 0; n < net.repetitions; ++n) {
    const auto& interferers = r.interferers[n];
    const int band = r.typical.reps[n].band;
    for (int j = 0; j < n_stations; ++j) {
      const auto& st = r.stations[j];
      if (proto_.protocol == Protocol::NearestBS && j > 0) break;
      if ((proto_.protocol == Protocol::BandConstrained || proto_.protocol == Protocol::BandHopped) &&
          st.band != band) {
        continue;
      }
      out.has_station = true;
      const double signal =
          fading(r.index, n, kSignalSource, j) * std::pow(st.distance * st.distance, -half_alpha);
      double denom = noise;
      // Noise alone already bounds the SINR from above.
      if (denom > 0.0 && signal / denom <= out.max_sinr) continue;
      bool pruned = false;
      for (const auto& it : interferers) {
        const double dx = it.pos.x - st.pos.x;
        const double dy = it.pos.y - st.pos.y;
        const int fade_rep = frozen && !it.incumbent ? 0 : n;
        denom += it.weight * fading(r.index, fade_rep, it.id, j) * std::pow(dx * dx + dy * dy, -half_alpha);
        if (signal <= out.max_sinr * denom) {
          pruned = true;
          break;
        }
      }
      if (pruned) continue;
      const double sinr = denom > 0.0 ? signal / denom : std::numeric_limits<double>::infinity();
      if (sinr > out.max_sinr || out.best_rep < 0) {
        out.max_sinr = sinr;
        out.best_rep = n;
        out.best_station = j;
      }
    }
  }
  return out;
}

std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t n) {
  if (n <= 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = z / (1.0 + z2 / nn) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  // At p = 0 or 1 the matching bound is exact; rounding must not cross p.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == n ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

SuccessEstimate estimate_at(std::span<const double> max_sinr, double tau) {
  SuccessEstimate e;
  e.realizations = static_cast<std::int64_t>(max_sinr.size());
  e.successes = std::count_if(max_sinr.begin(), max_sinr.end(), [tau](double s) { return s >= tau; });
  e.p_hat = e.realizations > 0 ? static_cast<double>(e.successes) / e.realizations : 0.0;
  std::tie(e.wilson_lo, e.wilson_hi) = wilson_interval(e.successes, e.realizations);
  return e;
}

SuccessEstimate run(const Scenario& sc, const ProtocolSpec& proto, const SimConfig& sim) {
  const Engine engine(sc, proto, sim);
  const std::int64_t total = sim.realizations;
  std::vector<double> sinr(total, 0.0);
  std::vector<char> has_station(total, 0);

  unsigned workers = sim.workers > 0 ? sim.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, total));
  constexpr std::int64_t kChunk = 16;
  std::atomic<std::int64_t> next{0};
  std::mutex error_mutex;
  std::int64_t error_index = -1;
  std::string error_message;

  auto work = [&] {
    for (;;) {
      const std::int64_t begin = next.fetch_add(kChunk);
      if (begin >= total) return;
      const std::int64_t end = std::min(total, begin + kChunk);
      for (std::int64_t i = begin; i < end; ++i) {
        try {
          const Outcome o = engine.evaluate(engine.draw(i));
          sinr[i] = o.max_sinr;
          has_station[i] = o.has_station ? 1 : 0;
        } catch (const std::exception& ex) {
          std::lock_guard lock(error_mutex);
          if (error_index < 0 || i < error_index) {
            error_index = i;
            error_message = ex.what();
          }
        }
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error_index >= 0) {
    std::ostringstream os;
    os << "realization " << error_index << ": " << error_message;
    throw std::runtime_error(os.str());
  }

  SuccessEstimate e = estimate_at(sinr, sc.net.sinr_threshold);
  e.no_station = std::count(has_station.begin(), has_station.end(), 0);
  if (sim.record_sinr) e.max_sinr = std::move(sinr);
  return e;
}

void dump_realizations(const Scenario& sc, const ProtocolSpec& proto, const SimConfig& sim,
                       std::int64_t limit, std::ostream& out) {
  using nlohmann::json;
  const Engine engine(sc, proto, sim);
  const std::int64_t n = std::min(limit, sim.realizations);
  for (std::int64_t i = 0; i < n; ++i) {
    const Realization r = engine.draw(i);
    const Outcome o = engine.evaluate(r);
    json rec;
    rec["realization"] = i;
    rec["radius_km"] = r.radius;
    json stations = json::array();
    for (const auto& st : r.stations) stations.push_back({{"x", st.pos.x}, {"y", st.pos.y}, {"band", st.band}});
    rec["stations"] = std::move(stations);
    json reps = json::array();
    for (const auto& tx : r.typical.reps) {
      reps.push_back({{"start", tx.start}, {"carrier", tx.carrier}, {"slot", tx.slot},
                      {"channel", tx.channel}, {"band", tx.band}});
    }
    rec["typical"] = {{"pattern", r.typical.pattern}, {"reps", std::move(reps)}};
    json per_rep = json::array();
    for (const auto& list : r.interferers) {
      json items = json::array();
      for (const auto& it : list) {
        items.push_back({{"x", it.pos.x}, {"y", it.pos.y}, {"weight", it.weight},
                         {"incumbent", it.incumbent}, {"id", it.id}});
      }
      per_rep.push_back(std::move(items));
    }
    rec["interferers"] = std::move(per_rep);
    rec["candidate_packets"] = r.candidate_packets;
    json outcome = {{"best_rep", o.best_rep}, {"best_station", o.best_station},
                    {"has_station", o.has_station}};
    if (std::isfinite(o.max_sinr)) {
      outcome["max_sinr"] = o.max_sinr;
    } else {
      outcome["max_sinr"] = nullptr;
    }
    rec["outcome"] = std::move(outcome);
    out << rec.dump() << '\n';
  }
}

}  // namespace unb::sim
