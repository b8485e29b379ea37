#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "unb/analytic.hpp"
#include "unb/simulate.hpp"

using namespace unb;
using namespace unb::sim;

namespace {

ProtocolSpec spec(Protocol p, Hopping h = Hopping::Random) {
  ProtocolSpec s;
  s.protocol = p;
  s.hopping = h;
  return s;
}

// Small span and short period so that collisions are frequent enough to count.
NetworkConfig crowded(int reps = 1) {
  NetworkConfig net;
  net.signal_bw_hz = 600.0;
  net.band_bw_hz = 6000.0;
  net.bands = 1;
  net.repetitions = reps;
  net.packets_per_period = 1;
  net.tx_duration_s = 1.0;
  net.period_s = 10.0;
  return net;
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("HPPP: empty at zero density, points inside the disc") {
    Rng rng(1, 0, 0);
    CHECK(sample_hppp(0.0, 10.0, rng).empty());
    for (const auto& p : sample_hppp(2.0, 3.0, rng)) CHECK(std::hypot(p.x, p.y) <= 3.0);
    CHECK_THROWS_AS(sample_hppp(-1.0, 1.0, rng), std::invalid_argument);
  }

  TEST_CASE("HPPP count has Poisson mean and variance") {
    const double radius = 5.0;
    const double density = 100.0 / (std::numbers::pi * radius * radius);
    double sum = 0.0;
    double sq = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      Rng rng(7, static_cast<std::uint64_t>(i), 0);
      const double n = static_cast<double>(sample_hppp(density, radius, rng).size());
      sum += n;
      sq += n * n;
    }
    const double mean = sum / draws;
    const double var = sq / draws - mean * mean;
    CHECK(std::abs(mean - 100.0) / 100.0 < 0.02);
    CHECK(std::abs(var - mean) / mean < 0.05);
  }

  TEST_CASE("HPPP points are uniform over the disc area") {
    Rng rng(3, 0, 0);
    const auto pts = sample_hppp(50.0, 4.0, rng);
    int inner = 0;
    for (const auto& p : pts) inner += std::hypot(p.x, p.y) < 2.0;
    // A quarter of the area lies within half the radius.
    CHECK(static_cast<double>(inner) / pts.size() == doctest::Approx(0.25).epsilon(0.05));
  }

  TEST_CASE("repetitions are back to back") {
    NetworkConfig net;
    Rng rng(5, 0, 0);
    const auto pkt = generate_traffic(net, {false, false}, Hopping::Random, rng);
    REQUIRE(pkt.reps.size() == 3);
    for (int n = 1; n < 3; ++n) {
      CHECK(pkt.reps[n].start - pkt.reps[n - 1].start == doctest::Approx(net.tx_duration_s));
    }
    CHECK(pkt.reps[0].start >= 0.0);
    CHECK(pkt.reps[0].start < net.period_s);
    for (const auto& tx : pkt.reps) {
      CHECK(tx.carrier >= 0.0);
      CHECK(tx.carrier < net.bands * net.band_bw_hz);
    }
  }

  TEST_CASE("slotted access puts carriers and starts on the grid") {
    NetworkConfig net;
    for (int i = 0; i < 200; ++i) {
      Rng rng(6, static_cast<std::uint64_t>(i), 0);
      const auto pkt = generate_traffic(net, {true, true}, Hopping::Random, rng);
      for (const auto& tx : pkt.reps) {
        const double k = tx.carrier / net.signal_bw_hz - 0.5;
        CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-12));
        CHECK(static_cast<double>(tx.channel) == doctest::Approx(std::round(k)));
        CHECK(tx.start == doctest::Approx(static_cast<double>(tx.slot) * net.tx_duration_s));
      }
    }
  }

  TEST_CASE("PN: shared pattern collides in every repetition, distinct patterns never do") {
    NetworkConfig net;
    const TrafficModel model(net, {true, true}, Hopping::PN, BandMode::Wideband);
    const AccessMode access{true, true};
    for (std::int64_t k = 0; k < 50; ++k) {
      Packet a;
      Packet b;
      Packet c;
      model.set_times(100.0, a);
      model.set_times(100.0, b);
      model.set_times(100.0, c);
      model.set_pattern(static_cast<double>(k * 37 % model.channels()), a);
      model.set_pattern(a.pattern, b);
      model.set_pattern(static_cast<double>((k * 37 + 1 + k) % model.channels()), c);
      int shared = 0;
      int distinct = 0;
      for (int n = 0; n < net.repetitions; ++n) {
        shared += overlap(a.reps[n], b.reps[n], access, net);
        distinct += overlap(a.reps[n], c.reps[n], access, net);
      }
      CHECK(shared == net.repetitions);
      CHECK(distinct == 0);
      CHECK(model.pn_collide(a, b));
      CHECK_FALSE(model.pn_collide(a, c));
    }
  }

  TEST_CASE("overlap is strict and symmetric") {
    NetworkConfig net;
    const AccessMode open{false, false};
    Transmission a;
    a.start = 10.0;
    a.carrier = 5000.0;
    Transmission b = a;
    b.start = a.start + net.tx_duration_s;
    CHECK_FALSE(overlap(a, b, open, net));
    b.start = a.start + 0.999 * net.tx_duration_s;
    CHECK(overlap(a, b, open, net));
    b.carrier = a.carrier + net.signal_bw_hz;
    CHECK_FALSE(overlap(a, b, open, net));
    b.carrier = a.carrier - 0.5 * net.signal_bw_hz;
    CHECK(overlap(a, b, open, net));
    CHECK(overlap(b, a, open, net));

    const AccessMode grid{true, true};
    Transmission c;
    Transmission d;
    c.slot = d.slot = 4;
    c.channel = 7;
    d.channel = 8;
    CHECK_FALSE(overlap(c, d, grid, net));
    d.channel = 7;
    CHECK(overlap(c, d, grid, net));
    CHECK(overlap(d, c, grid, net));
  }

  TEST_CASE("pairwise collision probability matches the access factors") {
    const auto net = crowded();
    const double span = net.bands * net.band_bw_hz;
    const double t = net.tx_duration_s;
    const double total = net.period_s;
    struct Case {
      AccessMode access;
      double expected;
    };
    // Unslotted: 2T/T_tot in time, 2b/W - (b/W)^2 in frequency (the square
    // term is the edge of the span, negligible when b << W).
    const double f_open = 2.0 * net.signal_bw_hz / span - std::pow(net.signal_bw_hz / span, 2);
    const Case cases[] = {
        {{false, false}, 2.0 * t / total * f_open},
        {{true, true}, t / total * net.signal_bw_hz / span},
        {{true, false}, t / total * f_open},
        {{false, true}, 2.0 * t / total * net.signal_bw_hz / span},
    };
    for (const auto& c : cases) {
      const TrafficModel model(net, c.access, Hopping::Random, BandMode::Wideband);
      Rng rng(9, 0, 0);
      const int pairs = 1'000'000;
      int hits = 0;
      for (int i = 0; i < pairs; ++i) {
        // Start times on a circle of length T_tot around the first packet.
        const double s = rng.uniform(0.0, 1e6);
        const auto a = model.draw(rng, s);
        const auto b = model.draw(rng, s + rng.uniform(-0.5 * total, 0.5 * total));
        hits += overlap(a.reps[0], b.reps[0], c.access, net);
      }
      const double p = static_cast<double>(hits) / pairs;
      CHECK(p == doctest::Approx(c.expected).epsilon(0.03));
    }
  }

  TEST_CASE("interfering UNB density matches the thinning formula") {
    // Count transmissions overlapping each typical repetition in a population
    // of packets arriving as a Poisson stream, and compare per unit device
    // density with N beta_T lambda_T beta_F b / (M B).
    auto net = crowded(3);
    net.beta_time = 2.0;
    net.beta_freq = 2.0;
    net.period_s = 40.0;
    const auto sc = make_scenario(net, IncumbentConfig{});
    const AccessMode access{false, false};
    const TrafficModel model(net, access, Hopping::Random, BandMode::Wideband);
    Rng rng(10, 0, 0);
    const double window = (net.repetitions + 1) * net.tx_duration_s;
    const double rate = net.packets_per_period / net.period_s;  // per device
    long hits = 0;
    long packets = 0;
    while (packets < 1'000'000) {
      const auto typ = model.draw(rng, 1000.0);
      for (int i = 0; i < 2000; ++i, ++packets) {
        const auto other = model.draw(rng, 1000.0 + rng.uniform(-window, window));
        for (const auto& tx : other.reps) hits += overlap(typ.reps[0], tx, access, net);
      }
    }
    const double per_device = static_cast<double>(hits) / packets * (2.0 * window) * rate;
    const double expected = sc.derived.unb_interferer_density / net.device_density;
    const double edge = 1.0 - net.signal_bw_hz / (2.0 * net.bands * net.band_bw_hz);
    CHECK(per_device == doctest::Approx(expected * edge).epsilon(0.03));
  }

  TEST_CASE("engine interferer counts match the thinned density") {
    NetworkConfig net = test::reference_net();
    net.bands = 1;
    const auto sc = make_scenario(net, IncumbentConfig{});
    SimConfig sim;
    sim.realizations = 1;
    sim.seed = 4;
    const Engine engine(sc, spec(Protocol::NoAssociation), sim);
    const double area = std::numbers::pi * engine.radius() * engine.radius();
    double total = 0.0;
    const int draws = 1500;
    for (int i = 0; i < draws; ++i) {
      const auto r = engine.draw(i);
      for (const auto& rep : r.interferers) total += static_cast<double>(rep.size());
    }
    const double mean = total / (draws * net.repetitions);
    const double edge = 1.0 - net.signal_bw_hz / (2.0 * net.bands * net.band_bw_hz);
    CHECK(mean == doctest::Approx(sc.derived.unb_interferer_density * area * edge).epsilon(0.03));
  }

  TEST_CASE("Wilson interval") {
    const auto [lo, hi] = wilson_interval(9000, 10000);
    CHECK(lo < 0.9);
    CHECK(hi > 0.9);
    CHECK(hi - lo < 0.015);
    const auto [lo0, hi0] = wilson_interval(0, 50);
    CHECK(lo0 == 0.0);
    CHECK(hi0 > 0.0);
    const auto [lo1, hi1] = wilson_interval(50, 50);
    CHECK(hi1 == doctest::Approx(1.0));
    CHECK(lo1 < 1.0);
  }

  TEST_CASE("estimates from recorded samples are monotone in the threshold") {
    const auto sc = test::reference_scenario(1);
    SimConfig sim;
    sim.realizations = 400;
    sim.record_sinr = true;
    const auto e = run(sc, spec(Protocol::NoAssociation), sim);
    REQUIRE(e.max_sinr.size() == 400);
    double last = 1.0;
    for (double db = -20.0; db <= 30.0; db += 1.0) {
      const auto at = estimate_at(e.max_sinr, db_to_linear(db));
      CHECK(at.p_hat <= last);
      CHECK(at.wilson_lo <= at.p_hat);
      CHECK(at.p_hat <= at.wilson_hi);
      last = at.p_hat;
    }
    CHECK(estimate_at(e.max_sinr, sc.net.sinr_threshold).successes == e.successes);
  }

  TEST_CASE("run is bitwise identical across worker counts") {
    const auto sc = test::reference_scenario(5, 5.0);
    for (auto proto : {spec(Protocol::NoAssociation), spec(Protocol::BandHopped),
                       spec(Protocol::NearestBS, Hopping::PN)}) {
      SimConfig sim;
      sim.realizations = 300;
      sim.seed = 77;
      sim.record_sinr = true;
      sim.workers = 1;
      const auto a = run(sc, proto, sim);
      sim.workers = 8;
      const auto b = run(sc, proto, sim);
      CHECK(a.successes == b.successes);
      CHECK(a.p_hat == b.p_hat);
      CHECK(a.no_station == b.no_station);
      CHECK(a.max_sinr == b.max_sinr);
      sim.seed = 78;
      CHECK(run(sc, proto, sim).max_sinr != a.max_sinr);
    }
  }

  TEST_CASE("without interference or noise every realization with a BS succeeds") {
    NetworkConfig net = test::reference_net();
    net.device_density = 0.0;
    net.bs_density = 0.002;
    const auto sc = make_scenario(net, IncumbentConfig{});
    SimConfig sim;
    sim.realizations = 500;
    sim.noise_enabled = false;
    sim.region_radius = 20.0;
    const auto e = run(sc, spec(Protocol::NoAssociation), sim);
    CHECK(e.no_station > 0);
    CHECK(e.successes == e.realizations - e.no_station);

    // With noise on, success needs h x^-alpha / P^_N >= tau.
    NetworkConfig loud = net;
    loud.noise_power_w = loud.tx_power_w * 1e-3;
    sim.noise_enabled = true;
    const auto n = run(make_scenario(loud, IncumbentConfig{}), spec(Protocol::NoAssociation), sim);
    CHECK(n.successes < e.successes);
  }

  TEST_CASE("with a single BS nearest and no-association agree") {
    NetworkConfig net = test::reference_net();
    net.bs_density = 0.003;
    const auto sc = make_scenario(net, lora_type1(net, 1000.0));
    SimConfig sim;
    sim.region_radius = 12.0;
    const Engine near(sc, spec(Protocol::NearestBS), sim);
    const Engine none(sc, spec(Protocol::NoAssociation), sim);
    int singles = 0;
    for (int i = 0; i < 400; ++i) {
      const auto r = near.draw(i);
      if (r.stations.size() != 1) continue;
      ++singles;
      const auto a = near.evaluate(r);
      const auto b = none.evaluate(none.draw(i));
      CHECK(a.max_sinr == b.max_sinr);
      CHECK(a.best_rep == b.best_rep);
    }
    CHECK(singles > 50);
  }

  TEST_CASE("fading has unit mean and is strictly positive") {
    const auto sc = test::reference_scenario();
    const Engine engine(sc, spec(Protocol::NoAssociation), SimConfig{});
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double h = engine.fading(i, i % 3, static_cast<std::uint64_t>(i) * 7, i % 11);
      CHECK(h > 0.0);
      sum += h;
    }
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
  }

  TEST_CASE("realizations respect the region and the access grid") {
    const auto sc = test::reference_scenario(5, 0.0);
    SimConfig sim;
    const Engine engine(sc, spec(Protocol::BandHopped), sim);
    for (int i = 0; i < 20; ++i) {
      const auto r = engine.draw(i);
      for (std::size_t j = 1; j < r.stations.size(); ++j) {
        CHECK(r.stations[j - 1].distance <= r.stations[j].distance);
      }
      for (const auto& st : r.stations) {
        CHECK(st.distance <= r.radius);
        CHECK(st.band >= 0);
        CHECK(st.band < 5);
      }
      for (std::size_t n = 0; n < r.interferers.size(); ++n) {
        for (const auto& it : r.interferers[n]) CHECK(std::hypot(it.pos.x, it.pos.y) <= r.radius);
      }
      for (const auto& tx : r.typical.reps) {
        CHECK(tx.band == static_cast<int>(tx.carrier / sc.net.band_bw_hz));
      }
    }
  }

  TEST_CASE("band-constrained keeps all repetitions in one band") {
    const auto sc = test::reference_scenario(5, 0.0);
    const Engine engine(sc, spec(Protocol::BandConstrained), SimConfig{});
    for (int i = 0; i < 50; ++i) {
      const auto r = engine.draw(i);
      for (const auto& tx : r.typical.reps) CHECK(tx.band == r.typical.reps[0].band);
    }
  }

  TEST_CASE("protocol ordering at matched parameters") {
    const auto sc = test::reference_scenario(5, 10.0);
    SimConfig sim;
    sim.realizations = 2000;
    sim.seed = 31;
    const auto bench = run(sc, spec(Protocol::BenchmarkMultiband), sim);
    const auto bh = run(sc, spec(Protocol::BandHopped), sim);
    const auto bc = run(sc, spec(Protocol::BandConstrained), sim);
    const auto none = run(sc, spec(Protocol::NoAssociation), sim);
    const auto near = run(sc, spec(Protocol::NearestBS), sim);
    auto width = [](const SuccessEstimate& e) { return e.wilson_hi - e.wilson_lo; };
    CHECK(bench.p_hat >= bh.p_hat - width(bh));
    CHECK(bh.p_hat >= bc.p_hat - width(bc));
    CHECK(none.p_hat >= near.p_hat - width(near));
  }

  TEST_CASE("single-band no-association agrees with the closed form") {
    const auto sc = single_band(test::reference_scenario(5, 0.0));
    SimConfig sim;
    sim.realizations = 10000;
    sim.seed = 5;
    const auto e = run(sc, spec(Protocol::NoAssociation), sim);
    const double ps = analytic::ps_no_assoc(sc).value;
    CHECK(e.wilson_lo <= ps);
    CHECK(ps <= e.wilson_hi);
  }

  TEST_CASE("default region radius covers many BS spacings") {
    const auto sc = test::reference_scenario();
    const double r = default_region_radius(sc);
    CHECK(r >= 10.0 / std::sqrt(std::numbers::pi * sc.net.bs_density));
    const Engine engine(sc, spec(Protocol::NoAssociation), SimConfig{});
    CHECK(engine.radius() == r);
    SimConfig fixed;
    fixed.region_radius = 7.5;
    CHECK(Engine(sc, spec(Protocol::NoAssociation), fixed).radius() == 7.5);
  }

  TEST_CASE("invalid simulation settings are rejected") {
    const auto sc = test::reference_scenario();
    SimConfig sim;
    sim.realizations = 0;
    CHECK_THROWS_AS(run(sc, spec(Protocol::NoAssociation), sim), std::invalid_argument);
    sim.realizations = 10;
    sim.region_radius = -1.0;
    CHECK_THROWS_AS(run(sc, spec(Protocol::NoAssociation), sim), std::invalid_argument);
    CHECK_THROWS_AS(run(sc, spec(Protocol::BandHopped, Hopping::PN), SimConfig{}), ConfigError);
  }

  TEST_CASE("realization dump is one JSON object per line") {
    const auto sc = test::reference_scenario(5, 0.0);
    SimConfig sim;
    sim.realizations = 10;
    std::ostringstream out;
    dump_realizations(sc, spec(Protocol::BandHopped), sim, 3, out);
    std::istringstream in(out.str());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.at("realization").get<int>() == lines);
      CHECK(j.at("radius_km").get<double>() > 0.0);
      CHECK(j.at("stations").is_array());
      CHECK(j.at("typical").at("reps").size() == 3);
      CHECK(j.at("interferers").size() == 3);
      CHECK(j.at("outcome").contains("max_sinr"));
      CHECK(j.at("outcome").contains("has_station"));
      ++lines;
    }
    CHECK(lines == 3);
  }
}
