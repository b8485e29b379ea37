#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "oracles.hpp"
#include "unb/model.hpp"

using namespace unb;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("activity fraction of the reference traffic") {
    NetworkConfig net;
    net.packets_per_period = 6;
    net.tx_duration_s = 26.0 * 8.0 / 600.0;
    net.period_s = 3600.0;
    const auto d = derive_params(net, IncumbentConfig{});
    CHECK(d.activity == doctest::Approx(6.0 * 0.3466666666666667 / 3600.0).epsilon(1e-12));
    CHECK(d.activity == doctest::Approx(5.7778e-4).epsilon(1e-4));
  }

  TEST_CASE("alpha = 4 gives delta 1/2 and xi 2/pi") {
    NetworkConfig net;
    net.path_loss_exp = 4.0;
    const auto d = derive_params(net, IncumbentConfig{});
    CHECK(d.delta == 0.5);
    CHECK(d.xi == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-15));
  }

  TEST_CASE("Type-I incumbent density is thinned by the covered fraction of the span") {
    NetworkConfig net;  // M = 5, B = 200 kHz
    IncumbentConfig inc;
    inc.wideband = {125e3, 3.0};
    const auto d = derive_params(net, inc);
    CHECK(d.incumbent_density == doctest::Approx(0.125 * 3.0).epsilon(1e-15));
    CHECK(d.incumbent_density_total == doctest::Approx(125e3 / 200e3 * 3.0).epsilon(1e-15));

    inc.wideband.bandwidth_hz = 5e6;  // wider than the whole span
    CHECK(derive_params(net, inc).incumbent_density == doctest::Approx(3.0));
  }

  TEST_CASE("derived densities agree with an independent evaluation") {
    test::ConfigGen gen(11);
    for (int i = 0; i < 300; ++i) {
      const auto net = gen.net();
      const auto inc = gen.incumbents(net);
      const auto d = derive_params(net, inc);
      const auto r = test::ref_densities(net, inc);
      CHECK(d.delta == doctest::Approx(r.delta).epsilon(1e-14));
      CHECK(d.xi == doctest::Approx(r.xi).epsilon(1e-14));
      CHECK(d.unb_interferer_density == doctest::Approx(r.unb).epsilon(1e-12));
      CHECK(d.incumbent_term == doctest::Approx(r.incumbent).epsilon(1e-12));
      CHECK(d.incumbent_term_total == doctest::Approx(r.incumbent_total).epsilon(1e-12));
      REQUIRE(d.band_incumbent_terms.size() == r.band.size());
      for (std::size_t m = 0; m < r.band.size(); ++m) {
        CHECK(d.band_incumbent_terms[m] == doctest::Approx(r.band[m]).epsilon(1e-12));
      }
      CHECK(d.delta > 0.0);
      CHECK(d.delta < 1.0);
      CHECK(d.xi > 0.0);
      CHECK(d.xi < 1.0);
      CHECK(d.incumbent_density >= 0.0);
      CHECK(d.incumbent_density_total >= 0.0);
    }
  }

  TEST_CASE("thinned UNB density never exceeds the device density for realistic duty cycles") {
    test::ConfigGen gen(12);
    for (int i = 0; i < 300; ++i) {
      auto net = gen.net();
      // Keep N * beta_T * lambda_T below one, as for any deployable duty cycle.
      net.packets_per_period = 1;
      net.tx_duration_s = std::min(net.tx_duration_s, net.period_s / (4.0 * net.repetitions));
      const auto d = derive_params(net, IncumbentConfig{});
      CHECK(d.unb_interferer_density <= net.device_density);
    }
  }

  TEST_CASE("validation names alpha at the delta < 1 boundary") {
    NetworkConfig net;
    net.path_loss_exp = 2.0;
    const auto v = validate(net, IncumbentConfig{});
    CHECK(mentions(v, "alpha must exceed 2"));
  }

  TEST_CASE("Type-II list length must equal M") {
    NetworkConfig net;
    IncumbentConfig inc;
    inc.kind = IncumbentKind::TypeII;
    inc.per_band.assign(3, {125e3, 1.0});
    const auto v = validate(net, inc);
    CHECK(mentions(v, "3 entries but M = 5"));
  }

  TEST_CASE("reference configuration is valid") {
    const auto net = test::reference_net();
    CHECK(validate(net, lora_type1(net, 1000.0)).empty());
    CHECK(validate(net, lora_type2(net, {1000, 30000, 30000, 0, 0})).empty());
  }

  TEST_CASE("every violated invariant is reported at once") {
    NetworkConfig net;
    net.signal_bw_hz = 300e3;  // b > B
    net.beta_time = 3.0;
    net.repetitions = 0;
    net.packets_per_period = 100000;  // K T > T_tot
    try {
      derive_params(net, IncumbentConfig{});
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(mentions(e.violations(), "b must be smaller than B"));
      CHECK(mentions(e.violations(), "beta_t"));
      CHECK(mentions(e.violations(), "N (repetitions)"));
      CHECK(mentions(e.violations(), "duty-cycle"));
      CHECK(std::string(e.what()).find("beta_t") != std::string::npos);
    }
  }

  TEST_CASE("protocol checks: PN only for nearest and no-association, p on the simplex") {
    const NetworkConfig net;
    ProtocolSpec p;
    p.protocol = Protocol::BandHopped;
    p.hopping = Hopping::PN;
    CHECK(mentions(validate(net, IncumbentConfig{}, p), "PN hopping"));
    p.hopping = Hopping::Random;
    p.band_probs = {0.5, 0.5};
    CHECK(mentions(validate(net, IncumbentConfig{}, p), "M entries"));
    p.band_probs = {0.5, 0.5, 0.5, -0.5, 0.0};
    CHECK(mentions(validate(net, IncumbentConfig{}, p), "non-negative"));
    p.band_probs = {0.2, 0.2, 0.2, 0.2, 0.1};
    CHECK(mentions(validate(net, IncumbentConfig{}, p), "sum to 1"));
  }

  TEST_CASE("derivation is deterministic") {
    test::ConfigGen gen(13);
    for (int i = 0; i < 50; ++i) {
      const auto net = gen.net();
      const auto inc = gen.incumbents(net);
      const auto a = derive_params(net, inc);
      const auto b = derive_params(net, inc);
      CHECK(a.unb_interferer_density == b.unb_interferer_density);
      CHECK(a.incumbent_term == b.incumbent_term);
      CHECK(a.band_incumbent_terms == b.band_incumbent_terms);
      CHECK(a.incumbent_power_ratio == b.incumbent_power_ratio);
    }
  }

  TEST_CASE("scaling all powers by a common factor leaves the ratios unchanged") {
    test::ConfigGen gen(14);
    for (int i = 0; i < 100; ++i) {
      auto net = gen.net();
      net.noise_power_w = net.tx_power_w * gen.log_uniform(1e-20, 1e-10);
      auto inc = gen.incumbents(net);
      const auto a = derive_params(net, inc);
      const double f = gen.log_uniform(1e-3, 1e3);
      net.tx_power_w *= f;
      net.noise_power_w *= f;
      inc.tx_power_w *= f;
      const auto b = derive_params(net, inc);
      CHECK(b.noise_ratio == doctest::Approx(a.noise_ratio).epsilon(1e-13));
      REQUIRE(a.incumbent_power_ratio.size() == b.incumbent_power_ratio.size());
      for (std::size_t m = 0; m < a.incumbent_power_ratio.size(); ++m) {
        CHECK(b.incumbent_power_ratio[m] == doctest::Approx(a.incumbent_power_ratio[m]).epsilon(1e-13));
      }
      CHECK(b.incumbent_term == doctest::Approx(a.incumbent_term).epsilon(1e-13));
    }
  }

  TEST_CASE("single band: Type-I and Type-II describing the same network coincide") {
    test::ConfigGen gen(15);
    for (int i = 0; i < 100; ++i) {
      auto net = gen.net();
      net.bands = 1;
      const double bw = gen.uniform(5.0 * net.signal_bw_hz, net.band_bw_hz);
      const double lam = gen.log_uniform(1e-3, 10.0);
      IncumbentConfig one;
      one.kind = IncumbentKind::TypeI;
      one.wideband = {bw, lam};
      IncumbentConfig two;
      two.kind = IncumbentKind::TypeII;
      two.per_band = {{bw, lam}};
      const auto a = derive_params(net, one);
      const auto b = derive_params(net, two);
      CHECK(a.incumbent_density == doctest::Approx(b.incumbent_density).epsilon(1e-14));
      CHECK(a.incumbent_term == doctest::Approx(b.incumbent_term).epsilon(1e-14));
    }
  }

  TEST_CASE("single_band and with_net recompute derived values") {
    const auto sc = test::reference_scenario(5);
    const auto one = single_band(sc);
    CHECK(one.net.bands == 1);
    CHECK(one.derived.unb_interferer_density == doctest::Approx(5.0 * sc.derived.unb_interferer_density));

    auto inc2 = lora_type2(sc.net, {0, 1000});
    NetworkConfig two = sc.net;
    two.bands = 2;
    const auto sc2 = make_scenario(two, inc2);
    NetworkConfig four = two;
    four.bands = 4;
    const auto sc4 = with_net(sc2, four);
    REQUIRE(sc4.inc.per_band.size() == 4);
    CHECK(sc4.inc.per_band[3].density == sc2.inc.per_band[1].density);
  }

  TEST_CASE("band probabilities default to uniform") {
    ProtocolSpec p;
    const auto u = resolve_band_probs(p, 4);
    CHECK(u == std::vector<double>(4, 0.25));
    p.band_probs = {0.1, 0.9};
    CHECK(resolve_band_probs(p, 2) == p.band_probs);
  }

  TEST_CASE("dB conversions") {
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(db_to_linear(-3.0) == doctest::Approx(0.501187233627));
    CHECK(dbm_to_watts(14.0) == doctest::Approx(0.025118864315));
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0));
  }

  TEST_CASE("LoRa-like incumbents scale per-BS counts by activity and BS density") {
    const auto net = test::reference_net();
    const auto inc = lora_type1(net, 1000.0);
    const double lambda_t = net.packets_per_period * net.tx_duration_s / net.period_s;
    CHECK(inc.wideband.bandwidth_hz == 125e3);
    CHECK(inc.wideband.density == doctest::Approx(1000.0 * lambda_t * net.bs_density));
    const auto inc2 = lora_type2(net, {0, 10});
    CHECK(inc2.kind == IncumbentKind::TypeII);
    CHECK(inc2.per_band[0].density == 0.0);
  }
}
