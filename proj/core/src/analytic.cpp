#include "unb/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "wide_float.hpp"

namespace unb::analytic {
namespace {

using detail::wide;

// H_0 = 0 is allowed here; empty bands contribute nothing.
double harmonic_number(int n) {
  double h = 0.0;
  for (int k = n; k >= 1; --k) h += 1.0 / k;
  return h;
}

double interference_density(const Scenario& sc) {
  return sc.derived.unb_interferer_density + sc.derived.incumbent_term;
}

// xi^{-1} tau^delta: converts an interferer density into an "exclusion" density.
double threshold_scale(const Scenario& sc) {
  return std::pow(sc.net.sinr_threshold, sc.derived.delta) / sc.derived.xi;
}

void check_simplex(std::span<const double> p, int bands) {
  if (p.size() != static_cast<std::size_t>(bands)) {
    throw std::invalid_argument("band probability vector must have M entries");
  }
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("band probabilities must be finite and non-negative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("band probabilities must sum to 1");
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("success constraint gamma must lie in (0, 1)");
  }
}

// sum_{k=1..N} C(N,k) (-1)^{k+1} term(k), accumulated in extended precision.
template <typename Term>
wide alternating_sum(int n, Term term) {
  detail::WideSum acc;
  for (int k = 1; k <= n; ++k) {
    const wide c = static_cast<wide>(binomial(n, k));
    const wide t = c * term(k);
    acc.add(k % 2 == 1 ? t : -t);
  }
  return acc.value();
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Shared closed form for the no-association style capacities, so that equal
// inputs yield bit-identical results across protocols.
Capacity capacity_form(double gamma, const Scenario& sc, double spectrum_hz,
                       double incumbent_term) {
  const auto& net = sc.net;
  const auto& d = sc.derived;
  const double n = net.repetitions;
  const double prefactor =
      gamma * spectrum_hz / (net.beta_time * net.beta_freq * net.signal_bw_hz * d.activity);
  const double bs_term = d.xi * std::pow(net.sinr_threshold, -d.delta) *
                         harmonic_number(net.repetitions) * net.bs_density /
                         (n * std::log(1.0 / (1.0 - gamma)));
  const double value = prefactor * (bs_term - incumbent_term / n);
  if (value < 0.0) return {0.0, true};
  return {value, false};
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (n < 0 || n > 62) throw std::invalid_argument("binomial: n out of range");
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step.
    r = r / i * (n - k + i) + r % i * (n - k + i) / i;
  }
  return r;
}

double harmonic(int n) {
  if (n < 1) throw std::invalid_argument("harmonic number needs n >= 1");
  return harmonic_number(n);
}

Probability ps_nearest(const Scenario& sc) {
  const double bs = sc.net.bs_density;
  if (bs <= 0.0) return {0.0, true};
  const double u = threshold_scale(sc) * interference_density(sc) / bs;
  const wide sum = alternating_sum(sc.net.repetitions, [u](int k) {
    return wide(1) / (wide(1) + static_cast<wide>(k) * static_cast<wide>(u));
  });
  return {clamp01(static_cast<double>(sum)), false};
}

Probability ps_no_assoc(const Scenario& sc) {
  const double bs = sc.net.bs_density;
  if (bs <= 0.0) return {0.0, true};
  const double interferers = interference_density(sc);
  if (interferers <= 0.0) return {1.0, true};
  const double x = std::pow(sc.net.sinr_threshold, -sc.derived.delta) * sc.derived.xi *
                   harmonic_number(sc.net.repetitions) * bs / interferers;
  return {-std::expm1(-x), false};
}

Probability ps_pn_nearest(const Scenario& sc) {
  // One transmission has no pattern to share.
  if (sc.net.repetitions == 1) return ps_nearest(sc);
  const double bs = sc.net.bs_density;
  if (bs <= 0.0) return {0.0, true};
  const wide scale = static_cast<wide>(threshold_scale(sc)) / static_cast<wide>(bs);
  const wide unb = sc.derived.unb_interferer_density;
  const wide inc = sc.derived.incumbent_term;
  const wide delta = sc.derived.delta;
  const wide sum = alternating_sum(sc.net.repetitions, [&](int k) {
    const wide kk = k;
    return wide(1) / (wide(1) + scale * (detail::wide_pow(kk, delta) * unb + kk * inc));
  });
  return {clamp01(static_cast<double>(sum)), false};
}

Probability ps_pn_no_assoc(const Scenario& sc) {
  if (sc.net.repetitions == 1) return ps_no_assoc(sc);
  const double bs = sc.net.bs_density;
  if (bs <= 0.0) return {0.0, true};
  if (interference_density(sc) <= 0.0) return {1.0, true};
  const wide unb = sc.derived.unb_interferer_density;
  const wide inc = sc.derived.incumbent_term;
  const wide delta = sc.derived.delta;
  const wide sum = alternating_sum(sc.net.repetitions, [&](int k) {
    const wide kk = k;
    return wide(1) / (detail::wide_pow(kk, delta) * unb + kk * inc);
  });
  const double x = sc.derived.xi * std::pow(sc.net.sinr_threshold, -sc.derived.delta) * bs *
                   static_cast<double>(sum);
  return {clamp01(-std::expm1(-x)), false};
}

Probability ps_band_constrained(const Scenario& sc, std::span<const double> p) {
  const int bands = sc.net.bands;
  check_simplex(p, bands);
  const double bs = sc.net.bs_density;
  if (bs <= 0.0) return {0.0, true};
  const double gain = sc.derived.xi * std::pow(sc.net.sinr_threshold, -sc.derived.delta) *
                      harmonic_number(sc.net.repetitions);
  bool degenerate = false;
  double miss = 0.0;
  for (int m = 0; m < bands; ++m) {
    const double listening = p[m] * bs;
    const double den = sc.derived.unb_interferer_density + sc.derived.band_incumbent_terms[m];
    if (listening <= 0.0) {
      miss += 1.0;
    } else if (den <= 0.0) {
      degenerate = true;
    } else {
      miss += std::exp(-gain * listening / den);
    }
  }
  return {clamp01(1.0 - miss / bands), degenerate};
}

CompositionTable::CompositionTable(int repetitions, int bands)
    : repetitions_(repetitions), bands_(bands) {
  if (repetitions < 1 || bands < 1) {
    throw std::invalid_argument("compositions need N >= 1 and M >= 1");
  }
  using boost::multiprecision::cpp_int;
  // Guard on C(N+M-1, M-1) before enumerating.
  cpp_int count = 1;
  for (int i = 1; i < bands; ++i) {
    count = count * (repetitions + i) / i;
    if (count > kMaxEntries) {
      std::ostringstream os;
      os << "band-hopped success probability needs more than " << kMaxEntries
         << " compositions for N=" << repetitions << ", M=" << bands
         << "; use the Monte Carlo engine instead";
      throw std::length_error(os.str());
    }
  }
  entries_.reserve(count.convert_to<std::size_t>());

  cpp_int total = 1;
  for (int i = 0; i < repetitions; ++i) total *= bands;
  const long double total_ld = total.convert_to<long double>();

  std::vector<int> counts(bands, 0);
  auto recurse = [&](auto&& self, int m, int remaining, const cpp_int& coeff) -> void {
    if (m == bands - 1) {
      counts[m] = remaining;
      entries_.push_back({counts, static_cast<double>(coeff.convert_to<long double>() / total_ld)});
      return;
    }
    for (int n = remaining; n >= 0; --n) {
      counts[m] = n;
      self(self, m + 1, remaining - n, coeff * binomial(remaining, n));
    }
  };
  recurse(recurse, 0, repetitions, cpp_int(1));
}

CompositionTable compositions(int repetitions, int bands) {
  return CompositionTable(repetitions, bands);
}

Probability ps_band_hopped(const Scenario& sc, std::span<const double> p) {
  return ps_band_hopped(sc, p, compositions(sc.net.repetitions, sc.net.bands));
}

Probability ps_band_hopped(const Scenario& sc, std::span<const double> p,
                           const CompositionTable& table) {
  const int bands = sc.net.bands;
  check_simplex(p, bands);
  if (table.bands() != bands || table.repetitions() != sc.net.repetitions) {
    throw std::invalid_argument("composition table does not match N and M");
  }
  const double bs = sc.net.bs_density;
  if (bs <= 0.0) return {0.0, true};
  const double gain = sc.derived.xi * std::pow(sc.net.sinr_threshold, -sc.derived.delta);
  std::vector<double> per_band(bands);
  bool degenerate = false;
  for (int m = 0; m < bands; ++m) {
    const double den = sc.derived.unb_interferer_density + sc.derived.band_incumbent_terms[m];
    if (den <= 0.0) {
      per_band[m] = p[m] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      degenerate = degenerate || p[m] > 0.0;
    } else {
      per_band[m] = gain * p[m] * bs / den;
    }
  }
  double success = 0.0;
  for (const auto& c : table) {
    double exponent = 0.0;
    for (int m = 0; m < bands; ++m) {
      if (c.counts[m] > 0 && per_band[m] > 0.0) exponent += harmonic_number(c.counts[m]) * per_band[m];
    }
    success += c.weight * -std::expm1(-exponent);
  }
  return {clamp01(success), degenerate};
}

Probability success_probability(const Scenario& sc, const ProtocolSpec& proto) {
  const bool pn = proto.hopping == Hopping::PN;
  switch (proto.protocol) {
    case Protocol::NearestBS:
      return pn ? ps_pn_nearest(sc) : ps_nearest(sc);
    case Protocol::NoAssociation:
      return pn ? ps_pn_no_assoc(sc) : ps_no_assoc(sc);
    case Protocol::BenchmarkMultiband:
      if (pn) break;
      return ps_no_assoc(sc);
    case Protocol::BandConstrained:
      if (pn) break;
      return ps_band_constrained(sc, resolve_band_probs(proto, sc.net.bands));
    case Protocol::BandHopped:
      if (pn) break;
      return ps_band_hopped(sc, resolve_band_probs(proto, sc.net.bands));
  }
  throw std::invalid_argument("PN hopping is only defined for nearest-BS and no-association");
}

Capacity tc_nearest(double gamma, const Scenario& sc) {
  check_gamma(gamma);
  if (sc.net.repetitions != 1) {
    throw std::invalid_argument("closed-form nearest-BS capacity requires N = 1; use tc_numeric");
  }
  const auto& net = sc.net;
  const auto& d = sc.derived;
  const double prefactor = gamma * net.bands * net.band_bw_hz /
                           (net.beta_time * net.beta_freq * net.signal_bw_hz * d.activity);
  const double bs_term = d.xi * std::pow(net.sinr_threshold, -d.delta) * net.bs_density /
                         (gamma / (1.0 - gamma));
  const double value = prefactor * (bs_term - d.incumbent_term);
  if (value < 0.0) return {0.0, true};
  return {value, false};
}

Capacity tc_no_assoc(double gamma, const Scenario& sc) {
  check_gamma(gamma);
  return capacity_form(gamma, sc, sc.net.bands * sc.net.band_bw_hz, sc.derived.incumbent_term);
}

Capacity tc_band_constrained(double gamma, const Scenario& sc) {
  check_gamma(gamma);
  const double bands = sc.net.bands;
  double incumbent = 0.0;
  if (sc.inc.kind == IncumbentKind::TypeI) {
    // M * min{1, B_I/(M B)} written as min{M, B_I/B}.
    const auto& w = sc.inc.wideband;
    const double scaled = std::pow(sc.derived.incumbent_power_ratio.front(), sc.derived.delta);
    incumbent = scaled * (std::min(bands, w.bandwidth_hz / sc.net.band_bw_hz) * w.density);
  } else {
    const auto& terms = sc.derived.band_incumbent_terms;
    if (std::adjacent_find(terms.begin(), terms.end(), std::not_equal_to<>()) != terms.end()) {
      throw std::invalid_argument(
          "closed-form band-constrained capacity needs identical bands; use tc_numeric");
    }
    incumbent = bands * terms.front();
  }
  return capacity_form(gamma, sc, sc.net.band_bw_hz, incumbent);
}

Capacity tc_numeric(double gamma, const Scenario& sc, const ProtocolSpec& proto) {
  check_gamma(gamma);
  auto ps_at = [&](double device_density) {
    NetworkConfig net = sc.net;
    net.device_density = device_density;
    return success_probability(make_scenario(net, sc.inc), proto).value;
  };
  if (ps_at(0.0) < gamma) return {0.0, true};
  double lo = 0.0;
  double hi = std::max(1.0, sc.net.device_density);
  while (ps_at(hi) >= gamma) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) throw std::domain_error("capacity search diverged");
  }
  std::uintmax_t iterations = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      [&](double x) { return ps_at(x) - gamma; }, lo, hi,
      boost::math::tools::eps_tolerance<double>(45), iterations);
  return {gamma * 0.5 * (a + b), false};
}

QuadratureResult ps_exact_with_noise(const Scenario& sc, Protocol protocol) {
  if (protocol != Protocol::NearestBS && protocol != Protocol::NoAssociation) {
    throw std::invalid_argument("noise-aware quadrature supports nearest-BS and no-association only");
  }
  const double bs = sc.net.bs_density;
  if (bs <= 0.0) return {0.0, 0.0, true};
  const int n = sc.net.repetitions;
  const double u = threshold_scale(sc) * interference_density(sc) / bs;
  // Noise exponent at normalized area s = pi lambda_B x^2.
  const double noise_coeff = sc.net.sinr_threshold * sc.derived.noise_ratio;
  const double half_alpha = 0.5 * sc.net.path_loss_exp;
  const double area_unit = std::numbers::pi * bs;
  auto exponent = [=](double s) {
    double z = u * s;
    if (noise_coeff > 0.0) z += noise_coeff * std::pow(s / area_unit, half_alpha);
    return z;
  };

  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  constexpr double kAbsTol = 1e-9;

  double scale = std::numeric_limits<double>::infinity();
  if (u > 0.0) scale = 1.0 / u;
  if (noise_coeff > 0.0) {
    scale = std::min(scale, area_unit * std::pow(noise_coeff, -1.0 / half_alpha));
  }
  // Panels growing geometrically from the scale where the integrand turns,
  // so a sharp edge near zero is never stepped over.
  auto integrate = [&](auto&& f, double upper, double* err) {
    double total = 0.0;
    *err = 0.0;
    double a = 0.0;
    double b = std::isfinite(scale) ? std::min(upper, scale) : upper;
    while (a < upper) {
      double e = 0.0;
      total += GK::integrate(f, a, b, 10, 1e-12, &e);
      *err += e;
      a = b;
      b = std::min(upper, 10.0 * b);
    }
    return total;
  };

  if (protocol == Protocol::NearestBS) {
    // Failure probability: integral of e^{-s} (1 - e^{-z(s)})^N.
    auto f = [&](double s) {
      return std::exp(-s) * std::pow(-std::expm1(-exponent(s)), n);
    };
    double upper = 40.0;
    double err = 0.0;
    double value = integrate(f, upper, &err);
    while (std::exp(-upper) > 1e-12 * value && upper < 700.0) {
      upper += 40.0;
      value = integrate(f, upper, &err);
    }
    err += std::exp(-upper);
    return {clamp01(1.0 - value), err, err <= kAbsTol};
  }

  if (u <= 0.0 && noise_coeff <= 0.0) return {1.0, 0.0, true};
  // E = integral of 1 - (1 - e^{-z(s)})^N; log1p form keeps the tail accurate.
  auto g = [&](double s) {
    const double z = exponent(s);
    if (z == 0.0) return 1.0;
    return -std::expm1(n * std::log1p(-std::exp(-z)));
  };
  double upper = 40.0 * scale;
  double err = 0.0;
  double value = integrate(g, upper, &err);
  int doublings = 0;
  while (g(upper) * upper > 1e-12 * value && doublings < 60) {
    upper *= 2.0;
    ++doublings;
    value = integrate(g, upper, &err);
  }
  const double tail = g(upper) * upper;
  const double success = -std::expm1(-value);
  // dP/dE = e^{-E}, so the error in E maps directly.
  const double p_err = (err + tail) * std::exp(-value);
  return {clamp01(success), p_err, p_err <= kAbsTol};
}

double threshold_for_success_db(const Scenario& sc, const ProtocolSpec& proto, double target) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target must lie in (0, 1)");
  auto f = [&](double tau_db) {
    NetworkConfig net = sc.net;
    net.sinr_threshold = db_to_linear(tau_db);
    return success_probability(make_scenario(net, sc.inc), proto).value - target;
  };
  double lo = -150.0;
  double hi = 150.0;
  if (f(lo) < 0.0 || f(hi) > 0.0) {
    throw std::domain_error("target success probability not reachable for any threshold");
  }
  std::uintmax_t iterations = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(40), iterations);
  return 0.5 * (a + b);
}

}  // namespace unb::analytic
