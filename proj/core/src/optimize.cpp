#include "unb/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace unb::optimize {
namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
}

double repetition_lhs(int n) { return (1.0 + n) * analytic::harmonic(n) - n; }

double mapping_norm(std::span<const double> p, std::span<const double> g) {
  std::vector<double> step(p.size());
  for (std::size_t m = 0; m < p.size(); ++m) step[m] = p[m] - g[m];
  const auto proj = project_to_simplex(step);
  double s = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) s += (p[m] - proj[m]) * (p[m] - proj[m]);
  return std::sqrt(s);
}

}  // namespace

RepetitionChoice optimal_repetitions(const Scenario& sc, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  const auto& net = sc.net;
  const double per_rep = net.beta_time * net.beta_freq * net.signal_bw_hz /
                         (net.bands * net.band_bw_hz) * sc.derived.activity * net.device_density;
  if (!(per_rep > 0.0)) {
    throw std::domain_error(
        "UNB interferer density is zero, so the repetition rule is undefined; without "
        "incumbents either, N* = 1");
  }
  RepetitionChoice out;
  out.ratio = sc.derived.incumbent_term / per_rep;
  // The left side increases with N, so the first hit is the optimum.
  for (int n = 1; n <= n_max; ++n) {
    if (repetition_lhs(n) >= out.ratio) {
      out.repetitions = n;
      return out;
    }
  }
  out.repetitions = n_max;
  out.saturated = true;
  return out;
}

double min_resource_product(double eps, const Scenario& sc, Protocol scheme) {
  check_eps(eps);
  if (sc.net.repetitions != 1) {
    throw std::invalid_argument("resource bound is defined for N = 1 only");
  }
  double g = 0.0;
  if (scheme == Protocol::NearestBS) {
    g = eps / (1.0 - eps);
  } else if (scheme == Protocol::NoAssociation) {
    g = -std::log1p(-eps);
  } else {
    throw std::invalid_argument("resource bound needs the nearest-BS or no-association scheme");
  }
  const auto& net = sc.net;
  const double unb = net.beta_time * sc.derived.activity * net.beta_freq *
                     (net.signal_bw_hz / net.band_bw_hz) * net.device_density;
  const double c = (unb + sc.derived.incumbent_term_total) *
                   std::pow(net.sinr_threshold, sc.derived.delta) / sc.derived.xi;
  return c * g;
}

double bs_density_reduction(double eps) {
  check_eps(eps);
  return ((1.0 - eps) / eps) * -std::log1p(-eps);
}

std::vector<double> band_costs(const Scenario& sc) {
  const double gain = sc.derived.xi * std::pow(sc.net.sinr_threshold, -sc.derived.delta) *
                      analytic::harmonic(sc.net.repetitions) * sc.net.bs_density;
  std::vector<double> c(sc.net.bands);
  for (int m = 0; m < sc.net.bands; ++m) {
    const double den = sc.derived.unb_interferer_density + sc.derived.band_incumbent_terms[m];
    if (!(den > 0.0)) throw std::domain_error("band cost undefined: band has no interferers");
    c[m] = gain / den;
  }
  return c;
}

BandSolution optimize_band_constrained(std::span<const double> c) {
  if (c.empty()) throw std::invalid_argument("cost vector is empty");
  for (double v : c) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("band costs must be positive");
  }
  const std::size_t bands = c.size();
  auto fill = [&](double nu, std::vector<double>& p) {
    double sum = 0.0;
    for (std::size_t m = 0; m < bands; ++m) {
      p[m] = std::max(0.0, std::log(c[m] / nu) / c[m]);
      sum += p[m];
    }
    return sum;
  };

  // Bisect log(nu); the mass is strictly decreasing in nu.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : c) {
    lo = std::min(lo, std::log(v) - v);
    hi = std::max(hi, std::log(v));
  }
  BandSolution out;
  out.p.assign(bands, 0.0);
  int it = 0;
  for (; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fill(std::exp(mid), out.p) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.iterations = it;
  out.converged = hi - lo <= 1e-12;
  out.nu = std::exp(0.5 * (lo + hi));
  const double mass = fill(out.nu, out.p);
  for (double& v : out.p) v /= mass;

  double residual = 0.0;
  for (std::size_t m = 0; m < bands; ++m) {
    const double grad = c[m] * std::exp(-c[m] * out.p[m]);
    out.objective += std::exp(-c[m] * out.p[m]);
    const double gap = out.p[m] > 0.0 ? std::abs(grad - out.nu) : std::max(0.0, grad - out.nu);
    residual = std::max(residual, gap / std::max(1.0, out.nu));
  }
  out.kkt_residual = residual;
  return out;
}

HoppedObjective::HoppedObjective(const Scenario& sc) : bands_(sc.net.bands) {
  const analytic::CompositionTable table(sc.net.repetitions, bands_);
  const double gain = sc.derived.xi * std::pow(sc.net.sinr_threshold, -sc.derived.delta) *
                      sc.net.bs_density;
  std::vector<double> per_band(bands_);
  for (int m = 0; m < bands_; ++m) {
    const double den = sc.derived.unb_interferer_density + sc.derived.band_incumbent_terms[m];
    if (!(den > 0.0)) throw std::domain_error("band-hopped objective undefined: band has no interferers");
    per_band[m] = gain / den;
  }
  weights_.reserve(table.size());
  exponents_.reserve(table.size() * bands_);
  for (const auto& comp : table) {
    weights_.push_back(comp.weight);
    for (int m = 0; m < bands_; ++m) {
      const int n = comp.counts[m];
      exponents_.push_back(n > 0 ? analytic::harmonic(n) * per_band[m] : 0.0);
    }
  }
}

double HoppedObjective::value(std::span<const double> p) const {
  double f = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double* a = &exponents_[i * bands_];
    f += weights_[i] * std::exp(-std::inner_product(a, a + bands_, p.begin(), 0.0));
  }
  return f;
}

void HoppedObjective::gradient(std::span<const double> p, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double* a = &exponents_[i * bands_];
    const double e = weights_[i] * std::exp(-std::inner_product(a, a + bands_, p.begin(), 0.0));
    for (int m = 0; m < bands_; ++m) out[m] -= a[m] * e;
  }
}

BandSolution optimize_band_hopped(const Scenario& sc, const HoppedOptions& opts) {
  const HoppedObjective f(sc);
  const int bands = f.bands();
  std::vector<double> p(bands, 1.0 / bands);
  std::vector<double> g(bands);
  std::vector<double> trial(bands);
  std::vector<double> g_trial(bands);
  std::vector<double> shifted(bands);

  double fp = f.value(p);
  BandSolution out;
  if (!(fp > 0.0)) {
    // Every failure term underflows: all points are optimal in double precision.
    out.p = p;
    out.objective = fp;
    return out;
  }
  // Iterate on log f: the same minimizer, and well scaled when f is tiny.
  auto log_gradient = [&](std::span<const double> at, double value, std::span<double> grad) {
    f.gradient(at, grad);
    for (double& x : grad) x /= value;
  };
  log_gradient(p, fp, g);
  double lf = std::log(fp);
  out.converged = false;
  double step = 1.0;
  constexpr double kArmijo = 1e-4;

  int it = 0;
  double norm = mapping_norm(p, g);
  for (; it < opts.max_iterations; ++it) {
    if (norm < opts.tolerance) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      for (int m = 0; m < bands; ++m) shifted[m] = p[m] - step * g[m];
      trial = project_to_simplex(shifted);
      double descent = 0.0;
      for (int m = 0; m < bands; ++m) descent += g[m] * (trial[m] - p[m]);
      const double ft = f.value(trial);
      if (ft > 0.0 && std::log(ft) <= lf + kArmijo * descent) {
        accepted = true;
        log_gradient(trial, ft, g_trial);
        // Barzilai-Borwein step for the next trial.
        double ss = 0.0;
        double sy = 0.0;
        for (int m = 0; m < bands; ++m) {
          const double s = trial[m] - p[m];
          ss += s * s;
          sy += s * (g_trial[m] - g[m]);
        }
        step = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : std::min(step * 2.0, 1e12);
        p.swap(trial);
        g.swap(g_trial);
        fp = ft;
        lf = std::log(ft);
        break;
      }
      step *= 0.5;
    }
    norm = mapping_norm(p, g);
    // No representable descent left: the iterate is optimal to working precision.
    if (!accepted) {
      out.converged = norm < opts.tolerance;
      break;
    }
  }
  f.gradient(p, g);
  norm = mapping_norm(p, g);
  out.p = p;
  out.objective = fp;
  out.kkt_residual = norm;
  out.iterations = it;
  return out;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("cannot project an empty vector");
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t m = 0; m < v.size(); ++m) out[m] = std::max(0.0, v[m] - theta);
  return out;
}

}  // namespace unb::optimize
