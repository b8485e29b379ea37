#ifndef UNB_ANALYTIC_HPP
#define UNB_ANALYTIC_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "unb/model.hpp"

namespace unb::analytic {

/// A success probability. `degenerate` marks inputs where the closed form is
/// undefined and a limit value was returned (no BS at all, or no interferer in
/// an interference-limited model).
struct Probability {
  double value = 0.0;
  bool degenerate = false;
};

/// Supportable device density (per km^2). Negative closed-form values are
/// clamped to zero and flagged.
struct Capacity {
  double density = 0.0;
  bool clamped = false;
};

/// Exact binomial coefficient, n <= 62.
std::uint64_t binomial(int n, int k);

/// H_n = sum_{k=1..n} 1/k. Throws std::invalid_argument for n < 1.
double harmonic(int n);

// Interference-limited closed forms (noise ignored).
Probability ps_nearest(const Scenario& sc);
Probability ps_no_assoc(const Scenario& sc);
Probability ps_pn_nearest(const Scenario& sc);
Probability ps_pn_no_assoc(const Scenario& sc);

/// Band-constrained multiband access; each BS listens to band m with
/// probability p[m]. Throws std::invalid_argument if p is not on the simplex.
Probability ps_band_constrained(const Scenario& sc, std::span<const double> p);

/// One way of spreading N transmissions over M bands.
struct Composition {
  std::vector<int> counts;
  double weight = 0.0;  // N! / (n_1! ... n_M!) / M^N
};

/// All compositions of N into M non-negative parts with multinomial weights.
class CompositionTable {
 public:
  static constexpr std::size_t kMaxEntries = 1'000'000;

  CompositionTable(int repetitions, int bands);

  int repetitions() const noexcept { return repetitions_; }
  int bands() const noexcept { return bands_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Composition>& entries() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

 private:
  int repetitions_;
  int bands_;
  std::vector<Composition> entries_;
};

/// Throws std::length_error when C(N+M-1, M-1) exceeds kMaxEntries.
CompositionTable compositions(int repetitions, int bands);

Probability ps_band_hopped(const Scenario& sc, std::span<const double> p);
Probability ps_band_hopped(const Scenario& sc, std::span<const double> p,
                           const CompositionTable& table);

/// Dispatch on protocol and hopping. Benchmark multiband is the
/// no-association formula over all M bands.
Probability success_probability(const Scenario& sc, const ProtocolSpec& proto);

// Transmission capacity C(gamma) = gamma * F^{-1}(gamma). gamma in (0, 1).
Capacity tc_nearest(double gamma, const Scenario& sc);  // requires N = 1
Capacity tc_no_assoc(double gamma, const Scenario& sc);
/// Uniform band selection. Type-I, or Type-II with identical bands.
Capacity tc_band_constrained(double gamma, const Scenario& sc);

/// Capacity by numerically inverting success_probability in lambda_IoT.
/// Works for every protocol, including those without a closed form.
Capacity tc_numeric(double gamma, const Scenario& sc, const ProtocolSpec& proto);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

/// Success probability with the noise term kept, by adaptive Gauss-Kronrod
/// quadrature of the radial integral. Random hopping, NearestBS or
/// NoAssociation only.
QuadratureResult ps_exact_with_noise(const Scenario& sc, Protocol protocol);

/// SINR threshold (dB) at which the success probability equals `target`.
/// target = 0.5 gives the median of the packet's best SINR.
double threshold_for_success_db(const Scenario& sc, const ProtocolSpec& proto, double target);

}  // namespace unb::analytic

#endif  // UNB_ANALYTIC_HPP
