#ifndef UNB_OPTIMIZE_HPP
#define UNB_OPTIMIZE_HPP

#include <span>
#include <vector>

#include "unb/analytic.hpp"
#include "unb/model.hpp"

namespace unb::optimize {

struct RepetitionChoice {
  int repetitions = 1;
  bool saturated = false;  // no N <= n_max met the rule; n_max returned
  double ratio = 0.0;      // incumbent-to-UNB interference ratio
};

/// Smallest N with (1 + N) H_N - N >= ratio. Equality counts as met: N and
/// N + 1 then give the same success probability and the cheaper one wins.
/// Throws std::domain_error when the UNB interferer density is zero.
RepetitionChoice optimal_repetitions(const Scenario& sc, int n_max);

/// Required M * lambda_B for success probability at least `eps`, N = 1.
/// `scheme` is NearestBS or NoAssociation.
double min_resource_product(double eps, const Scenario& sc, Protocol scheme);

/// BS density of no-association relative to nearest-BS at equal success.
double bs_density_reduction(double eps);

/// c_m = xi tau^-delta H_N lambda_B / (lambda~_IoT + band incumbent term).
std::vector<double> band_costs(const Scenario& sc);

struct BandSolution {
  std::vector<double> p;
  double objective = 0.0;  // failure probability being minimized
  double nu = 0.0;         // Lagrange multiplier (band-constrained only)
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = true;
};

/// Minimizes sum_m exp(-c_m p_m) over the simplex by bisection on the
/// multiplier. All c_m must be positive.
BandSolution optimize_band_constrained(std::span<const double> c);

/// Failure probability of the band-hopped protocol as a function of p:
/// f(p) = sum_i w_i exp(-a_i . p).
class HoppedObjective {
 public:
  explicit HoppedObjective(const Scenario& sc);

  int bands() const noexcept { return bands_; }
  double value(std::span<const double> p) const;
  void gradient(std::span<const double> p, std::span<double> out) const;

 private:
  int bands_;
  std::vector<double> weights_;
  std::vector<double> exponents_;  // row-major, one row of M per composition
};

struct HoppedOptions {
  double tolerance = 1e-8;  // on the gradient-mapping norm of log f
  int max_iterations = 100000;
};

/// Projected gradient on log f with Barzilai-Borwein trial steps and Armijo
/// backtracking. The reported KKT residual is the gradient-mapping norm of f. On hitting the iteration cap the best iterate is returned
/// with converged = false.
BandSolution optimize_band_hopped(const Scenario& sc, const HoppedOptions& opts = {});

/// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

}  // namespace unb::optimize

#endif  // UNB_OPTIMIZE_HPP
