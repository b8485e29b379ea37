#ifndef UNB_WIDE_FLOAT_HPP
#define UNB_WIDE_FLOAT_HPP

// Extended precision used for alternating binomial sums, whose terms reach
// C(60, 30) ~ 1e17 and cancel to O(1).

#include <cmath>

#if defined(UNB_HAVE_QUADMATH)
extern "C" {
#include <quadmath.h>
}
#endif

namespace unb::detail {

#if defined(UNB_HAVE_QUADMATH)
using wide = __float128;
inline wide wide_pow(wide x, wide y) { return powq(x, y); }
#else
using wide = long double;
inline wide wide_pow(wide x, wide y) { return std::pow(x, y); }
#endif

/// Neumaier-compensated accumulator.
class WideSum {
 public:
  void add(wide x) {
    const wide t = sum_ + x;
    if (fabs_(sum_) >= fabs_(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  wide value() const { return sum_ + comp_; }

 private:
  static wide fabs_(wide x) { return x < 0 ? -x : x; }
  wide sum_ = 0;
  wide comp_ = 0;
};

}  // namespace unb::detail

#endif  // UNB_WIDE_FLOAT_HPP
