#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace gevregret {

// Max-subtracted log(sum(exp(v))): safe for inputs anywhere in the double
// range, -inf entries ignored, -inf when the whole range is -inf.
inline double logsumexp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Kahan compensated accumulator; keeps 1e6-round payoff sums from drifting.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

}  // namespace gevregret
