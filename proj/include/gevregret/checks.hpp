#pragma once

#include <vector>

#include "gevregret/gev.hpp"

namespace gevregret {

// Central-difference gradient of the surplus; the independent check that
// choice_probs really is the gradient map.
std::vector<double> fd_gradient(const GevModel& m,
                                const std::vector<double>& theta, double eta,
                                double step = 1e-5);

// Finite-difference curvature summary at theta.  Two smoothness certificates
// are reported because they differ: twice the Hessian trace (the textbook
// sufficient constant, which can exceed L/eta — e.g. plain logit with more
// than two alternatives at theta = 0) and the max-column-absolute-sum norm,
// which the gradient's Lipschitz property does bound by L/eta.
struct HessianReport {
  double trace = 0.0;
  double two_trace = 0.0;
  double col_norm = 0.0;        // max_j sum_i |H_ij|
  double lip_over_eta = 0.0;    // L / eta
  double two_trace_slack = 0.0; // L/eta - 2 trace  (may be negative)
  double col_norm_slack = 0.0;  // L/eta - col_norm (expected nonnegative)
};
HessianReport hessian_trace_check(const GevModel& m,
                                  const std::vector<double>& theta, double eta,
                                  double step = 1e-4);

// surplus(theta + u) - surplus(theta) - <choice_probs(theta), u>.
double bregman_divergence(const GevModel& m, const std::vector<double>& theta,
                          const std::vector<double>& u, double eta);

}  // namespace gevregret
