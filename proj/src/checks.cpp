#include "gevregret/checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gevregret {

std::vector<double> fd_gradient(const GevModel& m,
                                const std::vector<double>& theta, double eta,
                                double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  std::vector<double> g(theta.size());
  std::vector<double> probe = theta;
  for (size_t j = 0; j < theta.size(); ++j) {
    probe[j] = theta[j] + step;
    double up = surplus(m, probe, eta);
    probe[j] = theta[j] - step;
    double down = surplus(m, probe, eta);
    probe[j] = theta[j];
    g[j] = (up - down) / (2.0 * step);
  }
  return g;
}

HessianReport hessian_trace_check(const GevModel& m,
                                  const std::vector<double>& theta, double eta,
                                  double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const int n = m.n();
  std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
  std::vector<double> probe = theta;
  const double center = surplus(m, theta, eta);
  for (int i = 0; i < n; ++i) {
    probe[i] = theta[i] + step;
    double up = surplus(m, probe, eta);
    probe[i] = theta[i] - step;
    double down = surplus(m, probe, eta);
    probe[i] = theta[i];
    h[i][i] = (up - 2.0 * center + down) / (step * step);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      probe[i] = theta[i] + step;
      probe[j] = theta[j] + step;
      double pp = surplus(m, probe, eta);
      probe[j] = theta[j] - step;
      double pm = surplus(m, probe, eta);
      probe[i] = theta[i] - step;
      double mm = surplus(m, probe, eta);
      probe[j] = theta[j] + step;
      double mp = surplus(m, probe, eta);
      probe[i] = theta[i];
      probe[j] = theta[j];
      h[i][j] = h[j][i] = (pp - pm - mp + mm) / (4.0 * step * step);
    }
  }
  HessianReport out;
  for (int i = 0; i < n; ++i) out.trace += h[i][i];
  out.two_trace = 2.0 * out.trace;
  for (int j = 0; j < n; ++j) {
    double col = 0.0;
    for (int i = 0; i < n; ++i) col += std::abs(h[i][j]);
    out.col_norm = std::max(out.col_norm, col);
  }
  out.lip_over_eta = m.lipschitz_constant(eta);
  out.two_trace_slack = out.lip_over_eta - out.two_trace;
  out.col_norm_slack = out.lip_over_eta - out.col_norm;
  return out;
}

double bregman_divergence(const GevModel& m, const std::vector<double>& theta,
                          const std::vector<double>& u, double eta) {
  if (u.size() != theta.size()) {
    throw std::invalid_argument("bregman_divergence: length mismatch");
  }
  std::vector<double> shifted(theta.size());
  for (size_t i = 0; i < theta.size(); ++i) shifted[i] = theta[i] + u[i];
  std::vector<double> grad = choice_probs(m, theta, eta);
  double inner = 0.0;
  for (size_t i = 0; i < theta.size(); ++i) inner += grad[i] * u[i];
  return surplus(m, shifted, eta) - surplus(m, theta, eta) - inner;
}

}  // namespace gevregret
