#include "gevregret/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gevregret/numeric.hpp"

namespace gevregret {

namespace {

double phi_zero(const GevModel& m, BoundVariant variant) {
  double v = m.log_generator_at_ones();
  return variant == BoundVariant::kThm1 ? v + kEulerGamma : v;
}

}  // namespace

EtaBound optimal_eta(const GevModel& m, int64_t T, double u_max,
                     BoundVariant variant) {
  if (T < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(u_max > 0.0)) throw std::invalid_argument("u_max must be positive");
  if (m.log_generator_at_ones() <= 0.0) {
    throw std::invalid_argument(
        "degenerate model: log G(1) = 0 leaves nothing to trade off");
  }
  const double phi0 = phi_zero(m, variant);
  const double lip = m.lipschitz_numerator();
  EtaBound out;
  out.eta = u_max * std::sqrt(lip * static_cast<double>(T) / (2.0 * phi0));
  out.bound = u_max * std::sqrt(2.0 * phi0 * lip * static_cast<double>(T));
  return out;
}

double regret_bound_at(const GevModel& m, double eta, int64_t T, double u_max,
                       BoundVariant variant) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (T < 1) throw std::invalid_argument("horizon must be at least 1");
  return eta * phi_zero(m, variant) +
         m.lipschitz_numerator() / (2.0 * eta) * static_cast<double>(T) *
             u_max * u_max;
}

// ------------------------------------------------------------- SsaLearner

SsaLearner::SsaLearner(GevModel model, double eta, double u_max)
    : model_(std::move(model)), eta_(eta), u_max_(u_max) {
  if (!(eta_ > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(u_max_ > 0.0)) throw std::invalid_argument("u_max must be positive");
  theta_.assign(model_.n(), 0.0);
  x_ = choice_probs(model_, theta_, eta_);
}

void SsaLearner::check_payoff(const std::vector<double>& u) const {
  if (static_cast<int>(u.size()) != model_.n()) {
    throw std::invalid_argument("payoff length does not match the model");
  }
  for (size_t i = 0; i < u.size(); ++i) {
    if (!(std::abs(u[i]) <= u_max_)) {
      throw BoundViolation("payoff coordinate " + std::to_string(i) + " is " +
                           std::to_string(u[i]) + ", beyond the declared bound " +
                           std::to_string(u_max_));
    }
  }
}

double SsaLearner::step(const std::vector<double>& u) {
  check_payoff(u);
  double realized = 0.0;
  for (size_t i = 0; i < u.size(); ++i) realized += u[i] * x_[i];
  for (size_t i = 0; i < u.size(); ++i) theta_[i] += u[i];
  ++t_;
  x_ = choice_probs(model_, theta_, eta_);
  return realized;
}

void SsaLearner::reset(const std::vector<double>& scores) {
  if (scores.empty()) {
    theta_.assign(model_.n(), 0.0);
  } else {
    if (static_cast<int>(scores.size()) != model_.n()) {
      throw std::invalid_argument("score length does not match the model");
    }
    theta_ = scores;
  }
  t_ = 0;
  x_ = choice_probs(model_, theta_, eta_);
}

// ----------------------------------------------------------- OftrlLearner

OftrlLearner::OftrlLearner(GevModel model, double eta, int recency,
                           double u_max)
    : SsaLearner(std::move(model), eta, u_max), recency_(recency) {
  if (recency_ < 1) throw std::invalid_argument("recency must be at least 1");
}

std::vector<double> OftrlLearner::predictor() const {
  std::vector<double> beta(model_.n(), 0.0);
  for (const auto& u : window_) {
    for (size_t i = 0; i < beta.size(); ++i) beta[i] += u[i];
  }
  for (double& b : beta) b /= static_cast<double>(recency_);
  return beta;
}

void OftrlLearner::recompute() {
  std::vector<double> beta = predictor();
  std::vector<double> anticipated(theta_.size());
  for (size_t i = 0; i < theta_.size(); ++i) {
    anticipated[i] = theta_[i] + beta[i];
  }
  x_ = choice_probs(model_, anticipated, eta_);
}

double OftrlLearner::step(const std::vector<double>& u) {
  check_payoff(u);
  double realized = 0.0;
  for (size_t i = 0; i < u.size(); ++i) realized += u[i] * x_[i];
  for (size_t i = 0; i < u.size(); ++i) theta_[i] += u[i];
  ++t_;
  window_.push_back(u);
  if (static_cast<int>(window_.size()) > recency_) window_.pop_front();
  recompute();
  return realized;
}

void OftrlLearner::reset(const std::vector<double>& scores) {
  window_.clear();
  SsaLearner::reset(scores);
}

// ------------------------------------------------------- duality witnesses

std::vector<double> ftrl_mnl_closed_form(const std::vector<double>& theta,
                                         double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (theta.empty()) throw std::invalid_argument("empty score vector");
  double m = -std::numeric_limits<double>::infinity();
  for (double t : theta) m = std::max(m, t / eta);
  std::vector<double> x(theta.size());
  double sum = 0.0;
  for (size_t j = 0; j < theta.size(); ++j) {
    x[j] = std::exp(theta[j] / eta - m);
    sum += x[j];
  }
  for (double& v : x) v /= sum;
  return x;
}

double regularizer_mnl(const std::vector<double>& x, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  double sum = 0.0;
  double entropy = 0.0;
  for (double v : x) {
    if (v < -1e-9) {
      throw std::domain_error("point has a negative coordinate");
    }
    sum += v;
    if (v > 0.0) entropy += v * std::log(v);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::domain_error("point is off the simplex");
  }
  return eta * entropy;
}

std::vector<double> recursive_update_mnl(const std::vector<double>& x,
                                         const std::vector<double>& u,
                                         double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (x.size() != u.size()) {
    throw std::invalid_argument("recursive_update_mnl: length mismatch");
  }
  double u_max = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < u.size(); ++j) {
    if (!(x[j] > 0.0)) {
      throw std::domain_error("recursive update needs strictly positive mass");
    }
    u_max = std::max(u_max, u[j]);
  }
  // Multiplicative reweighting, largest factor normalized to one so the
  // intermediate products cannot overflow.
  std::vector<double> next(x.size());
  double sum = 0.0;
  for (size_t j = 0; j < x.size(); ++j) {
    next[j] = x[j] * std::exp((u[j] - u_max) / eta);
    sum += next[j];
  }
  for (double& v : next) v /= sum;
  return next;
}

double fenchel_identity_residual(const GevModel& m,
                                 const std::vector<double>& theta,
                                 double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  std::vector<double> x = choice_probs(m, theta, eta);
  if (m.kind == ModelKind::kMnl) {
    std::vector<double> z(theta.size());
    for (size_t j = 0; j < theta.size(); ++j) z[j] = theta[j] / eta;
    double log_g = log_generator(m, z);
    double worst = 0.0;
    for (size_t j = 0; j < theta.size(); ++j) {
      worst = std::max(worst, std::abs(-std::log(x[j]) - (log_g - z[j])));
    }
    return worst;
  }
  TwoStage two = gnl_two_stage(m, theta, eta);
  double worst = 0.0;
  for (size_t j = 0; j < x.size(); ++j) {
    worst = std::max(worst, std::abs(two.mixture[j] - x[j]));
  }
  return worst;
}

}  // namespace gevregret
