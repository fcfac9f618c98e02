#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "gevregret/gev.hpp"

namespace gevregret {

// Thrown when a payoff vector breaks the bound the learner was tuned for.
struct BoundViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Which additive constant the theoretical bound charges for the smoothing
// term: the expected-maximum form includes the Euler-Mascheroni constant,
// the generator-only form drops it.  Both are reported wherever bounds
// appear, since the two recipes differ by that constant alone.
enum class BoundVariant { kThm1, kThm2 };

struct EtaBound {
  double eta = 0.0;
  double bound = 0.0;
};

// Step size minimizing eta * phi0 + (L / (2 eta)) T u_max^2 and the resulting
// regret guarantee u_max * sqrt(2 phi0 L T), with phi0 the model's log G(1)
// (plus gamma under kThm1).  Degenerate models (log G(1) = 0, i.e. a single
// alternative) are rejected.
EtaBound optimal_eta(const GevModel& m, int64_t T, double u_max,
                     BoundVariant variant);
// The same guarantee evaluated at a caller-chosen eta.
double regret_bound_at(const GevModel& m, double eta, int64_t T, double u_max,
                       BoundVariant variant);

class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;
  // Distribution committed for the upcoming round.
  virtual const std::vector<double>& current() const = 0;
  // Consume the revealed payoff vector: returns <u, x_t> realized against the
  // committed distribution, then advances the state.  Rejects any payoff with
  // a coordinate beyond the learner's declared bound.
  virtual double step(const std::vector<double>& u) = 0;
  virtual const std::vector<double>& scores() const = 0;  // cumulative payoffs
  virtual int64_t round() const = 0;
  // Restart from a caller-supplied score vector (empty = zeros).
  virtual void reset(const std::vector<double>& scores) = 0;
};

// Gradient play on the smoothed maximum: commit x_t = choice_probs(theta),
// add the revealed payoff into theta, repeat.
class SsaLearner : public OnlineLearner {
 public:
  SsaLearner(GevModel model, double eta, double u_max = 1.0);

  const std::vector<double>& current() const override { return x_; }
  double step(const std::vector<double>& u) override;
  const std::vector<double>& scores() const override { return theta_; }
  int64_t round() const override { return t_; }
  void reset(const std::vector<double>& scores) override;

  const GevModel& model() const { return model_; }
  double eta() const { return eta_; }
  double u_max() const { return u_max_; }

 protected:
  void check_payoff(const std::vector<double>& u) const;

  GevModel model_;
  double eta_;
  double u_max_;
  std::vector<double> theta_;
  std::vector<double> x_;
  int64_t t_ = 0;
};

// Optimistic variant: the committed distribution anticipates the mean of the
// last `recency` observed payoffs (zero-padded before round `recency`), so a
// slowly varying stream is met almost in place.  With an all-zero history the
// anticipation vanishes and the behavior coincides with SsaLearner exactly.
class OftrlLearner : public SsaLearner {
 public:
  OftrlLearner(GevModel model, double eta, int recency, double u_max = 1.0);

  double step(const std::vector<double>& u) override;
  void reset(const std::vector<double>& scores) override;

  int recency() const { return recency_; }
  std::vector<double> predictor() const;  // current zero-padded mean

 private:
  void recompute();

  int recency_;
  std::deque<std::vector<double>> window_;
};

// Closed-form witnesses for the duality between gradient play and
// follow-the-regularized-leader (plain-logit model).
std::vector<double> ftrl_mnl_closed_form(const std::vector<double>& theta,
                                         double eta);
// eta * sum_j x_j log x_j on the simplex (0 log 0 = 0); always <= 0.
double regularizer_mnl(const std::vector<double>& x, double eta);
// Multiplicative one-step update: normalize(x * exp(u / eta)).
std::vector<double> recursive_update_mnl(const std::vector<double>& x,
                                         const std::vector<double>& u,
                                         double eta);
// Residual of the inverse-gradient identity -log x_j = log G(exp z) - z_j for
// the plain-logit model (z = theta/eta); for nested kinds, the residual of
// the two-stage mixture against choice_probs.
double fenchel_identity_residual(const GevModel& m,
                                 const std::vector<double>& theta, double eta);

}  // namespace gevregret
