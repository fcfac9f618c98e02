#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gevregret/learner.hpp"
#include "gevregret/rng.hpp"
#include "gevregret/verify.hpp"

using namespace gevregret;

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::vector<double> random_payoff(Rng& rng, int n, double u_max) {
  std::vector<double> u(n);
  for (double& v : u) v = rng.uniform(-u_max, u_max);
  return u;
}

}  // namespace

TEST_CASE("optimized step size matches frozen hand arithmetic") {
  GevModel m = mnl(10);
  EtaBound thm2 = optimal_eta(m, 10000, 1.0, BoundVariant::kThm2);
  CHECK(near(thm2.eta, 46.5990601784656075, 1e-12));
  CHECK(near(thm2.bound, 214.596602628934724, 1e-11));

  EtaBound tiny = optimal_eta(mnl(2), 1, 1.0, BoundVariant::kThm2);
  CHECK(near(tiny.bound, 1.17741002251547469, 1e-14));

  // The guarantee evaluated at its own optimizer reproduces the bound, and
  // the shock constant only moves the additive term.
  for (BoundVariant v : {BoundVariant::kThm1, BoundVariant::kThm2}) {
    EtaBound opt = optimal_eta(m, 10000, 1.0, v);
    CHECK(near(regret_bound_at(m, opt.eta, 10000, 1.0, v), opt.bound, 1e-9));
  }
  EtaBound thm1 = optimal_eta(m, 10000, 1.0, BoundVariant::kThm1);
  CHECK(thm1.bound > thm2.bound);
  CHECK(thm1.eta < thm2.eta);

  // At an arbitrary eta the guarantee is the explicit two-term tradeoff.
  double at2 = regret_bound_at(m, 2.0, 100, 0.5, BoundVariant::kThm2);
  CHECK(near(at2, 2.0 * std::log(10.0) + (1.0 / 4.0) * 100.0 * 0.25, 1e-12));

  // Nested instances plug their own generator constant in.
  GevModel g = zoo_gnl(10);
  EtaBound gb = optimal_eta(g, 10000, 1.0, BoundVariant::kThm2);
  double phi0 = g.log_generator_at_ones();
  CHECK(near(gb.eta, std::sqrt(3.0 * 10000.0 / (2.0 * phi0)), 1e-12));
  CHECK(near(gb.bound, std::sqrt(2.0 * phi0 * 3.0 * 10000.0), 1e-11));
}

TEST_CASE("optimized step size rejects degenerate setups") {
  CHECK_THROWS_AS(optimal_eta(mnl(10), 0, 1.0, BoundVariant::kThm2),
                  std::invalid_argument);
  CHECK_THROWS_AS(optimal_eta(mnl(10), 100, 0.0, BoundVariant::kThm2),
                  std::invalid_argument);
  CHECK_THROWS_AS(optimal_eta(mnl(1), 100, 1.0, BoundVariant::kThm2),
                  std::invalid_argument);
  CHECK_THROWS_AS(regret_bound_at(mnl(3), 0.0, 100, 1.0, BoundVariant::kThm2),
                  std::invalid_argument);
}

TEST_CASE("gradient play tracks the closed-form trajectory") {
  const double eta = 3.0;
  SsaLearner learner(mnl(3), eta);
  CHECK(learner.round() == 0);
  std::vector<double> uniform{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  for (int j = 0; j < 3; ++j) CHECK(near(learner.current()[j], uniform[j], 1e-15));

  // Constant payoff on the first coordinate: after t rounds the scores are
  // (t, 0, 0) and the commitment is exactly the gradient there.
  std::vector<double> theta{0.0, 0.0, 0.0};
  for (int t = 1; t <= 50; ++t) {
    double expected_payoff = learner.current()[0];
    double realized = learner.step({1.0, 0.0, 0.0});
    CHECK(realized == expected_payoff);
    theta[0] += 1.0;
    CHECK(learner.scores() == theta);
    CHECK(learner.current() == choice_probs(mnl(3), theta, eta));
    CHECK(learner.round() == t);
  }
  // The leader's mass concentrates monotonically under a constant stream.
  CHECK(learner.current()[0] > 0.9);
}

TEST_CASE("scores accumulate exactly as plain sums") {
  Rng rng(derive_seed(21, "test.scores"));
  GevModel m = zoo_gnl(5);
  SsaLearner learner(m, 1.7, 2.0);
  std::vector<double> manual(5, 0.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> u = random_payoff(rng, 5, 2.0);
    double want = 0.0;
    for (int j = 0; j < 5; ++j) want += u[j] * learner.current()[j];
    CHECK(learner.step(u) == want);
    for (int j = 0; j < 5; ++j) manual[j] += u[j];
    CHECK(learner.scores() == manual);
  }
}

TEST_CASE("payoffs beyond the declared bound are rejected untouched") {
  SsaLearner learner(mnl(3), 1.0, 1.0);
  learner.step({0.5, -0.5, 0.2});
  std::vector<double> theta_before = learner.scores();
  std::vector<double> x_before = learner.current();
  CHECK_THROWS_AS(learner.step({1.5, 0.0, 0.0}), BoundViolation);
  CHECK_THROWS_AS(learner.step({0.0, -1.0000001, 0.0}), BoundViolation);
  CHECK_THROWS_AS(learner.step({0.0, 0.0}), std::invalid_argument);
  CHECK(learner.scores() == theta_before);
  CHECK(learner.current() == x_before);
  CHECK(learner.round() == 1);

  // Boundary magnitudes are legal.
  CHECK_NOTHROW(learner.step({1.0, -1.0, 0.0}));
}

TEST_CASE("reset restarts from supplied scores") {
  SsaLearner learner(mnl(3), 2.0);
  learner.step({1.0, 0.0, 0.0});
  learner.step({0.0, 1.0, 0.0});
  learner.reset({});
  CHECK(learner.round() == 0);
  CHECK(learner.scores() == std::vector<double>{0.0, 0.0, 0.0});

  learner.reset({0.3, -0.1, 0.0});
  CHECK(learner.scores() == std::vector<double>{0.3, -0.1, 0.0});
  CHECK(learner.current() == choice_probs(mnl(3), {0.3, -0.1, 0.0}, 2.0));
  CHECK_THROWS_AS(learner.reset({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("anticipating learner with empty history is plain gradient play") {
  GevModel m = zoo_nl(4);
  SsaLearner plain(m, 1.3);
  OftrlLearner opt(m, 1.3, 4);
  CHECK(opt.current() == plain.current());
  CHECK(opt.predictor() == std::vector<double>(4, 0.0));

  // Zero payoffs keep the anticipation at zero, so the two stay identical.
  for (int t = 0; t < 5; ++t) {
    std::vector<double> zero(4, 0.0);
    CHECK(opt.step(zero) == plain.step(zero));
    CHECK(opt.current() == plain.current());
  }
}

TEST_CASE("unit-window anticipation shifts one step ahead on constant streams") {
  GevModel m = mnl(4);
  const double eta = 2.2;
  const std::vector<double> u{0.4, -0.1, 0.0, 0.7};
  OftrlLearner opt(m, eta, 1);
  SsaLearner plain(m, eta);
  for (int t = 0; t < 30; ++t) {
    opt.step(u);
    plain.step(u);
    SsaLearner ahead(m, eta);
    for (int s = 0; s <= t + 1; ++s) ahead.step(u);
    // Hindsight commitment: the optimist at round t equals the plain
    // learner one round later, bit for bit.
    CHECK(opt.current() == ahead.current());
    CHECK(opt.current() != plain.current());
  }
}

TEST_CASE("anticipation window slides and zero-pads") {
  GevModel m = mnl(2);
  OftrlLearner opt(m, 1.0, 3);
  std::vector<double> u1{0.5, 0.0}, u2{0.0, 0.4}, u3{-0.3, 0.3}, u4{1.0, -1.0};
  opt.step(u1);
  // One observation over a window of three: zero-padded mean.
  CHECK(opt.predictor() == std::vector<double>{0.5 / 3.0, 0.0});
  opt.step(u2);
  CHECK(opt.predictor() == std::vector<double>{(0.5 + 0.0) / 3.0,
                                               (0.0 + 0.4) / 3.0});
  opt.step(u3);
  opt.step(u4);
  // Oldest observation dropped once the window is full.
  std::vector<double> beta = opt.predictor();
  CHECK(near(beta[0], (0.0 - 0.3 + 1.0) / 3.0, 1e-16));
  CHECK(near(beta[1], (0.4 + 0.3 - 1.0) / 3.0, 1e-16));

  opt.reset({});
  CHECK(opt.predictor() == std::vector<double>{0.0, 0.0});
  CHECK(opt.current() == choice_probs(m, {0.0, 0.0}, 1.0));

  CHECK_THROWS_AS(OftrlLearner(m, 1.0, 0), std::invalid_argument);
}

TEST_CASE("regularized leader closed form equals the gradient map") {
  Rng rng(derive_seed(22, "test.ftrl"));
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + static_cast<int>(rng.next_u64() % 6);
    std::vector<double> theta(n);
    for (double& t : theta) t = rng.uniform(-8.0, 8.0);
    double eta = rng.uniform(0.3, 3.0);
    std::vector<double> a = ftrl_mnl_closed_form(theta, eta);
    std::vector<double> b = choice_probs(mnl(n), theta, eta);
    for (int j = 0; j < n; ++j) CHECK(near(a[j], b[j], 1e-12));
  }
  CHECK_THROWS_AS(ftrl_mnl_closed_form({}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ftrl_mnl_closed_form({0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("entropy regularizer values and domain") {
  CHECK(near(regularizer_mnl({2.0 / 3.0, 1.0 / 3.0}, 1.0),
             -0.636514168294812818, 1e-14));
  CHECK(near(regularizer_mnl({2.0 / 3.0, 1.0 / 3.0}, 2.0),
             2.0 * -0.636514168294812818, 1e-13));
  // Uniform point: -eta log n; vertices: zero.
  CHECK(near(regularizer_mnl({0.25, 0.25, 0.25, 0.25}, 1.5),
             -1.5 * std::log(4.0), 1e-14));
  CHECK(regularizer_mnl({1.0, 0.0, 0.0}, 1.0) == 0.0);
  CHECK_THROWS_AS(regularizer_mnl({0.5, 0.4}, 1.0), std::domain_error);
  CHECK_THROWS_AS(regularizer_mnl({1.1, -0.1}, 1.0), std::domain_error);

  // Fenchel value identity at the maximizer: <theta, x*> - R(x*) equals the
  // eta-scaled generator value; at theta = (log 2, 0) that is log 3.
  std::vector<double> theta{std::log(2.0), 0.0};
  std::vector<double> x = choice_probs(mnl(2), theta, 1.0);
  double value = theta[0] * x[0] + theta[1] * x[1] - regularizer_mnl(x, 1.0);
  CHECK(near(value, std::log(3.0), 1e-14));
}

TEST_CASE("multiplicative recursion follows the score-space path") {
  Rng rng(derive_seed(23, "test.recursive"));
  const int n = 5;
  const double eta = optimal_eta(mnl(n), 1000, 1.0, BoundVariant::kThm2).eta;
  std::vector<double> x = choice_probs(mnl(n), std::vector<double>(n, 0.0),
                                       eta);
  std::vector<double> theta(n, 0.0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> u = random_payoff(rng, n, 1.0);
    x = recursive_update_mnl(x, u, eta);
    for (int j = 0; j < n; ++j) theta[j] += u[j];
    std::vector<double> want = choice_probs(mnl(n), theta, eta);
    for (int j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(x[j] - want[j]));
    }
  }
  CHECK(worst <= 1e-12);

  CHECK_THROWS_AS(recursive_update_mnl({0.0, 1.0}, {0.1, 0.1}, 1.0),
                  std::domain_error);
  CHECK_THROWS_AS(recursive_update_mnl({0.5, 0.5}, {0.1}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("inverse-gradient identity holds across the zoo") {
  Rng rng(derive_seed(24, "test.fenchel"));
  for (const GevModel& m : model_zoo(5)) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> theta(5);
      for (double& t : theta) t = rng.uniform(-6.0, 6.0);
      double eta = rng.uniform(0.5, 2.0);
      CHECK(fenchel_identity_residual(m, theta, eta) <= 1e-10);
    }
  }
}
