#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gevregret/learner.hpp"
#include "gevregret/monte_carlo.hpp"
#include "gevregret/rng.hpp"

namespace gevregret {

enum class EnvKind { kIid, kAdversarial, kDrift, kPiecewise, kReplay };

const char* to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

struct EnvSpec {
  EnvKind kind = EnvKind::kIid;
  int n = 0;
  double u_max = 1.0;
  // kDrift: payoff = base + amplitude * sin(omega * t) on coordinate 0,
  // with the seeded base levels drawn from [0.2, 0.8] * u_max.
  double drift_amplitude = 0.01;
  double drift_omega = 1.0;
  // kPiecewise: levels redrawn every block_len rounds.
  int64_t block_len = 100;
  // kReplay: one comma-separated payoff vector per line.
  std::string replay_path;
};

// A payoff stream.  Every emitted vector satisfies |u_i| <= u_max exactly.
// The adaptive stream sees only the distribution already committed for the
// round being paid, never a future one.
class Environment {
 public:
  Environment(const EnvSpec& spec, uint64_t seed);

  std::vector<double> next(int64_t t, const std::vector<double>& x_t);
  const EnvSpec& spec() const { return spec_; }
  // Guaranteed per-round variation sup_t |u_t - u_{t-1}|_inf of the drift
  // stream (zero-frequency streams are constant).
  double drift_step_bound() const;

 private:
  EnvSpec spec_;
  Rng rng_;
  std::vector<double> levels_;   // iid/drift base, piecewise current block
  int64_t block_index_ = -1;
  std::vector<std::vector<double>> replay_;
};

// Replay file helpers; writing uses 17 significant digits so a round trip
// reproduces every double bit-for-bit.
std::vector<std::vector<double>> read_replay(const std::string& path);
void write_replay(const std::vector<std::vector<double>>& rounds,
                  const std::string& path);

struct RoundRecord {
  std::vector<double> x;
  std::vector<double> u;
  double payoff = 0.0;  // <u_t, x_t>
  double regret = 0.0;  // running max_j theta_j - compensated payoff sum
};

struct RegretTrace {
  int n = 0;
  std::vector<RoundRecord> rounds;
  std::vector<double> theta_final;  // plain additive sum of the recorded u_t
  double realized_total = 0.0;      // compensated

  double best_score() const;    // max_j theta_final_j
  double regret_total() const;  // best_score() - realized_total
  double avg_regret() const;
};

// Recompute the final regret from the per-round records alone (fresh sums);
// the invariant check that the incremental accounting matches.
double recompute_regret(const RegretTrace& trace);

// The repeated-revelation loop: commit, reveal, pay, update, record.
RegretTrace run_odp(OnlineLearner& learner, Environment& env, int64_t T);
RegretTrace run_odp(OnlineLearner& learner, const EnvSpec& spec, int64_t T,
                    uint64_t seed);

// t,x_1..x_N,u_1..u_N,payoff,regret with 17-significant-digit values.
void write_trace_csv(const RegretTrace& trace, const std::string& path);

struct BoundReport {
  ModelKind kind;
  double eta = 0.0;
  double bound_thm1 = 0.0;  // includes the Euler-Mascheroni constant
  double bound_thm2 = 0.0;  // generator-only constant
  double realized = 0.0;
  double ratio = 0.0;       // realized / bound_thm2
};
BoundReport bound_report(const GevModel& m, double eta, int64_t T,
                         double u_max, const RegretTrace& trace);

// Final regrets of one learner configuration across seeds (learner rebuilt
// per seed; environment streams derived from each seed).  Seeds are
// independent, so kParallel distributes them without changing any result.
struct SweepConfig {
  GevModel model;
  double eta = 1.0;
  double u_max = 1.0;
  int recency = 0;  // 0 = plain SSA, >= 1 = optimistic with that window
  EnvSpec env;
  int64_t T = 0;
};
std::vector<double> run_sweep(const SweepConfig& cfg,
                              const std::vector<uint64_t>& seeds,
                              Exec exec = Exec::kParallel);

// Least-squares slope of log(y) against log(x); the Hannan-consistency
// diagnostic for average regret across horizons.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gevregret
