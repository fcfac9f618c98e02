#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gevregret/environment.hpp"
#include "gevregret/learner.hpp"

namespace gevregret {

// Normal-form game, identical strategy count per player, utilities in [0, 1].
// Payoffs are stored per player over flattened profiles with player 0's
// strategy varying slowest.
struct GameSpec {
  int players = 0;
  int strategies = 0;
  std::vector<std::vector<double>> payoffs;  // [player][flat profile]

  void validate() const;
  int64_t profile_count() const;
  double payoff(int player, const std::vector<int>& profile) const;
};

GameSpec matching_pennies();        // match/mismatch, {0, 1} payoffs
GameSpec rock_paper_scissors();     // win 1, tie 1/2, loss 0
GameSpec random_game(int players, int strategies, uint64_t seed);

std::string game_to_json(const GameSpec& g);
GameSpec game_from_json(const std::string& text);

// Expected payoff of every own strategy against the product of the other
// players' committed mixtures — the exact-expectation feedback vector.
std::vector<double> expected_feedback(
    const GameSpec& g, int player,
    const std::vector<std::vector<double>>& mixed);

struct GameRun {
  std::vector<RegretTrace> traces;  // one per player
  // history[t][p] = player p's mixture in round t+1; the empirical play
  // distribution is the average over t of the product of these rows.
  std::vector<std::vector<std::vector<double>>> history;
};

// Synchronous repeated play with exact-expectation feedback.  When
// init_jitter > 0 each player's initial score vector is drawn uniformly from
// [0, init_jitter] using the run seed, breaking the exact symmetry that
// otherwise pins zero-sum builtins at their equilibrium from round one.
GameRun run_repeated_game(const GameSpec& g,
                          std::vector<std::unique_ptr<OnlineLearner>>& learners,
                          int64_t T, uint64_t seed, double init_jitter = 0.0);

struct CceReport {
  // Largest one-shot deviation gain against the empirical play distribution,
  // clamped below at zero.
  double delta_emp = 0.0;
  std::vector<double> value_under_sigma;   // per player, average realized
  std::vector<double> best_deviation;      // per player, best fixed strategy
  std::vector<double> player_regret;       // best_deviation*T - realized*T
  double max_regret = 0.0;                 // max_p player_regret[p]
  double max_regret_over_t = 0.0;          // the certified approximation level
  std::vector<std::pair<int64_t, double>> decay;  // horizon -> delta_emp
};

// Certify the empirical play distribution as an approximate coarse
// correlated equilibrium by replaying the recorded mixtures.  Horizons (if
// given) must be increasing; each gets a delta_emp snapshot in `decay`.
CceReport cce_gap(const GameSpec& g, const GameRun& run,
                  const std::vector<int64_t>& horizons = {});

}  // namespace gevregret
