#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gevregret/environment.hpp"
#include "gevregret/game.hpp"
#include "gevregret/verify.hpp"

namespace gevregret {

// Exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;           // success
inline constexpr int kExitInvalid = 1;      // bad config or arguments
inline constexpr int kExitCheckFailed = 2;  // a gated check did not hold

// Subcommand parameter blocks.  Each field mirrors one command-line flag
// (same name, dashes for underscores) and one key of the optional JSON
// config document; unknown document keys are rejected.

struct SimulateConfig {
  std::string model = "MNL";  // kind name; nested kinds use `lambda`
  int n = 10;
  double lambda = 0.5;     // shared dissimilarity for nested kinds
  std::string model_file;  // JSON model document; overrides model/n/lambda
  std::string env = "adversarial";
  int64_t rounds = 10000;
  std::string eta = "optimal";  // "optimal" or a positive decimal
  double u_max = 1.0;
  int recency = 0;  // 0 = plain gradient play, >= 1 = optimistic window
  double drift_amplitude = 0.01;
  double drift_omega = 1.0;
  int64_t block_len = 100;
  std::string replay;  // payoff stream file for env = replay
  uint64_t seed = 1;
  std::string trace_csv;    // optional per-round trace output
  std::string report_json;  // optional copy of the report
};

struct GameConfig {
  std::string builtin = "rock_paper_scissors";  // matching_pennies | random
  std::string game_file;  // JSON game document; overrides builtin
  int players = 2;        // random-game shape
  int strategies = 3;
  int64_t rounds = 10000;
  std::string eta = "optimal";
  // Small asymmetric nudge to the initial scores; zero would pin the
  // symmetric zero-sum builtins at their mixed equilibrium from round one,
  // making every decay curve identically zero.
  double init_jitter = 0.01;
  uint64_t seed = 1;
  std::string trace_prefix;  // per-player CSVs <prefix>_player<k>.csv
  std::string report_json;
};

struct VerifyConfig {
  std::string suite = "all";
  std::string models = "all";  // "all" or one kind name to filter rows
  VerifyParams params;
  std::string report_json;
};

struct BoundsConfig {
  int n = 10;
  int64_t rounds = 10000;
  double u_max = 1.0;
  double lambda = 0.5;
  std::string report_json;
};

// Strict JSON config loading: the document must be an object whose keys are
// exactly the struct's field names; any unknown key raises
// std::invalid_argument naming it.
void load_config(SimulateConfig& cfg, const std::string& path);
void load_config(GameConfig& cfg, const std::string& path);
void load_config(VerifyConfig& cfg, const std::string& path);
void load_config(BoundsConfig& cfg, const std::string& path);

// Command entry points.  Human-facing output goes to `out`, diagnostics to
// `err`; the return value follows the exit-code contract above and the
// implementations throw nothing.
int cmd_simulate(const SimulateConfig& cfg, std::ostream& out,
                 std::ostream& err);
int cmd_game(const GameConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bounds(const BoundsConfig& cfg, std::ostream& out, std::ostream& err);

// One row of the optimized-bound table: step size and guarantee at the
// log(N)-relaxed smoothing constant, as functions of (N, T, u_max, lambda).
struct BoundRow {
  std::string model;
  double lipschitz_numerator = 0.0;
  double phi0 = 0.0;
  double eta = 0.0;
  double bound = 0.0;
};
std::vector<BoundRow> bounds_table(int n, int64_t rounds, double u_max,
                                   double lambda);

// Build the model a kind name + size + shared dissimilarity describe on the
// command line (plain logit ignores lambda).
GevModel model_for_cli(const std::string& kind_name, int n, double lambda);

// Round-trip-exact decimal used in every CSV the tool writes.
std::string format_double(double v);

}  // namespace gevregret
