// Command-line harness: simulate | game | verify | bounds.
//
// Precedence for every parameter: built-in default < --config document <
// explicit flag < GEVREGRET_SEED (seed only).  The subcommands themselves
// live in the library so tests can drive them directly.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gevregret/cli.hpp"

namespace {

using gevregret::BoundsConfig;
using gevregret::GameConfig;
using gevregret::SimulateConfig;
using gevregret::VerifyConfig;

// Binds flags to the fields of a config struct and remembers which ones the
// user actually passed, so they can be re-applied on top of a --config
// document.  An accessor is any callable Config& -> field&.
template <typename Config>
class FlagSet {
 public:
  explicit FlagSet(CLI::App* cmd) : cmd_(cmd) {}

  template <typename Accessor>
  CLI::Option* add(const std::string& name, Accessor acc,
                   const std::string& desc) {
    CLI::Option* opt = cmd_->add_option(name, acc(flags_), desc);
    overrides_.push_back([acc, opt](Config& dst, Config& src) {
      if (opt->count() > 0) acc(dst) = acc(src);
    });
    return opt;
  }

  // Final value set: defaults, then the config document, then flags.
  Config resolve(const std::string& config_path) {
    Config final_cfg;
    if (!config_path.empty()) gevregret::load_config(final_cfg, config_path);
    for (const auto& apply : overrides_) apply(final_cfg, flags_);
    return final_cfg;
  }

 private:
  CLI::App* cmd_;
  Config flags_;
  std::vector<std::function<void(Config&, Config&)>> overrides_;
};

bool seed_from_env(uint64_t& seed, std::string& error) {
  const char* text = std::getenv("GEVREGRET_SEED");
  if (text == nullptr) return true;
  std::string s(text);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    error = "GEVREGRET_SEED must be a nonnegative integer, got \"" + s + "\"";
    return false;
  }
  try {
    seed = std::stoull(s);
  } catch (const std::exception&) {
    error = "GEVREGRET_SEED out of range: \"" + s + "\"";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Regret-minimizing discrete-choice harness: smoothed-maximum gradient "
      "play over GEV choice models, with bound accounting, property "
      "verification, and a repeated-game lab."};
  app.require_subcommand(1);

  // ------------------------------------------------------------- simulate
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run one online decision loop and report regret vs bounds");
  std::string sim_config;
  sim->add_option("--config", sim_config,
                  "JSON config document; explicit flags override its fields");
  FlagSet<SimulateConfig> simf(sim);
  simf.add("--model", [](auto& c) -> auto& { return c.model; },
           "model kind: mnl|nl|cnl|pcl|ogev|pdgev|gnl");
  simf.add("--n", [](auto& c) -> auto& { return c.n; },
           "number of alternatives");
  simf.add("--lambda", [](auto& c) -> auto& { return c.lambda; },
           "shared dissimilarity for nested kinds, in (0, 1]");
  simf.add("--model-file", [](auto& c) -> auto& { return c.model_file; },
           "JSON model document (overrides --model/--n/--lambda)");
  simf.add("--env", [](auto& c) -> auto& { return c.env; },
           "payoff stream: iid|adversarial|drift|piecewise|replay");
  simf.add("-T,--T,--rounds", [](auto& c) -> auto& { return c.rounds; },
           "horizon (rounds)");
  simf.add("--eta", [](auto& c) -> auto& { return c.eta; },
           "step size: \"optimal\" or a positive decimal");
  simf.add("--u-max", [](auto& c) -> auto& { return c.u_max; },
           "payoff magnitude bound");
  simf.add("--recency", [](auto& c) -> auto& { return c.recency; },
           "optimistic window size (0 = plain gradient play)");
  simf.add("--drift-amplitude",
           [](auto& c) -> auto& { return c.drift_amplitude; },
           "drift stream amplitude");
  simf.add("--drift-omega", [](auto& c) -> auto& { return c.drift_omega; },
           "drift stream angular frequency");
  simf.add("--block-len", [](auto& c) -> auto& { return c.block_len; },
           "piecewise stream block length");
  simf.add("--replay", [](auto& c) -> auto& { return c.replay; },
           "payoff file for --env replay (one CSV vector per line)");
  simf.add("--seed", [](auto& c) -> auto& { return c.seed; }, "master seed");
  simf.add("--trace", [](auto& c) -> auto& { return c.trace_csv; },
           "write the per-round trace CSV here");
  simf.add("--report", [](auto& c) -> auto& { return c.report_json; },
           "write a copy of the JSON report here");

  // ----------------------------------------------------------------- game
  CLI::App* game = app.add_subcommand(
      "game",
      "Repeated normal-form play; certify the empirical mixture as an "
      "approximate coarse correlated equilibrium");
  std::string game_config;
  game->add_option("--config", game_config,
                   "JSON config document; explicit flags override its fields");
  FlagSet<GameConfig> gamef(game);
  gamef.add("--builtin", [](auto& c) -> auto& { return c.builtin; },
            "matching_pennies|rock_paper_scissors|random");
  gamef.add("--game-file", [](auto& c) -> auto& { return c.game_file; },
            "JSON game document (overrides --builtin)");
  gamef.add("--players", [](auto& c) -> auto& { return c.players; },
            "players for --builtin random");
  gamef.add("--strategies", [](auto& c) -> auto& { return c.strategies; },
            "strategies per player for --builtin random");
  gamef.add("-T,--T,--rounds", [](auto& c) -> auto& { return c.rounds; },
            "horizon (rounds)");
  gamef.add("--eta", [](auto& c) -> auto& { return c.eta; },
            "step size: \"optimal\" or a positive decimal");
  gamef.add("--init-jitter", [](auto& c) -> auto& { return c.init_jitter; },
            "uniform nudge to initial scores (breaks exact symmetry)");
  gamef.add("--seed", [](auto& c) -> auto& { return c.seed; }, "master seed");
  gamef.add("--trace-prefix", [](auto& c) -> auto& { return c.trace_prefix; },
            "write per-player trace CSVs <prefix>_player<k>.csv");
  gamef.add("--report", [](auto& c) -> auto& { return c.report_json; },
            "write a copy of the JSON report here");

  // --------------------------------------------------------------- verify
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the numeric property suites and report residuals");
  std::string verify_config;
  verify->add_option("--config", verify_config,
                     "JSON config document; explicit flags override it");
  FlagSet<VerifyConfig> verf(verify);
  verf.add("--suite", [](auto& c) -> auto& { return c.suite; },
           "all|gradients|montecarlo|hessian|bregman|reductions|fenchel");
  verf.add("--models", [](auto& c) -> auto& { return c.models; },
           "\"all\" or one kind name to filter the reported rows");
  verf.add("--n", [](auto& c) -> auto& { return c.params.n; },
           "alternatives per zoo model");
  verf.add("--points", [](auto& c) -> auto& { return c.params.points; },
           "random evaluation points per analytic check");
  verf.add("--samples", [](auto& c) -> auto& { return c.params.mc_samples; },
           "Monte Carlo draws per frequency estimate");
  verf.add("--mc-points", [](auto& c) -> auto& { return c.params.mc_points; },
           "score vectors per Monte Carlo check");
  verf.add("--draws", [](auto& c) -> auto& { return c.params.draws; },
           "random draws per inequality check");
  verf.add("--seed", [](auto& c) -> auto& { return c.params.seed; },
           "master seed");
  verf.add("--report", [](auto& c) -> auto& { return c.report_json; },
           "write the JSON suite report here");

  // --------------------------------------------------------------- bounds
  CLI::App* bounds = app.add_subcommand(
      "bounds", "Print the optimized step sizes and regret guarantees for "
                "every model family at (N, T, u_max, lambda)");
  std::string bounds_config;
  bounds->add_option("--config", bounds_config,
                     "JSON config document; explicit flags override it");
  FlagSet<BoundsConfig> boundsf(bounds);
  boundsf.add("--n", [](auto& c) -> auto& { return c.n; },
              "number of alternatives");
  boundsf.add("-T,--T,--rounds", [](auto& c) -> auto& { return c.rounds; },
              "horizon (rounds)");
  boundsf.add("--u-max", [](auto& c) -> auto& { return c.u_max; },
              "payoff magnitude bound");
  boundsf.add("--lambda", [](auto& c) -> auto& { return c.lambda; },
              "dissimilarity parameter for the nested rows, in (0, 1]");
  boundsf.add("--report", [](auto& c) -> auto& { return c.report_json; },
              "write the JSON table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      SimulateConfig cfg = simf.resolve(sim_config);
      std::string env_error;
      if (!seed_from_env(cfg.seed, env_error)) {
        std::cerr << "error: " << env_error << "\n";
        return gevregret::kExitInvalid;
      }
      return gevregret::cmd_simulate(cfg, std::cout, std::cerr);
    }
    if (game->parsed()) {
      GameConfig cfg = gamef.resolve(game_config);
      std::string env_error;
      if (!seed_from_env(cfg.seed, env_error)) {
        std::cerr << "error: " << env_error << "\n";
        return gevregret::kExitInvalid;
      }
      return gevregret::cmd_game(cfg, std::cout, std::cerr);
    }
    if (verify->parsed()) {
      VerifyConfig cfg = verf.resolve(verify_config);
      std::string env_error;
      if (!seed_from_env(cfg.params.seed, env_error)) {
        std::cerr << "error: " << env_error << "\n";
        return gevregret::kExitInvalid;
      }
      return gevregret::cmd_verify(cfg, std::cout, std::cerr);
    }
    BoundsConfig cfg = boundsf.resolve(bounds_config);
    return gevregret::cmd_bounds(cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gevregret::kExitInvalid;
  }
}
