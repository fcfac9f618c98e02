#include "gevregret/game.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "gevregret/numeric.hpp"

namespace gevregret {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

constexpr int64_t kMaxProfiles = 1000000;

}  // namespace

void GameSpec::validate() const {
  if (players < 2) fail("game needs at least two players");
  if (strategies < 1) fail("game needs at least one strategy");
  int64_t profiles = 1;
  for (int p = 0; p < players; ++p) {
    profiles *= strategies;
    if (profiles > kMaxProfiles) {
      fail("game tensor exceeds the " + std::to_string(kMaxProfiles) +
           "-profile cap");
    }
  }
  if (static_cast<int>(payoffs.size()) != players) {
    fail("game needs one payoff table per player");
  }
  for (int p = 0; p < players; ++p) {
    if (static_cast<int64_t>(payoffs[p].size()) != profiles) {
      fail("player " + std::to_string(p) + " payoff table has " +
           std::to_string(payoffs[p].size()) + " entries, expected " +
           std::to_string(profiles));
    }
    for (double v : payoffs[p]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        fail("game utilities must lie in [0, 1]");
      }
    }
  }
}

int64_t GameSpec::profile_count() const {
  int64_t profiles = 1;
  for (int p = 0; p < players; ++p) profiles *= strategies;
  return profiles;
}

double GameSpec::payoff(int player, const std::vector<int>& profile) const {
  int64_t flat = 0;
  for (int p = 0; p < players; ++p) {
    flat = flat * strategies + profile[p];
  }
  return payoffs[player][flat];
}

GameSpec matching_pennies() {
  GameSpec g;
  g.players = 2;
  g.strategies = 2;
  g.payoffs = {{1, 0, 0, 1},   // row player wins on a match
               {0, 1, 1, 0}};
  g.validate();
  return g;
}

GameSpec rock_paper_scissors() {
  GameSpec g;
  g.players = 2;
  g.strategies = 3;
  // Strategy order rock, paper, scissors; win 1, tie 1/2, loss 0.
  g.payoffs = {{0.5, 0.0, 1.0, 1.0, 0.5, 0.0, 0.0, 1.0, 0.5},
               {0.5, 1.0, 0.0, 0.0, 0.5, 1.0, 1.0, 0.0, 0.5}};
  g.validate();
  return g;
}

GameSpec random_game(int players, int strategies, uint64_t seed) {
  GameSpec g;
  g.players = players;
  g.strategies = strategies;
  if (players < 2 || strategies < 1) {
    fail("random game needs >= 2 players and >= 1 strategy");
  }
  Rng rng(derive_seed(seed, "game.tensor"));
  int64_t profiles = 1;
  for (int p = 0; p < players; ++p) {
    profiles *= strategies;
    if (profiles > kMaxProfiles) fail("game tensor too large");
  }
  g.payoffs.assign(players, std::vector<double>(profiles, 0.0));
  for (int p = 0; p < players; ++p) {
    for (int64_t f = 0; f < profiles; ++f) g.payoffs[p][f] = rng.uniform01();
  }
  g.validate();
  return g;
}

std::string game_to_json(const GameSpec& g) {
  nlohmann::json j;
  j["players"] = g.players;
  j["strategies"] = g.strategies;
  // Nested arrays, outermost index = player 0's strategy.
  std::function<nlohmann::json(int, int64_t, int64_t)> pack =
      [&](int player, int64_t base, int64_t span) -> nlohmann::json {
    nlohmann::json arr = nlohmann::json::array();
    if (span == 1) {
      for (int s = 0; s < g.strategies; ++s) {
        arr.push_back(g.payoffs[player][base + s]);
      }
      return arr;
    }
    for (int s = 0; s < g.strategies; ++s) {
      arr.push_back(pack(player, base + s * span, span / g.strategies));
    }
    return arr;
  };
  int64_t span = g.profile_count() / g.strategies;
  nlohmann::json tables = nlohmann::json::array();
  for (int p = 0; p < g.players; ++p) tables.push_back(pack(p, 0, span));
  j["payoffs"] = std::move(tables);
  return j.dump();
}

GameSpec game_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("game JSON: ") + e.what());
  }
  if (!j.is_object()) fail("game JSON: expected an object");
  for (const auto& item : j.items()) {
    if (item.key() != "players" && item.key() != "strategies" &&
        item.key() != "payoffs") {
      fail("game JSON: unknown field \"" + item.key() + "\"");
    }
  }
  if (!j.contains("players") || !j.contains("strategies") ||
      !j.contains("payoffs")) {
    fail("game JSON: players, strategies, and payoffs are required");
  }
  GameSpec g;
  g.players = j["players"].get<int>();
  g.strategies = j["strategies"].get<int>();
  if (g.players < 2 || g.strategies < 1) {
    fail("game JSON: players must be >= 2 and strategies >= 1");
  }
  int64_t profiles = 1;
  for (int p = 0; p < g.players; ++p) {
    profiles *= g.strategies;
    if (profiles > kMaxProfiles) fail("game JSON: tensor too large");
  }
  g.payoffs.assign(g.players, std::vector<double>(profiles, 0.0));
  const nlohmann::json& tables = j["payoffs"];
  if (!tables.is_array() || static_cast<int>(tables.size()) != g.players) {
    fail("game JSON: payoffs must hold one table per player");
  }
  std::function<void(int, const nlohmann::json&, int, int64_t)> unpack =
      [&](int player, const nlohmann::json& node, int depth, int64_t base) {
        if (!node.is_array() ||
            static_cast<int>(node.size()) != g.strategies) {
          fail("game JSON: payoff nesting must have one level per player "
               "with one entry per strategy");
        }
        if (depth == g.players - 1) {
          for (int s = 0; s < g.strategies; ++s) {
            if (!node[s].is_number()) {
              fail("game JSON: payoff leaves must be numbers");
            }
            g.payoffs[player][base + s] = node[s].get<double>();
          }
          return;
        }
        int64_t span = 1;
        for (int d = depth + 1; d < g.players; ++d) span *= g.strategies;
        for (int s = 0; s < g.strategies; ++s) {
          unpack(player, node[s], depth + 1, base + s * span);
        }
      };
  for (int p = 0; p < g.players; ++p) unpack(p, tables[p], 0, 0);
  g.validate();
  return g;
}

std::vector<double> expected_feedback(
    const GameSpec& g, int player,
    const std::vector<std::vector<double>>& mixed) {
  if (static_cast<int>(mixed.size()) != g.players) {
    fail("expected_feedback: one mixture per player required");
  }
  std::vector<double> feedback(g.strategies, 0.0);
  const int64_t profiles = g.profile_count();
  std::vector<int> profile(g.players, 0);
  // One pass over the tensor: weight each entry by the product of the other
  // players' probabilities and accumulate on the player's own strategy.
  for (int64_t f = 0; f < profiles; ++f) {
    int64_t rem = f;
    for (int p = g.players - 1; p >= 0; --p) {
      profile[p] = static_cast<int>(rem % g.strategies);
      rem /= g.strategies;
    }
    double w = 1.0;
    for (int p = 0; p < g.players; ++p) {
      if (p != player) w *= mixed[p][profile[p]];
    }
    feedback[profile[player]] += w * g.payoffs[player][f];
  }
  return feedback;
}

GameRun run_repeated_game(const GameSpec& g,
                          std::vector<std::unique_ptr<OnlineLearner>>& learners,
                          int64_t T, uint64_t seed, double init_jitter) {
  g.validate();
  if (static_cast<int>(learners.size()) != g.players) {
    fail("run_repeated_game: one learner per player required");
  }
  if (T < 1) fail("horizon must be at least 1");
  if (init_jitter < 0.0) fail("init_jitter must be nonnegative");
  for (int p = 0; p < g.players; ++p) {
    if (static_cast<int>(learners[p]->current().size()) != g.strategies) {
      fail("player " + std::to_string(p) +
           " learner does not match the strategy count");
    }
    if (init_jitter > 0.0) {
      Rng rng(derive_seed(seed, "game.init", static_cast<uint64_t>(p)));
      std::vector<double> start(g.strategies);
      for (double& s : start) s = init_jitter * rng.uniform01();
      learners[p]->reset(start);
    }
  }

  GameRun run;
  run.traces.assign(g.players, RegretTrace{});
  for (int p = 0; p < g.players; ++p) {
    run.traces[p].n = g.strategies;
    run.traces[p].rounds.reserve(static_cast<size_t>(T));
  }
  run.history.reserve(static_cast<size_t>(T));
  std::vector<std::vector<double>> theta(
      g.players, std::vector<double>(g.strategies, 0.0));
  std::vector<KahanSum> realized(g.players);
  std::vector<std::vector<double>> mixed(g.players);

  for (int64_t t = 1; t <= T; ++t) {
    for (int p = 0; p < g.players; ++p) mixed[p] = learners[p]->current();
    run.history.push_back(mixed);
    for (int p = 0; p < g.players; ++p) {
      RoundRecord rec;
      rec.x = mixed[p];
      rec.u = expected_feedback(g, p, mixed);
      rec.payoff = learners[p]->step(rec.u);
      realized[p].add(rec.payoff);
      double best = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < g.strategies; ++s) {
        theta[p][s] += rec.u[s];
        best = std::max(best, theta[p][s]);
      }
      rec.regret = best - realized[p].value();
      run.traces[p].rounds.push_back(std::move(rec));
    }
  }
  for (int p = 0; p < g.players; ++p) {
    run.traces[p].theta_final = theta[p];
    run.traces[p].realized_total = realized[p].value();
  }
  return run;
}

CceReport cce_gap(const GameSpec& g, const GameRun& run,
                  const std::vector<int64_t>& horizons) {
  g.validate();
  const int64_t T = static_cast<int64_t>(run.history.size());
  if (T < 1) fail("cce_gap: empty history");
  for (size_t h = 0; h + 1 < horizons.size(); ++h) {
    if (horizons[h] >= horizons[h + 1]) {
      fail("cce_gap: horizons must be increasing");
    }
  }
  if (!horizons.empty() && horizons.back() > T) {
    fail("cce_gap: horizon beyond the recorded history");
  }

  CceReport rep;
  std::vector<std::vector<double>> dev_sum(
      g.players, std::vector<double>(g.strategies, 0.0));
  std::vector<KahanSum> base_sum(g.players);
  size_t next_horizon = 0;

  auto snapshot_delta = [&](int64_t t) {
    double worst = 0.0;
    for (int p = 0; p < g.players; ++p) {
      double best_dev = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < g.strategies; ++s) {
        best_dev = std::max(best_dev, dev_sum[p][s]);
      }
      worst = std::max(worst, (best_dev - base_sum[p].value()) /
                                  static_cast<double>(t));
    }
    return worst;
  };

  for (int64_t t = 1; t <= T; ++t) {
    const std::vector<std::vector<double>>& mixed = run.history[t - 1];
    if (static_cast<int>(mixed.size()) != g.players) {
      fail("cce_gap: history does not match the player count");
    }
    for (int p = 0; p < g.players; ++p) {
      // The deviation value of a fixed strategy equals its exact-expectation
      // feedback; the on-path value is that feedback paired with the
      // player's own mixture.
      std::vector<double> u = expected_feedback(g, p, mixed);
      double on_path = 0.0;
      for (int s = 0; s < g.strategies; ++s) {
        dev_sum[p][s] += u[s];
        on_path += u[s] * mixed[p][s];
      }
      base_sum[p].add(on_path);
    }
    while (next_horizon < horizons.size() && horizons[next_horizon] == t) {
      rep.decay.emplace_back(t, snapshot_delta(t));
      ++next_horizon;
    }
  }

  rep.value_under_sigma.resize(g.players);
  rep.best_deviation.resize(g.players);
  rep.player_regret.resize(g.players);
  for (int p = 0; p < g.players; ++p) {
    double best_dev = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < g.strategies; ++s) {
      best_dev = std::max(best_dev, dev_sum[p][s]);
    }
    rep.value_under_sigma[p] = base_sum[p].value() / static_cast<double>(T);
    rep.best_deviation[p] = best_dev / static_cast<double>(T);
    rep.player_regret[p] = best_dev - base_sum[p].value();
    rep.max_regret = std::max(rep.max_regret, rep.player_regret[p]);
  }
  rep.max_regret =
      *std::max_element(rep.player_regret.begin(), rep.player_regret.end());
  rep.max_regret_over_t = rep.max_regret / static_cast<double>(T);
  rep.delta_emp = std::max(0.0, rep.max_regret_over_t);
  return rep;
}

}  // namespace gevregret
