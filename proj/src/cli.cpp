#include "gevregret/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gevregret/learner.hpp"

namespace gevregret {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

json load_document(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw std::invalid_argument("config \"" + path + "\": " + e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("config \"" + path +
                                "\" must be a JSON object");
  }
  return doc;
}

void check_keys(const json& doc, std::initializer_list<const char*> allowed) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("unknown config field \"" + it.key() + "\"");
    }
  }
}

template <typename T>
void fetch(const json& doc, const char* key, T& into) {
  if (!doc.contains(key)) return;
  try {
    into = doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config field \"") + key +
                                "\" has the wrong type");
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write \"" + path + "\"");
  f << text;
  if (!f) throw std::invalid_argument("write to \"" + path + "\" failed");
}

// Serialize the report, mirror it to `out`, and copy it to `path` if set.
void emit_report(const json& doc, std::ostream& out, const std::string& path) {
  std::string text = doc.dump(2);
  text.push_back('\n');
  out << text;
  if (!path.empty()) write_text_file(path, text);
}

double resolve_eta(const std::string& text, const GevModel& m, int64_t rounds,
                   double u_max) {
  if (text == "optimal") {
    return optimal_eta(m, rounds, u_max, BoundVariant::kThm2).eta;
  }
  double v = 0.0;
  size_t pos = 0;
  bool ok = true;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    ok = false;
  }
  if (!ok || pos != text.size() || !std::isfinite(v) || !(v > 0.0)) {
    throw std::invalid_argument(
        "eta must be \"optimal\" or a positive decimal, got \"" + text + "\"");
  }
  return v;
}

std::vector<int64_t> decade_horizons(int64_t rounds) {
  std::vector<int64_t> horizons;
  for (int64_t h = 10; h <= rounds && h > 0; h *= 10) horizons.push_back(h);
  if (horizons.empty() || horizons.back() != rounds) {
    horizons.push_back(rounds);
  }
  return horizons;
}

json model_document(const GevModel& m) { return json::parse(model_to_json(m)); }

std::string first_token(const std::string& name) {
  size_t space = name.find(' ');
  return space == std::string::npos ? name : name.substr(0, space);
}

int common_validation_exit(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  return kExitInvalid;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ------------------------------------------------------------- config files

void load_config(SimulateConfig& cfg, const std::string& path) {
  json doc = load_document(path);
  check_keys(doc, {"model", "n", "lambda", "model_file", "env", "rounds",
                   "eta", "u_max", "recency", "drift_amplitude", "drift_omega",
                   "block_len", "replay", "seed", "trace_csv", "report_json"});
  fetch(doc, "model", cfg.model);
  fetch(doc, "n", cfg.n);
  fetch(doc, "lambda", cfg.lambda);
  fetch(doc, "model_file", cfg.model_file);
  fetch(doc, "env", cfg.env);
  fetch(doc, "rounds", cfg.rounds);
  fetch(doc, "eta", cfg.eta);
  fetch(doc, "u_max", cfg.u_max);
  fetch(doc, "recency", cfg.recency);
  fetch(doc, "drift_amplitude", cfg.drift_amplitude);
  fetch(doc, "drift_omega", cfg.drift_omega);
  fetch(doc, "block_len", cfg.block_len);
  fetch(doc, "replay", cfg.replay);
  fetch(doc, "seed", cfg.seed);
  fetch(doc, "trace_csv", cfg.trace_csv);
  fetch(doc, "report_json", cfg.report_json);
}

void load_config(GameConfig& cfg, const std::string& path) {
  json doc = load_document(path);
  check_keys(doc, {"builtin", "game_file", "players", "strategies", "rounds",
                   "eta", "init_jitter", "seed", "trace_prefix",
                   "report_json"});
  fetch(doc, "builtin", cfg.builtin);
  fetch(doc, "game_file", cfg.game_file);
  fetch(doc, "players", cfg.players);
  fetch(doc, "strategies", cfg.strategies);
  fetch(doc, "rounds", cfg.rounds);
  fetch(doc, "eta", cfg.eta);
  fetch(doc, "init_jitter", cfg.init_jitter);
  fetch(doc, "seed", cfg.seed);
  fetch(doc, "trace_prefix", cfg.trace_prefix);
  fetch(doc, "report_json", cfg.report_json);
}

void load_config(VerifyConfig& cfg, const std::string& path) {
  json doc = load_document(path);
  check_keys(doc, {"suite", "models", "n", "points", "mc_samples", "mc_points",
                   "draws", "seed", "report_json"});
  fetch(doc, "suite", cfg.suite);
  fetch(doc, "models", cfg.models);
  fetch(doc, "n", cfg.params.n);
  fetch(doc, "points", cfg.params.points);
  fetch(doc, "mc_samples", cfg.params.mc_samples);
  fetch(doc, "mc_points", cfg.params.mc_points);
  fetch(doc, "draws", cfg.params.draws);
  fetch(doc, "seed", cfg.params.seed);
  fetch(doc, "report_json", cfg.report_json);
}

void load_config(BoundsConfig& cfg, const std::string& path) {
  json doc = load_document(path);
  check_keys(doc, {"n", "rounds", "u_max", "lambda", "report_json"});
  fetch(doc, "n", cfg.n);
  fetch(doc, "rounds", cfg.rounds);
  fetch(doc, "u_max", cfg.u_max);
  fetch(doc, "lambda", cfg.lambda);
  fetch(doc, "report_json", cfg.report_json);
}

// ------------------------------------------------------------------ models

GevModel model_for_cli(const std::string& kind_name, int n, double lambda) {
  std::string upper = kind_name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  ModelKind kind = model_kind_from_string(upper);
  if (kind == ModelKind::kMnl) {
    if (n < 2) throw std::invalid_argument("MNL needs n >= 2");
    return mnl(n);
  }
  if (n < 3) {
    throw std::invalid_argument(std::string(to_string(kind)) +
                                " on the command line needs n >= 3");
  }
  switch (kind) {
    case ModelKind::kNl: {
      std::vector<std::vector<int>> partition(3);
      for (int i = 0; i < n; ++i) partition[(3 * i) / n].push_back(i);
      return nested_logit(n, partition, {lambda, lambda, lambda});
    }
    case ModelKind::kCnl: {
      std::vector<std::vector<double>> alloc(n, std::vector<double>(3, 0.0));
      for (int i = 0; i < n; ++i) {
        alloc[i][i % 3] = 0.6;
        alloc[i][(i + 1) % 3] = 0.4;
      }
      return cnl(alloc, lambda);
    }
    case ModelKind::kPcl:
      return pcl(n, lambda);
    case ModelKind::kOgev:
      return ogev(n, 1, {0.4, 0.6}, lambda);
    case ModelKind::kPdgev: {
      std::vector<std::vector<int>> halves(2), parity(2);
      for (int i = 0; i < n; ++i) {
        halves[i < n / 2 ? 0 : 1].push_back(i);
        parity[i % 2].push_back(i);
      }
      return pdgev(n, {halves, parity}, {0.3, 0.7}, {lambda, lambda});
    }
    case ModelKind::kGnl: {
      const int lo = n / 3, hi = (2 * n) / 3;
      Nest left{lambda, std::vector<double>(n, 0.0)};
      Nest right{lambda, std::vector<double>(n, 0.0)};
      for (int i = 0; i < n; ++i) {
        if (i < lo) {
          left.alloc[i] = 1.0;
        } else if (i < hi) {
          left.alloc[i] = 0.5;
          right.alloc[i] = 0.5;
        } else {
          right.alloc[i] = 1.0;
        }
      }
      return gnl(n, {left, right});
    }
    case ModelKind::kMnl:
      break;  // handled above
  }
  throw std::invalid_argument("unhandled model kind");
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const SimulateConfig& cfg, std::ostream& out,
                 std::ostream& err) {
  try {
    if (cfg.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    if (!(cfg.u_max > 0.0) || !std::isfinite(cfg.u_max)) {
      throw std::invalid_argument("u_max must be positive");
    }
    if (cfg.recency < 0) {
      throw std::invalid_argument("recency must be nonnegative");
    }
    GevModel m = cfg.model_file.empty()
                     ? model_for_cli(cfg.model, cfg.n, cfg.lambda)
                     : model_from_json(read_file(cfg.model_file));
    double eta = resolve_eta(cfg.eta, m, cfg.rounds, cfg.u_max);

    EnvSpec env;
    env.kind = env_kind_from_string(cfg.env);
    env.n = m.n();
    env.u_max = cfg.u_max;
    env.drift_amplitude = cfg.drift_amplitude;
    env.drift_omega = cfg.drift_omega;
    env.block_len = cfg.block_len;
    env.replay_path = cfg.replay;

    std::unique_ptr<OnlineLearner> learner;
    if (cfg.recency >= 1) {
      learner =
          std::make_unique<OftrlLearner>(m, eta, cfg.recency, cfg.u_max);
    } else {
      learner = std::make_unique<SsaLearner>(m, eta, cfg.u_max);
    }
    RegretTrace trace = run_odp(*learner, env, cfg.rounds, cfg.seed);
    BoundReport rep = bound_report(m, eta, cfg.rounds, cfg.u_max, trace);

    json doc;
    doc["command"] = "simulate";
    doc["model"] = to_string(m.kind);
    doc["n"] = m.n();
    doc["env"] = to_string(env.kind);
    doc["rounds"] = cfg.rounds;
    doc["eta"] = rep.eta;
    doc["u_max"] = cfg.u_max;
    doc["recency"] = cfg.recency;
    doc["seed"] = cfg.seed;
    doc["bound_thm1"] = rep.bound_thm1;
    doc["bound_thm2"] = rep.bound_thm2;
    doc["realized_regret"] = rep.realized;
    doc["avg_regret"] = trace.avg_regret();
    doc["ratio"] = rep.ratio;
    doc["model_spec"] = model_document(m);
    emit_report(doc, out, cfg.report_json);
    if (!cfg.trace_csv.empty()) write_trace_csv(trace, cfg.trace_csv);
    return kExitOk;
  } catch (const BoundViolation& e) {
    err << "check failed: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    return common_validation_exit(e, err);
  }
}

// -------------------------------------------------------------------- game

int cmd_game(const GameConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    if (!(cfg.init_jitter >= 0.0) || !std::isfinite(cfg.init_jitter)) {
      throw std::invalid_argument("init_jitter must be nonnegative");
    }
    GameSpec g;
    std::string game_name;
    if (!cfg.game_file.empty()) {
      g = game_from_json(read_file(cfg.game_file));
      game_name = cfg.game_file;
    } else if (cfg.builtin == "matching_pennies" || cfg.builtin == "mp") {
      g = matching_pennies();
      game_name = "matching_pennies";
    } else if (cfg.builtin == "rock_paper_scissors" || cfg.builtin == "rps") {
      g = rock_paper_scissors();
      game_name = "rock_paper_scissors";
    } else if (cfg.builtin == "random") {
      g = random_game(cfg.players, cfg.strategies, cfg.seed);
      game_name = "random";
    } else {
      throw std::invalid_argument("unknown builtin game \"" + cfg.builtin +
                                  "\" (matching_pennies, rock_paper_scissors, "
                                  "random)");
    }

    GevModel m = mnl(g.strategies);
    double eta = resolve_eta(cfg.eta, m, cfg.rounds, 1.0);
    std::vector<std::unique_ptr<OnlineLearner>> learners;
    learners.reserve(static_cast<size_t>(g.players));
    for (int p = 0; p < g.players; ++p) {
      learners.push_back(std::make_unique<SsaLearner>(m, eta, 1.0));
    }
    GameRun run =
        run_repeated_game(g, learners, cfg.rounds, cfg.seed, cfg.init_jitter);
    CceReport rep = cce_gap(g, run, decade_horizons(cfg.rounds));

    json doc;
    doc["command"] = "game";
    doc["game"] = game_name;
    doc["players"] = g.players;
    doc["strategies"] = g.strategies;
    doc["rounds"] = cfg.rounds;
    doc["eta"] = eta;
    doc["init_jitter"] = cfg.init_jitter;
    doc["seed"] = cfg.seed;
    doc["delta_emp"] = rep.delta_emp;
    doc["max_regret"] = rep.max_regret;
    doc["max_regret_over_t"] = rep.max_regret_over_t;
    doc["player_regret"] = rep.player_regret;
    doc["value_under_sigma"] = rep.value_under_sigma;
    doc["best_deviation"] = rep.best_deviation;
    json decay = json::array();
    for (const auto& [horizon, delta] : rep.decay) {
      decay.push_back(json{{"rounds", horizon}, {"delta_emp", delta}});
    }
    doc["decay"] = decay;
    emit_report(doc, out, cfg.report_json);
    if (!cfg.trace_prefix.empty()) {
      for (int p = 0; p < g.players; ++p) {
        write_trace_csv(run.traces[static_cast<size_t>(p)],
                        cfg.trace_prefix + "_player" + std::to_string(p) +
                            ".csv");
      }
    }
    return kExitOk;
  } catch (const BoundViolation& e) {
    err << "check failed: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    return common_validation_exit(e, err);
  }
}

// ------------------------------------------------------------------ verify

int cmd_verify(const VerifyConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const VerifyParams& p = cfg.params;
    if (p.n < 3) throw std::invalid_argument("n must be >= 3");
    if (p.points < 1 || p.mc_points < 1 || p.draws < 1 || p.mc_samples < 1) {
      throw std::invalid_argument("verification sizes must be >= 1");
    }
    std::string models = cfg.models;
    std::transform(models.begin(), models.end(), models.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (models != "ALL") {
      // Throws on an unknown name; the filter below keys on the kind label.
      model_kind_from_string(models);
    }
    std::vector<SuiteResult> suites = verify_suites(cfg.suite, p);
    if (models != "ALL") {
      for (SuiteResult& s : suites) {
        s.checks.erase(std::remove_if(s.checks.begin(), s.checks.end(),
                                      [&](const CheckResult& c) {
                                        return first_token(c.name) != models;
                                      }),
                       s.checks.end());
      }
    }

    int gated = 0, passed = 0, advisory = 0;
    json jsuites = json::array();
    for (const SuiteResult& s : suites) {
      json jchecks = json::array();
      for (const CheckResult& c : s.checks) {
        const char* tag = c.advisory ? "note" : (c.pass ? "PASS" : "FAIL");
        char line[256];
        std::snprintf(line, sizeof line, "[%s] %s: %s  residual=%.3e tol=%.3e",
                      tag, s.suite.c_str(), c.name.c_str(), c.residual,
                      c.tolerance);
        out << line << "\n";
        if (c.advisory) {
          ++advisory;
        } else {
          ++gated;
          if (c.pass) ++passed;
        }
        jchecks.push_back(json{{"name", c.name},
                               {"residual", c.residual},
                               {"tolerance", c.tolerance},
                               {"pass", c.pass},
                               {"advisory", c.advisory}});
      }
      jsuites.push_back(
          json{{"suite", s.suite}, {"pass", s.all_pass()}, {"checks", jchecks}});
    }
    bool all = passed == gated;
    out << "verify: " << passed << "/" << gated << " gated checks passed, "
        << advisory << " advisory rows\n";
    if (!cfg.report_json.empty()) {
      json doc;
      doc["command"] = "verify";
      doc["suite"] = cfg.suite;
      doc["models"] = cfg.models;
      doc["n"] = p.n;
      doc["points"] = p.points;
      doc["mc_samples"] = p.mc_samples;
      doc["mc_points"] = p.mc_points;
      doc["draws"] = p.draws;
      doc["seed"] = p.seed;
      doc["pass"] = all;
      doc["suites"] = jsuites;
      std::string text = doc.dump(2);
      text.push_back('\n');
      write_text_file(cfg.report_json, text);
    }
    return all ? kExitOk : kExitCheckFailed;
  } catch (const std::exception& e) {
    return common_validation_exit(e, err);
  }
}

// ------------------------------------------------------------------ bounds

std::vector<BoundRow> bounds_table(int n, int64_t rounds, double u_max,
                                   double lambda) {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (!(u_max > 0.0) || !std::isfinite(u_max)) {
    throw std::invalid_argument("u_max must be positive");
  }
  if (!(lambda > 0.0) || lambda > 1.0) {
    throw std::invalid_argument("lambda " + std::to_string(lambda) +
                                " out of (0, 1]");
  }
  const double phi0 = std::log(static_cast<double>(n));
  const double t = static_cast<double>(rounds);
  auto row = [&](const char* name, double lbar) {
    BoundRow r;
    r.model = name;
    r.lipschitz_numerator = lbar;
    r.phi0 = phi0;
    r.eta = u_max * std::sqrt(lbar * t / (2.0 * phi0));
    r.bound = u_max * std::sqrt(2.0 * phi0 * lbar * t);
    return r;
  };
  const double lbar = 2.0 / lambda - 1.0;
  return {row("RUM", lbar),  row("GEV", lbar),   row("GNL", lbar),
          row("PCL", lbar),  row("CNL", lbar),   row("OGEV", lbar),
          row("PDGEV", lbar), row("NL", lbar),   row("MNL", 1.0)};
}

int cmd_bounds(const BoundsConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::vector<BoundRow> rows =
        bounds_table(cfg.n, cfg.rounds, cfg.u_max, cfg.lambda);
    char line[160];
    std::snprintf(line, sizeof line, "%-7s %14s %18s %18s\n", "model",
                  "L numerator", "optimal eta", "regret bound");
    out << line;
    for (const BoundRow& r : rows) {
      std::snprintf(line, sizeof line, "%-7s %14.6g %18.10g %18.10g\n",
                    r.model.c_str(), r.lipschitz_numerator, r.eta, r.bound);
      out << line;
    }
    if (!cfg.report_json.empty()) {
      json jrows = json::array();
      for (const BoundRow& r : rows) {
        jrows.push_back(json{{"model", r.model},
                             {"lipschitz_numerator", r.lipschitz_numerator},
                             {"phi0", r.phi0},
                             {"eta", r.eta},
                             {"bound", r.bound}});
      }
      json doc;
      doc["command"] = "bounds";
      doc["n"] = cfg.n;
      doc["rounds"] = cfg.rounds;
      doc["u_max"] = cfg.u_max;
      doc["lambda"] = cfg.lambda;
      doc["rows"] = jrows;
      std::string text = doc.dump(2);
      text.push_back('\n');
      write_text_file(cfg.report_json, text);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return common_validation_exit(e, err);
  }
}

}  // namespace gevregret
