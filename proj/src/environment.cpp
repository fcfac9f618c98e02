#include "gevregret/environment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "gevregret/numeric.hpp"

namespace gevregret {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

void format17(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

const char* to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kIid: return "iid";
    case EnvKind::kAdversarial: return "adversarial";
    case EnvKind::kDrift: return "drift";
    case EnvKind::kPiecewise: return "piecewise";
    case EnvKind::kReplay: return "replay";
  }
  return "iid";
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "iid") return EnvKind::kIid;
  if (name == "adversarial") return EnvKind::kAdversarial;
  if (name == "drift") return EnvKind::kDrift;
  if (name == "piecewise") return EnvKind::kPiecewise;
  if (name == "replay") return EnvKind::kReplay;
  fail("unknown environment kind \"" + name + "\"");
}

Environment::Environment(const EnvSpec& spec, uint64_t seed)
    : spec_(spec), rng_(derive_seed(seed, "env")) {
  if (spec_.n < 1) fail("environment needs at least one arm");
  if (!(spec_.u_max > 0.0)) fail("u_max must be positive");
  switch (spec_.kind) {
    case EnvKind::kIid:
      levels_.resize(spec_.n);
      for (double& l : levels_) {
        l = spec_.u_max * rng_.uniform(0.25, 0.75);
      }
      break;
    case EnvKind::kDrift:
      if (!(spec_.drift_amplitude >= 0.0) ||
          spec_.drift_amplitude > 0.2 * spec_.u_max) {
        fail("drift amplitude must lie in [0, 0.2 * u_max] so the stream "
             "stays inside the bound");
      }
      levels_.resize(spec_.n);
      for (double& l : levels_) {
        l = spec_.u_max * rng_.uniform(0.2, 0.8);
      }
      break;
    case EnvKind::kPiecewise:
      if (spec_.block_len < 1) fail("block length must be at least 1");
      levels_.assign(spec_.n, 0.0);
      break;
    case EnvKind::kReplay: {
      replay_ = read_replay(spec_.replay_path);
      for (size_t t = 0; t < replay_.size(); ++t) {
        if (static_cast<int>(replay_[t].size()) != spec_.n) {
          fail("replay line " + std::to_string(t + 1) + " has " +
               std::to_string(replay_[t].size()) + " values, expected " +
               std::to_string(spec_.n));
        }
        for (double v : replay_[t]) {
          if (!(std::abs(v) <= spec_.u_max)) {
            fail("replay line " + std::to_string(t + 1) +
                 " breaks the payoff bound");
          }
        }
      }
      break;
    }
    case EnvKind::kAdversarial:
      break;
  }
}

double Environment::drift_step_bound() const {
  if (spec_.kind != EnvKind::kDrift) return 2.0 * spec_.u_max;
  return 2.0 * spec_.drift_amplitude *
         std::abs(std::sin(spec_.drift_omega / 2.0));
}

std::vector<double> Environment::next(int64_t t,
                                      const std::vector<double>& x_t) {
  std::vector<double> u(spec_.n, 0.0);
  switch (spec_.kind) {
    case EnvKind::kIid:
      // Independent wiggle around fixed per-arm levels; levels in
      // [0.25, 0.75] and wiggle in (-0.25, 0.25) keep |u| < u_max.
      for (int j = 0; j < spec_.n; ++j) {
        u[j] = levels_[j] + spec_.u_max * rng_.uniform(-0.25, 0.25);
      }
      break;
    case EnvKind::kAdversarial: {
      // Pay the full bound to the arm the learner currently trusts least.
      int lightest = 0;
      for (int j = 1; j < spec_.n; ++j) {
        if (x_t[j] < x_t[lightest]) lightest = j;
      }
      u[lightest] = spec_.u_max;
      break;
    }
    case EnvKind::kDrift:
      u = levels_;
      u[0] += spec_.drift_amplitude *
              std::sin(spec_.drift_omega * static_cast<double>(t));
      break;
    case EnvKind::kPiecewise: {
      int64_t block = (t - 1) / spec_.block_len;
      if (block != block_index_) {
        block_index_ = block;
        for (double& l : levels_) l = spec_.u_max * rng_.uniform01();
      }
      u = levels_;
      break;
    }
    case EnvKind::kReplay: {
      if (t < 1 || t > static_cast<int64_t>(replay_.size())) {
        fail("replay stream exhausted at round " + std::to_string(t));
      }
      u = replay_[t - 1];
      break;
    }
  }
  return u;
}

std::vector<std::vector<double>> read_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open replay file " + path);
  std::vector<std::vector<double>> rounds;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> u;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        fail("replay line " + std::to_string(line_no) + ": bad value \"" +
             cell + "\"");
      }
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) {
        fail("replay line " + std::to_string(line_no) + ": bad value \"" +
             cell + "\"");
      }
      u.push_back(v);
    }
    if (u.empty()) {
      fail("replay line " + std::to_string(line_no) + " is empty");
    }
    if (!rounds.empty() && u.size() != rounds.front().size()) {
      fail("replay line " + std::to_string(line_no) + " has " +
           std::to_string(u.size()) + " values, expected " +
           std::to_string(rounds.front().size()));
    }
    rounds.push_back(std::move(u));
  }
  return rounds;
}

void write_replay(const std::vector<std::vector<double>>& rounds,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write replay file " + path);
  std::string line;
  for (const auto& u : rounds) {
    line.clear();
    for (size_t j = 0; j < u.size(); ++j) {
      if (j) line += ',';
      format17(line, u[j]);
    }
    line += '\n';
    out << line;
  }
}

double RegretTrace::best_score() const {
  double best = -std::numeric_limits<double>::infinity();
  for (double v : theta_final) best = std::max(best, v);
  return best;
}

double RegretTrace::regret_total() const {
  return best_score() - realized_total;
}

double RegretTrace::avg_regret() const {
  return rounds.empty() ? 0.0
                        : regret_total() / static_cast<double>(rounds.size());
}

double recompute_regret(const RegretTrace& trace) {
  std::vector<double> theta(trace.n, 0.0);
  KahanSum realized;
  for (const RoundRecord& r : trace.rounds) {
    for (int j = 0; j < trace.n; ++j) theta[j] += r.u[j];
    realized.add(r.payoff);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (double v : theta) best = std::max(best, v);
  return best - realized.value();
}

RegretTrace run_odp(OnlineLearner& learner, Environment& env, int64_t T) {
  if (T < 1) fail("horizon must be at least 1");
  const int n = static_cast<int>(learner.current().size());
  if (env.spec().n != n) fail("environment and learner disagree on the arms");
  RegretTrace trace;
  trace.n = n;
  trace.rounds.reserve(static_cast<size_t>(T));
  std::vector<double> theta(n, 0.0);
  KahanSum realized;
  double best = -std::numeric_limits<double>::infinity();
  for (int64_t t = 1; t <= T; ++t) {
    RoundRecord rec;
    rec.x = learner.current();
    rec.u = env.next(t, rec.x);
    rec.payoff = learner.step(rec.u);
    realized.add(rec.payoff);
    best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      theta[j] += rec.u[j];
      best = std::max(best, theta[j]);
    }
    rec.regret = best - realized.value();
    trace.rounds.push_back(std::move(rec));
  }
  trace.theta_final = std::move(theta);
  trace.realized_total = realized.value();
  return trace;
}

RegretTrace run_odp(OnlineLearner& learner, const EnvSpec& spec, int64_t T,
                    uint64_t seed) {
  Environment env(spec, seed);
  return run_odp(learner, env, T);
}

void write_trace_csv(const RegretTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write trace file " + path);
  std::string line = "t";
  for (int j = 1; j <= trace.n; ++j) line += ",x_" + std::to_string(j);
  for (int j = 1; j <= trace.n; ++j) line += ",u_" + std::to_string(j);
  line += ",payoff,regret\n";
  out << line;
  for (size_t t = 0; t < trace.rounds.size(); ++t) {
    const RoundRecord& r = trace.rounds[t];
    line = std::to_string(t + 1);
    for (double v : r.x) {
      line += ',';
      format17(line, v);
    }
    for (double v : r.u) {
      line += ',';
      format17(line, v);
    }
    line += ',';
    format17(line, r.payoff);
    line += ',';
    format17(line, r.regret);
    line += '\n';
    out << line;
  }
}

BoundReport bound_report(const GevModel& m, double eta, int64_t T,
                         double u_max, const RegretTrace& trace) {
  if (static_cast<int64_t>(trace.rounds.size()) != T) {
    fail("bound report: trace length does not match the horizon");
  }
  if (trace.n != m.n()) fail("bound report: trace does not match the model");
  BoundReport rep;
  rep.kind = m.kind;
  rep.eta = eta;
  rep.bound_thm1 = regret_bound_at(m, eta, T, u_max, BoundVariant::kThm1);
  rep.bound_thm2 = regret_bound_at(m, eta, T, u_max, BoundVariant::kThm2);
  rep.realized = trace.regret_total();
  rep.ratio = rep.realized / rep.bound_thm2;
  return rep;
}

std::vector<double> run_sweep(const SweepConfig& cfg,
                              const std::vector<uint64_t>& seeds, Exec exec) {
  std::vector<double> regrets(seeds.size(), 0.0);
  auto one_seed = [&](int64_t i) {
    std::unique_ptr<OnlineLearner> learner;
    if (cfg.recency >= 1) {
      learner = std::make_unique<OftrlLearner>(cfg.model, cfg.eta, cfg.recency,
                                               cfg.u_max);
    } else {
      learner = std::make_unique<SsaLearner>(cfg.model, cfg.eta, cfg.u_max);
    }
    Environment env(cfg.env, seeds[i]);
    RegretTrace trace = run_odp(*learner, env, cfg.T);
    regrets[i] = trace.regret_total();
  };
  const int64_t count = static_cast<int64_t>(seeds.size());
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (int64_t i = 0; i < count; ++i) one_seed(i);
  } else {
    for (int64_t i = 0; i < count; ++i) one_seed(i);
  }
  return regrets;
}

double loglog_slope(const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    fail("slope fit needs at least two matching points");
  }
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  std::vector<double> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) fail("slope fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxy / sxx;
}

}  // namespace gevregret
