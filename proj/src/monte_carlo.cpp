#include "gevregret/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gevregret/numeric.hpp"

namespace gevregret {

namespace {

constexpr int64_t kShardSize = 16384;

int64_t shard_count(int64_t n) { return (n + kShardSize - 1) / kShardSize; }

int64_t shard_len(int64_t n, int64_t s) {
  return std::min(kShardSize, n - s * kShardSize);
}

void check_mc_args(int64_t n_samples, double eta) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
}

SimplexEstimate finalize_counts(const std::vector<std::vector<int64_t>>& counts,
                                int n, int64_t n_samples) {
  // Integer counts merge associatively, so the merge order cannot perturb
  // the estimate; this loop stays serial only for cache friendliness.
  std::vector<int64_t> total(n, 0);
  for (const auto& shard : counts) {
    for (int j = 0; j < n; ++j) total[j] += shard[j];
  }
  SimplexEstimate est;
  est.n_samples = n_samples;
  est.probs.resize(n);
  est.std_err.resize(n);
  for (int j = 0; j < n; ++j) {
    double p = static_cast<double>(total[j]) / static_cast<double>(n_samples);
    est.probs[j] = p;
    est.std_err[j] = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
  }
  return est;
}

template <typename ShardFn>
void run_shards(int64_t n_shards, Exec exec, ShardFn&& fn) {
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (int64_t s = 0; s < n_shards; ++s) fn(s);
  } else {
    for (int64_t s = 0; s < n_shards; ++s) fn(s);
  }
}

}  // namespace

int ftpl_choose(const std::vector<double>& theta, double eta, ShockSampler& s) {
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < theta.size(); ++j) {
    double v = theta[j] + eta * s.rng.gumbel();
    if (v > best_v) {
      best_v = v;
      best = static_cast<int>(j);
    }
  }
  return best;
}

SimplexEstimate mc_choice_probs(const std::vector<double>& theta, double eta,
                                int64_t n_samples, uint64_t seed, Exec exec) {
  check_mc_args(n_samples, eta);
  const int n = static_cast<int>(theta.size());
  const int64_t n_shards = shard_count(n_samples);
  std::vector<std::vector<int64_t>> counts(n_shards);
  run_shards(n_shards, exec, [&](int64_t s) {
    ShockSampler sampler(derive_seed(seed, "mc.choice.shard", s));
    std::vector<int64_t> local(n, 0);
    for (int64_t i = shard_len(n_samples, s); i > 0; --i) {
      ++local[ftpl_choose(theta, eta, sampler)];
    }
    counts[s] = std::move(local);
  });
  return finalize_counts(counts, n, n_samples);
}

int nested_gumbel_choose(const GevModel& m, const std::vector<double>& theta,
                         double eta, Rng& rng) {
  const int n = m.n();
  const int K = static_cast<int>(m.spec.nests.size());
  // Stage one scores each nest by its inclusive value plus a fresh Gumbel;
  // stage two perturbs the within-nest scores z_i / lambda_k.  Both stages
  // are plain perturbed argmaxes, so the frequencies compose to the nest
  // marginal times the conditional without touching the closed-form output.
  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) z[i] = theta[i] / eta;
  int best_k = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  std::vector<double> buf;
  for (int k = 0; k < K; ++k) {
    const Nest& nest = m.spec.nests[k];
    buf.clear();
    for (int i = 0; i < n; ++i) {
      if (nest.alloc[i] > 0.0) {
        buf.push_back((std::log(nest.alloc[i]) + z[i]) / nest.lambda);
      }
    }
    double v = nest.lambda * logsumexp(buf) + rng.gumbel();
    if (v > best_v) {
      best_v = v;
      best_k = k;
    }
  }
  const Nest& nest = m.spec.nests[best_k];
  int best = -1;
  double best_s = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (nest.alloc[i] > 0.0) {
      double s = (std::log(nest.alloc[i]) + z[i]) / nest.lambda + rng.gumbel();
      if (s > best_s) {
        best_s = s;
        best = i;
      }
    }
  }
  return best;
}

SimplexEstimate mc_choice_probs_nested(const GevModel& m,
                                       const std::vector<double>& theta,
                                       double eta, int64_t n_samples,
                                       uint64_t seed, Exec exec) {
  check_mc_args(n_samples, eta);
  if (!m.is_partition()) {
    throw std::invalid_argument(
        "nested sampling needs a unit-allocation partition model");
  }
  const int n = m.n();
  const int64_t n_shards = shard_count(n_samples);
  std::vector<std::vector<int64_t>> counts(n_shards);
  run_shards(n_shards, exec, [&](int64_t s) {
    Rng rng(derive_seed(seed, "mc.nested.shard", s));
    std::vector<int64_t> local(n, 0);
    for (int64_t i = shard_len(n_samples, s); i > 0; --i) {
      ++local[nested_gumbel_choose(m, theta, eta, rng)];
    }
    counts[s] = std::move(local);
  });
  return finalize_counts(counts, n, n_samples);
}

ScalarEstimate mc_surplus(const std::vector<double>& theta, double eta,
                          int64_t n_samples, uint64_t seed, Exec exec) {
  check_mc_args(n_samples, eta);
  const int64_t n_shards = shard_count(n_samples);
  std::vector<double> sums(n_shards, 0.0);
  std::vector<double> sq_sums(n_shards, 0.0);
  run_shards(n_shards, exec, [&](int64_t s) {
    ShockSampler sampler(derive_seed(seed, "mc.surplus.shard", s));
    KahanSum sum;
    KahanSum sq;
    std::vector<double> eps(theta.size());
    for (int64_t i = shard_len(n_samples, s); i > 0; --i) {
      sampler.draw(eps);
      double best = -std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < theta.size(); ++j) {
        best = std::max(best, theta[j] + eta * eps[j]);
      }
      sum.add(best);
      sq.add(best * best);
    }
    sums[s] = sum.value();
    sq_sums[s] = sq.value();
  });
  // Shard-ordered merge: identical arithmetic regardless of thread count.
  KahanSum sum;
  KahanSum sq;
  for (int64_t s = 0; s < n_shards; ++s) {
    sum.add(sums[s]);
    sq.add(sq_sums[s]);
  }
  const double n = static_cast<double>(n_samples);
  ScalarEstimate est;
  est.n_samples = n_samples;
  est.value = sum.value() / n;
  double var = std::max(0.0, sq.value() / n - est.value * est.value);
  est.std_err = std::sqrt(var / n);
  return est;
}

}  // namespace gevregret
