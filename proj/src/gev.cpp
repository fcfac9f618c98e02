#include "gevregret/gev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "gevregret/numeric.hpp"

namespace gevregret {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kLambdaFloor = 1e-6;

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

// Per-nest log terms shared by the generator, gradient, and two-stage paths:
//   a_k = logsumexp_i((log alloc_ik + z_i) / lambda_k)   over members
//   v_k = lambda_k * a_k                                 (inclusive value)
// Only v_k and differences (w/lambda - a_k) <= 0 leave this scale, so large
// a_k (small lambda) never reaches exp().
struct NestTerms {
  std::vector<double> a;
  std::vector<double> v;
};

NestTerms nest_terms(const NestSpec& spec, const std::vector<double>& z) {
  NestTerms t;
  const int K = static_cast<int>(spec.nests.size());
  t.a.resize(K);
  t.v.resize(K);
  std::vector<double> buf;
  for (int k = 0; k < K; ++k) {
    const Nest& nest = spec.nests[k];
    buf.clear();
    for (int i = 0; i < spec.n_alternatives; ++i) {
      if (nest.alloc[i] > 0.0) {
        buf.push_back((std::log(nest.alloc[i]) + z[i]) / nest.lambda);
      }
    }
    t.a[k] = logsumexp(buf);
    t.v[k] = nest.lambda * t.a[k];
  }
  return t;
}

std::vector<std::vector<int>> checked_partition(
    int n, const std::vector<std::vector<int>>& partition,
    const char* what) {
  std::vector<int> owner(n, -1);
  for (size_t k = 0; k < partition.size(); ++k) {
    if (partition[k].empty()) fail(std::string(what) + ": empty cell");
    for (int i : partition[k]) {
      if (i < 0 || i >= n) fail(std::string(what) + ": index out of range");
      if (owner[i] != -1) {
        fail(std::string(what) + ": alternative " + std::to_string(i) +
             " assigned twice");
      }
      owner[i] = static_cast<int>(k);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (owner[i] == -1) {
      fail(std::string(what) + ": alternative " + std::to_string(i) +
           " not covered");
    }
  }
  return partition;
}

}  // namespace

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kMnl: return "MNL";
    case ModelKind::kNl: return "NL";
    case ModelKind::kCnl: return "CNL";
    case ModelKind::kPcl: return "PCL";
    case ModelKind::kOgev: return "OGEV";
    case ModelKind::kPdgev: return "PDGEV";
    case ModelKind::kGnl: return "GNL";
  }
  return "GNL";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "MNL") return ModelKind::kMnl;
  if (name == "NL") return ModelKind::kNl;
  if (name == "CNL") return ModelKind::kCnl;
  if (name == "PCL") return ModelKind::kPcl;
  if (name == "OGEV") return ModelKind::kOgev;
  if (name == "PDGEV") return ModelKind::kPdgev;
  if (name == "GNL") return ModelKind::kGnl;
  fail("unknown model kind \"" + name + "\"");
}

void NestSpec::validate() const {
  if (n_alternatives < 1) fail("model needs at least one alternative");
  if (nests.empty()) fail("model needs at least one nest");
  for (size_t k = 0; k < nests.size(); ++k) {
    const Nest& nest = nests[k];
    if (!(nest.lambda >= kLambdaFloor && nest.lambda <= 1.0)) {
      fail("nest " + std::to_string(k) + ": lambda " +
           std::to_string(nest.lambda) + " out of (0, 1]");
    }
    if (static_cast<int>(nest.alloc.size()) != n_alternatives) {
      fail("nest " + std::to_string(k) + ": allocation length " +
           std::to_string(nest.alloc.size()) + ", expected " +
           std::to_string(n_alternatives));
    }
    bool has_member = false;
    for (int i = 0; i < n_alternatives; ++i) {
      double a = nest.alloc[i];
      if (!(a >= 0.0) || !std::isfinite(a)) {
        fail("nest " + std::to_string(k) + ": allocation for alternative " +
             std::to_string(i) + " must be finite and nonnegative");
      }
      has_member = has_member || a > 0.0;
    }
    if (!has_member) fail("nest " + std::to_string(k) + " is empty");
  }
  for (int i = 0; i < n_alternatives; ++i) {
    double row = 0.0;
    for (const Nest& nest : nests) row += nest.alloc[i];
    if (std::abs(row - 1.0) > kRowSumTol) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "allocation row %d sums to %.17g, expected 1", i, row);
      fail(buf);
    }
  }
}

double GevModel::min_lambda() const {
  double m = 1.0;
  for (const Nest& nest : spec.nests) m = std::min(m, nest.lambda);
  return m;
}

double GevModel::lipschitz_numerator() const { return 2.0 / min_lambda() - 1.0; }

double GevModel::lipschitz_constant(double eta) const {
  if (!(eta > 0.0)) fail("eta must be positive");
  return lipschitz_numerator() / eta;
}

double GevModel::log_generator_at_ones() const {
  return log_generator(*this, std::vector<double>(n(), 0.0));
}

bool GevModel::is_partition() const {
  for (int i = 0; i < n(); ++i) {
    int members = 0;
    bool unit = false;
    for (const Nest& nest : spec.nests) {
      if (nest.alloc[i] > 0.0) {
        ++members;
        unit = nest.alloc[i] == 1.0;
      }
    }
    if (members != 1 || !unit) return false;
  }
  return true;
}

// ------------------------------------------------------------ constructors

GevModel mnl(int n) {
  GevModel m;
  m.kind = ModelKind::kMnl;
  m.spec.n_alternatives = n;
  m.spec.nests = {Nest{1.0, std::vector<double>(std::max(n, 0), 1.0)}};
  m.spec.validate();
  return m;
}

GevModel nested_logit(int n, const std::vector<std::vector<int>>& partition,
                      const std::vector<double>& lambdas) {
  if (partition.size() != lambdas.size()) {
    fail("nested_logit: one lambda per nest required");
  }
  checked_partition(n, partition, "nested_logit partition");
  GevModel m;
  m.kind = ModelKind::kNl;
  m.spec.n_alternatives = n;
  for (size_t k = 0; k < partition.size(); ++k) {
    Nest nest{lambdas[k], std::vector<double>(n, 0.0)};
    for (int i : partition[k]) nest.alloc[i] = 1.0;
    m.spec.nests.push_back(std::move(nest));
  }
  m.spec.validate();
  return m;
}

GevModel cnl(const std::vector<std::vector<double>>& alloc, double lambda) {
  if (alloc.empty()) fail("cnl: allocation matrix is empty");
  const int n = static_cast<int>(alloc.size());
  const size_t k_count = alloc[0].size();
  for (const auto& row : alloc) {
    if (row.size() != k_count) fail("cnl: ragged allocation matrix");
  }
  GevModel m;
  m.kind = ModelKind::kCnl;
  m.spec.n_alternatives = n;
  for (size_t k = 0; k < k_count; ++k) {
    Nest nest{lambda, std::vector<double>(n, 0.0)};
    for (int i = 0; i < n; ++i) nest.alloc[i] = alloc[i][k];
    m.spec.nests.push_back(std::move(nest));
  }
  m.spec.validate();
  return m;
}

GevModel pcl(int n, const std::vector<double>& pair_lambdas) {
  if (n < 2) fail("pcl: needs at least two alternatives");
  const size_t n_pairs = static_cast<size_t>(n) * (n - 1) / 2;
  if (pair_lambdas.size() != n_pairs) {
    fail("pcl: expected " + std::to_string(n_pairs) + " pair lambdas, got " +
         std::to_string(pair_lambdas.size()));
  }
  // Each unordered pair {i, j} appears once; the symmetric allocation
  // 1/(n-1) folds the two ordered copies of the pair into one nest with an
  // identical generator, and makes each row sum exactly one.
  GevModel m;
  m.kind = ModelKind::kPcl;
  m.spec.n_alternatives = n;
  const double a = 1.0 / (n - 1);
  size_t p = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++p) {
      Nest nest{pair_lambdas[p], std::vector<double>(n, 0.0)};
      nest.alloc[i] = a;
      nest.alloc[j] = a;
      m.spec.nests.push_back(std::move(nest));
    }
  }
  m.spec.validate();
  return m;
}

GevModel pcl(int n, double lambda) {
  if (n < 2) fail("pcl: needs at least two alternatives");
  std::vector<double> lambdas(static_cast<size_t>(n) * (n - 1) / 2, lambda);
  return pcl(n, lambdas);
}

GevModel ogev(int n, int overlap, const std::vector<double>& weights,
              double lambda) {
  if (overlap < 0) fail("ogev: overlap must be nonnegative");
  if (static_cast<int>(weights.size()) != overlap + 1) {
    fail("ogev: expected " + std::to_string(overlap + 1) + " weights, got " +
         std::to_string(weights.size()));
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) fail("ogev: weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > kRowSumTol) fail("ogev: weights must sum to 1");
  // Window l = 0..n+overlap-1 holds alternatives l-overlap..l; alternative i
  // therefore sits in windows i..i+overlap with weight weights[l - i].
  GevModel m;
  m.kind = ModelKind::kOgev;
  m.spec.n_alternatives = n;
  for (int l = 0; l < n + overlap; ++l) {
    Nest nest{lambda, std::vector<double>(n, 0.0)};
    bool nonempty = false;
    for (int i = std::max(0, l - overlap); i <= std::min(n - 1, l); ++i) {
      nest.alloc[i] = weights[l - i];
      nonempty = true;
    }
    if (nonempty) m.spec.nests.push_back(std::move(nest));
  }
  m.spec.validate();
  return m;
}

GevModel pdgev(int n,
               const std::vector<std::vector<std::vector<int>>>& partitions,
               const std::vector<double>& attr_weights,
               const std::vector<double>& lambdas) {
  const size_t d_count = partitions.size();
  if (attr_weights.size() != d_count || lambdas.size() != d_count) {
    fail("pdgev: one weight and one lambda per attribute required");
  }
  double wsum = 0.0;
  for (double w : attr_weights) {
    if (!(w > 0.0)) fail("pdgev: attribute weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > kRowSumTol) {
    fail("pdgev: attribute weights must sum to 1");
  }
  // The attribute weight multiplies the whole nest term linearly, so it is
  // equivalent to an allocation of attr_weight for every member.
  GevModel m;
  m.kind = ModelKind::kPdgev;
  m.spec.n_alternatives = n;
  for (size_t d = 0; d < d_count; ++d) {
    checked_partition(n, partitions[d], "pdgev partition");
    for (const std::vector<int>& cell : partitions[d]) {
      Nest nest{lambdas[d], std::vector<double>(n, 0.0)};
      for (int i : cell) nest.alloc[i] = attr_weights[d];
      m.spec.nests.push_back(std::move(nest));
    }
  }
  m.spec.validate();
  return m;
}

GevModel gnl(int n, std::vector<Nest> nests) {
  GevModel m;
  m.kind = ModelKind::kGnl;
  m.spec.n_alternatives = n;
  m.spec.nests = std::move(nests);
  m.spec.validate();
  return m;
}

// -------------------------------------------------------------- evaluation

double log_generator(const GevModel& m, const std::vector<double>& z) {
  if (static_cast<int>(z.size()) != m.n()) {
    fail("log_generator: input length does not match the model");
  }
  NestTerms t = nest_terms(m.spec, z);
  return logsumexp(t.v);
}

double generator_value(const GevModel& m, const std::vector<double>& y) {
  std::vector<double> z(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0)) fail("generator_value: inputs must be nonnegative");
    z[i] = std::log(y[i]);
  }
  return std::exp(log_generator(m, z));
}

double surplus(const GevModel& m, const std::vector<double>& theta,
               double eta) {
  if (!(eta > 0.0)) fail("eta must be positive");
  std::vector<double> z(theta.size());
  for (size_t i = 0; i < theta.size(); ++i) z[i] = theta[i] / eta;
  return eta * (log_generator(m, z) + kEulerGamma);
}

std::vector<double> choice_probs(const GevModel& m,
                                 const std::vector<double>& theta,
                                 double eta) {
  if (!(eta > 0.0)) fail("eta must be positive");
  const int n = m.n();
  if (static_cast<int>(theta.size()) != n) {
    fail("choice_probs: input length does not match the model");
  }
  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) z[i] = theta[i] / eta;
  NestTerms t = nest_terms(m.spec, z);

  // log(y_j G_j(y)) = logsumexp_k [ v_k + (w_jk / lambda_k - a_k) ]; the
  // second summand is the conditional log-probability of j inside nest k,
  // so every term is bounded by v_k and the sum stays overflow-safe.
  const int K = static_cast<int>(m.spec.nests.size());
  std::vector<double> lnum(n);
  std::vector<double> buf;
  for (int j = 0; j < n; ++j) {
    buf.clear();
    for (int k = 0; k < K; ++k) {
      const Nest& nest = m.spec.nests[k];
      if (nest.alloc[j] > 0.0) {
        double w = (std::log(nest.alloc[j]) + z[j]) / nest.lambda;
        buf.push_back(t.v[k] + (w - t.a[k]));
      }
    }
    lnum[j] = logsumexp(buf);
  }
  double total = logsumexp(lnum);
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = std::exp(lnum[j] - total);
  return x;
}

TwoStage gnl_two_stage(const GevModel& m, const std::vector<double>& theta,
                       double eta) {
  if (!(eta > 0.0)) fail("eta must be positive");
  const int n = m.n();
  if (static_cast<int>(theta.size()) != n) {
    fail("gnl_two_stage: input length does not match the model");
  }
  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) z[i] = theta[i] / eta;
  NestTerms t = nest_terms(m.spec, z);
  const int K = static_cast<int>(m.spec.nests.size());
  double log_g = logsumexp(t.v);

  TwoStage out;
  out.nest_probs.resize(K);
  out.cond_probs.assign(K, std::vector<double>(n, 0.0));
  out.mixture.assign(n, 0.0);
  for (int k = 0; k < K; ++k) {
    const Nest& nest = m.spec.nests[k];
    out.nest_probs[k] = std::exp(t.v[k] - log_g);
    for (int j = 0; j < n; ++j) {
      if (nest.alloc[j] > 0.0) {
        double w = (std::log(nest.alloc[j]) + z[j]) / nest.lambda;
        out.cond_probs[k][j] = std::exp(w - t.a[k]);
        out.mixture[j] += out.nest_probs[k] * out.cond_probs[k][j];
      }
    }
  }
  return out;
}

// ----------------------------------------------------------- serialization

std::string model_to_json(const GevModel& m) {
  nlohmann::json j;
  j["kind"] = to_string(m.kind);
  j["n_alternatives"] = m.spec.n_alternatives;
  nlohmann::json nests = nlohmann::json::array();
  for (const Nest& nest : m.spec.nests) {
    nlohmann::json nj;
    nj["lambda"] = nest.lambda;
    nj["alloc"] = nest.alloc;
    nests.push_back(std::move(nj));
  }
  j["nests"] = std::move(nests);
  return j.dump();
}

GevModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("model JSON: ") + e.what());
  }
  if (!j.is_object()) fail("model JSON: expected an object");
  for (const auto& item : j.items()) {
    if (item.key() != "kind" && item.key() != "n_alternatives" &&
        item.key() != "nests") {
      fail("model JSON: unknown field \"" + item.key() + "\"");
    }
  }
  if (!j.contains("kind") || !j.contains("n_alternatives") ||
      !j.contains("nests")) {
    fail("model JSON: kind, n_alternatives, and nests are required");
  }
  GevModel m;
  m.kind = model_kind_from_string(j["kind"].get<std::string>());
  m.spec.n_alternatives = j["n_alternatives"].get<int>();
  if (!j["nests"].is_array()) fail("model JSON: nests must be an array");
  for (const auto& nj : j["nests"]) {
    if (!nj.is_object()) fail("model JSON: each nest must be an object");
    for (const auto& item : nj.items()) {
      if (item.key() != "lambda" && item.key() != "alloc") {
        fail("model JSON: unknown nest field \"" + item.key() + "\"");
      }
    }
    if (!nj.contains("lambda") || !nj.contains("alloc")) {
      fail("model JSON: each nest needs lambda and alloc");
    }
    Nest nest;
    nest.lambda = nj["lambda"].get<double>();
    nest.alloc = nj["alloc"].get<std::vector<double>>();
    m.spec.nests.push_back(std::move(nest));
  }
  m.spec.validate();
  return m;
}

}  // namespace gevregret
