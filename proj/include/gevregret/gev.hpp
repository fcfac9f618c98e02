#pragma once

#include <string>
#include <vector>

namespace gevregret {

inline constexpr double kEulerGamma = 0.5772156649015329;

// One nest of a generalized-nested-logit allocation: a dissimilarity
// parameter lambda in (0, 1] and one allocation weight per alternative
// (zero means the alternative is not a member).
struct Nest {
  double lambda = 1.0;
  std::vector<double> alloc;
};

enum class ModelKind { kMnl, kNl, kCnl, kPcl, kOgev, kPdgev, kGnl };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// Validated allocation: every alternative's weights sum to one across nests,
// every alternative belongs to at least one nest, every nest has at least one
// member, and every lambda lies in [1e-6, 1].  validate() throws
// std::invalid_argument naming the offending entry; construction helpers call
// it so an instance in the wild is always well-formed.
struct NestSpec {
  int n_alternatives = 0;
  std::vector<Nest> nests;

  void validate() const;
};

struct GevModel {
  ModelKind kind = ModelKind::kGnl;
  NestSpec spec;

  int n() const { return spec.n_alternatives; }
  double min_lambda() const;
  // Smoothness numerator 2/min_lambda - 1; divide by eta for the gradient's
  // Lipschitz constant.
  double lipschitz_numerator() const;
  double lipschitz_constant(double eta) const;
  double log_generator_at_ones() const;
  // True when the allocation is a unit-weight partition (lambda free), i.e.
  // the two-level Gumbel sampler applies.
  bool is_partition() const;
};

// ------------------------------------------------------------ constructors
GevModel mnl(int n);
GevModel nested_logit(int n, const std::vector<std::vector<int>>& partition,
                      const std::vector<double>& lambdas);
GevModel cnl(const std::vector<std::vector<double>>& alloc, double lambda);
// Paired combinatorial: one nest per unordered pair {i, j}.  The scalar form
// uses one shared lambda; the vector form is indexed by pairs (i, j), i < j,
// in lexicographic order.
GevModel pcl(int n, double lambda);
GevModel pcl(int n, const std::vector<double>& pair_lambdas);
// Ordered model: alternatives 0..n-1, nests are sliding windows of width
// overlap+1; weights[m] is the allocation an alternative gives the window
// starting m slots after it (weights sum to one, all positive).
GevModel ogev(int n, int overlap, const std::vector<double>& weights,
              double lambda);
// Attribute-decomposed model: one partition of the alternatives per
// attribute, attribute weights summing to one, one lambda per attribute.
GevModel pdgev(int n, const std::vector<std::vector<std::vector<int>>>& partitions,
               const std::vector<double>& attr_weights,
               const std::vector<double>& lambdas);
GevModel gnl(int n, std::vector<Nest> nests);

// -------------------------------------------------------------- evaluation
// log G(exp z).  Every power and sum is taken in log space with max
// subtraction, so inputs with |z_i| up to ~700 cannot overflow even at
// lambda = 1e-6.
double log_generator(const GevModel& m, const std::vector<double>& z);
// G(y) itself; thin exp() wrapper over log_generator(log y).
double generator_value(const GevModel& m, const std::vector<double>& y);
// Expected maximum of theta_j + eta * eps_j under the model's shock
// distribution: eta * (log G(exp(theta/eta)) + Euler gamma).
double surplus(const GevModel& m, const std::vector<double>& theta, double eta);
// Gradient of the surplus = the choice probability vector.
std::vector<double> choice_probs(const GevModel& m,
                                 const std::vector<double>& theta, double eta);

// Two-stage decomposition: marginal nest probabilities, per-nest conditional
// choice probabilities, and their mixture (which equals choice_probs up to
// floating-point association).
struct TwoStage {
  std::vector<double> nest_probs;               // K
  std::vector<std::vector<double>> cond_probs;  // K x N, zero off nest
  std::vector<double> mixture;                  // N
};
TwoStage gnl_two_stage(const GevModel& m, const std::vector<double>& theta,
                       double eta);

// ----------------------------------------------------------- serialization
// {"kind": ..., "n_alternatives": ..., "nests": [{"lambda", "alloc"}, ...]};
// doubles survive a round trip bit-for-bit.
std::string model_to_json(const GevModel& m);
GevModel model_from_json(const std::string& text);

}  // namespace gevregret
