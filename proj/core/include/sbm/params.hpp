#pragma once

#include <cstdint>
#include <vector>

namespace sbm {

// s used when a caller asks for exact recovery (misclassified < 1). Keeps
// log(n/s) finite; exposed on the CLI as --exact.
inline constexpr double kExactRecoveryS = 0.999;

// Planted-partition model description. alphas are the community fractions,
// ascending, summing to 1; p is the within-community edge probability, q the
// across-community one, p >= q.
class SbmParams {
 public:
  SbmParams(int n, int k, std::vector<double> alphas, double p, double q);

  int n() const noexcept { return n_; }
  int k() const noexcept { return k_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

  // size_k = floor(alpha_k * n); the remainder goes one vertex at a time to
  // the largest communities first (highest index on ties). Sums to n.
  std::vector<int> community_sizes() const;

  // Closed-form E[edge count] = p * sum_k C(size_k,2) + q * cross pairs.
  double expected_edges() const;
  // Binomial variance of the edge count under the same pair decomposition.
  double edge_count_variance() const;

 private:
  int n_;
  int k_;
  std::vector<double> alphas_;
  double p_;
  double q_;
};

struct ThresholdReport {
  double divergence = 0;     // n(a1 p + a2 q - (a1+a2) p^{a1/(a1+a2)} q^{a2/(a1+a2)})
  double slack = 0;          // np / log(np)
  double target = 0;         // log(n / s)
  double eq1_ratio = 0;      // divergence / target
  bool theorem1_holds = false;  // divergence - slack >= target
  double s_used = 0;         // s actually evaluated (kExactRecoveryS when 0 passed)
  double epsilon = 0;        // p/q - 1, informational; +inf when q = 0
  bool sparse_regime = false;  // advisory: p * ln(n)^2 < 1
};

// The recoverability divergence. Uses the two smallest fractions. Exactly 0
// when p = q; exactly n*a1*p when q = 0 (continuous limit of the power term).
double divergence(const SbmParams& params);

// Finite-n sufficient condition with the np/log(np) slack. Requires np > 1
// (domain_error otherwise) and 0 <= s < n; s = 0 is mapped to
// kExactRecoveryS.
ThresholdReport check_condition(const SbmParams& params, double s);

}  // namespace sbm
