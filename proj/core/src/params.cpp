#include "sbm/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sbm {

SbmParams::SbmParams(int n, int k, std::vector<double> alphas, double p, double q)
    : n_(n), k_(k), alphas_(std::move(alphas)), p_(p), q_(q) {
  if (n_ <= 0) throw std::invalid_argument("SbmParams: n must be positive");
  if (k_ < 2) throw std::invalid_argument("SbmParams: K must be >= 2");
  if (static_cast<int>(alphas_.size()) != k_)
    throw std::invalid_argument("SbmParams: need exactly K community fractions");
  double sum = 0;
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    if (!(alphas_[i] > 0))
      throw std::invalid_argument("SbmParams: fractions must be positive");
    if (i > 0 && alphas_[i] < alphas_[i - 1])
      throw std::invalid_argument("SbmParams: fractions must be ascending");
    sum += alphas_[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("SbmParams: fractions must sum to 1 (got " +
                                std::to_string(sum) + ")");
  if (!(p_ >= 0 && p_ <= 1) || !(q_ >= 0 && q_ <= 1))
    throw std::invalid_argument("SbmParams: p, q must lie in [0,1]");
  if (p_ < q_) throw std::invalid_argument("SbmParams: requires p >= q");
}

std::vector<int> SbmParams::community_sizes() const {
  std::vector<int> sizes(k_);
  int assigned = 0;
  for (int i = 0; i < k_; ++i) {
    sizes[i] = static_cast<int>(std::floor(alphas_[i] * n_));
    assigned += sizes[i];
  }
  // Remainder to the largest communities first; fractions are ascending, so
  // walk from the back (highest index wins ties).
  for (int i = k_ - 1; assigned < n_; --i) {
    if (i < 0) i = k_ - 1;
    ++sizes[i];
    ++assigned;
  }
  return sizes;
}

double SbmParams::expected_edges() const {
  const auto sizes = community_sizes();
  double same_pairs = 0;
  double total = static_cast<double>(n_) * (n_ - 1) / 2.0;
  for (int s : sizes) same_pairs += static_cast<double>(s) * (s - 1) / 2.0;
  return p_ * same_pairs + q_ * (total - same_pairs);
}

double SbmParams::edge_count_variance() const {
  const auto sizes = community_sizes();
  double same_pairs = 0;
  double total = static_cast<double>(n_) * (n_ - 1) / 2.0;
  for (int s : sizes) same_pairs += static_cast<double>(s) * (s - 1) / 2.0;
  return p_ * (1 - p_) * same_pairs + q_ * (1 - q_) * (total - same_pairs);
}

double divergence(const SbmParams& params) {
  const double a1 = params.alphas()[0];
  const double a2 = params.alphas()[1];
  const double p = params.p();
  const double q = params.q();
  if (p <= 0) return 0.0;             // then q = 0 as well
  if (q <= 0) return params.n() * a1 * p;  // continuous limit of the power term
  // Write the bracket as m*p*f(q/p) with f(r) = w + (1-w)r - r^(1-w),
  // w = a1/(a1+a2). Evaluating f via expm1/log1p keeps the AM-GM gap
  // accurate (and nonnegative) down to p ~ q, where the naive pow form
  // cancels catastrophically.
  const double m = a1 + a2;
  const double w = a1 / m;
  const double d = (p - q) / p;  // 1 - r in [0, 1)
  const double f = -((1.0 - w) * d + std::expm1((1.0 - w) * std::log1p(-d)));
  return params.n() * m * p * f;
}

ThresholdReport check_condition(const SbmParams& params, double s) {
  if (s < 0 || s >= params.n())
    throw std::invalid_argument("check_condition: need 0 <= s < n");
  const double np = static_cast<double>(params.n()) * params.p();
  if (np <= 1.0)
    throw std::domain_error("check_condition: slack np/log(np) undefined for np <= 1");
  ThresholdReport r;
  r.s_used = (s == 0.0) ? kExactRecoveryS : s;
  r.divergence = divergence(params);
  r.slack = np / std::log(np);
  r.target = std::log(params.n() / r.s_used);
  r.eq1_ratio = r.divergence / r.target;
  r.theorem1_holds = r.divergence - r.slack >= r.target;
  const double logn = std::log(static_cast<double>(params.n()));
  r.epsilon = params.q() > 0 ? params.p() / params.q() - 1.0
                             : std::numeric_limits<double>::infinity();
  r.sparse_regime = params.p() * logn * logn < 1.0;
  return r;
}

}  // namespace sbm
