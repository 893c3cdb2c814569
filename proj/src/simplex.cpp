#include "paretofair/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace paretofair {

void validate_weights(const SimplexWeights& mu) {
  if (mu.empty()) throw std::invalid_argument("weights: empty vector");
  double sum = 0.0;
  for (double w : mu) {
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("weights: entries must be finite and >= 0");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("weights: sum is " + std::to_string(sum) +
                                ", expected 1 within 1e-9");
}

void validate_risks(const RiskVector& risks) {
  if (risks.empty()) throw std::invalid_argument("risks: empty vector");
  for (double r : risks) {
    if (!std::isfinite(r) || r < 0.0)
      throw std::invalid_argument("risks: entries must be finite and >= 0");
  }
}

void validate_config(const APStarConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw std::invalid_argument("config: alpha must lie in (0,1)");
  if (config.k_min < 1)
    throw std::invalid_argument("config: k_min must be >= 1");
  if (config.max_iterations < 1)
    throw std::invalid_argument("config: max_iterations must be >= 1");
  if (!(config.improvement_tolerance >= 0.0))
    throw std::invalid_argument("config: improvement_tolerance must be >= 0");
  if (config.patience_iters < 1)
    throw std::invalid_argument("config: patience_iters must be >= 1");
}

double max_risk(const RiskVector& risks) {
  validate_risks(risks);
  return *std::max_element(risks.begin(), risks.end());
}

bool dominates(const RiskVector& a, const RiskVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dominates: vectors of different length");
  if (a.empty()) throw std::invalid_argument("dominates: empty vectors");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

ActiveMask active_mask(const RiskVector& risks, double threshold) {
  validate_risks(risks);
  ActiveMask mask(risks.size());
  for (std::size_t i = 0; i < risks.size(); ++i)
    mask[i] = risks[i] >= threshold;
  return mask;
}

SimplexWeights apstar_update(const SimplexWeights& mu, const ActiveMask& mask,
                             int k, double alpha) {
  validate_weights(mu);
  if (mask.size() != mu.size())
    throw std::invalid_argument("apstar_update: mask length mismatch");
  if (k < 1) throw std::invalid_argument("apstar_update: k must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("apstar_update: alpha must lie in (0,1)");
  const int active = static_cast<int>(std::count(mask.begin(), mask.end(), true));
  if (active == 0)
    throw std::invalid_argument("apstar_update: active mask has no set bits");

  const double pull = (1.0 - alpha) / (static_cast<double>(k) * active);
  const double scale =
      static_cast<double>(k) / ((static_cast<double>(k) - 1.0) * alpha + 1.0);
  SimplexWeights out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    out[i] = (alpha * mu[i] + (mask[i] ? pull : 0.0)) * scale;
  return out;
}

SimplexWeights uniform_weights(int groups) {
  if (groups < 1) throw std::invalid_argument("uniform_weights: groups < 1");
  return SimplexWeights(groups, 1.0 / groups);
}

}  // namespace paretofair
