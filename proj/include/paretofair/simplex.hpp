#pragma once

#include <vector>

namespace paretofair {

// Nonnegative group weights summing to 1 (checked to 1e-9 at API boundaries).
using SimplexWeights = std::vector<double>;

// Per-group risks; finite and nonnegative.
using RiskVector = std::vector<double>;

// One flag per group; operations that consume a mask require at least one
// set bit.
using ActiveMask = std::vector<bool>;

struct APStarConfig {
  double alpha = 0.5;                  // update mixing rate, in (0,1)
  int k_min = 1;                       // floor the step counter resets to
  int max_iterations = 500;            // solver evaluations, initial included
  double improvement_tolerance = 0.0;  // minimax gain that counts as progress
  int patience_iters = 25;             // stop after this many stalled iters
};

// Throw std::invalid_argument on violation.
void validate_weights(const SimplexWeights& mu);
void validate_risks(const RiskVector& risks);
void validate_config(const APStarConfig& config);

double max_risk(const RiskVector& risks);

// True iff a <= b componentwise with strict inequality somewhere.
bool dominates(const RiskVector& a, const RiskVector& b);

// mask[i] = (risks[i] >= threshold); ties at the threshold count as active.
ActiveMask active_mask(const RiskVector& risks, double threshold);

// One step of the simplex weight update:
//   mu' = (alpha*mu + (1-alpha)/(k*|mask|) * mask) * k/((k-1)*alpha + 1)
// Preserves the simplex exactly; no renormalization is applied.
SimplexWeights apstar_update(const SimplexWeights& mu, const ActiveMask& mask,
                             int k, double alpha);

SimplexWeights uniform_weights(int groups);

}  // namespace paretofair
