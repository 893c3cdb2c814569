#pragma once

#include <any>
#include <functional>
#include <iosfwd>
#include <vector>

#include "paretofair/simplex.hpp"

namespace paretofair {

// A solver is given simplex weights and returns the fitted model for the
// weighted objective (as an opaque handle) along with its per-group risks.
struct SolverOutcome {
  std::any model;
  RiskVector risks;
};

using LinearWeightSolver = std::function<SolverOutcome(const SimplexWeights&)>;

// One solver evaluation.  `k` is the step counter the next update will use;
// `improved` marks a strict decrease of the best minimax risk.
struct APStarRecord {
  int iter = 0;
  SimplexWeights mu;
  RiskVector risks;
  double minimax = 0.0;
  int k = 1;
  bool improved = false;
};

struct APStarResult {
  std::vector<APStarRecord> trace;
  SimplexWeights best_mu;
  RiskVector best_risks;
  double best_minimax = 0.0;
  std::any best_model;
  int iterations = 0;  // solver evaluations performed (== trace.size())
};

// Minimax weight search.  Evaluates mu0, then alternates mask/update/solve,
// tracking the best (model, mu, risks) seen.  Stops at max_iterations or
// after patience_iters iterations without an improvement beyond
// improvement_tolerance.  A single-group problem returns after the initial
// evaluation with the weights untouched.
APStarResult run_apstar(const LinearWeightSolver& solver,
                        const SimplexWeights& mu0, const APStarConfig& config);

// One JSON object per line: {"iter","mu","risks","minimax","k","improved"}.
void write_trace_jsonl(const APStarResult& result, std::ostream& os);

}  // namespace paretofair
