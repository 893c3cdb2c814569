#include "paretofair/apstar.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include <json.hpp>

#include "paretofair/errors.hpp"

namespace paretofair {

namespace {

SolverOutcome evaluate(const LinearWeightSolver& solver,
                       const SimplexWeights& mu, int iter) {
  SolverOutcome out;
  const std::string at = "apstar iteration " + std::to_string(iter) + ": ";
  try {
    out = solver(mu);
  } catch (const ConfigError& e) {
    throw ConfigError(at + e.what());
  } catch (const DataError& e) {
    throw DataError(at + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(at + e.what());
  } catch (const std::exception& e) {
    throw NumericalError(at + e.what());
  }
  if (out.risks.size() != mu.size())
    throw NumericalError(at + "solver returned " +
                         std::to_string(out.risks.size()) + " risks for " +
                         std::to_string(mu.size()) + " groups");
  try {
    validate_risks(out.risks);
  } catch (const std::exception& e) {
    throw NumericalError(at + e.what());
  }
  return out;
}

}  // namespace

APStarResult run_apstar(const LinearWeightSolver& solver,
                        const SimplexWeights& mu0,
                        const APStarConfig& config) {
  validate_config(config);
  validate_weights(mu0);
  if (!solver) throw std::invalid_argument("run_apstar: null solver");

  APStarResult res;
  SimplexWeights mu = mu0;
  int k = 1;

  SolverOutcome out = evaluate(solver, mu, 0);
  res.best_mu = mu;
  res.best_risks = out.risks;
  res.best_minimax = max_risk(out.risks);
  res.best_model = out.model;
  res.trace.push_back({0, mu, out.risks, res.best_minimax, k, true});

  int stalled = 0;
  RiskVector current = out.risks;
  if (mu.size() > 1) {
    for (int iter = 1; iter < config.max_iterations; ++iter) {
      if (stalled >= config.patience_iters) break;
      ActiveMask mask = active_mask(current, res.best_minimax);
      mu = apstar_update(mu, mask, k, config.alpha);
      out = evaluate(solver, mu, iter);
      k += 1;

      const double minimax = max_risk(out.risks);
      const bool improved = minimax < res.best_minimax;
      const double gain = res.best_minimax - minimax;
      if (improved) {
        res.best_minimax = minimax;
        res.best_mu = mu;
        res.best_risks = out.risks;
        res.best_model = out.model;
        k = std::min(k, config.k_min);
      }
      stalled = gain > config.improvement_tolerance ? 0 : stalled + 1;
      res.trace.push_back({iter, mu, out.risks, minimax, k, improved});
      current = out.risks;
    }
  }
  res.iterations = static_cast<int>(res.trace.size());
  return res;
}

void write_trace_jsonl(const APStarResult& result, std::ostream& os) {
  for (const APStarRecord& rec : result.trace) {
    nlohmann::json line = {{"iter", rec.iter},       {"mu", rec.mu},
                           {"risks", rec.risks},     {"minimax", rec.minimax},
                           {"k", rec.k},             {"improved", rec.improved}};
    os << line.dump() << '\n';
  }
}

}  // namespace paretofair
