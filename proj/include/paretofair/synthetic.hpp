#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "paretofair/data_io.hpp"
#include "paretofair/loss.hpp"
#include "paretofair/simplex.hpp"

namespace paretofair::synth {

// Binary-label generative family: A ~ priors, X|A=a ~ N(means[a], 1),
// Y|X=x,A=a ~ Bernoulli(posterior(a, x)) with a two-plateau posterior that
// jumps at thresholds[a].  x == thresholds[a] takes the low plateau.
struct GaussianPiecewiseSpec {
  std::vector<double> means;
  std::vector<double> thresholds;
  std::vector<double> rho_low;
  std::vector<double> rho_high;
  std::vector<double> priors;

  int groups() const { return static_cast<int>(means.size()); }
};

void validate_spec(const GaussianPiecewiseSpec& spec);

// Bundled three-group benchmark spec.
GaussianPiecewiseSpec benchmark_three_group();
// Bundled two-group trade-off spec (one clean group, one noisy group).
GaussianPiecewiseSpec tradeoff_two_group();

// key=value spec file: means, thresholds, rho_low, rho_high, priors
// (optional; "uniform" or an explicit list).  Throws ConfigError.
GaussianPiecewiseSpec load_spec_file(const std::string& path);
void save_spec_file(const GaussianPiecewiseSpec& spec, const std::string& path);

struct QuadratureConfig {
  int node_count = 2048;       // >= 64
  double padding_sigmas = 8.0; // bounds = [min(means)-pad, max(means)+pad]
};

double posterior(const GaussianPiecewiseSpec& spec, int group, double x);

// h^mu(x) = sum_a mu[a] p(x|a) posterior(a,x) / sum_a mu[a] p(x|a).
double optimal_classifier(const GaussianPiecewiseSpec& spec,
                          const SimplexWeights& mu, double x);

struct RiskTerms {
  std::vector<double> bayes;        // weight-independent noise floor
  std::vector<double> discrepancy;  // price of the shared classifier

  RiskVector total() const;
};

// Precomputed composite Gauss-Legendre view of a spec (panels split at the
// posterior thresholds).  All quadrature-backed operations go through this.
class OracleEvaluator {
 public:
  OracleEvaluator(const GaussianPiecewiseSpec& spec,
                  const QuadratureConfig& config = {});

  const GaussianPiecewiseSpec& spec() const { return spec_; }

  RiskTerms risk_terms(const SimplexWeights& mu, Loss loss) const;
  RiskVector risks(const SimplexWeights& mu, Loss loss) const;

  // E_{X|a}[g(X)]
  double expectation(int group, const std::function<double(double)>& g) const;

  // E_{X,Y|a} of the loss of the blended predictor
  // (1-gamma) * h^mu(x) + gamma * 1/2.
  double mixed_group_risk(const SimplexWeights& mu, Loss loss, int group,
                          double gamma) const;

 private:
  GaussianPiecewiseSpec spec_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<std::vector<double>> density_;  // [group][node]
  std::vector<std::vector<double>> post_;     // [group][node]
};

RiskTerms group_risk_terms(const GaussianPiecewiseSpec& spec,
                           const SimplexWeights& mu, Loss loss,
                           const QuadratureConfig& config = {});
RiskVector group_risks(const GaussianPiecewiseSpec& spec,
                       const SimplexWeights& mu, Loss loss,
                       const QuadratureConfig& config = {});

struct GridSearchResult {
  SimplexWeights mu;
  RiskVector risks;
  double minimax = 0.0;
};

// Exhaustive minimax over the lattice {i*step}: ties within 1e-12 of the
// minimum break toward the lexicographically smallest mu.  ConfigError when
// the lattice would exceed 3e5 points.
GridSearchResult grid_search_minimax(const GaussianPiecewiseSpec& spec,
                                     Loss loss, double step,
                                     const QuadratureConfig& config = {});

struct FrontPoint {
  SimplexWeights mu;
  RiskVector risks;
};

// Two-group risk trade-off traced at n_points interior weights
// mu_0 = (i+1)/(n_points+1).  Verifies mutual non-domination (1e-12 slack).
std::vector<FrontPoint> pareto_front_trace(const GaussianPiecewiseSpec& spec,
                                           Loss loss, int n_points,
                                           const QuadratureConfig& config = {});

// KL(N(m0,1) || N(m1,1)) = (m0-m1)^2 / 2; requires exactly two groups.
double kl_between_group_marginals(const GaussianPiecewiseSpec& spec);

// Two groups sharing X-shape up to a mean shift, with label posteriors
// f0 and f1 = (1-lambda) f0 + lambda (1 - round(f0)).
struct SineMixSpec {
  double mean_gap = 2.0;  // group-1 marginal mean; group 0 sits at 0
  double lambda = 0.0;    // mix rate toward the complementary hard labels
};

void validate_spec(const SineMixSpec& spec);

double kl_between_group_marginals(const SineMixSpec& spec);

// {f0(x), f1(x)}.  At the isolated zeros of sin(2*pi*x) + 1 the sign factor
// contributes nothing and f0 falls back to its additive tail.
std::array<double, 2> sine_mix_posteriors(const SineMixSpec& spec, double x);

// n iid triplets (x, y, a); same seed reproduces the dataset bit-for-bit.
io::GroupedDataset sample_dataset(const GaussianPiecewiseSpec& spec, int n,
                                  std::uint64_t seed);
io::GroupedDataset sample_dataset(const SineMixSpec& spec, int n,
                                  std::uint64_t seed);

}  // namespace paretofair::synth
