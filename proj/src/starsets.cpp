#include "paretofair/starsets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "paretofair/errors.hpp"
#include "paretofair/rng.hpp"

namespace paretofair::stars {

namespace {

constexpr double kMaxAngle = std::numbers::pi / 3.0;
constexpr int kKnots = 7;
constexpr int kSampleBudget = 10000;
constexpr int kCoverageLattice = 198;   // (L+1)(L+2)/2 ~ 2e4 points
constexpr int kRatioSamples = 100000;

const std::array<std::array<double, 2>, 3> kVertices = {{
    {1.0, 0.0},
    {0.5, std::numbers::sqrt3 / 2.0},
    {0.0, 0.0},
}};

SimplexWeights dirichlet3(Rng& rng) {
  double u = rng.uniform();
  double v = rng.uniform();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return {u, v, 1.0 - u - v};
}

std::array<bool, 3> membership_at_point(const StarSetFamily& family,
                                        const std::array<double, 2>& p) {
  std::array<bool, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const auto& base = kVertices[i];
    const auto& next = kVertices[(i + 1) % 3];
    const double rx = p[0] - base[0], ry = p[1] - base[1];
    const double d = std::hypot(rx, ry);
    if (d < 1e-15) {
      out[i] = true;  // the vertex itself
      continue;
    }
    const double ex = next[0] - base[0], ey = next[1] - base[1];
    const double dot = ex * rx + ey * ry;
    const double cross = std::fabs(ex * ry - ey * rx);
    const double angle = std::clamp(std::atan2(cross, dot), 0.0, kMaxAngle);
    out[i] = d < family.curves[i].at(angle);
  }
  return out;
}

}  // namespace

double StarBoundary::at(double angle) const {
  const double th = std::clamp(angle, theta.front(), theta.back());
  auto hi = std::upper_bound(theta.begin(), theta.end(), th);
  if (hi == theta.begin()) return radius.front();
  if (hi == theta.end()) return radius.back();
  const std::size_t j = static_cast<std::size_t>(hi - theta.begin());
  const double t0 = theta[j - 1], t1 = theta[j];
  const double w = t1 > t0 ? (th - t0) / (t1 - t0) : 0.0;
  return radius[j - 1] + w * (radius[j] - radius[j - 1]);
}

void validate_boundary(const StarBoundary& curve) {
  if (curve.theta.size() != curve.radius.size() || curve.theta.size() < 2)
    throw std::invalid_argument("boundary: need matching theta/radius, >= 2 knots");
  if (std::fabs(curve.theta.front()) > 1e-12 ||
      std::fabs(curve.theta.back() - kMaxAngle) > 1e-12)
    throw std::invalid_argument("boundary: angles must span [0, pi/3]");
  for (std::size_t i = 0; i + 1 < curve.theta.size(); ++i)
    if (curve.theta[i] > curve.theta[i + 1])
      throw std::invalid_argument("boundary: angles must be ascending");
  for (double r : curve.radius)
    if (!(r >= 0.0 && r <= 1.0))
      throw std::invalid_argument("boundary: radii must lie in [0,1]");
}

std::array<double, 2> embed(const SimplexWeights& mu) {
  validate_weights(mu);
  if (mu.size() != 3)
    throw std::invalid_argument("embed: requires exactly 3 groups");
  return {(2.0 * mu[0] + mu[1]) / 2.0, std::numbers::sqrt3 * mu[1] / 2.0};
}

std::array<bool, 3> membership(const StarSetFamily& family,
                               const SimplexWeights& mu) {
  for (const auto& curve : family.curves) validate_boundary(curve);
  return membership_at_point(family, embed(mu));
}

bool in_intersection(const StarSetFamily& family, const SimplexWeights& mu) {
  const auto m = membership(family, mu);
  return m[0] && m[1] && m[2];
}

StarSetFamily sample_family(std::uint64_t seed) {
  Rng rng(seed);
  for (int attempt = 0; attempt < kSampleBudget; ++attempt) {
    StarSetFamily family;
    family.seed = seed;
    for (auto& curve : family.curves) {
      curve.theta.resize(kKnots);
      curve.radius.resize(kKnots);
      curve.theta.front() = 0.0;
      curve.theta.back() = kMaxAngle;
      for (int j = 1; j < kKnots - 1; ++j)
        curve.theta[j] = rng.uniform(0.0, kMaxAngle);
      std::sort(curve.theta.begin() + 1, curve.theta.end() - 1);
      for (int j = 0; j < kKnots; ++j) curve.radius[j] = rng.uniform();
    }

    // Pairwise overlap along each triangle edge.
    bool edges_ok = true;
    for (int i = 0; i < 3 && edges_ok; ++i)
      edges_ok = family.curves[i].at(0.0) +
                     family.curves[(i + 1) % 3].at(kMaxAngle) >
                 1.0;
    if (!edges_ok) continue;

    // Joint coverage of the triangle and a common witness point, both
    // checked on a barycentric lattice.
    bool covered = true;
    bool witness = false;
    const int L = kCoverageLattice;
    for (int i = 0; i <= L && covered; ++i) {
      for (int j = 0; j <= L - i; ++j) {
        const SimplexWeights mu = {static_cast<double>(i) / L,
                                   static_cast<double>(j) / L,
                                   static_cast<double>(L - i - j) / L};
        const auto m = membership_at_point(family, embed(mu));
        if (!(m[0] || m[1] || m[2])) {
          covered = false;
          break;
        }
        witness = witness || (m[0] && m[1] && m[2]);
      }
    }
    if (!covered || !witness) continue;

    Rng ratio_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    int inside = 0;
    for (int s = 0; s < kRatioSamples; ++s)
      if (in_intersection(family, dirichlet3(ratio_rng))) ++inside;
    family.intersection_ratio = static_cast<double>(inside) / kRatioSamples;
    return family;
  }
  throw NumericalError("sample_family: no admissible family within " +
                       std::to_string(kSampleBudget) + " attempts (seed " +
                       std::to_string(seed) + ")");
}

RaceResult race(const StarSetFamily& family, const SimplexWeights& mu0,
                const RaceConfig& config) {
  if (config.max_iters < 1)
    throw std::invalid_argument("race: max_iters must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw std::invalid_argument("race: alpha must lie in (0,1)");
  if (config.k_min < 1)
    throw std::invalid_argument("race: k_min must be >= 1");

  SimplexWeights mu = mu0;
  if (in_intersection(family, mu)) return {0, false};

  Rng rng(config.seed);
  int k = 1;
  for (int t = 1; t <= config.max_iters; ++t) {
    switch (config.strategy) {
      case Strategy::APStar: {
        const auto m = membership(family, mu);
        ActiveMask violated = {!m[0], !m[1], !m[2]};
        mu = apstar_update(mu, violated, k, config.alpha);
        k += 1;
        break;
      }
      case Strategy::Random:
        mu = dirichlet3(rng);
        break;
      case Strategy::MWU: {
        const auto m = membership(family, mu);
        double z = 0.0;
        for (int i = 0; i < 3; ++i) {
          if (!m[i]) mu[i] *= std::exp(config.eta);
          z += mu[i];
        }
        for (double& w : mu) w /= z;
        break;
      }
    }
    if (in_intersection(family, mu)) return {t, false};
  }
  return {config.max_iters, true};
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::APStar: return "apstar";
    case Strategy::Random: return "random";
    case Strategy::MWU: return "mwu";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "apstar") return Strategy::APStar;
  if (name == "random") return Strategy::Random;
  if (name == "mwu") return Strategy::MWU;
  throw ConfigError("unknown strategy '" + name +
                    "', expected apstar, random or mwu");
}

std::vector<BenchRow> run_benchmark(int n_families, std::uint64_t seed0,
                                    const std::vector<Strategy>& strategies,
                                    int max_iters) {
  if (n_families < 1)
    throw std::invalid_argument("run_benchmark: n_families must be >= 1");
  if (strategies.empty())
    throw std::invalid_argument("run_benchmark: no strategies given");

  std::vector<BenchRow> rows;
  rows.reserve(static_cast<std::size_t>(n_families) * strategies.size());
  for (int f = 0; f < n_families; ++f) {
    const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(f);
    const StarSetFamily family = sample_family(seed);

    Rng start_rng(seed ^ 0xda3e39cb94b95bdbULL);
    SimplexWeights mu0 = dirichlet3(start_rng);
    for (int tries = 0; tries < 200 && in_intersection(family, mu0); ++tries)
      mu0 = dirichlet3(start_rng);

    for (Strategy s : strategies) {
      RaceConfig config;
      config.strategy = s;
      config.max_iters = max_iters;
      config.seed = seed ^ 0xc2b2ae3d27d4eb4fULL;
      const RaceResult res = race(family, mu0, config);
      rows.push_back(
          {seed, family.intersection_ratio, s, res.iterations, res.timeout});
    }
  }
  return rows;
}

}  // namespace paretofair::stars
