#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "paretofair/simplex.hpp"

namespace paretofair::stars {

// Radial boundary of one star-shaped set, piecewise linear in the angle
// measured from the edge toward the cyclically next vertex.  Angles span
// [0, pi/3]; radii lie in [0,1].
struct StarBoundary {
  std::vector<double> theta;   // ascending, first 0, last pi/3
  std::vector<double> radius;  // same length, in [0,1]

  double at(double angle) const;  // piecewise-linear, clamped to the span
};

void validate_boundary(const StarBoundary& curve);

struct StarSetFamily {
  std::array<StarBoundary, 3> curves;
  double intersection_ratio = 0.0;  // cached Monte-Carlo estimate
  std::uint64_t seed = 0;
};

// Planar embedding of the 3-simplex: vertices map to (1,0), (1/2, sqrt3/2),
// (0,0), pairwise distance 1.
std::array<double, 2> embed(const SimplexWeights& mu);

// membership[i]: radial distance from vertex i strictly below the boundary
// at the point's angle.  The vertex itself always belongs to its own set.
std::array<bool, 3> membership(const StarSetFamily& family,
                               const SimplexWeights& mu);

bool in_intersection(const StarSetFamily& family, const SimplexWeights& mu);

// Rejection-samples a family with 7-knot curves until the three sets pairwise
// overlap near the edges, jointly cover the triangle, and share a common
// point.  NumericalError after 1e4 failed attempts.
StarSetFamily sample_family(std::uint64_t seed);

enum class Strategy { APStar, Random, MWU };

struct RaceConfig {
  Strategy strategy = Strategy::APStar;
  double alpha = 0.5;    // APStar mixing rate
  int k_min = 1;         // accepted for signature parity; no resets occur
  double eta = 0.5;      // MWU learning rate
  std::uint64_t seed = 0;
  int max_iters = 10000;
};

struct RaceResult {
  int iterations = 0;  // first iterate inside the triple intersection
  bool timeout = false;
};

// Runs one search from mu0; iteration 0 is mu0 itself.  Timeout is reported
// via the flag, not an error.
RaceResult race(const StarSetFamily& family, const SimplexWeights& mu0,
                const RaceConfig& config);

struct BenchRow {
  std::uint64_t seed = 0;
  double ratio = 0.0;
  Strategy strategy = Strategy::APStar;
  int iterations = 0;
  bool timeout = false;
};

const char* strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

// Families seed0..seed0+n-1, one shared mu0 per family (sampled outside the
// intersection when possible), every strategy raced on each.
std::vector<BenchRow> run_benchmark(int n_families, std::uint64_t seed0,
                                    const std::vector<Strategy>& strategies,
                                    int max_iters);

}  // namespace paretofair::stars
