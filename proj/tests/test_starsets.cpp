#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "paretofair/errors.hpp"
#include "paretofair/rng.hpp"
#include "paretofair/starsets.hpp"

using namespace paretofair;
using namespace paretofair::stars;

namespace {

constexpr double kPi = std::numbers::pi;

StarBoundary constant_boundary(double r) {
  return {{0.0, kPi / 3.0}, {r, r}};
}

StarSetFamily constant_family(double r0, double r1, double r2) {
  StarSetFamily family;
  family.curves = {constant_boundary(r0), constant_boundary(r1),
                   constant_boundary(r2)};
  return family;
}

SimplexWeights random_simplex3(Rng& rng) {
  double u = rng.uniform(), v = rng.uniform();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return {u, v, 1.0 - u - v};
}

const std::array<std::array<double, 2>, 3> kVertices = {{
    {1.0, 0.0},
    {0.5, std::numbers::sqrt3 / 2.0},
    {0.0, 0.0},
}};

}  // namespace

TEST_SUITE("starsets") {

TEST_CASE("embedding maps simplex vertices to the unit triangle") {
  auto p = embed({1.0, 0.0, 0.0});
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0));
  p = embed({0.0, 1.0, 0.0});
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(std::numbers::sqrt3 / 2.0));
  p = embed({0.0, 0.0, 1.0});
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(0.0));
  p = embed({1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(std::numbers::sqrt3 / 6.0));

  CHECK_THROWS_AS(embed({0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(embed({0.6, 0.6, -0.2}), std::invalid_argument);
}

TEST_CASE("embedded vertices sit at pairwise distance one") {
  const std::array<SimplexWeights, 3> vertices = {
      SimplexWeights{1.0, 0.0, 0.0}, SimplexWeights{0.0, 1.0, 0.0},
      SimplexWeights{0.0, 0.0, 1.0}};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const auto a = embed(vertices[i]);
      const auto b = embed(vertices[j]);
      CHECK(std::hypot(a[0] - b[0], a[1] - b[1]) == doctest::Approx(1.0));
    }
}

TEST_CASE("boundaries interpolate linearly and clamp outside the span") {
  StarBoundary curve{{0.0, kPi / 6.0, kPi / 3.0}, {1.0, 0.4, 0.8}};
  validate_boundary(curve);
  CHECK(curve.at(0.0) == doctest::Approx(1.0));
  CHECK(curve.at(kPi / 12.0) == doctest::Approx(0.7));
  CHECK(curve.at(kPi / 6.0) == doctest::Approx(0.4));
  CHECK(curve.at(kPi / 4.0) == doctest::Approx(0.6));
  CHECK(curve.at(-1.0) == doctest::Approx(1.0));
  CHECK(curve.at(2.0) == doctest::Approx(0.8));
}

TEST_CASE("boundary validation rejects malformed curves") {
  CHECK_THROWS_AS(validate_boundary({{0.0}, {0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_boundary({{0.0, 1.0}, {0.5, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_boundary({{0.1, kPi / 3.0}, {0.5, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      validate_boundary({{0.0, 0.5, 0.2, kPi / 3.0}, {0.5, 0.5, 0.5, 0.5}}),
      std::invalid_argument);
  CHECK_THROWS_AS(validate_boundary({{0.0, kPi / 3.0}, {0.5, 1.5}}),
                  std::invalid_argument);
  CHECK_NOTHROW(validate_boundary(constant_boundary(0.5)));
}

TEST_CASE("membership matches an independent law-of-cosines recount") {
  const StarSetFamily family = sample_family(1);
  Rng rng(123);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const SimplexWeights mu = random_simplex3(rng);
    const auto p = embed(mu);
    const auto got = membership(family, mu);
    for (int i = 0; i < 3; ++i) {
      const auto& v = kVertices[i];
      const auto& w = kVertices[(i + 1) % 3];
      const double d = std::hypot(p[0] - v[0], p[1] - v[1]);
      if (d < 1e-15) continue;
      const double e = std::hypot(p[0] - w[0], p[1] - w[1]);
      const double cosang =
          std::clamp((d * d + 1.0 - e * e) / (2.0 * d), -1.0, 1.0);
      const double radius = family.curves[i].at(std::acos(cosang));
      if (std::fabs(d - radius) < 1e-9) continue;  // knife-edge band
      CHECK(got[i] == (d < radius));
      ++checked;
    }
  }
  CHECK(checked > 5000);
}

TEST_CASE("sets are star-shaped about their vertex") {
  const StarSetFamily family = sample_family(2);
  Rng rng(321);
  for (int trial = 0; trial < 500; ++trial) {
    const SimplexWeights mu = random_simplex3(rng);
    const auto m = membership(family, mu);
    for (int i = 0; i < 3; ++i) {
      if (!m[i]) continue;
      SimplexWeights vertex(3, 0.0);
      vertex[i] = 1.0;
      for (double lambda : {0.2, 0.5, 0.9}) {
        SimplexWeights inner(3);
        for (int c = 0; c < 3; ++c)
          inner[c] = lambda * mu[c] + (1.0 - lambda) * vertex[c];
        CHECK(membership(family, inner)[i]);
      }
    }
  }
}

TEST_CASE("each vertex belongs to its own set even at radius zero") {
  const StarSetFamily family = constant_family(0.0, 0.0, 0.0);
  CHECK(membership(family, {1.0, 0.0, 0.0})[0]);
  CHECK(membership(family, {0.0, 1.0, 0.0})[1]);
  CHECK(membership(family, {0.0, 0.0, 1.0})[2]);
  CHECK_FALSE(membership(family, {1.0, 0.0, 0.0})[1]);
}

TEST_CASE("full-radius sets contain every interior point") {
  const StarSetFamily family = constant_family(1.0, 1.0, 1.0);
  Rng rng(9);
  for (int trial = 0; trial < 2000; ++trial)
    CHECK(in_intersection(family, random_simplex3(rng)));
  // A race starting inside reports zero iterations.
  RaceConfig config;
  const RaceResult res = race(family, {1.0 / 3, 1.0 / 3, 1.0 / 3}, config);
  CHECK(res.iterations == 0);
  CHECK_FALSE(res.timeout);
}

TEST_CASE("apstar race walks into a vertex-centred target in a few steps") {
  const StarSetFamily family = constant_family(0.6, 1.0, 1.0);
  RaceConfig config;
  config.strategy = Strategy::APStar;
  const RaceResult res = race(family, {0.02, 0.02, 0.96}, config);
  CHECK_FALSE(res.timeout);
  CHECK(res.iterations >= 1);
  CHECK(res.iterations <= 5);
  // Deterministic: same inputs, same outcome.
  const RaceResult again = race(family, {0.02, 0.02, 0.96}, config);
  CHECK(again.iterations == res.iterations);
}

TEST_CASE("mwu race also converges on the vertex-centred target") {
  const StarSetFamily family = constant_family(0.6, 1.0, 1.0);
  RaceConfig config;
  config.strategy = Strategy::MWU;
  const RaceResult res = race(family, {0.15, 0.15, 0.7}, config);
  CHECK_FALSE(res.timeout);
  CHECK(res.iterations >= 1);
  CHECK(res.iterations < 100);
}

TEST_CASE("an unreachable intersection times out with the sentinel result") {
  const StarSetFamily family = constant_family(0.2, 0.2, 0.2);
  for (Strategy s : {Strategy::APStar, Strategy::Random, Strategy::MWU}) {
    RaceConfig config;
    config.strategy = s;
    config.max_iters = 50;
    const RaceResult res = race(family, {1.0 / 3, 1.0 / 3, 1.0 / 3}, config);
    CHECK(res.timeout);
    CHECK(res.iterations == 50);
  }
}

TEST_CASE("race validates its configuration") {
  const StarSetFamily family = constant_family(1.0, 1.0, 1.0);
  RaceConfig config;
  config.alpha = 1.0;
  CHECK_THROWS_AS(race(family, {0.2, 0.3, 0.5}, config),
                  std::invalid_argument);
  config = {};
  config.max_iters = 0;
  CHECK_THROWS_AS(race(family, {0.2, 0.3, 0.5}, config),
                  std::invalid_argument);
}

TEST_CASE("family sampling is deterministic and caches a plausible ratio") {
  const StarSetFamily a = sample_family(77);
  const StarSetFamily b = sample_family(77);
  CHECK(a.seed == 77);
  CHECK(a.intersection_ratio == b.intersection_ratio);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.curves[i].theta == b.curves[i].theta);
    CHECK(a.curves[i].radius == b.curves[i].radius);
    CHECK(a.curves[i].theta.size() == 7);
    validate_boundary(a.curves[i]);
  }
  CHECK(a.intersection_ratio >= 0.0);
  CHECK(a.intersection_ratio <= 1.0);
}

TEST_CASE("different seeds span a range of intersection ratios") {
  double lo = 1.0, hi = 0.0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const double r = sample_family(seed).intersection_ratio;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi > lo);
}

TEST_CASE("random search times match the geometric law of the ratio") {
  const StarSetFamily family = constant_family(0.7, 1.0, 1.0);
  // Direct Monte-Carlo estimate of the intersection mass.
  Rng rng(2024);
  int inside = 0;
  const int probes = 200000;
  for (int s = 0; s < probes; ++s)
    if (in_intersection(family, random_simplex3(rng))) ++inside;
  const double p = static_cast<double>(inside) / probes;
  REQUIRE(p > 0.05);

  const SimplexWeights start = {0.01, 0.01, 0.98};
  REQUIRE_FALSE(in_intersection(family, start));
  const int races = 400;
  double total = 0.0;
  for (int s = 0; s < races; ++s) {
    RaceConfig config;
    config.strategy = Strategy::Random;
    config.seed = 5000 + s;
    const RaceResult res = race(family, start, config);
    REQUIRE_FALSE(res.timeout);
    total += res.iterations;
  }
  const double mean = total / races;
  const double expected = 1.0 / p;
  const double sigma = std::sqrt((1.0 - p) / (p * p) / races);
  CHECK(std::fabs(mean - expected) <= 4.0 * sigma);
}

TEST_CASE("strategy names round-trip and unknown names are config errors") {
  for (Strategy s : {Strategy::APStar, Strategy::Random, Strategy::MWU})
    CHECK(parse_strategy(strategy_name(s)) == s);
  CHECK_THROWS_AS(parse_strategy("annealing"), ConfigError);
}

TEST_CASE("benchmark emits one deterministic row per family and strategy") {
  const std::vector<Strategy> all = {Strategy::APStar, Strategy::Random,
                                     Strategy::MWU};
  const auto rows = run_benchmark(4, 100, all, 10000);
  REQUIRE(rows.size() == 12);
  for (int f = 0; f < 4; ++f) {
    for (int s = 0; s < 3; ++s) {
      const BenchRow& row = rows[3 * f + s];
      CHECK(row.seed == 100 + static_cast<std::uint64_t>(f));
      CHECK(row.strategy == all[s]);
      CHECK(row.ratio == rows[3 * f].ratio);
      CHECK(row.iterations >= 0);
      if (!row.timeout) CHECK(row.iterations <= 10000);
    }
  }
  const auto again = run_benchmark(4, 100, all, 10000);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].iterations == again[i].iterations);
    CHECK(rows[i].timeout == again[i].timeout);
  }
  CHECK_THROWS_AS(run_benchmark(0, 1, all, 100), std::invalid_argument);
  CHECK_THROWS_AS(run_benchmark(1, 1, {}, 100), std::invalid_argument);
}

}  // TEST_SUITE
