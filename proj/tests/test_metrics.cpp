#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "paretofair/errors.hpp"
#include "paretofair/metrics.hpp"
#include "paretofair/rng.hpp"

using namespace paretofair;
using namespace paretofair::metrics;

namespace {

PredictionSet single_group(std::vector<std::vector<double>> probs,
                           std::vector<int> labels) {
  PredictionSet preds;
  preds.n_classes = static_cast<int>(probs.front().size());
  preds.n_groups = 1;
  preds.probs = std::move(probs);
  preds.labels = std::move(labels);
  preds.groups.assign(preds.labels.size(), 0);
  return preds;
}

// Naive re-computation, written straight from the definitions.
double naive_group_value(const PredictionSet& preds, int group, Metric metric,
                         int bins) {
  std::vector<int> rows;
  for (std::size_t i = 0; i < preds.groups.size(); ++i)
    if (preds.groups[i] == group) rows.push_back(static_cast<int>(i));

  auto predicted = [&](int i) {
    int arg = 0;
    for (int c = 1; c < preds.n_classes; ++c)
      if (preds.probs[i][c] > preds.probs[i][arg]) arg = c;
    return arg;
  };

  if (metric == Metric::Accuracy || metric == Metric::BrierScore ||
      metric == Metric::CrossEntropy) {
    double total = 0.0;
    for (int i : rows) {
      if (metric == Metric::Accuracy) {
        total += predicted(i) == preds.labels[i] ? 1.0 : 0.0;
      } else if (metric == Metric::BrierScore) {
        for (int c = 0; c < preds.n_classes; ++c) {
          const double d =
              (c == preds.labels[i] ? 1.0 : 0.0) - preds.probs[i][c];
          total += d * d;
        }
      } else {
        total += -std::log(preds.probs[i][preds.labels[i]]);
      }
    }
    return total / rows.size();
  }

  double ece = 0.0, mce = 0.0;
  for (int m = 1; m <= bins; ++m) {
    const double lo = static_cast<double>(m - 1) / bins;
    const double hi = static_cast<double>(m) / bins;
    double gap = 0.0;
    int count = 0;
    for (int i : rows) {
      const double conf = preds.probs[i][predicted(i)];
      const bool in_bin = (conf > lo && conf <= hi) || (m == 1 && conf == 0.0);
      if (!in_bin) continue;
      gap += (predicted(i) == preds.labels[i] ? 1.0 : 0.0) - conf;
      count += 1;
    }
    if (count == 0) continue;
    ece += std::fabs(gap);
    mce = std::max(mce, std::fabs(gap) / count);
  }
  return metric == Metric::ECE ? ece / rows.size() : mce;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("brier score of a confident correct prediction") {
  const PredictionSet preds = single_group({{0.8, 0.2}}, {0});
  CHECK(evaluate(preds, Metric::BrierScore).per_group[0] ==
        doctest::Approx(0.08).epsilon(1e-12));
  CHECK(evaluate(preds, Metric::CrossEntropy).per_group[0] ==
        doctest::Approx(0.22314).epsilon(1e-4));
  CHECK(evaluate(preds, Metric::Accuracy).per_group[0] == doctest::Approx(1.0));
}

TEST_CASE("calibration example with one sharp and one miscalibrated sample") {
  const PredictionSet preds =
      single_group({{0.9, 0.1}, {0.6, 0.4}}, {0, 1});
  CHECK(evaluate(preds, Metric::ECE).per_group[0] ==
        doctest::Approx(0.35).epsilon(1e-12));
  CHECK(evaluate(preds, Metric::MCE).per_group[0] ==
        doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("argmax ties break toward the lowest class index") {
  const PredictionSet preds = single_group({{0.5, 0.5}, {0.5, 0.5}}, {0, 1});
  CHECK(evaluate(preds, Metric::Accuracy).per_group[0] ==
        doctest::Approx(0.5));
}

TEST_CASE("zero probability on the true class is a numerical error") {
  const PredictionSet preds = single_group({{1.0, 0.0}}, {1});
  try {
    evaluate(preds, Metric::CrossEntropy);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("sample 0") != std::string::npos);
  }
}

TEST_CASE("aggregates weight groups by size where documented") {
  PredictionSet preds;
  preds.n_classes = 2;
  preds.n_groups = 2;
  preds.probs = {{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  preds.labels = {0, 0, 1, 1};  // group 0: 2/3 correct; group 1: 1/1
  preds.groups = {0, 0, 0, 1};
  const GroupReport rep = evaluate(preds, Metric::Accuracy);
  CHECK(rep.per_group[0] == doctest::Approx(2.0 / 3));
  CHECK(rep.per_group[1] == doctest::Approx(1.0));
  CHECK(rep.sample_mean == doctest::Approx(3.0 / 4));
  CHECK(rep.group_mean == doctest::Approx((2.0 / 3 + 1.0) / 2));
  CHECK(rep.worst_group == doctest::Approx(2.0 / 3));
  CHECK(rep.worst_index == 0);
  CHECK(rep.disparity == doctest::Approx(1.0 / 3));

  const GroupReport brier = evaluate(preds, Metric::BrierScore);
  // For losses the worst group is the largest value.
  CHECK(brier.worst_index == 0);
  CHECK(brier.worst_group == doctest::Approx(brier.per_group[0]));
}

TEST_CASE("per-group values match a naive oracle on random sets") {
  Rng rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    PredictionSet preds;
    preds.n_classes = 2 + rng.uniform_int(3);
    preds.n_groups = 1 + rng.uniform_int(3);
    const int n = preds.n_groups * (5 + rng.uniform_int(40));
    for (int i = 0; i < n; ++i) {
      std::vector<double> p(preds.n_classes);
      double sum = 0.0;
      for (double& v : p) {
        v = 0.05 + rng.uniform();
        sum += v;
      }
      for (double& v : p) v /= sum;
      preds.probs.push_back(p);
      preds.labels.push_back(rng.uniform_int(preds.n_classes));
      preds.groups.push_back(i < preds.n_groups ? i
                                                : rng.uniform_int(preds.n_groups));
    }
    for (Metric metric : {Metric::Accuracy, Metric::BrierScore,
                          Metric::CrossEntropy, Metric::ECE, Metric::MCE}) {
      const GroupReport rep = evaluate(preds, metric);
      for (int g = 0; g < preds.n_groups; ++g)
        CHECK(std::fabs(rep.per_group[g] -
                        naive_group_value(preds, g, metric, 10)) <= 1e-12);
    }
  }
}

TEST_CASE("validation rejects malformed prediction sets") {
  PredictionSet preds = single_group({{0.7, 0.2}}, {0});  // sums to 0.9
  CHECK_THROWS_AS(validate_predictions(preds), std::invalid_argument);
  preds = single_group({{0.5, 0.5}}, {2});
  CHECK_THROWS_AS(validate_predictions(preds), std::invalid_argument);
  preds = single_group({{0.5, 0.5}}, {0});
  preds.groups = {1};
  CHECK_THROWS_AS(validate_predictions(preds), std::invalid_argument);
  preds = single_group({{0.5, 0.5}}, {0});
  preds.labels.push_back(0);
  CHECK_THROWS_AS(validate_predictions(preds), std::invalid_argument);
  CHECK_THROWS_AS(validate_predictions(PredictionSet{}),
                  std::invalid_argument);
}

TEST_CASE("a declared group with no samples is a data error") {
  PredictionSet preds = single_group({{0.5, 0.5}, {0.5, 0.5}}, {0, 1});
  preds.n_groups = 2;  // nothing assigned to group 1
  try {
    evaluate(preds, Metric::Accuracy);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("group 1") != std::string::npos);
  }
}

TEST_CASE("low confidences and custom bin counts hit the right bin") {
  // Three classes so the max probability can sit below 1/2.
  PredictionSet preds;
  preds.n_classes = 3;
  preds.n_groups = 1;
  preds.probs = {{0.34, 0.33, 0.33}};
  preds.labels = {0};
  preds.groups = {0};
  // conf 0.34 -> bin (0.3, 0.4]; |1 - 0.34| = 0.66
  CHECK(evaluate(preds, Metric::ECE).per_group[0] ==
        doctest::Approx(0.66).epsilon(1e-12));
  CHECK(evaluate(preds, Metric::ECE, 1).per_group[0] ==
        doctest::Approx(0.66).epsilon(1e-12));
  CHECK_THROWS_AS(evaluate(preds, Metric::ECE, 0), std::invalid_argument);
}

TEST_CASE("metric names round-trip and unknown names fail") {
  for (Metric m : {Metric::Accuracy, Metric::BrierScore, Metric::CrossEntropy,
                   Metric::ECE, Metric::MCE})
    CHECK(parse_metric(metric_name(m)) == m);
  CHECK_THROWS_AS(parse_metric("f1"), ConfigError);
}

TEST_CASE("reports serialize to json and csv") {
  const PredictionSet preds =
      single_group({{0.9, 0.1}, {0.6, 0.4}}, {0, 1});
  const GroupReport rep = evaluate(preds, Metric::ECE);
  const nlohmann::json j = nlohmann::json::parse(report_to_json(rep));
  CHECK(j["metric"] == "ece");
  CHECK(j["per_group"].size() == 1);
  CHECK(j["per_group"][0].get<double>() == doctest::Approx(0.35));
  CHECK(j["disparity"].get<double>() == doctest::Approx(0.0));

  std::ostringstream os;
  write_reports_csv({rep}, {"all"}, os);
  std::istringstream in(os.str());
  std::string header, row;
  REQUIRE(std::getline(in, header));
  REQUIRE(std::getline(in, row));
  CHECK(header ==
        "metric,group_all,sample_mean,group_mean,worst_group,disparity");
  CHECK(row.substr(0, 4) == "ece,");

  std::ostringstream bad;
  CHECK_THROWS_AS(write_reports_csv({rep}, {"a", "b"}, bad),
                  std::invalid_argument);
}

}  // TEST_SUITE
