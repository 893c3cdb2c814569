#include "paretofair/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "paretofair/errors.hpp"

namespace paretofair::metrics {

namespace {

int argmax_lowest(const std::vector<double>& p) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(p.size()); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

// Bin index for confidence c under M bins ((m-1)/M, m/M]; c == 0 joins the
// first bin.
int bin_index(double c, int bins) {
  const int idx = static_cast<int>(std::ceil(c * bins)) - 1;
  return std::clamp(idx, 0, bins - 1);
}

double sample_metric(Metric metric, const std::vector<double>& p, int label,
                     int sample_index) {
  switch (metric) {
    case Metric::Accuracy:
      return argmax_lowest(p) == label ? 1.0 : 0.0;
    case Metric::BrierScore: {
      double acc = 0.0;
      for (int c = 0; c < static_cast<int>(p.size()); ++c) {
        const double d = (c == label ? 1.0 : 0.0) - p[c];
        acc += d * d;
      }
      return acc;
    }
    case Metric::CrossEntropy:
      if (p[label] <= 0.0)
        throw NumericalError(
            "cross-entropy is infinite at sample " +
            std::to_string(sample_index) +
            ": zero probability on the true class");
      return -std::log(p[label]);
    default:
      throw std::invalid_argument("sample_metric: not a per-sample metric");
  }
}

struct CalibrationSums {
  double ece = 0.0;
  double mce = 0.0;
};

CalibrationSums calibration(const PredictionSet& preds,
                            const std::vector<int>& rows, int bins) {
  std::vector<double> gap(bins, 0.0);
  std::vector<int> count(bins, 0);
  for (int i : rows) {
    const auto& p = preds.probs[i];
    const int pred = argmax_lowest(p);
    const double conf = p[pred];
    const int b = bin_index(conf, bins);
    gap[b] += (pred == preds.labels[i] ? 1.0 : 0.0) - conf;
    count[b] += 1;
  }
  CalibrationSums out;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;  // empty bins contribute nothing
    out.ece += std::fabs(gap[b]);
    out.mce = std::max(out.mce, std::fabs(gap[b]) / count[b]);
  }
  out.ece /= static_cast<double>(rows.size());
  return out;
}

}  // namespace

void validate_predictions(const PredictionSet& preds) {
  const std::size_t n = preds.probs.size();
  if (n == 0) throw std::invalid_argument("predictions: empty set");
  if (preds.labels.size() != n || preds.groups.size() != n)
    throw std::invalid_argument("predictions: length mismatch");
  if (preds.n_classes < 2)
    throw std::invalid_argument("predictions: need at least 2 classes");
  if (preds.n_groups < 1)
    throw std::invalid_argument("predictions: need at least 1 group");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = preds.probs[i];
    if (static_cast<int>(p.size()) != preds.n_classes)
      throw std::invalid_argument("predictions: row " + std::to_string(i) +
                                  " has wrong class count");
    double sum = 0.0;
    for (double v : p) {
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("predictions: row " + std::to_string(i) +
                                    " is not a probability vector");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-6)
      throw std::invalid_argument("predictions: row " + std::to_string(i) +
                                  " does not sum to 1");
    if (preds.labels[i] < 0 || preds.labels[i] >= preds.n_classes)
      throw std::invalid_argument("predictions: label out of range at row " +
                                  std::to_string(i));
    if (preds.groups[i] < 0 || preds.groups[i] >= preds.n_groups)
      throw std::invalid_argument("predictions: group out of range at row " +
                                  std::to_string(i));
  }
}

PredictionSet predictions_from_dataset(const io::GroupedDataset& ds,
                                       std::vector<std::vector<double>> probs) {
  PredictionSet preds;
  preds.probs = std::move(probs);
  preds.labels = ds.y;
  preds.groups = ds.a;
  preds.n_classes = ds.n_classes;
  preds.n_groups = ds.n_groups;
  validate_predictions(preds);
  return preds;
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::Accuracy: return "accuracy";
    case Metric::BrierScore: return "brier";
    case Metric::CrossEntropy: return "cross_entropy";
    case Metric::ECE: return "ece";
    case Metric::MCE: return "mce";
  }
  return "?";
}

Metric parse_metric(const std::string& name) {
  if (name == "accuracy") return Metric::Accuracy;
  if (name == "brier") return Metric::BrierScore;
  if (name == "cross_entropy") return Metric::CrossEntropy;
  if (name == "ece") return Metric::ECE;
  if (name == "mce") return Metric::MCE;
  throw ConfigError("unknown metric '" + name + "'");
}

GroupReport evaluate(const PredictionSet& preds, Metric metric, int ece_bins) {
  validate_predictions(preds);
  if (ece_bins < 1)
    throw std::invalid_argument("evaluate: ece_bins must be >= 1");

  std::vector<std::vector<int>> rows_of(preds.n_groups);
  for (std::size_t i = 0; i < preds.groups.size(); ++i)
    rows_of[preds.groups[i]].push_back(static_cast<int>(i));
  for (int g = 0; g < preds.n_groups; ++g)
    if (rows_of[g].empty())
      throw DataError("evaluate: group " + std::to_string(g) +
                      " has no samples");

  GroupReport report;
  report.metric = metric_name(metric);
  report.per_group.resize(preds.n_groups);
  for (int g = 0; g < preds.n_groups; ++g) {
    if (metric == Metric::ECE || metric == Metric::MCE) {
      const CalibrationSums sums = calibration(preds, rows_of[g], ece_bins);
      report.per_group[g] = metric == Metric::ECE ? sums.ece : sums.mce;
    } else {
      double acc = 0.0;
      for (int i : rows_of[g])
        acc += sample_metric(metric, preds.probs[i], preds.labels[i], i);
      report.per_group[g] = acc / rows_of[g].size();
    }
  }

  const double n_total = static_cast<double>(preds.probs.size());
  double weighted = 0.0, flat = 0.0;
  for (int g = 0; g < preds.n_groups; ++g) {
    weighted += report.per_group[g] * rows_of[g].size() / n_total;
    flat += report.per_group[g] / preds.n_groups;
  }
  report.sample_mean = weighted;
  report.group_mean = flat;

  const auto [lo, hi] =
      std::minmax_element(report.per_group.begin(), report.per_group.end());
  const bool higher_is_better = metric == Metric::Accuracy;
  const auto worst = higher_is_better ? lo : hi;
  report.worst_group = *worst;
  report.worst_index = static_cast<int>(worst - report.per_group.begin());
  report.disparity = *hi - *lo;
  return report;
}

std::string report_to_json(const GroupReport& report) {
  nlohmann::json j = {{"metric", report.metric},
                      {"per_group", report.per_group},
                      {"sample_mean", report.sample_mean},
                      {"group_mean", report.group_mean},
                      {"worst_group", report.worst_group},
                      {"worst_index", report.worst_index},
                      {"disparity", report.disparity}};
  return j.dump();
}

void write_reports_csv(const std::vector<GroupReport>& reports,
                       const std::vector<std::string>& group_names,
                       std::ostream& os) {
  os.precision(17);
  os << "metric";
  for (const auto& name : group_names) os << ",group_" << name;
  os << ",sample_mean,group_mean,worst_group,disparity\n";
  for (const auto& report : reports) {
    if (report.per_group.size() != group_names.size())
      throw std::invalid_argument("write_reports_csv: group count mismatch");
    os << report.metric;
    for (double v : report.per_group) os << ',' << v;
    os << ',' << report.sample_mean << ',' << report.group_mean << ','
       << report.worst_group << ',' << report.disparity << '\n';
  }
}

}  // namespace paretofair::metrics
