#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "paretofair/data_io.hpp"

namespace paretofair::metrics {

// Per-sample probability predictions with labels and group ids.  n_groups
// declares the expected group count; a declared group with no samples is a
// data error at evaluation time.
struct PredictionSet {
  std::vector<std::vector<double>> probs;  // n rows, one simplex each
  std::vector<int> labels;
  std::vector<int> groups;
  int n_classes = 0;
  int n_groups = 0;
};

void validate_predictions(const PredictionSet& preds);

PredictionSet predictions_from_dataset(const io::GroupedDataset& ds,
                                       std::vector<std::vector<double>> probs);

enum class Metric { Accuracy, BrierScore, CrossEntropy, ECE, MCE };

const char* metric_name(Metric m);
Metric parse_metric(const std::string& name);

struct GroupReport {
  std::string metric;
  std::vector<double> per_group;
  double sample_mean = 0.0;  // group-size weighted mean
  double group_mean = 0.0;   // unweighted mean
  double worst_group = 0.0;  // max for losses, min for accuracy
  int worst_index = 0;
  double disparity = 0.0;    // max - min across groups
};

// ece_bins: M equal-width confidence bins ((m-1)/M, m/M]; confidence 0 falls
// into the first bin.  Argmax ties break toward the lowest class index.
GroupReport evaluate(const PredictionSet& preds, Metric metric,
                     int ece_bins = 10);

std::string report_to_json(const GroupReport& report);

// One row per report: metric, per-group columns, then the four aggregates.
void write_reports_csv(const std::vector<GroupReport>& reports,
                       const std::vector<std::string>& group_names,
                       std::ostream& os);

}  // namespace paretofair::metrics
