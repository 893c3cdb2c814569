#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace paretofair::io {

// Row-major feature matrix with integer labels and group ids.  The first
// `numeric_dim` feature columns are raw numeric readings (the ones
// standardize() touches); the rest are one-hot indicators.
struct GroupedDataset {
  int n = 0;
  int dim = 0;
  int numeric_dim = 0;
  int n_classes = 0;
  int n_groups = 0;
  std::vector<double> x;  // n * dim
  std::vector<int> y;     // n, in [0, n_classes)
  std::vector<int> a;     // n, in [0, n_groups)
  std::vector<std::string> class_names;
  std::vector<std::string> group_names;
  std::vector<std::string> feature_names;

  const double* row(int i) const { return x.data() + static_cast<std::size_t>(i) * dim; }
  std::vector<int> group_counts() const;
};

void validate_dataset(const GroupedDataset& ds);

enum class Part { Train = 0, Val = 1, Test = 2 };

struct SplitAssignment {
  std::vector<int> part;  // per row: 0 train, 1 val, 2 test

  std::vector<int> indices_of(Part p) const;
};

struct SchemaConfig {
  std::string label_column;
  std::vector<std::string> group_columns;  // group id = cross-product of these
  std::vector<std::string> numeric_columns;
  std::vector<std::string> categorical_columns;
  std::vector<std::string> ignore_columns;
  bool standardize = true;
};

// key=value schema file; throws ConfigError on unknown keys, missing label,
// or overlapping roles.
SchemaConfig load_schema_file(const std::string& path);

// Header-based CSV ingestion.  Every header column must be covered by a
// schema role.  Categorical features are one-hot encoded against
// lexicographically sorted alphabets; numeric columns stay raw until
// standardize().  Missing cells raise DataError with the line number.
GroupedDataset ingest_csv(const std::string& path, const SchemaConfig& schema);

// Same encoding applied with the alphabets of `reference`; a category,
// label, or group combination absent from the reference raises DataError.
GroupedDataset ingest_csv(const std::string& path, const SchemaConfig& schema,
                          const GroupedDataset& reference);

// Deterministic stratified splits: per group, per split, shuffle with
// rng(seed, split index) and cut at the requested fractions.  Every group
// must land in every partition or DataError names the offender.
std::vector<SplitAssignment> stratified_splits(const GroupedDataset& ds,
                                               double train_frac,
                                               double val_frac, int n_splits,
                                               std::uint64_t seed);

struct StandardizeStats {
  std::vector<double> mean;  // numeric_dim entries
  std::vector<double> stddev;
};

// Mean/stddev from the train partition only, applied to every row.
StandardizeStats standardize(GroupedDataset& ds, const SplitAssignment& split);

GroupedDataset subset(const GroupedDataset& ds, const std::vector<int>& rows);

// Columnar binary (magic PFDS0001) plus a JSON sidecar at path + ".json".
// Round-trips doubles bit-exactly.
void save_dataset(const GroupedDataset& ds, const std::string& path);
GroupedDataset load_dataset(const std::string& path);

}  // namespace paretofair::io
