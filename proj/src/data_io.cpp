#include "paretofair/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "paretofair/errors.hpp"
#include "paretofair/rng.hpp"

namespace paretofair::io {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::vector<std::string> parse_name_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& cell, const std::string& column,
                    int lineno) {
  std::size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != cell.size() || !std::isfinite(v))
    throw DataError("line " + std::to_string(lineno) + ": cannot parse '" +
                    cell + "' in numeric column '" + column + "'");
  return v;
}

int alphabet_index(const std::vector<std::string>& alphabet,
                   const std::string& value) {
  auto it = std::lower_bound(alphabet.begin(), alphabet.end(), value);
  if (it == alphabet.end() || *it != value) return -1;
  return static_cast<int>(it - alphabet.begin());
}

// The alphabets an encoding was built from, recoverable from a dataset's
// name metadata (one-hot features are named "column=value", groups
// "colA=a|colB=b").
struct Alphabets {
  std::vector<std::string> labels;
  std::vector<std::string> group_combos;                    // id order
  std::vector<std::vector<std::string>> categorical;        // per cat column
};

Alphabets alphabets_from_reference(const GroupedDataset& ref,
                                   const SchemaConfig& schema) {
  Alphabets out;
  out.labels = ref.class_names;
  out.group_combos = ref.group_names;
  out.categorical.resize(schema.categorical_columns.size());
  for (std::size_t c = 0; c < schema.categorical_columns.size(); ++c) {
    const std::string prefix = schema.categorical_columns[c] + "=";
    for (const auto& name : ref.feature_names)
      if (name.rfind(prefix, 0) == 0)
        out.categorical[c].push_back(name.substr(prefix.size()));
  }
  return out;
}

GroupedDataset ingest_impl(const std::string& path, const SchemaConfig& schema,
                           const Alphabets* reference) {
  if (schema.label_column.empty())
    throw ConfigError("schema: label column is required");

  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);

  auto column_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw ConfigError("schema names column '" + name +
                        "' which is absent from " + path);
    return static_cast<int>(it - header.begin());
  };

  const int label_col = column_of(schema.label_column);
  std::vector<int> group_cols, numeric_cols, categorical_cols;
  for (const auto& c : schema.group_columns) group_cols.push_back(column_of(c));
  for (const auto& c : schema.numeric_columns)
    numeric_cols.push_back(column_of(c));
  for (const auto& c : schema.categorical_columns)
    categorical_cols.push_back(column_of(c));
  for (const auto& c : schema.ignore_columns) column_of(c);

  // Every header column needs exactly one role.
  std::vector<int> role_count(header.size(), 0);
  role_count[label_col] += 1;
  for (int c : group_cols) role_count[c] += 1;
  for (int c : numeric_cols) role_count[c] += 1;
  for (int c : categorical_cols) role_count[c] += 1;
  for (const auto& c : schema.ignore_columns) role_count[column_of(c)] += 1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (role_count[c] == 0)
      throw ConfigError("column '" + header[c] + "' has no role in the schema");
    if (role_count[c] > 1)
      throw ConfigError("column '" + header[c] + "' has multiple schema roles");
  }

  struct RawRow {
    std::vector<double> numerics;
    std::vector<std::string> categoricals;
    std::vector<std::string> group_values;
    std::string label;
  };
  std::vector<RawRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw DataError("line " + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " cells, found " +
                      std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (cells[c].empty())
        throw DataError("line " + std::to_string(lineno) +
                        ": missing value in column '" + header[c] + "'");
    RawRow row;
    for (std::size_t i = 0; i < numeric_cols.size(); ++i)
      row.numerics.push_back(parse_number(
          cells[numeric_cols[i]], schema.numeric_columns[i], lineno));
    for (int c : categorical_cols) row.categoricals.push_back(cells[c]);
    for (int c : group_cols) row.group_values.push_back(cells[c]);
    row.label = cells[label_col];
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");

  // Alphabets: lexicographically sorted values seen in this file, or the
  // reference's when applying an existing encoding.
  Alphabets alpha;
  if (reference) {
    alpha = *reference;
  } else {
    std::set<std::string> labels;
    std::set<std::string> combos;
    std::vector<std::set<std::string>> cats(categorical_cols.size());
    for (const auto& row : rows) {
      labels.insert(row.label);
      std::string combo;
      for (std::size_t g = 0; g < row.group_values.size(); ++g)
        combo += (g ? "|" : "") + schema.group_columns[g] + "=" +
                 row.group_values[g];
      combos.insert(combo);
      for (std::size_t c = 0; c < row.categoricals.size(); ++c)
        cats[c].insert(row.categoricals[c]);
    }
    alpha.labels.assign(labels.begin(), labels.end());
    alpha.group_combos.assign(combos.begin(), combos.end());
    for (auto& s : cats) alpha.categorical.emplace_back(s.begin(), s.end());
  }
  if (alpha.labels.size() < 2)
    throw DataError(path + ": need at least 2 label values");
  std::vector<std::string> sorted_combos = alpha.group_combos;
  const bool combos_sorted =
      std::is_sorted(sorted_combos.begin(), sorted_combos.end());
  if (!combos_sorted) std::sort(sorted_combos.begin(), sorted_combos.end());

  GroupedDataset ds;
  ds.n = static_cast<int>(rows.size());
  ds.numeric_dim = static_cast<int>(numeric_cols.size());
  ds.dim = ds.numeric_dim;
  for (const auto& a : alpha.categorical) ds.dim += static_cast<int>(a.size());
  ds.n_classes = static_cast<int>(alpha.labels.size());
  ds.n_groups = static_cast<int>(alpha.group_combos.size());
  ds.class_names = alpha.labels;
  ds.group_names = alpha.group_combos;
  ds.feature_names = schema.numeric_columns;
  for (std::size_t c = 0; c < alpha.categorical.size(); ++c)
    for (const auto& v : alpha.categorical[c])
      ds.feature_names.push_back(schema.categorical_columns[c] + "=" + v);

  ds.x.assign(static_cast<std::size_t>(ds.n) * ds.dim, 0.0);
  ds.y.resize(ds.n);
  ds.a.resize(ds.n);
  for (int i = 0; i < ds.n; ++i) {
    const RawRow& row = rows[i];
    double* out = ds.x.data() + static_cast<std::size_t>(i) * ds.dim;
    for (int c = 0; c < ds.numeric_dim; ++c) out[c] = row.numerics[c];
    int offset = ds.numeric_dim;
    for (std::size_t c = 0; c < row.categoricals.size(); ++c) {
      const int idx = alphabet_index(alpha.categorical[c], row.categoricals[c]);
      if (idx < 0)
        throw DataError("unknown category '" + row.categoricals[c] +
                        "' in column '" + schema.categorical_columns[c] +
                        "' (row " + std::to_string(i + 2) + ")");
      out[offset + idx] = 1.0;
      offset += static_cast<int>(alpha.categorical[c].size());
    }
    const int label = alphabet_index(alpha.labels, row.label);
    if (label < 0)
      throw DataError("unknown label '" + row.label + "' (row " +
                      std::to_string(i + 2) + ")");
    ds.y[i] = label;
    std::string combo;
    for (std::size_t g = 0; g < row.group_values.size(); ++g)
      combo += (g ? "|" : "") + schema.group_columns[g] + "=" +
               row.group_values[g];
    int gid = -1;
    if (combos_sorted) {
      gid = alphabet_index(sorted_combos, combo);
    } else {
      auto it = std::find(alpha.group_combos.begin(), alpha.group_combos.end(),
                          combo);
      if (it != alpha.group_combos.end())
        gid = static_cast<int>(it - alpha.group_combos.begin());
    }
    if (gid < 0)
      throw DataError("unknown group combination '" + combo + "' (row " +
                      std::to_string(i + 2) + ")");
    ds.a[i] = gid;
  }
  validate_dataset(ds);
  return ds;
}

}  // namespace

std::vector<int> GroupedDataset::group_counts() const {
  std::vector<int> counts(n_groups, 0);
  for (int g : a) counts[g] += 1;
  return counts;
}

void validate_dataset(const GroupedDataset& ds) {
  if (ds.n < 1) throw std::invalid_argument("dataset: empty");
  if (ds.dim < 1 || ds.numeric_dim < 0 || ds.numeric_dim > ds.dim)
    throw std::invalid_argument("dataset: bad dimensions");
  if (ds.n_classes < 2) throw std::invalid_argument("dataset: need >= 2 classes");
  if (ds.n_groups < 1) throw std::invalid_argument("dataset: need >= 1 group");
  if (ds.x.size() != static_cast<std::size_t>(ds.n) * ds.dim ||
      ds.y.size() != static_cast<std::size_t>(ds.n) ||
      ds.a.size() != static_cast<std::size_t>(ds.n))
    throw std::invalid_argument("dataset: storage size mismatch");
  for (int i = 0; i < ds.n; ++i) {
    if (ds.y[i] < 0 || ds.y[i] >= ds.n_classes)
      throw std::invalid_argument("dataset: label out of range at row " +
                                  std::to_string(i));
    if (ds.a[i] < 0 || ds.a[i] >= ds.n_groups)
      throw std::invalid_argument("dataset: group out of range at row " +
                                  std::to_string(i));
  }
}

std::vector<int> SplitAssignment::indices_of(Part p) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < part.size(); ++i)
    if (part[i] == static_cast<int>(p)) out.push_back(static_cast<int>(i));
  return out;
}

SchemaConfig load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("schema file not found: " + path);
  SchemaConfig schema;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "label")
      schema.label_column = value;
    else if (key == "group")
      schema.group_columns = parse_name_list(value);
    else if (key == "numeric")
      schema.numeric_columns = parse_name_list(value);
    else if (key == "categorical")
      schema.categorical_columns = parse_name_list(value);
    else if (key == "ignore")
      schema.ignore_columns = parse_name_list(value);
    else if (key == "standardize") {
      if (value == "true")
        schema.standardize = true;
      else if (value == "false")
        schema.standardize = false;
      else
        throw ConfigError(path + ":" + std::to_string(lineno) +
                          ": standardize must be true or false");
    } else {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }
  if (schema.label_column.empty())
    throw ConfigError(path + ": missing 'label'");
  if (schema.group_columns.empty())
    throw ConfigError(path + ": missing 'group'");
  return schema;
}

GroupedDataset ingest_csv(const std::string& path, const SchemaConfig& schema) {
  return ingest_impl(path, schema, nullptr);
}

GroupedDataset ingest_csv(const std::string& path, const SchemaConfig& schema,
                          const GroupedDataset& reference) {
  const Alphabets alpha = alphabets_from_reference(reference, schema);
  return ingest_impl(path, schema, &alpha);
}

std::vector<SplitAssignment> stratified_splits(const GroupedDataset& ds,
                                               double train_frac,
                                               double val_frac, int n_splits,
                                               std::uint64_t seed) {
  validate_dataset(ds);
  if (!(train_frac > 0.0 && val_frac > 0.0 && train_frac + val_frac < 1.0))
    throw std::invalid_argument(
        "stratified_splits: fractions must be positive with test share left");
  if (n_splits < 1)
    throw std::invalid_argument("stratified_splits: n_splits must be >= 1");

  std::vector<std::vector<int>> rows_of(ds.n_groups);
  for (int i = 0; i < ds.n; ++i) rows_of[ds.a[i]].push_back(i);
  for (int g = 0; g < ds.n_groups; ++g)
    if (rows_of[g].size() < 3)
      throw DataError("stratified_splits: group '" + ds.group_names[g] +
                      "' has " + std::to_string(rows_of[g].size()) +
                      " rows, cannot reach all three partitions");

  std::vector<SplitAssignment> splits(n_splits);
  for (int s = 0; s < n_splits; ++s) {
    splits[s].part.assign(ds.n, 0);
    Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s + 1)));
    for (int g = 0; g < ds.n_groups; ++g) {
      std::vector<int> rows = rows_of[g];
      for (int i = static_cast<int>(rows.size()) - 1; i > 0; --i)
        std::swap(rows[i], rows[rng.uniform_int(i + 1)]);
      const int n_g = static_cast<int>(rows.size());
      int n_train = static_cast<int>(std::lround(train_frac * n_g));
      n_train = std::clamp(n_train, 1, n_g - 2);
      int n_val = static_cast<int>(std::lround(val_frac * n_g));
      n_val = std::clamp(n_val, 1, n_g - n_train - 1);
      for (int i = 0; i < n_g; ++i) {
        const int part = i < n_train ? 0 : (i < n_train + n_val ? 1 : 2);
        splits[s].part[rows[i]] = part;
      }
    }
  }
  return splits;
}

StandardizeStats standardize(GroupedDataset& ds, const SplitAssignment& split) {
  validate_dataset(ds);
  if (split.part.size() != static_cast<std::size_t>(ds.n))
    throw std::invalid_argument("standardize: split length mismatch");

  const std::vector<int> train = split.indices_of(Part::Train);
  if (train.empty()) throw DataError("standardize: empty train partition");

  StandardizeStats stats;
  stats.mean.assign(ds.numeric_dim, 0.0);
  stats.stddev.assign(ds.numeric_dim, 1.0);
  for (int c = 0; c < ds.numeric_dim; ++c) {
    double mean = 0.0;
    for (int i : train) mean += ds.row(i)[c];
    mean /= train.size();
    double var = 0.0;
    for (int i : train) {
      const double d = ds.row(i)[c] - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / train.size());
    stats.mean[c] = mean;
    stats.stddev[c] = sd > 0.0 ? sd : 1.0;
    for (int i = 0; i < ds.n; ++i) {
      double* row = ds.x.data() + static_cast<std::size_t>(i) * ds.dim;
      row[c] = (row[c] - stats.mean[c]) / stats.stddev[c];
    }
  }
  return stats;
}

GroupedDataset subset(const GroupedDataset& ds, const std::vector<int>& rows) {
  validate_dataset(ds);
  if (rows.empty()) throw std::invalid_argument("subset: no rows selected");
  GroupedDataset out;
  out.n = static_cast<int>(rows.size());
  out.dim = ds.dim;
  out.numeric_dim = ds.numeric_dim;
  out.n_classes = ds.n_classes;
  out.n_groups = ds.n_groups;
  out.class_names = ds.class_names;
  out.group_names = ds.group_names;
  out.feature_names = ds.feature_names;
  out.x.resize(static_cast<std::size_t>(out.n) * out.dim);
  out.y.resize(out.n);
  out.a.resize(out.n);
  for (int i = 0; i < out.n; ++i) {
    const int r = rows[i];
    if (r < 0 || r >= ds.n)
      throw std::invalid_argument("subset: row index out of range");
    std::copy_n(ds.row(r), ds.dim,
                out.x.data() + static_cast<std::size_t>(i) * ds.dim);
    out.y[i] = ds.y[r];
    out.a[i] = ds.a[r];
  }
  return out;
}

void save_dataset(const GroupedDataset& ds, const std::string& path) {
  validate_dataset(ds);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset file: " + path);
  const char magic[8] = {'P', 'F', 'D', 'S', '0', '0', '0', '1'};
  out.write(magic, sizeof(magic));
  const std::int32_t dims[5] = {ds.n, ds.dim, ds.numeric_dim, ds.n_classes,
                                ds.n_groups};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(ds.x.data()),
            static_cast<std::streamsize>(ds.x.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(ds.y.data()),
            static_cast<std::streamsize>(ds.y.size() * sizeof(int)));
  out.write(reinterpret_cast<const char*>(ds.a.data()),
            static_cast<std::streamsize>(ds.a.size() * sizeof(int)));
  if (!out) throw DataError("short write to dataset file: " + path);

  nlohmann::json sidecar = {{"format", "PFDS0001"},
                            {"class_names", ds.class_names},
                            {"group_names", ds.group_names},
                            {"feature_names", ds.feature_names}};
  std::ofstream meta(path + ".json");
  if (!meta) throw DataError("cannot write dataset sidecar: " + path + ".json");
  meta << sidecar.dump(2) << '\n';
}

GroupedDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 8) != "PFDS0001")
    throw DataError(path + ": not a PFDS0001 dataset file");
  std::int32_t dims[5];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in) throw DataError(path + ": truncated header");

  GroupedDataset ds;
  ds.n = dims[0];
  ds.dim = dims[1];
  ds.numeric_dim = dims[2];
  ds.n_classes = dims[3];
  ds.n_groups = dims[4];
  if (ds.n < 1 || ds.dim < 1) throw DataError(path + ": corrupt dimensions");
  ds.x.resize(static_cast<std::size_t>(ds.n) * ds.dim);
  ds.y.resize(ds.n);
  ds.a.resize(ds.n);
  in.read(reinterpret_cast<char*>(ds.x.data()),
          static_cast<std::streamsize>(ds.x.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(ds.y.data()),
          static_cast<std::streamsize>(ds.y.size() * sizeof(int)));
  in.read(reinterpret_cast<char*>(ds.a.data()),
          static_cast<std::streamsize>(ds.a.size() * sizeof(int)));
  if (!in) throw DataError(path + ": truncated payload");

  std::ifstream meta(path + ".json");
  if (!meta) throw DataError(path + ".json: sidecar missing");
  nlohmann::json sidecar;
  try {
    meta >> sidecar;
    ds.class_names = sidecar.at("class_names").get<std::vector<std::string>>();
    ds.group_names = sidecar.at("group_names").get<std::vector<std::string>>();
    ds.feature_names =
        sidecar.at("feature_names").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ".json: " + e.what());
  }
  validate_dataset(ds);
  return ds;
}

}  // namespace paretofair::io
