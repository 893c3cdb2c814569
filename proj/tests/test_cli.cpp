#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "paretofair/models.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  if (!ok) {
    failures += 1;
    std::fprintf(stderr, "FAIL %s\n", what.c_str());
  }
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_command(const std::string& bin, const std::string& args,
                const fs::path& log) {
  const std::string cmd = "'" + bin + "' " + args + " > '" + log.string() +
                          "' 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void expect_exit(const std::string& bin, const std::string& args,
                 const fs::path& log, int expected, const std::string& what) {
  const int code = run_command(bin, args, log);
  if (code != expected) {
    failures += 1;
    std::fprintf(stderr, "FAIL %s: exit %d, expected %d\n%s\n", what.c_str(),
                 code, expected, slurp(log).c_str());
  }
}

std::vector<std::vector<double>> read_csv_numbers(const fs::path& path) {
  std::vector<std::vector<double>> rows;
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

// Columns: row,group,label,p_0,...
struct PredRow {
  int row = 0, group = 0, label = 0;
  std::vector<double> probs;
};

std::vector<PredRow> read_predictions(const fs::path& path) {
  std::vector<PredRow> out;
  for (const std::vector<double>& cells : read_csv_numbers(path)) {
    PredRow row;
    row.row = static_cast<int>(cells[0]);
    row.group = static_cast<int>(cells[1]);
    row.label = static_cast<int>(cells[2]);
    row.probs.assign(cells.begin() + 3, cells.end());
    out.push_back(row);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

int main() {
  const char* bin_env = std::getenv("PARETOFAIR_BIN");
  const char* specs_env = std::getenv("PARETOFAIR_SPECS");
  if (bin_env == nullptr || specs_env == nullptr) {
    std::fprintf(stderr, "PARETOFAIR_BIN and PARETOFAIR_SPECS must be set\n");
    return 1;
  }
  const std::string bin = bin_env;
  const fs::path specs = specs_env;
  const fs::path work = fs::temp_directory_path() / "paretofair_cli_test";
  fs::remove_all(work);
  fs::create_directories(work);
  const fs::path log = work / "command.log";

  const std::string tradeoff = (specs / "two_group_tradeoff.spec").string();
  const std::string three = (specs / "three_group.spec").string();

  // ---- synth-front ---------------------------------------------------------
  const fs::path front_dir = work / "front";
  expect_exit(bin,
              "synth-front --spec '" + tradeoff + "' --loss bs --out-dir '" +
                  front_dir.string() + "'",
              log, 0, "synth-front runs");
  {
    const auto rows = read_csv_numbers(front_dir / "front.csv");
    check(rows.size() == 101, "front.csv has 101 rows");
    bool non_dominated = true, minimax_ok = true;
    for (const auto& a : rows) {
      minimax_ok = minimax_ok && a[4] == std::max(a[2], a[3]);
      for (const auto& b : rows) {
        const bool dominates =
            a[2] <= b[2] && a[3] <= b[3] && (a[2] < b[2] || a[3] < b[3]);
        non_dominated = non_dominated && !dominates;
      }
    }
    check(non_dominated, "front rows are mutually non-dominated");
    check(minimax_ok, "front minimax column is the row max");

    json manifest = json::parse(slurp(front_dir / "manifest.json"));
    check(manifest["command"] == "synth-front", "front manifest command");
    check(!manifest["version"].get<std::string>().empty(),
          "front manifest version");
    check(manifest["outputs"] == json::array({"front.csv"}),
          "front manifest outputs");
    check(manifest["config"]["loss"] == "bs", "front manifest config echo");
  }

  // Identical groups: the whole front sits at the utopia point.
  const fs::path same_spec = work / "identical.spec";
  write_file(same_spec,
             "means = -0.3, -0.3\nthresholds = 0.1, 0.1\n"
             "rho_low = 0.2, 0.2\nrho_high = 0.8, 0.8\npriors = uniform\n");
  const fs::path same_dir = work / "front_same";
  expect_exit(bin,
              "synth-front --spec '" + same_spec.string() + "' --out-dir '" +
                  same_dir.string() + "'",
              log, 0, "synth-front identical groups runs");
  {
    const auto rows = read_csv_numbers(same_dir / "front.csv");
    bool all_equal = !rows.empty();
    for (const auto& row : rows)
      all_equal = all_equal && std::fabs(row[2] - rows[0][2]) < 1e-9 &&
                  std::fabs(row[3] - rows[0][3]) < 1e-9;
    check(all_equal, "identical groups give a single utopia point");
  }

  expect_exit(bin,
              "synth-front --spec '" + (work / "missing.spec").string() +
                  "' --out-dir '" + (work / "front_missing").string() + "'",
              log, 2, "synth-front missing spec exits 2");

  // Bit-reproducibility of an oracle command.
  const fs::path front_again = work / "front_again";
  expect_exit(bin,
              "synth-front --spec '" + tradeoff + "' --loss bs --out-dir '" +
                  front_again.string() + "'",
              log, 0, "synth-front rerun");
  check(slurp(front_dir / "front.csv") == slurp(front_again / "front.csv"),
        "front.csv reproduces bit-identically");

  // ---- synth-apstar --------------------------------------------------------
  const fs::path ap_dir = work / "apstar";
  expect_exit(bin,
              "synth-apstar --spec '" + three +
                  "' --loss bs --seed 3 --runs 5 --max-iters 300 --out-dir '" +
                  ap_dir.string() + "'",
              log, 0, "synth-apstar runs");
  {
    json summary = json::parse(slurp(ap_dir / "summary.json"));
    check(summary["runs"].size() == 5, "apstar summary has 5 runs");
    check(summary["max_relative_gap"].get<double>() <= 0.01,
          "apstar final minimax within 1% of grid value");
    check(summary.contains("best_minimax_stddev"),
          "apstar summary reports run variance");
    for (int r = 0; r < 5; ++r) {
      const fs::path trace = ap_dir / ("trace_" + std::to_string(r) + ".jsonl");
      check(fs::exists(trace), "trace file " + std::to_string(r) + " exists");
      std::ifstream in(trace);
      std::string line;
      int lines = 0;
      bool parses = true;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        lines += 1;
        const json record = json::parse(line, nullptr, false);
        parses = parses && !record.is_discarded() && record.contains("mu") &&
                 record.contains("minimax");
      }
      check(parses && lines >= 1 && lines <= 300,
            "trace " + std::to_string(r) + " is valid JSONL");
    }
    json manifest = json::parse(slurp(ap_dir / "manifest.json"));
    check(manifest["seeds"].size() == 5, "apstar manifest lists 5 seeds");
  }

  const fs::path ap_again = work / "apstar_again";
  expect_exit(bin,
              "synth-apstar --spec '" + three +
                  "' --loss bs --seed 3 --runs 5 --max-iters 300 --out-dir '" +
                  ap_again.string() + "'",
              log, 0, "synth-apstar rerun");
  check(slurp(ap_dir / "trace_0.jsonl") == slurp(ap_again / "trace_0.jsonl"),
        "apstar traces reproduce bit-identically");

  expect_exit(bin,
              "synth-apstar --spec '" + three + "' --alpha 2.0 --out-dir '" +
                  (work / "apstar_bad").string() + "'",
              log, 2, "alpha outside (0,1) exits 2");

  // ---- starset-bench -------------------------------------------------------
  const fs::path bench_dir = work / "bench";
  expect_exit(bin,
              "starset-bench --n-families 6 --seed 5 --strategies "
              "apstar,random --max-iters 2000 --out-dir '" +
                  bench_dir.string() + "'",
              log, 0, "starset-bench runs");
  {
    std::ifstream in(bench_dir / "races.csv");
    std::string line;
    std::getline(in, line);
    check(line == "seed,ratio,strategy,iterations,timeout",
          "races.csv header");
    int rows = 0;
    while (std::getline(in, line))
      if (!line.empty()) rows += 1;
    check(rows == 12, "races.csv has one row per family and strategy");
    json summary = json::parse(slurp(bench_dir / "summary.json"));
    check(summary["ratio_bins"].size() == 5, "bench summary has 5 ratio bins");
    check(summary["strategies"].contains("apstar"),
          "bench summary reports strategies");
  }
  expect_exit(bin,
              "starset-bench --n-families 2 --strategies warp --out-dir '" +
                  (work / "bench_bad").string() + "'",
              log, 2, "unknown strategy exits 2");

  // ---- train ---------------------------------------------------------------
  // Separable toy data: label is the sign of x, two groups.
  const fs::path toy_csv = work / "toy.csv";
  {
    std::string csv = "x,g,label\n";
    for (int g = 0; g < 2; ++g)
      for (int i = 0; i < 40; ++i) {
        const double x = (i % 2 == 0 ? 1.0 : -1.0) * (0.5 + 0.01 * i);
        csv += std::to_string(x) + "," + (g == 0 ? "a" : "b") + "," +
               (x > 0 ? "pos" : "neg") + "\n";
      }
    write_file(toy_csv, csv);
  }
  const fs::path toy_schema = work / "toy.schema";
  write_file(toy_schema,
             "label = label\ngroup = g\nnumeric = x\nstandardize = false\n");

  const std::string train_common =
      " --splits 2 --epochs 40 --patience 10 --lr 0.5 --batch-size 16";
  const fs::path naive_dir = work / "naive";
  expect_exit(bin,
              "train --data '" + toy_csv.string() + "' --schema '" +
                  toy_schema.string() + "' --mode naive" + train_common +
                  " --out-dir '" + naive_dir.string() + "'",
              log, 0, "naive training runs");
  {
    json summary = json::parse(slurp(naive_dir / "summary.json"));
    for (const json& split : summary["splits"])
      check(split["accuracy"] == 1.0,
            "naive mode separates the toy data (accuracy 1.0)");
    check(fs::exists(naive_dir / "model_split0.bin"), "model artifact saved");
    check(fs::exists(naive_dir / "reports_split0.csv"), "report saved");
  }

  // Single group: mmpf-joint collapses to naive, bit for bit.
  const fs::path one_csv = work / "one_group.csv";
  {
    std::string csv = "x,g,label\n";
    for (int i = 0; i < 40; ++i) {
      const double x = (i % 2 == 0 ? 1.0 : -1.0) * (0.5 + 0.01 * i);
      csv += std::to_string(x) + ",all," + (x > 0 ? "pos" : "neg") + "\n";
    }
    write_file(one_csv, csv);
  }
  const fs::path solo_naive = work / "solo_naive";
  const fs::path solo_joint = work / "solo_joint";
  for (const auto& [mode, dir] :
       {std::pair{"naive", &solo_naive}, std::pair{"mmpf-joint", &solo_joint}})
    expect_exit(bin,
                "train --data '" + one_csv.string() + "' --schema '" +
                    toy_schema.string() + "' --mode " + mode + train_common +
                    " --out-dir '" + dir->string() + "'",
                log, 0, std::string(mode) + " on one group runs");
  check(slurp(solo_naive / "predictions_split0.csv") ==
            slurp(solo_joint / "predictions_split0.csv"),
        "single-group mmpf-joint matches naive predictions exactly");

  // Y = A: plugin predictions equal the reweighted balanced model.
  const fs::path ya_csv = work / "y_equals_a.csv";
  {
    std::string csv = "x,g,label\n";
    for (int i = 0; i < 40; ++i) {
      const double x = (i % 2 == 0 ? 1.0 : -1.0) * (0.4 + 0.02 * i);
      const char* g = x > 0 ? "m" : "f";
      csv += std::to_string(x) + "," + g + "," + g + "\n";
    }
    write_file(ya_csv, csv);
  }
  const fs::path balanced_dir = work / "balanced";
  const fs::path plugin_dir = work / "plugin";
  for (const auto& [mode, dir] : {std::pair{"balanced", &balanced_dir},
                                  std::pair{"mmpf-plugin", &plugin_dir}})
    expect_exit(bin,
                "train --data '" + ya_csv.string() + "' --schema '" +
                    toy_schema.string() + "' --mode " + mode + train_common +
                    " --max-iters 10 --out-dir '" + dir->string() + "'",
                log, 0, std::string(mode) + " on Y=A data runs");
  {
    json plugin_summary = json::parse(slurp(plugin_dir / "summary.json"));
    for (int s = 0; s < 2; ++s) {
      const json& split = plugin_summary["splits"][s];
      const std::vector<double> mu = split["mu"];
      const std::vector<double> priors = split["priors"];
      const auto base = read_predictions(
          balanced_dir / ("predictions_split" + std::to_string(s) + ".csv"));
      const auto plugin = read_predictions(
          plugin_dir / ("predictions_split" + std::to_string(s) + ".csv"));
      check(base.size() == plugin.size() && !base.empty(),
            "prediction files align");
      double worst = 0.0;
      for (std::size_t i = 0; i < base.size(); ++i) {
        const std::vector<double> expected =
            paretofair::models::reweight_output(base[i].probs, mu, priors);
        for (std::size_t c = 0; c < expected.size(); ++c)
          worst = std::max(worst, std::fabs(expected[c] - plugin[i].probs[c]));
      }
      check(worst <= 1e-9,
            "plugin equals reweighted balanced model (max dev " +
                std::to_string(worst) + ")");
    }
  }

  expect_exit(bin,
              "train --data '" + (work / "absent.csv").string() +
                  "' --schema '" + toy_schema.string() +
                  "' --mode naive --out-dir '" + (work / "t3").string() + "'",
              log, 3, "missing data file exits 3");
  expect_exit(bin,
              "train --data '" + toy_csv.string() + "' --schema '" +
                  toy_schema.string() + "' --mode turbo --out-dir '" +
                  (work / "t4").string() + "'",
              log, 2, "unknown mode exits 2");

  if (failures == 0) {
    std::printf("cli integration tests passed\n");
    return 0;
  }
  std::fprintf(stderr, "cli integration tests: %d failure(s)\n", failures);
  return 1;
}
