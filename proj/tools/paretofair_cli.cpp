#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paretofair/apstar.hpp"
#include "paretofair/data_io.hpp"
#include "paretofair/errors.hpp"
#include "paretofair/loss.hpp"
#include "paretofair/metrics.hpp"
#include "paretofair/models.hpp"
#include "paretofair/rng.hpp"
#include "paretofair/simplex.hpp"
#include "paretofair/starsets.hpp"
#include "paretofair/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace paretofair;

namespace {

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw DataError("short write: " + tmp.string());
  }
  fs::rename(tmp, path);
}

// save_model writes <path> and <path>.json; stage both through temp names.
void save_model_atomic(const models::SoftmaxModel& model, const fs::path& path,
                       const std::string& extra_json) {
  fs::path tmp = path;
  tmp += ".tmp";
  models::save_model(model, tmp.string(), extra_json);
  fs::rename(tmp, path);
  fs::rename(tmp.string() + ".json", path.string() + ".json");
}

struct Manifest {
  std::string command;
  json config = json::object();
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point started =
      std::chrono::steady_clock::now();

  void write(const fs::path& out_dir) const {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
    const json doc = {{"command", command},
                      {"version", PARETOFAIR_VERSION_STRING},
                      {"config", config},
                      {"seeds", seeds},
                      {"outputs", outputs},
                      {"wall_clock_seconds", wall}};
    write_atomic(out_dir / "manifest.json", doc.dump(2) + "\n");
  }
};

fs::path resolve_out_dir(const std::string& flag, const char* command) {
  fs::path dir;
  if (!flag.empty()) {
    dir = flag;
  } else {
    const char* root = std::getenv("PARETOFAIR_OUT_ROOT");
    dir = fs::path(root != nullptr ? root : "paretofair_out") / command;
  }
  fs::create_directories(dir);
  return dir;
}

SimplexWeights random_simplex(Rng& rng, int k) {
  SimplexWeights mu(k);
  double total = 0.0;
  for (double& v : mu) {
    v = -std::log1p(-rng.uniform());
    total += v;
  }
  for (double& v : mu) v /= total;
  return mu;
}

// ---------------------------------------------------------------------------
// synth-front

int run_synth_front(const std::string& spec_path, const std::string& loss_name,
                    int n_points, const std::string& out_flag) {
  Manifest manifest;
  manifest.command = "synth-front";
  const fs::path out_dir = resolve_out_dir(out_flag, "synth-front");
  const Loss loss = parse_loss(loss_name);
  const synth::GaussianPiecewiseSpec spec = synth::load_spec_file(spec_path);
  manifest.config = {{"spec", spec_path},
                     {"loss", loss_name},
                     {"n_points", n_points},
                     {"out_dir", out_dir.string()}};

  const std::vector<synth::FrontPoint> front =
      synth::pareto_front_trace(spec, loss, n_points);

  std::string csv = "mu_0,mu_1,r_0,r_1,minimax\n";
  for (const synth::FrontPoint& p : front) {
    csv += num(p.mu[0]) + "," + num(p.mu[1]) + "," + num(p.risks[0]) + "," +
           num(p.risks[1]) + "," + num(max_risk(p.risks)) + "\n";
  }
  write_atomic(out_dir / "front.csv", csv);
  manifest.outputs = {"front.csv"};
  manifest.write(out_dir);
  std::printf("wrote %s (%zu rows)\n", (out_dir / "front.csv").c_str(),
              front.size());
  return 0;
}

// ---------------------------------------------------------------------------
// synth-apstar

int run_synth_apstar(const std::string& spec_path,
                     const std::string& loss_name, double alpha, int k_min,
                     int max_iters, std::uint64_t seed, int runs,
                     double grid_step, const std::string& out_flag) {
  Manifest manifest;
  manifest.command = "synth-apstar";
  const fs::path out_dir = resolve_out_dir(out_flag, "synth-apstar");
  const Loss loss = parse_loss(loss_name);

  APStarConfig config;
  config.alpha = alpha;
  config.k_min = k_min;
  config.max_iterations = max_iters;
  config.patience_iters = max_iters;  // --max-iters is the whole budget
  validate_config(config);
  if (runs < 1) throw ConfigError("--runs must be >= 1");

  const synth::GaussianPiecewiseSpec spec = synth::load_spec_file(spec_path);
  manifest.config = {{"spec", spec_path},   {"loss", loss_name},
                     {"alpha", alpha},      {"k_min", k_min},
                     {"max_iters", max_iters}, {"seed", seed},
                     {"runs", runs},        {"grid_step", grid_step},
                     {"out_dir", out_dir.string()}};

  const synth::GridSearchResult grid =
      synth::grid_search_minimax(spec, loss, grid_step);
  const synth::OracleEvaluator eval(spec);
  const LinearWeightSolver solver = [&](const SimplexWeights& mu) {
    return SolverOutcome{mu, eval.risks(mu, loss)};
  };

  json run_rows = json::array();
  std::vector<double> bests;
  double max_rel = 0.0;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t run_seed = seed + static_cast<std::uint64_t>(r);
    manifest.seeds.push_back(run_seed);
    Rng rng(run_seed);
    const APStarResult result =
        run_apstar(solver, random_simplex(rng, spec.groups()), config);

    const std::string trace_name = "trace_" + std::to_string(r) + ".jsonl";
    std::ostringstream trace;
    write_trace_jsonl(result, trace);
    write_atomic(out_dir / trace_name, trace.str());
    manifest.outputs.push_back(trace_name);

    const double rel =
        std::fabs(result.best_minimax - grid.minimax) / grid.minimax;
    max_rel = std::max(max_rel, rel);
    bests.push_back(result.best_minimax);
    run_rows.push_back({{"seed", run_seed},
                        {"best_minimax", result.best_minimax},
                        {"best_mu", result.best_mu},
                        {"iterations", result.iterations},
                        {"relative_gap", rel},
                        {"trace", trace_name}});
  }

  const double mean =
      std::accumulate(bests.begin(), bests.end(), 0.0) / bests.size();
  double var = 0.0;
  for (double b : bests) var += (b - mean) * (b - mean);
  var /= bests.size();

  const json summary = {{"grid_minimax", grid.minimax},
                        {"grid_mu", grid.mu},
                        {"grid_step", grid_step},
                        {"runs", run_rows},
                        {"best_minimax_mean", mean},
                        {"best_minimax_stddev", std::sqrt(var)},
                        {"max_relative_gap", max_rel}};
  write_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
  manifest.outputs.push_back("summary.json");
  manifest.write(out_dir);
  std::printf("grid minimax %s; %d runs, max relative gap %s\n",
              num(grid.minimax).c_str(), runs, num(max_rel).c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// starset-bench

int run_starset_bench(int n_families, std::uint64_t seed,
                      const std::string& strategy_list, int max_iters,
                      const std::string& out_flag) {
  Manifest manifest;
  manifest.command = "starset-bench";
  const fs::path out_dir = resolve_out_dir(out_flag, "starset-bench");

  std::vector<stars::Strategy> strategies;
  std::stringstream tokens(strategy_list);
  std::string token;
  while (std::getline(tokens, token, ','))
    if (!token.empty()) strategies.push_back(stars::parse_strategy(token));
  manifest.config = {{"n_families", n_families},
                     {"seed", seed},
                     {"strategies", strategy_list},
                     {"max_iters", max_iters},
                     {"out_dir", out_dir.string()}};
  manifest.seeds = {seed};

  const std::vector<stars::BenchRow> rows =
      stars::run_benchmark(n_families, seed, strategies, max_iters);

  std::string csv = "seed,ratio,strategy,iterations,timeout\n";
  for (const stars::BenchRow& row : rows) {
    csv += std::to_string(row.seed) + "," + num(row.ratio) + "," +
           stars::strategy_name(row.strategy) + "," +
           std::to_string(row.iterations) + "," +
           (row.timeout ? "1" : "0") + "\n";
  }
  write_atomic(out_dir / "races.csv", csv);

  // Per-strategy medians inside intersection-ratio bins.
  const double edges[] = {0.0, 0.01, 0.02, 0.05, 0.10, 1.01};
  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  json bins = json::array();
  for (int b = 0; b < 5; ++b) {
    json per_strategy = json::object();
    int families_in_bin = 0;
    for (const stars::Strategy s : strategies) {
      std::vector<double> iters;
      for (const stars::BenchRow& row : rows) {
        if (row.strategy != s) continue;
        if (row.ratio < edges[b] || row.ratio >= edges[b + 1]) continue;
        iters.push_back(row.iterations);
      }
      families_in_bin = static_cast<int>(iters.size());
      if (!iters.empty())
        per_strategy[stars::strategy_name(s)] = median(iters);
    }
    bins.push_back({{"ratio_lo", edges[b]},
                    {"ratio_hi", edges[b + 1]},
                    {"families", families_in_bin},
                    {"median_iterations", per_strategy}});
  }
  json totals = json::object();
  for (const stars::Strategy s : strategies) {
    int timeouts = 0, count = 0;
    for (const stars::BenchRow& row : rows) {
      if (row.strategy != s) continue;
      count += 1;
      timeouts += row.timeout ? 1 : 0;
    }
    totals[stars::strategy_name(s)] = {{"races", count},
                                       {"timeouts", timeouts}};
  }
  const json summary = {{"n_families", n_families},
                        {"max_iters", max_iters},
                        {"strategies", totals},
                        {"ratio_bins", bins}};
  write_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
  manifest.outputs = {"races.csv", "summary.json"};
  manifest.write(out_dir);
  std::printf("raced %d families x %zu strategies\n", n_families,
              strategies.size());
  return 0;
}

// ---------------------------------------------------------------------------
// train

io::GroupedDataset restrict_to_group(const io::GroupedDataset& ds, int g) {
  std::vector<int> rows;
  for (int i = 0; i < ds.n; ++i)
    if (ds.a[i] == g) rows.push_back(i);
  io::GroupedDataset out = io::subset(ds, rows);
  out.n_groups = 1;
  out.group_names = {ds.group_names[g]};
  for (int& v : out.a) v = 0;
  return out;
}

io::GroupedDataset groups_as_labels(const io::GroupedDataset& ds) {
  io::GroupedDataset out = ds;
  out.y = ds.a;
  out.n_classes = ds.n_groups;
  out.class_names = ds.group_names;
  return out;
}

models::SoftmaxModel saturated_onehot(int dim, int classes, int hot) {
  models::Architecture arch;
  arch.input_dim = dim;
  arch.n_classes = classes;
  models::SoftmaxModel model(arch, 0);
  std::fill(model.params().begin(), model.params().end(), 0.0);
  for (int c = 0; c < classes; ++c)
    model.params()[static_cast<std::size_t>(classes) * dim + c] =
        c == hot ? 60.0 : -60.0;
  return model;
}

std::vector<int> parse_hidden(const std::string& widths) {
  std::vector<int> hidden;
  std::stringstream tokens(widths);
  std::string token;
  while (std::getline(tokens, token, ','))
    if (!token.empty()) {
      try {
        hidden.push_back(std::stoi(token));
      } catch (const std::exception&) {
        throw ConfigError("--hidden: cannot parse width '" + token + "'");
      }
    }
  return hidden;
}

struct TrainFlags {
  std::string data, schema_path, mode, loss_name, hidden, activation, out_flag;
  double alpha = 0.5, learning_rate = 0.1, train_frac = 0.6, val_frac = 0.2;
  int k_min = 1, max_iters = 50, splits = 5, batch_size = 128, epochs = 100,
      patience = 15;
  bool adam = false;
  std::uint64_t seed = 0;
};

int run_train(const TrainFlags& flags) {
  Manifest manifest;
  manifest.command = "train";
  const fs::path out_dir = resolve_out_dir(flags.out_flag, "train");
  const Loss loss = parse_loss(flags.loss_name);
  if (flags.mode != "naive" && flags.mode != "balanced" &&
      flags.mode != "mmpf-joint" && flags.mode != "mmpf-plugin")
    throw ConfigError("--mode must be naive, balanced, mmpf-joint or "
                      "mmpf-plugin, got '" + flags.mode + "'");
  manifest.config = {{"data", flags.data},
                     {"schema", flags.schema_path},
                     {"mode", flags.mode},
                     {"loss", flags.loss_name},
                     {"splits", flags.splits},
                     {"seed", flags.seed},
                     {"alpha", flags.alpha},
                     {"k_min", flags.k_min},
                     {"max_iters", flags.max_iters},
                     {"hidden", flags.hidden},
                     {"activation", flags.activation},
                     {"batch_size", flags.batch_size},
                     {"learning_rate", flags.learning_rate},
                     {"epochs", flags.epochs},
                     {"patience", flags.patience},
                     {"adam", flags.adam},
                     {"train_frac", flags.train_frac},
                     {"val_frac", flags.val_frac},
                     {"out_dir", out_dir.string()}};
  manifest.seeds = {flags.seed};

  const io::SchemaConfig schema = io::load_schema_file(flags.schema_path);
  const io::GroupedDataset full = io::ingest_csv(flags.data, schema);
  const std::vector<io::SplitAssignment> assignments = io::stratified_splits(
      full, flags.train_frac, flags.val_frac, flags.splits, flags.seed);

  bool y_equals_a = full.n_classes == full.n_groups;
  for (int i = 0; y_equals_a && i < full.n; ++i)
    y_equals_a = full.y[i] == full.a[i];

  models::Architecture arch;
  arch.input_dim = full.dim;
  arch.n_classes = full.n_classes;
  arch.hidden = parse_hidden(flags.hidden);
  arch.activation = models::parse_activation(flags.activation);

  APStarConfig apstar_config;
  apstar_config.alpha = flags.alpha;
  apstar_config.k_min = flags.k_min;
  apstar_config.max_iterations = flags.max_iters;
  validate_config(apstar_config);

  json split_rows = json::array();
  std::vector<double> worst_risks;
  for (int s = 0; s < flags.splits; ++s) {
    io::GroupedDataset ds = full;
    if (schema.standardize) io::standardize(ds, assignments[s]);
    const io::GroupedDataset train =
        io::subset(ds, assignments[s].indices_of(io::Part::Train));
    const io::GroupedDataset val =
        io::subset(ds, assignments[s].indices_of(io::Part::Val));
    const std::vector<int> test_rows =
        assignments[s].indices_of(io::Part::Test);
    const io::GroupedDataset test = io::subset(ds, test_rows);

    models::TrainConfig config;
    config.loss = loss;
    config.batch_size = flags.batch_size;
    config.learning_rate = flags.learning_rate;
    config.max_epochs = flags.epochs;
    config.patience = flags.patience;
    config.adam = flags.adam;
    config.seed = flags.seed + 7919 * static_cast<std::uint64_t>(s);

    std::vector<double> priors(full.n_groups);
    const std::vector<int> counts = train.group_counts();
    for (int g = 0; g < full.n_groups; ++g)
      priors[g] = static_cast<double>(counts[g]) / train.n;

    json row = {{"split", s}};
    std::vector<std::vector<double>> probs;
    int apstar_iterations = 0;
    SimplexWeights mu = uniform_weights(full.n_groups);

    if (flags.mode == "mmpf-plugin") {
      models::PluginBundle bundle;
      bundle.priors = priors;
      if (y_equals_a) {
        // p(y|x,a) is the indicator of y == a; no label models to fit.
        for (int g = 0; g < full.n_groups; ++g)
          bundle.label_models.push_back(
              saturated_onehot(full.dim, full.n_classes, g));
      } else {
        for (int g = 0; g < full.n_groups; ++g)
          bundle.label_models.push_back(
              models::train_erm(restrict_to_group(train, g),
                                restrict_to_group(val, g), arch, config)
                  .model);
      }
      models::Architecture group_arch = arch;
      group_arch.n_classes = full.n_groups;
      bundle.group_model =
          models::train_weighted(groups_as_labels(train),
                                 groups_as_labels(val),
                                 uniform_weights(full.n_groups), group_arch,
                                 config)
              .model;

      const LinearWeightSolver solver =
          models::make_plugin_solver(bundle, val, loss);
      const APStarResult result =
          run_apstar(solver, uniform_weights(full.n_groups), apstar_config);
      mu = result.best_mu;
      apstar_iterations = result.iterations;

      for (int i = 0; i < test.n; ++i)
        probs.push_back(models::plugin_predict(bundle, mu, test.row(i)));

      const std::string group_name =
          "group_model_split" + std::to_string(s) + ".bin";
      save_model_atomic(bundle.group_model, out_dir / group_name,
                        json{{"role", "group"}, {"split", s}}.dump());
      manifest.outputs.push_back(group_name);
      for (int g = 0; g < full.n_groups; ++g) {
        const std::string label_name = "label_model_" + std::to_string(g) +
                                       "_split" + std::to_string(s) + ".bin";
        save_model_atomic(
            bundle.label_models[g], out_dir / label_name,
            json{{"role", "label"}, {"group", g}, {"split", s}}.dump());
        manifest.outputs.push_back(label_name);
      }
      row["y_equals_a"] = y_equals_a;
    } else {
      models::TrainResult fit;
      if (flags.mode == "naive" ||
          (flags.mode == "mmpf-joint" && full.n_groups == 1)) {
        fit = models::train_erm(train, val, arch, config);
      } else if (flags.mode == "balanced") {
        fit = models::train_weighted(train, val,
                                     uniform_weights(full.n_groups), arch,
                                     config);
      } else {
        const LinearWeightSolver solver =
            models::make_joint_solver(train, val, arch, config);
        const APStarResult result = run_apstar(
            solver, uniform_weights(full.n_groups), apstar_config);
        fit.model = std::any_cast<models::SoftmaxModel>(result.best_model);
        mu = result.best_mu;
        apstar_iterations = result.iterations;
      }
      probs = fit.model.predict_proba(test);
      const std::string model_name =
          "model_split" + std::to_string(s) + ".bin";
      save_model_atomic(fit.model, out_dir / model_name,
                        json{{"mode", flags.mode}, {"split", s}}.dump());
      manifest.outputs.push_back(model_name);
    }

    const metrics::PredictionSet preds =
        metrics::predictions_from_dataset(test, probs);
    std::vector<metrics::GroupReport> reports;
    for (metrics::Metric metric :
         {metrics::Metric::Accuracy, metrics::Metric::BrierScore,
          metrics::Metric::CrossEntropy, metrics::Metric::ECE,
          metrics::Metric::MCE})
      reports.push_back(metrics::evaluate(preds, metric));
    std::ostringstream report_csv;
    metrics::write_reports_csv(reports, test.group_names, report_csv);
    const std::string report_name =
        "reports_split" + std::to_string(s) + ".csv";
    write_atomic(out_dir / report_name, report_csv.str());
    manifest.outputs.push_back(report_name);

    std::string pred_csv = "row,group,label";
    for (int c = 0; c < test.n_classes; ++c)
      pred_csv += ",p_" + std::to_string(c);
    pred_csv += "\n";
    for (int i = 0; i < test.n; ++i) {
      pred_csv += std::to_string(test_rows[i]) + "," +
                  std::to_string(test.a[i]) + "," + std::to_string(test.y[i]);
      for (int c = 0; c < test.n_classes; ++c)
        pred_csv += "," + num(probs[i][c]);
      pred_csv += "\n";
    }
    const std::string pred_name =
        "predictions_split" + std::to_string(s) + ".csv";
    write_atomic(out_dir / pred_name, pred_csv);
    manifest.outputs.push_back(pred_name);

    const metrics::GroupReport& loss_report =
        reports[loss == Loss::BrierScore ? 1 : 2];
    worst_risks.push_back(loss_report.worst_group);
    row["mu"] = mu;
    row["priors"] = priors;
    row["apstar_iterations"] = apstar_iterations;
    row["worst_group_risk"] = loss_report.worst_group;
    row["disparity"] = loss_report.disparity;
    row["accuracy"] = reports[0].sample_mean;
    split_rows.push_back(row);
  }

  const double mean =
      std::accumulate(worst_risks.begin(), worst_risks.end(), 0.0) /
      worst_risks.size();
  double var = 0.0;
  for (double w : worst_risks) var += (w - mean) * (w - mean);
  var /= worst_risks.size();
  const json summary = {{"mode", flags.mode},
                        {"loss", flags.loss_name},
                        {"n_groups", full.n_groups},
                        {"group_names", full.group_names},
                        {"splits", split_rows},
                        {"worst_group_risk_mean", mean},
                        {"worst_group_risk_stddev", std::sqrt(var)}};
  write_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
  manifest.outputs.push_back("summary.json");
  manifest.write(out_dir);
  std::printf("%s: %d splits, worst-group %s %s +- %s\n", flags.mode.c_str(),
              flags.splits, flags.loss_name.c_str(), num(mean).c_str(),
              num(std::sqrt(var)).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimax Pareto fairness experiments"};
  app.require_subcommand(1);

  // synth-front
  auto* front = app.add_subcommand(
      "synth-front", "Trace the two-group risk trade-off curve");
  std::string front_spec, front_loss = "bs", front_out;
  int front_points = 101;
  front->add_option("--spec", front_spec, "spec file")->required();
  front->add_option("--loss", front_loss, "bs or ce");
  front->add_option("--n-points", front_points, "front resolution");
  front->add_option("--out-dir", front_out, "output directory");

  // synth-apstar
  auto* apstar = app.add_subcommand(
      "synth-apstar", "Race the weight search against the grid oracle");
  std::string ap_spec, ap_loss = "bs", ap_out;
  double ap_alpha = 0.5, ap_grid_step = 0.005;
  int ap_k_min = 1, ap_max_iters = 500, ap_runs = 5;
  std::uint64_t ap_seed = 0;
  apstar->add_option("--spec", ap_spec, "spec file")->required();
  apstar->add_option("--loss", ap_loss, "bs or ce");
  apstar->add_option("--alpha", ap_alpha, "update mixing rate");
  apstar->add_option("--k-min", ap_k_min, "counter reset floor");
  apstar->add_option("--max-iters", ap_max_iters, "solver call budget");
  apstar->add_option("--seed", ap_seed, "base seed");
  apstar->add_option("--runs", ap_runs, "randomized restarts");
  apstar->add_option("--grid-step", ap_grid_step, "oracle lattice step");
  apstar->add_option("--out-dir", ap_out, "output directory");

  // starset-bench
  auto* bench = app.add_subcommand(
      "starset-bench", "Benchmark search strategies on star-set families");
  std::string bench_strategies = "apstar,random,mwu", bench_out;
  int bench_families = 50, bench_max_iters = 10000;
  std::uint64_t bench_seed = 0;
  bench->add_option("--n-families", bench_families, "family count");
  bench->add_option("--seed", bench_seed, "base seed");
  bench->add_option("--strategies", bench_strategies, "comma list");
  bench->add_option("--max-iters", bench_max_iters, "iteration budget");
  bench->add_option("--out-dir", bench_out, "output directory");

  // train
  auto* train = app.add_subcommand("train", "Train and evaluate classifiers");
  TrainFlags tf;
  tf.loss_name = "bs";
  tf.activation = "relu";
  train->add_option("--data", tf.data, "CSV data file")->required();
  train->add_option("--schema", tf.schema_path, "schema file")->required();
  train->add_option("--mode", tf.mode,
                    "naive, balanced, mmpf-joint or mmpf-plugin")
      ->required();
  train->add_option("--loss", tf.loss_name, "bs or ce");
  train->add_option("--splits", tf.splits, "stratified splits");
  train->add_option("--seed", tf.seed, "base seed");
  train->add_option("--alpha", tf.alpha, "update mixing rate");
  train->add_option("--k-min", tf.k_min, "counter reset floor");
  train->add_option("--max-iters", tf.max_iters, "weight-search budget");
  train->add_option("--hidden", tf.hidden, "comma widths, empty = linear");
  train->add_option("--activation", tf.activation, "relu, elu or tanh");
  train->add_option("--batch-size", tf.batch_size, "SGD batch size");
  train->add_option("--lr", tf.learning_rate, "learning rate");
  train->add_option("--epochs", tf.epochs, "epoch budget");
  train->add_option("--patience", tf.patience, "rejected-epoch budget");
  train->add_flag("--adam", tf.adam, "use adam updates");
  train->add_option("--train-frac", tf.train_frac, "train fraction");
  train->add_option("--val-frac", tf.val_frac, "validation fraction");
  train->add_option("--out-dir", tf.out_flag, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (front->parsed())
      return run_synth_front(front_spec, front_loss, front_points, front_out);
    if (apstar->parsed())
      return run_synth_apstar(ap_spec, ap_loss, ap_alpha, ap_k_min,
                              ap_max_iters, ap_seed, ap_runs, ap_grid_step,
                              ap_out);
    if (bench->parsed())
      return run_starset_bench(bench_families, bench_seed, bench_strategies,
                               bench_max_iters, bench_out);
    if (train->parsed()) return run_train(tf);
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
