#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <any>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <utility>

#include "paretofair/apstar.hpp"
#include "paretofair/data_io.hpp"
#include "paretofair/errors.hpp"
#include "paretofair/loss.hpp"
#include "paretofair/metrics.hpp"
#include "paretofair/models.hpp"
#include "paretofair/simplex.hpp"
#include "paretofair/starsets.hpp"
#include "paretofair/synthetic.hpp"

namespace py = pybind11;
using namespace paretofair;

namespace {

py::object any_to_py(const std::any& value) {
  if (!value.has_value()) return py::none();
  if (const auto* obj = std::any_cast<py::object>(&value)) return *obj;
  if (const auto* model = std::any_cast<models::SoftmaxModel>(&value))
    return py::cast(*model);
  if (const auto* mu = std::any_cast<SimplexWeights>(&value))
    return py::cast(*mu);
  if (const auto* num = std::any_cast<int>(&value)) return py::cast(*num);
  return py::none();
}

LinearWeightSolver wrap_solver(py::object solver) {
  return [solver = std::move(solver)](const SimplexWeights& mu) {
    py::object out = solver(mu);
    if (py::isinstance<SolverOutcome>(out)) return out.cast<SolverOutcome>();
    if (py::isinstance<py::tuple>(out)) {
      const py::tuple pair = out.cast<py::tuple>();
      if (pair.size() != 2)
        throw std::invalid_argument(
            "solver must return risks or (model, risks)");
      return SolverOutcome{py::object(pair[0]), pair[1].cast<RiskVector>()};
    }
    return SolverOutcome{py::none(), out.cast<RiskVector>()};
  };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "minimax Pareto fairness toolkit";
  m.attr("__version__") = PARETOFAIR_VERSION_STRING;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);

  // ---- loss and simplex ----------------------------------------------------
  py::enum_<Loss>(m, "Loss")
      .value("BrierScore", Loss::BrierScore)
      .value("CrossEntropy", Loss::CrossEntropy);
  m.def("loss_name", &loss_name);
  m.def("parse_loss", &parse_loss);

  py::class_<APStarConfig>(m, "APStarConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &APStarConfig::alpha)
      .def_readwrite("k_min", &APStarConfig::k_min)
      .def_readwrite("max_iterations", &APStarConfig::max_iterations)
      .def_readwrite("improvement_tolerance",
                     &APStarConfig::improvement_tolerance)
      .def_readwrite("patience_iters", &APStarConfig::patience_iters);

  m.def("apstar_update", &apstar_update, py::arg("mu"), py::arg("mask"),
        py::arg("k"), py::arg("alpha"));
  m.def("active_mask", &active_mask, py::arg("risks"), py::arg("threshold"));
  m.def("dominates", &dominates);
  m.def("max_risk", &max_risk);
  m.def("uniform_weights", &uniform_weights);

  // ---- APStar driver -------------------------------------------------------
  py::class_<SolverOutcome>(m, "SolverOutcome")
      .def(py::init([](py::object model, RiskVector risks) {
             return SolverOutcome{std::move(model), std::move(risks)};
           }),
           py::arg("model"), py::arg("risks"))
      .def_readwrite("risks", &SolverOutcome::risks)
      .def_property_readonly(
          "model", [](const SolverOutcome& o) { return any_to_py(o.model); });

  py::class_<APStarRecord>(m, "APStarRecord")
      .def_readonly("iter", &APStarRecord::iter)
      .def_readonly("mu", &APStarRecord::mu)
      .def_readonly("risks", &APStarRecord::risks)
      .def_readonly("minimax", &APStarRecord::minimax)
      .def_readonly("k", &APStarRecord::k)
      .def_readonly("improved", &APStarRecord::improved);

  py::class_<APStarResult>(m, "APStarResult")
      .def_readonly("trace", &APStarResult::trace)
      .def_readonly("best_mu", &APStarResult::best_mu)
      .def_readonly("best_risks", &APStarResult::best_risks)
      .def_readonly("best_minimax", &APStarResult::best_minimax)
      .def_readonly("iterations", &APStarResult::iterations)
      .def_property_readonly("best_model", [](const APStarResult& r) {
        return any_to_py(r.best_model);
      });

  m.def(
      "run_apstar",
      [](py::object solver, const SimplexWeights& mu0,
         const APStarConfig& config) {
        return run_apstar(wrap_solver(std::move(solver)), mu0, config);
      },
      py::arg("solver"), py::arg("mu0"), py::arg("config") = APStarConfig{});

  m.def("write_trace_jsonl",
        [](const APStarResult& result, const std::string& path) {
          std::ofstream out(path);
          if (!out) throw DataError("cannot open for writing: " + path);
          write_trace_jsonl(result, out);
        });

  // ---- synthetic oracle ----------------------------------------------------
  py::class_<synth::GaussianPiecewiseSpec>(m, "GaussianPiecewiseSpec")
      .def(py::init<>())
      .def_readwrite("means", &synth::GaussianPiecewiseSpec::means)
      .def_readwrite("thresholds", &synth::GaussianPiecewiseSpec::thresholds)
      .def_readwrite("rho_low", &synth::GaussianPiecewiseSpec::rho_low)
      .def_readwrite("rho_high", &synth::GaussianPiecewiseSpec::rho_high)
      .def_readwrite("priors", &synth::GaussianPiecewiseSpec::priors)
      .def("groups", &synth::GaussianPiecewiseSpec::groups);
  m.def("validate_spec",
        py::overload_cast<const synth::GaussianPiecewiseSpec&>(
            &synth::validate_spec));
  m.def("benchmark_three_group", &synth::benchmark_three_group);
  m.def("tradeoff_two_group", &synth::tradeoff_two_group);
  m.def("load_spec_file", &synth::load_spec_file);
  m.def("save_spec_file", &synth::save_spec_file);

  py::class_<synth::QuadratureConfig>(m, "QuadratureConfig")
      .def(py::init<>())
      .def_readwrite("node_count", &synth::QuadratureConfig::node_count)
      .def_readwrite("padding_sigmas",
                     &synth::QuadratureConfig::padding_sigmas);

  m.def("posterior", &synth::posterior);
  m.def("optimal_classifier", &synth::optimal_classifier);

  py::class_<synth::RiskTerms>(m, "RiskTerms")
      .def_readonly("bayes", &synth::RiskTerms::bayes)
      .def_readonly("discrepancy", &synth::RiskTerms::discrepancy)
      .def("total", &synth::RiskTerms::total);

  py::class_<synth::OracleEvaluator>(m, "OracleEvaluator")
      .def(py::init<const synth::GaussianPiecewiseSpec&,
                    const synth::QuadratureConfig&>(),
           py::arg("spec"), py::arg("config") = synth::QuadratureConfig{})
      .def_property_readonly("spec", &synth::OracleEvaluator::spec)
      .def("risk_terms", &synth::OracleEvaluator::risk_terms)
      .def("risks", &synth::OracleEvaluator::risks)
      .def("expectation", &synth::OracleEvaluator::expectation)
      .def("mixed_group_risk", &synth::OracleEvaluator::mixed_group_risk);

  m.def("group_risk_terms", &synth::group_risk_terms, py::arg("spec"),
        py::arg("mu"), py::arg("loss"),
        py::arg("config") = synth::QuadratureConfig{});
  m.def("group_risks", &synth::group_risks, py::arg("spec"), py::arg("mu"),
        py::arg("loss"), py::arg("config") = synth::QuadratureConfig{});

  py::class_<synth::GridSearchResult>(m, "GridSearchResult")
      .def_readonly("mu", &synth::GridSearchResult::mu)
      .def_readonly("risks", &synth::GridSearchResult::risks)
      .def_readonly("minimax", &synth::GridSearchResult::minimax);
  m.def("grid_search_minimax", &synth::grid_search_minimax, py::arg("spec"),
        py::arg("loss"), py::arg("step"),
        py::arg("config") = synth::QuadratureConfig{});

  py::class_<synth::FrontPoint>(m, "FrontPoint")
      .def_readonly("mu", &synth::FrontPoint::mu)
      .def_readonly("risks", &synth::FrontPoint::risks);
  m.def("pareto_front_trace", &synth::pareto_front_trace, py::arg("spec"),
        py::arg("loss"), py::arg("n_points"),
        py::arg("config") = synth::QuadratureConfig{});

  py::class_<synth::SineMixSpec>(m, "SineMixSpec")
      .def(py::init<>())
      .def_readwrite("mean_gap", &synth::SineMixSpec::mean_gap)
      .def_readwrite("lambda_", &synth::SineMixSpec::lambda);
  m.def("validate_spec",
        py::overload_cast<const synth::SineMixSpec&>(&synth::validate_spec));
  m.def("sine_mix_posteriors", &synth::sine_mix_posteriors);
  m.def("kl_between_group_marginals",
        py::overload_cast<const synth::GaussianPiecewiseSpec&>(
            &synth::kl_between_group_marginals));
  m.def("kl_between_group_marginals",
        py::overload_cast<const synth::SineMixSpec&>(
            &synth::kl_between_group_marginals));
  m.def("sample_dataset",
        py::overload_cast<const synth::GaussianPiecewiseSpec&, int,
                          std::uint64_t>(&synth::sample_dataset));
  m.def("sample_dataset",
        py::overload_cast<const synth::SineMixSpec&, int, std::uint64_t>(
            &synth::sample_dataset));

  // ---- star sets -----------------------------------------------------------
  py::class_<stars::StarBoundary>(m, "StarBoundary")
      .def(py::init<>())
      .def_readwrite("theta", &stars::StarBoundary::theta)
      .def_readwrite("radius", &stars::StarBoundary::radius)
      .def("at", &stars::StarBoundary::at);
  m.def("validate_boundary", &stars::validate_boundary);

  py::class_<stars::StarSetFamily>(m, "StarSetFamily")
      .def(py::init<>())
      .def_readwrite("curves", &stars::StarSetFamily::curves)
      .def_readwrite("intersection_ratio",
                     &stars::StarSetFamily::intersection_ratio)
      .def_readwrite("seed", &stars::StarSetFamily::seed);

  m.def("embed", &stars::embed);
  m.def("membership", &stars::membership);
  m.def("in_intersection", &stars::in_intersection);
  m.def("sample_family", &stars::sample_family);

  py::enum_<stars::Strategy>(m, "Strategy")
      .value("APStar", stars::Strategy::APStar)
      .value("Random", stars::Strategy::Random)
      .value("MWU", stars::Strategy::MWU);
  m.def("strategy_name", &stars::strategy_name);
  m.def("parse_strategy", &stars::parse_strategy);

  py::class_<stars::RaceConfig>(m, "RaceConfig")
      .def(py::init<>())
      .def_readwrite("strategy", &stars::RaceConfig::strategy)
      .def_readwrite("alpha", &stars::RaceConfig::alpha)
      .def_readwrite("k_min", &stars::RaceConfig::k_min)
      .def_readwrite("eta", &stars::RaceConfig::eta)
      .def_readwrite("seed", &stars::RaceConfig::seed)
      .def_readwrite("max_iters", &stars::RaceConfig::max_iters);

  py::class_<stars::RaceResult>(m, "RaceResult")
      .def_readonly("iterations", &stars::RaceResult::iterations)
      .def_readonly("timeout", &stars::RaceResult::timeout);
  m.def("race", &stars::race);

  py::class_<stars::BenchRow>(m, "BenchRow")
      .def_readonly("seed", &stars::BenchRow::seed)
      .def_readonly("ratio", &stars::BenchRow::ratio)
      .def_readonly("strategy", &stars::BenchRow::strategy)
      .def_readonly("iterations", &stars::BenchRow::iterations)
      .def_readonly("timeout", &stars::BenchRow::timeout);
  m.def("run_benchmark", &stars::run_benchmark, py::arg("n_families"),
        py::arg("seed0"), py::arg("strategies"), py::arg("max_iters"));

  // ---- data ----------------------------------------------------------------
  py::class_<io::GroupedDataset>(m, "GroupedDataset")
      .def(py::init<>())
      .def_readwrite("n", &io::GroupedDataset::n)
      .def_readwrite("dim", &io::GroupedDataset::dim)
      .def_readwrite("numeric_dim", &io::GroupedDataset::numeric_dim)
      .def_readwrite("n_classes", &io::GroupedDataset::n_classes)
      .def_readwrite("n_groups", &io::GroupedDataset::n_groups)
      .def_readwrite("x", &io::GroupedDataset::x)
      .def_readwrite("y", &io::GroupedDataset::y)
      .def_readwrite("a", &io::GroupedDataset::a)
      .def_readwrite("class_names", &io::GroupedDataset::class_names)
      .def_readwrite("group_names", &io::GroupedDataset::group_names)
      .def_readwrite("feature_names", &io::GroupedDataset::feature_names)
      .def("group_counts", &io::GroupedDataset::group_counts);
  m.def("validate_dataset", &io::validate_dataset);

  py::enum_<io::Part>(m, "Part")
      .value("Train", io::Part::Train)
      .value("Val", io::Part::Val)
      .value("Test", io::Part::Test);

  py::class_<io::SplitAssignment>(m, "SplitAssignment")
      .def_readwrite("part", &io::SplitAssignment::part)
      .def("indices_of", &io::SplitAssignment::indices_of);

  py::class_<io::SchemaConfig>(m, "SchemaConfig")
      .def(py::init<>())
      .def_readwrite("label_column", &io::SchemaConfig::label_column)
      .def_readwrite("group_columns", &io::SchemaConfig::group_columns)
      .def_readwrite("numeric_columns", &io::SchemaConfig::numeric_columns)
      .def_readwrite("categorical_columns",
                     &io::SchemaConfig::categorical_columns)
      .def_readwrite("ignore_columns", &io::SchemaConfig::ignore_columns)
      .def_readwrite("standardize", &io::SchemaConfig::standardize);
  m.def("load_schema_file", &io::load_schema_file);
  m.def("ingest_csv",
        py::overload_cast<const std::string&, const io::SchemaConfig&>(
            &io::ingest_csv));
  m.def("ingest_csv",
        py::overload_cast<const std::string&, const io::SchemaConfig&,
                          const io::GroupedDataset&>(&io::ingest_csv));
  m.def("stratified_splits", &io::stratified_splits);

  py::class_<io::StandardizeStats>(m, "StandardizeStats")
      .def_readonly("mean", &io::StandardizeStats::mean)
      .def_readonly("stddev", &io::StandardizeStats::stddev);
  m.def("standardize", &io::standardize);
  m.def("subset", &io::subset);
  m.def("save_dataset", &io::save_dataset);
  m.def("load_dataset", &io::load_dataset);

  // ---- metrics -------------------------------------------------------------
  py::class_<metrics::PredictionSet>(m, "PredictionSet")
      .def(py::init<>())
      .def_readwrite("probs", &metrics::PredictionSet::probs)
      .def_readwrite("labels", &metrics::PredictionSet::labels)
      .def_readwrite("groups", &metrics::PredictionSet::groups)
      .def_readwrite("n_classes", &metrics::PredictionSet::n_classes)
      .def_readwrite("n_groups", &metrics::PredictionSet::n_groups);
  m.def("validate_predictions", &metrics::validate_predictions);
  m.def("predictions_from_dataset", &metrics::predictions_from_dataset);

  py::enum_<metrics::Metric>(m, "Metric")
      .value("Accuracy", metrics::Metric::Accuracy)
      .value("BrierScore", metrics::Metric::BrierScore)
      .value("CrossEntropy", metrics::Metric::CrossEntropy)
      .value("ECE", metrics::Metric::ECE)
      .value("MCE", metrics::Metric::MCE);
  m.def("metric_name", &metrics::metric_name);
  m.def("parse_metric", &metrics::parse_metric);

  py::class_<metrics::GroupReport>(m, "GroupReport")
      .def_readonly("metric", &metrics::GroupReport::metric)
      .def_readonly("per_group", &metrics::GroupReport::per_group)
      .def_readonly("sample_mean", &metrics::GroupReport::sample_mean)
      .def_readonly("group_mean", &metrics::GroupReport::group_mean)
      .def_readonly("worst_group", &metrics::GroupReport::worst_group)
      .def_readonly("worst_index", &metrics::GroupReport::worst_index)
      .def_readonly("disparity", &metrics::GroupReport::disparity);
  m.def("evaluate", &metrics::evaluate, py::arg("preds"), py::arg("metric"),
        py::arg("ece_bins") = 10);
  m.def("report_to_json", &metrics::report_to_json);

  // ---- models --------------------------------------------------------------
  py::enum_<models::Activation>(m, "Activation")
      .value("Relu", models::Activation::Relu)
      .value("Elu", models::Activation::Elu)
      .value("Tanh", models::Activation::Tanh);
  m.def("activation_name", &models::activation_name);
  m.def("parse_activation", &models::parse_activation);

  py::class_<models::Architecture>(m, "Architecture")
      .def(py::init<>())
      .def_readwrite("input_dim", &models::Architecture::input_dim)
      .def_readwrite("n_classes", &models::Architecture::n_classes)
      .def_readwrite("hidden", &models::Architecture::hidden)
      .def_readwrite("activation", &models::Architecture::activation);
  m.def("validate_architecture", &models::validate_architecture);

  py::class_<models::SoftmaxModel>(m, "SoftmaxModel")
      .def(py::init<const models::Architecture&, std::uint64_t>(),
           py::arg("arch"), py::arg("seed"))
      .def_property_readonly("arch", &models::SoftmaxModel::arch)
      .def_property(
          "params",
          [](const models::SoftmaxModel& model) { return model.params(); },
          [](models::SoftmaxModel& model, const std::vector<double>& params) {
            if (params.size() != model.params().size())
              throw std::invalid_argument("params: length mismatch");
            model.params() = params;
          })
      .def("predict_proba",
           [](const models::SoftmaxModel& model, const std::vector<double>& x) {
             return model.predict_proba(x);
           })
      .def("predict_proba",
           [](const models::SoftmaxModel& model, const io::GroupedDataset& ds) {
             return model.predict_proba(ds);
           })
      .def("sample_loss",
           [](const models::SoftmaxModel& model, const std::vector<double>& x,
              int label, Loss loss) {
             if (static_cast<int>(x.size()) != model.arch().input_dim)
               throw std::invalid_argument("sample_loss: feature length mismatch");
             return model.sample_loss(x.data(), label, loss);
           });
  m.def("group_risks_on", &models::group_risks_on);

  py::class_<models::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("loss", &models::TrainConfig::loss)
      .def_readwrite("batch_size", &models::TrainConfig::batch_size)
      .def_readwrite("learning_rate", &models::TrainConfig::learning_rate)
      .def_readwrite("lr_decay", &models::TrainConfig::lr_decay)
      .def_readwrite("max_epochs", &models::TrainConfig::max_epochs)
      .def_readwrite("patience", &models::TrainConfig::patience)
      .def_readwrite("adam", &models::TrainConfig::adam)
      .def_readwrite("seed", &models::TrainConfig::seed);

  py::class_<models::TrainResult>(m, "TrainResult")
      .def_readonly("model", &models::TrainResult::model)
      .def_readonly("val_risks", &models::TrainResult::val_risks)
      .def_readonly("accepted_objectives",
                    &models::TrainResult::accepted_objectives)
      .def_readonly("epochs", &models::TrainResult::epochs);
  m.def("train_weighted", &models::train_weighted);
  m.def("train_erm", &models::train_erm);

  // The library solver factories capture their datasets by reference; the
  // wrappers pin copies so the returned callables own what they use.
  m.def("make_joint_solver",
        [](io::GroupedDataset train, io::GroupedDataset val,
           const models::Architecture& arch,
           const models::TrainConfig& config) {
          auto train_ptr =
              std::make_shared<io::GroupedDataset>(std::move(train));
          auto val_ptr = std::make_shared<io::GroupedDataset>(std::move(val));
          LinearWeightSolver inner =
              models::make_joint_solver(*train_ptr, *val_ptr, arch, config);
          return LinearWeightSolver(
              [train_ptr, val_ptr, inner](const SimplexWeights& mu) {
                return inner(mu);
              });
        });

  m.def("reweight_output", &models::reweight_output);
  m.def("plugin_combine", &models::plugin_combine);

  py::class_<models::PluginBundle>(m, "PluginBundle")
      .def(py::init<>())
      .def_readwrite("label_models", &models::PluginBundle::label_models)
      .def_readwrite("group_model", &models::PluginBundle::group_model)
      .def_readwrite("priors", &models::PluginBundle::priors);
  m.def("plugin_predict",
        [](const models::PluginBundle& bundle, const SimplexWeights& mu,
           const std::vector<double>& x) {
          if (static_cast<int>(x.size()) !=
              bundle.group_model.arch().input_dim)
            throw std::invalid_argument("plugin_predict: feature length mismatch");
          return models::plugin_predict(bundle, mu, x.data());
        });
  m.def("make_plugin_solver",
        [](models::PluginBundle bundle, io::GroupedDataset val, Loss loss) {
          auto bundle_ptr =
              std::make_shared<models::PluginBundle>(std::move(bundle));
          auto val_ptr = std::make_shared<io::GroupedDataset>(std::move(val));
          LinearWeightSolver inner =
              models::make_plugin_solver(*bundle_ptr, *val_ptr, loss);
          return LinearWeightSolver(
              [bundle_ptr, val_ptr, inner](const SimplexWeights& mu) {
                return inner(mu);
              });
        });

  m.def("solve_mixing_rate", &models::solve_mixing_rate,
        py::arg("risk_of_gamma"), py::arg("target"), py::arg("tol") = 1e-4);

  py::class_<models::EqualizedPredictor>(m, "EqualizedPredictor")
      .def_readwrite("base", &models::EqualizedPredictor::base)
      .def_readwrite("gammas", &models::EqualizedPredictor::gammas)
      .def("predict_proba",
           [](const models::EqualizedPredictor& eq,
              const std::vector<double>& x, int group) {
             if (static_cast<int>(x.size()) != eq.base.arch().input_dim)
               throw std::invalid_argument("predict_proba: feature length mismatch");
             return eq.predict_proba(x.data(), group);
           });
  m.def("posthoc_equalize", &models::posthoc_equalize);
  m.def("save_model", &models::save_model, py::arg("model"), py::arg("path"),
        py::arg("extra_json") = "{}");
  m.def("load_model", &models::load_model);
}
