#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "paretofair/apstar.hpp"
#include "paretofair/data_io.hpp"
#include "paretofair/loss.hpp"
#include "paretofair/simplex.hpp"

namespace paretofair::models {

enum class Activation { Relu, Elu, Tanh };

const char* activation_name(Activation a);
Activation parse_activation(const std::string& name);

// Linear softmax classifier, or an MLP with one or two hidden layers.
struct Architecture {
  int input_dim = 1;
  int n_classes = 2;
  std::vector<int> hidden;  // 0, 1 or 2 entries
  Activation activation = Activation::Relu;
};

void validate_architecture(const Architecture& arch);

class SoftmaxModel {
 public:
  SoftmaxModel() = default;
  SoftmaxModel(const Architecture& arch, std::uint64_t seed);

  const Architecture& arch() const { return arch_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::vector<double> predict_proba(const double* x) const;
  std::vector<double> predict_proba(const std::vector<double>& x) const;
  std::vector<std::vector<double>> predict_proba(
      const io::GroupedDataset& ds) const;

  double sample_loss(const double* x, int label, Loss loss) const;

  // Accumulates scale * d(loss)/d(params) into grad; returns the loss.
  double backprop(const double* x, int label, Loss loss, double scale,
                  std::vector<double>& grad) const;

 private:
  Architecture arch_;
  std::vector<int> sizes_;  // input, hidden..., classes
  std::vector<double> params_;
};

// Mean loss per group over the whole dataset; DataError on an empty group.
RiskVector group_risks_on(const SoftmaxModel& model,
                          const io::GroupedDataset& ds, Loss loss);

struct TrainConfig {
  Loss loss = Loss::BrierScore;
  int batch_size = 128;
  double learning_rate = 0.1;
  double lr_decay = 0.25;  // applied after every rejected epoch
  int max_epochs = 500;
  int patience = 20;
  bool adam = false;  // keep off for linear models, on for MLPs
  std::uint64_t seed = 0;
};

struct TrainResult {
  SoftmaxModel model;
  RiskVector val_risks;
  std::vector<double> accepted_objectives;  // initial value, then accepts
  int epochs = 0;
};

// Weighted-risk trainer: batches draw groups uniformly then samples within
// the group (with replacement); the SGD objective is <mu, batch group
// risks>.  Each epoch restarts from the incumbent; an epoch is accepted when
// its validation objective does not exceed the incumbent's, otherwise the
// learning rate decays.  Stops at max_epochs or `patience` rejected epochs.
TrainResult train_weighted(const io::GroupedDataset& train,
                           const io::GroupedDataset& val,
                           const SimplexWeights& mu, const Architecture& arch,
                           const TrainConfig& config);

// Plain ERM: pooled batches, pooled validation objective.
TrainResult train_erm(const io::GroupedDataset& train,
                      const io::GroupedDataset& val, const Architecture& arch,
                      const TrainConfig& config);

// Weight-search solver backed by train_weighted on fixed data.
LinearWeightSolver make_joint_solver(const io::GroupedDataset& train,
                                     const io::GroupedDataset& val,
                                     const Architecture& arch,
                                     const TrainConfig& config);

// posterior ~ p(y|x); returns the entrywise reweighting
//   q_y ∝ posterior[y] * mu[y] / priors[y]
// for the label-equals-group shortcut.
std::vector<double> reweight_output(const std::vector<double>& posterior,
                                    const SimplexWeights& mu,
                                    const std::vector<double>& priors);

// label_posteriors[a] ~ p(y|x,a), group_posterior ~ p(a|x):
//   h_y ∝ sum_a label_posteriors[a][y] * group_posterior[a] * mu[a]/priors[a]
std::vector<double> plugin_combine(
    const std::vector<std::vector<double>>& label_posteriors,
    const std::vector<double>& group_posterior,
    const std::vector<double>& priors, const SimplexWeights& mu);

struct PluginBundle {
  std::vector<SoftmaxModel> label_models;  // one per group, p(y|x,a)
  SoftmaxModel group_model;                // p(a|x)
  std::vector<double> priors;              // p(a)
};

std::vector<double> plugin_predict(const PluginBundle& bundle,
                                   const SimplexWeights& mu, const double* x);

// Weight-search solver that re-mixes the fixed bundle on validation data.
LinearWeightSolver make_plugin_solver(const PluginBundle& bundle,
                                      const io::GroupedDataset& val,
                                      Loss loss);

// Bisection for the blend rate gamma with risk_of_gamma(gamma) == target
// within tol.  Requires risk_of_gamma(0) <= target <= risk_of_gamma(1);
// throws std::invalid_argument on an infeasible target.
double solve_mixing_rate(const std::function<double(double)>& risk_of_gamma,
                         double target, double tol = 1e-4);

// Per-group blend toward the uniform predictor; predictions need the
// sample's group at test time.
struct EqualizedPredictor {
  SoftmaxModel base;
  std::vector<double> gammas;

  std::vector<double> predict_proba(const double* x, int group) const;
};

// Raises every group's eval risk to `target` by blending toward uniform.
// Groups already at the target keep gamma = 0.
EqualizedPredictor posthoc_equalize(const SoftmaxModel& model,
                                    const io::GroupedDataset& eval, Loss loss,
                                    double target);

// Versioned flat binary (magic PFMD0001) plus a JSON sidecar describing the
// architecture and any extra fields provided.
void save_model(const SoftmaxModel& model, const std::string& path,
                const std::string& extra_json = "{}");
SoftmaxModel load_model(const std::string& path);

}  // namespace paretofair::models
