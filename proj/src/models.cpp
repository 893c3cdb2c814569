#include "paretofair/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "paretofair/errors.hpp"
#include "paretofair/rng.hpp"

namespace paretofair::models {

namespace {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Elu: return z > 0.0 ? z : std::expm1(z);
    case Activation::Tanh: return std::tanh(z);
  }
  return z;
}

// Derivative expressed through the activation value (all three allow it).
double activate_grad(Activation a, double value) {
  switch (a) {
    case Activation::Relu: return value > 0.0 ? 1.0 : 0.0;
    case Activation::Elu: return value > 0.0 ? 1.0 : value + 1.0;
    case Activation::Tanh: return 1.0 - value * value;
  }
  return 1.0;
}

void softmax_inplace(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

// d(loss)/d(logits) for one sample.
void loss_logit_grad(Loss loss, const std::vector<double>& p, int label,
                     std::vector<double>& g) {
  const int k = static_cast<int>(p.size());
  g.resize(k);
  if (loss == Loss::CrossEntropy) {
    for (int c = 0; c < k; ++c) g[c] = p[c] - (c == label ? 1.0 : 0.0);
    return;
  }
  double s = 0.0;
  for (int c = 0; c < k; ++c) s += (p[c] - (c == label ? 1.0 : 0.0)) * p[c];
  for (int c = 0; c < k; ++c)
    g[c] = 2.0 * p[c] * ((p[c] - (c == label ? 1.0 : 0.0)) - s);
}

double loss_value(Loss loss, const std::vector<double>& p, int label) {
  if (loss == Loss::CrossEntropy) {
    if (p[label] <= 0.0)
      throw NumericalError("cross-entropy loss is infinite: zero probability "
                           "on the true class");
    return -std::log(p[label]);
  }
  double acc = 0.0;
  for (int c = 0; c < static_cast<int>(p.size()); ++c) {
    const double d = (c == label ? 1.0 : 0.0) - p[c];
    acc += d * d;
  }
  return acc;
}

}  // namespace

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Elu: return "elu";
    case Activation::Tanh: return "tanh";
  }
  return "?";
}

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "elu") return Activation::Elu;
  if (name == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation '" + name + "'");
}

void validate_architecture(const Architecture& arch) {
  if (arch.input_dim < 1)
    throw std::invalid_argument("architecture: input_dim must be >= 1");
  if (arch.n_classes < 2)
    throw std::invalid_argument("architecture: n_classes must be >= 2");
  if (arch.hidden.size() > 2)
    throw std::invalid_argument("architecture: at most 2 hidden layers");
  for (int h : arch.hidden)
    if (h < 1)
      throw std::invalid_argument("architecture: hidden width must be >= 1");
}

SoftmaxModel::SoftmaxModel(const Architecture& arch, std::uint64_t seed)
    : arch_(arch) {
  validate_architecture(arch_);
  sizes_ = {arch_.input_dim};
  for (int h : arch_.hidden) sizes_.push_back(h);
  sizes_.push_back(arch_.n_classes);

  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l)
    count += static_cast<std::size_t>(sizes_[l + 1]) * (sizes_[l] + 1);
  params_.resize(count);

  Rng rng(seed);
  std::size_t at = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const std::size_t w = static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
    for (std::size_t i = 0; i < w; ++i)
      params_[at++] = rng.uniform(-bound, bound);
    for (int i = 0; i < sizes_[l + 1]; ++i) params_[at++] = 0.0;
  }
}

std::vector<double> SoftmaxModel::predict_proba(const double* x) const {
  std::vector<double> cur(x, x + arch_.input_dim);
  std::size_t at = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    std::vector<double> next(out);
    for (int o = 0; o < out; ++o) {
      double z = 0.0;
      for (int i = 0; i < in; ++i) z += params_[at + o * in + i] * cur[i];
      next[o] = z;
    }
    at += static_cast<std::size_t>(out) * in;
    for (int o = 0; o < out; ++o) next[o] += params_[at + o];
    at += out;
    if (l + 2 < sizes_.size())
      for (double& v : next) v = activate(arch_.activation, v);
    cur = std::move(next);
  }
  softmax_inplace(cur);
  return cur;
}

std::vector<double> SoftmaxModel::predict_proba(
    const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != arch_.input_dim)
    throw std::invalid_argument("predict_proba: feature length mismatch");
  return predict_proba(x.data());
}

std::vector<std::vector<double>> SoftmaxModel::predict_proba(
    const io::GroupedDataset& ds) const {
  if (ds.dim != arch_.input_dim)
    throw std::invalid_argument("predict_proba: dataset dimension mismatch");
  std::vector<std::vector<double>> out(ds.n);
  for (int i = 0; i < ds.n; ++i) out[i] = predict_proba(ds.row(i));
  return out;
}

double SoftmaxModel::sample_loss(const double* x, int label, Loss loss) const {
  return loss_value(loss, predict_proba(x), label);
}

double SoftmaxModel::backprop(const double* x, int label, Loss loss,
                              double scale, std::vector<double>& grad) const {
  if (grad.size() != params_.size())
    throw std::invalid_argument("backprop: gradient buffer size mismatch");

  // Forward pass, keeping every layer's activations.
  std::vector<std::vector<double>> acts;
  acts.emplace_back(x, x + arch_.input_dim);
  std::size_t at = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l], out = sizes_[l + 1];
    std::vector<double> next(out);
    for (int o = 0; o < out; ++o) {
      double z = params_[at + static_cast<std::size_t>(out) * in + o];
      for (int i = 0; i < in; ++i) z += params_[at + o * in + i] * acts[l][i];
      next[o] = z;
    }
    at += static_cast<std::size_t>(out) * in + out;
    if (l + 2 < sizes_.size())
      for (double& v : next) v = activate(arch_.activation, v);
    acts.push_back(std::move(next));
  }

  std::vector<double> probs = acts.back();
  softmax_inplace(probs);
  const double loss_out = loss_value(loss, probs, label);

  std::vector<double> delta;
  loss_logit_grad(loss, probs, label, delta);

  // Backward pass.
  std::size_t offsets_end = params_.size();
  for (std::size_t l = sizes_.size() - 1; l >= 1; --l) {
    const int in = sizes_[l - 1], out = sizes_[l];
    const std::size_t block = static_cast<std::size_t>(out) * in + out;
    const std::size_t base = offsets_end - block;
    std::vector<double> prev_delta(in, 0.0);
    for (int o = 0; o < out; ++o) {
      for (int i = 0; i < in; ++i) {
        grad[base + o * in + i] += scale * delta[o] * acts[l - 1][i];
        prev_delta[i] += params_[base + o * in + i] * delta[o];
      }
      grad[base + static_cast<std::size_t>(out) * in + o] += scale * delta[o];
    }
    if (l >= 2) {
      for (int i = 0; i < in; ++i)
        prev_delta[i] *= activate_grad(arch_.activation, acts[l - 1][i]);
      delta = std::move(prev_delta);
    }
    offsets_end = base;
  }
  return loss_out;
}

RiskVector group_risks_on(const SoftmaxModel& model,
                          const io::GroupedDataset& ds, Loss loss) {
  io::validate_dataset(ds);
  if (ds.dim != model.arch().input_dim || ds.n_classes != model.arch().n_classes)
    throw std::invalid_argument("group_risks_on: dataset/model shape mismatch");
  RiskVector acc(ds.n_groups, 0.0);
  std::vector<int> count(ds.n_groups, 0);
  for (int i = 0; i < ds.n; ++i) {
    acc[ds.a[i]] += model.sample_loss(ds.row(i), ds.y[i], loss);
    count[ds.a[i]] += 1;
  }
  for (int g = 0; g < ds.n_groups; ++g) {
    if (count[g] == 0)
      throw DataError("group_risks_on: group '" + ds.group_names[g] +
                      "' has no samples");
    acc[g] /= count[g];
  }
  return acc;
}

namespace {

struct AdamState {
  std::vector<double> m, v;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long t = 0;

  void step(std::vector<double>& params, const std::vector<double>& grad,
            double lr) {
    if (m.empty()) {
      m.assign(params.size(), 0.0);
      v.assign(params.size(), 0.0);
    }
    t += 1;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
      params[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  }
};

void validate_train_config(const TrainConfig& config) {
  if (config.batch_size < 1)
    throw std::invalid_argument("train: batch_size must be >= 1");
  if (!(config.learning_rate > 0.0))
    throw std::invalid_argument("train: learning_rate must be > 0");
  if (!(config.lr_decay > 0.0 && config.lr_decay <= 1.0))
    throw std::invalid_argument("train: lr_decay must lie in (0,1]");
  if (config.max_epochs < 1)
    throw std::invalid_argument("train: max_epochs must be >= 1");
  if (config.patience < 1)
    throw std::invalid_argument("train: patience must be >= 1");
}

// Shared epoch loop; weighted mode draws groups uniformly and scales
// per-sample gradients by mu[a]/batch_count[a], pooled mode draws rows
// uniformly from the whole train set.
TrainResult train_impl(const io::GroupedDataset& train,
                       const io::GroupedDataset& val, const SimplexWeights& mu,
                       bool pooled, const Architecture& arch,
                       const TrainConfig& config) {
  io::validate_dataset(train);
  io::validate_dataset(val);
  validate_train_config(config);
  validate_architecture(arch);
  if (train.n_groups != val.n_groups || train.n_classes != val.n_classes)
    throw std::invalid_argument("train: train/val shape mismatch");
  if (arch.input_dim != train.dim || arch.n_classes != train.n_classes)
    throw std::invalid_argument("train: architecture/data shape mismatch");
  if (!pooled) {
    validate_weights(mu);
    if (static_cast<int>(mu.size()) != train.n_groups)
      throw std::invalid_argument("train: weight length mismatch");
  }

  std::vector<std::vector<int>> pools(train.n_groups);
  for (int i = 0; i < train.n; ++i) pools[train.a[i]].push_back(i);
  for (int g = 0; g < train.n_groups; ++g)
    if (pools[g].empty())
      throw DataError("train: group '" + train.group_names[g] +
                      "' has no training samples");

  auto objective = [&](const RiskVector& risks) {
    if (pooled) {
      // Pooled mean loss == group risks weighted by validation shares.
      double acc = 0.0;
      const auto counts = val.group_counts();
      for (int g = 0; g < val.n_groups; ++g)
        acc += risks[g] * counts[g] / static_cast<double>(val.n);
      return acc;
    }
    double acc = 0.0;
    for (std::size_t g = 0; g < mu.size(); ++g) acc += mu[g] * risks[g];
    return acc;
  };

  Rng rng(config.seed);
  SoftmaxModel incumbent(arch, config.seed);
  RiskVector incumbent_risks = group_risks_on(incumbent, val, config.loss);
  double incumbent_obj = objective(incumbent_risks);

  TrainResult result;
  result.accepted_objectives.push_back(incumbent_obj);

  SoftmaxModel worker = incumbent;
  std::vector<double> grad(worker.params().size());
  AdamState adam;
  double lr = config.learning_rate;
  const int steps = std::max(1, train.n / config.batch_size);
  std::vector<int> batch(config.batch_size);
  std::vector<int> batch_count(train.n_groups);

  int rejected_streak = 0;
  int epoch = 0;
  for (; epoch < config.max_epochs && rejected_streak < config.patience;
       ++epoch) {
    worker.params() = incumbent.params();
    for (int step = 0; step < steps; ++step) {
      std::fill(batch_count.begin(), batch_count.end(), 0);
      for (int b = 0; b < config.batch_size; ++b) {
        int row;
        if (pooled) {
          row = rng.uniform_int(train.n);
        } else {
          const int g = rng.uniform_int(train.n_groups);
          row = pools[g][rng.uniform_int(static_cast<int>(pools[g].size()))];
        }
        batch[b] = row;
        batch_count[train.a[row]] += 1;
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (int b = 0; b < config.batch_size; ++b) {
        const int row = batch[b];
        const double scale =
            pooled ? 1.0 / config.batch_size
                   : mu[train.a[row]] / batch_count[train.a[row]];
        batch_loss += worker.backprop(train.row(row), train.y[row],
                                      config.loss, scale, grad);
      }
      if (!std::isfinite(batch_loss))
        throw NumericalError("train: loss diverged at epoch " +
                             std::to_string(epoch));
      if (config.adam) {
        adam.step(worker.params(), grad, lr);
      } else {
        for (std::size_t i = 0; i < grad.size(); ++i)
          worker.params()[i] -= lr * grad[i];
      }
    }

    const RiskVector risks = group_risks_on(worker, val, config.loss);
    const double obj = objective(risks);
    if (!std::isfinite(obj))
      throw NumericalError("train: validation risk diverged at epoch " +
                           std::to_string(epoch));
    if (obj <= incumbent_obj) {  // ties replace the incumbent
      incumbent.params() = worker.params();
      incumbent_risks = risks;
      incumbent_obj = obj;
      rejected_streak = 0;
      result.accepted_objectives.push_back(obj);
    } else {
      lr *= config.lr_decay;
      rejected_streak += 1;
    }
  }

  result.model = std::move(incumbent);
  result.val_risks = std::move(incumbent_risks);
  result.epochs = epoch;
  return result;
}

}  // namespace

TrainResult train_weighted(const io::GroupedDataset& train,
                           const io::GroupedDataset& val,
                           const SimplexWeights& mu, const Architecture& arch,
                           const TrainConfig& config) {
  return train_impl(train, val, mu, /*pooled=*/false, arch, config);
}

TrainResult train_erm(const io::GroupedDataset& train,
                      const io::GroupedDataset& val, const Architecture& arch,
                      const TrainConfig& config) {
  return train_impl(train, val, {}, /*pooled=*/true, arch, config);
}

LinearWeightSolver make_joint_solver(const io::GroupedDataset& train,
                                     const io::GroupedDataset& val,
                                     const Architecture& arch,
                                     const TrainConfig& config) {
  return [&train, &val, arch, config](const SimplexWeights& mu) {
    TrainResult fit = train_weighted(train, val, mu, arch, config);
    SolverOutcome out;
    out.risks = fit.val_risks;
    out.model = std::move(fit.model);
    return out;
  };
}

std::vector<double> reweight_output(const std::vector<double>& posterior,
                                    const SimplexWeights& mu,
                                    const std::vector<double>& priors) {
  validate_weights(mu);
  if (posterior.size() != mu.size() || priors.size() != mu.size())
    throw std::invalid_argument("reweight_output: length mismatch");
  std::vector<double> out(mu.size());
  double z = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(priors[i] > 0.0))
      throw std::invalid_argument("reweight_output: priors must be positive");
    if (!(posterior[i] >= 0.0))
      throw std::invalid_argument("reweight_output: negative posterior");
    out[i] = posterior[i] * mu[i] / priors[i];
    z += out[i];
  }
  if (!(z > 0.0))
    throw NumericalError("reweight_output: reweighted mass vanished");
  for (double& v : out) v /= z;
  return out;
}

std::vector<double> plugin_combine(
    const std::vector<std::vector<double>>& label_posteriors,
    const std::vector<double>& group_posterior,
    const std::vector<double>& priors, const SimplexWeights& mu) {
  validate_weights(mu);
  const std::size_t groups = mu.size();
  if (label_posteriors.size() != groups || group_posterior.size() != groups ||
      priors.size() != groups)
    throw std::invalid_argument("plugin_combine: group count mismatch");
  const std::size_t classes = label_posteriors.front().size();
  for (const auto& p : label_posteriors)
    if (p.size() != classes)
      throw std::invalid_argument("plugin_combine: class count mismatch");

  std::vector<double> out(classes, 0.0);
  double den = 0.0;
  for (std::size_t a = 0; a < groups; ++a) {
    if (!(priors[a] > 0.0))
      throw std::invalid_argument("plugin_combine: priors must be positive");
    const double w = group_posterior[a] * mu[a] / priors[a];
    den += w;
    for (std::size_t y = 0; y < classes; ++y)
      out[y] += w * label_posteriors[a][y];
  }
  if (!(den > 0.0))
    throw NumericalError("plugin_combine: weighted group mass vanished");
  for (double& v : out) v /= den;
  return out;
}

std::vector<double> plugin_predict(const PluginBundle& bundle,
                                   const SimplexWeights& mu, const double* x) {
  if (bundle.label_models.size() != mu.size() ||
      bundle.priors.size() != mu.size())
    throw std::invalid_argument("plugin_predict: bundle/weight mismatch");
  std::vector<std::vector<double>> label_posteriors(mu.size());
  for (std::size_t a = 0; a < mu.size(); ++a)
    label_posteriors[a] = bundle.label_models[a].predict_proba(x);
  return plugin_combine(label_posteriors, bundle.group_model.predict_proba(x),
                        bundle.priors, mu);
}

LinearWeightSolver make_plugin_solver(const PluginBundle& bundle,
                                      const io::GroupedDataset& val,
                                      Loss loss) {
  return [&bundle, &val, loss](const SimplexWeights& mu) {
    RiskVector acc(val.n_groups, 0.0);
    std::vector<int> count(val.n_groups, 0);
    for (int i = 0; i < val.n; ++i) {
      const std::vector<double> p = plugin_predict(bundle, mu, val.row(i));
      double sample;
      if (loss == Loss::CrossEntropy) {
        if (p[val.y[i]] <= 0.0)
          throw NumericalError("plugin solver: infinite validation loss");
        sample = -std::log(p[val.y[i]]);
      } else {
        sample = 0.0;
        for (int c = 0; c < val.n_classes; ++c) {
          const double d = (c == val.y[i] ? 1.0 : 0.0) - p[c];
          sample += d * d;
        }
      }
      acc[val.a[i]] += sample;
      count[val.a[i]] += 1;
    }
    for (int g = 0; g < val.n_groups; ++g) {
      if (count[g] == 0)
        throw DataError("plugin solver: group '" + val.group_names[g] +
                        "' has no validation samples");
      acc[g] /= count[g];
    }
    SolverOutcome out;
    out.model = mu;
    out.risks = std::move(acc);
    return out;
  };
}

double solve_mixing_rate(const std::function<double(double)>& risk_of_gamma,
                         double target, double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("solve_mixing_rate: tol must be > 0");
  const double at_zero = risk_of_gamma(0.0);
  if (std::fabs(at_zero - target) <= tol) return 0.0;
  const double at_one = risk_of_gamma(1.0);
  if (target < at_zero || target > at_one)
    throw std::invalid_argument(
        "solve_mixing_rate: target " + std::to_string(target) +
        " outside the reachable risk range [" + std::to_string(at_zero) +
        ", " + std::to_string(at_one) + "]");

  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double value = risk_of_gamma(mid);
    if (std::fabs(value - target) <= tol) return mid;
    if (value < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> EqualizedPredictor::predict_proba(const double* x,
                                                      int group) const {
  if (group < 0 || group >= static_cast<int>(gammas.size()))
    throw std::out_of_range("equalized predictor: group index out of range");
  std::vector<double> p = base.predict_proba(x);
  const double g = gammas[group];
  const double u = 1.0 / p.size();
  for (double& v : p) v = (1.0 - g) * v + g * u;
  return p;
}

EqualizedPredictor posthoc_equalize(const SoftmaxModel& model,
                                    const io::GroupedDataset& eval, Loss loss,
                                    double target) {
  io::validate_dataset(eval);
  if (eval.dim != model.arch().input_dim ||
      eval.n_classes != model.arch().n_classes)
    throw std::invalid_argument("posthoc_equalize: dataset/model mismatch");

  std::vector<std::vector<int>> rows_of(eval.n_groups);
  for (int i = 0; i < eval.n; ++i) rows_of[eval.a[i]].push_back(i);

  // Blended probabilities reuse the cached base predictions.
  std::vector<std::vector<double>> base_probs(eval.n);
  for (int i = 0; i < eval.n; ++i) base_probs[i] = model.predict_proba(eval.row(i));
  const double u = 1.0 / eval.n_classes;

  EqualizedPredictor out;
  out.base = model;
  out.gammas.assign(eval.n_groups, 0.0);
  for (int g = 0; g < eval.n_groups; ++g) {
    if (rows_of[g].empty())
      throw DataError("posthoc_equalize: group '" + eval.group_names[g] +
                      "' has no samples");
    auto risk_of_gamma = [&](double gamma) {
      double acc = 0.0;
      for (int i : rows_of[g]) {
        const auto& p = base_probs[i];
        if (loss == Loss::CrossEntropy) {
          const double v = (1.0 - gamma) * p[eval.y[i]] + gamma * u;
          if (v <= 0.0)
            throw NumericalError("posthoc_equalize: infinite loss while "
                                 "blending");
          acc += -std::log(v);
        } else {
          for (int c = 0; c < eval.n_classes; ++c) {
            const double v = (1.0 - gamma) * p[c] + gamma * u;
            const double d = (c == eval.y[i] ? 1.0 : 0.0) - v;
            acc += d * d;
          }
        }
      }
      return acc / rows_of[g].size();
    };
    try {
      out.gammas[g] = solve_mixing_rate(risk_of_gamma, target);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("posthoc_equalize: group '" +
                                  eval.group_names[g] + "': " + e.what());
    }
  }
  return out;
}

void save_model(const SoftmaxModel& model, const std::string& path,
                const std::string& extra_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  const char magic[8] = {'P', 'F', 'M', 'D', '0', '0', '0', '1'};
  out.write(magic, sizeof(magic));
  const Architecture& arch = model.arch();
  const std::int32_t head[4] = {arch.input_dim, arch.n_classes,
                                static_cast<std::int32_t>(arch.hidden.size()),
                                static_cast<std::int32_t>(arch.activation)};
  out.write(reinterpret_cast<const char*>(head), sizeof(head));
  for (int h : arch.hidden) {
    const std::int32_t v = h;
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  const std::int64_t count = static_cast<std::int64_t>(model.params().size());
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(model.params().data()),
            static_cast<std::streamsize>(model.params().size() * sizeof(double)));
  if (!out) throw DataError("short write to model file: " + path);

  nlohmann::json sidecar = {{"format", "PFMD0001"},
                            {"input_dim", arch.input_dim},
                            {"n_classes", arch.n_classes},
                            {"hidden", arch.hidden},
                            {"activation", activation_name(arch.activation)},
                            {"extra", nlohmann::json::parse(extra_json)}};
  std::ofstream meta(path + ".json");
  if (!meta) throw DataError("cannot write model sidecar: " + path + ".json");
  meta << sidecar.dump(2) << '\n';
}

SoftmaxModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 8) != "PFMD0001")
    throw DataError(path + ": not a PFMD0001 model file");
  std::int32_t head[4];
  in.read(reinterpret_cast<char*>(head), sizeof(head));
  if (!in) throw DataError(path + ": truncated header");
  Architecture arch;
  arch.input_dim = head[0];
  arch.n_classes = head[1];
  arch.hidden.resize(head[2]);
  arch.activation = static_cast<Activation>(head[3]);
  for (int& h : arch.hidden) {
    std::int32_t v;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    h = v;
  }
  std::int64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  SoftmaxModel model(arch, 0);
  if (count != static_cast<std::int64_t>(model.params().size()))
    throw DataError(path + ": parameter count does not match architecture");
  in.read(reinterpret_cast<char*>(model.params().data()),
          static_cast<std::streamsize>(model.params().size() * sizeof(double)));
  if (!in) throw DataError(path + ": truncated parameters");
  return model;
}

}  // namespace paretofair::models
