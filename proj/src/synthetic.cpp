#include "paretofair/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "paretofair/errors.hpp"
#include "paretofair/rng.hpp"

namespace paretofair::synth {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// 64-point Gauss-Legendre rule on [-1,1], Newton iteration on P_64.
struct GaussRule {
  std::array<double, 64> x{};
  std::array<double, 64> w{};

  GaussRule() {
    const int n = 64;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 128; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (z * p0 - p1) / (z * z - 1.0);
        double z1 = z;
        z = z1 - p0 / pp;
        if (std::fabs(z - z1) < 1e-15) break;
      }
      x[i] = -z;
      x[n - 1 - i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
      w[n - 1 - i] = w[i];
    }
  }
};

const GaussRule& gauss64() {
  static const GaussRule rule;
  return rule;
}

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

double bernoulli_entropy(double f) { return -xlogx(f) - xlogx(1.0 - f); }

// KL(Ber(f) || Ber(h)); infinite divergence raises NumericalError.
double bernoulli_kl(double f, double h, double x, int group) {
  double kl = 0.0;
  if (f > 0.0) {
    if (h <= 0.0)
      throw NumericalError("infinite cross-entropy risk for group " +
                           std::to_string(group) + " at x=" +
                           std::to_string(x) +
                           ": classifier output 0 against positive posterior");
    kl += f * std::log(f / h);
  }
  if (f < 1.0) {
    if (h >= 1.0)
      throw NumericalError("infinite cross-entropy risk for group " +
                           std::to_string(group) + " at x=" +
                           std::to_string(x) +
                           ": classifier output 1 against posterior below 1");
    kl += (1.0 - f) * std::log((1.0 - f) / (1.0 - h));
  }
  return kl;
}

// E_{Y~Ber(f)} of the loss of predicting probability h.
double pointwise_risk(Loss loss, double f, double h, double x, int group) {
  if (loss == Loss::BrierScore) return 2.0 * f - 4.0 * f * h + 2.0 * h * h;
  if (f > 0.0 && h <= 0.0)
    throw NumericalError("infinite cross-entropy risk for group " +
                         std::to_string(group) + " at x=" + std::to_string(x));
  if (f < 1.0 && h >= 1.0)
    throw NumericalError("infinite cross-entropy risk for group " +
                         std::to_string(group) + " at x=" + std::to_string(x));
  return -(f > 0.0 ? f * std::log(h) : 0.0) -
         (f < 1.0 ? (1.0 - f) * std::log(1.0 - h) : 0.0);
}

std::vector<double> parse_number_list(const std::string& value,
                                      const std::string& context) {
  std::string cleaned = value;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  in.clear();
  std::string rest;
  in >> rest;
  if (!rest.empty())
    throw ConfigError(context + ": cannot parse '" + value + "' as numbers");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void validate_quadrature(const QuadratureConfig& config) {
  if (config.node_count < 64)
    throw std::invalid_argument("quadrature: node_count must be >= 64");
  if (!(config.padding_sigmas >= 8.0))
    throw std::invalid_argument("quadrature: padding must cover means +-8 sigma");
}

}  // namespace

void validate_spec(const GaussianPiecewiseSpec& spec) {
  const std::size_t k = spec.means.size();
  if (k == 0) throw std::invalid_argument("spec: no groups");
  if (spec.thresholds.size() != k || spec.rho_low.size() != k ||
      spec.rho_high.size() != k || spec.priors.size() != k)
    throw std::invalid_argument("spec: per-group vectors of different length");
  double prior_sum = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    if (!std::isfinite(spec.means[a]) || !std::isfinite(spec.thresholds[a]))
      throw std::invalid_argument("spec: non-finite mean or threshold");
    if (!(spec.rho_low[a] >= 0.0 && spec.rho_low[a] <= 1.0) ||
        !(spec.rho_high[a] >= 0.0 && spec.rho_high[a] <= 1.0))
      throw std::invalid_argument("spec: plateaus must lie in [0,1]");
    if (!(spec.priors[a] >= 0.0))
      throw std::invalid_argument("spec: negative prior");
    prior_sum += spec.priors[a];
  }
  if (std::fabs(prior_sum - 1.0) > 1e-9)
    throw std::invalid_argument("spec: priors must sum to 1");
}

GaussianPiecewiseSpec benchmark_three_group() {
  GaussianPiecewiseSpec spec;
  spec.means = {-0.5, 0.0, 0.5};
  spec.thresholds = {-0.25, 0.0, 0.25};
  spec.rho_low = {0.1, 0.1, 0.1};
  spec.rho_high = {0.9, 0.9, 0.8};
  spec.priors = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  return spec;
}

GaussianPiecewiseSpec tradeoff_two_group() {
  GaussianPiecewiseSpec spec;
  spec.means = {-0.5, 0.5};
  spec.thresholds = {-0.25, 0.25};
  spec.rho_low = {0.3, 0.05};
  spec.rho_high = {0.7, 0.95};
  spec.priors = {0.5, 0.5};
  return spec;
}

GaussianPiecewiseSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("spec file not found: " + path);
  GaussianPiecewiseSpec spec;
  bool uniform_priors = true;
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
    const std::string context = path + ":" + std::to_string(lineno);
    if (key == "means")
      spec.means = parse_number_list(value, context);
    else if (key == "thresholds")
      spec.thresholds = parse_number_list(value, context);
    else if (key == "rho_low")
      spec.rho_low = parse_number_list(value, context);
    else if (key == "rho_high")
      spec.rho_high = parse_number_list(value, context);
    else if (key == "priors") {
      if (value == "uniform") {
        uniform_priors = true;
      } else {
        spec.priors = parse_number_list(value, context);
        uniform_priors = false;
      }
    } else {
      throw ConfigError(context + ": unknown key '" + key + "'");
    }
  }
  if (spec.means.empty()) throw ConfigError(path + ": missing 'means'");
  if (uniform_priors)
    spec.priors.assign(spec.means.size(), 1.0 / spec.means.size());
  try {
    validate_spec(spec);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return spec;
}

void save_spec_file(const GaussianPiecewiseSpec& spec,
                    const std::string& path) {
  validate_spec(spec);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write spec file: " + path);
  auto emit = [&out](const char* key, const std::vector<double>& v) {
    out << key << " = ";
    for (std::size_t i = 0; i < v.size(); ++i)
      out << (i ? ", " : "") << v[i];
    out << '\n';
  };
  out.precision(17);
  emit("means", spec.means);
  emit("thresholds", spec.thresholds);
  emit("rho_low", spec.rho_low);
  emit("rho_high", spec.rho_high);
  emit("priors", spec.priors);
}

double posterior(const GaussianPiecewiseSpec& spec, int group, double x) {
  if (group < 0 || group >= spec.groups())
    throw std::out_of_range("posterior: group index out of range");
  return x <= spec.thresholds[group] ? spec.rho_low[group]
                                     : spec.rho_high[group];
}

double optimal_classifier(const GaussianPiecewiseSpec& spec,
                          const SimplexWeights& mu, double x) {
  validate_spec(spec);
  validate_weights(mu);
  if (static_cast<int>(mu.size()) != spec.groups())
    throw std::invalid_argument("optimal_classifier: weight length mismatch");
  double num = 0.0, den = 0.0;
  for (int a = 0; a < spec.groups(); ++a) {
    const double d = mu[a] * norm_pdf(x - spec.means[a]);
    num += d * posterior(spec, a, x);
    den += d;
  }
  if (!(den > 0.0) || !std::isfinite(den))
    throw NumericalError("optimal_classifier: weighted density vanished at x=" +
                         std::to_string(x));
  return num / den;
}

RiskVector RiskTerms::total() const {
  RiskVector out(bayes.size());
  for (std::size_t i = 0; i < bayes.size(); ++i)
    out[i] = bayes[i] + discrepancy[i];
  return out;
}

OracleEvaluator::OracleEvaluator(const GaussianPiecewiseSpec& spec,
                                 const QuadratureConfig& config)
    : spec_(spec) {
  validate_spec(spec_);
  validate_quadrature(config);

  const double lo =
      *std::min_element(spec_.means.begin(), spec_.means.end()) -
      config.padding_sigmas;
  const double hi =
      *std::max_element(spec_.means.begin(), spec_.means.end()) +
      config.padding_sigmas;

  std::set<double> cuts{lo, hi};
  for (double t : spec_.thresholds)
    if (t > lo && t < hi) cuts.insert(t);
  const std::vector<double> edges(cuts.begin(), cuts.end());

  const GaussRule& rule = gauss64();
  const double total_width = hi - lo;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const int chunks = std::max<int>(
        1, static_cast<int>(std::lround(config.node_count * (b - a) /
                                        total_width / 64.0)));
    const double h = (b - a) / chunks;
    for (int c = 0; c < chunks; ++c) {
      const double c0 = a + c * h, half = 0.5 * h;
      for (int j = 0; j < 64; ++j) {
        nodes_.push_back(c0 + half * (rule.x[j] + 1.0));
        weights_.push_back(half * rule.w[j]);
      }
    }
  }

  const int k = spec_.groups();
  density_.assign(k, std::vector<double>(nodes_.size()));
  post_.assign(k, std::vector<double>(nodes_.size()));
  for (int a = 0; a < k; ++a) {
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      density_[a][j] = norm_pdf(nodes_[j] - spec_.means[a]);
      post_[a][j] = posterior(spec_, a, nodes_[j]);
    }
  }
}

RiskTerms OracleEvaluator::risk_terms(const SimplexWeights& mu,
                                      Loss loss) const {
  validate_weights(mu);
  const int k = spec_.groups();
  if (static_cast<int>(mu.size()) != k)
    throw std::invalid_argument("risk_terms: weight length mismatch");

  RiskTerms terms;
  terms.bayes.assign(k, 0.0);
  terms.discrepancy.assign(k, 0.0);
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    double num = 0.0, den = 0.0;
    for (int a = 0; a < k; ++a) {
      const double d = mu[a] * density_[a][j];
      num += d * post_[a][j];
      den += d;
    }
    if (!(den > 0.0))
      throw NumericalError("risk_terms: weighted density vanished at x=" +
                           std::to_string(nodes_[j]));
    const double h = num / den;
    for (int a = 0; a < k; ++a) {
      const double f = post_[a][j];
      const double wd = weights_[j] * density_[a][j];
      if (loss == Loss::BrierScore) {
        terms.bayes[a] += wd * 2.0 * f * (1.0 - f);
        terms.discrepancy[a] += wd * 2.0 * (f - h) * (f - h);
      } else {
        terms.bayes[a] += wd * bernoulli_entropy(f);
        terms.discrepancy[a] += wd * bernoulli_kl(f, h, nodes_[j], a);
      }
    }
  }
  return terms;
}

RiskVector OracleEvaluator::risks(const SimplexWeights& mu, Loss loss) const {
  return risk_terms(mu, loss).total();
}

double OracleEvaluator::expectation(
    int group, const std::function<double(double)>& g) const {
  if (group < 0 || group >= spec_.groups())
    throw std::out_of_range("expectation: group index out of range");
  double acc = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j)
    acc += weights_[j] * density_[group][j] * g(nodes_[j]);
  return acc;
}

double OracleEvaluator::mixed_group_risk(const SimplexWeights& mu, Loss loss,
                                         int group, double gamma) const {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("mixed_group_risk: gamma must lie in [0,1]");
  if (group < 0 || group >= spec_.groups())
    throw std::out_of_range("mixed_group_risk: group index out of range");
  validate_weights(mu);
  if (static_cast<int>(mu.size()) != spec_.groups())
    throw std::invalid_argument("mixed_group_risk: weight length mismatch");

  const int k = spec_.groups();
  double acc = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    double num = 0.0, den = 0.0;
    for (int a = 0; a < k; ++a) {
      const double d = mu[a] * density_[a][j];
      num += d * post_[a][j];
      den += d;
    }
    if (!(den > 0.0))
      throw NumericalError("mixed_group_risk: weighted density vanished");
    const double h = (1.0 - gamma) * (num / den) + gamma * 0.5;
    acc += weights_[j] * density_[group][j] *
           pointwise_risk(loss, post_[group][j], h, nodes_[j], group);
  }
  return acc;
}

RiskTerms group_risk_terms(const GaussianPiecewiseSpec& spec,
                           const SimplexWeights& mu, Loss loss,
                           const QuadratureConfig& config) {
  return OracleEvaluator(spec, config).risk_terms(mu, loss);
}

RiskVector group_risks(const GaussianPiecewiseSpec& spec,
                       const SimplexWeights& mu, Loss loss,
                       const QuadratureConfig& config) {
  return OracleEvaluator(spec, config).risks(mu, loss);
}

namespace {

// Lattice points i/n over the simplex in lexicographic order.
void enumerate_lattice(int groups, int n,
                       const std::function<void(const SimplexWeights&)>& fn) {
  SimplexWeights mu(groups, 0.0);
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == groups - 1) {
      mu[idx] = static_cast<double>(left) / n;
      fn(mu);
      return;
    }
    for (int i = 0; i <= left; ++i) {
      mu[idx] = static_cast<double>(i) / n;
      rec(idx + 1, left - i);
    }
  };
  rec(0, n);
}

double lattice_size(int groups, int n) {
  double count = 1.0;
  for (int i = 1; i < groups; ++i)
    count = count * (n + i) / i;
  return count;
}

}  // namespace

GridSearchResult grid_search_minimax(const GaussianPiecewiseSpec& spec,
                                     Loss loss, double step,
                                     const QuadratureConfig& config) {
  validate_spec(spec);
  if (!(step > 0.0 && step <= 0.5))
    throw std::invalid_argument("grid_search_minimax: step must lie in (0,0.5]");
  const int k = spec.groups();
  const int n = std::max<int>(1, static_cast<int>(std::lround(1.0 / step)));
  if (lattice_size(k, n) > 3e5)
    throw ConfigError("grid_search_minimax: lattice of " +
                      std::to_string(k) + " groups at step " +
                      std::to_string(step) +
                      " exceeds the 3e5-point resource limit");

  OracleEvaluator eval(spec, config);
  if (k == 1) {
    GridSearchResult res;
    res.mu = {1.0};
    res.risks = eval.risks(res.mu, loss);
    res.minimax = max_risk(res.risks);
    return res;
  }

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(lattice_size(k, n)));
  enumerate_lattice(k, n, [&](const SimplexWeights& mu) {
    values.push_back(max_risk(eval.risks(mu, loss)));
  });
  const double best = *std::min_element(values.begin(), values.end());

  GridSearchResult res;
  std::size_t idx = 0;
  bool found = false;
  enumerate_lattice(k, n, [&](const SimplexWeights& mu) {
    if (!found && values[idx] <= best + 1e-12) {
      res.mu = mu;
      res.minimax = values[idx];
      found = true;
    }
    ++idx;
  });
  res.risks = eval.risks(res.mu, loss);
  return res;
}

std::vector<FrontPoint> pareto_front_trace(const GaussianPiecewiseSpec& spec,
                                           Loss loss, int n_points,
                                           const QuadratureConfig& config) {
  validate_spec(spec);
  if (spec.groups() != 2)
    throw std::invalid_argument("pareto_front_trace: requires exactly 2 groups");
  if (n_points < 1)
    throw std::invalid_argument("pareto_front_trace: n_points must be >= 1");

  OracleEvaluator eval(spec, config);
  std::vector<FrontPoint> front;
  front.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double w = static_cast<double>(i + 1) / (n_points + 1);
    FrontPoint pt;
    pt.mu = {w, 1.0 - w};
    pt.risks = eval.risks(pt.mu, loss);
    front.push_back(std::move(pt));
  }

  // Mutual non-domination check with 1e-12 slack for quadrature noise.
  for (std::size_t i = 0; i < front.size(); ++i) {
    for (std::size_t j = 0; j < front.size(); ++j) {
      if (i == j) continue;
      const RiskVector& a = front[i].risks;
      const RiskVector& b = front[j].risks;
      bool le_all = true, lt_some = false;
      for (std::size_t t = 0; t < a.size(); ++t) {
        if (a[t] > b[t] + 1e-12) le_all = false;
        if (a[t] < b[t] - 1e-12) lt_some = true;
      }
      if (le_all && lt_some)
        throw NumericalError("pareto_front_trace: dominated point on front");
    }
  }
  return front;
}

double kl_between_group_marginals(const GaussianPiecewiseSpec& spec) {
  validate_spec(spec);
  if (spec.groups() != 2)
    throw std::invalid_argument(
        "kl_between_group_marginals: requires exactly 2 groups");
  const double gap = spec.means[0] - spec.means[1];
  return 0.5 * gap * gap;
}

void validate_spec(const SineMixSpec& spec) {
  if (!std::isfinite(spec.mean_gap))
    throw std::invalid_argument("sine spec: non-finite mean gap");
  if (!(spec.lambda >= 0.0 && spec.lambda <= 1.0))
    throw std::invalid_argument("sine spec: lambda must lie in [0,1]");
}

double kl_between_group_marginals(const SineMixSpec& spec) {
  validate_spec(spec);
  return 0.5 * spec.mean_gap * spec.mean_gap;
}

std::array<double, 2> sine_mix_posteriors(const SineMixSpec& spec, double x) {
  validate_spec(spec);
  const double hi = x >= 0.0 ? 0.8 : 0.6;
  const double tail = x >= 0.0 ? 0.1 : 0.2;
  const double s = std::sin(2.0 * std::numbers::pi * x) + 1.0;
  const double f0 = (s > 0.0 ? hi : 0.0) + tail;
  const double flipped = 1.0 - std::floor(f0 + 0.5);  // 1 - round(f0)
  const double f1 = (1.0 - spec.lambda) * f0 + spec.lambda * flipped;
  return {f0, f1};
}

namespace {

io::GroupedDataset make_binary_dataset(int n) {
  io::GroupedDataset ds;
  ds.n = n;
  ds.dim = 1;
  ds.numeric_dim = 1;
  ds.n_classes = 2;
  ds.x.resize(n);
  ds.y.resize(n);
  ds.a.resize(n);
  ds.class_names = {"0", "1"};
  ds.feature_names = {"x"};
  return ds;
}

}  // namespace

io::GroupedDataset sample_dataset(const GaussianPiecewiseSpec& spec, int n,
                                  std::uint64_t seed) {
  validate_spec(spec);
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  io::GroupedDataset ds = make_binary_dataset(n);
  ds.n_groups = spec.groups();
  ds.group_names.resize(spec.groups());
  for (int a = 0; a < spec.groups(); ++a)
    ds.group_names[a] = std::to_string(a);

  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const int a = rng.categorical(spec.priors);
    const double x = spec.means[a] + rng.normal();
    ds.a[i] = a;
    ds.x[i] = x;
    ds.y[i] = rng.bernoulli(posterior(spec, a, x)) ? 1 : 0;
  }
  return ds;
}

io::GroupedDataset sample_dataset(const SineMixSpec& spec, int n,
                                  std::uint64_t seed) {
  validate_spec(spec);
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  io::GroupedDataset ds = make_binary_dataset(n);
  ds.n_groups = 2;
  ds.group_names = {"0", "1"};

  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const int a = rng.bernoulli(0.5) ? 1 : 0;
    const double x = (a == 1 ? spec.mean_gap : 0.0) + rng.normal();
    ds.a[i] = a;
    ds.x[i] = x;
    ds.y[i] = rng.bernoulli(sine_mix_posteriors(spec, x)[a]) ? 1 : 0;
  }
  return ds;
}

}  // namespace paretofair::synth
