#include "parmine/classifier.hpp"

#include <cmath>

#include "parmine/error.hpp"

namespace parmine::sentiment {

Label parse_label(std::string_view raw) {
  const auto t = text::lowercase(text::collapse_whitespace(raw));
  if (t == "positive" || t == "pos" || t == "1") return Label::Positive;
  if (t == "negative" || t == "neg" || t == "0") return Label::Negative;
  throw InputError("unknown label '" + std::string(raw) + "'");
}

std::string_view to_string(Label label) {
  return label == Label::Positive ? "positive" : "negative";
}

FeatureVector featurize_tokens(std::span<const std::string> tokens) {
  FeatureVector f;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    ++f[tokens[i]];
    if (i + 1 < tokens.size()) ++f[tokens[i] + ' ' + tokens[i + 1]];
  }
  return f;
}

FeatureVector featurize(const BpeModel& model, std::string_view input) {
  const auto tokens = model.encode(input);
  return featurize_tokens(tokens);
}

FeatureIndex FeatureIndex::build(std::span<const Example> data) {
  FeatureIndex index;
  for (const auto& ex : data) {
    for (const auto& [key, count] : ex.features) {
      index.ids_.try_emplace(key, static_cast<std::uint32_t>(index.ids_.size()));
    }
  }
  return index;
}

FeatureIndex::Sparse FeatureIndex::encode(const FeatureVector& features) const {
  Sparse out;
  out.reserve(features.size());
  for (const auto& [key, count] : features) {
    auto it = ids_.find(key);
    if (it != ids_.end()) out.emplace_back(it->second, static_cast<double>(count));
  }
  return out;
}

namespace {

void require_both_classes(std::span<const Example> data) {
  bool pos = false, neg = false;
  for (const auto& ex : data) (ex.label == Label::Positive ? pos : neg) = true;
  if (!pos || !neg) throw InputError("training data must contain both classes");
}

}  // namespace

NbModel nb_train(std::span<const Example> data, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("naive Bayes smoothing must be positive");
  require_both_classes(data);

  NbModel m;
  m.alpha = alpha;
  m.index = FeatureIndex::build(data);
  const std::size_t v = m.index.size();
  std::array<std::vector<double>, 2> counts{std::vector<double>(v, 0.0), std::vector<double>(v, 0.0)};
  std::array<double, 2> docs{0.0, 0.0};
  std::array<double, 2> totals{0.0, 0.0};
  for (const auto& ex : data) {
    const auto c = static_cast<std::size_t>(ex.label);
    docs[c] += 1.0;
    for (const auto& [id, n] : m.index.encode(ex.features)) {
      counts[c][id] += n;
      totals[c] += n;
    }
  }
  const double n_docs = docs[0] + docs[1];
  for (std::size_t c = 0; c < 2; ++c) {
    m.log_prior[c] = std::log(docs[c] / n_docs);
    const double denom = totals[c] + alpha * static_cast<double>(v);
    m.log_likelihood[c].resize(v);
    for (std::size_t f = 0; f < v; ++f) m.log_likelihood[c][f] = std::log((counts[c][f] + alpha) / denom);
  }
  return m;
}

std::array<double, 2> NbModel::log_scores(const FeatureVector& features) const {
  std::array<double, 2> s = log_prior;
  for (const auto& [id, n] : index.encode(features)) {
    s[0] += n * log_likelihood[0][id];
    s[1] += n * log_likelihood[1][id];
  }
  return s;
}

Label nb_predict(const NbModel& model, const FeatureVector& features) {
  const auto s = model.log_scores(features);
  return s[1] > s[0] ? Label::Positive : Label::Negative;
}

double LrModel::score(const FeatureVector& features) const {
  double z = bias;
  for (const auto& [id, x] : index.encode(features)) z += weights[id] * x;
  return z;
}

LrProblem make_lr_problem(std::span<const Example> data, const FeatureIndex& index) {
  LrProblem p;
  p.dimension = index.size();
  p.rows.reserve(data.size());
  p.targets.reserve(data.size());
  for (const auto& ex : data) {
    p.rows.push_back(index.encode(ex.features));
    p.targets.push_back(ex.label == Label::Positive ? 1.0 : 0.0);
  }
  return p;
}

namespace {

double dot(const FeatureIndex::Sparse& row, std::span<const double> w, double b) {
  double z = b;
  for (const auto& [id, x] : row) z += w[id] * x;
  return z;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double lr_loss(const LrProblem& problem, std::span<const double> weights, double bias, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    const double z = dot(problem.rows[i], weights, bias);
    // -[y log s(z) + (1 - y) log(1 - s(z))] = softplus(z) - y z
    loss += softplus(z) - problem.targets[i] * z;
  }
  if (!problem.rows.empty()) loss /= static_cast<double>(problem.rows.size());
  double norm = 0.0;
  for (double w : weights) norm += w * w;
  return loss + 0.5 * l2 * norm;
}

void lr_gradient(const LrProblem& problem, std::span<const double> weights, double bias, double l2,
                 std::span<double> grad_weights, double& grad_bias) {
  std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  grad_bias = 0.0;
  const double scale = problem.rows.empty() ? 0.0 : 1.0 / static_cast<double>(problem.rows.size());
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    const double residual = (sigmoid(dot(problem.rows[i], weights, bias)) - problem.targets[i]) * scale;
    for (const auto& [id, x] : problem.rows[i]) grad_weights[id] += residual * x;
    grad_bias += residual;
  }
  for (std::size_t j = 0; j < grad_weights.size(); ++j) grad_weights[j] += l2 * weights[j];
}

LrModel lr_train(std::span<const Example> data, const LrConfig& config,
                 const std::function<void(int, const LrModel&)>& on_epoch) {
  if (!(config.learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
  if (config.l2 < 0.0) throw InvalidArgument("L2 strength must be non-negative");
  require_both_classes(data);

  LrModel m;
  m.config = config;
  m.index = FeatureIndex::build(data);
  const auto problem = make_lr_problem(data, m.index);
  m.weights.assign(problem.dimension, 0.0);
  std::vector<double> grad(problem.dimension, 0.0);
  double grad_bias = 0.0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    lr_gradient(problem, m.weights, m.bias, config.l2, grad, grad_bias);
    for (std::size_t j = 0; j < grad.size(); ++j) m.weights[j] -= config.learning_rate * grad[j];
    m.bias -= config.learning_rate * grad_bias;
    const double loss = lr_loss(problem, m.weights, m.bias, config.l2);
    if (!std::isfinite(loss)) throw DivergenceError(epoch, "logistic loss is not finite");
    m.loss_history.push_back(loss);
    if (on_epoch) on_epoch(epoch, m);
  }
  return m;
}

Label lr_predict(const LrModel& model, const FeatureVector& features) {
  return model.score(features) > 0.0 ? Label::Positive : Label::Negative;
}

double f1_score(std::span<const Label> predictions, std::span<const Label> gold, Label positive) {
  if (predictions.size() != gold.size()) throw InputError("prediction and gold label counts differ");
  if (predictions.empty()) throw InputError("F1 needs at least one prediction");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predictions[i] == positive;
    const bool g = gold[i] == positive;
    if (p && g) ++tp;
    else if (p) ++fp;
    else if (g) ++fn;
  }
  const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

double macro_f1(std::span<const Label> predictions, std::span<const Label> gold) {
  return 0.5 * (f1_score(predictions, gold, Label::Positive) + f1_score(predictions, gold, Label::Negative));
}

}  // namespace parmine::sentiment
