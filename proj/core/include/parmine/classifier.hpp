#pragma once

// Binary polarity classifiers over sparse BPE n-gram counts.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "parmine/bpe.hpp"

namespace parmine::sentiment {

enum class Label : int { Negative = 0, Positive = 1 };

/// Accepts positive/negative, pos/neg and 1/0 (case-insensitive).
/// Throws InputError otherwise.
Label parse_label(std::string_view text);
std::string_view to_string(Label label);

/// Feature key -> count. Unigram keys are the BPE symbol; bigram keys are the
/// two symbols joined by a single space.
using FeatureVector = std::map<std::string, std::size_t>;

FeatureVector featurize_tokens(std::span<const std::string> tokens);
FeatureVector featurize(const BpeModel& model, std::string_view text);

struct Example {
  FeatureVector features;
  Label label;
};

/// Dense ids for the features seen in training. Unknown features are dropped
/// at encoding time.
class FeatureIndex {
 public:
  using Sparse = std::vector<std::pair<std::uint32_t, double>>;

  static FeatureIndex build(std::span<const Example> data);
  Sparse encode(const FeatureVector& features) const;
  std::size_t size() const noexcept { return ids_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
};

// --- Multinomial naive Bayes -------------------------------------------------

struct NbModel {
  FeatureIndex index;
  double alpha = 1.0;
  std::array<double, 2> log_prior{};
  /// log P(feature | class), indexed by [class][feature id].
  std::array<std::vector<double>, 2> log_likelihood;

  /// Unnormalised log posterior per class, indexed by Label.
  std::array<double, 2> log_scores(const FeatureVector& features) const;
};

/// Throws InputError unless both classes occur, InvalidArgument unless alpha > 0.
NbModel nb_train(std::span<const Example> data, double alpha);
/// Positive only when its score is strictly greater.
Label nb_predict(const NbModel& model, const FeatureVector& features);

// --- L2-regularised logistic regression -------------------------------------

struct LrConfig {
  double learning_rate = 0.1;
  int epochs = 100;
  double l2 = 0.0;
  /// Recorded for reproducibility; weights always start at zero.
  std::uint64_t seed = 0;
};

struct LrModel {
  FeatureIndex index;
  std::vector<double> weights;
  double bias = 0.0;
  LrConfig config;
  std::vector<double> loss_history;

  double score(const FeatureVector& features) const;
};

/// Training set in index space with labels in {0, 1}.
struct LrProblem {
  std::vector<FeatureIndex::Sparse> rows;
  std::vector<double> targets;
  std::size_t dimension = 0;
};

LrProblem make_lr_problem(std::span<const Example> data, const FeatureIndex& index);

/// Mean logistic loss plus (l2 / 2) * |w|^2; the bias is not penalised.
double lr_loss(const LrProblem& problem, std::span<const double> weights, double bias, double l2);
/// Gradient of lr_loss. `grad_weights` must have problem.dimension entries.
void lr_gradient(const LrProblem& problem, std::span<const double> weights, double bias, double l2,
                 std::span<double> grad_weights, double& grad_bias);

/// Full-batch gradient descent for config.epochs epochs. `on_epoch`, when set,
/// sees the model after every epoch (1-based). Throws DivergenceError when the
/// loss stops being finite.
LrModel lr_train(std::span<const Example> data, const LrConfig& config,
                 const std::function<void(int, const LrModel&)>& on_epoch = {});
/// Positive only when the linear score is strictly positive.
Label lr_predict(const LrModel& model, const FeatureVector& features);

// --- Scores -----------------------------------------------------------------

/// F1 of `positive`; 0 when precision + recall is 0. Throws InputError on
/// empty or mismatched inputs.
double f1_score(std::span<const Label> predictions, std::span<const Label> gold,
                Label positive = Label::Positive);
double macro_f1(std::span<const Label> predictions, std::span<const Label> gold);

}  // namespace parmine::sentiment
