#pragma once

// Stratified k-fold harness for the zero-shot / in-language sentiment
// experiments.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parmine/classifier.hpp"
#include "parmine/dictionary.hpp"

namespace parmine::sentiment {

/// One labeled sentence with its text in the training-side language and,
/// optionally, its translation in the other language.
struct LabeledItem {
  Label label = Label::Negative;
  std::string source_text;
  std::optional<std::string> target_text;
};

/// TSV `label<TAB>text_src[<TAB>text_tgt]`. Throws ParseError with the line
/// number for unknown labels, missing or empty text.
std::vector<LabeledItem> read_labeled(std::istream& in, const std::string& source_name = "<input>");
std::vector<LabeledItem> load_labeled(const std::string& path);

struct SplitRatios {
  double train = 0.7;
  double dev = 0.1;
  double test = 0.2;
};

struct FoldAssignment {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;
};

/// k stratified train/dev/test splits whose test sets partition the data.
/// Per class, each split's count is within one item of its share of the split
/// size. Requires ratios summing to 1 with test == 1/k (ConfigError) and at
/// least k items of each class (InputError).
std::vector<FoldAssignment> stratified_folds(std::span<const Label> labels, std::size_t k,
                                             const SplitRatios& ratios, std::uint64_t seed);

enum class ExperimentMode {
  TrainSourceTestTarget,  // zero-shot on the other language
  TrainSourceTestW2w,     // zero-shot on a word-to-word translation
  TrainTargetTestTarget,  // in-language on the target side
  TrainSourceTestSource,  // in-language on the source side
};

ExperimentMode parse_mode(std::string_view text);
std::string_view to_string(ExperimentMode mode);

enum class ClassifierKind { NaiveBayes, LogisticRegression };

ClassifierKind parse_classifier(std::string_view text);
std::string_view to_string(ClassifierKind kind);

struct CvConfig {
  ClassifierKind classifier = ClassifierKind::NaiveBayes;
  ExperimentMode mode = ExperimentMode::TrainSourceTestTarget;
  std::size_t folds = 5;
  SplitRatios ratios;
  std::uint64_t seed = 1;
  std::size_t bpe_vocab_size = 2000;
  std::vector<double> nb_alphas{0.1, 0.5, 1.0};
  std::vector<int> lr_epochs{50, 100, 200};
  std::vector<double> lr_l2{0.0, 0.01, 0.1};
  double lr_learning_rate = 0.1;
  std::size_t jobs = 1;
};

struct GridPoint {
  double alpha = 0.0;  // naive Bayes
  int epochs = 0;      // logistic regression
  double l2 = 0.0;     // logistic regression
  double dev_f1 = 0.0;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t dev_size = 0;
  std::size_t test_size = 0;
  double f1 = 0.0;
  double macro_f1 = 0.0;
  GridPoint selected;
  std::vector<GridPoint> trace;
  std::size_t bpe_merges = 0;
};

struct CvReport {
  CvConfig config;
  std::vector<FoldResult> folds;
  double mean_f1 = 0.0;
  double mean_macro_f1 = 0.0;
};

/// Per fold: learn BPE on the training texts, tune on dev (training-side
/// language) by positive-class F1 with ties toward smaller hyperparameters,
/// then score the test texts of the side the mode selects. The W2W mode needs
/// `dict`, mapping target-language words into the source language.
CvReport cross_validate(std::span<const LabeledItem> data, const CvConfig& config,
                        const dictionary::BilingualDictionary* dict = nullptr);

}  // namespace parmine::sentiment
