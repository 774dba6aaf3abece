#include "parmine/cross_validation.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <random>

#include "parmine/error.hpp"
#include "parmine/parallel.hpp"
#include "parmine/w2w.hpp"

namespace parmine::sentiment {

std::vector<LabeledItem> read_labeled(std::istream& in, const std::string& source_name) {
  std::vector<LabeledItem> items;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty() || raw.front() == '#') continue;
    std::vector<std::string_view> cols;
    std::string_view rest(raw);
    for (;;) {
      const auto tab = rest.find('\t');
      cols.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (cols.size() < 2) throw ParseError(source_name, line, "expected 'label<TAB>text[<TAB>text]'");
    LabeledItem item;
    try {
      item.label = parse_label(cols[0]);
    } catch (const InputError& e) {
      throw ParseError(source_name, line, e.message());
    }
    item.source_text = text::collapse_whitespace(cols[1]);
    if (item.source_text.empty()) throw ParseError(source_name, line, "empty text");
    if (cols.size() >= 3) {
      auto target = text::collapse_whitespace(cols[2]);
      if (target.empty()) throw ParseError(source_name, line, "empty second text column");
      item.target_text = std::move(target);
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<LabeledItem> load_labeled(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path, 0, "cannot open labeled data");
  return read_labeled(in, path);
}

namespace {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

// Fisher-Yates with a fully specified integer draw, so assignments are the
// same on every standard library.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

std::vector<FoldAssignment> stratified_folds(std::span<const Label> labels, std::size_t k,
                                             const SplitRatios& ratios, std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least 2 folds");
  if (ratios.train < 0 || ratios.dev < 0 || ratios.test <= 0 ||
      std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
  if (std::abs(ratios.test * static_cast<double>(k) - 1.0) > 1e-9) {
    throw ConfigError("test ratio must equal 1/k so that the k test sets partition the data");
  }

  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);
  for (std::size_t c = 0; c < 2; ++c) {
    if (members[c].size() < k) {
      throw InputError("class '" + std::string(to_string(static_cast<Label>(c))) + "' has " +
                       std::to_string(members[c].size()) + " items, fewer than " + std::to_string(k) +
                       " folds");
    }
  }
  std::mt19937_64 rng(seed);
  for (auto& m : members) shuffle(m, rng);

  const double n = static_cast<double>(labels.size());
  const double p_pos = static_cast<double>(members[1].size()) / n;
  const auto dev_total = static_cast<std::size_t>(std::llround(n * ratios.dev));

  std::vector<FoldAssignment> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::array<std::size_t, 2> chunk_begin{}, chunk_end{};
    std::size_t test_size = 0;
    for (std::size_t c = 0; c < 2; ++c) {
      const std::size_t nc = members[c].size();
      chunk_begin[c] = f * nc / k;
      chunk_end[c] = (f + 1) * nc / k;
      test_size += chunk_end[c] - chunk_begin[c];
    }

    // Round the positive dev share in the direction that offsets the test
    // split's rounding; the train split then stays within one item as well.
    const double test_dev = static_cast<double>(chunk_end[1] - chunk_begin[1]) -
                            static_cast<double>(test_size) * p_pos;
    const double dev_share = static_cast<double>(dev_total) * p_pos;
    std::array<std::size_t, 2> dev_count{};
    dev_count[1] = static_cast<std::size_t>(test_dev >= 0 ? std::floor(dev_share) : std::ceil(dev_share));
    dev_count[1] = std::min(dev_count[1], dev_total);
    dev_count[0] = dev_total - dev_count[1];

    auto& fold = folds[f];
    for (std::size_t c = 0; c < 2; ++c) {
      const auto& m = members[c];
      const std::size_t nc = m.size();
      const std::size_t test_c = chunk_end[c] - chunk_begin[c];
      const std::size_t dev_c = std::min(dev_count[c], nc - test_c);
      for (std::size_t i = chunk_begin[c]; i < chunk_end[c]; ++i) fold.test.push_back(m[i]);
      for (std::size_t r = 0; r < nc - test_c; ++r) {
        const std::size_t idx = m[(chunk_end[c] + r) % nc];
        (r < dev_c ? fold.dev : fold.train).push_back(idx);
      }
    }
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.dev.begin(), fold.dev.end());
    std::sort(fold.test.begin(), fold.test.end());
  }
  return folds;
}

ExperimentMode parse_mode(std::string_view t) {
  if (t == "train-src/test-tgt") return ExperimentMode::TrainSourceTestTarget;
  if (t == "train-src/test-w2w") return ExperimentMode::TrainSourceTestW2w;
  if (t == "train-tgt/test-tgt") return ExperimentMode::TrainTargetTestTarget;
  if (t == "train-src/test-src") return ExperimentMode::TrainSourceTestSource;
  throw ConfigError("unknown experiment mode '" + std::string(t) + "'");
}

std::string_view to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::TrainSourceTestTarget: return "train-src/test-tgt";
    case ExperimentMode::TrainSourceTestW2w: return "train-src/test-w2w";
    case ExperimentMode::TrainTargetTestTarget: return "train-tgt/test-tgt";
    case ExperimentMode::TrainSourceTestSource: return "train-src/test-src";
  }
  return "?";
}

ClassifierKind parse_classifier(std::string_view t) {
  if (t == "nb" || t == "naive-bayes") return ClassifierKind::NaiveBayes;
  if (t == "lr" || t == "logistic-regression") return ClassifierKind::LogisticRegression;
  throw ConfigError("unknown classifier '" + std::string(t) + "'");
}

std::string_view to_string(ClassifierKind kind) {
  return kind == ClassifierKind::NaiveBayes ? "nb" : "lr";
}

namespace {

struct Sides {
  std::vector<std::string> train;  // used for train and dev
  std::vector<std::string> test;
};

Sides select_sides(std::span<const LabeledItem> data, const CvConfig& config,
                   const dictionary::BilingualDictionary* dict) {
  const bool train_on_target = config.mode == ExperimentMode::TrainTargetTestTarget;
  const bool test_on_source = config.mode == ExperimentMode::TrainSourceTestSource;
  const bool needs_target = !test_on_source;
  if (config.mode == ExperimentMode::TrainSourceTestW2w && dict == nullptr) {
    throw ConfigError("mode train-src/test-w2w needs a dictionary");
  }
  Sides s;
  s.train.reserve(data.size());
  s.test.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& item = data[i];
    if (needs_target && !item.target_text) {
      throw InputError("item " + std::to_string(i + 1) + " has no second-language text, required by mode " +
                       std::string(to_string(config.mode)));
    }
    s.train.push_back(train_on_target ? *item.target_text : item.source_text);
    if (test_on_source) {
      s.test.push_back(item.source_text);
    } else if (config.mode == ExperimentMode::TrainSourceTestW2w) {
      const auto tokens = text::tokenize(*item.target_text);
      s.test.push_back(text::join(w2w::translate_tokens(*dict, tokens).tokens));
    } else {
      s.test.push_back(*item.target_text);
    }
  }
  return s;
}

std::vector<Example> examples(const BpeModel& bpe, std::span<const std::string> texts,
                              std::span<const LabeledItem> data, std::span<const std::size_t> idx) {
  std::vector<Example> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back({featurize(bpe, texts[i]), data[i].label});
  return out;
}

std::vector<Label> gold(std::span<const Example> ex) {
  std::vector<Label> g;
  g.reserve(ex.size());
  for (const auto& e : ex) g.push_back(e.label);
  return g;
}

template <typename Predict>
std::vector<Label> predict_all(std::span<const Example> ex, Predict&& predict) {
  std::vector<Label> p;
  p.reserve(ex.size());
  for (const auto& e : ex) p.push_back(predict(e.features));
  return p;
}

FoldResult run_fold(std::size_t fold_index, const FoldAssignment& fold, std::span<const LabeledItem> data,
                    const Sides& sides, const CvConfig& config) {
  FoldResult r;
  r.fold = fold_index;
  r.train_size = fold.train.size();
  r.dev_size = fold.dev.size();
  r.test_size = fold.test.size();

  std::vector<std::string> train_texts;
  train_texts.reserve(fold.train.size());
  for (auto i : fold.train) train_texts.push_back(sides.train[i]);
  const auto bpe = bpe_train(train_texts, config.bpe_vocab_size);
  r.bpe_merges = bpe.merges().size();

  const auto train = examples(bpe, sides.train, data, fold.train);
  const auto dev = examples(bpe, sides.train, data, fold.dev);
  const auto test = examples(bpe, sides.test, data, fold.test);
  const auto dev_gold = gold(dev);
  const auto test_gold = gold(test);

  auto dev_f1 = [&](auto&& predict) {
    return dev.empty() ? 0.0 : f1_score(predict_all(dev, predict), dev_gold);
  };

  std::vector<Label> test_pred;
  if (config.classifier == ClassifierKind::NaiveBayes) {
    auto alphas = config.nb_alphas;
    std::sort(alphas.begin(), alphas.end());
    std::optional<NbModel> best;
    for (double a : alphas) {
      auto model = nb_train(train, a);
      GridPoint g;
      g.alpha = a;
      g.dev_f1 = dev_f1([&](const FeatureVector& f) { return nb_predict(model, f); });
      r.trace.push_back(g);
      if (!best || g.dev_f1 > r.selected.dev_f1) {
        r.selected = g;
        best = std::move(model);
      }
    }
    test_pred = predict_all(test, [&](const FeatureVector& f) { return nb_predict(*best, f); });
  } else {
    auto epochs = config.lr_epochs;
    auto l2s = config.lr_l2;
    std::sort(epochs.begin(), epochs.end());
    std::sort(l2s.begin(), l2s.end());
    // snapshots[e][l] = model after epochs[e] epochs with l2s[l].
    std::vector<std::vector<LrModel>> snapshots(epochs.size(), std::vector<LrModel>(l2s.size()));
    for (std::size_t l = 0; l < l2s.size(); ++l) {
      LrConfig lc;
      lc.learning_rate = config.lr_learning_rate;
      lc.epochs = epochs.back();
      lc.l2 = l2s[l];
      lc.seed = config.seed;
      lr_train(train, lc, [&](int epoch, const LrModel& m) {
        for (std::size_t e = 0; e < epochs.size(); ++e) {
          if (epochs[e] == epoch) {
            snapshots[e][l] = m;
            snapshots[e][l].config.epochs = epoch;
            snapshots[e][l].loss_history.clear();
          }
        }
      });
    }
    const LrModel* best = nullptr;
    for (std::size_t e = 0; e < epochs.size(); ++e) {
      for (std::size_t l = 0; l < l2s.size(); ++l) {
        const auto& model = snapshots[e][l];
        GridPoint g;
        g.epochs = epochs[e];
        g.l2 = l2s[l];
        g.dev_f1 = dev_f1([&](const FeatureVector& f) { return lr_predict(model, f); });
        r.trace.push_back(g);
        if (best == nullptr || g.dev_f1 > r.selected.dev_f1) {
          r.selected = g;
          best = &model;
        }
      }
    }
    test_pred = predict_all(test, [&](const FeatureVector& f) { return lr_predict(*best, f); });
  }
  r.f1 = f1_score(test_pred, test_gold);
  r.macro_f1 = macro_f1(test_pred, test_gold);
  return r;
}

}  // namespace

CvReport cross_validate(std::span<const LabeledItem> data, const CvConfig& config,
                        const dictionary::BilingualDictionary* dict) {
  if (config.classifier == ClassifierKind::NaiveBayes && config.nb_alphas.empty()) {
    throw ConfigError("empty naive Bayes smoothing grid");
  }
  if (config.classifier == ClassifierKind::LogisticRegression &&
      (config.lr_epochs.empty() || config.lr_l2.empty())) {
    throw ConfigError("empty logistic regression grid");
  }
  if (config.classifier == ClassifierKind::LogisticRegression &&
      std::any_of(config.lr_epochs.begin(), config.lr_epochs.end(), [](int e) { return e < 1; })) {
    throw ConfigError("epoch counts must be positive");
  }

  const auto sides = select_sides(data, config, dict);
  std::vector<Label> labels;
  labels.reserve(data.size());
  for (const auto& item : data) labels.push_back(item.label);
  const auto folds = stratified_folds(labels, config.folds, config.ratios, config.seed);

  CvReport report;
  report.config = config;
  report.folds.resize(folds.size());
  parallel_for(folds.size(), config.jobs,
               [&](std::size_t f) { report.folds[f] = run_fold(f, folds[f], data, sides, config); });
  for (const auto& f : report.folds) {
    report.mean_f1 += f.f1;
    report.mean_macro_f1 += f.macro_f1;
  }
  report.mean_f1 /= static_cast<double>(report.folds.size());
  report.mean_macro_f1 /= static_cast<double>(report.folds.size());
  return report;
}

}  // namespace parmine::sentiment
