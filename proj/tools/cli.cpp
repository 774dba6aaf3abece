#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "manifest.hpp"
#include "parmine/corpus_io.hpp"
#include "parmine/cross_validation.hpp"
#include "parmine/dictionary.hpp"
#include "parmine/error.hpp"
#include "parmine/metrics.hpp"
#include "parmine/mining.hpp"
#include "parmine/version.hpp"
#include "parmine/w2w.hpp"

namespace parmine::cli {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

// --- small helpers ---------------------------------------------------------

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open input");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string single_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

struct TextOptions {
  bool lowercase = false;
  bool no_tokenize = false;
  std::size_t max_len = 75;
  bool no_truncate = false;
};

text::TokenList prepare(const std::string& line, const TextOptions& o) {
  text::TokenList t;
  if (o.no_tokenize) {
    std::istringstream in(line);
    for (std::string w; in >> w;) t.push_back(w);
  } else {
    t = text::tokenize(line);
  }
  if (o.lowercase) t = text::normalize(t);
  if (!o.no_truncate) t = text::truncate(t, o.max_len);
  return t;
}

sentiment::SplitRatios parse_ratios(const std::string& s) {
  std::array<double, 3> v{};
  std::size_t start = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto slash = s.find('/', start);
    if ((i < 2) == (slash == std::string::npos)) throw ConfigError("ratios must look like 70/10/20");
    const auto part = s.substr(start, i < 2 ? slash - start : std::string::npos);
    try {
      std::size_t used = 0;
      v[i] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("ratios must look like 70/10/20");
    }
    if (v[i] < 0) throw ConfigError("ratios must be non-negative");
    start = slash + 1;
  }
  const double sum = v[0] + v[1] + v[2];
  if (!(sum > 0)) throw ConfigError("ratios must not all be zero");
  return {v[0] / sum, v[1] / sum, v[2] / sum};
}

// --- invocation context ------------------------------------------------------

struct Globals {
  std::string config;
  std::string manifest;
  bool reproducible = false;
  std::size_t jobs = 1;
  std::uint64_t seed = 1;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  Globals& globals;
  Manifest manifest;

  void require(const std::string& value, const char* flag) const {
    if (value.empty()) throw CLI::RequiredError(flag);
  }

  template <typename Fill>
  void write_output(const std::string& role, const std::string& path, Fill&& fill) {
    write_atomic(path, std::forward<Fill>(fill));
    manifest.add_output(role, path);
  }

  /// Writes JSON to `path` when given and always to stdout.
  void emit_json(const json& j, const std::string& path) {
    const auto text = j.dump(2) + "\n";
    if (!path.empty()) write_output("report", path, [&](std::ostream& o) { o << text; });
    out << text;
  }
};

using Handler = std::function<void(Context&)>;

struct Command {
  CLI::App* app;
  std::string name;
  Handler handler;
};

// --- dictionary commands -------------------------------------------------------

struct DictArgs {
  std::vector<std::string> inputs;
  std::string dict;
  std::string lexicon;
  std::string lang_pair = "min-id";
  std::string out;
};

json stats_json(const dictionary::DictionaryStats& s) {
  json j = {{"entries", s.entries},
            {"pairs", s.pairs},
            {"identical_entries", s.identical_entries},
            {"targets_with_multiple_sources", s.targets_with_multiple_sources},
            {"distinct_targets", s.distinct_targets}};
  j["identity_ratio"] = s.identity_ratio ? json(*s.identity_ratio) : json(nullptr);
  return j;
}

void dict_counts(Manifest& m, const std::string& prefix, const dictionary::BilingualDictionary& d) {
  m.set_count(prefix + "entries", d.size());
  m.set_count(prefix + "pairs", d.pair_count());
}

void dict_build(Context& ctx, const DictArgs& a) {
  if (a.inputs.empty()) throw CLI::RequiredError("--input");
  ctx.require(a.out, "--out");
  const auto lp = dictionary::parse_language_pair(a.lang_pair);
  dictionary::BilingualDictionary merged(lp);
  for (const auto& path : a.inputs) {
    ctx.manifest.add_input("raw", path);
    const auto part = dictionary::load_dictionary(path, lp);
    for (const auto& e : part.entries()) {
      for (const auto& t : e.targets) merged.add(e.source_word, t);
    }
  }
  if (!a.lexicon.empty()) {
    ctx.manifest.add_input("lexicon", a.lexicon);
    dict_counts(ctx.manifest, "unfiltered_", merged);
    merged = dictionary::filter_by_lexicon(merged, dictionary::load_lexicon(a.lexicon));
  }
  dict_counts(ctx.manifest, "", merged);
  ctx.write_output("dictionary", a.out, [&](std::ostream& o) { dictionary::write_dictionary(o, merged); });
}

void dict_filter(Context& ctx, const DictArgs& a) {
  ctx.require(a.dict, "--dict");
  ctx.require(a.lexicon, "--lexicon");
  ctx.require(a.out, "--out");
  const auto lp = dictionary::parse_language_pair(a.lang_pair);
  ctx.manifest.add_input("dictionary", a.dict);
  ctx.manifest.add_input("lexicon", a.lexicon);
  const auto d = dictionary::load_dictionary(a.dict, lp);
  const auto lex = dictionary::load_lexicon(a.lexicon);
  const auto f = dictionary::filter_by_lexicon(d, lex);
  dict_counts(ctx.manifest, "input_", d);
  dict_counts(ctx.manifest, "output_", f);
  ctx.manifest.set_count("lexicon_words", lex.size());
  ctx.write_output("dictionary", a.out, [&](std::ostream& o) { dictionary::write_dictionary(o, f); });
}

void dict_invert(Context& ctx, const DictArgs& a) {
  ctx.require(a.dict, "--dict");
  ctx.require(a.out, "--out");
  ctx.manifest.add_input("dictionary", a.dict);
  const auto d = dictionary::load_dictionary(a.dict, dictionary::parse_language_pair(a.lang_pair));
  const auto inv = dictionary::invert(d);
  dict_counts(ctx.manifest, "input_", d);
  dict_counts(ctx.manifest, "output_", inv);
  ctx.write_output("dictionary", a.out, [&](std::ostream& o) { dictionary::write_dictionary(o, inv); });
}

void dict_stats(Context& ctx, const DictArgs& a) {
  ctx.require(a.dict, "--dict");
  ctx.manifest.add_input("dictionary", a.dict);
  const auto d = dictionary::load_dictionary(a.dict, dictionary::parse_language_pair(a.lang_pair));
  auto j = stats_json(dictionary::dictionary_stats(d));
  j["direction"] = d.direction().str();
  ctx.manifest.set_result(j);
  ctx.emit_json(j, a.out);
}

// --- word-to-word translation ------------------------------------------------

struct W2wArgs {
  std::string dict;
  std::string input;
  std::string out;
  std::string lang_pair = "min-id";
  std::size_t max_len = 75;
  bool no_truncate = false;
};

void w2w_run(Context& ctx, const W2wArgs& a) {
  ctx.require(a.dict, "--dict");
  ctx.require(a.input, "--input");
  ctx.require(a.out, "--out");
  ctx.manifest.add_input("dictionary", a.dict);
  ctx.manifest.add_input("source", a.input);
  const auto d = dictionary::load_dictionary(a.dict, dictionary::parse_language_pair(a.lang_pair));
  const auto t0 = Clock::now();
  std::vector<text::TokenList> sentences;
  for (const auto& line : read_lines(a.input)) {
    auto tokens = text::tokenize(line);
    if (!a.no_truncate) tokens = text::truncate(tokens, a.max_len);
    sentences.push_back(std::move(tokens));
  }
  const auto result = w2w::translate_corpus(d, std::span<const text::TokenList>(sentences), ctx.globals.jobs);
  ctx.manifest.set_seconds("translate", seconds_since(t0));
  ctx.write_output("translation", a.out, [&](std::ostream& o) {
    for (const auto& r : result.results) o << text::join(r.tokens) << '\n';
  });
  const json summary = {{"sentences", result.results.size()},
                        {"words", result.word_count},
                        {"oov", result.oov_count},
                        {"oov_rate", result.oov_rate()},
                        {"zero_denominator", result.zero_denominator()}};
  ctx.manifest.set_count("sentences", result.results.size());
  ctx.manifest.set_count("words", result.word_count);
  ctx.manifest.set_count("oov", result.oov_count);
  ctx.manifest.set_result(summary);
  ctx.out << summary.dump(2) << '\n';
}

// --- mining -------------------------------------------------------------------

struct MineArgs {
  std::string src;
  std::string tgt;
  std::string dict;
  std::string input;
  std::string out;
  std::string thresholded_out;
  std::string lang_pair = "min-id";
  std::string abbreviations;
  std::size_t abbreviation_length = 0;
  double threshold = 0.5;
  std::size_t trigram_top = 1000;
  std::size_t trigram_cap = 100;
  bool many_to_one = false;
  std::size_t batch_size = 256;
};

mining::MiningConfig mining_config(Context& ctx, const MineArgs& a) {
  mining::MiningConfig cfg;
  cfg.align_threshold = a.threshold;
  cfg.trigram_top_k = a.trigram_top;
  cfg.trigram_cap = a.trigram_cap;
  cfg.one_to_one = !a.many_to_one;
  cfg.segmenter.max_abbreviation_length = a.abbreviation_length;
  if (!a.abbreviations.empty()) {
    ctx.manifest.add_input("abbreviations", a.abbreviations);
    for (const auto& line : read_lines(a.abbreviations)) {
      auto w = trim(line);
      if (w.empty() || w.front() == '#') continue;
      if (w.back() == '.') w.pop_back();
      cfg.segmenter.abbreviations.insert(text::lowercase(w));
    }
  }
  cfg.validate();
  return cfg;
}

void stage_counts(Manifest& m, const mining::MiningStats& s) {
  m.set_count("source_documents", s.source_documents);
  m.set_count("target_documents", s.target_documents);
  m.set_count("document_pairs", s.document_pairs);
  m.set_count("source_sentences", s.source_sentences);
  m.set_count("target_sentences", s.target_sentences);
  m.set_count("thresholded_pairs", s.thresholded_pairs);
}

void filter_counts(Manifest& m, const mining::FilterStats& f) {
  m.set_count("filter_input_pairs", f.input_pairs);
  m.set_count("final_pairs", f.output_pairs);
  m.set_count("tracked_trigrams", f.tracked_trigrams);
  m.set_count("overloaded_trigrams", f.overloaded_trigrams);
}

void mine_docs(Context& ctx, const MineArgs& a) {
  ctx.require(a.src, "--src");
  ctx.require(a.tgt, "--tgt");
  ctx.require(a.out, "--out");
  ctx.manifest.add_input("source_documents", a.src);
  ctx.manifest.add_input("target_documents", a.tgt);
  const auto t0 = Clock::now();
  mining::MiningStats stats;
  const auto records = io::pair_document_files(a.src, a.tgt, &stats);
  ctx.manifest.set_seconds("documents", seconds_since(t0));
  ctx.manifest.set_count("source_documents", stats.source_documents);
  ctx.manifest.set_count("target_documents", stats.target_documents);
  ctx.manifest.set_count("document_pairs", stats.document_pairs);
  ctx.write_output("document_pairs", a.out, [&](std::ostream& o) {
    for (const auto& r : records) o << r.source_id << '\t' << r.target_id << '\t' << r.title << '\n';
  });
}

void mine_sents(Context& ctx, const MineArgs& a, bool filter) {
  ctx.require(a.src, "--src");
  ctx.require(a.tgt, "--tgt");
  ctx.require(a.dict, "--dict");
  ctx.require(a.out, "--out");
  ctx.manifest.add_input("source_documents", a.src);
  ctx.manifest.add_input("target_documents", a.tgt);
  ctx.manifest.add_input("dictionary", a.dict);
  const auto cfg = mining_config(ctx, a);
  const auto d = dictionary::load_dictionary(a.dict, dictionary::parse_language_pair(a.lang_pair));
  const auto r = io::mine_files(a.src, a.tgt, d, cfg, ctx.globals.jobs, a.batch_size);
  stage_counts(ctx.manifest, r.stats);
  ctx.manifest.set_seconds("documents", r.stats.seconds_documents);
  ctx.manifest.set_seconds("alignment", r.stats.seconds_alignment);
  if (!filter) {
    ctx.write_output("thresholded_pairs", a.out, [&](std::ostream& o) { io::write_pairs(o, r.thresholded); });
    return;
  }
  ctx.manifest.set_seconds("filter", r.stats.seconds_filter);
  filter_counts(ctx.manifest, r.stats.filter);
  if (!a.thresholded_out.empty()) {
    ctx.write_output("thresholded_pairs", a.thresholded_out,
                     [&](std::ostream& o) { io::write_pairs(o, r.thresholded); });
  }
  ctx.write_output("corpus", a.out, [&](std::ostream& o) { io::write_pairs(o, r.corpus); });
}

void mine_filter(Context& ctx, const MineArgs& a) {
  ctx.require(a.input, "--input");
  ctx.require(a.out, "--out");
  ctx.manifest.add_input("pairs", a.input);
  const auto cfg = mining_config(ctx, a);
  const auto pairs = io::load_pairs(a.input);
  const auto t0 = Clock::now();
  mining::FilterStats stats;
  const auto kept = mining::diversity_filter(pairs, cfg, &stats);
  ctx.manifest.set_seconds("filter", seconds_since(t0));
  filter_counts(ctx.manifest, stats);
  ctx.write_output("corpus", a.out, [&](std::ostream& o) { io::write_pairs(o, kept); });
}

// --- evaluation ------------------------------------------------------------------

struct EvalArgs {
  std::string hyp;
  std::string ref;
  std::string side_a;
  std::string side_b;
  std::string scores;
  std::string out;
  TextOptions text;
};

std::pair<std::vector<text::TokenList>, std::vector<text::TokenList>> read_parallel(Context& ctx,
                                                                                    const EvalArgs& a) {
  ctx.require(a.hyp, "--hyp");
  ctx.require(a.ref, "--ref");
  ctx.manifest.add_input("hypotheses", a.hyp);
  ctx.manifest.add_input("references", a.ref);
  const auto h = read_lines(a.hyp);
  const auto r = read_lines(a.ref);
  if (h.size() != r.size()) {
    throw InputError(a.hyp, 0, std::to_string(h.size()) + " lines but " + a.ref + " has " +
                                   std::to_string(r.size()));
  }
  std::pair<std::vector<text::TokenList>, std::vector<text::TokenList>> out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    out.first.push_back(prepare(h[i], a.text));
    out.second.push_back(prepare(r[i], a.text));
  }
  ctx.manifest.set_count("sentences", h.size());
  return out;
}

void eval_bleu(Context& ctx, const EvalArgs& a) {
  const auto [h, r] = read_parallel(ctx, a);
  if (h.empty()) throw InputError(a.hyp, 0, "no hypotheses");
  const auto b = metrics::bleu(h, r, ctx.globals.jobs);
  json precisions = json::array();
  for (double p : b.precisions) precisions.push_back(100.0 * p);
  const json j = {{"bleu", b.bleu},
                  {"precisions", precisions},
                  {"bp", b.brevity_penalty},
                  {"hyp_len", b.hyp_length},
                  {"ref_len", b.ref_length},
                  {"matches", b.matches},
                  {"totals", b.totals},
                  {"zero_length", b.zero_length}};
  ctx.manifest.set_result(j);
  ctx.emit_json(j, a.out);
}

void eval_rouge(Context& ctx, EvalArgs a) {
  a.text.no_truncate = true;
  const auto [h, r] = read_parallel(ctx, a);
  if (h.empty()) throw InputError(a.hyp, 0, "no hypotheses");
  double p = 0, rc = 0, f = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto s = metrics::rouge1_f1(h[i], r[i]);
    p += s.precision;
    rc += s.recall;
    f += s.f1;
  }
  const double n = static_cast<double>(h.size());
  const json j = {{"rouge1_precision", p / n}, {"rouge1_recall", rc / n}, {"rouge1_f1", f / n},
                  {"sentences", h.size()}};
  ctx.manifest.set_result(j);
  ctx.emit_json(j, a.out);
}

json side_json(const metrics::SideStats& s) {
  return {{"sentences", s.sentences}, {"mean_words", s.mean_words}, {"std_words", s.std_words},
          {"mean_chars", s.mean_chars}, {"std_chars", s.std_chars}, {"vocab_size", s.vocab_size}};
}

void eval_stats(Context& ctx, const EvalArgs& a) {
  ctx.require(a.side_a, "--a");
  ctx.require(a.side_b, "--b");
  ctx.manifest.add_input("side_a", a.side_a);
  ctx.manifest.add_input("side_b", a.side_b);
  auto load = [](const std::string& path) {
    std::vector<text::Sentence> s;
    for (auto& line : read_lines(path)) {
      if (!text::collapse_whitespace(line).empty()) s.push_back({std::move(line)});
    }
    return s;
  };
  const auto s = metrics::corpus_stats(load(a.side_a), load(a.side_b));
  const json j = {{"a", side_json(s.a)}, {"b", side_json(s.b)}, {"overlapping_vocab", s.overlapping_vocab},
                  {"empty", s.empty}};
  ctx.manifest.set_result(j);
  ctx.emit_json(j, a.out);
}

void eval_judge(Context& ctx, const EvalArgs& a) {
  ctx.require(a.scores, "--scores");
  ctx.manifest.add_input("scores", a.scores);
  std::vector<int> sa, sb;
  const auto lines = read_lines(a.scores);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream in(line);
    int x = 0, y = 0;
    std::string extra;
    if (!(in >> x >> y) || (in >> extra)) {
      throw ParseError(a.scores, i + 1, "expected two integer scores");
    }
    if (x < 1 || x > 5 || y < 1 || y > 5) throw ParseError(a.scores, i + 1, "scores must be in 1..5");
    sa.push_back(x);
    sb.push_back(y);
  }
  if (sa.empty()) throw InputError(a.scores, 0, "no scores");
  const auto s = metrics::judgment_summary(sa, sb);
  json j = {{"items", s.items}, {"mean", s.mean}, {"mean_a", s.mean_a}, {"mean_b", s.mean_b}};
  j["pearson"] = s.pearson ? json(*s.pearson) : json(nullptr);
  ctx.manifest.set_result(j);
  ctx.emit_json(j, a.out);
}

// --- sentiment ---------------------------------------------------------------------

struct SentArgs {
  std::string data;
  std::string out;
  std::string side = "src";
  std::size_t vocab_size = 2000;
  std::string classifier = "nb";
  std::string mode = "train-src/test-tgt";
  std::size_t folds = 5;
  std::string ratios = "70/10/20";
  std::string dict;
  std::string lang_pair = "min-id";
  double learning_rate = 0.1;
};

void sent_bpe(Context& ctx, const SentArgs& a) {
  ctx.require(a.data, "--data");
  ctx.require(a.out, "--out");
  if (a.side != "src" && a.side != "tgt") throw ConfigError("--side must be src or tgt");
  ctx.manifest.add_input("data", a.data);
  const auto items = sentiment::load_labeled(a.data);
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (a.side == "src") {
      texts.push_back(items[i].source_text);
    } else {
      if (!items[i].target_text) throw InputError(a.data, 0, "item " + std::to_string(i + 1) + " has no second text");
      texts.push_back(*items[i].target_text);
    }
  }
  const auto t0 = Clock::now();
  const auto model = sentiment::bpe_train(texts, a.vocab_size);
  ctx.manifest.set_seconds("train", seconds_since(t0));
  ctx.manifest.set_count("texts", texts.size());
  ctx.manifest.set_count("alphabet", model.alphabet_size());
  ctx.manifest.set_count("merges", model.merges().size());
  ctx.write_output("bpe", a.out, [&](std::ostream& o) { sentiment::write_bpe(o, model); });
}

json grid_json(const sentiment::GridPoint& g, sentiment::ClassifierKind kind) {
  if (kind == sentiment::ClassifierKind::NaiveBayes) return {{"alpha", g.alpha}, {"dev_f1", g.dev_f1}};
  return {{"epochs", g.epochs}, {"l2", g.l2}, {"dev_f1", g.dev_f1}};
}

void sent_cv(Context& ctx, const SentArgs& a) {
  ctx.require(a.data, "--data");
  ctx.require(a.out, "--out");
  sentiment::CvConfig cfg;
  cfg.classifier = sentiment::parse_classifier(a.classifier);
  cfg.mode = sentiment::parse_mode(a.mode);
  cfg.folds = a.folds;
  cfg.ratios = parse_ratios(a.ratios);
  cfg.seed = ctx.globals.seed;
  cfg.bpe_vocab_size = a.vocab_size;
  cfg.lr_learning_rate = a.learning_rate;
  cfg.jobs = ctx.globals.jobs;
  ctx.manifest.add_input("data", a.data);
  std::optional<dictionary::BilingualDictionary> dict;
  if (!a.dict.empty()) {
    ctx.manifest.add_input("dictionary", a.dict);
    dict = dictionary::load_dictionary(a.dict, dictionary::parse_language_pair(a.lang_pair));
  }
  const auto items = sentiment::load_labeled(a.data);
  const auto t0 = Clock::now();
  const auto report = sentiment::cross_validate(items, cfg, dict ? &*dict : nullptr);
  ctx.manifest.set_seconds("cross_validation", seconds_since(t0));

  json folds = json::array();
  for (const auto& f : report.folds) {
    json trace = json::array();
    for (const auto& g : f.trace) trace.push_back(grid_json(g, cfg.classifier));
    folds.push_back({{"fold", f.fold},
                     {"train_size", f.train_size},
                     {"dev_size", f.dev_size},
                     {"test_size", f.test_size},
                     {"f1", f.f1},
                     {"macro_f1", f.macro_f1},
                     {"selected", grid_json(f.selected, cfg.classifier)},
                     {"bpe_merges", f.bpe_merges},
                     {"trace", trace}});
  }
  const json j = {{"classifier", sentiment::to_string(cfg.classifier)},
                  {"mode", sentiment::to_string(cfg.mode)},
                  {"folds", folds},
                  {"mean_f1", report.mean_f1},
                  {"mean_macro_f1", report.mean_macro_f1},
                  {"seed", cfg.seed}};
  ctx.manifest.set_count("items", items.size());
  ctx.manifest.set_result({{"mean_f1", report.mean_f1}, {"mean_macro_f1", report.mean_macro_f1}});
  const auto text = j.dump(2) + "\n";
  ctx.write_output("report", a.out, [&](std::ostream& o) { o << text; });
  ctx.out << json({{"mean_f1", report.mean_f1}, {"mean_macro_f1", report.mean_macro_f1}}).dump(2) << '\n';
}

// --- config file ----------------------------------------------------------------

std::map<std::string, std::string> read_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, i + 1, "expected key=value");
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw ParseError(path, i + 1, "empty key");
    kv[key] = value;
  }
  return kv;
}

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--") break;
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& key) {
  const auto flag = "--" + key;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

bool truthy(const std::string& v) {
  const auto l = text::lowercase(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'");
}

// Options that describe how a run executes rather than what it computes.
bool is_runtime_option(const std::string& name) {
  return name == "config" || name == "manifest" || name == "reproducible" || name == "jobs" || name == "help" ||
         name == "version";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parallel corpus mining, word-to-word translation, evaluation and sentiment experiments",
               "parmine"};
  app.fallthrough();
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(kVersion));

  Globals g;
  app.add_option("--config", g.config, "key=value file; command-line flags take precedence");
  app.add_option("--manifest", g.manifest, "Manifest path (default <out>.manifest.json)");
  app.add_flag("--reproducible", g.reproducible, "Omit timestamps, timings and worker count from the manifest");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Random seed");

  std::vector<Command> commands;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    auto* sub = parent->add_subcommand(name, help);
    sub->fallthrough();
    return sub;
  };

  // dict
  DictArgs dict_args;
  auto* dict = app.add_subcommand("dict", "Bilingual dictionary tools");
  dict->require_subcommand(1);
  dict->fallthrough();
  {
    auto* c = leaf(dict, "build", "Merge raw src<TAB>tgt rows into a dictionary");
    c->add_option("--input", dict_args.inputs, "Raw dictionary file (repeatable)");
    c->add_option("--lexicon", dict_args.lexicon, "Keep only targets in this word list");
    c->add_option("--lang-pair", dict_args.lang_pair, "Direction, e.g. min-id");
    c->add_option("--out", dict_args.out, "Output dictionary");
    commands.push_back({c, "dict build", [&](Context& x) { dict_build(x, dict_args); }});
  }
  {
    auto* c = leaf(dict, "filter", "Drop targets missing from a lexicon");
    c->add_option("--dict", dict_args.dict, "Dictionary");
    c->add_option("--lexicon", dict_args.lexicon, "Word list");
    c->add_option("--lang-pair", dict_args.lang_pair, "Direction, e.g. min-id");
    c->add_option("--out", dict_args.out, "Output dictionary");
    commands.push_back({c, "dict filter", [&](Context& x) { dict_filter(x, dict_args); }});
  }
  {
    auto* c = leaf(dict, "invert", "Target-to-source view");
    c->add_option("--dict", dict_args.dict, "Dictionary");
    c->add_option("--lang-pair", dict_args.lang_pair, "Direction of the input, e.g. min-id");
    c->add_option("--out", dict_args.out, "Output dictionary");
    commands.push_back({c, "dict invert", [&](Context& x) { dict_invert(x, dict_args); }});
  }
  {
    auto* c = leaf(dict, "stats", "Entry, pair and identity statistics");
    c->add_option("--dict", dict_args.dict, "Dictionary");
    c->add_option("--lang-pair", dict_args.lang_pair, "Direction, e.g. min-id");
    c->add_option("--out", dict_args.out, "Also write the JSON here");
    commands.push_back({c, "dict stats", [&](Context& x) { dict_stats(x, dict_args); }});
  }

  // w2w
  W2wArgs w2w_args;
  {
    auto* c = leaf(&app, "w2w", "Word-to-word translation, one sentence per line");
    c->add_option("--dict", w2w_args.dict, "Dictionary (source to target)");
    c->add_option("--input", w2w_args.input, "Source sentences");
    c->add_option("--out", w2w_args.out, "Translated sentences");
    c->add_option("--lang-pair", w2w_args.lang_pair, "Direction, e.g. min-id");
    c->add_option("--max-len", w2w_args.max_len, "Truncate sentences to this many tokens");
    c->add_flag("--no-truncate", w2w_args.no_truncate, "Keep full sentences");
    commands.push_back({c, "w2w", [&](Context& x) { w2w_run(x, w2w_args); }});
  }

  // mine
  MineArgs mine_args;
  auto* mine = app.add_subcommand("mine", "Parallel sentence mining");
  mine->require_subcommand(1);
  mine->fallthrough();
  auto add_segmenter = [&](CLI::App* c) {
    c->add_option("--abbreviations", mine_args.abbreviations, "Words that never end a sentence, one per line");
    c->add_option("--abbrev-max-len", mine_args.abbreviation_length,
                  "Treat words up to this length before '.' as abbreviations (0 = off)");
  };
  auto add_align = [&](CLI::App* c) {
    c->add_option("--src", mine_args.src, "Source documents (JSON lines)");
    c->add_option("--tgt", mine_args.tgt, "Target documents (JSON lines)");
    c->add_option("--dict", mine_args.dict, "Dictionary (source to target)");
    c->add_option("--lang-pair", mine_args.lang_pair, "Direction, e.g. min-id");
    c->add_option("--threshold", mine_args.threshold, "Minimum ROUGE-1 F1")->check(CLI::Range(0.0, 1.0));
    c->add_flag("--many-to-one", mine_args.many_to_one, "Let several sources share one target");
    c->add_option("--batch-size", mine_args.batch_size, "Document pairs per parallel batch")
        ->check(CLI::PositiveNumber);
    add_segmenter(c);
  };
  auto add_filter = [&](CLI::App* c) {
    c->add_option("--trigram-top", mine_args.trigram_top, "Number of most frequent trigrams to cap")
        ->check(CLI::PositiveNumber);
    c->add_option("--trigram-cap", mine_args.trigram_cap, "Maximum sentences per tracked trigram")
        ->check(CLI::PositiveNumber);
  };
  {
    auto* c = leaf(mine, "docs", "Pair documents by normalized title");
    c->add_option("--src", mine_args.src, "Source documents (JSON lines)");
    c->add_option("--tgt", mine_args.tgt, "Target documents (JSON lines)");
    c->add_option("--out", mine_args.out, "source_id<TAB>target_id<TAB>title");
    commands.push_back({c, "mine docs", [&](Context& x) { mine_docs(x, mine_args); }});
  }
  {
    auto* c = leaf(mine, "sents", "Align sentences of title-matched documents");
    add_align(c);
    c->add_option("--out", mine_args.out, "Thresholded pairs");
    commands.push_back({c, "mine sents", [&](Context& x) { mine_sents(x, mine_args, false); }});
  }
  {
    auto* c = leaf(mine, "filter", "Trigram diversity filter over aligned pairs");
    c->add_option("--input", mine_args.input, "Aligned pairs");
    c->add_option("--out", mine_args.out, "Filtered pairs");
    add_filter(c);
    commands.push_back({c, "mine filter", [&](Context& x) { mine_filter(x, mine_args); }});
  }
  {
    auto* c = leaf(mine, "all", "Documents, alignment and filtering in one pass");
    add_align(c);
    add_filter(c);
    c->add_option("--out", mine_args.out, "Final corpus");
    c->add_option("--thresholded-out", mine_args.thresholded_out, "Also write the pre-filter pairs");
    commands.push_back({c, "mine all", [&](Context& x) { mine_sents(x, mine_args, true); }});
  }

  // eval
  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Metrics");
  eval->require_subcommand(1);
  eval->fallthrough();
  auto add_pair = [&](CLI::App* c, bool bleu_defaults) {
    c->add_option("--hyp", eval_args.hyp, "Hypotheses, one per line");
    c->add_option("--ref", eval_args.ref, "References, one per line");
    c->add_flag("--lowercase", eval_args.text.lowercase, "Case-fold before scoring");
    c->add_flag("--no-tokenize", eval_args.text.no_tokenize, "Split on whitespace only");
    if (bleu_defaults) {
      c->add_option("--max-len", eval_args.text.max_len, "Truncate sentences to this many tokens");
      c->add_flag("--no-truncate", eval_args.text.no_truncate, "Keep full sentences");
    }
    c->add_option("--out", eval_args.out, "Also write the JSON here");
  };
  {
    auto* c = leaf(eval, "bleu", "Corpus BLEU");
    add_pair(c, true);
    commands.push_back({c, "eval bleu", [&](Context& x) { eval_bleu(x, eval_args); }});
  }
  {
    auto* c = leaf(eval, "rouge", "Mean sentence ROUGE-1");
    add_pair(c, false);
    commands.push_back({c, "eval rouge", [&](Context& x) { eval_rouge(x, eval_args); }});
  }
  {
    auto* c = leaf(eval, "stats", "Corpus statistics of two sides");
    c->add_option("--a", eval_args.side_a, "First side, one sentence per line");
    c->add_option("--b", eval_args.side_b, "Second side, one sentence per line");
    c->add_option("--out", eval_args.out, "Also write the JSON here");
    commands.push_back({c, "eval stats", [&](Context& x) { eval_stats(x, eval_args); }});
  }
  {
    auto* c = leaf(eval, "judge", "Summarize two annotators' 1-5 scores");
    c->add_option("--scores", eval_args.scores, "Two whitespace-separated scores per line");
    c->add_option("--out", eval_args.out, "Also write the JSON here");
    commands.push_back({c, "eval judge", [&](Context& x) { eval_judge(x, eval_args); }});
  }

  // sent
  SentArgs sent_args;
  auto* sent = app.add_subcommand("sent", "Sentiment experiments");
  sent->require_subcommand(1);
  sent->fallthrough();
  {
    auto* c = leaf(sent, "bpe", "Learn a BPE merge table");
    c->add_option("--data", sent_args.data, "Labeled TSV");
    c->add_option("--side", sent_args.side, "Text column to learn from: src or tgt");
    c->add_option("--vocab-size", sent_args.vocab_size, "Alphabet plus merges")->check(CLI::PositiveNumber);
    c->add_option("--out", sent_args.out, "Merge table");
    commands.push_back({c, "sent bpe", [&](Context& x) { sent_bpe(x, sent_args); }});
  }
  {
    auto* c = leaf(sent, "cv", "Stratified k-fold cross-validation");
    c->add_option("--data", sent_args.data, "Labeled TSV");
    c->add_option("--classifier", sent_args.classifier, "nb or lr");
    c->add_option("--mode", sent_args.mode,
                  "train-src/test-tgt, train-src/test-w2w, train-tgt/test-tgt or train-src/test-src");
    c->add_option("--folds", sent_args.folds, "Number of folds")->check(CLI::PositiveNumber);
    c->add_option("--ratios", sent_args.ratios, "train/dev/test proportions");
    c->add_option("--vocab-size", sent_args.vocab_size, "BPE alphabet plus merges")->check(CLI::PositiveNumber);
    c->add_option("--learning-rate", sent_args.learning_rate, "Logistic regression step size");
    c->add_option("--dict", sent_args.dict, "Dictionary from the test language into the training language");
    c->add_option("--lang-pair", sent_args.lang_pair, "Direction of --dict");
    c->add_option("--out", sent_args.out, "JSON report");
    commands.push_back({c, "sent cv", [&](Context& x) { sent_cv(x, sent_args); }});
  }

  auto fail = [&](int code, const std::string& message) {
    err << "parmine: error: " << single_line(message) << '\n';
    if (code == kUsageError) err << "Run with --help for more information.\n";
    return code;
  };

  try {
    // Config values become trailing flags for keys not set on the command line.
    auto full = args;
    std::map<std::string, std::string> config;
    const auto config_path = find_config_path(args);
    if (!config_path.empty()) config = read_config(config_path);

    // Parse once to learn the subcommand, so flag-typed keys can be told apart.
    std::vector<std::string> probe(args.rbegin(), args.rend());
    app.parse(probe);

    const Command* chosen = nullptr;
    for (const auto& c : commands) {
      if (c.app->parsed()) chosen = &c;
    }
    if (chosen == nullptr) throw CLI::RequiredError("a subcommand");

    if (!config.empty()) {
      for (const auto& [key, value] : config) {
        if (is_runtime_option(key) && key != "jobs") {
          throw ConfigError("'" + key + "' cannot be set from a config file");
        }
        if (given_on_command_line(args, key)) continue;
        CLI::Option* opt = chosen->app->get_option_no_throw("--" + key);
        if (opt == nullptr) opt = app.get_option_no_throw("--" + key);
        if (opt == nullptr) throw ConfigError("unknown config key '" + key + "' for " + chosen->name);
        if (opt->get_expected_max() == 0) {
          if (truthy(value)) full.push_back("--" + key);
        } else {
          full.push_back("--" + key);
          full.push_back(value);
        }
      }
      app.clear();
      std::vector<std::string> again(full.rbegin(), full.rend());
      app.parse(again);
    }

    Context ctx{out, err, g, Manifest(chosen->name)};
    ctx.manifest.set_seed(g.seed);
    ctx.manifest.set_jobs(g.jobs);
    for (const auto* owner : {static_cast<const CLI::App*>(&app), static_cast<const CLI::App*>(chosen->app)}) {
      for (const auto* opt : owner->get_options()) {
        const auto name = opt->get_single_name();
        if (name.empty() || is_runtime_option(name) || name == "seed") continue;
        std::string value;
        if (opt->get_expected_max() == 0) {
          value = opt->count() > 0 ? "true" : "false";
        } else if (opt->count() > 0) {
          for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
          value = opt->get_default_str();
        }
        ctx.manifest.set_config(name, value);
      }
    }
    if (!config_path.empty()) ctx.manifest.add_input("config", config_path);

    chosen->handler(ctx);

    std::string manifest_path = g.manifest;
    if (manifest_path.empty()) {
      const auto* opt = chosen->app->get_option_no_throw("--out");
      if (opt != nullptr && opt->count() > 0) manifest_path = opt->results().front() + ".manifest.json";
    }
    if (!manifest_path.empty()) ctx.manifest.write(manifest_path, !g.reproducible);
    return kOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(kUsageError, e.what());
  } catch (const ConfigError& e) {
    return fail(kUsageError, e.what());
  } catch (const InvalidArgument& e) {
    return fail(kUsageError, e.what());
  } catch (const InputError& e) {
    return fail(kInputError, e.what());
  } catch (const std::exception& e) {
    return fail(kInputError, e.what());
  }
}

}  // namespace parmine::cli
