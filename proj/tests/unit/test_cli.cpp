#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "cli.hpp"
#include "manifest.hpp"
#include "doctest.h"
#include "parmine/corpus_io.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = parmine::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("parmine_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string file(const std::string& name, const std::string& content) {
  const auto p = workdir() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  auto r = cli({"eval", "bleu", "--bogus"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("parmine: error: ", 0) == 0);
  CHECK(cli({"eval", "bleu"}).code == 2);
  CHECK(cli({"mine", "all", "--threshold", "2"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"--version"}).code == 0);
}

TEST_CASE("eval bleu against itself") {
  const auto h = file("h.txt", "Kucing makan ikan di rumah .\nAnjing tidur lelap sekali malam ini .\n");
  auto r = cli({"eval", "bleu", "--hyp", h, "--ref", h});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["bleu"].get<double>() == 100.0);
  CHECK(j["bp"].get<double>() == 1.0);
  CHECK(j["hyp_len"] == j["ref_len"]);
  CHECK(j["precisions"].size() == 4);
}

TEST_CASE("eval bleu reports mismatched files as input errors") {
  const auto a = file("a.txt", "x y z w\n");
  const auto b = file("b.txt", "x y z w\nq\n");
  auto r = cli({"eval", "bleu", "--hyp", a, "--ref", b});
  CHECK(r.code == 1);
  CHECK(r.err.find(a) != std::string::npos);
}

TEST_CASE("dict filter with a missing lexicon names the file") {
  const auto d = file("d.tsv", "karambia\tkelapa\n");
  const auto missing = path("missing.txt");
  auto r = cli({"dict", "filter", "--dict", d, "--lexicon", missing, "--out", path("f.tsv")});
  CHECK(r.code == 1);
  CHECK(r.err.find(missing) != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK_FALSE(fs::exists(path("f.tsv")));
}

TEST_CASE("malformed dictionary reports file and line") {
  const auto d = file("bad.tsv", "a\tb\nbroken\n");
  auto r = cli({"dict", "stats", "--dict", d});
  CHECK(r.code == 1);
  CHECK(r.err.find(d + ":2:") != std::string::npos);
}

TEST_CASE("dict build, invert and stats") {
  const auto raw1 = file("raw1.tsv", "ibunyo\tibunya\nKarambia\tkelapa\n");
  const auto raw2 = file("raw2.tsv", "mandehnyo\tibunya\nibunyo\tibunya\n");
  auto r = cli({"dict", "build", "--input", raw1, "--input", raw2, "--out", path("built.tsv")});
  REQUIRE(r.code == 0);
  CHECK(slurp(path("built.tsv")) == "ibunyo\tibunya\nkarambia\tkelapa\nmandehnyo\tibunya\n");
  const auto manifest = json::parse(slurp(path("built.tsv") + ".manifest.json"));
  CHECK(manifest["command"] == "dict build");
  CHECK(manifest["counts"]["entries"] == 3);
  CHECK(manifest["inputs"].size() == 2);
  CHECK(manifest["schema_version"] == 1);

  r = cli({"dict", "invert", "--dict", path("built.tsv"), "--out", path("inv.tsv")});
  REQUIRE(r.code == 0);
  CHECK(slurp(path("inv.tsv")) == "ibunya\tibunyo|mandehnyo\nkelapa\tkarambia\n");

  r = cli({"dict", "stats", "--dict", path("built.tsv")});
  REQUIRE(r.code == 0);
  const auto s = json::parse(r.out);
  CHECK(s["entries"] == 3);
  CHECK(s["targets_with_multiple_sources"] == 1);
}

TEST_CASE("w2w writes translations and an OOV summary") {
  const auto d = file("w.tsv", "karambia\tkelapa\n");
  const auto in = file("w_in.txt", "karambia !\ntamasuak\n\n");
  auto r = cli({"w2w", "--dict", d, "--input", in, "--out", path("w_out.txt")});
  REQUIRE(r.code == 0);
  CHECK(slurp(path("w_out.txt")) == "kelapa !\ntamasuak\n\n");
  const auto j = json::parse(r.out);
  CHECK(j["words"] == 2);
  CHECK(j["oov"] == 1);
  CHECK(j["oov_rate"].get<double>() == 0.5);
}

TEST_CASE("config file values yield to flags") {
  const auto h = file("c_h.txt", "a b c d e\n");
  const auto rf = file("c_r.txt", "A b c d e\n");
  const auto cfg = file("c.cfg", "# eval settings\nlowercase = true\nmax-len=3\n");
  auto r = cli({"--config", cfg, "eval", "bleu", "--hyp", h, "--ref", rf, "--out", path("c.json")});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["hyp_len"] == 3);
  auto m = json::parse(slurp(path("c.json.manifest.json")));
  CHECK(m["config"]["max-len"] == "3");
  CHECK(m["config"]["lowercase"] == "true");

  r = cli({"--config", cfg, "eval", "bleu", "--hyp", h, "--ref", rf, "--max-len", "5"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["hyp_len"] == 5);

  const auto bad = file("bad.cfg", "no-such-key=1\n");
  CHECK(cli({"--config", bad, "eval", "bleu", "--hyp", h, "--ref", rf}).code == 2);
  const auto malformed = file("malformed.cfg", "justakey\n");
  r = cli({"--config", malformed, "eval", "bleu", "--hyp", h, "--ref", rf});
  CHECK(r.code == 1);
  CHECK(r.err.find(malformed + ":1:") != std::string::npos);
}

TEST_CASE("eval stats, rouge and judge") {
  const auto a = file("sa.txt", "Ab cd.\nx\n");
  const auto b = file("sb.txt", "cd x\n");
  auto r = cli({"eval", "stats", "--a", a, "--b", b});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["overlapping_vocab"] == 2);

  r = cli({"eval", "rouge", "--hyp", a, "--ref", a});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["rouge1_f1"].get<double>() == 1.0);

  const auto scores = file("judge.tsv", "5\t4\n4\t5\n");
  r = cli({"eval", "judge", "--scores", scores});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["mean"].get<double>() == 4.5);

  const auto bad = file("judge_bad.tsv", "5\t4\n9\t5\n");
  r = cli({"eval", "judge", "--scores", bad});
  CHECK(r.code == 1);
  CHECK(r.err.find(bad + ":2:") != std::string::npos);
}

TEST_CASE("mine stages compose to mine all") {
  const auto c = synth::make_comparable_corpus(4, 6);
  std::ofstream src(path("m_src.jsonl")), tgt(path("m_tgt.jsonl")), dict(path("m_dict.tsv"));
  for (const auto& d : c.source_docs) parmine::io::write_document(src, d);
  for (const auto& d : c.target_docs) parmine::io::write_document(tgt, d);
  parmine::dictionary::write_dictionary(dict, c.dict);
  src.close();
  tgt.close();
  dict.close();

  auto r = cli({"mine", "docs", "--src", path("m_src.jsonl"), "--tgt", path("m_tgt.jsonl"), "--out",
                path("m_docs.tsv")});
  REQUIRE(r.code == 0);
  CHECK(json::parse(slurp(path("m_docs.tsv.manifest.json")))["counts"]["document_pairs"] == 6);

  r = cli({"mine", "sents", "--src", path("m_src.jsonl"), "--tgt", path("m_tgt.jsonl"), "--dict",
           path("m_dict.tsv"), "--out", path("m_sents.tsv")});
  REQUIRE(r.code == 0);
  r = cli({"mine", "filter", "--input", path("m_sents.tsv"), "--out", path("m_filtered.tsv"), "--trigram-cap",
           "100"});
  REQUIRE(r.code == 0);
  r = cli({"mine", "all", "--src", path("m_src.jsonl"), "--tgt", path("m_tgt.jsonl"), "--dict",
           path("m_dict.tsv"), "--threshold", "0.5", "--trigram-top", "1000", "--trigram-cap", "100", "--out",
           path("m_all.tsv"), "--reproducible"});
  REQUIRE(r.code == 0);
  CHECK(slurp(path("m_all.tsv")) == slurp(path("m_filtered.tsv")));
  CHECK(parmine::io::load_pairs(path("m_all.tsv")).size() == 60);
  const auto m = json::parse(slurp(path("m_all.tsv.manifest.json")));
  CHECK(m["counts"]["final_pairs"] == 60);
  CHECK_FALSE(m.contains("runtime"));
  CHECK(m["config"]["threshold"] == "0.5");
}

TEST_CASE("sent bpe and cv") {
  const auto c = synth::make_sentiment_corpus(9, synth::separable_options(200));
  std::ofstream data(path("s.tsv"));
  for (const auto& it : c.items) {
    data << (it.label == parmine::sentiment::Label::Positive ? "positive" : "negative") << '\t'
         << it.source_text << '\t' << *it.target_text << '\n';
  }
  data.close();
  auto r = cli({"sent", "bpe", "--data", path("s.tsv"), "--vocab-size", "300", "--out", path("s.bpe")});
  REQUIRE(r.code == 0);
  r = cli({"--seed", "3", "sent", "cv", "--data", path("s.tsv"), "--mode", "train-src/test-src", "--classifier",
           "lr", "--vocab-size", "300", "--out", path("cv.json")});
  REQUIRE(r.code == 0);
  const auto j = json::parse(slurp(path("cv.json")));
  CHECK(j["folds"].size() == 5);
  CHECK(j["folds"][0]["trace"].size() == 9);
  CHECK(j["mean_f1"].get<double>() >= 0.99);
  CHECK(j["seed"] == 3);

  r = cli({"sent", "cv", "--data", path("s.tsv"), "--mode", "train-src/test-w2w", "--out", path("cv2.json")});
  CHECK(r.code == 2);
  r = cli({"sent", "cv", "--data", path("s.tsv"), "--ratios", "60/20/20", "--out", path("cv3.json")});
  CHECK(r.code == 0);
  r = cli({"sent", "cv", "--data", path("s.tsv"), "--ratios", "70/20/10", "--out", path("cv4.json")});
  CHECK(r.code == 2);
}

TEST_CASE("write_atomic keeps the old file when filling fails") {
  const auto target = file("atomic.txt", "old\n");
  CHECK_THROWS_AS(parmine::cli::write_atomic(target,
                                             [](std::ostream& o) {
                                               o << "partial";
                                               throw std::runtime_error("boom");
                                             }),
                  std::runtime_error);
  CHECK(slurp(target) == "old\n");
  for (const auto& e : fs::directory_iterator(workdir())) {
    CHECK(e.path().filename().string().find(".tmp.") == std::string::npos);
  }
  parmine::cli::write_atomic(target, [](std::ostream& o) { o << "new\n"; });
  CHECK(slurp(target) == "new\n");
}
