#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "sockverif/cli.hpp"
#include "sockverif/errors.hpp"
#include "sockverif/eval.hpp"
#include "sockverif/synth.hpp"
#include "sockverif/treebank.hpp"

using namespace sockverif;

namespace {

std::string render_jsonl(const Corpus& corpus) {
  std::ostringstream out;
  write_corpus_jsonl(corpus, out);
  return out.str();
}

void collect_leaves(const ParseTree& node, std::vector<std::string>& out) {
  if (node.is_leaf()) {
    out.push_back(node.token);
    return;
  }
  for (const ParseTree& child : node.children) collect_leaves(child, out);
}

double mean_macro_f1(const Corpus& corpus, std::uint64_t seed) {
  ProtocolConfig protocol;
  protocol.protocol = Protocol::InTraining;
  protocol.diversity = 1.0;
  ExperimentOptions options;
  options.space = FeatureSpaceKind::LexicalPtf;
  options.threads = 1;
  ExperimentResult result = run_experiment(corpus, protocol, options, seed);
  return result.rows[0].averaged.f1;
}

Corpus permute_author_labels(const Corpus& corpus, std::uint64_t seed) {
  std::vector<Document> docs = corpus.documents();
  std::vector<std::string> labels;
  labels.reserve(docs.size());
  for (const Document& d : docs) labels.push_back(d.author);
  std::mt19937 gen(static_cast<std::uint32_t>(seed));
  std::shuffle(labels.begin(), labels.end(), gen);
  for (std::size_t i = 0; i < docs.size(); ++i) docs[i].author = labels[i];
  return Corpus::from_documents(std::move(docs));
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sockverif");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("sockverif-test-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("generation is reproducible byte for byte") {
  SynthSpec spec;
  spec.n_authors = 3;
  spec.docs_per_author_per_domain = 4;
  spec.domains = {Domain::Hotel};
  spec.separation = 0.5;
  spec.seed = 42;

  std::string first = render_jsonl(generate_corpus(spec));
  CHECK(render_jsonl(generate_corpus(spec)) == first);

  SynthSpec reseeded = spec;
  reseeded.seed = 43;
  CHECK(render_jsonl(generate_corpus(reseeded)) != first);

  SynthSpec tighter = spec;
  tighter.separation = 0.6;
  CHECK(render_jsonl(generate_corpus(tighter)) != first);
}

TEST_CASE("generated corpora have the requested shape") {
  SynthSpec spec;
  spec.n_authors = 3;
  spec.docs_per_author_per_domain = 4;
  spec.domains = {Domain::Hotel, Domain::Restaurant};
  spec.separation = 0.4;
  spec.min_sentences = 2;
  spec.max_sentences = 5;
  spec.seed = 7;
  Corpus corpus = generate_corpus(spec);

  CHECK(corpus.documents().size() == 24);
  CHECK(corpus.authors() == std::vector<std::string>{"a01", "a02", "a03"});

  std::map<std::pair<std::string, Domain>, int> cells;
  std::map<std::pair<std::string, Domain>, int> positives;
  for (const Document& doc : corpus.documents()) {
    ++cells[{doc.author, doc.domain}];
    if (doc.polarity == Polarity::Positive) ++positives[{doc.author, doc.domain}];
    CHECK((doc.domain == Domain::Hotel || doc.domain == Domain::Restaurant));

    REQUIRE(doc.parses.size() >= 2);
    REQUIRE(doc.parses.size() <= 5);
    std::vector<std::string> leaves;
    for (const std::string& parse : doc.parses) {
      ParseTree tree = parse_bracketed(parse);  // parses must be well-formed
      collect_leaves(tree, leaves);
    }
    CHECK(doc.tokens == leaves);
  }
  CHECK(cells.size() == 6);
  for (const auto& [cell, count] : cells) CHECK(count == 4);
  for (const auto& [cell, count] : positives) CHECK(count == 2);
}

TEST_CASE("out-of-range generator settings are rejected") {
  SynthSpec ok;
  ok.n_authors = 2;
  ok.docs_per_author_per_domain = 1;
  CHECK_NOTHROW(generate_corpus(ok));

  SynthSpec bad = ok;
  bad.n_authors = 1;
  CHECK_THROWS_AS(generate_corpus(bad), InvalidSpec);
  bad = ok;
  bad.docs_per_author_per_domain = 0;
  CHECK_THROWS_AS(generate_corpus(bad), InvalidSpec);
  bad = ok;
  bad.domains.clear();
  CHECK_THROWS_AS(generate_corpus(bad), InvalidSpec);
  bad = ok;
  bad.separation = -0.1;
  CHECK_THROWS_AS(generate_corpus(bad), InvalidSpec);
  bad = ok;
  bad.separation = 1.1;
  CHECK_THROWS_AS(generate_corpus(bad), InvalidSpec);
  bad = ok;
  bad.min_sentences = 0;
  CHECK_THROWS_AS(generate_corpus(bad), InvalidSpec);
  bad = ok;
  bad.min_sentences = 6;
  bad.max_sentences = 5;
  CHECK_THROWS_AS(generate_corpus(bad), InvalidSpec);
  bad = ok;
  bad.lexical_vocab = 10;
  CHECK_THROWS_AS(generate_corpus(bad), InvalidSpec);
}

TEST_CASE("zero separation carries no author signal") {
  SynthSpec spec;
  spec.n_authors = 3;
  spec.docs_per_author_per_domain = 12;
  spec.domains = {Domain::Hotel};
  spec.separation = 0.0;

  double real_sum = 0.0;
  double permuted_sum = 0.0;
  const std::uint64_t seeds[] = {11, 12, 13};
  for (std::uint64_t seed : seeds) {
    spec.seed = seed;
    Corpus corpus = generate_corpus(spec);
    real_sum += mean_macro_f1(corpus, 1);
    permuted_sum += mean_macro_f1(permute_author_labels(corpus, seed), 1);
  }
  double real = real_sum / 3.0;
  double permuted = permuted_sum / 3.0;
  // at zero separation the authorship labels are exchangeable, so scores on
  // the real labeling must sit within noise of a random relabeling
  CHECK(std::fabs(real - permuted) <= 0.15);
}

TEST_CASE("high separation beats a random relabeling") {
  SynthSpec spec;
  spec.n_authors = 3;
  spec.docs_per_author_per_domain = 12;
  spec.domains = {Domain::Hotel};
  spec.separation = 0.95;
  spec.seed = 11;
  Corpus corpus = generate_corpus(spec);
  double real = mean_macro_f1(corpus, 1);
  double permuted = mean_macro_f1(permute_author_labels(corpus, 11), 1);
  CHECK(real - permuted >= 0.15);
}

TEST_CASE("the command line drives generation and inspection") {
  TempDir dir;
  std::string corpus_path = dir.file("corpus.jsonl");
  CHECK(cli({"synth", "--out", corpus_path, "--authors", "3", "--docs-per-domain", "4",
             "--domains", "hotel", "--separation", "0.5", "--seed", "9"}) == 0);
  Corpus corpus = load_corpus(corpus_path);
  CHECK(corpus.documents().size() == 12);
  CHECK(corpus.authors().size() == 3);

  std::string summary_path = dir.file("summary.txt");
  CHECK(cli({"inspect", "--corpus", corpus_path, "--out", summary_path}) == 0);
  std::string summary = slurp(summary_path);
  CHECK(summary.find("documents: 12") != std::string::npos);
  CHECK(summary.find("authors: 3") != std::string::npos);
  CHECK(summary.find("domain hotel: 12") != std::string::npos);

  std::string vocab_path = dir.file("vocab.csv");
  CHECK(cli({"inspect", "--corpus", corpus_path, "--vocab-out", vocab_path, "--out",
             dir.file("s2.txt")}) == 0);
  CHECK(!slurp(vocab_path).empty());
}

TEST_CASE("bad command lines fail with the usage status") {
  TempDir dir;
  std::string ghost = dir.file("never.jsonl");
  CHECK(cli({"synth", "--bogus-flag", "--out", ghost}) == 2);
  CHECK_FALSE(std::filesystem::exists(ghost));
  CHECK(cli({}) == 2);
  CHECK(cli({"inspect", "--corpus", dir.file("missing.jsonl")}) == 1);
  CHECK(cli({"crossdomain", "--corpus", ghost}) == 2);  // --test-domain is required
}

TEST_CASE("analysis runs are reproducible through the command line") {
  TempDir dir;
  std::string corpus_path = dir.file("corpus.jsonl");
  REQUIRE(cli({"synth", "--out", corpus_path, "--authors", "5", "--docs-per-domain", "8",
               "--domains", "hotel", "--separation", "0.8", "--seed", "3"}) == 0);

  std::string first_path = dir.file("a.csv");
  std::string second_path = dir.file("b.csv");
  std::vector<std::string> base = {"features",  "--corpus", corpus_path,
                                   "--delta",   "0.75",     "--classifiers",
                                   "lr",        "--spaces", "lexical,lexical-dkl-ptf",
                                   "--seed",    "19",       "--threads",
                                   "1"};
  std::vector<std::string> first_args = base;
  first_args.insert(first_args.end(), {"--out", first_path});
  std::vector<std::string> second_args = base;
  second_args.insert(second_args.end(), {"--out", second_path});

  REQUIRE(cli(first_args) == 0);
  REQUIRE(cli(second_args) == 0);
  std::string first = slurp(first_path);
  CHECK(first == slurp(second_path));
  CHECK(first.rfind("system,classifier,delta_or_lambda,author,", 0) == 0);
  CHECK(first.find("lexical,lr,0.75,") != std::string::npos);
  CHECK(first.find("lexical-dkl-ptf,lr,0.75,") != std::string::npos);
  // two spaces, each with one line per author plus the average
  CHECK(std::count(first.begin(), first.end(), '\n') == 1 + 2 * (5 + 1));
}
