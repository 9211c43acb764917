#include "sockverif/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sockverif/errors.hpp"
#include "sockverif/rng.hpp"

namespace sockverif {

namespace {

using nlohmann::json;

bool is_word_char(unsigned char c) {
  // non-ASCII bytes count as word characters so UTF-8 words stay intact
  return std::isalnum(c) || c >= 0x80;
}

std::vector<int> sorted_by_id(const Corpus& corpus, std::vector<int> idx) {
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return corpus.doc(a).id < corpus.doc(b).id; });
  return idx;
}

// The author's documents shuffled under a purpose-specific sub-stream.
std::vector<int> shuffled_docs(const Corpus& corpus, const std::string& author,
                               std::uint64_t seed, const std::string& tag) {
  std::vector<int> idx = corpus.docs_of(author);
  Rng rng(derive_seed(seed, tag + "/" + author));
  rng.shuffle(idx);
  return idx;
}

// Seeded permutation of every author except `target`. Diversity subsets are
// prefixes of this permutation, which keeps them nested across fractions.
std::vector<std::string> negative_author_order(const Corpus& corpus, const std::string& target,
                                               std::uint64_t seed) {
  std::vector<std::string> others;
  for (const std::string& a : corpus.authors()) {
    if (a != target) others.push_back(a);
  }
  Rng rng(derive_seed(seed, "neg-authors/" + target));
  rng.shuffle(others);
  return others;
}

// Balanced negative sample: cycle through the chosen authors in order,
// drawing the next document from each author's seeded shuffle until `count`
// documents are drawn. Exhausted authors are skipped.
std::vector<int> balanced_negative_sample(const Corpus& corpus,
                                          const std::vector<std::string>& chosen,
                                          std::size_t count, std::uint64_t seed,
                                          const std::string& tag,
                                          const std::vector<bool>* allowed) {
  std::vector<std::vector<int>> pools;
  pools.reserve(chosen.size());
  for (const std::string& author : chosen) {
    std::vector<int> docs = shuffled_docs(corpus, author, seed, tag);
    if (allowed != nullptr) {
      std::erase_if(docs, [&](int d) { return !(*allowed)[static_cast<std::size_t>(d)]; });
    }
    pools.push_back(std::move(docs));
  }
  std::vector<int> sample;
  std::vector<std::size_t> next(pools.size(), 0);
  bool progress = true;
  while (sample.size() < count && progress) {
    progress = false;
    for (std::size_t i = 0; i < pools.size() && sample.size() < count; ++i) {
      if (next[i] < pools[i].size()) {
        sample.push_back(pools[i][next[i]++]);
        progress = true;
      }
    }
  }
  return sample;
}

// Fold membership by seeded shuffle then round-robin; fold `f` is the test
// share, the rest train.
void positive_folds(const Corpus& corpus, const std::string& author, std::uint64_t seed, int fold,
                    const std::vector<bool>* allowed, std::vector<int>& train_pos,
                    std::vector<int>& test_pos) {
  std::vector<int> idx = sorted_by_id(corpus, corpus.docs_of(author));
  if (allowed != nullptr) {
    std::erase_if(idx, [&](int d) { return !(*allowed)[static_cast<std::size_t>(d)]; });
  }
  Rng rng(derive_seed(seed, "pos-folds/" + author));
  rng.shuffle(idx);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (static_cast<int>(i % kFoldCount) == fold) {
      test_pos.push_back(idx[i]);
    } else {
      train_pos.push_back(idx[i]);
    }
  }
}

void require_author(const Corpus& corpus, const std::string& author) {
  if (!corpus.has_author(author)) throw UnknownAuthor(author);
}

void require_fold(int fold) {
  if (fold < 0 || fold >= kFoldCount) throw Error("fold index out of range");
}

Document parse_record(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw MalformedRecord(line_no, e.what());
  }
  if (!j.is_object()) throw MalformedRecord(line_no, "record is not an object");
  for (const char* field : {"id", "author", "domain", "polarity", "text"}) {
    if (!j.contains(field) || !j[field].is_string()) {
      throw MalformedRecord(line_no, std::string("missing string field '") + field + "'");
    }
  }
  Document doc;
  doc.id = j["id"].get<std::string>();
  doc.author = j["author"].get<std::string>();
  doc.domain = parse_domain(j["domain"].get<std::string>());
  std::string pol = j["polarity"].get<std::string>();
  if (pol == "pos") {
    doc.polarity = Polarity::Positive;
  } else if (pol == "neg") {
    doc.polarity = Polarity::Negative;
  } else {
    throw MalformedRecord(line_no, "polarity must be \"pos\" or \"neg\"");
  }
  if (doc.id.empty() || doc.author.empty()) {
    throw MalformedRecord(line_no, "id and author must be non-empty");
  }
  doc.tokens = tokenize(j["text"].get<std::string>());
  if (doc.tokens.empty()) throw MalformedRecord(line_no, "text yields no tokens");
  if (j.contains("parses")) {
    if (!j["parses"].is_array()) throw MalformedRecord(line_no, "parses must be an array");
    for (const auto& p : j["parses"]) {
      if (!p.is_string()) throw MalformedRecord(line_no, "parses entries must be strings");
      doc.parses.push_back(p.get<std::string>());
    }
  }
  return doc;
}

}  // namespace

Domain parse_domain(std::string_view name) {
  if (name == "hotel") return Domain::Hotel;
  if (name == "restaurant") return Domain::Restaurant;
  if (name == "product") return Domain::Product;
  return Domain::Other;
}

const char* domain_name(Domain d) {
  switch (d) {
    case Domain::Hotel: return "hotel";
    case Domain::Restaurant: return "restaurant";
    case Domain::Product: return "product";
    case Domain::Other: return "other";
  }
  return "other";
}

Corpus Corpus::from_documents(std::vector<Document> docs) {
  Corpus corpus;
  corpus.docs_ = std::move(docs);
  std::set<std::string> ids;
  std::set<std::string> authors;
  for (std::size_t i = 0; i < corpus.docs_.size(); ++i) {
    const Document& d = corpus.docs_[i];
    if (!ids.insert(d.id).second) throw DuplicateId(d.id);
    authors.insert(d.author);
    corpus.by_author_[d.author].push_back(static_cast<int>(i));
  }
  corpus.authors_.assign(authors.begin(), authors.end());
  for (auto& [author, idx] : corpus.by_author_) {
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return corpus.docs_[static_cast<std::size_t>(a)].id <
             corpus.docs_[static_cast<std::size_t>(b)].id;
    });
  }
  return corpus;
}

bool Corpus::has_author(const std::string& author) const {
  return by_author_.find(author) != by_author_.end();
}

std::vector<int> Corpus::docs_of(const std::string& author) const {
  auto it = by_author_.find(author);
  if (it == by_author_.end()) return {};
  return it->second;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_char(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      if (!current.empty()) {
        tokens.push_back(current);
        current.clear();
      }
      if (!std::isspace(c)) tokens.emplace_back(1, static_cast<char>(c));
    }
  }
  if (!current.empty()) tokens.push_back(current);
  return tokens;
}

Corpus read_corpus_jsonl(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    docs.push_back(parse_record(line, line_no));
  }
  return Corpus::from_documents(std::move(docs));
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path);
  return read_corpus_jsonl(in);
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const Document& d : corpus.documents()) {
    json j;
    j["id"] = d.id;
    j["author"] = d.author;
    j["domain"] = domain_name(d.domain);
    j["polarity"] = d.polarity == Polarity::Positive ? "pos" : "neg";
    std::string text;
    for (std::size_t i = 0; i < d.tokens.size(); ++i) {
      if (i > 0) text += ' ';
      text += d.tokens[i];
    }
    j["text"] = text;
    j["parses"] = d.parses;
    out << j.dump() << '\n';
  }
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus file: " + path);
  write_corpus_jsonl(corpus, out);
}

Split split_in_training(const Corpus& corpus, const std::string& author, double lambda, int fold,
                        std::uint64_t seed) {
  require_author(corpus, author);
  require_fold(fold);
  if (lambda <= 0.0 || lambda > 1.0) throw Error("lambda must be in (0, 1]");
  if (corpus.docs_of(author).size() < kFoldCount) {
    throw TooFewPositives("author " + author + " has fewer than 5 documents");
  }

  std::vector<std::string> order = negative_author_order(corpus, author, seed);
  std::size_t chosen_count = static_cast<std::size_t>(lambda * static_cast<double>(order.size()));
  if (chosen_count == 0) throw Error("lambda selects no negative authors");
  std::vector<std::string> chosen(order.begin(), order.begin() + static_cast<long>(chosen_count));

  Split split;
  split.target_author = author;
  split.protocol = Protocol::InTraining;
  split.diversity = lambda;
  split.fold = fold;
  positive_folds(corpus, author, seed, fold, nullptr, split.train_pos, split.test_pos);

  std::string tag = "neg-docs/f" + std::to_string(fold);
  split.train_neg =
      balanced_negative_sample(corpus, chosen, split.train_pos.size(), seed, tag, nullptr);

  std::set<int> in_train(split.train_neg.begin(), split.train_neg.end());
  for (const std::string& neg : chosen) {
    for (int d : corpus.docs_of(neg)) {
      if (!in_train.count(d)) split.test_neg.push_back(d);
    }
  }
  std::sort(split.test_neg.begin(), split.test_neg.end());
  return split;
}

std::pair<Split, Split> split_balanced_scenarios(const Corpus& corpus, const std::string& author,
                                                 std::uint64_t seed) {
  require_author(corpus, author);
  std::vector<int> own = corpus.docs_of(author);
  if (own.size() < 4) throw TooFewPositives("author " + author + " has fewer than 4 documents");

  std::vector<int> shuffled = shuffled_docs(corpus, author, seed, "balanced-half");
  std::size_t half = shuffled.size() / 2;
  std::vector<int> pos(shuffled.begin(), shuffled.begin() + static_cast<long>(half));
  std::vector<int> s1_neg(shuffled.begin() + static_cast<long>(half),
                          shuffled.begin() + static_cast<long>(2 * half));

  // S2 negatives: uniform sample of other authors' documents, same size as P.
  std::vector<int> others;
  for (std::size_t i = 0; i < corpus.documents().size(); ++i) {
    if (corpus.documents()[i].author != author) others.push_back(static_cast<int>(i));
  }
  std::sort(others.begin(), others.end(),
            [&](int a, int b) { return corpus.doc(a).id < corpus.doc(b).id; });
  Rng rng(derive_seed(seed, "balanced-s2/" + author));
  rng.shuffle(others);
  if (others.size() < half) throw TooFewPositives("not enough non-target documents for S2");
  std::vector<int> s2_neg(others.begin(), others.begin() + static_cast<long>(half));

  Split s1;
  s1.target_author = author;
  s1.protocol = Protocol::BalancedS1;
  s1.train_pos = pos;
  s1.train_neg = std::move(s1_neg);

  Split s2;
  s2.target_author = author;
  s2.protocol = Protocol::BalancedS2;
  s2.train_pos = std::move(pos);
  s2.train_neg = std::move(s2_neg);
  return {std::move(s1), std::move(s2)};
}

Split split_out_of_training(const Corpus& corpus, const std::string& author, double delta,
                            int fold, std::uint64_t seed, std::optional<Domain> test_domain) {
  require_author(corpus, author);
  require_fold(fold);
  if (delta <= 0.0 || delta > 1.0) throw Error("delta must be in (0, 1]");

  std::vector<std::string> order = negative_author_order(corpus, author, seed);
  std::size_t train_count = static_cast<std::size_t>(delta * static_cast<double>(order.size()));
  if (train_count == 0) throw Error("delta selects no training authors");
  if (train_count >= order.size()) {
    throw EmptyTestAuthors("delta leaves no test authors");
  }
  std::vector<std::string> train_authors(order.begin(),
                                         order.begin() + static_cast<long>(train_count));
  std::vector<std::string> test_authors(order.begin() + static_cast<long>(train_count),
                                        order.end());

  // Domain masks: train side excludes the test domain, test side is only it.
  std::vector<bool> train_ok(corpus.documents().size(), true);
  std::vector<bool> test_ok(corpus.documents().size(), true);
  if (test_domain.has_value()) {
    for (std::size_t i = 0; i < corpus.documents().size(); ++i) {
      bool in_test_domain = corpus.documents()[i].domain == *test_domain;
      train_ok[i] = !in_test_domain;
      test_ok[i] = in_test_domain;
    }
  }

  Split split;
  split.target_author = author;
  split.protocol = test_domain.has_value() ? Protocol::CrossDomain : Protocol::OutOfTraining;
  split.diversity = delta;
  split.fold = fold;
  split.test_domain = test_domain;

  if (!test_domain.has_value()) {
    if (corpus.docs_of(author).size() < kFoldCount) {
      throw TooFewPositives("author " + author + " has fewer than 5 documents");
    }
    positive_folds(corpus, author, seed, fold, nullptr, split.train_pos, split.test_pos);
  } else {
    // Fold over the author's training-domain documents; every test-domain
    // document of the author is a test positive. The fold's held-out
    // training-domain share is unused (wrong domain for testing).
    std::vector<int> held;
    positive_folds(corpus, author, seed, fold, &train_ok, split.train_pos, held);
    for (int d : corpus.docs_of(author)) {
      if (test_ok[static_cast<std::size_t>(d)]) split.test_pos.push_back(d);
    }
    if (split.train_pos.empty()) {
      throw TooFewPositives("author " + author + " has no training-domain documents");
    }
    if (split.test_pos.empty()) {
      throw TooFewPositives("author " + author + " has no test-domain documents");
    }
  }

  std::string tag = "neg-docs/f" + std::to_string(fold);
  split.train_neg = balanced_negative_sample(corpus, train_authors, split.train_pos.size(), seed,
                                             tag, test_domain ? &train_ok : nullptr);
  for (const std::string& neg : test_authors) {
    for (int d : corpus.docs_of(neg)) {
      if (test_ok[static_cast<std::size_t>(d)]) split.test_neg.push_back(d);
    }
  }
  std::sort(split.test_neg.begin(), split.test_neg.end());
  return split;
}

}  // namespace sockverif
