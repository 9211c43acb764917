// Corpus data model, JSON Lines ingestion, and construction of the
// train/test split protocols (in-training diversity, balanced scenarios,
// out-of-training diversity, cross-domain).
//
// All split construction is pure given (corpus, seed): author subsets for a
// diversity fraction are prefixes of one seeded permutation, so subsets at
// growing fractions are nested for a fixed seed, and per-author document
// draws are prefixes of per-author seeded shuffles.
#ifndef SOCKVERIF_CORPUS_HPP
#define SOCKVERIF_CORPUS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sockverif {

enum class Domain { Hotel, Restaurant, Product, Other };

enum class Polarity { Positive, Negative };

Domain parse_domain(std::string_view name);
const char* domain_name(Domain d);

struct Document {
  std::string id;
  std::string author;
  Domain domain = Domain::Other;
  Polarity polarity = Polarity::Positive;
  std::vector<std::string> tokens;
  std::vector<std::string> parses;  // one bracketed tree per sentence
};

class Corpus {
 public:
  static Corpus from_documents(std::vector<Document> docs);

  const std::vector<Document>& documents() const { return docs_; }
  const Document& doc(int index) const { return docs_[static_cast<std::size_t>(index)]; }
  const std::vector<std::string>& authors() const { return authors_; }
  bool has_author(const std::string& author) const;

  // Indices of the author's documents, ordered by document id.
  std::vector<int> docs_of(const std::string& author) const;

 private:
  std::vector<Document> docs_;
  std::vector<std::string> authors_;  // sorted unique
  std::unordered_map<std::string, std::vector<int>> by_author_;
};

// Lowercases and splits on whitespace and punctuation boundaries: a token is
// a maximal run of word characters, and each punctuation character stands
// alone.
std::vector<std::string> tokenize(std::string_view text);

// JSON Lines, one record per line:
//   {"id": ..., "author": ..., "domain": ..., "polarity": "pos"|"neg",
//    "text": ..., "parses": [...]}
Corpus load_corpus(const std::string& path);
Corpus read_corpus_jsonl(std::istream& in);
void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::string& path);

enum class Protocol {
  InTraining,
  BalancedS1,
  BalancedS2,
  OutOfTraining,
  CrossDomain,
};

// One train/test realization for a single verifier. Document references are
// indices into corpus.documents(). For the balanced scenarios the dataset
// lives entirely in train_pos/train_neg and is meant for k-fold CV.
struct Split {
  std::vector<int> train_pos;
  std::vector<int> train_neg;
  std::vector<int> test_pos;
  std::vector<int> test_neg;
  std::string target_author;
  Protocol protocol = Protocol::InTraining;
  double diversity = 0.0;  // lambda or delta, when applicable
  int fold = -1;
  std::optional<Domain> test_domain;
};

inline constexpr int kFoldCount = 5;

// In-training: negatives in train and test come from the same seeded
// lambda-subset of the other authors. Train is balanced; the test fold holds
// the remaining fifth of the author's documents plus every chosen-author
// document not sampled into training.
Split split_in_training(const Corpus& corpus, const std::string& author, double lambda, int fold,
                        std::uint64_t seed);

// Balanced scenarios: S1 opposes half of the author's documents to the other
// half; S2 opposes the same positive half to an equal-sized sample of other
// authors' documents.
std::pair<Split, Split> split_balanced_scenarios(const Corpus& corpus, const std::string& author,
                                                 std::uint64_t seed);

// Out-of-training: the other authors are partitioned into train-authors
// (a seeded delta-fraction) and test-authors; no author contributes
// negatives to both sides. With test_domain set, training documents are
// drawn only from the other domains and test documents only from
// test_domain.
Split split_out_of_training(const Corpus& corpus, const std::string& author, double delta,
                            int fold, std::uint64_t seed,
                            std::optional<Domain> test_domain = std::nullopt);

}  // namespace sockverif

#endif
