// Typed feature space: vocabulary construction over unigram/bigram/parse-tree/
// POS events, sparse normalized-term-frequency vectors, and chi-squared
// ranking.
//
// Vector values are per-kind L1-normalized: within one kind block the counts
// of in-vocabulary events are divided by their total, so a block sums to 1
// whenever the document contains any in-vocabulary event of that kind and is
// all-zero otherwise.
#ifndef SOCKVERIF_FEATURES_HPP
#define SOCKVERIF_FEATURES_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sockverif/corpus.hpp"
#include "sockverif/treebank.hpp"

namespace sockverif {

enum class FeatureKind : std::uint8_t { Unigram = 0, Bigram = 1, Ptf = 2, Pos = 3 };
inline constexpr std::size_t kFeatureKindCount = 4;

const char* feature_kind_name(FeatureKind kind);

// Vocabulary key of a parse-tree event; the rule family is folded into the
// key ("i:", "ii:", "iii:", "int:") so events from different rules never
// collide.
std::string ptf_vocab_key(const PtfEvent& event);

struct VocabEntry {
  FeatureKind kind;
  std::string key;

  bool operator==(const VocabEntry&) const = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  // Entries are sorted by (kind, key); duplicates are an error.
  static Vocabulary from_entries(std::vector<VocabEntry> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const VocabEntry& entry(std::size_t index) const { return entries_[index]; }
  const std::vector<VocabEntry>& entries() const { return entries_; }
  std::optional<std::uint32_t> find(FeatureKind kind, const std::string& key) const;
  bool has_kind(FeatureKind kind) const;
  // Half-open index range of one kind's block.
  std::pair<std::uint32_t, std::uint32_t> kind_range(FeatureKind kind) const;

  // CSV of (index, kind, key).
  void export_csv(std::ostream& out) const;

 private:
  std::vector<VocabEntry> entries_;
  std::array<std::pair<std::uint32_t, std::uint32_t>, kFeatureKindCount> ranges_{};
};

// Sparse non-negative vector; items sorted by index.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> items;

  bool empty() const { return items.empty(); }
  double value_at(std::uint32_t index) const;
  std::uint32_t max_index() const;  // 0 when empty

  bool operator==(const FeatureVector&) const = default;
};

double sparse_dot(const FeatureVector& u, const FeatureVector& v);
double sparse_sq_norm(const FeatureVector& u);
double sparse_sq_dist(const FeatureVector& u, const FeatureVector& v);
// Median pairwise squared distance; subsamples pairs deterministically past 80
// points. Returns 0 for fewer than two distinct points.
double median_sq_distance(std::span<const FeatureVector> xs);
double dense_dot(std::span<const double> w, const FeatureVector& v);
void add_scaled(std::vector<double>& acc, const FeatureVector& v, double scale);

// Counted events of one document, grouped by kind; computed once per
// document and reusable against any vocabulary.
struct DocumentEvents {
  std::array<std::vector<std::pair<std::string, int>>, kFeatureKindCount> counts;
  bool has_parses = false;

  const std::vector<std::pair<std::string, int>>& of(FeatureKind kind) const {
    return counts[static_cast<std::size_t>(kind)];
  }
};

DocumentEvents extract_events(const Document& doc);

// Every (kind, key) occurring in at least min_df documents, ordered by kind
// then key. Throws EmptyInput when docs is empty.
Vocabulary build_vocabulary(std::span<const Document* const> docs,
                            const std::vector<FeatureKind>& kinds, int min_df = 1);
Vocabulary build_vocabulary(std::span<const DocumentEvents* const> docs,
                            const std::vector<FeatureKind>& kinds, int min_df = 1);

// Throws MissingParses when the vocabulary contains parse-derived kinds but
// the document carries no parses.
FeatureVector vectorize(const Document& doc, const Vocabulary& vocab);
FeatureVector vectorize(const DocumentEvents& events, const Vocabulary& vocab);

// Chi-squared statistic of the 2x2 presence/class table, one per vocabulary
// index. Labels are +/-1; throws SingleClass when only one class is present.
std::vector<double> chi2_scores(std::size_t dim, std::span<const FeatureVector> vectors,
                                std::span<const int> labels);

// Top ceil(top_fraction * N) features by chi-squared, ties broken by
// (kind, key); the result is a re-indexed sub-vocabulary.
Vocabulary chi2_select(const Vocabulary& vocab, std::span<const FeatureVector> vectors,
                       std::span<const int> labels, double top_fraction);

}  // namespace sockverif

#endif
