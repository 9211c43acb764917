// Per-class smoothed event language models and the per-feature symmetric
// KL contribution used to rank stylistic features.
#ifndef SOCKVERIF_KLSELECT_HPP
#define SOCKVERIF_KLSELECT_HPP

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sockverif/corpus.hpp"

namespace sockverif {

inline constexpr double kKlEpsilon = 0.5;
inline constexpr double kDeltaKlThreshold = 0.01;

// Additively smoothed unigram model over a shared event vocabulary:
// p(t) = (count(t) + eps) / (total + eps * V).
class StylisticLM {
 public:
  StylisticLM() = default;

  double prob(const std::string& key) const;
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  double epsilon() const { return epsilon_; }

 private:
  friend StylisticLM build_stylistic_lm_from_counts(const std::map<std::string, long>& counts,
                                                    std::vector<std::string> joint_vocab,
                                                    double epsilon);
  std::vector<std::string> vocab_;   // sorted unique keys
  std::vector<double> probs_;        // aligned with vocab_
  double epsilon_ = kKlEpsilon;
};

// joint_vocab must be the shared key set of both classes; counts for keys
// outside it are ignored. Throws EmptyVocabulary when joint_vocab is empty.
StylisticLM build_stylistic_lm_from_counts(const std::map<std::string, long>& counts,
                                           std::vector<std::string> joint_vocab, double epsilon);

// Counts parse-tree events (ptf_vocab_key form) across all parses of docs.
StylisticLM build_stylistic_lm(std::span<const Document* const> docs,
                               std::vector<std::string> joint_vocab,
                               double epsilon = kKlEpsilon);

// Parse-tree event keys of docs, sorted unique; union over classes forms the
// joint vocabulary.
std::vector<std::string> ptf_key_set(std::span<const Document* const> docs);

struct DeltaKlScore {
  std::string key;
  double value = 0.0;
};

// a(t) * log2(a(t)/b(t)) - b(t) * log2(b(t)/a(t)); positive when the feature
// is more characteristic of the target class.
double delta_kl_feature(const StylisticLM& target, const StylisticLM& background,
                        const std::string& key);

// Score for every key of the shared vocabulary, in vocabulary order.
// Throws VocabularyMismatch when the two models disagree on their key set.
std::vector<DeltaKlScore> delta_kl_scores(const StylisticLM& target,
                                          const StylisticLM& background);

// Keys with |score| >= threshold, ordered by descending |score|, ties by key.
std::vector<std::string> select_delta_kl_features(const StylisticLM& target,
                                                  const StylisticLM& background,
                                                  double threshold = kDeltaKlThreshold);

// Full divergence sum(a(t) * log2(a(t)/b(t))); non-negative.
double kl_divergence(const StylisticLM& target, const StylisticLM& background);

// CSV of (key, target_prob, background_prob, delta_kl).
void dump_delta_kl_csv(const StylisticLM& target, const StylisticLM& background,
                       std::ostream& out);

}  // namespace sockverif

#endif
