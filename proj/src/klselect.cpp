#include "sockverif/klselect.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sockverif/errors.hpp"
#include "sockverif/features.hpp"
#include "sockverif/treebank.hpp"

namespace sockverif {

double StylisticLM::prob(const std::string& key) const {
  auto it = std::lower_bound(vocab_.begin(), vocab_.end(), key);
  if (it == vocab_.end() || *it != key) {
    throw Error("key not in language model vocabulary: " + key);
  }
  return probs_[static_cast<std::size_t>(it - vocab_.begin())];
}

StylisticLM build_stylistic_lm_from_counts(const std::map<std::string, long>& counts,
                                           std::vector<std::string> joint_vocab, double epsilon) {
  std::sort(joint_vocab.begin(), joint_vocab.end());
  joint_vocab.erase(std::unique(joint_vocab.begin(), joint_vocab.end()), joint_vocab.end());
  if (joint_vocab.empty()) throw EmptyVocabulary("language model over empty vocabulary");
  if (!(epsilon > 0.0)) throw Error("smoothing mass must be positive");

  long total = 0;
  for (const std::string& key : joint_vocab) {
    auto it = counts.find(key);
    if (it != counts.end()) total += it->second;
  }
  double denom = static_cast<double>(total) +
                 epsilon * static_cast<double>(joint_vocab.size());

  StylisticLM lm;
  lm.epsilon_ = epsilon;
  lm.probs_.reserve(joint_vocab.size());
  for (const std::string& key : joint_vocab) {
    auto it = counts.find(key);
    long c = it == counts.end() ? 0 : it->second;
    lm.probs_.push_back((static_cast<double>(c) + epsilon) / denom);
  }
  lm.vocab_ = std::move(joint_vocab);
  return lm;
}

static std::map<std::string, long> count_ptf_events(std::span<const Document* const> docs) {
  std::map<std::string, long> counts;
  for (const Document* doc : docs) {
    DocumentEvents ev = extract_events(*doc);
    for (const auto& [key, n] : ev.of(FeatureKind::Ptf)) counts[key] += n;
  }
  return counts;
}

StylisticLM build_stylistic_lm(std::span<const Document* const> docs,
                               std::vector<std::string> joint_vocab, double epsilon) {
  return build_stylistic_lm_from_counts(count_ptf_events(docs), std::move(joint_vocab), epsilon);
}

std::vector<std::string> ptf_key_set(std::span<const Document* const> docs) {
  std::map<std::string, long> counts = count_ptf_events(docs);
  std::vector<std::string> keys;
  keys.reserve(counts.size());
  for (const auto& [key, n] : counts) keys.push_back(key);
  return keys;
}

double delta_kl_feature(const StylisticLM& target, const StylisticLM& background,
                        const std::string& key) {
  double a = target.prob(key);
  double b = background.prob(key);
  return a * std::log2(a / b) - b * std::log2(b / a);
}

static void require_same_vocab(const StylisticLM& target, const StylisticLM& background) {
  if (target.vocab() != background.vocab()) {
    throw VocabularyMismatch("language models built over different vocabularies");
  }
}

std::vector<DeltaKlScore> delta_kl_scores(const StylisticLM& target,
                                          const StylisticLM& background) {
  require_same_vocab(target, background);
  std::vector<DeltaKlScore> scores;
  scores.reserve(target.vocab_size());
  for (const std::string& key : target.vocab()) {
    scores.push_back({key, delta_kl_feature(target, background, key)});
  }
  return scores;
}

std::vector<std::string> select_delta_kl_features(const StylisticLM& target,
                                                  const StylisticLM& background,
                                                  double threshold) {
  std::vector<DeltaKlScore> scores = delta_kl_scores(target, background);
  std::vector<std::string> keys;
  std::vector<const DeltaKlScore*> kept;
  for (const DeltaKlScore& s : scores) {
    if (std::fabs(s.value) >= threshold) kept.push_back(&s);
  }
  std::sort(kept.begin(), kept.end(), [](const DeltaKlScore* a, const DeltaKlScore* b) {
    double ma = std::fabs(a->value);
    double mb = std::fabs(b->value);
    if (ma != mb) return ma > mb;
    return a->key < b->key;
  });
  keys.reserve(kept.size());
  for (const DeltaKlScore* s : kept) keys.push_back(s->key);
  return keys;
}

double kl_divergence(const StylisticLM& target, const StylisticLM& background) {
  require_same_vocab(target, background);
  double acc = 0.0;
  for (const std::string& key : target.vocab()) {
    double a = target.prob(key);
    double b = background.prob(key);
    acc += a * std::log2(a / b);
  }
  return acc;
}

void dump_delta_kl_csv(const StylisticLM& target, const StylisticLM& background,
                       std::ostream& out) {
  require_same_vocab(target, background);
  out << "key,target_prob,background_prob,delta_kl\n";
  char buf[128];
  for (const std::string& key : target.vocab()) {
    double a = target.prob(key);
    double b = background.prob(key);
    std::snprintf(buf, sizeof(buf), "%.9f,%.9f,%.9f", a, b, delta_kl_feature(target, background, key));
    std::string quoted = key;
    if (quoted.find_first_of(",\"\n") != std::string::npos) {
      std::string escaped = "\"";
      for (char c : quoted) {
        if (c == '"') escaped += '"';
        escaped += c;
      }
      escaped += '"';
      quoted = escaped;
    }
    out << quoted << ',' << buf << '\n';
  }
}

}  // namespace sockverif
