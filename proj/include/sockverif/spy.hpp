// Transductive spy induction: representative positives (spies) are chosen by
// minimum total distance to the rest of the positive class, unlabeled test
// documents nearest to every spy become pseudo-positives and those farthest
// from every spy become pseudo-negatives, an optional multi-view co-labeling
// step vetoes unreliable pseudo-labels, and the (n_s, n_q, n_r) triple is
// chosen by cross-validated F1 on the augmented training set.
#ifndef SOCKVERIF_SPY_HPP
#define SOCKVERIF_SPY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "sockverif/corpus.hpp"
#include "sockverif/klselect.hpp"
#include "sockverif/learners.hpp"
#include "sockverif/metric.hpp"

namespace sockverif {

struct SpyParams {
  int n_s = 1;
  int n_q = 1;
  int n_r = 5;

  bool operator==(const SpyParams&) const = default;
};

struct SpyGrids {
  std::vector<int> n_s = {1, 3, 5, 7};
  std::vector<int> n_q = {1, 3};
  std::vector<int> n_r = {5, 10, 25, 40, 50, 60};
};

// Indices of the n_s positives with the smallest total distance to the other
// positives; ties broken by index. n_s is clamped to the set size. Throws
// EmptyInput when positives is empty.
std::vector<std::size_t> select_spies(std::span<const FeatureVector> positives, int n_s,
                                      const Metric& metric);

// Indices of test documents among the n_q nearest to every spy (ties by
// index), ascending. n_q is clamped to the test size.
std::vector<std::size_t> obtain_nn(std::span<const FeatureVector> test,
                                   std::span<const FeatureVector> spies, int n_q,
                                   const Metric& metric);

// Indices of test documents among the n_r farthest from every spy, ascending.
std::vector<std::size_t> obtain_fn(std::span<const FeatureVector> test,
                                   std::span<const FeatureVector> spies, int n_r,
                                   const Metric& metric);

struct CoLabelConfig {
  double svm_c = 1.0;
  double tol = 1e-3;
  double dkl_threshold = kDeltaKlThreshold;
  double epsilon = kKlEpsilon;
  std::uint64_t seed = 0;
};

// Five independently-trained SVM views: unigrams; unigrams + bigrams;
// parse-tree events; POS tags; divergence-selected parse-tree events with
// unigrams and bigrams. A view whose vocabulary is empty is inactive; a
// pseudo-label survives when at least ceil((active + 1) / 2) views agree.
class CoLabelViews {
 public:
  static CoLabelViews train(std::span<const Document* const> train_docs,
                            std::span<const int> labels, const CoLabelConfig& config);

  std::size_t active_count() const { return views_.size(); }
  std::vector<int> view_labels(const Document& doc) const;
  bool majority(std::span<const int> labels, int pseudo_label) const;
  bool verify(const Document& doc, int pseudo_label) const;

 private:
  struct View {
    Vocabulary vocab;
    TrainedModel model;
  };
  std::vector<View> views_;
};

// Filters q (pseudo-positives) and r (pseudo-negatives) through the view
// majority; returns the surviving index subsets in order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> co_label_verify(
    std::span<const Document* const> train_docs, std::span<const int> labels,
    std::span<const Document* const> test_docs, std::span<const std::size_t> q,
    std::span<const std::size_t> r, const CoLabelConfig& config);

// Stratified 5-fold CV score of the training set augmented with verified
// pseudo-positives and pseudo-negatives.
Metrics cv_improved_training(const LabeledDataset& train, std::span<const FeatureVector> q_v,
                             std::span<const FeatureVector> r_v, const TrainerConfig& trainer,
                             std::uint64_t seed);

struct SpyProblem {
  const LabeledDataset* train = nullptr;
  std::span<const Document* const> train_docs;  // aligned with train, used by co-labeling
  std::span<const FeatureVector> test_vectors;
  std::span<const Document* const> test_docs;   // aligned with test_vectors
  Metric metric = Metric::euclidean();
  TrainerConfig trainer;
  SpyGrids grids;
  bool co_labeling = true;
  CoLabelConfig co_label;
  std::uint64_t seed = 0;
};

struct SpyTrial {
  SpyParams params;
  std::size_t q_size = 0;
  std::size_t r_size = 0;
  std::size_t qv_size = 0;
  std::size_t rv_size = 0;
  Metrics cv;
};

struct SpyOutcome {
  SpyParams chosen;
  Metrics chosen_cv;
  std::vector<SpyTrial> trials;  // grid order: n_s, then n_q, then n_r
  TrainedModel final_model;
  std::vector<std::size_t> final_q;  // verified test indices of the chosen triple
  std::vector<std::size_t> final_r;
};

// Full grid sweep; the winning triple maximizes cross-validated F1 with ties
// resolved toward the smallest (n_s, n_q, n_r) in grid order, and the final
// model is trained on the augmented set of the winner.
SpyOutcome spy_induction(const SpyProblem& problem);

}  // namespace sockverif

#endif
