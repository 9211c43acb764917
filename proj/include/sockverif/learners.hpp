// Binary classifiers over sparse feature vectors: L2-regularized logistic
// regression (quasi-Newton), an RBF-kernel SVM trained by sequential minimal
// optimization with KKT certification, and k-nearest-neighbor voting.
// Stratified cross-validation pools the per-fold confusion counts; grid
// search breaks score ties toward the smallest hyperparameters.
#ifndef SOCKVERIF_LEARNERS_HPP
#define SOCKVERIF_LEARNERS_HPP

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "sockverif/features.hpp"
#include "sockverif/metric.hpp"
#include "sockverif/metrics.hpp"

namespace sockverif {

// labels are +/-1, aligned with vectors.
struct LabeledDataset {
  std::vector<FeatureVector> vectors;
  std::vector<int> labels;

  std::size_t size() const { return vectors.size(); }
  void push(FeatureVector v, int label);
};

enum class ClassifierKind : std::uint8_t { Logreg, SvmRbf, Knn };

const char* classifier_kind_name(ClassifierKind kind);

struct TrainerConfig {
  ClassifierKind kind = ClassifierKind::Logreg;
  double c_reg = 1.0;        // logreg inverse-regularization weight
  double c = 1.0;            // svm box constraint
  double gamma = 0.0;        // svm rbf width; <= 0 means 1/median sq distance
  int k = 3;                 // knn neighborhood
  double tol = 0.0;          // optimizer tolerance; <= 0 means per-kind default
  int max_iter = 0;          // <= 0 means per-kind default
  std::size_t dim = 0;       // feature-space size; 0 means infer from data
  std::uint64_t seed = 0;
  Metric metric = Metric::euclidean();  // knn distance
};

struct LogregModel {
  std::vector<double> weights;
  double bias = 0.0;
};

struct SvmRbfModel {
  std::vector<FeatureVector> support_vectors;
  std::vector<double> alpha;  // raw duals in [0, C]; decision coef is alpha * sv_label
  std::vector<int> sv_labels;
  double bias = 0.0;
  double gamma = 1.0;
  std::size_t dim = 0;
};

struct KnnModel {
  LabeledDataset train;
  int k = 3;
  Metric metric;
};

using TrainedModel = std::variant<LogregModel, SvmRbfModel, KnnModel>;

// 0.5 ||w||^2 + c_reg * sum log(1 + exp(-y f)); bias unregularized.
double logistic_objective(const LabeledDataset& data, double c_reg,
                          std::span<const double> weights, double bias);
// Gradient over (weights..., bias); size dim + 1.
std::vector<double> logistic_gradient(const LabeledDataset& data, double c_reg,
                                      std::span<const double> weights, double bias);

// Throws DegenerateLabels when only one class is present, EmptyTraining when
// the dataset is empty.
TrainedModel train_logistic(const LabeledDataset& data, const TrainerConfig& config);

struct SvmTrainStats {
  std::vector<double> alpha;  // full, aligned with training order
  double max_kkt_violation = 0.0;
  double alpha_label_sum = 0.0;
  double bias = 0.0;
  int sweeps = 0;
};

// Throws NonConvergence when certification fails within the sweep budget.
TrainedModel train_svm_rbf(const LabeledDataset& data, const TrainerConfig& config,
                           SvmTrainStats* stats = nullptr);
TrainedModel train_model(const LabeledDataset& data, const TrainerConfig& config);

// (margin score, predicted label); score 0 maps to +1. Throws
// VocabularyMismatch when the query uses coordinates beyond the model space.
std::pair<double, int> predict(const TrainedModel& model, const FeatureVector& query);

// Distance-weighted vote is not used: score = (pos_votes - neg_votes) / k.
// Neighbor ties broken by index. Throws EmptyTraining on an empty set;
// k is clamped to the training size.
std::pair<double, int> knn_classify(const LabeledDataset& train, const FeatureVector& query,
                                    int k, const Metric& metric);

// Largest KKT violation of a dual solution against the training data,
// recomputed from scratch: alpha = 0 demands y f >= 1 - tol, interior alpha
// demands |y f - 1| <= tol, alpha = c demands y f <= 1 + tol.
double svm_kkt_violation(const LabeledDataset& data, std::span<const double> alpha,
                         double gamma, double bias, double c);

// Stratified k-fold with pooled confusion counts. Fold membership comes from
// a seeded shuffle of each class followed by round-robin assignment. Throws
// TooFewInstances when either class has fewer members than folds.
Metrics cross_validate(const LabeledDataset& data, const TrainerConfig& config, int folds,
                       std::uint64_t seed);

// Exhaustive search over the per-kind hyperparameter grid by cross-validated
// F1; ties resolve to the smallest parameters in grid order.
TrainerConfig grid_search(const LabeledDataset& data, ClassifierKind kind, int folds,
                          std::uint64_t seed);

}  // namespace sockverif

#endif
