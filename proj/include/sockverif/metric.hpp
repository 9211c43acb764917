// Distance metrics over sparse feature vectors: plain Euclidean and a
// learned Mahalanobis transform trained with a large-margin nearest-neighbor
// objective (pull term over target neighbors plus hinge push term over
// differently-labeled impostors).
#ifndef SOCKVERIF_METRIC_HPP
#define SOCKVERIF_METRIC_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "sockverif/features.hpp"

namespace sockverif {

// d(u, v) = ||L (u - v)[dims]||_2. The rows of l form the out_dim x cols
// matrix L in row-major order; input_dims maps each column to a coordinate
// of the original vector space.
struct MahalanobisTransform {
  std::vector<std::uint32_t> input_dims;
  std::vector<double> l;
  std::size_t out_dim = 0;

  std::size_t cols() const { return input_dims.size(); }
};

class Metric {
 public:
  Metric() = default;
  static Metric euclidean() { return Metric(); }
  static Metric mahalanobis(MahalanobisTransform transform);

  bool is_euclidean() const { return !learned_; }
  const MahalanobisTransform& transform() const;

 private:
  bool learned_ = false;
  MahalanobisTransform transform_;
};

// Throws DimensionMismatch when a Mahalanobis transform is malformed
// (l size != out_dim * cols).
double distance(const FeatureVector& u, const FeatureVector& v, const Metric& metric);

struct LmnnConfig {
  int k_targets = 3;
  double mu = 0.5;
  int max_iter = 200;
  double step = 1e-3;
  double tol = 1e-7;
  std::size_t max_impostors_per_point = 200;
  std::uint64_t seed = 0;
};

struct LmnnResult {
  Metric metric;
  std::vector<double> objective;  // value after each accepted step, [0] = initial
};

// Learns a square transform over the given coordinate subset (all observed
// coordinates when dims is empty). Gradient descent with step halving: a
// step that does not decrease the objective is retried at half length, so
// the recorded objective curve is strictly decreasing after index 0.
// Throws TooFewInstances when either class has fewer than k_targets + 1
// members, DegenerateLabels when only one class is present.
LmnnResult learn_lmnn(std::span<const FeatureVector> vectors, std::span<const int> labels,
                      const LmnnConfig& config, std::span<const std::uint32_t> dims = {});

// Pull + mu * push objective of an explicit transform, for verification.
double lmnn_objective(std::span<const FeatureVector> vectors, std::span<const int> labels,
                      const LmnnConfig& config, const MahalanobisTransform& transform);

// Row-major gradient of the objective with respect to the transform matrix,
// holding the hinge active set fixed at the given point.
std::vector<double> lmnn_gradient(std::span<const FeatureVector> vectors,
                                  std::span<const int> labels, const LmnnConfig& config,
                                  const MahalanobisTransform& transform);

// Coordinates ordered by descending salience (ties by index), capped at
// max_dims; used to restrict metric learning to the most discriminative axes.
std::vector<std::uint32_t> top_salience_dims(std::span<const double> salience,
                                             std::size_t max_dims);

}  // namespace sockverif

#endif
