// Binary-classification score bookkeeping shared by the learners and the
// evaluation harness. Positive class is +1.
#ifndef SOCKVERIF_METRICS_HPP
#define SOCKVERIF_METRICS_HPP

#include <span>

namespace sockverif {

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;
};

// Zero-denominator conventions: precision = 0 when tp + fp = 0, recall = 0
// when tp + fn = 0, f1 = 0 when precision + recall = 0.
Metrics metrics_from_counts(long tp, long fp, long fn, long tn);

// Throws LengthMismatch when sizes differ, EmptyInput when empty.
Metrics compute_prf(std::span<const int> predicted, std::span<const int> gold);

// Unweighted mean of each score; the raw counts are summed.
Metrics macro_average(std::span<const Metrics> parts);

}  // namespace sockverif

#endif
