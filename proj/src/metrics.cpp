#include "sockverif/metrics.hpp"

#include "sockverif/errors.hpp"

namespace sockverif {

Metrics metrics_from_counts(long tp, long fp, long fn, long tn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  long total = tp + fp + fn + tn;
  m.accuracy = total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
  return m;
}

Metrics compute_prf(std::span<const int> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size()) {
    throw LengthMismatch("prediction/gold size mismatch");
  }
  if (predicted.empty()) throw EmptyInput("no predictions to score");
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    bool p = predicted[i] > 0;
    bool g = gold[i] > 0;
    if (p && g) ++tp;
    else if (p && !g) ++fp;
    else if (!p && g) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

Metrics macro_average(std::span<const Metrics> parts) {
  if (parts.empty()) throw EmptyInput("no metrics to average");
  Metrics m;
  for (const Metrics& p : parts) {
    m.precision += p.precision;
    m.recall += p.recall;
    m.f1 += p.f1;
    m.accuracy += p.accuracy;
    m.tp += p.tp;
    m.fp += p.fp;
    m.fn += p.fn;
    m.tn += p.tn;
  }
  auto n = static_cast<double>(parts.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  m.accuracy /= n;
  return m;
}

}  // namespace sockverif
