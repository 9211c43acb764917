#include "sockverif/learners.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "sockverif/errors.hpp"
#include "sockverif/rng.hpp"

namespace sockverif {

void LabeledDataset::push(FeatureVector v, int label) {
  vectors.push_back(std::move(v));
  labels.push_back(label > 0 ? 1 : -1);
}

const char* classifier_kind_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Logreg: return "lr";
    case ClassifierKind::SvmRbf: return "svm";
    case ClassifierKind::Knn: return "knn";
  }
  return "?";
}

namespace {

void check_dataset(const LabeledDataset& data) {
  if (data.vectors.size() != data.labels.size()) {
    throw LengthMismatch("vectors/labels size mismatch");
  }
  if (data.vectors.empty()) throw EmptyTraining("empty training set");
}

void check_both_classes(const LabeledDataset& data) {
  long n_pos = 0;
  long n_neg = 0;
  for (int y : data.labels) (y > 0 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) throw DegenerateLabels("training set has a single class");
}

std::size_t infer_dim(const LabeledDataset& data, std::size_t configured) {
  if (configured > 0) return configured;
  std::uint32_t max_idx = 0;
  bool any = false;
  for (const FeatureVector& v : data.vectors) {
    if (!v.items.empty()) {
      any = true;
      max_idx = std::max(max_idx, v.max_index());
    }
  }
  return any ? max_idx + 1 : 1;
}

double log1p_exp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) {
    double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double logistic_objective(const LabeledDataset& data, double c_reg,
                          std::span<const double> weights, double bias) {
  double obj = 0.0;
  for (double w : weights) obj += w * w;
  obj *= 0.5;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double f = dense_dot(weights, data.vectors[i]) + bias;
    obj += c_reg * log1p_exp(-static_cast<double>(data.labels[i]) * f);
  }
  return obj;
}

std::vector<double> logistic_gradient(const LabeledDataset& data, double c_reg,
                                      std::span<const double> weights, double bias) {
  std::vector<double> grad(weights.size() + 1, 0.0);
  for (std::size_t j = 0; j < weights.size(); ++j) grad[j] = weights[j];
  std::vector<double> wgrad(weights.size(), 0.0);
  double bgrad = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto y = static_cast<double>(data.labels[i]);
    double f = dense_dot(weights, data.vectors[i]) + bias;
    double coeff = -y * sigmoid(-y * f) * c_reg;
    add_scaled(wgrad, data.vectors[i], coeff);
    bgrad += coeff;
  }
  for (std::size_t j = 0; j < weights.size(); ++j) grad[j] += wgrad[j];
  grad[weights.size()] = bgrad;
  return grad;
}

namespace {

// Limited-memory BFGS with Armijo backtracking over theta = (weights, bias).
struct LbfgsState {
  std::deque<std::vector<double>> s_hist;
  std::deque<std::vector<double>> y_hist;
  std::deque<double> rho_hist;
  std::size_t memory = 7;

  std::vector<double> direction(const std::vector<double>& grad) const {
    std::vector<double> q = grad;
    std::vector<double> alphas(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      double a = rho_hist[k] *
                 std::inner_product(s_hist[k].begin(), s_hist[k].end(), q.begin(), 0.0);
      alphas[k] = a;
      for (std::size_t j = 0; j < q.size(); ++j) q[j] -= a * y_hist[k][j];
    }
    if (!s_hist.empty()) {
      const auto& s = s_hist.back();
      const auto& y = y_hist.back();
      double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
      double yy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
      if (yy > 0.0) {
        double scale = sy / yy;
        for (double& v : q) v *= scale;
      }
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      double beta = rho_hist[k] *
                    std::inner_product(y_hist[k].begin(), y_hist[k].end(), q.begin(), 0.0);
      for (std::size_t j = 0; j < q.size(); ++j) q[j] += (alphas[k] - beta) * s_hist[k][j];
    }
    for (double& v : q) v = -v;
    return q;
  }

  void record(std::vector<double> s, std::vector<double> y) {
    double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
    if (sy <= 1e-12) return;
    s_hist.push_back(std::move(s));
    y_hist.push_back(std::move(y));
    rho_hist.push_back(1.0 / sy);
    if (s_hist.size() > memory) {
      s_hist.pop_front();
      y_hist.pop_front();
      rho_hist.pop_front();
    }
  }
};

}  // namespace

TrainedModel train_logistic(const LabeledDataset& data, const TrainerConfig& config) {
  check_dataset(data);
  check_both_classes(data);
  std::size_t dim = infer_dim(data, config.dim);
  double tol = config.tol > 0.0 ? config.tol : 1e-6;
  int max_iter = config.max_iter > 0 ? config.max_iter : 500;

  std::vector<double> theta(dim + 1, 0.0);
  auto obj_of = [&](const std::vector<double>& t) {
    return logistic_objective(data, config.c_reg,
                              std::span<const double>(t.data(), dim), t[dim]);
  };
  auto grad_of = [&](const std::vector<double>& t) {
    return logistic_gradient(data, config.c_reg,
                             std::span<const double>(t.data(), dim), t[dim]);
  };

  double obj = obj_of(theta);
  std::vector<double> grad = grad_of(theta);
  LbfgsState lbfgs;

  // the loss term scales with c_reg, so stationarity is judged relative to it
  double grad_scale = std::max(1.0, config.c_reg);
  for (int iter = 0; iter < max_iter; ++iter) {
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::fabs(g));
    if (gmax <= tol * grad_scale) break;

    std::vector<double> dir = lbfgs.direction(grad);
    double slope = std::inner_product(dir.begin(), dir.end(), grad.begin(), 0.0);
    if (slope >= 0.0) {
      for (std::size_t j = 0; j < dir.size(); ++j) dir[j] = -grad[j];
      slope = -std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
    }

    double step = 1.0;
    std::vector<double> next(theta.size());
    double next_obj = obj;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      for (std::size_t j = 0; j < theta.size(); ++j) next[j] = theta[j] + step * dir[j];
      next_obj = obj_of(next);
      if (next_obj <= obj + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    std::vector<double> next_grad = grad_of(next);
    std::vector<double> s(theta.size());
    std::vector<double> y(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
      s[j] = next[j] - theta[j];
      y[j] = next_grad[j] - grad[j];
    }
    lbfgs.record(std::move(s), std::move(y));
    theta.swap(next);
    grad.swap(next_grad);
    obj = next_obj;
  }

  LogregModel model;
  model.weights.assign(theta.begin(), theta.begin() + static_cast<long>(dim));
  model.bias = theta[dim];
  return model;
}

namespace {

struct SmoSolver {
  const LabeledDataset& data;
  double c;
  double gamma;
  double tol;
  std::size_t n;
  std::vector<double> kernel;  // n x n
  std::vector<double> alpha;
  std::vector<double> f;  // f_i = sum_j alpha_j y_j K_ij + b
  double b = 0.0;
  Rng rng;

  SmoSolver(const LabeledDataset& d, double c_in, double gamma_in, double tol_in,
            std::uint64_t seed)
      : data(d), c(c_in), gamma(gamma_in), tol(tol_in), n(d.size()), rng(seed) {
    kernel.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      kernel[i * n + i] = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double k = std::exp(-gamma * sparse_sq_dist(data.vectors[i], data.vectors[j]));
        kernel[i * n + j] = k;
        kernel[j * n + i] = k;
      }
    }
    alpha.assign(n, 0.0);
    f.assign(n, 0.0);
  }

  double k(std::size_t i, std::size_t j) const { return kernel[i * n + j]; }
  double err(std::size_t i) const { return f[i] - static_cast<double>(data.labels[i]); }
  bool non_bound(std::size_t i) const { return alpha[i] > 1e-12 && alpha[i] < c - 1e-12; }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    double a1 = alpha[i1];
    double a2 = alpha[i2];
    auto y1 = static_cast<double>(data.labels[i1]);
    auto y2 = static_cast<double>(data.labels[i2]);
    double e1 = err(i1);
    double e2 = err(i2);
    double s = y1 * y2;

    double lo;
    double hi;
    if (s < 0.0) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c, c + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c);
      hi = std::min(c, a1 + a2);
    }
    if (hi - lo < 1e-12) return false;

    double k11 = k(i1, i1);
    double k12 = k(i1, i2);
    double k22 = k(i2, i2);
    // Near-duplicate pairs give eta ~ 0; the floor turns the update into a
    // jump to whichever box endpoint the error difference points at.
    double eta = std::max(k11 + k22 - 2.0 * k12, 1e-12);
    double a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);

    if (std::fabs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;
    double a1_new = a1 + s * (a2 - a2_new);
    if (a1_new < 0.0) {
      a2_new += s * a1_new;
      a1_new = 0.0;
    } else if (a1_new > c) {
      a2_new += s * (a1_new - c);
      a1_new = c;
    }

    double d1 = y1 * (a1_new - a1);
    double d2 = y2 * (a2_new - a2);
    double b1 = b - e1 - d1 * k11 - d2 * k12;
    double b2 = b - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1_new > 1e-12 && a1_new < c - 1e-12) b_new = b1;
    else if (a2_new > 1e-12 && a2_new < c - 1e-12) b_new = b2;
    else b_new = 0.5 * (b1 + b2);

    double db = b_new - b;
    for (std::size_t j = 0; j < n; ++j) {
      f[j] += d1 * k(i1, j) + d2 * k(i2, j) + db;
    }
    alpha[i1] = a1_new;
    alpha[i2] = a2_new;
    b = b_new;
    return true;
  }

  bool examine(std::size_t i2) {
    auto y2 = static_cast<double>(data.labels[i2]);
    double a2 = alpha[i2];
    double r2 = err(i2) * y2;
    bool violates = (r2 < -tol && a2 < c - 1e-12) || (r2 > tol && a2 > 1e-12);
    if (!violates) return false;

    std::vector<std::size_t> nb;
    for (std::size_t i = 0; i < n; ++i) {
      if (non_bound(i)) nb.push_back(i);
    }
    if (!nb.empty()) {
      double e2 = err(i2);
      std::size_t best = nb[0];
      double best_gap = -1.0;
      for (std::size_t i : nb) {
        double gap = std::fabs(err(i) - e2);
        if (gap > best_gap) {
          best_gap = gap;
          best = i;
        }
      }
      if (take_step(best, i2)) return true;
      std::size_t start = nb.size() > 1 ? rng.uniform_index(nb.size()) : 0;
      for (std::size_t t = 0; t < nb.size(); ++t) {
        if (take_step(nb[(start + t) % nb.size()], i2)) return true;
      }
    }
    std::size_t start = n > 1 ? rng.uniform_index(n) : 0;
    for (std::size_t t = 0; t < n; ++t) {
      if (take_step((start + t) % n, i2)) return true;
    }
    return false;
  }

  void refresh_f() {
    for (std::size_t i = 0; i < n; ++i) {
      double s = b;
      for (std::size_t j = 0; j < n; ++j) {
        if (alpha[j] > 0.0) s += alpha[j] * static_cast<double>(data.labels[j]) * k(i, j);
      }
      f[i] = s;
    }
  }

  // The incrementally maintained bias can drift off-center; per-point KKT is
  // judged against the midpoint of the feasible-direction gap, which is where
  // the violation bound (gap/2) is attained.
  void recenter_b() {
    double up = -std::numeric_limits<double>::infinity();
    double down = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      auto y = static_cast<double>(data.labels[i]);
      double u = y - (f[i] - b);
      bool can_up = (y > 0.0 && alpha[i] < c - 1e-12) || (y < 0.0 && alpha[i] > 1e-12);
      bool can_down = (y < 0.0 && alpha[i] < c - 1e-12) || (y > 0.0 && alpha[i] > 1e-12);
      if (can_up) up = std::max(up, u);
      if (can_down) down = std::min(down, u);
    }
    if (!std::isfinite(up) || !std::isfinite(down)) return;
    double centered = 0.5 * (up + down);
    double shift = centered - b;
    if (shift == 0.0) return;
    for (std::size_t i = 0; i < n; ++i) f[i] += shift;
    b = centered;
  }

  double max_violation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double yf = static_cast<double>(data.labels[i]) * f[i];
      double v;
      if (alpha[i] <= 1e-12) v = std::max(0.0, 1.0 - yf);
      else if (alpha[i] >= c - 1e-12) v = std::max(0.0, yf - 1.0);
      else v = std::fabs(yf - 1.0);
      worst = std::max(worst, v);
    }
    return worst;
  }

  int solve(int max_sweeps) {
    int sweeps = 0;
    bool examine_all = true;
    while (sweeps < max_sweeps) {
      ++sweeps;
      int changed = 0;
      if (examine_all) {
        for (std::size_t i = 0; i < n; ++i) changed += examine(i) ? 1 : 0;
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          if (non_bound(i)) changed += examine(i) ? 1 : 0;
        }
      }
      if (examine_all) {
        if (changed == 0) {
          refresh_f();
          recenter_b();
          if (max_violation() <= tol) return sweeps;
          continue;
        }
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    throw NonConvergence("SMO failed to certify KKT conditions within the sweep budget");
  }
};

}  // namespace

TrainedModel train_svm_rbf(const LabeledDataset& data, const TrainerConfig& config,
                           SvmTrainStats* stats) {
  check_dataset(data);
  check_both_classes(data);
  std::size_t dim = infer_dim(data, config.dim);
  double gamma = config.gamma;
  if (gamma <= 0.0) {
    double med = median_sq_distance(data.vectors);
    gamma = med > 0.0 ? 1.0 / med : 1.0 / static_cast<double>(dim);
  }
  double tol = config.tol > 0.0 ? config.tol : 1e-3;
  int max_sweeps = config.max_iter > 0 ? config.max_iter : 2000;

  SmoSolver solver(data, config.c, gamma, tol, derive_seed(config.seed, "smo"));
  int sweeps = solver.solve(max_sweeps);

  SvmRbfModel model;
  model.gamma = gamma;
  model.bias = solver.b;
  model.dim = dim;
  double ay_sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ay_sum += solver.alpha[i] * static_cast<double>(data.labels[i]);
    if (solver.alpha[i] > 1e-12) {
      model.support_vectors.push_back(data.vectors[i]);
      model.alpha.push_back(solver.alpha[i]);
      model.sv_labels.push_back(data.labels[i]);
    }
  }
  if (stats != nullptr) {
    stats->alpha = solver.alpha;
    stats->max_kkt_violation = solver.max_violation();
    stats->alpha_label_sum = ay_sum;
    stats->bias = solver.b;
    stats->sweeps = sweeps;
  }
  return model;
}

double svm_kkt_violation(const LabeledDataset& data, std::span<const double> alpha,
                         double gamma, double bias, double c) {
  if (data.size() != alpha.size()) throw LengthMismatch("alpha/data size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double fi = bias;
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (alpha[j] <= 0.0) continue;
      fi += alpha[j] * static_cast<double>(data.labels[j]) *
            std::exp(-gamma * sparse_sq_dist(data.vectors[i], data.vectors[j]));
    }
    double yf = static_cast<double>(data.labels[i]) * fi;
    double v;
    if (alpha[i] <= 1e-12) v = std::max(0.0, 1.0 - yf);
    else if (alpha[i] >= c - 1e-12) v = std::max(0.0, yf - 1.0);
    else v = std::fabs(yf - 1.0);
    worst = std::max(worst, v);
  }
  return worst;
}

TrainedModel train_model(const LabeledDataset& data, const TrainerConfig& config) {
  switch (config.kind) {
    case ClassifierKind::Logreg:
      return train_logistic(data, config);
    case ClassifierKind::SvmRbf:
      return train_svm_rbf(data, config);
    case ClassifierKind::Knn: {
      check_dataset(data);
      KnnModel model;
      model.train = data;
      model.k = config.k;
      model.metric = config.metric;
      return model;
    }
  }
  throw Error("unknown classifier kind");
}

std::pair<double, int> knn_classify(const LabeledDataset& train, const FeatureVector& query,
                                    int k, const Metric& metric) {
  if (train.vectors.empty()) throw EmptyTraining("knn over empty training set");
  if (k < 1) throw Error("k must be positive");
  auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), train.size());

  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    order.emplace_back(distance(train.vectors[i], query, metric), i);
  }
  std::sort(order.begin(), order.end());

  long votes = 0;
  for (std::size_t t = 0; t < kk; ++t) votes += train.labels[order[t].second];
  double score = static_cast<double>(votes) / static_cast<double>(kk);
  return {score, score >= 0.0 ? 1 : -1};
}

std::pair<double, int> predict(const TrainedModel& model, const FeatureVector& query) {
  if (const auto* lr = std::get_if<LogregModel>(&model)) {
    if (!query.items.empty() && query.max_index() >= lr->weights.size()) {
      throw VocabularyMismatch("query uses coordinates beyond the model space");
    }
    double score = dense_dot(lr->weights, query) + lr->bias;
    return {score, score >= 0.0 ? 1 : -1};
  }
  if (const auto* svm = std::get_if<SvmRbfModel>(&model)) {
    if (!query.items.empty() && query.max_index() >= svm->dim) {
      throw VocabularyMismatch("query uses coordinates beyond the model space");
    }
    double score = svm->bias;
    for (std::size_t i = 0; i < svm->support_vectors.size(); ++i) {
      score += svm->alpha[i] * static_cast<double>(svm->sv_labels[i]) *
               std::exp(-svm->gamma * sparse_sq_dist(svm->support_vectors[i], query));
    }
    return {score, score >= 0.0 ? 1 : -1};
  }
  const auto& knn = std::get<KnnModel>(model);
  return knn_classify(knn.train, query, knn.k, knn.metric);
}

Metrics cross_validate(const LabeledDataset& data, const TrainerConfig& config, int folds,
                       std::uint64_t seed) {
  check_dataset(data);
  if (folds < 2) throw Error("cross-validation needs at least 2 folds");

  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (data.labels[i] > 0 ? pos : neg).push_back(i);
  }
  if (pos.size() < static_cast<std::size_t>(folds) ||
      neg.size() < static_cast<std::size_t>(folds)) {
    throw TooFewInstances("each class needs at least as many instances as folds");
  }
  Rng(derive_seed(seed, "cv/pos")).shuffle(pos);
  Rng(derive_seed(seed, "cv/neg")).shuffle(neg);

  std::vector<int> fold_of(data.size(), 0);
  for (std::size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = static_cast<int>(i % folds);
  for (std::size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = static_cast<int>(i % folds);

  TrainerConfig fold_config = config;
  fold_config.dim = infer_dim(data, config.dim);

  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;
  for (int fold = 0; fold < folds; ++fold) {
    LabeledDataset train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold_of[i] == fold) test.push_back(i);
      else train.push(data.vectors[i], data.labels[i]);
    }
    TrainerConfig cfg = fold_config;
    cfg.seed = derive_seed(seed, "cv/fold" + std::to_string(fold));
    TrainedModel model = train_model(train, cfg);
    for (std::size_t i : test) {
      int pred = predict(model, data.vectors[i]).second;
      bool g = data.labels[i] > 0;
      if (pred > 0 && g) ++tp;
      else if (pred > 0 && !g) ++fp;
      else if (pred <= 0 && g) ++fn;
      else ++tn;
    }
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

TrainerConfig grid_search(const LabeledDataset& data, ClassifierKind kind, int folds,
                          std::uint64_t seed) {
  check_dataset(data);
  TrainerConfig best;
  best.kind = kind;
  best.dim = infer_dim(data, 0);

  if (kind == ClassifierKind::Knn) return best;

  double best_f1 = -1.0;
  if (kind == ClassifierKind::Logreg) {
    for (double c_reg : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      TrainerConfig cand;
      cand.kind = kind;
      cand.c_reg = c_reg;
      cand.dim = best.dim;
      double f1 = cross_validate(data, cand, folds, seed).f1;
      if (f1 > best_f1) {
        best_f1 = f1;
        best = cand;
      }
    }
    return best;
  }

  std::vector<double> gammas = {1.0 / static_cast<double>(best.dim), 0.01, 0.1, 1.0};
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
  for (double c : {0.1, 1.0, 10.0, 100.0}) {
    for (double gamma : gammas) {
      TrainerConfig cand;
      cand.kind = kind;
      cand.c = c;
      cand.gamma = gamma;
      cand.dim = best.dim;
      double f1 = cross_validate(data, cand, folds, seed).f1;
      if (f1 > best_f1) {
        best_f1 = f1;
        best = cand;
      }
    }
  }
  return best;
}

}  // namespace sockverif
