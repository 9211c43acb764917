#include "sockverif/metric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sockverif/errors.hpp"

namespace sockverif {

Metric Metric::mahalanobis(MahalanobisTransform transform) {
  if (transform.l.size() != transform.out_dim * transform.cols()) {
    throw DimensionMismatch("transform matrix size does not match out_dim x cols");
  }
  Metric m;
  m.learned_ = true;
  m.transform_ = std::move(transform);
  return m;
}

const MahalanobisTransform& Metric::transform() const {
  if (!learned_) throw Error("euclidean metric has no transform");
  return transform_;
}

double distance(const FeatureVector& u, const FeatureVector& v, const Metric& metric) {
  if (metric.is_euclidean()) return std::sqrt(sparse_sq_dist(u, v));
  const MahalanobisTransform& t = metric.transform();
  std::size_t cols = t.cols();
  std::vector<double> diff(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    diff[c] = u.value_at(t.input_dims[c]) - v.value_at(t.input_dims[c]);
  }
  double acc = 0.0;
  for (std::size_t r = 0; r < t.out_dim; ++r) {
    const double* row = t.l.data() + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * diff[c];
    acc += s * s;
  }
  return std::sqrt(acc);
}

std::vector<std::uint32_t> top_salience_dims(std::span<const double> salience,
                                             std::size_t max_dims) {
  std::vector<std::uint32_t> order(salience.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (salience[a] != salience[b]) return salience[a] > salience[b];
    return a < b;
  });
  if (order.size() > max_dims) order.resize(max_dims);
  return order;
}

namespace {

struct DenseProblem {
  std::vector<double> x;  // n x d row-major
  std::size_t n = 0;
  std::size_t d = 0;

  const double* row(std::size_t i) const { return x.data() + i * d; }
};

DenseProblem densify(std::span<const FeatureVector> vectors,
                     std::span<const std::uint32_t> dims) {
  DenseProblem p;
  p.n = vectors.size();
  p.d = dims.size();
  p.x.assign(p.n * p.d, 0.0);
  for (std::size_t i = 0; i < p.n; ++i) {
    double* row = p.x.data() + i * p.d;
    for (std::size_t c = 0; c < p.d; ++c) row[c] = vectors[i].value_at(dims[c]);
  }
  return p;
}

double sq_dist_rows(const DenseProblem& p, std::size_t i, std::size_t j) {
  const double* a = p.row(i);
  const double* b = p.row(j);
  double acc = 0.0;
  for (std::size_t c = 0; c < p.d; ++c) {
    double d = a[c] - b[c];
    acc += d * d;
  }
  return acc;
}

// p_i = L x_i for all rows; out is n x d row-major (L is square d x d).
std::vector<double> project_all(const DenseProblem& p, const std::vector<double>& l) {
  std::vector<double> out(p.n * p.d, 0.0);
  for (std::size_t i = 0; i < p.n; ++i) {
    const double* xi = p.row(i);
    double* pi = out.data() + i * p.d;
    for (std::size_t r = 0; r < p.d; ++r) {
      const double* lrow = l.data() + r * p.d;
      double s = 0.0;
      for (std::size_t c = 0; c < p.d; ++c) s += lrow[c] * xi[c];
      pi[r] = s;
    }
  }
  return out;
}

double sq_dist_dense(const double* a, const double* b, std::size_t d) {
  double acc = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double diff = a[c] - b[c];
    acc += diff * diff;
  }
  return acc;
}

struct Neighborhoods {
  std::vector<std::vector<std::size_t>> targets;    // same-class nearest
  std::vector<std::vector<std::size_t>> impostors;  // nearest differently-labeled
};

Neighborhoods build_neighborhoods(const DenseProblem& p, std::span<const int> labels,
                                  const LmnnConfig& config) {
  Neighborhoods nb;
  nb.targets.resize(p.n);
  nb.impostors.resize(p.n);
  for (std::size_t i = 0; i < p.n; ++i) {
    std::vector<std::pair<double, std::size_t>> same;
    std::vector<std::pair<double, std::size_t>> diff;
    for (std::size_t j = 0; j < p.n; ++j) {
      if (j == i) continue;
      double d = sq_dist_rows(p, i, j);
      (labels[j] == labels[i] ? same : diff).emplace_back(d, j);
    }
    std::sort(same.begin(), same.end());
    std::sort(diff.begin(), diff.end());
    auto k = static_cast<std::size_t>(config.k_targets);
    for (std::size_t t = 0; t < k && t < same.size(); ++t) {
      nb.targets[i].push_back(same[t].second);
    }
    std::size_t cap = std::min(diff.size(), config.max_impostors_per_point);
    for (std::size_t t = 0; t < cap; ++t) nb.impostors[i].push_back(diff[t].second);
  }
  return nb;
}

double objective_of(const DenseProblem& p, const Neighborhoods& nb, double mu,
                    const std::vector<double>& l) {
  std::vector<double> proj = project_all(p, l);
  double pull = 0.0;
  double push = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const double* pi = proj.data() + i * p.d;
    for (std::size_t j : nb.targets[i]) {
      double dij = sq_dist_dense(pi, proj.data() + j * p.d, p.d);
      pull += dij;
      for (std::size_t l2 : nb.impostors[i]) {
        double dil = sq_dist_dense(pi, proj.data() + l2 * p.d, p.d);
        double hinge = 1.0 + dij - dil;
        if (hinge > 0.0) push += hinge;
      }
    }
  }
  return pull + mu * push;
}

// G = 2 L M with M the signed sum of outer products v v^T over pair
// coefficients; pairs are canonicalized since v_ab v_ab^T = v_ba v_ba^T.
std::vector<double> gradient_of(const DenseProblem& p, const Neighborhoods& nb, double mu,
                                const std::vector<double>& l) {
  std::vector<double> proj = project_all(p, l);
  std::map<std::pair<std::size_t, std::size_t>, double> coef;
  auto canon = [](std::size_t a, std::size_t b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  };
  for (std::size_t i = 0; i < p.n; ++i) {
    const double* pi = proj.data() + i * p.d;
    for (std::size_t j : nb.targets[i]) {
      coef[canon(i, j)] += 1.0;
      double dij = sq_dist_dense(pi, proj.data() + j * p.d, p.d);
      for (std::size_t l2 : nb.impostors[i]) {
        double dil = sq_dist_dense(pi, proj.data() + l2 * p.d, p.d);
        if (1.0 + dij - dil > 0.0) {
          coef[canon(i, j)] += mu;
          coef[canon(i, l2)] -= mu;
        }
      }
    }
  }
  std::vector<double> m(p.d * p.d, 0.0);
  std::vector<double> v(p.d);
  for (const auto& [pair, w] : coef) {
    if (w == 0.0) continue;
    const double* a = p.row(pair.first);
    const double* b = p.row(pair.second);
    for (std::size_t c = 0; c < p.d; ++c) v[c] = a[c] - b[c];
    for (std::size_t r = 0; r < p.d; ++r) {
      double vr = w * v[r];
      if (vr == 0.0) continue;
      double* mrow = m.data() + r * p.d;
      for (std::size_t c = 0; c < p.d; ++c) mrow[c] += vr * v[c];
    }
  }
  std::vector<double> g(p.d * p.d, 0.0);
  for (std::size_t r = 0; r < p.d; ++r) {
    const double* lrow = l.data() + r * p.d;
    double* grow = g.data() + r * p.d;
    for (std::size_t k = 0; k < p.d; ++k) {
      double lv = lrow[k];
      if (lv == 0.0) continue;
      const double* mrow = m.data() + k * p.d;
      for (std::size_t c = 0; c < p.d; ++c) grow[c] += 2.0 * lv * mrow[c];
    }
  }
  return g;
}

std::vector<std::uint32_t> observed_dims(std::span<const FeatureVector> vectors) {
  std::set<std::uint32_t> seen;
  for (const FeatureVector& v : vectors) {
    for (const auto& [i, x] : v.items) seen.insert(i);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

LmnnResult learn_lmnn(std::span<const FeatureVector> vectors, std::span<const int> labels,
                      const LmnnConfig& config, std::span<const std::uint32_t> dims) {
  if (vectors.size() != labels.size()) throw LengthMismatch("vectors/labels size mismatch");
  long n_pos = 0;
  long n_neg = 0;
  for (int y : labels) (y > 0 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) throw DegenerateLabels("metric learning needs both classes");
  if (n_pos < config.k_targets + 1 || n_neg < config.k_targets + 1) {
    throw TooFewInstances("each class needs at least k_targets + 1 instances");
  }

  std::vector<std::uint32_t> dim_vec(dims.begin(), dims.end());
  if (dim_vec.empty()) dim_vec = observed_dims(vectors);
  if (dim_vec.empty()) throw EmptyVocabulary("no observed coordinates for metric learning");

  DenseProblem p = densify(vectors, dim_vec);
  Neighborhoods nb = build_neighborhoods(p, labels, config);

  std::vector<double> l(p.d * p.d, 0.0);
  for (std::size_t r = 0; r < p.d; ++r) l[r * p.d + r] = 1.0;

  LmnnResult result;
  double obj = objective_of(p, nb, config.mu, l);
  result.objective.push_back(obj);

  double step = config.step;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    std::vector<double> g = gradient_of(p, nb, config.mu, l);
    double gnorm = 0.0;
    for (double x : g) gnorm += x * x;
    if (gnorm == 0.0) break;

    bool accepted = false;
    std::vector<double> candidate(l.size());
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t i = 0; i < l.size(); ++i) candidate[i] = l[i] - step * g[i];
      double cand_obj = objective_of(p, nb, config.mu, candidate);
      if (cand_obj < obj) {
        l.swap(candidate);
        double prev = obj;
        obj = cand_obj;
        result.objective.push_back(obj);
        accepted = true;
        step *= 1.1;
        if (prev - obj < config.tol * std::max(1.0, prev)) iter = config.max_iter;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }

  MahalanobisTransform t;
  t.input_dims = std::move(dim_vec);
  t.out_dim = p.d;
  t.l = std::move(l);
  result.metric = Metric::mahalanobis(std::move(t));
  return result;
}

double lmnn_objective(std::span<const FeatureVector> vectors, std::span<const int> labels,
                      const LmnnConfig& config, const MahalanobisTransform& transform) {
  if (vectors.size() != labels.size()) throw LengthMismatch("vectors/labels size mismatch");
  if (transform.out_dim != transform.cols()) {
    throw DimensionMismatch("objective requires a square transform");
  }
  DenseProblem p = densify(vectors, transform.input_dims);
  Neighborhoods nb = build_neighborhoods(p, labels, config);
  return objective_of(p, nb, config.mu, transform.l);
}

std::vector<double> lmnn_gradient(std::span<const FeatureVector> vectors,
                                  std::span<const int> labels, const LmnnConfig& config,
                                  const MahalanobisTransform& transform) {
  if (vectors.size() != labels.size()) throw LengthMismatch("vectors/labels size mismatch");
  if (transform.out_dim != transform.cols()) {
    throw DimensionMismatch("gradient requires a square transform");
  }
  DenseProblem p = densify(vectors, transform.input_dims);
  Neighborhoods nb = build_neighborhoods(p, labels, config);
  return gradient_of(p, nb, config.mu, transform.l);
}

}  // namespace sockverif
