#include "sockverif/spy.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "sockverif/errors.hpp"
#include "sockverif/rng.hpp"

namespace sockverif {

namespace {

// Positive indices ordered by (total distance to other positives, index).
std::vector<std::size_t> opd_ranking(std::span<const FeatureVector> positives,
                                     const Metric& metric) {
  std::size_t n = positives.size();
  std::vector<double> total(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = distance(positives[i], positives[j], metric);
      total[i] += d;
      total[j] += d;
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (total[a] != total[b]) return total[a] < total[b];
    return a < b;
  });
  return order;
}

// Test indices ordered by (distance to the spy, index), ascending.
std::vector<std::size_t> spy_order(std::span<const FeatureVector> test,
                                   const FeatureVector& spy, const Metric& metric) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(test.size());
  for (std::size_t j = 0; j < test.size(); ++j) {
    scored.emplace_back(distance(test[j], spy, metric), j);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::size_t> order;
  order.reserve(test.size());
  for (const auto& [d, j] : scored) order.push_back(j);
  return order;
}

std::vector<std::size_t> intersect_sorted(std::vector<std::vector<std::size_t>> sets) {
  if (sets.empty()) return {};
  for (auto& s : sets) std::sort(s.begin(), s.end());
  std::vector<std::size_t> acc = std::move(sets[0]);
  for (std::size_t k = 1; k < sets.size(); ++k) {
    std::vector<std::size_t> next;
    std::set_intersection(acc.begin(), acc.end(), sets[k].begin(), sets[k].end(),
                          std::back_inserter(next));
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

std::vector<std::size_t> select_spies(std::span<const FeatureVector> positives, int n_s,
                                      const Metric& metric) {
  if (positives.empty()) throw EmptyInput("no positives to select spies from");
  if (n_s < 1) throw Error("n_s must be positive");
  std::vector<std::size_t> order = opd_ranking(positives, metric);
  auto keep = std::min<std::size_t>(static_cast<std::size_t>(n_s), order.size());
  order.resize(keep);
  return order;
}

std::vector<std::size_t> obtain_nn(std::span<const FeatureVector> test,
                                   std::span<const FeatureVector> spies, int n_q,
                                   const Metric& metric) {
  if (spies.empty()) throw EmptyInput("no spies given");
  if (n_q < 1) throw Error("n_q must be positive");
  auto take = std::min<std::size_t>(static_cast<std::size_t>(n_q), test.size());
  std::vector<std::vector<std::size_t>> per_spy;
  per_spy.reserve(spies.size());
  for (const FeatureVector& spy : spies) {
    std::vector<std::size_t> order = spy_order(test, spy, metric);
    order.resize(take);
    per_spy.push_back(std::move(order));
  }
  return intersect_sorted(std::move(per_spy));
}

std::vector<std::size_t> obtain_fn(std::span<const FeatureVector> test,
                                   std::span<const FeatureVector> spies, int n_r,
                                   const Metric& metric) {
  if (spies.empty()) throw EmptyInput("no spies given");
  if (n_r < 1) throw Error("n_r must be positive");
  auto take = std::min<std::size_t>(static_cast<std::size_t>(n_r), test.size());
  std::vector<std::vector<std::size_t>> per_spy;
  per_spy.reserve(spies.size());
  for (const FeatureVector& spy : spies) {
    std::vector<std::size_t> order = spy_order(test, spy, metric);
    per_spy.emplace_back(order.end() - static_cast<long>(take), order.end());
  }
  return intersect_sorted(std::move(per_spy));
}

CoLabelViews CoLabelViews::train(std::span<const Document* const> train_docs,
                                 std::span<const int> labels, const CoLabelConfig& config) {
  if (train_docs.size() != labels.size()) throw LengthMismatch("docs/labels size mismatch");
  if (train_docs.empty()) throw EmptyTraining("no documents to train views on");

  std::vector<DocumentEvents> events;
  events.reserve(train_docs.size());
  for (const Document* d : train_docs) events.push_back(extract_events(*d));
  std::vector<const DocumentEvents*> event_ptrs;
  for (const auto& e : events) event_ptrs.push_back(&e);
  std::span<const DocumentEvents* const> events_span(event_ptrs);

  std::vector<Vocabulary> vocabs;
  vocabs.push_back(build_vocabulary(events_span, {FeatureKind::Unigram}));
  vocabs.push_back(build_vocabulary(events_span, {FeatureKind::Unigram, FeatureKind::Bigram}));
  vocabs.push_back(build_vocabulary(events_span, {FeatureKind::Ptf}));
  vocabs.push_back(build_vocabulary(events_span, {FeatureKind::Pos}));

  {
    std::vector<const Document*> pos_docs;
    std::vector<const Document*> neg_docs;
    for (std::size_t i = 0; i < train_docs.size(); ++i) {
      (labels[i] > 0 ? pos_docs : neg_docs).push_back(train_docs[i]);
    }
    std::vector<std::string> joint = ptf_key_set(train_docs);
    std::vector<VocabEntry> entries;
    if (!joint.empty() && !pos_docs.empty() && !neg_docs.empty()) {
      StylisticLM target = build_stylistic_lm(pos_docs, joint, config.epsilon);
      StylisticLM background = build_stylistic_lm(neg_docs, joint, config.epsilon);
      for (const std::string& key :
           select_delta_kl_features(target, background, config.dkl_threshold)) {
        entries.push_back({FeatureKind::Ptf, key});
      }
    }
    Vocabulary lexical =
        build_vocabulary(events_span, {FeatureKind::Unigram, FeatureKind::Bigram});
    for (const VocabEntry& e : lexical.entries()) entries.push_back(e);
    vocabs.push_back(Vocabulary::from_entries(std::move(entries)));
  }

  CoLabelViews views;
  for (Vocabulary& vocab : vocabs) {
    if (vocab.empty()) continue;
    LabeledDataset data;
    for (std::size_t i = 0; i < train_docs.size(); ++i) {
      data.push(vectorize(events[i], vocab), labels[i]);
    }
    TrainerConfig cfg;
    cfg.kind = ClassifierKind::SvmRbf;
    cfg.c = config.svm_c;
    cfg.tol = config.tol;
    cfg.max_iter = 8000;  // wide boxes certify slowly on near-duplicate rows
    cfg.dim = vocab.size();
    cfg.seed = derive_seed(config.seed, "view" + std::to_string(views.views_.size()));
    TrainedModel model = train_svm_rbf(data, cfg);
    views.views_.push_back({std::move(vocab), std::move(model)});
  }
  return views;
}

std::vector<int> CoLabelViews::view_labels(const Document& doc) const {
  DocumentEvents events = extract_events(doc);
  std::vector<int> labels;
  labels.reserve(views_.size());
  for (const View& view : views_) {
    labels.push_back(predict(view.model, vectorize(events, view.vocab)).second);
  }
  return labels;
}

bool CoLabelViews::majority(std::span<const int> labels, int pseudo_label) const {
  if (labels.empty()) return true;
  std::size_t agree = 0;
  for (int l : labels) {
    if (l == (pseudo_label > 0 ? 1 : -1)) ++agree;
  }
  return 2 * agree >= labels.size() + 1;
}

bool CoLabelViews::verify(const Document& doc, int pseudo_label) const {
  std::vector<int> labels = view_labels(doc);
  return majority(labels, pseudo_label);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> co_label_verify(
    std::span<const Document* const> train_docs, std::span<const int> labels,
    std::span<const Document* const> test_docs, std::span<const std::size_t> q,
    std::span<const std::size_t> r, const CoLabelConfig& config) {
  CoLabelViews views = CoLabelViews::train(train_docs, labels, config);
  std::vector<std::size_t> q_v;
  std::vector<std::size_t> r_v;
  for (std::size_t j : q) {
    if (views.verify(*test_docs[j], 1)) q_v.push_back(j);
  }
  for (std::size_t j : r) {
    if (views.verify(*test_docs[j], -1)) r_v.push_back(j);
  }
  return {std::move(q_v), std::move(r_v)};
}

Metrics cv_improved_training(const LabeledDataset& train, std::span<const FeatureVector> q_v,
                             std::span<const FeatureVector> r_v, const TrainerConfig& trainer,
                             std::uint64_t seed) {
  LabeledDataset augmented = train;
  for (const FeatureVector& v : q_v) augmented.push(v, 1);
  for (const FeatureVector& v : r_v) augmented.push(v, -1);
  return cross_validate(augmented, trainer, kFoldCount, seed);
}

SpyOutcome spy_induction(const SpyProblem& problem) {
  if (problem.train == nullptr) throw Error("spy problem has no training set");
  const LabeledDataset& train = *problem.train;
  if (train.vectors.empty()) throw EmptyTraining("spy problem has empty training set");

  std::vector<FeatureVector> positives;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.labels[i] > 0) positives.push_back(train.vectors[i]);
  }
  if (positives.empty()) throw DegenerateLabels("spy problem has no positive instances");

  int max_ns = 1;
  for (int v : problem.grids.n_s) max_ns = std::max(max_ns, v);
  std::vector<std::size_t> spy_rank =
      select_spies(positives, max_ns, problem.metric);

  std::vector<std::vector<std::size_t>> orders;  // per spy, ascending by distance
  orders.reserve(spy_rank.size());
  for (std::size_t s : spy_rank) {
    orders.push_back(spy_order(problem.test_vectors, positives[s], problem.metric));
  }

  std::optional<CoLabelViews> views;
  if (problem.co_labeling && !problem.train_docs.empty()) {
    views = CoLabelViews::train(problem.train_docs, train.labels, problem.co_label);
  }
  std::vector<std::optional<std::vector<int>>> label_cache(problem.test_vectors.size());
  auto verified = [&](std::size_t j, int pseudo) {
    if (!views.has_value()) return true;
    if (!label_cache[j].has_value()) label_cache[j] = views->view_labels(*problem.test_docs[j]);
    return views->majority(*label_cache[j], pseudo);
  };

  std::uint64_t cv_seed = derive_seed(problem.seed, "spy-cv");
  std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, Metrics> memo;

  SpyOutcome outcome;
  double best_f1 = -1.0;
  std::vector<std::size_t> best_q;
  std::vector<std::size_t> best_r;

  for (int n_s : problem.grids.n_s) {
    auto ns = std::min<std::size_t>(static_cast<std::size_t>(n_s), spy_rank.size());
    for (int n_q : problem.grids.n_q) {
      auto nq = std::min<std::size_t>(static_cast<std::size_t>(n_q),
                                      problem.test_vectors.size());
      std::vector<std::vector<std::size_t>> prefixes;
      for (std::size_t s = 0; s < ns; ++s) {
        prefixes.emplace_back(orders[s].begin(), orders[s].begin() + static_cast<long>(nq));
      }
      std::vector<std::size_t> q = intersect_sorted(std::move(prefixes));
      for (int n_r : problem.grids.n_r) {
        auto nr = std::min<std::size_t>(static_cast<std::size_t>(n_r),
                                        problem.test_vectors.size());
        std::vector<std::vector<std::size_t>> suffixes;
        for (std::size_t s = 0; s < ns; ++s) {
          suffixes.emplace_back(orders[s].end() - static_cast<long>(nr), orders[s].end());
        }
        std::vector<std::size_t> r = intersect_sorted(std::move(suffixes));

        SpyTrial trial;
        trial.params = {n_s, n_q, n_r};
        trial.q_size = q.size();
        trial.r_size = r.size();

        std::vector<std::size_t> q_v;
        std::vector<std::size_t> r_v;
        for (std::size_t j : q) {
          if (verified(j, 1)) q_v.push_back(j);
        }
        for (std::size_t j : r) {
          if (verified(j, -1)) r_v.push_back(j);
        }
        trial.qv_size = q_v.size();
        trial.rv_size = r_v.size();

        auto key = std::make_pair(q_v, r_v);
        auto it = memo.find(key);
        if (it == memo.end()) {
          std::vector<FeatureVector> qv_vecs;
          std::vector<FeatureVector> rv_vecs;
          for (std::size_t j : q_v) qv_vecs.push_back(problem.test_vectors[j]);
          for (std::size_t j : r_v) rv_vecs.push_back(problem.test_vectors[j]);
          Metrics m = cv_improved_training(train, qv_vecs, rv_vecs, problem.trainer, cv_seed);
          it = memo.emplace(std::move(key), m).first;
        }
        trial.cv = it->second;
        outcome.trials.push_back(trial);

        if (trial.cv.f1 > best_f1) {
          best_f1 = trial.cv.f1;
          outcome.chosen = trial.params;
          outcome.chosen_cv = trial.cv;
          best_q = q_v;
          best_r = r_v;
        }
      }
    }
  }

  LabeledDataset final_set = train;
  for (std::size_t j : best_q) final_set.push(problem.test_vectors[j], 1);
  for (std::size_t j : best_r) final_set.push(problem.test_vectors[j], -1);
  outcome.final_model = train_model(final_set, problem.trainer);
  outcome.final_q = std::move(best_q);
  outcome.final_r = std::move(best_r);
  return outcome;
}

}  // namespace sockverif
