#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "sockverif/errors.hpp"
#include "sockverif/spy.hpp"
#include "sockverif/synth.hpp"

using namespace sockverif;
using testutil::vec;

namespace {

std::vector<FeatureVector> points1d(std::initializer_list<double> xs) {
  std::vector<FeatureVector> out;
  for (double x : xs) out.push_back(vec({x}));
  return out;
}

std::vector<FeatureVector> random_points(std::mt19937& gen, int n, std::uint32_t dim) {
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::vector<FeatureVector> out;
  for (int i = 0; i < n; ++i) {
    FeatureVector v;
    for (std::uint32_t d = 0; d < dim; ++d) v.items.push_back({d, val(gen)});
    out.push_back(std::move(v));
  }
  return out;
}

// Reference ranking of test points against one spy: (distance, index) ascending.
std::vector<std::size_t> reference_order(const std::vector<FeatureVector>& test,
                                         const FeatureVector& spy) {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t j = 0; j < test.size(); ++j) {
    scored.push_back({distance(test[j], spy, Metric::euclidean()), j});
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::size_t> order;
  for (const auto& [d, j] : scored) order.push_back(j);
  return order;
}

std::vector<std::size_t> intersect_all(std::vector<std::vector<std::size_t>> sets) {
  for (auto& s : sets) std::sort(s.begin(), s.end());
  std::vector<std::size_t> acc = sets.front();
  for (std::size_t k = 1; k < sets.size(); ++k) {
    std::vector<std::size_t> next;
    std::set_intersection(acc.begin(), acc.end(), sets[k].begin(), sets[k].end(),
                          std::back_inserter(next));
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

TEST_CASE("the most central positive becomes the spy") {
  std::vector<FeatureVector> pos = points1d({0.0, 1.0, 10.0});
  std::vector<std::size_t> spies = select_spies(pos, 1, Metric::euclidean());
  CHECK(spies == std::vector<std::size_t>{1});
}

TEST_CASE("coincident positives tie by index") {
  std::vector<FeatureVector> pos = points1d({5.0, 5.0, 9.0});
  std::vector<std::size_t> spies = select_spies(pos, 2, Metric::euclidean());
  CHECK(spies == std::vector<std::size_t>{0, 1});
}

TEST_CASE("spy count clamps to the positive set") {
  std::vector<FeatureVector> pos = points1d({0.0, 1.0, 2.0});
  CHECK(select_spies(pos, 10, Metric::euclidean()).size() == 3);
  CHECK_THROWS_AS(select_spies({}, 1, Metric::euclidean()), EmptyInput);
  CHECK_THROWS_AS(select_spies(pos, 0, Metric::euclidean()), Error);
}

TEST_CASE("nearest sets intersect across spies") {
  std::vector<FeatureVector> test = points1d({0.0, 1.0, 2.0, 3.0, 10.0});
  std::vector<FeatureVector> spies = points1d({0.9, 2.1});
  CHECK(obtain_nn(test, spies, 2, Metric::euclidean()).empty());
  CHECK(obtain_nn(test, spies, 3, Metric::euclidean()) == std::vector<std::size_t>{1, 2});
  std::vector<std::size_t> all = {0, 1, 2, 3, 4};
  CHECK(obtain_nn(test, spies, 5, Metric::euclidean()) == all);
  CHECK(obtain_nn(test, spies, 99, Metric::euclidean()) == all);
  CHECK_THROWS_AS(obtain_nn(test, {}, 2, Metric::euclidean()), EmptyInput);
}

TEST_CASE("farthest sets mirror a manual scan") {
  std::mt19937 gen(11);
  std::vector<FeatureVector> test = random_points(gen, 15, 2);
  std::vector<FeatureVector> spies = random_points(gen, 2, 2);

  std::vector<std::vector<std::size_t>> suffixes;
  for (const FeatureVector& spy : spies) {
    std::vector<std::size_t> order = reference_order(test, spy);
    suffixes.emplace_back(order.end() - 6, order.end());
  }
  std::vector<std::size_t> expected = intersect_all(std::move(suffixes));
  CHECK(obtain_fn(test, spies, 6, Metric::euclidean()) == expected);
}

TEST_CASE("nearest and farthest selections match the ranking oracle") {
  std::mt19937 gen(23);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 20 + int(gen() % 31);
    std::vector<FeatureVector> test = random_points(gen, n, 3);
    std::vector<FeatureVector> spies = random_points(gen, 1 + int(gen() % 3), 3);
    int n_q = 1 + int(gen() % 5);
    int n_r = 1 + int(gen() % 12);

    std::vector<std::vector<std::size_t>> prefixes;
    std::vector<std::vector<std::size_t>> suffixes;
    for (const FeatureVector& spy : spies) {
      std::vector<std::size_t> order = reference_order(test, spy);
      prefixes.emplace_back(order.begin(), order.begin() + n_q);
      suffixes.emplace_back(order.end() - n_r, order.end());
    }
    std::vector<std::size_t> q = obtain_nn(test, spies, n_q, Metric::euclidean());
    std::vector<std::size_t> r = obtain_fn(test, spies, n_r, Metric::euclidean());
    CHECK(q == intersect_all(std::move(prefixes)));
    CHECK(r == intersect_all(std::move(suffixes)));

    // a point cannot be both among the nearest and among the farthest
    if (n_q + n_r <= n) {
      std::vector<std::size_t> overlap;
      std::set_intersection(q.begin(), q.end(), r.begin(), r.end(),
                            std::back_inserter(overlap));
      CHECK(overlap.empty());
    }
  }
}

TEST_CASE("label views cover every active representation") {
  SynthSpec spec;
  spec.n_authors = 4;
  spec.docs_per_author_per_domain = 10;
  spec.domains = {Domain::Hotel};
  spec.separation = 0.9;
  spec.seed = 5;
  Corpus corpus = generate_corpus(spec);

  const std::string target = corpus.authors()[0];
  std::vector<const Document*> docs;
  std::vector<int> labels;
  for (const Document& d : corpus.documents()) {
    docs.push_back(&d);
    labels.push_back(d.author == target ? 1 : -1);
  }

  CoLabelConfig config;
  config.seed = 3;
  CoLabelViews views = CoLabelViews::train(docs, labels, config);
  CHECK(views.active_count() == 5);

  const Document& probe = corpus.documents()[0];
  std::vector<int> votes = views.view_labels(probe);
  REQUIRE(votes.size() == 5);
  for (int v : votes) CHECK((v == 1 || v == -1));
  CHECK(views.verify(probe, 1) == views.majority(votes, 1));
  CHECK(views.verify(probe, -1) == views.majority(votes, -1));

  CHECK(views.majority(std::vector<int>{1, 1, 1, -1, -1}, 1));
  CHECK_FALSE(views.majority(std::vector<int>{1, 1, -1, -1, -1}, 1));
  CHECK(views.majority(std::vector<int>{1, 1, -1, -1, -1}, -1));
  CHECK(views.majority(std::vector<int>{}, 1));  // no active views vetoes nothing

  CHECK_THROWS_AS(CoLabelViews::train({}, {}, config), EmptyTraining);
  CHECK_THROWS_AS(CoLabelViews::train(docs, std::vector<int>(3, 1), config), LengthMismatch);
}

TEST_CASE("view filtering returns ordered subsets") {
  SynthSpec spec;
  spec.n_authors = 4;
  spec.docs_per_author_per_domain = 8;
  spec.domains = {Domain::Hotel};
  spec.separation = 0.9;
  spec.seed = 9;
  Corpus corpus = generate_corpus(spec);

  const std::string target = corpus.authors()[0];
  std::vector<const Document*> train_docs;
  std::vector<int> labels;
  std::vector<const Document*> test_docs;
  for (const Document& d : corpus.documents()) {
    if (d.author == target || d.author == corpus.authors()[1]) {
      train_docs.push_back(&d);
      labels.push_back(d.author == target ? 1 : -1);
    } else {
      test_docs.push_back(&d);
    }
  }

  std::vector<std::size_t> q = {0, 3, 5};
  std::vector<std::size_t> r = {1, 2, 7, 9};
  CoLabelConfig config;
  config.seed = 4;
  auto [q_v, r_v] = co_label_verify(train_docs, labels, test_docs, q, r, config);

  CHECK(std::includes(q.begin(), q.end(), q_v.begin(), q_v.end()));
  CHECK(std::includes(r.begin(), r.end(), r_v.begin(), r_v.end()));
  CHECK(std::is_sorted(q_v.begin(), q_v.end()));
  CHECK(std::is_sorted(r_v.begin(), r_v.end()));

  // each survivor individually passes the same majority check
  CoLabelViews views = CoLabelViews::train(train_docs, labels, config);
  for (std::size_t j : q) {
    bool kept = std::find(q_v.begin(), q_v.end(), j) != q_v.end();
    CHECK(kept == views.verify(*test_docs[j], 1));
  }
  for (std::size_t j : r) {
    bool kept = std::find(r_v.begin(), r_v.end(), j) != r_v.end();
    CHECK(kept == views.verify(*test_docs[j], -1));
  }
}

TEST_CASE("augmented scoring reduces to plain CV without pseudo-labels") {
  LabeledDataset train;
  for (int i = 0; i < 20; ++i) {
    double x = (i % 2 == 0) ? 1.0 + i * 0.01 : -1.0 - i * 0.01;
    train.push(vec({x, 0.3 * (i % 5)}), i % 2 == 0 ? 1 : -1);
  }
  TrainerConfig trainer;
  trainer.dim = 2;

  Metrics plain = cross_validate(train, trainer, kFoldCount, 77);
  Metrics same = cv_improved_training(train, {}, {}, trainer, 77);
  CHECK(same.tp == plain.tp);
  CHECK(same.fp == plain.fp);
  CHECK(same.fn == plain.fn);
  CHECK(same.tn == plain.tn);
  CHECK(same.f1 == plain.f1);

  std::vector<FeatureVector> q = {vec({1.5, 0.2}), vec({1.7, 0.1})};
  std::vector<FeatureVector> r = {vec({-1.6, 0.4})};
  Metrics augmented = cv_improved_training(train, q, r, trainer, 77);
  LabeledDataset manual = train;
  for (const FeatureVector& v : q) manual.push(v, 1);
  for (const FeatureVector& v : r) manual.push(v, -1);
  Metrics expected = cross_validate(manual, trainer, kFoldCount, 77);
  CHECK(augmented.tp == expected.tp);
  CHECK(augmented.fp == expected.fp);
  CHECK(augmented.fn == expected.fn);
  CHECK(augmented.tn == expected.tn);
}

TEST_CASE("the grid sweep tries every triple and keeps the first best") {
  std::mt19937 gen(57);
  LabeledDataset train;
  for (int i = 0; i < 12; ++i) {
    double cx = i < 6 ? 1.0 : -1.0;
    train.push(vec({cx + 0.05 * (i % 6), 0.1 * (i % 3)}), i < 6 ? 1 : -1);
  }
  std::vector<FeatureVector> test;
  std::uniform_real_distribution<double> val(-1.5, 1.5);
  for (int i = 0; i < 30; ++i) test.push_back(vec({val(gen), val(gen)}));

  SpyProblem problem;
  problem.train = &train;
  problem.test_vectors = test;
  problem.trainer.dim = 2;
  problem.co_labeling = false;
  problem.seed = 12;

  SpyOutcome outcome = spy_induction(problem);
  SpyGrids grids;
  REQUIRE(outcome.trials.size() == grids.n_s.size() * grids.n_q.size() * grids.n_r.size());

  std::size_t t = 0;
  for (int n_s : grids.n_s) {
    for (int n_q : grids.n_q) {
      for (int n_r : grids.n_r) {
        CHECK(outcome.trials[t].params == SpyParams{n_s, n_q, n_r});
        ++t;
      }
    }
  }

  // winner is the earliest trial with the maximal CV score
  std::size_t best = 0;
  for (std::size_t i = 1; i < outcome.trials.size(); ++i) {
    if (outcome.trials[i].cv.f1 > outcome.trials[best].cv.f1) best = i;
  }
  CHECK(outcome.chosen == outcome.trials[best].params);
  CHECK(outcome.chosen_cv.f1 == outcome.trials[best].cv.f1);

  // without co-labeling nothing is vetoed
  for (const SpyTrial& trial : outcome.trials) {
    CHECK(trial.qv_size == trial.q_size);
    CHECK(trial.rv_size == trial.r_size);
  }

  // each trial's candidate sets match the standalone selection functions
  std::vector<FeatureVector> positives;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.labels[i] > 0) positives.push_back(train.vectors[i]);
  }
  for (const SpyTrial& trial : outcome.trials) {
    std::vector<std::size_t> idx = select_spies(positives, trial.params.n_s, problem.metric);
    std::vector<FeatureVector> spies;
    for (std::size_t s : idx) spies.push_back(positives[s]);
    CHECK(trial.q_size ==
          obtain_nn(test, spies, trial.params.n_q, problem.metric).size());
    CHECK(trial.r_size ==
          obtain_fn(test, spies, trial.params.n_r, problem.metric).size());
  }

  // chosen sets feed the final model
  {
    std::vector<std::size_t> idx = select_spies(positives, outcome.chosen.n_s, problem.metric);
    std::vector<FeatureVector> spies;
    for (std::size_t s : idx) spies.push_back(positives[s]);
    CHECK(outcome.final_q == obtain_nn(test, spies, outcome.chosen.n_q, problem.metric));
    CHECK(outcome.final_r == obtain_fn(test, spies, outcome.chosen.n_r, problem.metric));
  }

  SpyOutcome again = spy_induction(problem);
  CHECK(again.chosen == outcome.chosen);
  CHECK(again.final_q == outcome.final_q);
  CHECK(again.final_r == outcome.final_r);
  REQUIRE(again.trials.size() == outcome.trials.size());
  for (std::size_t i = 0; i < again.trials.size(); ++i) {
    CHECK(again.trials[i].cv.f1 == outcome.trials[i].cv.f1);
  }
}

TEST_CASE("a custom grid shrinks the sweep") {
  LabeledDataset train;
  for (int i = 0; i < 12; ++i) {
    train.push(vec({i < 6 ? 1.0 + 0.1 * i : -1.0 - 0.1 * i, 0.2 * (i % 4)}), i < 6 ? 1 : -1);
  }
  std::vector<FeatureVector> test;
  for (int i = 0; i < 10; ++i) test.push_back(vec({0.3 * i - 1.5, 0.1 * i}));

  SpyProblem problem;
  problem.train = &train;
  problem.test_vectors = test;
  problem.trainer.dim = 2;
  problem.co_labeling = false;
  problem.grids = {{1}, {2}, {3, 5}};
  SpyOutcome outcome = spy_induction(problem);
  REQUIRE(outcome.trials.size() == 2);
  CHECK(outcome.trials[0].params == SpyParams{1, 2, 3});
  CHECK(outcome.trials[1].params == SpyParams{1, 2, 5});
}

TEST_CASE("degenerate spy problems are rejected") {
  SpyProblem problem;
  CHECK_THROWS_AS(spy_induction(problem), Error);

  LabeledDataset empty;
  problem.train = &empty;
  CHECK_THROWS_AS(spy_induction(problem), EmptyTraining);

  LabeledDataset negatives_only;
  for (int i = 0; i < 4; ++i) negatives_only.push(vec({double(i)}), -1);
  problem.train = &negatives_only;
  CHECK_THROWS_AS(spy_induction(problem), DegenerateLabels);
}
