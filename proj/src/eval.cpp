#include "sockverif/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "sockverif/errors.hpp"
#include "sockverif/rng.hpp"

namespace sockverif {

const char* system_kind_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::Base: return "base";
    case SystemKind::SpyEu: return "spy-eu";
    case SystemKind::SpyLm: return "spy-lm";
    case SystemKind::SpyEuC: return "spy-euc";
    case SystemKind::SpyLmC: return "spy-lmc";
  }
  return "?";
}

SystemKind parse_system_kind(std::string_view name) {
  if (name == "base") return SystemKind::Base;
  if (name == "spy-eu" || name == "eu") return SystemKind::SpyEu;
  if (name == "spy-lm" || name == "lm") return SystemKind::SpyLm;
  if (name == "spy-euc" || name == "euc") return SystemKind::SpyEuC;
  if (name == "spy-lmc" || name == "lmc") return SystemKind::SpyLmC;
  throw InvalidSpec("unknown system: " + std::string(name));
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  if (name == "lr" || name == "logreg") return ClassifierKind::Logreg;
  if (name == "svm") return ClassifierKind::SvmRbf;
  if (name == "knn") return ClassifierKind::Knn;
  throw InvalidSpec("unknown classifier: " + std::string(name));
}

const char* feature_space_name(FeatureSpaceKind kind) {
  switch (kind) {
    case FeatureSpaceKind::Lexical: return "lexical";
    case FeatureSpaceKind::LexicalPtf: return "lexical-ptf";
    case FeatureSpaceKind::LexicalPtfChi2: return "lexical-ptf-chi2";
    case FeatureSpaceKind::LexicalDklPtf: return "lexical-dkl-ptf";
  }
  return "?";
}

FeatureSpaceKind parse_feature_space(std::string_view name) {
  if (name == "lexical") return FeatureSpaceKind::Lexical;
  if (name == "lexical-ptf") return FeatureSpaceKind::LexicalPtf;
  if (name == "lexical-ptf-chi2") return FeatureSpaceKind::LexicalPtfChi2;
  if (name == "lexical-dkl-ptf") return FeatureSpaceKind::LexicalDklPtf;
  throw InvalidSpec("unknown feature space: " + std::string(name));
}

namespace {

struct ClassCounts {
  std::map<std::string, long> pos;
  std::map<std::string, long> neg;
  bool both_classes = false;
};

ClassCounts ptf_class_counts(std::span<const DocumentEvents* const> events,
                             std::span<const int> labels) {
  ClassCounts out;
  bool any_pos = false;
  bool any_neg = false;
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto& bucket = labels[i] > 0 ? out.pos : out.neg;
    (labels[i] > 0 ? any_pos : any_neg) = true;
    for (const auto& [key, n] : events[i]->of(FeatureKind::Ptf)) bucket[key] += n;
  }
  out.both_classes = any_pos && any_neg;
  return out;
}

std::vector<std::string> joint_keys(const ClassCounts& counts) {
  std::vector<std::string> keys;
  for (const auto& [key, n] : counts.pos) keys.push_back(key);
  for (const auto& [key, n] : counts.neg) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

}  // namespace

FeatureSpace build_feature_space(std::span<const DocumentEvents* const> train_events,
                                 std::span<const int> labels, FeatureSpaceKind kind,
                                 const SpaceParams& params) {
  if (train_events.size() != labels.size()) throw LengthMismatch("events/labels size mismatch");
  if (train_events.empty()) throw EmptyInput("no documents to build a feature space from");

  Vocabulary lexical = build_vocabulary(
      train_events, {FeatureKind::Unigram, FeatureKind::Bigram}, params.min_df);
  std::vector<VocabEntry> entries = lexical.entries();

  ClassCounts counts = ptf_class_counts(train_events, labels);
  std::vector<std::string> joint = joint_keys(counts);
  std::optional<StylisticLM> target;
  std::optional<StylisticLM> background;
  if (!joint.empty() && counts.both_classes) {
    target = build_stylistic_lm_from_counts(counts.pos, joint, params.epsilon);
    background = build_stylistic_lm_from_counts(counts.neg, joint, params.epsilon);
  }

  switch (kind) {
    case FeatureSpaceKind::Lexical:
      break;
    case FeatureSpaceKind::LexicalPtf: {
      Vocabulary ptf = build_vocabulary(train_events, {FeatureKind::Ptf}, params.min_df);
      for (const VocabEntry& e : ptf.entries()) entries.push_back(e);
      break;
    }
    case FeatureSpaceKind::LexicalPtfChi2: {
      Vocabulary ptf = build_vocabulary(train_events, {FeatureKind::Ptf}, params.min_df);
      if (!ptf.empty()) {
        std::vector<FeatureVector> vectors;
        vectors.reserve(train_events.size());
        for (const DocumentEvents* ev : train_events) vectors.push_back(vectorize(*ev, ptf));
        Vocabulary selected = chi2_select(ptf, vectors, labels, params.chi2_fraction);
        for (const VocabEntry& e : selected.entries()) entries.push_back(e);
      }
      break;
    }
    case FeatureSpaceKind::LexicalDklPtf: {
      if (target.has_value()) {
        for (const std::string& key :
             select_delta_kl_features(*target, *background, params.dkl_threshold)) {
          entries.push_back({FeatureKind::Ptf, key});
        }
      }
      break;
    }
  }

  FeatureSpace space;
  space.vocab = Vocabulary::from_entries(std::move(entries));

  std::vector<FeatureVector> vectors;
  vectors.reserve(train_events.size());
  for (const DocumentEvents* ev : train_events) vectors.push_back(vectorize(*ev, space.vocab));
  space.salience = chi2_scores(space.vocab.size(), vectors, labels);
  if (space.vocab.has_kind(FeatureKind::Ptf) && target.has_value()) {
    auto [lo, hi] = space.vocab.kind_range(FeatureKind::Ptf);
    for (std::uint32_t idx = lo; idx < hi; ++idx) {
      const std::string& key = space.vocab.entry(idx).key;
      space.salience[idx] =
          std::fabs(delta_kl_feature(*target, *background, key));
    }
  }
  return space;
}

FeatureSpace build_feature_space(std::span<const Document* const> train_docs,
                                 std::span<const int> labels, FeatureSpaceKind kind,
                                 const SpaceParams& params) {
  std::vector<DocumentEvents> events;
  events.reserve(train_docs.size());
  for (const Document* d : train_docs) events.push_back(extract_events(*d));
  std::vector<const DocumentEvents*> ptrs;
  for (const auto& e : events) ptrs.push_back(&e);
  return build_feature_space(std::span<const DocumentEvents* const>(ptrs), labels, kind, params);
}

namespace {

struct Counts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  void add(int predicted, int gold) {
    if (predicted > 0 && gold > 0) ++tp;
    else if (predicted > 0) ++fp;
    else if (gold > 0) ++fn;
    else ++tn;
  }
};

std::vector<int> sorted_by_doc_id(const Corpus& corpus, std::vector<int> indices) {
  std::sort(indices.begin(), indices.end(),
            [&](int a, int b) { return corpus.doc(a).id < corpus.doc(b).id; });
  return indices;
}

TrainerConfig make_trainer(ClassifierKind kind, const ExperimentOptions& options,
                           std::size_t dim, std::uint64_t seed) {
  TrainerConfig cfg;
  cfg.kind = kind;
  cfg.c_reg = options.lr_c;
  cfg.c = options.svm_c;
  cfg.gamma = options.svm_gamma;
  cfg.k = options.knn_k;
  cfg.dim = dim;
  cfg.seed = seed;
  return cfg;
}

bool is_spy(SystemKind system) { return system != SystemKind::Base; }
bool wants_lmnn(SystemKind system) {
  return system == SystemKind::SpyLm || system == SystemKind::SpyLmC;
}
bool wants_colabel(SystemKind system) {
  return system == SystemKind::SpyEuC || system == SystemKind::SpyLmC;
}

// Runs fn(i) for i in [0, count) on a pool; exceptions are rethrown on the
// caller thread.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  unsigned n_threads = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct AuthorFoldOutcome {
  // counts[system][classifier]
  std::vector<std::vector<Counts>> counts;
};

}  // namespace

ExperimentResult run_experiment(const Corpus& corpus, const ProtocolConfig& protocol,
                                const ExperimentOptions& options, std::uint64_t seed) {
  if (protocol.protocol == Protocol::BalancedS1 || protocol.protocol == Protocol::BalancedS2) {
    throw InvalidSpec("balanced scenarios are run through the hardness evaluation");
  }
  if (!(protocol.diversity > 0.0) || protocol.diversity > 1.0) {
    throw InvalidSpec("diversity must be in (0, 1]");
  }
  if (options.folds < 1 || options.folds > kFoldCount) {
    throw InvalidSpec("folds must be in 1..5");
  }
  if (options.systems.empty() || options.classifiers.empty()) {
    throw InvalidSpec("at least one system and one classifier are required");
  }
  bool cross_domain = protocol.protocol == Protocol::CrossDomain;
  if (cross_domain && !protocol.test_domain.has_value()) {
    throw InvalidSpec("cross-domain evaluation needs a test domain");
  }

  std::vector<DocumentEvents> all_events(corpus.documents().size());
  parallel_for(all_events.size(), options.threads,
               [&](std::size_t i) { all_events[i] = extract_events(corpus.documents()[i]); });

  const std::vector<std::string>& authors = corpus.authors();
  std::vector<AuthorFoldOutcome> outcomes(authors.size());

  parallel_for(authors.size(), options.threads, [&](std::size_t ai) {
    const std::string& author = authors[ai];
    AuthorFoldOutcome& outcome = outcomes[ai];
    outcome.counts.assign(options.systems.size(),
                          std::vector<Counts>(options.classifiers.size()));

    for (int fold = 0; fold < options.folds; ++fold) {
      Split split;
      if (protocol.protocol == Protocol::InTraining) {
        split = split_in_training(corpus, author, protocol.diversity, fold, seed);
      } else {
        split = split_out_of_training(corpus, author, protocol.diversity, fold, seed,
                                      cross_domain ? protocol.test_domain : std::nullopt);
      }

      std::vector<int> train_idx = sorted_by_doc_id(corpus, split.train_pos);
      std::size_t n_train_pos = train_idx.size();
      for (int i : sorted_by_doc_id(corpus, split.train_neg)) train_idx.push_back(i);
      std::vector<int> test_idx = sorted_by_doc_id(corpus, split.test_pos);
      std::size_t n_test_pos = test_idx.size();
      for (int i : sorted_by_doc_id(corpus, split.test_neg)) test_idx.push_back(i);

      std::vector<const DocumentEvents*> train_events;
      std::vector<const Document*> train_docs;
      std::vector<int> train_labels;
      for (std::size_t i = 0; i < train_idx.size(); ++i) {
        train_events.push_back(&all_events[static_cast<std::size_t>(train_idx[i])]);
        train_docs.push_back(&corpus.doc(train_idx[i]));
        train_labels.push_back(i < n_train_pos ? 1 : -1);
      }

      FeatureSpace space = build_feature_space(train_events, train_labels, options.space,
                                               options.space_params);

      LabeledDataset train_data;
      for (std::size_t i = 0; i < train_idx.size(); ++i) {
        train_data.push(vectorize(*train_events[i], space.vocab), train_labels[i]);
      }
      std::vector<FeatureVector> test_vectors;
      std::vector<const Document*> test_docs;
      std::vector<int> gold;
      for (std::size_t i = 0; i < test_idx.size(); ++i) {
        test_vectors.push_back(
            vectorize(all_events[static_cast<std::size_t>(test_idx[i])], space.vocab));
        test_docs.push_back(&corpus.doc(test_idx[i]));
        gold.push_back(i < n_test_pos ? 1 : -1);
      }

      std::optional<Metric> learned;
      auto lmnn_metric = [&]() -> const Metric& {
        if (!learned.has_value()) {
          std::vector<std::uint32_t> dims =
              top_salience_dims(space.salience, options.metric_dim_cap);
          LmnnConfig lmnn;
          lmnn.seed = derive_seed(seed, "lmnn/" + author + "/f" + std::to_string(fold));
          learned = learn_lmnn(train_data.vectors, train_data.labels, lmnn, dims).metric;
        }
        return *learned;
      };

      for (std::size_t ci = 0; ci < options.classifiers.size(); ++ci) {
        ClassifierKind classifier = options.classifiers[ci];
        std::string tag = author + "/f" + std::to_string(fold) + "/" +
                          classifier_kind_name(classifier);
        TrainerConfig trainer =
            make_trainer(classifier, options, space.vocab.size(),
                         derive_seed(seed, "trainer/" + tag));
        if (options.tune) {
          TrainerConfig tuned =
              grid_search(train_data, classifier, kFoldCount, derive_seed(seed, "tune/" + tag));
          tuned.seed = trainer.seed;
          tuned.dim = space.vocab.size();
          trainer = tuned;
        }

        for (std::size_t si = 0; si < options.systems.size(); ++si) {
          SystemKind system = options.systems[si];
          Counts& counts = outcome.counts[si][ci];
          if (!is_spy(system)) {
            TrainedModel model = train_model(train_data, trainer);
            for (std::size_t i = 0; i < test_vectors.size(); ++i) {
              counts.add(predict(model, test_vectors[i]).second, gold[i]);
            }
            continue;
          }

          SpyProblem problem;
          problem.train = &train_data;
          problem.train_docs = train_docs;
          problem.test_vectors = test_vectors;
          problem.test_docs = test_docs;
          problem.metric = wants_lmnn(system) ? lmnn_metric() : Metric::euclidean();
          TrainerConfig spy_trainer = trainer;
          if (classifier == ClassifierKind::Knn) spy_trainer.metric = problem.metric;
          problem.trainer = spy_trainer;
          problem.grids = options.grids;
          problem.co_labeling = wants_colabel(system);
          problem.co_label.seed =
              derive_seed(seed, "colabel/" + tag + "/" + system_kind_name(system));
          problem.seed = derive_seed(seed, "spy/" + tag + "/" + system_kind_name(system));

          SpyOutcome spy = spy_induction(problem);
          for (std::size_t i = 0; i < test_vectors.size(); ++i) {
            counts.add(predict(spy.final_model, test_vectors[i]).second, gold[i]);
          }
        }
      }
    }
  });

  ExperimentResult result;
  for (std::size_t si = 0; si < options.systems.size(); ++si) {
    for (std::size_t ci = 0; ci < options.classifiers.size(); ++ci) {
      SystemRow row;
      row.system = options.systems[si];
      row.classifier = options.classifiers[ci];
      std::vector<Metrics> parts;
      for (std::size_t ai = 0; ai < authors.size(); ++ai) {
        const Counts& c = outcomes[ai].counts[si][ci];
        Metrics m = metrics_from_counts(c.tp, c.fp, c.fn, c.tn);
        row.per_author.emplace_back(authors[ai], m);
        parts.push_back(m);
      }
      row.averaged = macro_average(parts);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::vector<HardnessRow> run_hardness(const Corpus& corpus,
                                      const std::vector<ClassifierKind>& classifiers,
                                      const SpaceParams& params, std::uint64_t seed,
                                      int threads) {
  if (classifiers.empty()) throw InvalidSpec("at least one classifier is required");
  const std::vector<std::string>& authors = corpus.authors();

  struct Slot {
    std::vector<Metrics> s1;  // per classifier
    std::vector<Metrics> s2;
  };
  std::vector<Slot> slots(authors.size());

  parallel_for(authors.size(), threads, [&](std::size_t ai) {
    const std::string& author = authors[ai];
    auto [s1, s2] = split_balanced_scenarios(corpus, author, seed);
    Slot& slot = slots[ai];
    for (const Split* split : {&s1, &s2}) {
      std::vector<int> idx = sorted_by_doc_id(corpus, split->train_pos);
      std::size_t n_pos = idx.size();
      for (int i : sorted_by_doc_id(corpus, split->train_neg)) idx.push_back(i);

      std::vector<DocumentEvents> events;
      events.reserve(idx.size());
      std::vector<int> labels;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        events.push_back(extract_events(corpus.doc(idx[i])));
        labels.push_back(i < n_pos ? 1 : -1);
      }
      std::vector<const DocumentEvents*> event_ptrs;
      for (const auto& e : events) event_ptrs.push_back(&e);

      Vocabulary vocab = build_vocabulary(std::span<const DocumentEvents* const>(event_ptrs),
                                          {FeatureKind::Unigram, FeatureKind::Bigram,
                                           FeatureKind::Ptf},
                                          params.min_df);
      LabeledDataset data;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        data.push(vectorize(events[i], vocab), labels[i]);
      }

      const char* scenario = split == &s1 ? "s1" : "s2";
      std::vector<Metrics>& out = split == &s1 ? slot.s1 : slot.s2;
      for (ClassifierKind classifier : classifiers) {
        TrainerConfig trainer;
        trainer.kind = classifier;
        trainer.dim = vocab.size();
        trainer.seed = derive_seed(seed, std::string("hardness-train/") + scenario + "/" + author);
        out.push_back(cross_validate(
            data, trainer, kFoldCount,
            derive_seed(seed, std::string("hardness/") + scenario + "/" + author)));
      }
    }
  });

  std::vector<HardnessRow> rows;
  for (const char* scenario : {"s1", "s2"}) {
    for (std::size_t ci = 0; ci < classifiers.size(); ++ci) {
      HardnessRow row;
      row.scenario = scenario;
      row.classifier = classifiers[ci];
      std::vector<Metrics> parts;
      for (std::size_t ai = 0; ai < authors.size(); ++ai) {
        const std::vector<Metrics>& src =
            std::string_view(scenario) == "s1" ? slots[ai].s1 : slots[ai].s2;
        row.per_author.emplace_back(authors[ai], src[ci]);
        parts.push_back(src[ci]);
      }
      row.averaged = macro_average(parts);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SensitivityRow> sensitivity_scan(const Corpus& corpus, const std::string& author,
                                             const ProtocolConfig& protocol, SystemKind system,
                                             ClassifierKind classifier,
                                             const ExperimentOptions& options,
                                             std::uint64_t seed) {
  if (!is_spy(system)) throw InvalidSpec("sensitivity scan requires a spy system");

  Split split;
  if (protocol.protocol == Protocol::InTraining) {
    split = split_in_training(corpus, author, protocol.diversity, 0, seed);
  } else if (protocol.protocol == Protocol::OutOfTraining ||
             protocol.protocol == Protocol::CrossDomain) {
    split = split_out_of_training(corpus, author, protocol.diversity, 0, seed,
                                  protocol.protocol == Protocol::CrossDomain
                                      ? protocol.test_domain
                                      : std::nullopt);
  } else {
    throw InvalidSpec("sensitivity scan needs a diversity protocol");
  }

  std::vector<int> train_idx = sorted_by_doc_id(corpus, split.train_pos);
  std::size_t n_train_pos = train_idx.size();
  for (int i : sorted_by_doc_id(corpus, split.train_neg)) train_idx.push_back(i);
  std::vector<int> test_idx = sorted_by_doc_id(corpus, split.test_pos);
  for (int i : sorted_by_doc_id(corpus, split.test_neg)) test_idx.push_back(i);

  std::vector<DocumentEvents> events;
  std::vector<const Document*> train_docs;
  std::vector<int> labels;
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    events.push_back(extract_events(corpus.doc(train_idx[i])));
    train_docs.push_back(&corpus.doc(train_idx[i]));
    labels.push_back(i < n_train_pos ? 1 : -1);
  }
  std::vector<const DocumentEvents*> event_ptrs;
  for (const auto& e : events) event_ptrs.push_back(&e);

  FeatureSpace space = build_feature_space(std::span<const DocumentEvents* const>(event_ptrs),
                                           labels, options.space, options.space_params);
  LabeledDataset train_data;
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    train_data.push(vectorize(events[i], space.vocab), labels[i]);
  }
  std::vector<FeatureVector> test_vectors;
  std::vector<const Document*> test_docs;
  for (int i : test_idx) {
    test_vectors.push_back(vectorize(corpus.doc(i), space.vocab));
    test_docs.push_back(&corpus.doc(i));
  }

  SpyProblem problem;
  problem.train = &train_data;
  problem.train_docs = train_docs;
  problem.test_vectors = test_vectors;
  problem.test_docs = test_docs;
  if (wants_lmnn(system)) {
    std::vector<std::uint32_t> dims = top_salience_dims(space.salience, options.metric_dim_cap);
    LmnnConfig lmnn;
    lmnn.seed = derive_seed(seed, "lmnn/" + author + "/f0");
    problem.metric = learn_lmnn(train_data.vectors, train_data.labels, lmnn, dims).metric;
  }
  std::string tag = author + "/f0/" + classifier_kind_name(classifier);
  problem.trainer = make_trainer(classifier, options, space.vocab.size(),
                                 derive_seed(seed, "trainer/" + tag));
  if (classifier == ClassifierKind::Knn) problem.trainer.metric = problem.metric;
  problem.grids = options.grids;
  problem.co_labeling = wants_colabel(system);
  problem.co_label.seed = derive_seed(seed, "colabel/" + tag + "/" + system_kind_name(system));
  problem.seed = derive_seed(seed, "spy/" + tag + "/" + system_kind_name(system));

  SpyOutcome outcome = spy_induction(problem);
  std::vector<SensitivityRow> rows;
  rows.reserve(outcome.trials.size());
  for (const SpyTrial& trial : outcome.trials) {
    rows.push_back({trial.params, trial.q_size, trial.r_size, trial.qv_size, trial.rv_size,
                    trial.cv});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SensitivityRow& a, const SensitivityRow& b) {
                     return a.cv.f1 < b.cv.f1;
                   });
  return rows;
}

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void write_metric_fields(std::ostream& out, const Metrics& m) {
  out << fmt6(m.precision) << ',' << fmt6(m.recall) << ',' << fmt6(m.f1) << ','
      << fmt6(m.accuracy);
}

constexpr const char* kExperimentHeader =
    "system,classifier,delta_or_lambda,author,precision,recall,f1,accuracy,seed\n";

}  // namespace

void write_experiment_header(std::ostream& out) { out << kExperimentHeader; }

void write_experiment_rows(std::ostream& out, const ExperimentResult& result,
                           const ProtocolConfig& protocol, std::uint64_t seed,
                           const std::string& system_label) {
  for (const SystemRow& row : result.rows) {
    const std::string label =
        system_label.empty() ? system_kind_name(row.system) : system_label;
    auto emit = [&](const std::string& author, const Metrics& m) {
      out << label << ',' << classifier_kind_name(row.classifier) << ','
          << fmt2(protocol.diversity) << ',' << author << ',';
      write_metric_fields(out, m);
      out << ',' << seed << '\n';
    };
    for (const auto& [author, m] : row.per_author) emit(author, m);
    emit("AVG", row.averaged);
  }
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& result,
                          const ProtocolConfig& protocol, std::uint64_t seed) {
  write_experiment_header(out);
  write_experiment_rows(out, result, protocol, seed);
}

void write_hardness_csv(std::ostream& out, const std::vector<HardnessRow>& rows,
                        std::uint64_t seed) {
  out << kExperimentHeader;
  for (const HardnessRow& row : rows) {
    auto emit = [&](const std::string& author, const Metrics& m) {
      out << row.scenario << ',' << classifier_kind_name(row.classifier) << ",-," << author
          << ',';
      write_metric_fields(out, m);
      out << ',' << seed << '\n';
    };
    for (const auto& [author, m] : row.per_author) emit(author, m);
    emit("AVG", row.averaged);
  }
}

void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityRow>& rows,
                           std::uint64_t seed) {
  out << "n_s,n_q,n_r,q_size,r_size,qv_size,rv_size,precision,recall,f1,accuracy,seed\n";
  for (const SensitivityRow& row : rows) {
    out << row.params.n_s << ',' << row.params.n_q << ',' << row.params.n_r << ','
        << row.q_size << ',' << row.r_size << ',' << row.qv_size << ',' << row.rv_size << ',';
    write_metric_fields(out, row.cv);
    out << ',' << seed << '\n';
  }
}

}  // namespace sockverif
