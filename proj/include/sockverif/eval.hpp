// Experiment harness: assembles feature spaces from training documents,
// runs the verification protocols per author with pooled fold confusions,
// macro-averages across authors, and serializes results as CSV.
#ifndef SOCKVERIF_EVAL_HPP
#define SOCKVERIF_EVAL_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sockverif/corpus.hpp"
#include "sockverif/learners.hpp"
#include "sockverif/metrics.hpp"
#include "sockverif/spy.hpp"

namespace sockverif {

enum class SystemKind : std::uint8_t { Base, SpyEu, SpyLm, SpyEuC, SpyLmC };

const char* system_kind_name(SystemKind kind);
SystemKind parse_system_kind(std::string_view name);
ClassifierKind parse_classifier_kind(std::string_view name);

enum class FeatureSpaceKind : std::uint8_t {
  Lexical,         // unigrams + bigrams
  LexicalPtf,      // plus all parse-tree events
  LexicalPtfChi2,  // plus the chi-squared-selected parse-tree events
  LexicalDklPtf,   // plus the divergence-selected parse-tree events
};

const char* feature_space_name(FeatureSpaceKind kind);
FeatureSpaceKind parse_feature_space(std::string_view name);

struct SpaceParams {
  int min_df = 1;
  double chi2_fraction = 0.2;
  double dkl_threshold = kDeltaKlThreshold;
  double epsilon = kKlEpsilon;
};

// Vocabulary plus one discriminativeness score per coordinate: the absolute
// divergence contribution for parse-tree events, the chi-squared statistic
// otherwise. The scores pick the axes metric learning operates on.
struct FeatureSpace {
  Vocabulary vocab;
  std::vector<double> salience;
};

FeatureSpace build_feature_space(std::span<const Document* const> train_docs,
                                 std::span<const int> labels, FeatureSpaceKind kind,
                                 const SpaceParams& params);
FeatureSpace build_feature_space(std::span<const DocumentEvents* const> train_events,
                                 std::span<const int> labels, FeatureSpaceKind kind,
                                 const SpaceParams& params);

struct ProtocolConfig {
  Protocol protocol = Protocol::InTraining;
  double diversity = 0.25;  // lambda or delta
  std::optional<Domain> test_domain;
};

struct ExperimentOptions {
  FeatureSpaceKind space = FeatureSpaceKind::LexicalDklPtf;
  std::vector<SystemKind> systems = {SystemKind::Base};
  std::vector<ClassifierKind> classifiers = {ClassifierKind::Logreg};
  SpaceParams space_params;
  SpyGrids grids;
  bool tune = false;               // per-author hyperparameter grid search
  int folds = kFoldCount;          // leading folds to run, 1..kFoldCount
  double lr_c = 50.0;              // weak regularization suits short normalized docs
  double svm_c = 1.0;
  double svm_gamma = 0.0;          // <= 0 means 1/dim
  int knn_k = 3;
  std::size_t metric_dim_cap = 100;
  int threads = 0;                 // 0 means hardware concurrency
};

struct SystemRow {
  SystemKind system = SystemKind::Base;
  ClassifierKind classifier = ClassifierKind::Logreg;
  std::vector<std::pair<std::string, Metrics>> per_author;  // sorted by author
  Metrics averaged;
};

struct ExperimentResult {
  std::vector<SystemRow> rows;  // system-major, classifier-minor, options order
};

// In-training, out-of-training, or cross-domain evaluation of every author.
// Per author, fold confusions are pooled before scoring; the averaged row is
// the unweighted mean across authors. Throws InvalidSpec for the balanced
// protocol (see run_hardness) or an out-of-range diversity.
ExperimentResult run_experiment(const Corpus& corpus, const ProtocolConfig& protocol,
                                const ExperimentOptions& options, std::uint64_t seed);

struct HardnessRow {
  std::string scenario;  // "s1" or "s2"
  ClassifierKind classifier = ClassifierKind::Logreg;
  std::vector<std::pair<std::string, Metrics>> per_author;
  Metrics averaged;
};

// Balanced same-author vs cross-author scenarios, scored by stratified
// 5-fold CV over lexical + parse-tree features.
std::vector<HardnessRow> run_hardness(const Corpus& corpus,
                                      const std::vector<ClassifierKind>& classifiers,
                                      const SpaceParams& params, std::uint64_t seed,
                                      int threads = 0);

struct SensitivityRow {
  SpyParams params;
  std::size_t q_size = 0;
  std::size_t r_size = 0;
  std::size_t qv_size = 0;
  std::size_t rv_size = 0;
  Metrics cv;
};

// Grid diagnostics for one author on the first fold of the protocol, rows
// ordered by ascending cross-validated F1. The system must be a spy variant.
std::vector<SensitivityRow> sensitivity_scan(const Corpus& corpus, const std::string& author,
                                             const ProtocolConfig& protocol, SystemKind system,
                                             ClassifierKind classifier,
                                             const ExperimentOptions& options,
                                             std::uint64_t seed);

// Columns: system, classifier, delta_or_lambda, author ("AVG" for the
// averaged row), precision, recall, f1, accuracy, seed. Scores use six
// decimal places so that equal runs serialize byte-identically.
void write_experiment_csv(std::ostream& out, const ExperimentResult& result,
                          const ProtocolConfig& protocol, std::uint64_t seed);
void write_experiment_header(std::ostream& out);
// Rows only, so scans over several diversity values can share one header.
// When system_label is non-empty it replaces the system column.
void write_experiment_rows(std::ostream& out, const ExperimentResult& result,
                           const ProtocolConfig& protocol, std::uint64_t seed,
                           const std::string& system_label = "");
void write_hardness_csv(std::ostream& out, const std::vector<HardnessRow>& rows,
                        std::uint64_t seed);
void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityRow>& rows,
                           std::uint64_t seed);

}  // namespace sockverif

#endif
