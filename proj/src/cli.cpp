#include "sockverif/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sockverif/errors.hpp"
#include "sockverif/eval.hpp"
#include "sockverif/synth.hpp"

namespace sockverif {

namespace {

struct CommonArgs {
  std::string corpus_path;
  std::string out_path;
  std::uint64_t seed = 1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_corpus = true) {
  auto* corpus = cmd->add_option("--corpus", args.corpus_path, "corpus JSON Lines file");
  if (needs_corpus) corpus->required();
  cmd->add_option("--out", args.out_path, "output CSV path (default: stdout)");
  cmd->add_option("--seed", args.seed, "random seed");
  cmd->add_option("--threads", args.threads, "worker threads (0 = hardware)");
}

std::vector<ClassifierKind> parse_classifiers(const std::string& csv) {
  std::vector<ClassifierKind> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_classifier_kind(item));
  }
  if (out.empty()) throw InvalidSpec("no classifier given");
  return out;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

void deliver(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw IoError("cannot open output file: " + out_path);
  file << content;
  if (!file.good()) throw IoError("failed writing output file: " + out_path);
}

int run_hardness_cmd(const CommonArgs& args, bool balanced, const std::string& classifiers_csv,
                     const std::string& lambdas_csv) {
  Corpus corpus = load_corpus(args.corpus_path);
  std::vector<ClassifierKind> classifiers = parse_classifiers(classifiers_csv);
  std::ostringstream out;
  if (balanced) {
    SpaceParams params;
    std::vector<HardnessRow> rows =
        run_hardness(corpus, classifiers, params, args.seed, args.threads);
    write_hardness_csv(out, rows, args.seed);
  } else {
    std::vector<double> lambdas = parse_doubles(lambdas_csv);
    if (lambdas.empty()) throw InvalidSpec("no lambda values given");
    write_experiment_header(out);
    for (double lambda : lambdas) {
      ProtocolConfig protocol;
      protocol.protocol = Protocol::InTraining;
      protocol.diversity = lambda;
      ExperimentOptions options;
      options.space = FeatureSpaceKind::LexicalPtf;
      options.systems = {SystemKind::Base};
      options.classifiers = classifiers;
      options.threads = args.threads;
      ExperimentResult result = run_experiment(corpus, protocol, options, args.seed);
      write_experiment_rows(out, result, protocol, args.seed);
    }
  }
  deliver(args.out_path, out.str());
  return 0;
}

int run_features_cmd(const CommonArgs& args, double delta, const std::string& classifiers_csv,
                     const std::string& spaces_csv) {
  Corpus corpus = load_corpus(args.corpus_path);
  std::vector<ClassifierKind> classifiers = parse_classifiers(classifiers_csv);
  std::vector<FeatureSpaceKind> spaces;
  {
    std::stringstream ss(spaces_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) spaces.push_back(parse_feature_space(item));
    }
  }
  if (spaces.empty()) throw InvalidSpec("no feature space given");

  ProtocolConfig protocol;
  protocol.protocol = Protocol::OutOfTraining;
  protocol.diversity = delta;

  std::ostringstream out;
  write_experiment_header(out);
  for (FeatureSpaceKind space : spaces) {
    ExperimentOptions options;
    options.space = space;
    options.systems = {SystemKind::Base};
    options.classifiers = classifiers;
    options.threads = args.threads;
    ExperimentResult result = run_experiment(corpus, protocol, options, args.seed);
    write_experiment_rows(out, result, protocol, args.seed, feature_space_name(space));
  }
  deliver(args.out_path, out.str());
  return 0;
}

int run_spy_cmd(const CommonArgs& args, const std::string& classifier,
                const std::string& variant, double delta, double lambda, bool tune) {
  Corpus corpus = load_corpus(args.corpus_path);
  ProtocolConfig protocol;
  if (lambda > 0.0 && delta > 0.0) {
    throw InvalidSpec("give either --delta (out-of-training) or --lambda (in-training)");
  }
  if (lambda > 0.0) {
    protocol.protocol = Protocol::InTraining;
    protocol.diversity = lambda;
  } else {
    protocol.protocol = Protocol::OutOfTraining;
    protocol.diversity = delta > 0.0 ? delta : 0.25;
  }

  ExperimentOptions options;
  options.systems = {SystemKind::Base, parse_system_kind(variant)};
  options.classifiers = parse_classifiers(classifier);
  options.tune = tune;
  options.threads = args.threads;
  ExperimentResult result = run_experiment(corpus, protocol, options, args.seed);
  std::ostringstream out;
  write_experiment_csv(out, result, protocol, args.seed);
  deliver(args.out_path, out.str());
  return 0;
}

int run_crossdomain_cmd(const CommonArgs& args, const std::string& classifier,
                        const std::string& variant, double delta,
                        const std::string& test_domain) {
  Corpus corpus = load_corpus(args.corpus_path);
  ProtocolConfig protocol;
  protocol.protocol = Protocol::CrossDomain;
  protocol.diversity = delta;
  protocol.test_domain = parse_domain(test_domain);

  ExperimentOptions options;
  options.systems = {SystemKind::Base, parse_system_kind(variant)};
  options.classifiers = parse_classifiers(classifier);
  options.threads = args.threads;
  ExperimentResult result = run_experiment(corpus, protocol, options, args.seed);
  std::ostringstream out;
  write_experiment_csv(out, result, protocol, args.seed);
  deliver(args.out_path, out.str());
  return 0;
}

int run_sensitivity_cmd(const CommonArgs& args, const std::string& author,
                        const std::string& classifier, const std::string& variant,
                        double delta) {
  Corpus corpus = load_corpus(args.corpus_path);
  ProtocolConfig protocol;
  protocol.protocol = Protocol::OutOfTraining;
  protocol.diversity = delta;

  ExperimentOptions options;
  std::vector<SensitivityRow> rows =
      sensitivity_scan(corpus, author, protocol, parse_system_kind(variant),
                       parse_classifier_kind(classifier), options, args.seed);
  std::ostringstream out;
  write_sensitivity_csv(out, rows, args.seed);
  deliver(args.out_path, out.str());
  return 0;
}

int run_synth_cmd(const std::string& out_path, const SynthSpec& spec,
                  const std::string& domains_csv) {
  SynthSpec final_spec = spec;
  if (!domains_csv.empty()) {
    final_spec.domains.clear();
    std::stringstream ss(domains_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) final_spec.domains.push_back(parse_domain(item));
    }
  }
  Corpus corpus = generate_corpus(final_spec);
  if (out_path.empty()) {
    write_corpus_jsonl(corpus, std::cout);
  } else {
    save_corpus(corpus, out_path);
  }
  return 0;
}

int run_inspect_cmd(const CommonArgs& args, const std::string& author,
                    const std::string& vocab_out, const std::string& dkl_out) {
  Corpus corpus = load_corpus(args.corpus_path);

  std::ostringstream summary;
  summary << "documents: " << corpus.documents().size() << '\n';
  summary << "authors: " << corpus.authors().size() << '\n';
  long parses = 0;
  std::map<std::string, long> per_domain;
  for (const Document& doc : corpus.documents()) {
    parses += static_cast<long>(doc.parses.size());
    ++per_domain[domain_name(doc.domain)];
  }
  summary << "parses: " << parses << '\n';
  for (const auto& [name, count] : per_domain) {
    summary << "domain " << name << ": " << count << '\n';
  }

  if (!vocab_out.empty()) {
    std::vector<const Document*> docs;
    for (const Document& doc : corpus.documents()) docs.push_back(&doc);
    Vocabulary vocab = build_vocabulary(std::span<const Document* const>(docs),
                                        {FeatureKind::Unigram, FeatureKind::Bigram,
                                         FeatureKind::Ptf, FeatureKind::Pos});
    std::ostringstream out;
    vocab.export_csv(out);
    deliver(vocab_out, out.str());
  }

  if (!dkl_out.empty()) {
    if (author.empty()) throw InvalidSpec("--dkl-out needs --author");
    if (!corpus.has_author(author)) throw UnknownAuthor("unknown author: " + author);
    std::vector<const Document*> target_docs;
    std::vector<const Document*> background_docs;
    for (const Document& doc : corpus.documents()) {
      (doc.author == author ? target_docs : background_docs).push_back(&doc);
    }
    std::vector<const Document*> all_docs = target_docs;
    all_docs.insert(all_docs.end(), background_docs.begin(), background_docs.end());
    std::vector<std::string> joint = ptf_key_set(all_docs);
    StylisticLM target = build_stylistic_lm(target_docs, joint);
    StylisticLM background = build_stylistic_lm(background_docs, joint);
    std::ostringstream out;
    dump_delta_kl_csv(target, background, out);
    deliver(dkl_out, out.str());
  }

  deliver(args.out_path, summary.str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Deceptive sockpuppet author verification toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  CommonArgs hardness_args;
  bool hardness_balanced = false;
  std::string hardness_classifiers = "lr,svm,knn";
  std::string hardness_lambdas = "0.25,0.50,0.75,1.00";
  auto* hardness = app.add_subcommand(
      "hardness", "balanced scenarios or in-training lambda scan with the base classifier");
  add_common(hardness, hardness_args);
  hardness->add_flag("--balanced", hardness_balanced,
                     "run the balanced same-author/cross-author scenarios");
  hardness->add_option("--classifiers", hardness_classifiers, "comma list: lr,svm,knn");
  hardness->add_option("--lambdas", hardness_lambdas, "comma list of lambda fractions");

  CommonArgs features_args;
  double features_delta = 0.75;
  std::string features_classifier = "lr";
  std::string features_spaces = "lexical,lexical-ptf,lexical-ptf-chi2,lexical-dkl-ptf";
  auto* features = app.add_subcommand(
      "features", "base classifier across feature spaces, out-of-training");
  add_common(features, features_args);
  features->add_option("--delta", features_delta, "out-of-training diversity");
  features->add_option("--classifiers", features_classifier, "comma list: lr,svm,knn");
  features->add_option("--spaces", features_spaces, "comma list of feature spaces");

  CommonArgs spy_args;
  std::string spy_classifier = "lr";
  std::string spy_variant = "euc";
  double spy_delta = 0.0;
  double spy_lambda = 0.0;
  bool spy_tune = false;
  auto* spy = app.add_subcommand("spy", "base vs spy system on a diversity protocol");
  add_common(spy, spy_args);
  spy->add_option("--classifier", spy_classifier, "lr, svm, or knn");
  spy->add_option("--variant", spy_variant, "eu, lm, euc, or lmc");
  spy->add_option("--delta", spy_delta, "out-of-training diversity");
  spy->add_option("--lambda", spy_lambda, "in-training diversity");
  spy->add_flag("--tune", spy_tune, "grid-search hyperparameters per author");

  CommonArgs cross_args;
  std::string cross_classifier = "lr";
  std::string cross_variant = "euc";
  double cross_delta = 0.75;
  std::string cross_test_domain;
  auto* crossdomain =
      app.add_subcommand("crossdomain", "train on the other domains, test on one");
  add_common(crossdomain, cross_args);
  crossdomain->add_option("--classifier", cross_classifier, "lr, svm, or knn");
  crossdomain->add_option("--variant", cross_variant, "eu, lm, euc, or lmc");
  crossdomain->add_option("--delta", cross_delta, "negative-author diversity");
  crossdomain->add_option("--test-domain", cross_test_domain, "held-out domain")->required();

  CommonArgs sens_args;
  std::string sens_author;
  std::string sens_classifier = "lr";
  std::string sens_variant = "euc";
  double sens_delta = 0.25;
  auto* sensitivity =
      app.add_subcommand("sensitivity", "per-triple spy grid diagnostics for one author");
  add_common(sensitivity, sens_args);
  sensitivity->add_option("--author", sens_author, "target author")->required();
  sensitivity->add_option("--classifier", sens_classifier, "lr, svm, or knn");
  sensitivity->add_option("--variant", sens_variant, "eu, lm, euc, or lmc");
  sensitivity->add_option("--delta", sens_delta, "out-of-training diversity");

  std::string synth_out;
  SynthSpec synth_spec;
  std::string synth_domains;
  auto* synth = app.add_subcommand("synth", "generate a synthetic parsed corpus");
  synth->add_option("--out", synth_out, "output JSON Lines path (default: stdout)");
  synth->add_option("--authors", synth_spec.n_authors, "author count");
  synth->add_option("--docs-per-domain", synth_spec.docs_per_author_per_domain,
                    "documents per author per domain");
  synth->add_option("--domains", synth_domains, "comma list: hotel,restaurant,product");
  synth->add_option("--separation", synth_spec.separation, "author separation in [0,1]");
  synth->add_option("--vocab", synth_spec.lexical_vocab, "open-class vocabulary size");
  synth->add_option("--min-sentences", synth_spec.min_sentences, "sentences per doc, lower");
  synth->add_option("--max-sentences", synth_spec.max_sentences, "sentences per doc, upper");
  synth->add_option("--seed", synth_spec.seed, "random seed");

  CommonArgs inspect_args;
  std::string inspect_author;
  std::string inspect_vocab_out;
  std::string inspect_dkl_out;
  auto* inspect = app.add_subcommand("inspect", "corpus summary and feature dumps");
  add_common(inspect, inspect_args);
  inspect->add_option("--author", inspect_author, "target author for the divergence dump");
  inspect->add_option("--vocab-out", inspect_vocab_out, "write the full vocabulary CSV here");
  inspect->add_option("--dkl-out", inspect_dkl_out,
                      "write the author-vs-rest divergence CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (hardness->parsed()) {
      return run_hardness_cmd(hardness_args, hardness_balanced, hardness_classifiers,
                              hardness_lambdas);
    }
    if (features->parsed()) {
      return run_features_cmd(features_args, features_delta, features_classifier,
                              features_spaces);
    }
    if (spy->parsed()) {
      return run_spy_cmd(spy_args, spy_classifier, spy_variant, spy_delta, spy_lambda,
                         spy_tune);
    }
    if (crossdomain->parsed()) {
      return run_crossdomain_cmd(cross_args, cross_classifier, cross_variant, cross_delta,
                                 cross_test_domain);
    }
    if (sensitivity->parsed()) {
      return run_sensitivity_cmd(sens_args, sens_author, sens_classifier, sens_variant,
                                 sens_delta);
    }
    if (synth->parsed()) return run_synth_cmd(synth_out, synth_spec, synth_domains);
    if (inspect->parsed()) {
      return run_inspect_cmd(inspect_args, inspect_author, inspect_vocab_out, inspect_dkl_out);
    }
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const InvalidSpec& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sockverif
