#include "sockverif/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "sockverif/errors.hpp"
#include "sockverif/rng.hpp"
#include "sockverif/treebank.hpp"

namespace sockverif {

namespace {

const char* const kTemplates[] = {
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VBD <VBD>) (ADJP (JJ <JJ>))))",
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VBZ <VBZ>) (NP (DT <DT>) (JJ <JJ>) (NN <NN>))))",
    "(S (NP (PRP <PRP>)) (VP (VBD <VBD>) (NP (DT <DT>) (NN <NN>))))",
    "(S (NP (PRP <PRP>)) (VP (VBD <VBD>) (NP (DT <DT>) (NN <NN>)) (PP (IN <IN>) (NP (DT <DT>) (NN <NN>)))))",
    "(S (NP (DT <DT>) (NNS <NNS>)) (VP (VBP <VBP>) (ADJP (JJ <JJ>))))",
    "(S (NP (DT <DT>) (JJ <JJ>) (NN <NN>)) (VP (VBD <VBD>) (ADVP (RB <RB>))))",
    "(S (NP (PRP <PRP>)) (VP (MD <MD>) (VP (VB <VB>) (NP (DT <DT>) (NN <NN>)))))",
    "(S (NP (EX <EX>)) (VP (VBZ <VBZ>) (NP (DT <DT>) (JJ <JJ>) (NN <NN>)) (PP (IN <IN>) (NP (DT <DT>) (NN <NN>)))))",
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VBZ <VBZ>) (VP (VBG <VBG>) (NP (DT <DT>) (NNS <NNS>)))))",
    "(S (NP (PRP$ <PRP$>) (NN <NN>)) (VP (VBD <VBD>) (ADJP (RB <RB>) (JJ <JJ>))))",
    "(S (S (NP (PRP <PRP>)) (VP (VBD <VBD>) (NP (DT <DT>) (NN <NN>)))) (CC <CC>) (S (NP (PRP <PRP>)) (VP (VBD <VBD>) (ADJP (JJ <JJ>)))))",
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VBD <VBD>) (SBAR (IN <IN>) (S (NP (PRP <PRP>)) (VP (VBD <VBD>) (ADJP (JJ <JJ>)))))))",
    "(S (ADVP (RB <RB>)) (NP (DT <DT>) (NN <NN>)) (VP (VBD <VBD>) (NP (NNS <NNS>))))",
    "(S (NP (NP (DT <DT>) (NN <NN>)) (PP (IN <IN>) (NP (DT <DT>) (NN <NN>)))) (VP (VBD <VBD>) (ADJP (JJ <JJ>))))",
    "(S (NP (PRP <PRP>)) (VP (VBP <VBP>) (NP (NP (DT <DT>) (NN <NN>)) (SBAR (WDT <WDT>) (S (VP (VBZ <VBZ>) (ADJP (JJ <JJ>))))))))",
    "(S (NP (DT <DT>) (NNS <NNS>)) (VP (VBD <VBD>) (PP (IN <IN>) (NP (PRP$ <PRP$>) (NN <NN>)))))",
    "(S (NP (NNP <NNP>)) (VP (VBZ <VBZ>) (NP (DT <DT>) (JJR <JJR>) (NN <NN>))))",
    "(S (NP (PRP <PRP>)) (VP (VBD <VBD>) (S (VP (TO <TO>) (VP (VB <VB>) (NP (DT <DT>) (NN <NN>)))))))",
    "(S (NP (DT <DT>) (NN <NN>) (NN <NN>)) (VP (VBD <VBD>) (ADJP (JJ <JJ>))))",
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VBZ <VBZ>) (ADJP (JJ <JJ>) (CC <CC>) (JJ <JJ>))))",
    "(S (NP (PRP <PRP>)) (ADVP (RB <RB>)) (VP (VBD <VBD>) (NP (DT <DT>) (NNS <NNS>))))",
    "(S (NP (NNP <NNP>)) (VP (VBD <VBD>) (NP (NP (DT <DT>) (NN <NN>)) (PP (IN <IN>) (NP (NNP <NNP>))))))",
    "(S (NP (DT <DT>) (JJ <JJ>) (NNS <NNS>)) (VP (VBP <VBP>) (ADVP (RB <RB>)) (ADJP (JJ <JJ>))))",
    "(S (NP (PRP <PRP>)) (VP (MD <MD>) (ADVP (RB <RB>)) (VP (VB <VB>) (ADVP (RB <RB>)))))",
    "(S (SBAR (IN <IN>) (S (NP (PRP <PRP>)) (VP (VBD <VBD>)))) (NP (DT <DT>) (NN <NN>)) (VP (VBD <VBD>) (ADJP (JJ <JJ>))))",
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VP (VBD <VBD>) (NP (DT <DT>) (NN <NN>))) (CC <CC>) (VP (VBD <VBD>) (ADJP (JJ <JJ>)))))",
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VBZ <VBZ>) (PP (IN <IN>) (NP (DT <DT>) (JJ <JJ>) (NNS <NNS>)))))",
    "(S (NP (PRP <PRP>)) (VP (VBP <VBP>) (SBAR (IN <IN>) (S (NP (DT <DT>) (NN <NN>)) (VP (VBZ <VBZ>) (ADJP (JJ <JJ>)))))))",
    "(S (NP (NP (PRP$ <PRP$>) (NN <NN>)) (CC <CC>) (NP (PRP$ <PRP$>) (NN <NN>))) (VP (VBD <VBD>) (ADJP (JJ <JJ>))))",
    "(S (NP (DT <DT>) (VBG <VBG>) (NN <NN>)) (VP (VBD <VBD>) (NP (NNS <NNS>))))",
    "(S (NP (PRP <PRP>)) (VP (VBD <VBD>) (ADVP (RB <RB>) (RB <RB>))))",
    "(S (NP (DT <DT>) (NNS <NNS>)) (VP (VBP <VBP>) (VP (VBG <VBG>) (PP (IN <IN>) (NP (DT <DT>) (NN <NN>))))))",
    "(S (NP (NNP <NNP>) (NNP <NNP>)) (VP (VBZ <VBZ>) (ADJP (JJ <JJ>))))",
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VBD <VBD>) (NP (PRP <PRP>)) (S (VP (TO <TO>) (VP (VB <VB>))))))",
    "(S (ADVP (RB <RB>)) (NP (PRP <PRP>)) (VP (VBD <VBD>) (NP (DT <DT>) (JJ <JJ>) (JJ <JJ>) (NN <NN>))))",
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VBZ <VBZ>) (NP (NP (NNS <NNS>)) (PP (IN <IN>) (NP (NN <NN>))))))",
    "(S (NP (PRP <PRP>)) (VP (VBD <VBD>) (NP (DT <DT>) (NN <NN>)) (ADVP (RB <RB>))))",
    "(S (NP (DT <DT>) (JJR <JJR>) (NNS <NNS>)) (VP (VBD <VBD>) (PP (IN <IN>) (NP (DT <DT>) (NN <NN>)))))",
    "(S (NP (NN <NN>)) (VP (VBZ <VBZ>) (ADJP (JJ <JJ>))))",
    "(S (NP (PRP <PRP>)) (VP (VBP <VBP>) (ADVP (RB <RB>)) (VP (VBG <VBG>) (NP (DT <DT>) (NNS <NNS>)))))",
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VBD <VBD>) (PP (IN <IN>) (NP (NP (DT <DT>) (NN <NN>)) (PP (IN <IN>) (NP (DT <DT>) (NN <NN>)))))))",
    "(S (NP (NNS <NNS>)) (VP (MD <MD>) (VP (VB <VB>) (ADJP (JJ <JJ>)))))",
    "(S (NP (DT <DT>) (NN <NN>)) (VP (VBZ <VBZ>) (ADVP (RB <RB>)) (ADJP (JJ <JJ>))))",
    "(S (S (NP (DT <DT>) (NN <NN>)) (VP (VBD <VBD>) (ADJP (JJ <JJ>)))) (CC <CC>) (S (NP (DT <DT>) (NNS <NNS>)) (VP (VBD <VBD>) (ADJP (JJ <JJ>)))))",
    "(S (NP (PRP <PRP>)) (VP (VBD <VBD>) (SBAR (S (NP (PRP <PRP>)) (VP (MD <MD>) (VP (VB <VB>) (NP (PRP <PRP>))))))))",
    "(S (NP (DT <DT>) (JJ <JJ>) (NN <NN>) (NN <NN>)) (VP (VBZ <VBZ>) (NP (NNS <NNS>))))",
    "(S (NP (NNP <NNP>)) (VP (VBD <VBD>) (NP (PRP <PRP>)) (PP (IN <IN>) (NP (DT <DT>) (NN <NN>)))))",
    "(S (NP (DT <DT>) (NNS <NNS>)) (VP (VBD <VBD>) (NP (DT <DT>) (NN <NN>)) (SBAR (IN <IN>) (S (NP (PRP <PRP>)) (VP (VBD <VBD>))))))",
    "(S (NP (PRP$ <PRP$>) (JJ <JJ>) (NN <NN>)) (VP (VBZ <VBZ>) (VP (VBG <VBG>) (ADVP (RB <RB>)))))",
    "(S (NP (NNS <NNS>)) (VP (VBP <VBP>) (ADVP (RB <RB>)) (NP (DT <DT>) (NN <NN>))))",
};
constexpr std::size_t kTemplateCount = sizeof(kTemplates) / sizeof(kTemplates[0]);

struct OpenClass {
  const char* tag;
  double share;
  const char* suffix;
};

const OpenClass kOpenClasses[] = {
    {"NN", 0.22, "o"},   {"NNS", 0.12, "os"},  {"NNP", 0.06, "ex"},
    {"VBD", 0.10, "ed"}, {"VBZ", 0.08, "es"},  {"VBP", 0.06, "en"},
    {"VB", 0.08, "ate"}, {"VBG", 0.05, "ing"}, {"JJ", 0.12, "y"},
    {"JJR", 0.03, "ier"}, {"RB", 0.08, "ly"},
};

const std::map<std::string, std::vector<std::string>>& closed_pools() {
  static const std::map<std::string, std::vector<std::string>> pools = {
      {"DT", {"the", "a", "this", "that", "every", "some"}},
      {"PRP", {"i", "we", "they", "it", "she", "he"}},
      {"PRP$", {"my", "our", "their", "its"}},
      {"IN", {"in", "on", "at", "with", "from", "near", "during", "after"}},
      {"CC", {"and", "but", "or"}},
      {"TO", {"to"}},
      {"MD", {"would", "could", "will", "might"}},
      {"EX", {"there"}},
      {"WDT", {"which", "that"}},
  };
  return pools;
}

std::string pseudo_word(const std::string& tag, std::size_t index, const char* suffix) {
  static const char kOnsets[] = "bdfgklmnprstvz";
  static const char kVowels[] = "aeiou";
  constexpr std::size_t kSyllables = (sizeof(kOnsets) - 1) * (sizeof(kVowels) - 1);  // 70

  std::uint64_t offset = 0;
  for (char c : tag) offset = offset * 31 + static_cast<unsigned char>(c);
  std::size_t first = (index + offset) % kSyllables;
  std::size_t second = (index * 7 + offset / kSyllables + 3) % kSyllables;

  auto syllable = [&](std::size_t s) {
    std::string out;
    out += kOnsets[s % (sizeof(kOnsets) - 1)];
    out += kVowels[s / (sizeof(kOnsets) - 1)];
    return out;
  };
  return syllable(first) + syllable(second) + suffix;
}

std::map<std::string, std::vector<std::string>> build_pools(int lexical_vocab) {
  std::map<std::string, std::vector<std::string>> pools = closed_pools();
  for (const OpenClass& cls : kOpenClasses) {
    auto size = static_cast<std::size_t>(
        std::max(4.0, std::floor(cls.share * lexical_vocab + 0.5)));
    std::vector<std::string> pool;
    pool.reserve(size);
    for (std::size_t i = 0; i < size; ++i) pool.push_back(pseudo_word(cls.tag, i, cls.suffix));
    pools[cls.tag] = std::move(pool);
  }
  return pools;
}

bool is_topic_tag(const std::string& tag) {
  return tag == "NN" || tag == "NNS" || tag == "NNP" || tag == "JJ";
}

// Shared background: Zipf over the pool, with topic tags boosted toward a
// domain-dependent stripe of the pool.
std::vector<double> base_weights(const std::string& tag, std::size_t pool_size,
                                 std::size_t domain_idx, std::size_t n_domains) {
  std::vector<double> w(pool_size);
  for (std::size_t j = 0; j < pool_size; ++j) {
    w[j] = 1.0 / static_cast<double>(j + 1);
    if (is_topic_tag(tag) && n_domains > 1 && j % n_domains == domain_idx) w[j] *= 2.0;
  }
  return w;
}

// Idiolect: exponential noise over the whole pool plus a strong boost on the
// author's own stripe, so each author owns a small signature vocabulary that
// other authors touch only through the shared background.
constexpr double kSignatureBoost = 20.0;

std::vector<double> author_weights(std::uint64_t seed, const std::string& author, int author_idx,
                                   int n_authors, const std::string& tag,
                                   std::size_t pool_size) {
  Rng rng(derive_seed(seed, "author-dist/" + author + "/" + tag));
  std::vector<double> w(pool_size);
  for (std::size_t j = 0; j < pool_size; ++j) {
    w[j] = rng.exponential();
    if (j % static_cast<std::size_t>(n_authors) == static_cast<std::size_t>(author_idx)) {
      w[j] *= kSignatureBoost;
    }
  }
  return w;
}

std::vector<double> mix(const std::vector<double>& base, const std::vector<double>& author,
                        double separation) {
  double base_sum = 0.0;
  double author_sum = 0.0;
  for (double v : base) base_sum += v;
  for (double v : author) author_sum += v;
  std::vector<double> out(base.size());
  for (std::size_t j = 0; j < base.size(); ++j) {
    out[j] = (1.0 - separation) * base[j] / base_sum + separation * author[j] / author_sum;
  }
  return out;
}

void fill_leaves(ParseTree& node, const std::map<std::string, std::vector<double>>& dists,
                 const std::map<std::string, std::vector<std::string>>& pools, Rng& rng,
                 std::vector<std::string>& tokens) {
  if (node.is_leaf()) {
    if (node.token.size() >= 3 && node.token.front() == '<' && node.token.back() == '>') {
      std::string tag = node.token.substr(1, node.token.size() - 2);
      auto dist = dists.find(tag);
      auto pool = pools.find(tag);
      if (dist == dists.end() || pool == pools.end()) {
        throw InvalidSpec("template uses unknown slot tag: " + tag);
      }
      node.token = pool->second[rng.weighted_index(dist->second)];
    }
    tokens.push_back(node.token);
    return;
  }
  for (ParseTree& child : node.children) fill_leaves(child, dists, pools, rng, tokens);
}

}  // namespace

Corpus generate_corpus(const SynthSpec& spec) {
  if (spec.n_authors < 2) throw InvalidSpec("need at least 2 authors");
  if (spec.docs_per_author_per_domain < 1) throw InvalidSpec("need at least 1 document per cell");
  if (spec.domains.empty()) throw InvalidSpec("need at least one domain");
  if (spec.separation < 0.0 || spec.separation > 1.0) {
    throw InvalidSpec("separation must be in [0, 1]");
  }
  if (spec.min_sentences < 1 || spec.max_sentences < spec.min_sentences) {
    throw InvalidSpec("sentence range is invalid");
  }
  if (spec.lexical_vocab < 40) throw InvalidSpec("lexical vocabulary is too small");

  std::map<std::string, std::vector<std::string>> pools = build_pools(spec.lexical_vocab);
  std::vector<ParseTree> templates;
  templates.reserve(kTemplateCount);
  for (const char* t : kTemplates) templates.push_back(parse_bracketed(t));

  int width = spec.n_authors > 99 ? 3 : 2;
  std::vector<std::string> authors;
  for (int a = 0; a < spec.n_authors; ++a) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "a%0*d", width, a + 1);
    authors.emplace_back(buf);
  }

  std::vector<Document> docs;
  for (int ai = 0; ai < spec.n_authors; ++ai) {
    const std::string& author = authors[static_cast<std::size_t>(ai)];
    std::map<std::string, std::vector<double>> author_word;
    for (const auto& [tag, pool] : pools) {
      author_word[tag] =
          author_weights(spec.seed, author, ai, spec.n_authors, tag, pool.size());
    }
    std::vector<double> author_templ =
        author_weights(spec.seed, author, ai, spec.n_authors, "templates", kTemplateCount);

    for (std::size_t di = 0; di < spec.domains.size(); ++di) {
      Domain domain = spec.domains[di];

      std::map<std::string, std::vector<double>> word_dists;
      for (const auto& [tag, pool] : pools) {
        word_dists[tag] = mix(base_weights(tag, pool.size(), di, spec.domains.size()),
                              author_word[tag], spec.separation);
      }
      std::vector<double> templ_base(kTemplateCount);
      for (std::size_t j = 0; j < kTemplateCount; ++j) {
        templ_base[j] = 1.0 / static_cast<double>((j + 7 * di) % kTemplateCount + 1);
      }
      std::vector<double> templ_dist = mix(templ_base, author_templ, spec.separation);

      for (int k = 0; k < spec.docs_per_author_per_domain; ++k) {
        Rng rng(derive_seed(spec.seed, "doc/" + author + "/" + domain_name(domain) + "/" +
                                           std::to_string(k)));
        Document doc;
        char idbuf[64];
        std::snprintf(idbuf, sizeof(idbuf), "%s-%s-%03d", author.c_str(),
                      domain_name(domain), k);
        doc.id = idbuf;
        doc.author = author;
        doc.domain = domain;
        doc.polarity = k % 2 == 0 ? Polarity::Positive : Polarity::Negative;

        std::size_t n_sent =
            static_cast<std::size_t>(spec.min_sentences) +
            rng.uniform_index(
                static_cast<std::size_t>(spec.max_sentences - spec.min_sentences + 1));
        for (std::size_t s = 0; s < n_sent; ++s) {
          ParseTree tree = templates[rng.weighted_index(templ_dist)];
          fill_leaves(tree, word_dists, pools, rng, doc.tokens);
          doc.parses.push_back(to_bracketed(tree));
        }
        docs.push_back(std::move(doc));
      }
    }
  }
  return Corpus::from_documents(std::move(docs));
}

}  // namespace sockverif
