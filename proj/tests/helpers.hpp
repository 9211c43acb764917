// Shared fixtures for the test binaries: sparse vector construction and
// tiny parsed corpora.
#ifndef SOCKVERIF_TESTS_HELPERS_HPP
#define SOCKVERIF_TESTS_HELPERS_HPP

#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <vector>

#include "sockverif/corpus.hpp"
#include "sockverif/features.hpp"

namespace testutil {

// Sparse vector from dense coordinates; zeros are dropped.
inline sockverif::FeatureVector vec(std::initializer_list<double> values) {
  sockverif::FeatureVector v;
  std::uint32_t i = 0;
  for (double x : values) {
    if (x != 0.0) v.items.push_back({i, x});
    ++i;
  }
  return v;
}

inline std::vector<double> densify(const sockverif::FeatureVector& v, std::size_t dim) {
  std::vector<double> out(dim, 0.0);
  for (const auto& [i, x] : v.items) out[static_cast<std::size_t>(i)] = x;
  return out;
}

inline sockverif::Document make_doc(std::string id, std::string author,
                                    std::vector<std::string> tokens,
                                    std::vector<std::string> parses = {},
                                    sockverif::Domain domain = sockverif::Domain::Hotel) {
  sockverif::Document d;
  d.id = std::move(id);
  d.author = std::move(author);
  d.domain = domain;
  d.polarity = sockverif::Polarity::Positive;
  d.tokens = std::move(tokens);
  d.parses = std::move(parses);
  return d;
}

// n_authors x docs_per_author corpus with author-marked tokens, cycling the
// first n_domains domains, every document parsed.
inline sockverif::Corpus toy_corpus(int n_authors, int docs_per_author, int n_domains = 1) {
  const sockverif::Domain wheel[] = {sockverif::Domain::Hotel, sockverif::Domain::Restaurant,
                                     sockverif::Domain::Product};
  std::vector<sockverif::Document> docs;
  for (int a = 0; a < n_authors; ++a) {
    char name[16];
    std::snprintf(name, sizeof(name), "p%02d", a);
    for (int k = 0; k < docs_per_author; ++k) {
      char id[32];
      std::snprintf(id, sizeof(id), "%s-%03d", name, k);
      std::string mark = std::string("word") + name;
      sockverif::Document d = make_doc(
          id, name, {"the", mark, "is", "here", "token" + std::to_string(k % 4)},
          {"(S (NP (DT the) (NN " + mark + ")) (VP (VBZ is) (ADVP (RB here))))"},
          wheel[k % (n_domains < 1 ? 1 : n_domains)]);
      d.polarity = k % 2 == 0 ? sockverif::Polarity::Positive : sockverif::Polarity::Negative;
      docs.push_back(std::move(d));
    }
  }
  return sockverif::Corpus::from_documents(std::move(docs));
}

inline std::vector<const sockverif::Document*> doc_ptrs(const sockverif::Corpus& corpus,
                                                        const std::vector<int>& indices) {
  std::vector<const sockverif::Document*> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(&corpus.doc(i));
  return out;
}

}  // namespace testutil

#endif
