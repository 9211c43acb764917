// Deterministic generator of parsed review corpora. Each author draws
// sentence templates and slot words from distributions interpolated between
// a shared background and an author-specific component; the separation knob
// moves the mixture from indistinguishable (0) to strongly author-marked (1).
// Domains shift the template and topic-word base distributions so
// cross-domain transfer is harder than in-domain.
#ifndef SOCKVERIF_SYNTH_HPP
#define SOCKVERIF_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "sockverif/corpus.hpp"

namespace sockverif {

struct SynthSpec {
  int n_authors = 17;
  int docs_per_author_per_domain = 23;
  std::vector<Domain> domains = {Domain::Hotel, Domain::Restaurant, Domain::Product};
  double separation = 0.6;
  int lexical_vocab = 240;  // pseudo-words spread over the open word classes
  int min_sentences = 4;
  int max_sentences = 8;
  std::uint64_t seed = 1;
};

// Same (spec, seed) yields a byte-identical corpus. Throws InvalidSpec for
// out-of-range fields.
Corpus generate_corpus(const SynthSpec& spec);

}  // namespace sockverif

#endif
