#include "sockverif/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <unordered_map>

#include "sockverif/errors.hpp"

namespace sockverif {

const char* feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Unigram: return "unigram";
    case FeatureKind::Bigram: return "bigram";
    case FeatureKind::Ptf: return "ptf";
    case FeatureKind::Pos: return "pos";
  }
  return "?";
}

std::string ptf_vocab_key(const PtfEvent& event) {
  const char* prefix = "";
  switch (event.kind) {
    case PtfKind::PTF_I: prefix = "i:"; break;
    case PtfKind::PTF_II: prefix = "ii:"; break;
    case PtfKind::PTF_III: prefix = "iii:"; break;
    case PtfKind::INTERIOR: prefix = "int:"; break;
  }
  return prefix + event.key;
}

Vocabulary Vocabulary::from_entries(std::vector<VocabEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const VocabEntry& a, const VocabEntry& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.key < b.key;
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i] == entries[i - 1]) throw Error("duplicate vocabulary entry: " + entries[i].key);
  }
  Vocabulary v;
  v.entries_ = std::move(entries);
  std::uint32_t pos = 0;
  for (std::size_t k = 0; k < kFeatureKindCount; ++k) {
    std::uint32_t begin = pos;
    while (pos < v.entries_.size() && static_cast<std::size_t>(v.entries_[pos].kind) == k) ++pos;
    v.ranges_[k] = {begin, pos};
  }
  return v;
}

std::optional<std::uint32_t> Vocabulary::find(FeatureKind kind, const std::string& key) const {
  auto [lo, hi] = ranges_[static_cast<std::size_t>(kind)];
  auto begin = entries_.begin() + lo;
  auto end = entries_.begin() + hi;
  auto it = std::lower_bound(begin, end, key,
                             [](const VocabEntry& e, const std::string& k) { return e.key < k; });
  if (it == end || it->key != key) return std::nullopt;
  return static_cast<std::uint32_t>(it - entries_.begin());
}

bool Vocabulary::has_kind(FeatureKind kind) const {
  auto [lo, hi] = ranges_[static_cast<std::size_t>(kind)];
  return hi > lo;
}

std::pair<std::uint32_t, std::uint32_t> Vocabulary::kind_range(FeatureKind kind) const {
  return ranges_[static_cast<std::size_t>(kind)];
}

void Vocabulary::export_csv(std::ostream& out) const {
  out << "index,kind,key\n";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    std::string key = entries_[i].key;
    bool quote = key.find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      std::string escaped = "\"";
      for (char c : key) {
        if (c == '"') escaped += '"';
        escaped += c;
      }
      escaped += '"';
      key = escaped;
    }
    out << i << ',' << feature_kind_name(entries_[i].kind) << ',' << key << '\n';
  }
}

double FeatureVector::value_at(std::uint32_t index) const {
  auto it = std::lower_bound(items.begin(), items.end(), index,
                             [](const auto& p, std::uint32_t i) { return p.first < i; });
  if (it == items.end() || it->first != index) return 0.0;
  return it->second;
}

std::uint32_t FeatureVector::max_index() const {
  return items.empty() ? 0 : items.back().first;
}

double sparse_dot(const FeatureVector& u, const FeatureVector& v) {
  double acc = 0.0;
  auto a = u.items.begin();
  auto b = v.items.begin();
  while (a != u.items.end() && b != v.items.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      acc += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return acc;
}

double sparse_sq_norm(const FeatureVector& u) {
  double acc = 0.0;
  for (const auto& [i, x] : u.items) acc += x * x;
  return acc;
}

double sparse_sq_dist(const FeatureVector& u, const FeatureVector& v) {
  double acc = 0.0;
  auto a = u.items.begin();
  auto b = v.items.begin();
  while (a != u.items.end() || b != v.items.end()) {
    if (b == v.items.end() || (a != u.items.end() && a->first < b->first)) {
      acc += a->second * a->second;
      ++a;
    } else if (a == u.items.end() || b->first < a->first) {
      acc += b->second * b->second;
      ++b;
    } else {
      double d = a->second - b->second;
      acc += d * d;
      ++a;
      ++b;
    }
  }
  return acc;
}

double median_sq_distance(std::span<const FeatureVector> xs) {
  if (xs.size() < 2) return 0.0;
  std::vector<double> dists;
  if (xs.size() <= 80) {
    dists.reserve(xs.size() * (xs.size() - 1) / 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = i + 1; j < xs.size(); ++j) {
        dists.push_back(sparse_sq_dist(xs[i], xs[j]));
      }
    }
  } else {
    std::size_t strides = std::min<std::size_t>(40, xs.size() - 1);
    dists.reserve(xs.size() * strides);
    for (std::size_t s = 1; s <= strides; ++s) {
      std::size_t step = 1 + (s * (xs.size() - 1)) / (strides + 1);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        dists.push_back(sparse_sq_dist(xs[i], xs[(i + step) % xs.size()]));
      }
    }
  }
  auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  return *mid;
}

double dense_dot(std::span<const double> w, const FeatureVector& v) {
  double acc = 0.0;
  for (const auto& [i, x] : v.items) {
    if (i < w.size()) acc += w[i] * x;
  }
  return acc;
}

void add_scaled(std::vector<double>& acc, const FeatureVector& v, double scale) {
  for (const auto& [i, x] : v.items) {
    if (i < acc.size()) acc[i] += x * scale;
  }
}

DocumentEvents extract_events(const Document& doc) {
  DocumentEvents ev;
  std::array<std::unordered_map<std::string, int>, kFeatureKindCount> maps;

  auto& uni = maps[static_cast<std::size_t>(FeatureKind::Unigram)];
  auto& bi = maps[static_cast<std::size_t>(FeatureKind::Bigram)];
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    ++uni[doc.tokens[i]];
    if (i + 1 < doc.tokens.size()) ++bi[doc.tokens[i] + " " + doc.tokens[i + 1]];
  }

  ev.has_parses = !doc.parses.empty();
  auto& ptf = maps[static_cast<std::size_t>(FeatureKind::Ptf)];
  auto& pos = maps[static_cast<std::size_t>(FeatureKind::Pos)];
  for (const auto& parse : doc.parses) {
    ParseTree tree = parse_bracketed(parse);
    for (const PtfEvent& e : extract_ptf(tree)) ++ptf[ptf_vocab_key(e)];
    for (const std::string& tag : extract_pos(tree)) ++pos[tag];
  }

  for (std::size_t k = 0; k < kFeatureKindCount; ++k) {
    auto& out = ev.counts[k];
    out.assign(maps[k].begin(), maps[k].end());
    std::sort(out.begin(), out.end());
  }
  return ev;
}

Vocabulary build_vocabulary(std::span<const DocumentEvents* const> docs,
                            const std::vector<FeatureKind>& kinds, int min_df) {
  if (docs.empty()) throw EmptyInput("no documents for vocabulary construction");
  std::array<bool, kFeatureKindCount> wanted{};
  for (FeatureKind k : kinds) wanted[static_cast<std::size_t>(k)] = true;

  std::array<std::map<std::string, int>, kFeatureKindCount> df;
  for (const DocumentEvents* ev : docs) {
    for (std::size_t k = 0; k < kFeatureKindCount; ++k) {
      if (!wanted[k]) continue;
      for (const auto& [key, count] : ev->counts[k]) ++df[k][key];
    }
  }
  std::vector<VocabEntry> entries;
  for (std::size_t k = 0; k < kFeatureKindCount; ++k) {
    for (const auto& [key, n] : df[k]) {
      if (n >= min_df) entries.push_back({static_cast<FeatureKind>(k), key});
    }
  }
  return Vocabulary::from_entries(std::move(entries));
}

Vocabulary build_vocabulary(std::span<const Document* const> docs,
                            const std::vector<FeatureKind>& kinds, int min_df) {
  if (docs.empty()) throw EmptyInput("no documents for vocabulary construction");
  std::vector<DocumentEvents> events;
  events.reserve(docs.size());
  for (const Document* d : docs) events.push_back(extract_events(*d));
  std::vector<const DocumentEvents*> ptrs;
  ptrs.reserve(events.size());
  for (const auto& e : events) ptrs.push_back(&e);
  return build_vocabulary(std::span<const DocumentEvents* const>(ptrs), kinds, min_df);
}

FeatureVector vectorize(const DocumentEvents& events, const Vocabulary& vocab) {
  bool needs_parses = vocab.has_kind(FeatureKind::Ptf) || vocab.has_kind(FeatureKind::Pos);
  if (needs_parses && !events.has_parses) {
    throw MissingParses("vocabulary includes parse-derived features but document has no parses");
  }
  FeatureVector out;
  for (std::size_t k = 0; k < kFeatureKindCount; ++k) {
    auto kind = static_cast<FeatureKind>(k);
    if (!vocab.has_kind(kind)) continue;
    std::vector<std::pair<std::uint32_t, int>> matched;
    long total = 0;
    for (const auto& [key, count] : events.counts[k]) {
      if (auto idx = vocab.find(kind, key)) {
        matched.emplace_back(*idx, count);
        total += count;
      }
    }
    if (total == 0) continue;
    for (const auto& [idx, count] : matched) {
      out.items.emplace_back(idx, static_cast<double>(count) / static_cast<double>(total));
    }
  }
  std::sort(out.items.begin(), out.items.end());
  return out;
}

FeatureVector vectorize(const Document& doc, const Vocabulary& vocab) {
  return vectorize(extract_events(doc), vocab);
}

std::vector<double> chi2_scores(std::size_t dim, std::span<const FeatureVector> vectors,
                                std::span<const int> labels) {
  if (vectors.size() != labels.size()) throw LengthMismatch("vectors/labels size mismatch");
  long n_pos = 0;
  long n_neg = 0;
  for (int y : labels) (y > 0 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) throw SingleClass("chi-squared needs both classes present");

  std::vector<long> pos_present(dim, 0);
  std::vector<long> neg_present(dim, 0);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    auto& bucket = labels[i] > 0 ? pos_present : neg_present;
    for (const auto& [idx, val] : vectors[i].items) {
      if (idx < dim && val > 0.0) ++bucket[idx];
    }
  }

  double n = static_cast<double>(n_pos + n_neg);
  std::vector<double> scores(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    double a = static_cast<double>(pos_present[j]);
    double b = static_cast<double>(neg_present[j]);
    double c = static_cast<double>(n_pos) - a;
    double d = static_cast<double>(n_neg) - b;
    double denom = (a + b) * (c + d) * (a + c) * (b + d);
    if (denom <= 0.0) {
      scores[j] = 0.0;
      continue;
    }
    double det = a * d - b * c;
    scores[j] = n * det * det / denom;
  }
  return scores;
}

Vocabulary chi2_select(const Vocabulary& vocab, std::span<const FeatureVector> vectors,
                       std::span<const int> labels, double top_fraction) {
  if (vocab.empty()) throw EmptyVocabulary("chi-squared selection over empty vocabulary");
  if (!(top_fraction > 0.0) || top_fraction > 1.0) {
    throw Error("top_fraction must be in (0, 1]");
  }
  std::vector<double> scores = chi2_scores(vocab.size(), vectors, labels);
  std::vector<std::uint32_t> order(vocab.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    const VocabEntry& ea = vocab.entry(a);
    const VocabEntry& eb = vocab.entry(b);
    if (ea.kind != eb.kind) return ea.kind < eb.kind;
    return ea.key < eb.key;
  });
  auto keep = static_cast<std::size_t>(
      std::ceil(top_fraction * static_cast<double>(vocab.size())));
  keep = std::min(keep, vocab.size());
  std::vector<VocabEntry> entries;
  entries.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) entries.push_back(vocab.entry(order[i]));
  return Vocabulary::from_entries(std::move(entries));
}

}  // namespace sockverif
