// Bracketed constituency trees and the stylistic events read off them.
//
// A tree node either carries a nonterminal/preterminal label with children,
// or is a terminal leaf carrying the token. Four event families are
// extracted per tree:
//   PTF_I     parent -> concatenation of its non-leaf children
//   PTF_II    node ^ parent -> grandparent, for non-leaf nodes
//   PTF_III   parent -> each individual non-leaf child
//   INTERIOR  every non-leaf label, with multiplicity
#ifndef SOCKVERIF_TREEBANK_HPP
#define SOCKVERIF_TREEBANK_HPP

#include <string>
#include <string_view>
#include <vector>

namespace sockverif {

struct ParseTree {
  std::string label;                // empty for leaves
  std::vector<ParseTree> children;  // empty for leaves
  std::string token;                // set only for leaves

  bool is_leaf() const { return children.empty(); }
  bool is_preterminal() const {
    return children.size() == 1 && children.front().is_leaf();
  }
  std::size_t leaf_count() const;
  std::size_t internal_count() const;  // nodes that are not leaves

  bool operator==(const ParseTree&) const = default;
};

enum class PtfKind { PTF_I, PTF_II, PTF_III, INTERIOR };

struct PtfEvent {
  PtfKind kind;
  std::string key;  // e.g. "S→NP VP", "JJ^ADJP→VP", "S→NP", "DT"

  bool operator==(const PtfEvent&) const = default;
};

// Parses a single balanced bracketed expression, e.g.
// "(S (NP (DT The) (NN staff)) (VP (VBD were) (ADJP (JJ friendly))))".
// Tokens are preserved verbatim. A bare outer wrapper "( (S ...) )" is
// unwrapped to its single child. Throws EmptyInput on blank input and
// MalformedTree on unbalanced or trailing text.
ParseTree parse_bracketed(std::string_view text);

// Canonical serialization: "(LABEL child ...)" with single spaces.
// parse_bracketed(to_bracketed(t)) == t for any valid tree.
std::string to_bracketed(const ParseTree& tree);

// All stylistic events of the tree, with multiplicity, in traversal order.
std::vector<PtfEvent> extract_ptf(const ParseTree& tree);

// One tag per leaf: the label of the leaf's parent. On conventional trees
// (tokens only under preterminals) this is the preterminal tag multiset.
std::vector<std::string> extract_pos(const ParseTree& tree);

const char* ptf_kind_name(PtfKind kind);

}  // namespace sockverif

#endif
