#include "sockverif/treebank.hpp"

#include <cctype>

#include "sockverif/errors.hpp"

namespace sockverif {

namespace {

constexpr const char* kArrow = "→";  // separator in production keys

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
};

std::string read_atom(Cursor& c) {
  std::size_t start = c.pos;
  while (!c.done() && c.peek() != '(' && c.peek() != ')' &&
         !std::isspace(static_cast<unsigned char>(c.peek()))) {
    ++c.pos;
  }
  return std::string(c.text.substr(start, c.pos - start));
}

ParseTree parse_node(Cursor& c) {
  c.skip_ws();
  if (c.done()) throw MalformedTree("unexpected end of input");
  if (c.peek() != '(') {
    // terminal token
    ParseTree leaf;
    leaf.token = read_atom(c);
    if (leaf.token.empty()) throw MalformedTree("stray character in tree");
    return leaf;
  }
  ++c.pos;  // consume '('
  c.skip_ws();
  ParseTree node;
  if (!c.done() && c.peek() != '(' && c.peek() != ')') node.label = read_atom(c);
  c.skip_ws();
  while (!c.done() && c.peek() != ')') {
    node.children.push_back(parse_node(c));
    c.skip_ws();
  }
  if (c.done()) throw MalformedTree("unbalanced brackets");
  ++c.pos;  // consume ')'
  if (node.children.empty()) throw MalformedTree("node '" + node.label + "' has no children");
  return node;
}

void collect_ptf(const ParseTree& node, const ParseTree* parent, const ParseTree* grandparent,
                 std::vector<PtfEvent>& out) {
  if (node.is_leaf()) return;

  out.push_back({PtfKind::INTERIOR, node.label});

  // rule (i): parent -> all non-leaf children, skipped when none qualify
  std::string combo;
  for (const ParseTree& child : node.children) {
    if (child.is_leaf()) continue;
    if (!combo.empty()) combo += ' ';
    combo += child.label;
  }
  if (!combo.empty()) out.push_back({PtfKind::PTF_I, node.label + kArrow + combo});

  // rule (ii): node ^ parent -> grandparent
  if (parent != nullptr && grandparent != nullptr) {
    out.push_back({PtfKind::PTF_II, node.label + "^" + parent->label + kArrow + grandparent->label});
  }

  // rule (iii): parent -> each non-leaf child
  for (const ParseTree& child : node.children) {
    if (child.is_leaf()) continue;
    out.push_back({PtfKind::PTF_III, node.label + kArrow + child.label});
  }

  for (const ParseTree& child : node.children) collect_ptf(child, &node, parent, out);
}

void collect_pos(const ParseTree& node, std::vector<std::string>& out) {
  for (const ParseTree& child : node.children) {
    if (child.is_leaf()) {
      out.push_back(node.label);
    } else {
      collect_pos(child, out);
    }
  }
}

}  // namespace

std::size_t ParseTree::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t n = 0;
  for (const ParseTree& c : children) n += c.leaf_count();
  return n;
}

std::size_t ParseTree::internal_count() const {
  if (is_leaf()) return 0;
  std::size_t n = 1;
  for (const ParseTree& c : children) n += c.internal_count();
  return n;
}

ParseTree parse_bracketed(std::string_view text) {
  Cursor c{text};
  c.skip_ws();
  if (c.done()) throw EmptyInput("empty parse string");
  if (c.peek() != '(') throw MalformedTree("tree must start with '('");
  ParseTree root = parse_node(c);
  c.skip_ws();
  if (!c.done()) throw MalformedTree("trailing text after tree");
  // unwrap a label-less outer bracket, as emitted by some parsers
  if (root.label.empty() && root.children.size() == 1 && !root.children.front().is_leaf()) {
    return std::move(root.children.front());
  }
  if (root.label.empty()) throw MalformedTree("root node has no label");
  return root;
}

std::string to_bracketed(const ParseTree& tree) {
  if (tree.is_leaf()) return tree.token;
  std::string out = "(" + tree.label;
  for (const ParseTree& child : tree.children) {
    out += ' ';
    out += to_bracketed(child);
  }
  out += ')';
  return out;
}

std::vector<PtfEvent> extract_ptf(const ParseTree& tree) {
  std::vector<PtfEvent> events;
  collect_ptf(tree, nullptr, nullptr, events);
  return events;
}

std::vector<std::string> extract_pos(const ParseTree& tree) {
  std::vector<std::string> tags;
  collect_pos(tree, tags);
  return tags;
}

const char* ptf_kind_name(PtfKind kind) {
  switch (kind) {
    case PtfKind::PTF_I: return "PTF_I";
    case PtfKind::PTF_II: return "PTF_II";
    case PtfKind::PTF_III: return "PTF_III";
    case PtfKind::INTERIOR: return "INTERIOR";
  }
  return "?";
}

}  // namespace sockverif
