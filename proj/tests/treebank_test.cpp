#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "sockverif/errors.hpp"
#include "sockverif/treebank.hpp"

using namespace sockverif;

namespace {

const char* kSentence = "(S (NP (DT The) (NN staff)) (VP (VBD were) (ADJP (JJ friendly))))";

std::vector<std::string> keys_of(const std::vector<PtfEvent>& events, PtfKind kind) {
  std::vector<std::string> keys;
  for (const PtfEvent& e : events) {
    if (e.kind == kind) keys.push_back(e.key);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::map<std::string, int> tag_counts(const std::vector<std::string>& tags) {
  std::map<std::string, int> counts;
  for (const std::string& t : tags) ++counts[t];
  return counts;
}

}  // namespace

TEST_CASE("bracketed parsing mirrors the bracket structure") {
  ParseTree t = parse_bracketed(kSentence);
  CHECK(t.label == "S");
  REQUIRE(t.children.size() == 2);
  CHECK(t.children[0].label == "NP");
  CHECK(t.children[1].label == "VP");
  REQUIRE(t.children[0].children.size() == 2);
  CHECK(t.children[0].children[0].label == "DT");
  CHECK(t.children[0].children[0].is_preterminal());
  CHECK(t.children[0].children[0].children[0].token == "The");  // verbatim, case kept
  CHECK(t.leaf_count() == 4);
  CHECK(t.internal_count() == 8);
}

TEST_CASE("smallest tree is a single preterminal") {
  ParseTree t = parse_bracketed("(A b)");
  CHECK(t.label == "A");
  CHECK(t.is_preterminal());
  REQUIRE(t.children.size() == 1);
  CHECK(t.children[0].token == "b");
  CHECK(t.children[0].is_leaf());
}

TEST_CASE("label-less outer wrapper is unwrapped") {
  ParseTree t = parse_bracketed("( (S (NP (NN dogs)) (VP (VBZ bark))) )");
  CHECK(t.label == "S");
  CHECK(t.children.size() == 2);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(parse_bracketed(""), EmptyInput);
  CHECK_THROWS_AS(parse_bracketed("   \n\t"), EmptyInput);
  CHECK_THROWS_AS(parse_bracketed("(S (NP"), MalformedTree);
  CHECK_THROWS_AS(parse_bracketed("(S a)) extra"), MalformedTree);
  CHECK_THROWS_AS(parse_bracketed("word"), MalformedTree);
  CHECK_THROWS_AS(parse_bracketed("()"), MalformedTree);
  CHECK_THROWS_AS(parse_bracketed("(S)"), MalformedTree);
}

TEST_CASE("serialization round-trips") {
  ParseTree t = parse_bracketed(kSentence);
  CHECK(to_bracketed(t) == kSentence);
  CHECK(parse_bracketed(to_bracketed(t)) == t);

  // whitespace variations normalize to the same canonical form
  ParseTree loose = parse_bracketed(
      "(S   (NP (DT The)\n (NN staff))  (VP (VBD were) (ADJP (JJ friendly))))");
  CHECK(to_bracketed(loose) == kSentence);

  for (const char* text : {"(A b)", "(X (Y z) w)", "(TOP (S (NP (NN a)) (VP (VB b))))"}) {
    ParseTree u = parse_bracketed(text);
    CHECK(parse_bracketed(to_bracketed(u)) == u);
  }
}

TEST_CASE("rule events of the reference sentence") {
  std::vector<PtfEvent> events = extract_ptf(parse_bracketed(kSentence));

  CHECK(keys_of(events, PtfKind::PTF_I) ==
        std::vector<std::string>{"ADJP→JJ", "NP→DT NN", "S→NP VP", "VP→VBD ADJP"});
  CHECK(keys_of(events, PtfKind::PTF_II) ==
        std::vector<std::string>{"ADJP^VP→S", "DT^NP→S", "JJ^ADJP→VP", "NN^NP→S", "VBD^VP→S"});
  std::vector<std::string> rule3 = {"ADJP→JJ", "NP→DT", "NP→NN", "S→NP",
                                    "S→VP",   "VP→VBD", "VP→ADJP"};
  std::sort(rule3.begin(), rule3.end());
  CHECK(keys_of(events, PtfKind::PTF_III) == rule3);
  CHECK(keys_of(events, PtfKind::INTERIOR) ==
        std::vector<std::string>{"ADJP", "DT", "JJ", "NN", "NP", "S", "VBD", "VP"});
  CHECK(events.size() == 24);
}

TEST_CASE("interior event count equals the internal node count") {
  for (const char* text :
       {kSentence, "(A b)", "(X (Y z) (Y z))", "(TOP (S (NP (NN a) (NN b)) (VP (VB c))))"}) {
    ParseTree t = parse_bracketed(text);
    CHECK(keys_of(extract_ptf(t), PtfKind::INTERIOR).size() == t.internal_count());
  }
}

TEST_CASE("preterminal-only tree yields only interior events") {
  std::vector<PtfEvent> events = extract_ptf(parse_bracketed("(A b)"));
  REQUIRE(events.size() == 1);
  CHECK(events[0].kind == PtfKind::INTERIOR);
  CHECK(events[0].key == "A");
}

TEST_CASE("tag extraction reads off the preterminals") {
  auto counts = tag_counts(extract_pos(parse_bracketed(kSentence)));
  CHECK(counts == std::map<std::string, int>{{"DT", 1}, {"NN", 1}, {"VBD", 1}, {"JJ", 1}});
  CHECK(extract_pos(parse_bracketed("(A b)")) == std::vector<std::string>{"A"});
}

TEST_CASE("duplicated sentences double every tag count") {
  ParseTree one = parse_bracketed("(S (NP (NN cat)) (VP (VBZ sits)))");
  ParseTree two = parse_bracketed(
      "(TOP (S (NP (NN cat)) (VP (VBZ sits))) (S (NP (NN cat)) (VP (VBZ sits))))");
  auto single = tag_counts(extract_pos(one));
  auto doubled = tag_counts(extract_pos(two));
  REQUIRE(single.size() == doubled.size());
  for (const auto& [tag, n] : single) CHECK(doubled.at(tag) == 2 * n);
}

TEST_CASE("tag multiset size equals the leaf count") {
  for (const char* text :
       {kSentence, "(A b)", "(NP (DT the) dog)", "(X (Y (Z w)) (Q r s))"}) {
    ParseTree t = parse_bracketed(text);
    CHECK(extract_pos(t).size() == t.leaf_count());
  }
}
