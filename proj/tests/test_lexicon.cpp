#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "semcept/lexicon.hpp"

using namespace semcept;

namespace {

Lexicon load() {
  std::ifstream in(SEMCEPT_TEST_DATA "/lexicon.txt");
  return Lexicon::parse(in);
}

Lexicon parse(const std::string& s) {
  std::istringstream in(s);
  return Lexicon::parse(in);
}

ConceptId cid(const char* s) { return parse_concept_id(s); }

}  // namespace

TEST(Lexicon, SensesAreCaseInsensitive) {
  auto lex = load();
  std::vector<ConceptId> zug{cid("zug.1.1"), cid("zug.1.2")};
  EXPECT_EQ(lex.senses_of("Zug"), zug);
  EXPECT_EQ(lex.senses_of("zug"), zug);
  EXPECT_EQ(lex.senses_of("LOK"), std::vector<ConceptId>{cid("lok.1.1")});
  EXPECT_TRUE(lex.senses_of("schiff").empty());
}

TEST(Lexicon, CapitalizationInvariance) {
  auto lex = load();
  for (auto lemma : {"zug", "lok", "inform", "cold", "fahren", "unknown"})
    EXPECT_EQ(lex.senses_of(lemma), lex.senses_of(capitalize_first(lemma))) << lemma;
}

TEST(Lexicon, NounSurrogate) {
  auto lex = load();
  EXPECT_EQ(lex.noun_surrogate(cid("inform.1.1")), cid("information.1.1"));
  EXPECT_EQ(lex.noun_surrogate(cid("cold.1.1")), cid("coldness.1.1"));
  EXPECT_EQ(lex.noun_surrogate(cid("zug.1.1")), cid("zug.1.1"));
}

TEST(Lexicon, NounSurrogateIdempotentOnTestLexicon) {
  auto lex = load();
  for (auto s : {"inform.1.1", "cold.1.1", "zug.1.1", "information.1.1", "lok.1.1"}) {
    auto once = lex.noun_surrogate(cid(s));
    EXPECT_EQ(lex.noun_surrogate(once), once) << s;
  }
}

TEST(Lexicon, MultipleLinksUseFirstAndWarn) {
  auto lex = parse("X CHEA inform.1.1 information.1.1\nX CHEA inform.1.1 notice.1.1\n");
  EXPECT_EQ(lex.noun_surrogate(cid("inform.1.1")), cid("information.1.1"));
  ASSERT_EQ(lex.warnings().size(), 1u);
  EXPECT_NE(lex.warnings()[0].find("inform.1.1"), std::string::npos);
}

TEST(Lexicon, SurrogationIsSingleStep) {
  auto lex = parse("X CHEA a.1.1 b.1.1\nX CHPA b.1.1 c.1.1\n");
  EXPECT_EQ(lex.noun_surrogate(cid("a.1.1")), cid("b.1.1"));
}

TEST(Lexicon, Lemmatize) {
  auto lex = load();
  EXPECT_EQ(lex.lemmatize("Zug"), "zug");
  EXPECT_EQ(lex.lemmatize("informed"), "inform");
  EXPECT_EQ(lex.lemmatize("Z\xC3\x9C" "GE"), "zug");
  EXPECT_EQ(lex.lemmatize("Haus"), "haus");
  std::istringstream extra("fuhr fahren\n");
  lex.load_lemma_map(extra);
  EXPECT_EQ(lex.lemmatize("fuhr"), "fahren");
}

TEST(Lexicon, RejectsBadEntries) {
  EXPECT_THROW(parse("L zug lok.1.1 N -\n"), FormatError);            // concept of another lemma
  EXPECT_THROW(parse("L zug zug.1.1 N -\nL zug zug.1.1 N -\n"), FormatError);
  EXPECT_THROW(parse("L zug zug.1.1 Q -\n"), FormatError);            // bad part of speech
  EXPECT_THROW(parse("X SUB a.1.1 b.1.1\n"), FormatError);
  EXPECT_THROW(parse("L zug zug.1.1\n"), FormatError);
  EXPECT_THROW(parse("Y what\n"), FormatError);
  // CHEA source declared as adjective
  EXPECT_THROW(parse("L cold cold.1.1 A -\nX CHEA cold.1.1 coldness.1.1\n"), FormatError);
  // CHPA target declared as verb
  EXPECT_THROW(parse("L fahren fahren.1.1 V -\nX CHPA cold.1.1 fahren.1.1\n"), FormatError);
}

TEST(Lexicon, ErrorLineNumbers) {
  try {
    parse("L zug zug.1.1 N -\n\nL zug zug.x N -\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}
