#include <gtest/gtest.h>

#include <cmath>

#include <algorithm>
#include <sstream>

#include "semcept/random.hpp"
#include "semcept/wsd.hpp"
#include "test_support.hpp"

using namespace semcept;
using semcept::testing::make_table;
using semcept::testing::words;

namespace {

SemanticNetwork sentence(const std::string& id, std::vector<std::pair<std::string, std::string>> tokens) {
  SemanticNetwork net(id);
  std::size_t n = 0;
  for (auto& [surface, concept_text] : tokens) {
    std::optional<ConceptId> c;
    if (!concept_text.empty()) {
      c = parse_concept_id(concept_text);
      if (!net.find_node(concept_text)) net.add_node({concept_text, c, std::nullopt, {}});
    }
    net.add_token({surface, c});
    ++n;
  }
  return net;
}

Lexicon lexicon(const std::string& text) {
  std::istringstream in(text);
  return Lexicon::parse(in);
}

}  // namespace

TEST(SentenceCentroid, Examples) {
  auto t = make_table({{"a", {1, 0}}, {"b", {0, 1}}, {"w", {0.25f, -2}}});
  auto c1 = sentence_centroid(words({"w"}), t);
  EXPECT_EQ(c1.vector, (std::vector<double>{0.25, -2}));
  auto c2 = sentence_centroid(words({"w", "w"}), t);
  EXPECT_EQ(c2.vector, (std::vector<double>{0.25, -2}));
  auto c3 = sentence_centroid(words({"a", "b"}), t);
  EXPECT_EQ(c3.vector, (std::vector<double>{0.5, 0.5}));
  auto c4 = sentence_centroid(words({"a", "zz", "b"}), t);
  EXPECT_EQ(c4.vector, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(c4.misses, 1u);
}

TEST(SentenceCentroid, AllOutOfVocabulary) {
  auto t = make_table({{"a", {1, 0}}});
  auto c = sentence_centroid(words({"x", "y"}), t);
  EXPECT_TRUE(c.empty());
  EXPECT_EQ(c.misses, 2u);
  EXPECT_EQ(c.vector, (std::vector<double>{0, 0}));
}

TEST(WordConceptTable, SingleSentenceEqualsCentroid) {
  auto t = make_table({{"Zug", {1, 0}}, {"London", {0, 1}}});
  std::vector<SemanticNetwork> nets{sentence("s1", {{"Zug", "zug.1.1"}, {"London", "london.0"}})};
  auto wct = build_word_concept_table(nets, t);
  ASSERT_EQ(wct.size(), 2u);
  EXPECT_EQ(wct.find(parse_concept_id("zug.1.1"))->vector, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(wct.find(parse_concept_id("zug.1.1"))->count, 1u);
}

TEST(WordConceptTable, TwoSentencesAverageCentroids) {
  auto t = make_table({{"a", {1, 0}}, {"b", {0, 1}}, {"c", {3, 3}}});
  std::vector<SemanticNetwork> nets{sentence("s1", {{"a", "x.1.1"}}), sentence("s2", {{"b", "x.1.1"}, {"c", ""}})};
  auto wct = build_word_concept_table(nets, t);
  // centroids u = (1,0), v = (1.5, 2); (u+v)/2 = (1.25, 1)
  EXPECT_EQ(wct.find(parse_concept_id("x.1.1"))->vector, (std::vector<double>{1.25, 1.0}));
  EXPECT_EQ(wct.find(parse_concept_id("x.1.1"))->count, 2u);
}

TEST(WordConceptTable, EmptyInput) {
  auto t = make_table({{"a", {1, 0}}});
  EXPECT_EQ(build_word_concept_table(std::vector<SemanticNetwork>{}, t).size(), 0u);
}

TEST(WordConceptTable, ConceptOnlyInUnknownSentencesExcluded) {
  auto t = make_table({{"a", {1, 0}}});
  std::vector<SemanticNetwork> nets{sentence("s1", {{"a", "x.1.1"}}), sentence("s2", {{"q", "y.1.1"}})};
  auto wct = build_word_concept_table(nets, t);
  EXPECT_TRUE(wct.contains(parse_concept_id("x.1.1")));
  EXPECT_FALSE(wct.contains(parse_concept_id("y.1.1")));
  ASSERT_EQ(wct.warnings().size(), 1u);
  EXPECT_NE(wct.warnings()[0].find("y.1.1"), std::string::npos);
}

TEST(WordConceptTable, PermutationInvariant) {
  RandomSource rng(4);
  std::vector<std::string> vocab;
  std::vector<std::vector<float>> vecs;
  for (int i = 0; i < 20; ++i) {
    vocab.push_back("w" + std::to_string(i));
    vecs.push_back({static_cast<float>(rng.uniform01()), static_cast<float>(rng.uniform01() - 0.5),
                    static_cast<float>(rng.uniform01())});
  }
  auto t = make_table(vocab, vecs);
  std::vector<SemanticNetwork> nets;
  for (int s = 0; s < 30; ++s) {
    std::vector<std::pair<std::string, std::string>> toks;
    for (int k = 0; k < 4; ++k) {
      auto w = vocab[rng.index(vocab.size())];
      std::string c = rng.index(2) ? "c" + std::to_string(rng.index(5)) + ".1.1" : "";
      toks.push_back({w, c});
    }
    nets.push_back(sentence("s" + std::to_string(s), toks));
  }
  auto base = build_word_concept_table(nets, t);
  for (int trial = 0; trial < 5; ++trial) {
    auto shuffled = nets;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.index(i + 1)]);
    auto other = build_word_concept_table(shuffled, t);
    ASSERT_EQ(other.size(), base.size());
    for (auto& [c, e] : base.entries()) {
      auto* o = other.find(c);
      ASSERT_TRUE(o);
      EXPECT_EQ(o->count, e.count);
      for (std::size_t i = 0; i < e.vector.size(); ++i) EXPECT_NEAR(o->vector[i], e.vector[i], 1e-12);
    }
  }
}

TEST(WordConceptTable, SaveLoad) {
  auto t = make_table({{"a", {1, 0}}, {"b", {0.125f, 1}}});
  std::vector<SemanticNetwork> nets{sentence("s1", {{"a", "x.1.1"}, {"b", "y.0"}})};
  auto wct = build_word_concept_table(nets, t);
  std::stringstream io;
  save_word_concept_table(io, wct);
  EXPECT_EQ(io.str().substr(0, 5), "#WCT\n");
  auto back = load_word_concept_table(io);
  ASSERT_EQ(back.size(), wct.size());
  for (auto& [c, e] : wct.entries()) EXPECT_EQ(back.find(c)->vector, e.vector);
  std::istringstream untagged("1 2\nx.1.1 1 2\n");
  EXPECT_THROW(load_word_concept_table(untagged), FormatError);
}

TEST(Disambiguate, SingleSenseWins) {
  auto lex = lexicon("L lok lok.1.1 N -\n");
  auto t = make_table({{"Lok", {1, 0}}, {"Vogel", {0, 1}}});
  WordConceptTable wct(2);
  wct.entries()[parse_concept_id("lok.1.1")] = {{-1, 0}, 1};
  EXPECT_EQ(disambiguate("Lok", words({"Vogel"}), lex, wct, t), parse_concept_id("lok.1.1"));
}

TEST(Disambiguate, ForcedMaximum) {
  auto lex = lexicon("L zug zug.1.1 N -\nL zug zug.1.2 N -\n");
  auto t = make_table({{"Zug", {1, 1}}, {"Gleis", {1, 0}}, {"Vogel", {0, 1}}});
  WordConceptTable wct(2);
  wct.entries()[parse_concept_id("zug.1.1")] = {{0.2, 0.9}, 1};
  wct.entries()[parse_concept_id("zug.1.2")] = {{1, 0.5}, 1};  // equals centroid of {Zug, Gleis}
  EXPECT_EQ(disambiguate("Zug", words({"Zug", "Gleis"}), lex, wct, t), parse_concept_id("zug.1.2"));
  EXPECT_EQ(disambiguate("Zug", words({"Vogel"}), lex, wct, t), parse_concept_id("zug.1.1"));
}

TEST(Disambiguate, TieGoesToSmallestSense) {
  auto lex = lexicon("L zug zug.2.1 N -\nL zug zug.1.2 N -\nL zug zug.1.3 N -\n");
  auto t = make_table({{"x", {1, 0}}});
  WordConceptTable wct(2);
  for (auto s : {"zug.2.1", "zug.1.2", "zug.1.3"}) wct.entries()[parse_concept_id(s)] = {{1, 0}, 1};
  EXPECT_EQ(disambiguate("zug", words({"x"}), lex, wct, t), parse_concept_id("zug.1.2"));
}

TEST(Disambiguate, NoSense) {
  auto lex = lexicon("L zug zug.1.1 N -\n");
  auto t = make_table({{"x", {1, 0}}});
  WordConceptTable wct(2);
  EXPECT_FALSE(disambiguate("Zug", words({"x"}), lex, wct, t));     // sense not in table
  EXPECT_FALSE(disambiguate("Schiff", words({"x"}), lex, wct, t));  // unknown lemma
}

namespace {

// Independent oracle: every candidate cosine computed by hand, best kept with the
// (homograph, polyseme) tie rule.
std::optional<ConceptId> brute_force(const std::string& word, const std::vector<std::string>& sentence,
                                     const Lexicon& lex, const WordConceptTable& wct, const EmbeddingTable& t) {
  std::vector<double> centroid(t.dimension(), 0.0);
  int used = 0;
  for (auto& w : sentence) {
    auto i = t.vocabulary().find(w);
    if (!i) continue;
    ++used;
    for (std::size_t d = 0; d < t.dimension(); ++d) centroid[d] += t.input(*i)[d];
  }
  for (auto& x : centroid) x /= std::max(used, 1);
  std::optional<ConceptId> best;
  double best_cos = -3;
  for (auto& [c, e] : wct.entries()) {
    if (c.lemma != fold_case(word)) continue;
    if (lex.senses_of(word).end() == std::find(lex.senses_of(word).begin(), lex.senses_of(word).end(), c)) continue;
    double dot = 0, na = 0, nb = 0;
    for (std::size_t d = 0; d < centroid.size(); ++d) {
      dot += e.vector[d] * centroid[d];
      na += e.vector[d] * e.vector[d];
      nb += centroid[d] * centroid[d];
    }
    double cs = (na == 0 || nb == 0) ? 0.0 : dot / std::sqrt(na * nb);
    bool better = cs > best_cos ||
                  (cs == best_cos && std::tie(c.homograph, c.polyseme) < std::tie(best->homograph, best->polyseme));
    if (!best || better) {
      best = c;
      best_cos = cs;
    }
  }
  return best;
}

}  // namespace

TEST(Disambiguate, AgreesWithBruteForceOracle) {
  RandomSource rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::string lex_text;
    WordConceptTable wct(4);
    std::size_t senses = 1 + rng.index(4);
    for (std::size_t s = 0; s < senses; ++s) {
      ConceptId c{"wort", 1 + static_cast<unsigned>(rng.index(3)), 1 + static_cast<unsigned>(s)};
      lex_text += "L wort " + c.render() + " N -\n";
      if (rng.index(5) != 0) {
        std::vector<double> v(4);
        for (auto& x : v) x = rng.uniform01() - 0.5;
        wct.entries()[c] = {v, 1};
      }
    }
    auto lex = lexicon(lex_text);
    std::vector<std::string> vocab{"wort", "a", "b", "c", "d"};
    std::vector<std::vector<float>> vecs;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      std::vector<float> v(4);
      for (auto& x : v) x = static_cast<float>(rng.uniform01() - 0.5);
      vecs.push_back(v);
    }
    auto t = make_table(vocab, vecs);
    std::vector<std::string> sent{"Wort"};
    for (std::size_t k = 0, n = rng.index(4); k < n; ++k) sent.push_back(vocab[rng.index(vocab.size())]);
    EXPECT_EQ(disambiguate("Wort", sent, lex, wct, t), brute_force("Wort", sent, lex, wct, t));
  }
}

TEST(Disambiguate, ScaleInvariant) {
  RandomSource rng(31);
  auto lex = lexicon("L zug zug.1.1 N -\nL zug zug.1.2 N -\nL zug zug.2.1 N -\n");
  std::vector<std::string> vocab{"Zug", "Gleis", "Vogel", "Lok", "Herbst"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<float>> vecs, scaled;
    double k = std::ldexp(1.0, static_cast<int>(rng.index(13)) - 6);  // exact in float
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      std::vector<float> v(3);
      for (auto& x : v) x = static_cast<float>(rng.uniform01() - 0.5);
      vecs.push_back(v);
      for (auto& x : v) x = static_cast<float>(x * k);
      scaled.push_back(v);
    }
    auto t = make_table(vocab, vecs);
    auto ts = make_table(vocab, scaled);
    std::vector<SemanticNetwork> nets;
    for (int s = 0; s < 6; ++s) {
      std::vector<std::pair<std::string, std::string>> toks{{"Zug", s % 3 == 0 ? "zug.1.1" : (s % 3 == 1 ? "zug.1.2" : "zug.2.1")}};
      toks.push_back({vocab[1 + rng.index(4)], ""});
      toks.push_back({vocab[1 + rng.index(4)], ""});
      nets.push_back(sentence("s" + std::to_string(s), toks));
    }
    auto wct = build_word_concept_table(nets, t);
    auto wcts = build_word_concept_table(nets, ts);
    std::vector<std::string> sent{"Zug", vocab[1 + rng.index(4)]};
    EXPECT_EQ(disambiguate("Zug", sent, lex, wct, t), disambiguate("Zug", sent, lex, wcts, ts));
  }
}
