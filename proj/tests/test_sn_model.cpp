#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "semcept/random.hpp"
#include "semcept/sn_model.hpp"

using namespace semcept;

namespace {

std::vector<SemanticNetwork> parse_text(const std::string& text, const SymmetricRelations& sym = {}) {
  std::istringstream in(text);
  return parse_sn_document(in, sym);
}

std::vector<SemanticNetwork> load_fig1() {
  std::ifstream in(SEMCEPT_TEST_DATA "/fig1.mnsn");
  return parse_sn_document(in);
}

}  // namespace

TEST(ConceptId, ParsesLexicalForm) {
  auto c = parse_concept_id("zug.1.2");
  EXPECT_EQ(c.lemma, "zug");
  EXPECT_EQ(c.homograph, 1u);
  EXPECT_EQ(c.polyseme, 2u);
  EXPECT_FALSE(c.is_proper_name());
  EXPECT_EQ(c.render(), "zug.1.2");
}

TEST(ConceptId, ParsesProperName) {
  auto c = parse_concept_id("york.0");
  EXPECT_TRUE(c.is_proper_name());
  EXPECT_EQ(c.lemma, "york");
  EXPECT_EQ(parse_concept_id("new_york.0").lemma, "new_york");
}

TEST(ConceptId, RejectsMalformedTokens) {
  for (auto bad : {"zug", "zug.x", "zug.1", "zug.0.1", "zug.1.0", ".0", "", "a.b.1.1", "zug.1.2x", "zug."})
    EXPECT_THROW(parse_concept_id(bad), FormatError) << bad;
}

TEST(ConceptId, FoldsLemmaCase) { EXPECT_EQ(parse_concept_id("Lok.1.1").lemma, "lok"); }

TEST(ConceptId, RenderParseRoundTrip) {
  RandomSource rng(7);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz_";
  for (int i = 0; i < 500; ++i) {
    ConceptId c;
    std::size_t len = 1 + rng.index(8);
    for (std::size_t k = 0; k < len; ++k) c.lemma += alphabet[rng.index(alphabet.size())];
    if (rng.index(4) != 0) {
      c.homograph = 1 + static_cast<unsigned>(rng.index(9));
      c.polyseme = 1 + static_cast<unsigned>(rng.index(9));
    }
    EXPECT_EQ(parse_concept_id(c.render()), c) << c.render();
  }
}

TEST(SnParser, Fig1Network) {
  auto nets = load_fig1();
  ASSERT_EQ(nets.size(), 1u);
  auto& net = nets[0];
  EXPECT_EQ(net.sentence_id(), "fig1");
  EXPECT_EQ(net.nodes().size(), 12u);
  EXPECT_EQ(net.inner_node_count(), 4u);
  EXPECT_EQ(net.edges().size(), 10u);
  EXPECT_EQ(net.tokens().size(), 13u);
  auto c2 = net.find_node("c2");
  ASSERT_TRUE(c2);
  EXPECT_EQ(net.nodes()[*c2].layer_features.at("card"), "1");
  EXPECT_EQ(net.nodes()[*c2].sort.value(), "d");
}

TEST(SnParser, EmptyInput) {
  EXPECT_TRUE(parse_text("").empty());
  EXPECT_TRUE(parse_text("// only a comment\n\n").empty());
}

TEST(SnParser, MinimalBlock) {
  auto nets = parse_text("#S s1\nN a lok.1.1 -\nN b zug.1.1 -\nE a SUB b\n");
  ASSERT_EQ(nets.size(), 1u);
  ASSERT_EQ(nets[0].edges().size(), 1u);
  auto& e = nets[0].edges()[0];
  EXPECT_EQ(nets[0].nodes()[e.from].id, "a");
  EXPECT_EQ(e.relation.name, "SUB");
  EXPECT_FALSE(e.relation.symmetric);
  EXPECT_EQ(nets[0].nodes()[e.to].id, "b");
  EXPECT_TRUE(nets[0].tokens().empty());
}

TEST(SnParser, BlocksEndAtBlankLineOrNextHeader) {
  auto nets = parse_text("#S a\nN x lok.1.1 -\n\n#S b\nN y zug.1.1 -\n#S c\nN z zug.1.2 -\n");
  ASSERT_EQ(nets.size(), 3u);
  EXPECT_EQ(nets[0].sentence_id(), "a");
  EXPECT_EQ(nets[1].sentence_id(), "b");
  EXPECT_EQ(nets[2].sentence_id(), "c");
}

TEST(SnParser, SymmetricFlagFromConfig) {
  auto nets = parse_text("#S s\nN a a.1.1 -\nN b b.1.1 -\nE a ASSOC b\nE a SUB b\n", {"ASSOC"});
  EXPECT_TRUE(nets[0].edges()[0].relation.symmetric);
  EXPECT_FALSE(nets[0].edges()[1].relation.symmetric);
}

TEST(SnParser, ParallelEdgesAllowed) {
  auto nets = parse_text("#S s\nN a a.1.1 -\nN b b.1.1 -\nE a SUB b\nE a SUB b\nE b OBJ a\n");
  EXPECT_EQ(nets[0].edges().size(), 3u);
}

TEST(SnParser, ErrorsCarryLineNumbers) {
  try {
    parse_text("#S s\nN a lok.1.1 -\nQ what\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(SnParser, UnknownEdgeEndpointNamed) {
  try {
    parse_text("#S s\nN a lok.1.1 -\nE a SUB ghost\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(SnParser, DuplicateNodeRejected) {
  EXPECT_THROW(parse_text("#S s\nN a lok.1.1 -\nN a zug.1.1 -\n"), FormatError);
}

TEST(SnParser, RejectsStructuralMistakes) {
  EXPECT_THROW(parse_text("N a lok.1.1 -\n"), FormatError);                       // outside block
  EXPECT_THROW(parse_text("#S s\nN a lok.1.1\n"), FormatError);                   // missing sort field
  EXPECT_THROW(parse_text("#S s\nN a lok -\n"), FormatError);                     // bad concept
  EXPECT_THROW(parse_text("#S s\nT 0 Zug zug.1.1\nN a lok.1.1 -\n"), FormatError);  // token concept not a node
  EXPECT_THROW(parse_text("#S s\nT 1 a -\nT 0 b -\n"), FormatError);              // decreasing index
  EXPECT_THROW(parse_text("#S s\nN a lok.1.1 - card\n"), FormatError);            // feature without '='
  EXPECT_THROW(parse_text("#S\n"), FormatError);
}

namespace {

SemanticNetwork random_network(RandomSource& rng, int id) {
  SemanticNetwork net("s" + std::to_string(id));
  const std::vector<std::string> lemmas{"zug", "lok", "vogel", "bahn", "fahren", "rot"};
  const std::vector<std::string> rels{"AGT", "OBJ", "SUB", "PROP", "MODP*", "TEMP"};
  std::size_t n = 1 + rng.index(6);
  std::vector<ConceptId> labels;
  for (std::size_t i = 0; i < n; ++i) {
    SnNode node;
    node.id = "n" + std::to_string(i);
    if (rng.index(3) != 0) {
      ConceptId c{lemmas[rng.index(lemmas.size())], 1 + static_cast<unsigned>(rng.index(2)), 1 + static_cast<unsigned>(rng.index(2))};
      node.sense = c;
      labels.push_back(c);
    }
    if (rng.index(2)) node.sort = "d";
    if (rng.index(3) == 0) node.layer_features["card"] = std::to_string(rng.index(5));
    net.add_node(node);
  }
  std::size_t m = rng.index(8);
  for (std::size_t i = 0; i < m; ++i)
    net.add_edge("n" + std::to_string(rng.index(n)), Relation{rels[rng.index(rels.size())], false},
                 "n" + std::to_string(rng.index(n)));
  std::size_t t = rng.index(5);
  for (std::size_t i = 0; i < t; ++i) {
    std::optional<ConceptId> c;
    if (!labels.empty() && rng.index(2)) c = labels[rng.index(labels.size())];
    net.add_token({"w" + std::to_string(i), c});
  }
  return net;
}

}  // namespace

TEST(SnParser, SerializeParseRoundTrip) {
  RandomSource rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SemanticNetwork> nets;
    std::size_t count = rng.index(4);
    for (std::size_t i = 0; i < count; ++i) nets.push_back(random_network(rng, static_cast<int>(i)));
    std::ostringstream out;
    serialize_sn_document(out, nets);
    EXPECT_EQ(parse_text(out.str()), nets) << out.str();
  }
}

TEST(SnParser, Fig1RoundTrip) {
  auto nets = load_fig1();
  std::ostringstream out;
  serialize_sn_document(out, nets);
  EXPECT_EQ(parse_text(out.str()), nets);
}

TEST(SortTaxonomy, LoadsTree) {
  std::ifstream in(SEMCEPT_TEST_DATA "/sorts.txt");
  auto tax = SortTaxonomy::parse(in);
  EXPECT_TRUE(tax.contains("dy"));
  EXPECT_EQ(tax.parent_of("dy").value(), "si");
  EXPECT_FALSE(tax.parent_of("ent").has_value());
  EXPECT_NO_THROW(check_sorts(load_fig1(), tax));
}

TEST(SortTaxonomy, RejectsNonTrees) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return SortTaxonomy::parse(in);
  };
  EXPECT_THROW(parse("S a -\nS b -\n"), FormatError);        // two roots
  EXPECT_THROW(parse("S r -\nS a b\nS b a\n"), FormatError);  // cycle
  EXPECT_THROW(parse("S r -\nS a zz\n"), FormatError);        // unknown parent
  EXPECT_THROW(parse("S r -\nS r -\n"), FormatError);         // duplicate
}

TEST(SortTaxonomy, UndeclaredNodeSort) {
  std::istringstream in("S ent -\n");
  auto tax = SortTaxonomy::parse(in);
  EXPECT_THROW(check_sorts(load_fig1(), tax), FormatError);
}
