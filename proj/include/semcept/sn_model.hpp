#ifndef SEMCEPT_SN_MODEL_HPP
#define SEMCEPT_SN_MODEL_HPP

// MultiNet-style semantic networks and the MNSN v1 line format.
//
//   #S <sentence-id>                         starts a block
//   T <index> <surface> <concept-or-->       token line
//   N <node-id> <concept-or--> <sort-or--> [feature=value ...]
//   E <from-id> <RELATION> <to-id>
//
// A blank line or the next #S ends a block; lines starting with // are comments.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "text.hpp"

namespace semcept {

/// A word sense `lemma.h.p`, or a proper name `lemma.0` (homograph == polyseme == 0).
struct ConceptId {
  std::string lemma;
  unsigned homograph = 0;
  unsigned polyseme = 0;

  bool is_proper_name() const noexcept { return homograph == 0 && polyseme == 0; }

  std::string render() const {
    if (is_proper_name()) return lemma + ".0";
    return lemma + "." + std::to_string(homograph) + "." + std::to_string(polyseme);
  }

  friend bool operator==(const ConceptId&, const ConceptId&) = default;
  friend auto operator<=>(const ConceptId&, const ConceptId&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const ConceptId& c) { return os << c.render(); }

namespace detail {

inline std::optional<unsigned> parse_uint(std::string_view s) {
  if (s.empty()) return std::nullopt;
  unsigned v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses `lemma.h.p` or `lemma.0`. The lemma is case-folded.
inline ConceptId parse_concept_id(std::string_view token) {
  auto fail = [&](const std::string& why) -> ConceptId {
    throw FormatError("invalid concept '" + std::string(token) + "': " + why);
  };
  if (token.empty()) return fail("empty token");
  auto last = token.rfind('.');
  if (last == std::string_view::npos) return fail("missing sense suffix");
  auto tail = detail::parse_uint(token.substr(last + 1));
  if (!tail) return fail("non-integer sense suffix");

  ConceptId c;
  std::string_view lemma;
  auto prev = last == 0 ? std::string_view::npos : token.rfind('.', last - 1);
  std::optional<unsigned> head;
  if (prev != std::string_view::npos) head = detail::parse_uint(token.substr(prev + 1, last - prev - 1));

  if (head) {
    if (*head == 0 || *tail == 0) return fail("homograph and polyseme must be >= 1");
    lemma = token.substr(0, prev);
    c.homograph = *head;
    c.polyseme = *tail;
  } else {
    if (*tail != 0) return fail("single suffix must be .0 (proper name)");
    lemma = token.substr(0, last);
  }
  if (lemma.empty()) return fail("empty lemma");
  for (char ch : lemma) {
    if (ch == '.') return fail("dot inside lemma");
    if (std::isspace(static_cast<unsigned char>(ch))) return fail("whitespace inside lemma");
  }
  c.lemma = fold_case(lemma);
  return c;
}

/// Sort taxonomy loaded from `S <name> <parent-or-->` lines. Must form a single rooted tree.
class SortTaxonomy {
 public:
  SortTaxonomy() = default;

  static SortTaxonomy parse(std::istream& in) {
    SortTaxonomy tax;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto t = trim(line);
      if (t.empty() || starts_with(t, "//")) continue;
      auto f = split_whitespace(t);
      if (f.size() != 3 || f[0] != "S") throw FormatError("expected 'S <name> <parent-or-->'", lineno);
      if (tax.parent_.count(f[1])) throw FormatError("duplicate sort '" + f[1] + "'", lineno);
      tax.parent_[f[1]] = f[2] == "-" ? std::optional<std::string>{} : f[2];
      tax.order_.push_back(f[1]);
    }
    tax.validate();
    return tax;
  }

  bool contains(std::string_view name) const { return parent_.count(std::string(name)) > 0; }
  std::optional<std::string> parent_of(const std::string& name) const {
    auto it = parent_.find(name);
    return it == parent_.end() ? std::nullopt : it->second;
  }
  const std::vector<std::string>& names() const { return order_; }
  bool empty() const { return order_.empty(); }

 private:
  void validate() const {
    if (order_.empty()) return;
    std::size_t roots = 0;
    for (auto& [name, parent] : parent_) {
      if (!parent) {
        ++roots;
        continue;
      }
      if (!parent_.count(*parent)) throw FormatError("sort '" + name + "' has unknown parent '" + *parent + "'");
      // walk to the root; more steps than sorts means a cycle
      std::size_t steps = 0;
      auto cur = parent;
      while (cur) {
        if (++steps > parent_.size()) throw FormatError("sort taxonomy has a cycle through '" + name + "'");
        cur = parent_.at(*cur);
      }
    }
    if (roots != 1) throw FormatError("sort taxonomy must have exactly one root, found " + std::to_string(roots));
  }

  std::map<std::string, std::optional<std::string>> parent_;
  std::vector<std::string> order_;
};

struct SnNode {
  std::string id;
  std::optional<ConceptId> sense;  // empty for inner nodes
  std::optional<std::string> sort;
  std::map<std::string, std::string> layer_features;  // e.g. card, refer

  bool is_inner() const noexcept { return !sense.has_value(); }

  friend bool operator==(const SnNode&, const SnNode&) = default;
};

struct Relation {
  std::string name;
  bool symmetric = false;

  friend bool operator==(const Relation&, const Relation&) = default;
};

struct SnEdge {
  std::size_t from = 0;  // node indices into SemanticNetwork::nodes
  Relation relation;
  std::size_t to = 0;

  friend bool operator==(const SnEdge&, const SnEdge&) = default;
};

struct SnToken {
  std::string surface;
  std::optional<ConceptId> sense;

  friend bool operator==(const SnToken&, const SnToken&) = default;
};

/// Configured set of symmetric relation names (Rel == Rel^-1). Empty by default.
using SymmetricRelations = std::set<std::string>;

/// One sentence's semantic network: a directed labeled multigraph plus its surface tokens.
class SemanticNetwork {
 public:
  SemanticNetwork() = default;
  explicit SemanticNetwork(std::string sentence_id) : sentence_id_(std::move(sentence_id)) {}

  const std::string& sentence_id() const noexcept { return sentence_id_; }
  const std::vector<SnNode>& nodes() const noexcept { return nodes_; }
  const std::vector<SnEdge>& edges() const noexcept { return edges_; }
  const std::vector<SnToken>& tokens() const noexcept { return tokens_; }

  std::size_t add_node(SnNode node) {
    if (index_.count(node.id)) throw FormatError("duplicate node id '" + node.id + "'");
    if (node.id.empty()) throw FormatError("empty node id");
    index_.emplace(node.id, nodes_.size());
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
  }

  void add_edge(std::string_view from, Relation relation, std::string_view to) {
    if (relation.name.empty()) throw FormatError("empty relation name");
    edges_.push_back({require_node(from), std::move(relation), require_node(to)});
  }

  void add_token(SnToken token) { tokens_.push_back(std::move(token)); }

  std::optional<std::size_t> find_node(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t inner_node_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const SnNode& n) { return n.is_inner(); }));
  }

  /// Distinct concept labels of the lexical nodes, in first-occurrence order.
  std::vector<ConceptId> concepts() const {
    std::vector<ConceptId> out;
    std::set<ConceptId> seen;
    for (auto& n : nodes_)
      if (n.sense && seen.insert(*n.sense).second) out.push_back(*n.sense);
    return out;
  }

  /// Throws unless every token concept appears as a node label.
  void check_tokens() const {
    std::set<ConceptId> labels;
    for (auto& n : nodes_)
      if (n.sense) labels.insert(*n.sense);
    for (auto& t : tokens_)
      if (t.sense && !labels.count(*t.sense))
        throw FormatError("token '" + t.surface + "' refers to concept " + t.sense->render() +
                          " which is not a node of sentence '" + sentence_id_ + "'");
  }

  friend bool operator==(const SemanticNetwork& a, const SemanticNetwork& b) {
    return a.sentence_id_ == b.sentence_id_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_ &&
           a.tokens_ == b.tokens_;
  }

 private:
  std::size_t require_node(std::string_view id) const {
    auto idx = find_node(id);
    if (!idx) throw FormatError("edge references unknown node '" + std::string(id) + "'");
    return *idx;
  }

  std::string sentence_id_;
  std::vector<SnNode> nodes_;
  std::vector<SnEdge> edges_;
  std::vector<SnToken> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline std::optional<ConceptId> parse_optional_concept(const std::string& field) {
  if (field == "-") return std::nullopt;
  return parse_concept_id(field);
}

}  // namespace detail

/// Parses an MNSN v1 document. Unknown relations are accepted; those listed in
/// `symmetric` get the symmetric flag.
inline std::vector<SemanticNetwork> parse_sn_document(std::istream& in,
                                                      const SymmetricRelations& symmetric = {}) {
  std::vector<SemanticNetwork> out;
  std::optional<SemanticNetwork> current;
  long last_token_index = -1;
  std::size_t lineno = 0;

  auto finish = [&] {
    if (current) {
      current->check_tokens();
      out.push_back(std::move(*current));
      current.reset();
    }
  };

  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    try {
      auto t = trim(line);
      if (starts_with(t, "//")) continue;
      if (t.empty()) {
        finish();
        continue;
      }
      auto f = split_whitespace(t);
      const auto& kind = f[0];
      if (kind == "#S") {
        finish();
        if (f.size() != 2) throw FormatError("expected '#S <sentence-id>'");
        current.emplace(f[1]);
        last_token_index = -1;
        continue;
      }
      if (!current) throw FormatError("'" + kind + "' line outside of a #S block");
      if (kind == "T") {
        if (f.size() != 4) throw FormatError("expected 'T <index> <surface> <concept-or-->'");
        auto idx = detail::parse_uint(f[1]);
        if (!idx) throw FormatError("token index '" + f[1] + "' is not a non-negative integer");
        if (static_cast<long>(*idx) <= last_token_index) throw FormatError("token indices must increase");
        last_token_index = static_cast<long>(*idx);
        current->add_token({f[2], detail::parse_optional_concept(f[3])});
      } else if (kind == "N") {
        if (f.size() < 4) throw FormatError("expected 'N <node-id> <concept-or--> <sort-or--> [k=v ...]'");
        SnNode node;
        node.id = f[1];
        node.sense = detail::parse_optional_concept(f[2]);
        if (f[3] != "-") node.sort = f[3];
        for (std::size_t i = 4; i < f.size(); ++i) {
          auto eq = f[i].find('=');
          if (eq == std::string::npos || eq == 0) throw FormatError("layer feature '" + f[i] + "' is not key=value");
          node.layer_features[f[i].substr(0, eq)] = f[i].substr(eq + 1);
        }
        current->add_node(std::move(node));
      } else if (kind == "E") {
        if (f.size() != 4) throw FormatError("expected 'E <from-id> <RELATION> <to-id>'");
        current->add_edge(f[1], Relation{f[2], symmetric.count(f[2]) > 0}, f[3]);
      } else {
        throw FormatError("unknown line kind '" + kind + "'");
      }
    } catch (const FormatError& e) {
      if (e.line() != 0) throw;
      throw FormatError(e.what(), lineno);
    }
  }
  try {
    finish();
  } catch (const FormatError& e) {
    throw FormatError(e.what(), lineno);
  }
  return out;
}

/// Writes networks back in MNSN v1. Token indices are renumbered from 0.
inline void serialize_sn_document(std::ostream& os, const std::vector<SemanticNetwork>& nets) {
  bool first = true;
  for (auto& net : nets) {
    if (!first) os << '\n';
    first = false;
    os << "#S " << net.sentence_id() << '\n';
    for (std::size_t i = 0; i < net.tokens().size(); ++i) {
      auto& tok = net.tokens()[i];
      os << "T " << i << ' ' << tok.surface << ' ' << (tok.sense ? tok.sense->render() : "-") << '\n';
    }
    for (auto& n : net.nodes()) {
      os << "N " << n.id << ' ' << (n.sense ? n.sense->render() : "-") << ' ' << n.sort.value_or("-");
      for (auto& [k, v] : n.layer_features) os << ' ' << k << '=' << v;
      os << '\n';
    }
    for (auto& e : net.edges())
      os << "E " << net.nodes()[e.from].id << ' ' << e.relation.name << ' ' << net.nodes()[e.to].id << '\n';
  }
}

/// Checks that every node sort is declared in the taxonomy.
inline void check_sorts(const std::vector<SemanticNetwork>& nets, const SortTaxonomy& taxonomy) {
  for (auto& net : nets)
    for (auto& n : net.nodes())
      if (n.sort && !taxonomy.contains(*n.sort))
        throw FormatError("node '" + n.id + "' in sentence '" + net.sentence_id() + "' has undeclared sort '" +
                          *n.sort + "'");
}

}  // namespace semcept

#endif  // SEMCEPT_SN_MODEL_HPP
