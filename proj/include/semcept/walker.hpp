#ifndef SEMCEPT_WALKER_HPP
#define SEMCEPT_WALKER_HPP

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "random.hpp"
#include "sn_model.hpp"

namespace semcept {

/// Suffix marking a relation traversed against its arc direction.
inline constexpr std::string_view kInverseMarker = "~";

struct WalkToken {
  enum class Kind { Concept, Relation, Inner, Sort };

  Kind kind = Kind::Concept;
  std::optional<ConceptId> sense;  // Concept only
  std::string text;                  // relation name, inner node id, or sort name
  bool inverted = false;             // Relation only; never set for symmetric relations

  static WalkToken of_concept(ConceptId c) { return {Kind::Concept, std::move(c), {}, false}; }
  static WalkToken of_relation(std::string name, bool inverted) {
    return {Kind::Relation, std::nullopt, std::move(name), inverted};
  }
  static WalkToken of_inner(std::string node_id) { return {Kind::Inner, std::nullopt, std::move(node_id), false}; }
  static WalkToken of_sort(std::string sort) { return {Kind::Sort, std::nullopt, std::move(sort), false}; }

  bool is_relation() const noexcept { return kind == Kind::Relation; }

  std::string render() const {
    switch (kind) {
      case Kind::Concept: return sense->render();
      case Kind::Relation: return inverted ? text + std::string(kInverseMarker) : text;
      case Kind::Inner:
      case Kind::Sort: return text;
    }
    return text;
  }

  friend bool operator==(const WalkToken&, const WalkToken&) = default;
};

struct WalkSequence {
  std::vector<WalkToken> tokens;

  /// Number of edge traversals (relation tokens).
  std::size_t steps() const {
    std::size_t n = 0;
    for (auto& t : tokens) n += t.is_relation();
    return n;
  }

  std::string render() const {
    std::string out;
    for (auto& t : tokens) {
      if (!out.empty()) out += ' ';
      out += t.render();
    }
    return out;
  }

  friend bool operator==(const WalkSequence&, const WalkSequence&) = default;
};

enum class InnerNodePolicy { Elide, ReplaceWithSort };

struct WalkConfig {
  double stop_threshold = 0.05;
  std::size_t max_steps = 40;
  std::size_t walks_per_network = 10;
  InnerNodePolicy inner_node_policy = InnerNodePolicy::Elide;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(stop_threshold > 0.0 && stop_threshold < 0.5))
      throw WalkError("stop_threshold must lie in (0, 0.5)");
    if (max_steps == 0) throw WalkError("max_steps must be positive");
    if (walks_per_network == 0) throw WalkError("walks_per_network must be positive");
  }
};

/// One traversable edge slot at a node. Parallel edges and self-loops yield separate slots.
struct IncidentEdge {
  std::size_t edge = 0;
  bool forward = true;  // true: follows the arc direction
};

/// Incident edge slots per node, ordered by edge index with the forward slot first.
inline std::vector<std::vector<IncidentEdge>> incidence(const SemanticNetwork& net) {
  std::vector<std::vector<IncidentEdge>> adj(net.nodes().size());
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    adj[net.edges()[e].from].push_back({e, true});
    adj[net.edges()[e].to].push_back({e, false});
  }
  return adj;
}

inline WalkToken node_token(const SemanticNetwork& net, std::size_t node) {
  auto& n = net.nodes()[node];
  return n.sense ? WalkToken::of_concept(*n.sense) : WalkToken::of_inner(n.id);
}

/// Relation token for crossing `edge`; symmetric relations are never inverted.
inline WalkToken relation_token(const SemanticNetwork& net, IncidentEdge slot) {
  auto& rel = net.edges()[slot.edge].relation;
  return WalkToken::of_relation(rel.name, !slot.forward && !rel.symmetric);
}

inline std::size_t other_end(const SemanticNetwork& net, IncidentEdge slot) {
  auto& e = net.edges()[slot.edge];
  return slot.forward ? e.to : e.from;
}

/// Raw walk (inner nodes kept). `Source` needs `index(n)` and `uniform01()`.
/// Starts at a uniform node, crosses a uniform incident edge slot per step, and stops
/// when a uniform draw after a step falls below stop_threshold or max_steps is reached.
template <class Source>
WalkSequence random_walk(const SemanticNetwork& net, const WalkConfig& cfg, Source& rng,
                         const std::vector<std::vector<IncidentEdge>>& adj) {
  if (net.nodes().empty()) throw WalkError("cannot walk empty network '" + net.sentence_id() + "'");
  WalkSequence walk;
  std::size_t node = rng.index(net.nodes().size());
  walk.tokens.push_back(node_token(net, node));
  std::size_t steps = 0;
  while (!adj[node].empty()) {
    auto slot = adj[node][rng.index(adj[node].size())];
    walk.tokens.push_back(relation_token(net, slot));
    node = other_end(net, slot);
    walk.tokens.push_back(node_token(net, node));
    if (++steps >= cfg.max_steps) break;
    if (rng.uniform01() < cfg.stop_threshold) break;
  }
  return walk;
}

template <class Source>
WalkSequence random_walk(const SemanticNetwork& net, const WalkConfig& cfg, Source& rng) {
  return random_walk(net, cfg, rng, incidence(net));
}

/// Renders the walk along a given node path. Consecutive nodes must be adjacent; the first
/// matching edge slot (forward before backward) is taken.
inline WalkSequence walk_along(const SemanticNetwork& net, std::span<const std::string> node_ids) {
  WalkSequence walk;
  if (node_ids.empty()) return walk;
  auto adj = incidence(net);
  auto lookup = [&](const std::string& id) {
    auto idx = net.find_node(id);
    if (!idx) throw WalkError("unknown node '" + id + "'");
    return *idx;
  };
  std::size_t node = lookup(node_ids[0]);
  walk.tokens.push_back(node_token(net, node));
  for (std::size_t i = 1; i < node_ids.size(); ++i) {
    std::size_t next = lookup(node_ids[i]);
    const IncidentEdge* chosen = nullptr;
    for (auto& slot : adj[node])
      if (other_end(net, slot) == next) {
        chosen = &slot;
        break;
      }
    if (!chosen) throw WalkError("nodes '" + node_ids[i - 1] + "' and '" + node_ids[i] + "' are not adjacent");
    walk.tokens.push_back(relation_token(net, *chosen));
    node = next;
    walk.tokens.push_back(node_token(net, node));
  }
  return walk;
}

using SortLookup = std::function<std::optional<std::string>(std::string_view node_id)>;

/// Removes inner-node tokens (Elide) or replaces them by their sort (ReplaceWithSort).
inline WalkSequence elide_inner_nodes(const WalkSequence& walk, InnerNodePolicy policy, const SortLookup& sort_of) {
  WalkSequence out;
  out.tokens.reserve(walk.tokens.size());
  for (auto& t : walk.tokens) {
    if (t.kind != WalkToken::Kind::Inner) {
      out.tokens.push_back(t);
      continue;
    }
    if (policy == InnerNodePolicy::Elide) continue;
    auto sort = sort_of ? sort_of(t.text) : std::nullopt;
    if (!sort) throw WalkError("inner node '" + t.text + "' has no sort");
    out.tokens.push_back(WalkToken::of_sort(*sort));
  }
  return out;
}

inline SortLookup sorts_of(const SemanticNetwork& net) {
  return [&net](std::string_view id) -> std::optional<std::string> {
    auto idx = net.find_node(id);
    if (!idx) return std::nullopt;
    return net.nodes()[*idx].sort;
  };
}

inline WalkSequence elide_inner_nodes(const WalkSequence& walk, InnerNodePolicy policy, const SemanticNetwork& net) {
  return elide_inner_nodes(walk, policy, sorts_of(net));
}

/// Per-network seed: independent of the other networks and of thread scheduling.
inline std::uint64_t network_seed(std::uint64_t run_seed, const SemanticNetwork& net, std::size_t position) {
  return derive_seed(run_seed, net.sentence_id(), position);
}

/// All walks of one network, post-elision, rendered one per line.
inline std::string network_walk_lines(const SemanticNetwork& net, std::size_t position, const WalkConfig& cfg) {
  RandomSource rng(network_seed(cfg.rng_seed, net, position));
  auto adj = incidence(net);
  auto sort_of = sorts_of(net);
  std::string out;
  for (std::size_t w = 0; w < cfg.walks_per_network; ++w) {
    auto walk = elide_inner_nodes(random_walk(net, cfg, rng, adj), cfg.inner_node_policy, sort_of);
    out += walk.render();
    out += '\n';
  }
  return out;
}

/// Writes walks_per_network lines per network. Output is identical for any thread count:
/// each network has its own random stream and lines are emitted in network order.
inline void generate_corpus(std::span<const SemanticNetwork> nets, const WalkConfig& cfg, std::ostream& os,
                            unsigned threads = 1) {
  cfg.validate();
  if (threads <= 1 || nets.size() < 2) {
    for (std::size_t i = 0; i < nets.size(); ++i) os << network_walk_lines(nets[i], i, cfg);
  } else {
    std::vector<std::string> lines(nets.size());
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < nets.size(); i += threads) lines[i] = network_walk_lines(nets[i], i, cfg);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (auto& l : lines) os << l;
  }
  os.flush();
  if (!os) throw Error("failed to write walk corpus");
}

}  // namespace semcept

#endif  // SEMCEPT_WALKER_HPP
