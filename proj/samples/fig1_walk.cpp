// Prints the highlighted example path ("yesterday ... red") and a few random walks over the same network.
//
//   fig1_walk [network.mnsn] [walks] [seed]

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "semcept/walker.hpp"

using namespace semcept;

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : SEMCEPT_SAMPLE_DIR "/fig1.mnsn";
  const std::size_t walks = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 5;
  const std::uint64_t seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 42;

  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path << '\n';
    return 2;
  }
  std::vector<SemanticNetwork> nets;
  try {
    nets = parse_sn_document(in);
  } catch (const FormatError& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return 7;
  }
  if (nets.empty()) return 0;
  const auto& net = nets.front();
  std::cout << net.sentence_id() << ": " << net.nodes().size() << " nodes (" << net.inner_node_count()
            << " inner), " << net.edges().size() << " edges\n";

  if (net.find_node("yesterday.1.1") && net.find_node("red.1.1")) {
    std::vector<std::string> path_ids{"yesterday.1.1", "c1", "c2", "c3", "red.1.1"};
    auto raw = walk_along(net, path_ids);
    std::cout << "\nhighlighted path\n  raw:    " << raw.render()
              << "\n  elided: " << elide_inner_nodes(raw, InnerNodePolicy::Elide, net).render()
              << "\n  sorts:  " << elide_inner_nodes(raw, InnerNodePolicy::ReplaceWithSort, net).render() << '\n';
  }

  WalkConfig cfg;
  cfg.rng_seed = seed;
  RandomSource rng(network_seed(seed, net, 0));
  auto adj = incidence(net);
  std::cout << "\nrandom walks (seed " << seed << ")\n";
  for (std::size_t i = 0; i < walks; ++i) {
    auto raw = random_walk(net, cfg, rng, adj);
    std::cout << "  " << raw.steps() << " steps: " << elide_inner_nodes(raw, InnerNodePolicy::Elide, net).render()
              << '\n';
  }
  return 0;
}
