#ifndef SEMCEPT_SIMCORE_HPP
#define SEMCEPT_SIMCORE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "embedding.hpp"
#include "lexicon.hpp"
#include "text.hpp"
#include "wsd.hpp"

namespace semcept {

struct SimilarityDiagnostics {
  std::size_t oov_a = 0;              // words: tokens of side a missing from the word table
  std::size_t oov_a_capitalized = 0;  // words: same after capitalizing each token
  std::size_t oov_b = 0;
  std::size_t nosense_a = 0;  // concepts: tokens without a resolvable sense
  std::size_t nosense_b = 0;
  std::size_t concept_misses = 0;  // concepts: resolved concept absent from the concept table
  std::size_t concat_misses = 0;   // concat: tokens missing from at least one table
  bool degenerate = false;         // an all-zero centroid forced the estimate to 0
  std::optional<double> plain_branch;        // words: cosine with side a unchanged
  std::optional<double> capitalized_branch;  // words: cosine with side a capitalized
};

struct SimilarityEstimate {
  double value = 0.0;
  std::string method;
  SimilarityDiagnostics diagnostics;
};

using Tokens = std::span<const std::string>;

inline std::vector<std::string> capitalize_each(Tokens tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& t : tokens) out.push_back(capitalize_first(t));
  return out;
}

/// Centroid cosine, taking the max over side a as given and side a with every token
/// capitalized. Side b (the keyword list) is used unchanged.
inline SimilarityEstimate sim_words(Tokens a, Tokens b, const EmbeddingTable& words) {
  SimilarityEstimate est{0.0, "words", {}};
  auto& d = est.diagnostics;
  auto ca = sentence_centroid(a, words);
  auto capitalized = capitalize_each(a);
  auto cc = sentence_centroid(capitalized, words);
  auto cb = sentence_centroid(b, words);
  d.oov_a = ca.misses;
  d.oov_a_capitalized = cc.misses;
  d.oov_b = cb.misses;
  if (cb.empty() || (ca.empty() && cc.empty())) {
    d.degenerate = true;
    return est;
  }
  if (!ca.empty()) d.plain_branch = cosine(ca.vector, cb.vector);
  if (!cc.empty()) d.capitalized_branch = cosine(cc.vector, cb.vector);
  est.value = std::max(d.plain_branch.value_or(-2.0), d.capitalized_branch.value_or(-2.0));
  return est;
}

struct ConceptResources {
  const Lexicon* lexicon = nullptr;
  const WordConceptTable* word_concepts = nullptr;
  const EmbeddingTable* words = nullptr;
  const EmbeddingTable* concepts = nullptr;  // concept embeddings trained on walks
};

namespace detail {

struct ConceptSide {
  std::vector<double> centroid;
  std::size_t used = 0;
  std::size_t nosense = 0;
  std::size_t misses = 0;
};

inline ConceptSide concept_centroid(Tokens text, const ConceptResources& r) {
  ConceptSide side;
  side.centroid.assign(r.concepts->dimension(), 0.0);
  auto context = sentence_centroid(text, *r.words);
  for (auto& tok : text) {
    auto sense = disambiguate_in_context(tok, context.vector, *r.lexicon, *r.word_concepts);
    if (!sense) {
      ++side.nosense;
      continue;
    }
    auto v = r.concepts->find(r.lexicon->noun_surrogate(*sense).render());
    if (!v) {
      ++side.misses;
      continue;
    }
    ++side.used;
    for (std::size_t i = 0; i < v->size(); ++i) side.centroid[i] += (*v)[i];
  }
  if (side.used)
    for (auto& x : side.centroid) x /= static_cast<double>(side.used);
  return side;
}

}  // namespace detail

/// Disambiguates both texts, maps senses through noun_surrogate, and compares the
/// concept-embedding centroids.
inline SimilarityEstimate sim_concepts(Tokens a, Tokens b, const ConceptResources& r) {
  if (!r.lexicon || !r.word_concepts || !r.words || !r.concepts)
    throw std::invalid_argument("sim_concepts needs lexicon, word-concept table, word and concept tables");
  SimilarityEstimate est{0.0, "concepts", {}};
  auto sa = detail::concept_centroid(a, r);
  auto sb = detail::concept_centroid(b, r);
  est.diagnostics.nosense_a = sa.nosense;
  est.diagnostics.nosense_b = sb.nosense;
  est.diagnostics.concept_misses = sa.misses + sb.misses;
  if (!sa.used || !sb.used) {
    est.diagnostics.degenerate = true;
    return est;
  }
  est.value = cosine(sa.centroid, sb.centroid);
  return est;
}

struct CombinationWeights {
  double ce_weight = 0.2;
  double word_weight = 0.8;

  void validate() const {
    if (ce_weight < 0 || word_weight < 0) throw std::invalid_argument("combination weights must be non-negative");
    if (std::abs(ce_weight + word_weight - 1.0) > 1e-9)
      throw std::invalid_argument("combination weights must sum to 1");
  }
};

inline SimilarityEstimate combine(const CombinationWeights& w, const SimilarityEstimate& ce,
                                  const SimilarityEstimate& word) {
  w.validate();
  SimilarityEstimate est{w.ce_weight * ce.value + w.word_weight * word.value, "combined", word.diagnostics};
  est.diagnostics.nosense_a = ce.diagnostics.nosense_a;
  est.diagnostics.nosense_b = ce.diagnostics.nosense_b;
  est.diagnostics.concept_misses = ce.diagnostics.concept_misses;
  est.diagnostics.degenerate = ce.diagnostics.degenerate || word.diagnostics.degenerate;
  return est;
}

inline SimilarityEstimate sim_combined(Tokens a, Tokens b, const CombinationWeights& w, const ConceptResources& r) {
  w.validate();
  return combine(w, sim_concepts(a, b, r), sim_words(a, b, *r.words));
}

/// Cosine of centroids of [word vector | aux vector]; a missing half is zero-filled.
inline SimilarityEstimate sim_concatenated(Tokens a, Tokens b, const EmbeddingTable& words, const EmbeddingTable& aux) {
  SimilarityEstimate est{0.0, "concat", {}};
  const std::size_t dw = words.dimension(), da = aux.dimension();
  auto centroid = [&](Tokens text) {
    std::vector<double> c(dw + da, 0.0);
    for (auto& tok : text) {
      auto w = words.find(tok);
      auto x = aux.find(tok);
      if (!w || !x) ++est.diagnostics.concat_misses;
      if (w)
        for (std::size_t i = 0; i < dw; ++i) c[i] += (*w)[i];
      if (x)
        for (std::size_t i = 0; i < da; ++i) c[dw + i] += (*x)[i];
    }
    if (!text.empty())
      for (auto& v : c) v /= static_cast<double>(text.size());
    return c;
  };
  auto ca = centroid(a);
  auto cb = centroid(b);
  auto r = cosine_flagged(std::span<const double>(ca), std::span<const double>(cb));
  est.value = r.value;
  est.diagnostics.degenerate = r.zero_input;
  return est;
}

/// |A n B| / |A u B| over case-folded token sets; 0 when both are empty.
inline SimilarityEstimate sim_jaccard(Tokens a, Tokens b) {
  std::set<std::string> sa, sb;
  for (auto& t : a) sa.insert(fold_case(t));
  for (auto& t : b) sb.insert(fold_case(t));
  std::size_t inter = 0;
  for (auto& t : sa) inter += sb.count(t);
  std::size_t uni = sa.size() + sb.size() - inter;
  return {uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0, "jaccard", {}};
}

struct PermutationScore {
  std::vector<std::string> order;
  double score = 0.0;
};

/// Beam search over keyword orderings. Partial orderings are extended by one unused keyword
/// per round and the beam_width best (by scorer on the prefix) survive. Ties keep the
/// lexicographically smallest index sequence.
/// `scorer(std::span<const std::string> ordered_prefix, Tokens answer) -> double`.
template <class Scorer>
PermutationScore beam_permutation_score(Tokens keywords, Tokens answer, Scorer&& scorer, std::size_t beam_width) {
  if (beam_width == 0) throw std::invalid_argument("beam width must be >= 1");
  const std::size_t n = keywords.size();
  struct Partial {
    std::vector<std::size_t> indices;
    std::vector<std::string> words;
    double score = 0.0;
  };
  if (n == 0) {
    std::vector<std::string> empty;
    return {{}, static_cast<double>(scorer(std::span<const std::string>(empty), answer))};
  }
  std::vector<Partial> beam{Partial{}};
  for (std::size_t round = 0; round < n; ++round) {
    std::vector<Partial> next;
    for (auto& p : beam) {
      std::vector<bool> used(n, false);
      for (auto i : p.indices) used[i] = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (used[k]) continue;
        Partial q = p;
        q.indices.push_back(k);
        q.words.push_back(keywords[k]);
        q.score = static_cast<double>(scorer(std::span<const std::string>(q.words), answer));
        next.push_back(std::move(q));
      }
    }
    std::stable_sort(next.begin(), next.end(), [](const Partial& x, const Partial& y) {
      if (x.score != y.score) return x.score > y.score;
      return x.indices < y.indices;
    });
    if (next.size() > beam_width) next.resize(beam_width);
    beam = std::move(next);
  }
  return {std::move(beam.front().words), beam.front().score};
}

/// Estimator lookup by name, for the command line and the assignment driver.
struct SimilarityResources {
  ConceptResources concept_side;
  const EmbeddingTable* aux = nullptr;
  CombinationWeights weights;
};

class UnknownEstimator : public Error {
 public:
  using Error::Error;
};

inline const std::vector<std::string>& estimator_names() {
  static const std::vector<std::string> names{"words", "concepts", "combined", "concat", "jaccard"};
  return names;
}

using Estimator = std::function<SimilarityEstimate(Tokens, Tokens)>;

/// Builds the named estimator. Throws UnknownEstimator for bad names and
/// std::invalid_argument when a required table is missing.
inline Estimator make_estimator(const std::string& name, const SimilarityResources& res) {
  auto need = [&](const void* p, const char* what) {
    if (!p) throw std::invalid_argument("estimator '" + name + "' needs " + what);
  };
  const auto& cs = res.concept_side;
  if (name == "words") {
    need(cs.words, "a word table");
    return [w = cs.words](Tokens a, Tokens b) { return sim_words(a, b, *w); };
  }
  if (name == "concepts" || name == "combined") {
    need(cs.words, "a word table");
    need(cs.concepts, "a concept table");
    need(cs.lexicon, "a lexicon");
    need(cs.word_concepts, "a word-concept table");
    if (name == "concepts") return [cs](Tokens a, Tokens b) { return sim_concepts(a, b, cs); };
    res.weights.validate();
    return [cs, w = res.weights](Tokens a, Tokens b) { return sim_combined(a, b, w, cs); };
  }
  if (name == "concat") {
    need(cs.words, "a word table");
    need(res.aux, "an auxiliary table");
    return [w = cs.words, x = res.aux](Tokens a, Tokens b) { return sim_concatenated(a, b, *w, *x); };
  }
  if (name == "jaccard") return [](Tokens a, Tokens b) { return sim_jaccard(a, b); };
  std::string valid;
  for (auto& n : estimator_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw UnknownEstimator("unknown estimator '" + name + "' (valid: " + valid + ")");
}

}  // namespace semcept

#endif  // SEMCEPT_SIMCORE_HPP
