#ifndef SEMCEPT_WSD_HPP
#define SEMCEPT_WSD_HPP

// Word-concept vectors and centroid-based sense selection.
//
// The word-concept vector of a concept c is the mean of the word-vector centroids of all
// sentences whose network contains c. A word in sentence s gets the candidate sense whose
// word-concept vector is closest (cosine) to the centroid of s.

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "embedding.hpp"
#include "lexicon.hpp"
#include "sn_model.hpp"

namespace semcept {

struct Centroid {
  std::vector<double> vector;
  std::size_t used = 0;    // in-vocabulary tokens
  std::size_t misses = 0;  // out-of-vocabulary tokens

  bool empty() const noexcept { return used == 0; }
};

/// Unweighted mean of the in-vocabulary token vectors; the zero vector if none is known.
inline Centroid sentence_centroid(std::span<const std::string> tokens, const EmbeddingTable& words) {
  Centroid c;
  c.vector.assign(words.dimension(), 0.0);
  for (auto& tok : tokens) {
    auto v = words.find(tok);
    if (!v) {
      ++c.misses;
      continue;
    }
    ++c.used;
    for (std::size_t i = 0; i < v->size(); ++i) c.vector[i] += (*v)[i];
  }
  if (c.used)
    for (auto& x : c.vector) x /= static_cast<double>(c.used);
  return c;
}

inline std::vector<std::string> surfaces(const SemanticNetwork& net) {
  std::vector<std::string> out;
  out.reserve(net.tokens().size());
  for (auto& t : net.tokens()) out.push_back(t.surface);
  return out;
}

class WordConceptTable {
 public:
  struct Entry {
    std::vector<double> vector;
    std::size_t count = 0;  // sentences contributing
  };

  WordConceptTable() = default;
  explicit WordConceptTable(std::size_t dimension) : dim_(dimension) {}

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(const ConceptId& c) const { return entries_.count(c) > 0; }

  const Entry* find(const ConceptId& c) const {
    auto it = entries_.find(c);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const std::map<ConceptId, Entry>& entries() const noexcept { return entries_; }
  std::map<ConceptId, Entry>& entries() noexcept { return entries_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  std::vector<std::string>& warnings() noexcept { return warnings_; }

 private:
  std::size_t dim_ = 0;
  std::map<ConceptId, Entry> entries_;
  std::vector<std::string> warnings_;
};

/// Averages sentence centroids per concept. Sentences with no in-vocabulary token are skipped;
/// concepts seen only in such sentences are dropped with a warning.
inline WordConceptTable build_word_concept_table(std::span<const SemanticNetwork> nets, const EmbeddingTable& words) {
  WordConceptTable table(words.dimension());
  std::set<ConceptId> seen;
  for (auto& net : nets) {
    auto concepts = net.concepts();
    seen.insert(concepts.begin(), concepts.end());
    auto toks = surfaces(net);
    auto centroid = sentence_centroid(toks, words);
    if (centroid.empty()) continue;
    for (auto& c : concepts) {
      auto& e = table.entries()[c];
      if (e.vector.empty()) e.vector.assign(words.dimension(), 0.0);
      for (std::size_t i = 0; i < e.vector.size(); ++i) e.vector[i] += centroid.vector[i];
      ++e.count;
    }
  }
  for (auto& [c, e] : table.entries())
    for (auto& x : e.vector) x /= static_cast<double>(e.count);
  for (auto& c : seen)
    if (!table.contains(c))
      table.warnings().push_back("concept " + c.render() + " occurs only in sentences without known words; excluded");
  return table;
}

/// Picks the sense of `word` whose word-concept vector is most similar to `context`.
/// Ties go to the smallest (homograph, polyseme). nullopt when no sense is in the table.
inline std::optional<ConceptId> disambiguate_in_context(std::string_view word, std::span<const double> context,
                                                        const Lexicon& lex, const WordConceptTable& wct) {
  auto candidates = lex.senses_of(lex.lemmatize(word));
  std::sort(candidates.begin(), candidates.end(), [](const ConceptId& a, const ConceptId& b) {
    return std::tie(a.homograph, a.polyseme) < std::tie(b.homograph, b.polyseme);
  });
  std::optional<ConceptId> best;
  double best_score = 0;
  for (auto& c : candidates) {
    auto* e = wct.find(c);
    if (!e) continue;
    double s = cosine(std::span<const double>(e->vector), context);
    if (!best || s > best_score) {
      best = c;
      best_score = s;
    }
  }
  return best;
}

inline std::optional<ConceptId> disambiguate(std::string_view word, std::span<const std::string> sentence,
                                             const Lexicon& lex, const WordConceptTable& wct,
                                             const EmbeddingTable& words) {
  auto centroid = sentence_centroid(sentence, words);
  return disambiguate_in_context(word, centroid.vector, lex, wct);
}

/// Serialized as `#WCT` followed by the embedding text format (concept keys).
/// Sentence counts are not stored; loaded entries carry count 1.
inline void save_word_concept_table(std::ostream& os, const WordConceptTable& wct) {
  os << "#WCT\n" << wct.size() << ' ' << wct.dimension() << '\n';
  for (auto& [c, e] : wct.entries()) {
    os << c.render();
    for (double x : e.vector) {
      os << ' ';
      detail::write_float(os, static_cast<float>(x));
    }
    os << '\n';
  }
  if (!os) throw Error("failed to write word-concept table");
}

inline WordConceptTable load_word_concept_table(std::istream& in) {
  std::string tag;
  if (!std::getline(in, tag) || trim(tag) != "#WCT") throw FormatError("missing #WCT header tag", 1);
  auto table = load_table(in);
  WordConceptTable wct(table.dimension());
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto v = table.input(i);
    wct.entries()[parse_concept_id(table.vocabulary()[i].token)] = {std::vector<double>(v.begin(), v.end()), 1};
  }
  return wct;
}

}  // namespace semcept

#endif  // SEMCEPT_WSD_HPP
