#ifndef SEMCEPT_LEXICON_HPP
#define SEMCEPT_LEXICON_HPP

// Sense inventory and CHEA/CHPA links.
//
//   L <lemma> <concept> <pos> <sort-or-->     sense entry; pos is N, V, A or O
//   X <CHEA|CHPA> <source-concept> <target-concept>
//   F <form> <lemma>                          inflected form -> lemma
//
// Lines starting with // are comments.

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "sn_model.hpp"
#include "text.hpp"

namespace semcept {

enum class PartOfSpeech { Noun, Verb, Adjective, Other };

inline PartOfSpeech parse_part_of_speech(std::string_view s) {
  auto f = fold_case(s);
  if (f == "n" || f == "noun") return PartOfSpeech::Noun;
  if (f == "v" || f == "verb") return PartOfSpeech::Verb;
  if (f == "a" || f == "adj" || f == "adjective") return PartOfSpeech::Adjective;
  if (f == "o" || f == "other") return PartOfSpeech::Other;
  throw FormatError("unknown part of speech '" + std::string(s) + "'");
}

struct Sense {
  ConceptId id;
  PartOfSpeech pos = PartOfSpeech::Other;
  std::optional<std::string> sort;
};

struct LexiconEntry {
  std::string lemma;
  std::vector<Sense> senses;
};

enum class LexicalRelation { Chea, Chpa };

struct LexicalLink {
  LexicalRelation relation;
  ConceptId source;
  ConceptId target;
};

class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon parse(std::istream& in) {
    Lexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      try {
        auto t = trim(line);
        if (t.empty() || starts_with(t, "//")) continue;
        auto f = split_whitespace(t);
        if (f[0] == "L") {
          if (f.size() != 5) throw FormatError("expected 'L <lemma> <concept> <pos> <sort-or-->'");
          lex.add_sense(f[1], Sense{parse_concept_id(f[2]), parse_part_of_speech(f[3]),
                                    f[4] == "-" ? std::nullopt : std::optional<std::string>(f[4])});
        } else if (f[0] == "X") {
          if (f.size() != 4) throw FormatError("expected 'X <CHEA|CHPA> <source> <target>'");
          LexicalRelation rel;
          if (f[1] == "CHEA" || f[1] == "chea") rel = LexicalRelation::Chea;
          else if (f[1] == "CHPA" || f[1] == "chpa") rel = LexicalRelation::Chpa;
          else throw FormatError("unsupported lexical relation '" + f[1] + "'");
          lex.add_link({rel, parse_concept_id(f[2]), parse_concept_id(f[3])});
        } else if (f[0] == "F") {
          if (f.size() != 3) throw FormatError("expected 'F <form> <lemma>'");
          lex.add_form(f[1], f[2]);
        } else {
          throw FormatError("unknown line kind '" + f[0] + "'");
        }
      } catch (const FormatError& e) {
        if (e.line() != 0) throw;
        throw FormatError(e.what(), lineno);
      }
    }
    lex.check_links();
    return lex;
  }

  /// Adds `form lemma` pairs from a two-column lemma map.
  void load_lemma_map(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto t = trim(line);
      if (t.empty() || starts_with(t, "//")) continue;
      auto f = split_whitespace(t);
      if (f.size() != 2) throw FormatError("expected '<form> <lemma>'", lineno);
      add_form(f[0], f[1]);
    }
  }

  void add_sense(std::string_view lemma, Sense sense) {
    auto key = fold_case(lemma);
    if (sense.id.lemma != key)
      throw FormatError("concept " + sense.id.render() + " does not belong to lemma '" + std::string(lemma) + "'");
    auto& entry = entries_[key];
    entry.lemma = key;
    for (auto& s : entry.senses)
      if (s.id == sense.id) throw FormatError("duplicate sense " + sense.id.render());
    pos_[sense.id] = sense.pos;
    entry.senses.push_back(std::move(sense));
  }

  void add_link(LexicalLink link) {
    auto& targets = links_[link.source];
    if (!targets.empty())
      warnings_.push_back("multiple CHEA/CHPA links from " + link.source.render() + "; using " +
                          targets.front().target.render());
    targets.push_back(std::move(link));
  }

  void add_form(std::string_view form, std::string_view lemma) { forms_[fold_case(form)] = fold_case(lemma); }

  /// Case-insensitive sense lookup; empty if the lemma is unknown.
  std::vector<ConceptId> senses_of(std::string_view lemma) const {
    std::vector<ConceptId> out;
    auto it = entries_.find(fold_case(lemma));
    if (it == entries_.end()) return out;
    for (auto& s : it->second.senses) out.push_back(s.id);
    return out;
  }

  const LexiconEntry* entry(std::string_view lemma) const {
    auto it = entries_.find(fold_case(lemma));
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Case-folded surface form if it is a known lemma, else the lemma map entry, else the folded form.
  std::string lemmatize(std::string_view word) const {
    auto folded = fold_case(word);
    if (entries_.count(folded)) return folded;
    auto it = forms_.find(folded);
    return it == forms_.end() ? folded : it->second;
  }

  /// Target of the first CHEA/CHPA link from c, or c itself. Single step only.
  ConceptId noun_surrogate(const ConceptId& c) const {
    auto it = links_.find(c);
    if (it == links_.end() || it->second.empty()) return c;
    return it->second.front().target;
  }

  std::optional<PartOfSpeech> part_of_speech(const ConceptId& c) const {
    auto it = pos_.find(c);
    if (it == pos_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  // CHEA sources are verbs, CHPA sources adjectives, targets nouns; checked where the
  // lexicon declares the part of speech.
  void check_links() const {
    for (auto& [source, links] : links_)
      for (auto& l : links) {
        auto want = l.relation == LexicalRelation::Chea ? PartOfSpeech::Verb : PartOfSpeech::Adjective;
        auto name = l.relation == LexicalRelation::Chea ? "CHEA" : "CHPA";
        if (auto p = part_of_speech(l.source); p && *p != want)
          throw FormatError(std::string(name) + " source " + l.source.render() + " has the wrong part of speech");
        if (auto p = part_of_speech(l.target); p && *p != PartOfSpeech::Noun)
          throw FormatError(std::string(name) + " target " + l.target.render() + " is not a noun");
      }
  }

  std::map<std::string, LexiconEntry> entries_;
  std::map<ConceptId, std::vector<LexicalLink>> links_;
  std::map<ConceptId, PartOfSpeech> pos_;
  std::map<std::string, std::string> forms_;
  std::vector<std::string> warnings_;
};

}  // namespace semcept

#endif  // SEMCEPT_LEXICON_HPP
