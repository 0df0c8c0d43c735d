#ifndef SEMCEPT_SEGMENT_HPP
#define SEMCEPT_SEGMENT_HPP

// Target-group (milieu) assignment and its evaluation against annotators.

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "text.hpp"

namespace semcept {

inline constexpr std::string_view kDefaultSpecialGroups = "special_groups";

struct MilieuProfile {
  std::string name;
  std::vector<std::string> keywords;
};

/// Keyword milieus plus the name of the fallback milieu, which has no keywords.
struct ProfileSet {
  std::vector<MilieuProfile> milieus;
  std::string special_name{kDefaultSpecialGroups};
};

/// `M <name>` starts a milieu, `K <keyword> ...` lines add keywords to it. A milieu
/// without keywords is the fallback milieu (at most one).
inline ProfileSet parse_profiles(std::istream& in) {
  std::vector<MilieuProfile> all;
  std::set<std::string> names;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || starts_with(t, "//")) continue;
    if (starts_with(t, "M ") || t == "M") {
      auto name = std::string(trim(t.substr(1)));
      if (name.empty()) throw FormatError("milieu without a name", lineno);
      if (!names.insert(name).second) throw FormatError("duplicate milieu '" + name + "'", lineno);
      all.push_back({name, {}});
    } else if (starts_with(t, "K ")) {
      if (all.empty()) throw FormatError("keyword line before any milieu", lineno);
      auto kw = split_whitespace(t.substr(1));
      all.back().keywords.insert(all.back().keywords.end(), kw.begin(), kw.end());
    } else {
      throw FormatError("expected 'M <name>' or 'K <keyword> ...'", lineno);
    }
  }
  ProfileSet set;
  bool have_special = false;
  for (auto& m : all) {
    if (!m.keywords.empty()) {
      set.milieus.push_back(std::move(m));
      continue;
    }
    if (have_special) throw FormatError("more than one milieu without keywords ('" + m.name + "')");
    have_special = true;
    set.special_name = m.name;
  }
  if (set.milieus.empty()) throw FormatError("no milieu with keywords");
  if (!have_special && names.count(set.special_name))
    throw FormatError("fallback milieu name '" + set.special_name + "' is already used");
  return set;
}

struct ContestAnswer {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
};

/// `<answer_id> TAB <text>` per line.
inline std::vector<ContestAnswer> parse_answers(std::istream& in) {
  std::vector<ContestAnswer> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError("expected '<answer_id> TAB <text>'", lineno);
    ContestAnswer a;
    a.id = std::string(trim(std::string_view(line).substr(0, tab)));
    a.text = std::string(trim(std::string_view(line).substr(tab + 1)));
    if (a.id.empty()) throw FormatError("empty answer id", lineno);
    if (!ids.insert(a.id).second) throw FormatError("duplicate answer id '" + a.id + "'", lineno);
    a.tokens = tokenize(a.text);
    out.push_back(std::move(a));
  }
  return out;
}

/// Per-answer labels by annotator.
struct GoldStandard {
  std::vector<std::string> annotators;  // first-appearance order
  std::map<std::string, std::map<std::string, std::string>> labels;  // answer -> annotator -> label

  std::vector<std::string> votes(const std::string& answer_id) const {
    std::vector<std::string> out;
    auto it = labels.find(answer_id);
    if (it == labels.end()) return out;
    for (auto& [annotator, label] : it->second) out.push_back(label);
    return out;
  }

  /// Labels of one annotator aligned to `answer_ids`; nullopt where not annotated.
  std::vector<std::optional<std::string>> column(const std::string& annotator,
                                                 std::span<const std::string> answer_ids) const {
    std::vector<std::optional<std::string>> out;
    for (auto& id : answer_ids) {
      std::optional<std::string> v;
      if (auto it = labels.find(id); it != labels.end())
        if (auto jt = it->second.find(annotator); jt != it->second.end()) v = jt->second;
      out.push_back(std::move(v));
    }
    return out;
  }
};

/// `<answer_id> TAB <annotator> TAB <label>` per line.
inline GoldStandard parse_gold(std::istream& in) {
  GoldStandard g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string part;
    while (std::getline(ss, part, '\t')) f.emplace_back(trim(part));
    if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty())
      throw FormatError("expected '<answer_id> TAB <annotator> TAB <label>'", lineno);
    if (std::find(g.annotators.begin(), g.annotators.end(), f[1]) == g.annotators.end()) g.annotators.push_back(f[1]);
    auto& slot = g.labels[f[0]][f[1]];
    if (!slot.empty() && slot != f[2])
      throw FormatError("conflicting labels for answer '" + f[0] + "' by '" + f[1] + "'", lineno);
    slot = f[2];
  }
  return g;
}

struct Assignment {
  std::string answer_id;
  std::string best_milieu;
  double best_score = 0.0;
  std::string label;  // final label after the fallback rule
  bool failed = false;
  std::string diagnostic;
};

struct AssignmentRun {
  std::string estimator;
  double quantile = 0.10;
  double threshold = -std::numeric_limits<double>::infinity();
  std::vector<Assignment> assignments;

  std::size_t relabeled_count(const std::string& special) const {
    return static_cast<std::size_t>(std::count_if(assignments.begin(), assignments.end(), [&](const Assignment& a) {
      return !a.failed && a.label == special;
    }));
  }
};

/// Lower empirical quantile: the ceil(q*N)-th smallest value; -inf when ceil(q*N) == 0.
inline double lower_quantile(std::vector<double> values, double q) {
  if (q < 0 || q > 1) throw std::invalid_argument("quantile must lie in [0, 1]");
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  // the epsilon keeps q*N products such as 0.1*30 = 3.0000000000000004 from rounding up
  auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size()) - 1e-9));
  if (k == 0) return -std::numeric_limits<double>::infinity();
  k = std::min(k, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
  return values[k - 1];
}

using ScoreFunction = std::function<double(std::span<const std::string> answer, std::span<const std::string> keywords)>;

/// Assigns each answer to its highest-scoring milieu (first declared wins ties); answers whose
/// best score is strictly below the lower q-quantile of all best scores get the fallback milieu.
inline AssignmentRun assign(std::span<const ContestAnswer> answers, const ProfileSet& profiles,
                            const ScoreFunction& score, double quantile_q = 0.10, std::string estimator_name = {}) {
  if (profiles.milieus.empty()) throw std::invalid_argument("assign needs at least one keyword milieu");
  if (answers.empty()) throw std::invalid_argument("assign needs at least one answer");
  AssignmentRun run;
  run.estimator = std::move(estimator_name);
  run.quantile = quantile_q;
  std::vector<double> best_scores;
  for (auto& ans : answers) {
    Assignment a;
    a.answer_id = ans.id;
    try {
      bool have = false;
      for (auto& m : profiles.milieus) {
        double s = score(ans.tokens, m.keywords);
        if (!std::isfinite(s)) throw Error("non-finite score for milieu '" + m.name + "'");
        if (!have || s > a.best_score) {
          a.best_score = s;
          a.best_milieu = m.name;
          have = true;
        }
      }
      best_scores.push_back(a.best_score);
    } catch (const std::exception& e) {
      a.failed = true;
      a.diagnostic = e.what();
      a.best_milieu.clear();
      a.best_score = 0.0;
    }
    run.assignments.push_back(std::move(a));
  }
  run.threshold = lower_quantile(best_scores, quantile_q);
  for (auto& a : run.assignments)
    a.label = (a.failed || a.best_score < run.threshold) ? profiles.special_name : a.best_milieu;
  return run;
}

/// Label with the strictly highest vote count; nullopt on ties or no votes.
inline std::optional<std::string> majority_label(std::span<const std::string> votes) {
  std::map<std::string, std::size_t> count;
  for (auto& v : votes) ++count[v];
  std::optional<std::string> best;
  std::size_t best_n = 0;
  bool tie = false;
  for (auto& [label, n] : count) {
    if (n > best_n) {
      best = label;
      best_n = n;
      tie = false;
    } else if (n == best_n) {
      tie = true;
    }
  }
  if (tie) return std::nullopt;
  return best;
}

struct AccuracyReport {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t evaluated = 0;
  std::size_t ties_excluded = 0;  // majority vote undecided
  std::size_t missing_gold = 0;   // no annotation at all
};

/// Agreement of the final labels with the annotators' majority vote.
inline AccuracyReport accuracy(const AssignmentRun& run, const GoldStandard& gold) {
  AccuracyReport r;
  for (auto& a : run.assignments) {
    auto votes = gold.votes(a.answer_id);
    if (votes.empty()) {
      ++r.missing_gold;
      continue;
    }
    auto maj = majority_label(votes);
    if (!maj) {
      ++r.ties_excluded;
      continue;
    }
    ++r.evaluated;
    r.correct += (*maj == a.label);
  }
  r.accuracy = r.evaluated ? static_cast<double>(r.correct) / static_cast<double>(r.evaluated) : 0.0;
  return r;
}

struct Kappa {
  double value = 0.0;
  std::size_t items = 0;        // paired, non-missing items
  double observed = 0.0;        // p_o
  double expected = 0.0;        // p_e
  bool degenerate = false;      // p_e == 1
};

using LabelColumn = std::vector<std::optional<std::string>>;

/// Cohen's kappa over items labeled by both raters; nullopt if there are none.
inline std::optional<Kappa> cohens_kappa(std::span<const std::optional<std::string>> a,
                                         std::span<const std::optional<std::string>> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cohens_kappa: label lists differ in length");
  std::map<std::string, std::size_t> ma, mb;
  std::size_t n = 0, agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i] || !b[i]) continue;
    ++n;
    agree += (*a[i] == *b[i]);
    ++ma[*a[i]];
    ++mb[*b[i]];
  }
  if (n == 0) return std::nullopt;
  Kappa k;
  k.items = n;
  const double dn = static_cast<double>(n);
  k.observed = static_cast<double>(agree) / dn;
  for (auto& [label, ca] : ma)
    if (auto it = mb.find(label); it != mb.end())
      k.expected += (static_cast<double>(ca) / dn) * (static_cast<double>(it->second) / dn);
  if (k.expected >= 1.0) {
    k.degenerate = true;
    k.value = k.observed == 1.0 ? 1.0 : 0.0;
  } else {
    k.value = (k.observed - k.expected) / (1.0 - k.expected);
  }
  return k;
}

inline std::optional<Kappa> cohens_kappa(std::span<const std::string> a, std::span<const std::string> b) {
  LabelColumn x(a.begin(), a.end()), y(b.begin(), b.end());
  return cohens_kappa(std::span<const std::optional<std::string>>(x), std::span<const std::optional<std::string>>(y));
}

struct AnnotatorAgreement {
  std::string name;
  std::optional<double> mean_kappa;  // nullopt: no overlap with any other annotator
  std::size_t partners = 0;
};

struct AgreementReport {
  std::vector<AnnotatorAgreement> annotators;
  std::optional<double> min_mean_kappa;
  std::optional<double> max_mean_kappa;
  std::optional<double> run_mean_kappa;  // assignment vs. each annotator, averaged
  std::vector<std::string> diagnostics;
};

/// For each annotator, mean pairwise kappa against the others it overlaps with; min and max
/// of these means; and the run's mean kappa against all annotators. Only items in
/// [begin, end) are considered.
inline AgreementReport agreement_report(std::span<const std::pair<std::string, LabelColumn>> annotators,
                                        const LabelColumn* run_labels = nullptr, std::size_t begin = 0,
                                        std::size_t end = std::numeric_limits<std::size_t>::max()) {
  AgreementReport rep;
  auto slice = [&](const LabelColumn& c) {
    auto e = std::min(end, c.size());
    auto b = std::min(begin, e);
    return std::span<const std::optional<std::string>>(c.data() + b, e - b);
  };
  for (std::size_t i = 0; i < annotators.size(); ++i) {
    AnnotatorAgreement ag{annotators[i].first, std::nullopt, 0};
    double sum = 0;
    for (std::size_t j = 0; j < annotators.size(); ++j) {
      if (i == j) continue;
      if (auto k = cohens_kappa(slice(annotators[i].second), slice(annotators[j].second))) {
        sum += k->value;
        ++ag.partners;
        if (k->degenerate)
          rep.diagnostics.push_back("kappa(" + annotators[i].first + ", " + annotators[j].first +
                                    ") has chance agreement 1");
      }
    }
    if (ag.partners) {
      ag.mean_kappa = sum / static_cast<double>(ag.partners);
      rep.min_mean_kappa = std::min(rep.min_mean_kappa.value_or(*ag.mean_kappa), *ag.mean_kappa);
      rep.max_mean_kappa = std::max(rep.max_mean_kappa.value_or(*ag.mean_kappa), *ag.mean_kappa);
    } else {
      rep.diagnostics.push_back("annotator '" + ag.name + "' shares no items with any other annotator; excluded");
    }
    rep.annotators.push_back(std::move(ag));
  }
  if (run_labels) {
    double sum = 0;
    std::size_t n = 0;
    for (auto& [name, col] : annotators)
      if (auto k = cohens_kappa(slice(*run_labels), slice(col))) {
        sum += k->value;
        ++n;
      }
    if (n) rep.run_mean_kappa = sum / static_cast<double>(n);
  }
  return rep;
}

/// TSV: a `# estimator=<name> quantile=<q> threshold=<t>` comment, a header row, then
/// answer_id, label, best_milieu, best_score, status.
inline void write_assignment(std::ostream& os, const AssignmentRun& run) {
  os << "# estimator=" << run.estimator << " quantile=" << std::setprecision(17) << run.quantile
     << " threshold=" << run.threshold << '\n';
  os << "answer_id\tlabel\tbest_milieu\tbest_score\tstatus\n";
  for (auto& a : run.assignments)
    os << a.answer_id << '\t' << a.label << '\t' << (a.best_milieu.empty() ? "-" : a.best_milieu) << '\t'
       << std::setprecision(17) << a.best_score << '\t' << (a.failed ? "failed: " + a.diagnostic : "ok") << '\n';
  if (!os) throw Error("failed to write assignment");
}

inline AssignmentRun read_assignment(std::istream& in) {
  AssignmentRun run;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (starts_with(line, "#")) {
      for (auto& kv : split_whitespace(line.substr(1))) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
        try {
          if (key == "estimator") run.estimator = val;
          else if (key == "quantile") run.quantile = std::stod(val);
          else if (key == "threshold") run.threshold = std::stod(val);
        } catch (const std::exception&) {
          throw FormatError("bad header value '" + kv + "'", lineno);
        }
      }
      continue;
    }
    if (starts_with(line, "answer_id\t")) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string part;
    while (std::getline(ss, part, '\t')) f.push_back(part);
    if (f.size() < 4) throw FormatError("expected at least 4 tab-separated fields", lineno);
    Assignment a;
    a.answer_id = f[0];
    a.label = f[1];
    a.best_milieu = f[2] == "-" ? "" : f[2];
    try {
      a.best_score = std::stod(f[3]);
    } catch (const std::exception&) {
      throw FormatError("bad score '" + f[3] + "'", lineno);
    }
    if (f.size() > 4 && starts_with(f[4], "failed")) {
      a.failed = true;
      a.diagnostic = f[4];
    }
    run.assignments.push_back(std::move(a));
  }
  return run;
}

}  // namespace semcept

#endif  // SEMCEPT_SEGMENT_HPP
