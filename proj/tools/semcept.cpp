// semcept: command-line driver for the walk -> train -> wct -> classify -> evaluate pipeline.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "semcept/semcept.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace semcept;

namespace {

enum ExitCode : int {
  kOk = 0,
  kGeneral = 1,
  kMissingInput = 2,
  kMissingSort = 3,
  kEmptyVocabulary = 4,
  kUnknownEstimator = 5,
  kBadWeights = 6,
  kFormat = 7,
};

struct Failure : std::runtime_error {
  Failure(int c, const std::string& what) : std::runtime_error(what), code(c) {}
  int code;
};

std::ifstream open_input(const std::string& path) {
  if (!fs::is_regular_file(path)) throw Failure(kMissingInput, "input file not found: " + path);
  std::ifstream in(path);
  if (!in) throw Failure(kGeneral, "cannot read " + path);
  return in;
}

// Runs a loader and prefixes format errors with the file name.
template <class F>
auto load(const std::string& path, F&& f) {
  auto in = open_input(path);
  try {
    return f(in);
  } catch (const FormatError& e) {
    throw Failure(kFormat, path + ": " + e.what());
  }
}

// Writes to <path>.partial and renames on commit.
class OutputFile {
 public:
  explicit OutputFile(std::string path) : path_(std::move(path)), partial_(path_ + ".partial") {
    if (auto dir = fs::path(path_).parent_path(); !dir.empty()) fs::create_directories(dir);
    out_.open(partial_, std::ios::binary);
    if (!out_) throw Failure(kGeneral, "cannot write " + partial_);
  }
  OutputFile(const OutputFile&) = delete;
  OutputFile& operator=(const OutputFile&) = delete;
  ~OutputFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      fs::remove(partial_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.close();
    if (!out_) throw Failure(kGeneral, "failed writing " + partial_);
    fs::rename(partial_, path_);
    committed_ = true;
  }

 private:
  std::string path_, partial_;
  std::ofstream out_;
  bool committed_ = false;
};

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string config;
};

struct RunInfo {
  std::vector<std::string> args;  // effective arguments, config file expanded
  const CLI::App* command = nullptr;
  const Globals* globals = nullptr;
};

std::string option_name(const CLI::Option* opt) {
  if (!opt->get_lnames().empty()) return opt->get_lnames().front();
  return opt->get_name();
}

void write_manifest(const RunInfo& run, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, bool deterministic) {
  if (outputs.empty()) return;
  json options = json::object();
  for (auto* opt : run.command->get_options()) {
    auto name = option_name(opt);
    if (name == "help") continue;
    options[name] = opt->count() ? opt->results().back() : opt->get_default_str();
  }
  json m;
  m["tool"] = "semcept";
  m["version"] = kVersion;
  m["subcommand"] = run.command->get_name();
  m["args"] = run.args;
  m["options"] = options;
  m["seed"] = run.globals->seed;
  m["threads"] = run.globals->threads;
  m["deterministic"] = deterministic;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  OutputFile f(outputs.front() + ".manifest.json");
  f.stream() << m.dump(2) << '\n';
  f.commit();
}

void warn_all(const std::vector<std::string>& warnings) {
  for (auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

// ---- walk

struct WalkArgs {
  std::string input, output, policy = "elide", symmetric, sorts;
  WalkConfig cfg;
};

void add_walk(CLI::App& app, WalkArgs& a) {
  auto* c = app.add_subcommand("walk", "Generate random-walk sentences from semantic networks");
  c->add_option("--input,-i", a.input, "Semantic network file (MNSN)")->required();
  c->add_option("--output,-o", a.output, "Walk corpus to write")->required();
  c->add_option("--stop-threshold", a.cfg.stop_threshold, "Per-step stop probability")->capture_default_str();
  c->add_option("--max-steps", a.cfg.max_steps, "Hard cap on steps per walk")->capture_default_str();
  c->add_option("--walks-per-network", a.cfg.walks_per_network, "Walks per sentence")->capture_default_str();
  c->add_option("--inner-node-policy", a.policy, "elide or sort")
      ->check(CLI::IsMember({"elide", "sort"}))
      ->capture_default_str();
  c->add_option("--symmetric", a.symmetric, "Comma-separated symmetric relation names");
  c->add_option("--sorts", a.sorts, "Sort taxonomy used to validate node sorts");
}

int run_walk(const WalkArgs& a, const RunInfo& run) {
  WalkConfig cfg = a.cfg;
  cfg.rng_seed = run.globals->seed;
  cfg.inner_node_policy = a.policy == "sort" ? InnerNodePolicy::ReplaceWithSort : InnerNodePolicy::Elide;
  try {
    cfg.validate();
  } catch (const WalkError& e) {
    throw Failure(kGeneral, e.what());
  }
  auto sym_list = split_list(a.symmetric);
  SymmetricRelations sym(sym_list.begin(), sym_list.end());
  auto nets = load(a.input, [&](std::istream& in) { return parse_sn_document(in, sym); });
  std::vector<std::string> inputs{a.input};
  if (!a.sorts.empty()) {
    auto tax = load(a.sorts, [](std::istream& in) { return SortTaxonomy::parse(in); });
    try {
      check_sorts(nets, tax);
    } catch (const FormatError& e) {
      throw Failure(kFormat, a.input + ": " + e.what());
    }
    inputs.push_back(a.sorts);
  }
  if (cfg.inner_node_policy == InnerNodePolicy::ReplaceWithSort)
    for (auto& net : nets)
      for (auto& n : net.nodes())
        if (n.is_inner() && !n.sort)
          throw Failure(kMissingSort, "inner node '" + n.id + "' in sentence '" + net.sentence_id() +
                                          "' has no sort; required by --inner-node-policy sort");
  OutputFile out(a.output);
  generate_corpus(nets, cfg, out.stream(), run.globals->threads);
  out.commit();
  write_manifest(run, inputs, {a.output}, true);
  std::cerr << "walk: " << nets.size() << " networks, " << nets.size() * cfg.walks_per_network << " walks -> "
            << a.output << '\n';
  return kOk;
}

// ---- train

struct TrainArgs {
  std::string input, output, context_output;
  TrainConfig cfg;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* c = app.add_subcommand("train", "Train skip-gram embeddings with negative sampling");
  c->add_option("--input,-i", a.input, "Corpus, one whitespace-tokenized sentence per line")->required();
  c->add_option("--output,-o", a.output, "Embedding table to write")->required();
  c->add_option("--context-output", a.context_output, "Also write the output (context) vectors");
  c->add_option("--dimension", a.cfg.dimension)->capture_default_str();
  c->add_option("--window", a.cfg.window, "Maximal context radius")->capture_default_str();
  c->add_option("--negatives", a.cfg.negatives)->capture_default_str();
  c->add_option("--epochs", a.cfg.epochs)->capture_default_str();
  c->add_option("--learning-rate", a.cfg.initial_learning_rate)->capture_default_str();
  c->add_option("--min-learning-rate", a.cfg.min_learning_rate)->capture_default_str();
  c->add_option("--subsample", a.cfg.subsample_t, "Subsampling threshold, 0 disables")->capture_default_str();
  c->add_option("--unigram-power", a.cfg.unigram_power)->capture_default_str();
  c->add_option("--min-count", a.cfg.min_count)->capture_default_str();
}

int run_train(const TrainArgs& a, const RunInfo& run) {
  TrainConfig cfg = a.cfg;
  cfg.rng_seed = run.globals->seed;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw Failure(kGeneral, e.what());
  }
  auto lines = load(a.input, [](std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) out.push_back(std::move(line));
    return out;
  });
  TrainOptions opts;
  opts.threads = run.globals->threads;
  TrainStats stats;
  std::optional<EmbeddingTable> table;
  try {
    table.emplace(train(lines, cfg, opts, &stats));
  } catch (const EmptyVocabulary& e) {
    throw Failure(kEmptyVocabulary, a.input + ": " + e.what());
  }
  OutputFile out(a.output);
  save_table(out.stream(), *table);
  std::vector<std::string> outputs{a.output};
  std::optional<OutputFile> ctx;
  if (!a.context_output.empty()) {
    EmbeddingTable contexts(table->vocabulary(), table->dimension(), false);
    contexts.input_data() = table->output_data();
    ctx.emplace(a.context_output);
    save_table(ctx->stream(), contexts);
    outputs.push_back(a.context_output);
  }
  out.commit();
  if (ctx) ctx->commit();
  write_manifest(run, {a.input}, outputs, run.globals->threads == 1);
  std::cerr << "train: " << table->size() << " tokens x " << table->dimension() << ", " << stats.updates
            << " updates";
  if (!stats.epoch_mean_loss.empty()) std::cerr << ", final epoch loss " << stats.epoch_mean_loss.back();
  std::cerr << " -> " << a.output << '\n';
  return kOk;
}

// ---- wct

struct WctArgs {
  std::string networks, words, output, symmetric;
};

void add_wct(CLI::App& app, WctArgs& a) {
  auto* c = app.add_subcommand("wct", "Build the word-concept table from annotated sentences");
  c->add_option("--networks,-n", a.networks, "Semantic network file with T token lines")->required();
  c->add_option("--words,-w", a.words, "Word embedding table")->required();
  c->add_option("--output,-o", a.output, "Word-concept table to write")->required();
  c->add_option("--symmetric", a.symmetric, "Comma-separated symmetric relation names");
}

int run_wct(const WctArgs& a, const RunInfo& run) {
  auto nets = load(a.networks, [](std::istream& in) { return parse_sn_document(in); });
  auto words = load(a.words, [](std::istream& in) { return load_table(in); });
  auto wct = build_word_concept_table(nets, words);
  warn_all(wct.warnings());
  OutputFile out(a.output);
  save_word_concept_table(out.stream(), wct);
  out.commit();
  write_manifest(run, {a.networks, a.words}, {a.output}, true);
  std::cerr << "wct: " << wct.size() << " concepts from " << nets.size() << " sentences -> " << a.output << '\n';
  return kOk;
}

// ---- shared similarity resources

struct SimilarityArgs {
  std::string estimator = "combined";
  std::string words, concepts, aux, lexicon, lemma_map, wct;
  double ce_weight = 0.2, word_weight = 0.8;
  std::size_t beam_width = 0;
};

void add_similarity_options(CLI::App* c, SimilarityArgs& a) {
  std::string names;
  for (auto& n : estimator_names()) names += (names.empty() ? "" : ", ") + n;
  c->add_option("--estimator,-e", a.estimator, "One of: " + names)->capture_default_str();
  c->add_option("--words,-w", a.words, "Word embedding table");
  c->add_option("--concepts,-c", a.concepts, "Concept embedding table");
  c->add_option("--aux", a.aux, "Auxiliary table for the concat estimator");
  c->add_option("--lexicon", a.lexicon, "Lexicon file");
  c->add_option("--lemma-map", a.lemma_map, "Two-column form -> lemma file");
  c->add_option("--wct", a.wct, "Word-concept table");
  c->add_option("--ce-weight", a.ce_weight, "Weight of the concept estimate (combined)")->capture_default_str();
  c->add_option("--w2v-weight", a.word_weight, "Weight of the word estimate (combined)")->capture_default_str();
  c->add_option("--beam-width", a.beam_width, "Search keyword orders with this beam width; 0 keeps the given order")
      ->capture_default_str();
}

class LoadedResources {
 public:
  LoadedResources(const SimilarityArgs& a, std::vector<std::string>& inputs) {
    const auto& names = estimator_names();
    if (std::find(names.begin(), names.end(), a.estimator) == names.end()) {
      try {
        make_estimator(a.estimator, {});
      } catch (const UnknownEstimator& e) {
        throw Failure(kUnknownEstimator, e.what());
      }
    }
    res_.weights = {a.ce_weight, a.word_weight};
    try {
      res_.weights.validate();
    } catch (const std::invalid_argument& e) {
      throw Failure(kBadWeights, std::string(e.what()) + " (got " + std::to_string(a.ce_weight) + " + " +
                                     std::to_string(a.word_weight) + ")");
    }
    auto table = [&](const std::string& path, std::optional<EmbeddingTable>& slot, const EmbeddingTable*& ptr) {
      if (path.empty()) return;
      slot.emplace(load(path, [](std::istream& in) { return load_table(in); }));
      ptr = &*slot;
      inputs.push_back(path);
    };
    table(a.words, words_, res_.concept_side.words);
    table(a.concepts, concepts_, res_.concept_side.concepts);
    table(a.aux, aux_, res_.aux);
    if (!a.lexicon.empty()) {
      lexicon_.emplace(load(a.lexicon, [](std::istream& in) { return Lexicon::parse(in); }));
      inputs.push_back(a.lexicon);
      if (!a.lemma_map.empty()) {
        load(a.lemma_map, [&](std::istream& in) {
          lexicon_->load_lemma_map(in);
          return 0;
        });
        inputs.push_back(a.lemma_map);
      }
      warn_all(lexicon_->warnings());
      res_.concept_side.lexicon = &*lexicon_;
    }
    if (!a.wct.empty()) {
      wct_.emplace(load(a.wct, [](std::istream& in) { return load_word_concept_table(in); }));
      res_.concept_side.word_concepts = &*wct_;
      inputs.push_back(a.wct);
    }
    try {
      estimator_ = make_estimator(a.estimator, res_);
    } catch (const std::invalid_argument& e) {
      throw Failure(kGeneral, e.what());
    }
    if (a.beam_width > 0) {
      auto base = estimator_;
      std::size_t width = a.beam_width;
      estimator_ = [base, width](Tokens answer, Tokens keywords) {
        auto scorer = [&](std::span<const std::string> prefix, Tokens ans) { return base(ans, prefix).value; };
        auto best = beam_permutation_score(keywords, answer, scorer, width);
        auto est = base(answer, best.order);
        est.method += "+beam";
        return est;
      };
    }
  }
  LoadedResources(const LoadedResources&) = delete;
  LoadedResources& operator=(const LoadedResources&) = delete;

  const Estimator& estimator() const { return estimator_; }

 private:
  std::optional<EmbeddingTable> words_, concepts_, aux_;
  std::optional<Lexicon> lexicon_;
  std::optional<WordConceptTable> wct_;
  SimilarityResources res_;
  Estimator estimator_;
};

// ---- classify

struct ClassifyArgs {
  std::string answers, profiles, output;
  double quantile = 0.10;
  SimilarityArgs sim;
};

void add_classify(CLI::App& app, ClassifyArgs& a) {
  auto* c = app.add_subcommand("classify", "Assign contest answers to milieus");
  c->add_option("--answers,-a", a.answers, "Answers, '<id> TAB <text>' per line")->required();
  c->add_option("--profiles,-p", a.profiles, "Milieu keyword profiles")->required();
  c->add_option("--output,-o", a.output, "Assignment TSV to write")->required();
  c->add_option("--quantile", a.quantile, "Lower quantile of best scores that triggers the fallback")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_similarity_options(c, a.sim);
}

int run_classify(const ClassifyArgs& a, const RunInfo& run) {
  std::vector<std::string> inputs;
  LoadedResources res(a.sim, inputs);
  auto answers = load(a.answers, [](std::istream& in) { return parse_answers(in); });
  auto profiles = load(a.profiles, [](std::istream& in) { return parse_profiles(in); });
  inputs.insert(inputs.begin(), {a.answers, a.profiles});
  if (answers.empty()) throw Failure(kFormat, a.answers + ": no answers");
  auto score = [&](std::span<const std::string> answer, std::span<const std::string> keywords) {
    return res.estimator()(answer, keywords).value;
  };
  auto result = assign(answers, profiles, score, a.quantile, a.sim.estimator);
  OutputFile out(a.output);
  write_assignment(out.stream(), result);
  out.commit();
  write_manifest(run, inputs, {a.output}, true);
  std::size_t failed = std::count_if(result.assignments.begin(), result.assignments.end(),
                                     [](const Assignment& x) { return x.failed; });
  std::cerr << "classify: " << answers.size() << " answers, threshold " << result.threshold << ", "
            << result.relabeled_count(profiles.special_name) << " relabeled " << profiles.special_name << ", "
            << failed << " failed -> " << a.output << '\n';
  return kOk;
}

// ---- evaluate

struct EvaluateArgs {
  std::string assignment, gold, output, tsv;
  std::size_t split = 0;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* c = app.add_subcommand("evaluate", "Compare an assignment with annotator labels");
  c->add_option("--assignment,-a", a.assignment, "Assignment TSV from classify")->required();
  c->add_option("--gold,-g", a.gold, "'<id> TAB <annotator> TAB <label>' per line")->required();
  c->add_option("--output,-o", a.output, "Plain-text report")->required();
  c->add_option("--tsv", a.tsv, "Tab-separated report (default: <output>.tsv)");
  c->add_option("--split", a.split, "Also report answers [0, N) and [N, end) separately")->capture_default_str();
}

std::string fmt(std::optional<double> v) {
  if (!v) return "-";
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << *v;
  return s.str();
}

int run_evaluate(const EvaluateArgs& a, const RunInfo& run) {
  auto assignment = load(a.assignment, [](std::istream& in) { return read_assignment(in); });
  auto gold = load(a.gold, [](std::istream& in) { return parse_gold(in); });
  std::vector<std::string> ids;
  LabelColumn run_labels;
  for (auto& x : assignment.assignments) {
    ids.push_back(x.answer_id);
    run_labels.push_back(x.label);
  }
  std::vector<std::pair<std::string, LabelColumn>> columns;
  for (auto& ann : gold.annotators) columns.emplace_back(ann, gold.column(ann, ids));

  struct Scope {
    std::string name;
    std::size_t begin, end;
  };
  const std::size_t n = ids.size();
  std::vector<Scope> scopes{{"all", 0, n}};
  if (a.split > 0 && a.split < n) {
    scopes.push_back({"[0," + std::to_string(a.split) + ")", 0, a.split});
    scopes.push_back({"[" + std::to_string(a.split) + "," + std::to_string(n) + ")", a.split, n});
  }

  const std::string tsv_path = a.tsv.empty() ? a.output + ".tsv" : a.tsv;
  OutputFile text(a.output), tsv(tsv_path);
  auto& t = text.stream();
  auto& v = tsv.stream();
  t << "estimator " << (assignment.estimator.empty() ? "-" : assignment.estimator) << ", quantile "
    << assignment.quantile << ", threshold " << assignment.threshold << "\n\n";
  t << std::left << std::setw(16) << "scope" << std::right << std::setw(8) << "answers" << std::setw(10)
    << "evaluated" << std::setw(7) << "ties" << std::setw(9) << "no-gold" << std::setw(10) << "accuracy"
    << std::setw(10) << "min-k" << std::setw(10) << "max-k" << std::setw(10) << "run-k" << '\n';
  v << "scope\tmetric\tvalue\n";
  std::vector<AgreementReport> reports;
  for (auto& sc : scopes) {
    AssignmentRun part = assignment;
    part.assignments.assign(assignment.assignments.begin() + static_cast<std::ptrdiff_t>(sc.begin),
                            assignment.assignments.begin() + static_cast<std::ptrdiff_t>(sc.end));
    auto acc = accuracy(part, gold);
    auto rep = agreement_report(columns, &run_labels, sc.begin, sc.end);
    std::optional<double> acc_value;
    if (acc.evaluated) acc_value = acc.accuracy;
    t << std::left << std::setw(16) << sc.name << std::right << std::setw(8) << sc.end - sc.begin << std::setw(10)
      << acc.evaluated << std::setw(7) << acc.ties_excluded << std::setw(9) << acc.missing_gold << std::setw(10)
      << fmt(acc_value) << std::setw(10) << fmt(rep.min_mean_kappa) << std::setw(10) << fmt(rep.max_mean_kappa)
      << std::setw(10) << fmt(rep.run_mean_kappa) << '\n';
    auto row = [&](const std::string& metric, auto value) { v << sc.name << '\t' << metric << '\t' << value << '\n'; };
    auto opt = [](std::optional<double> x) { return x ? std::to_string(*x) : std::string("NA"); };
    row("answers", sc.end - sc.begin);
    row("evaluated", acc.evaluated);
    row("ties_excluded", acc.ties_excluded);
    row("missing_gold", acc.missing_gold);
    row("accuracy", opt(acc_value));
    row("min_mean_kappa", opt(rep.min_mean_kappa));
    row("max_mean_kappa", opt(rep.max_mean_kappa));
    row("run_mean_kappa", opt(rep.run_mean_kappa));
    for (auto& ag : rep.annotators) row("mean_kappa:" + ag.name, opt(ag.mean_kappa));
    reports.push_back(std::move(rep));
  }
  t << "\nper-annotator mean kappa\n" << std::left << std::setw(16) << "annotator";
  for (auto& sc : scopes) t << std::right << std::setw(12) << sc.name;
  t << '\n';
  for (std::size_t i = 0; i < gold.annotators.size(); ++i) {
    t << std::left << std::setw(16) << gold.annotators[i];
    for (auto& rep : reports) t << std::right << std::setw(12) << fmt(rep.annotators[i].mean_kappa);
    t << '\n';
  }
  for (auto& d : reports.front().diagnostics) t << "note: " << d << '\n';
  text.commit();
  tsv.commit();
  write_manifest(run, {a.assignment, a.gold}, {a.output, tsv_path}, true);
  return kOk;
}

// ---- sim

struct SimArgs {
  std::string a, b, output;
  SimilarityArgs sim;
};

void add_sim(CLI::App& app, SimArgs& a) {
  auto* c = app.add_subcommand("sim", "Similarity of two texts");
  c->add_option("text_a", a.a, "First text (answer side)")->required();
  c->add_option("text_b", a.b, "Second text (keyword side)")->required();
  c->add_option("--output,-o", a.output, "Write the result here instead of stdout");
  add_similarity_options(c, a.sim);
}

int run_sim(const SimArgs& a, const RunInfo& run) {
  std::vector<std::string> inputs;
  LoadedResources res(a.sim, inputs);
  auto ta = tokenize(a.a), tb = tokenize(a.b);
  auto est = res.estimator()(ta, tb);
  auto& d = est.diagnostics;
  std::ostringstream s;
  s << std::setprecision(17) << "value\t" << est.value << "\nmethod\t" << est.method << "\noov_a\t" << d.oov_a
    << "\noov_a_capitalized\t" << d.oov_a_capitalized << "\noov_b\t" << d.oov_b << "\nnosense_a\t" << d.nosense_a
    << "\nnosense_b\t" << d.nosense_b << "\nconcept_misses\t" << d.concept_misses << "\nconcat_misses\t"
    << d.concat_misses << "\ndegenerate\t" << (d.degenerate ? "yes" : "no") << '\n';
  if (a.output.empty()) {
    std::cout << s.str();
    return kOk;
  }
  OutputFile out(a.output);
  out.stream() << s.str();
  out.commit();
  write_manifest(run, inputs, {a.output}, true);
  return kOk;
}

// ---- config file

// Flat `key = value` lines; keys may use '_' or '-'.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  return load(path, [](std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto t = trim(line);
      if (t.empty() || t.front() == '#' || starts_with(t, "//")) continue;
      auto eq = t.find('=');
      if (eq == std::string_view::npos) throw FormatError("expected 'key = value'", lineno);
      std::string key(trim(t.substr(0, eq)));
      std::string value(trim(t.substr(eq + 1)));
      if (key.empty()) throw FormatError("empty key", lineno);
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      std::replace(key.begin(), key.end(), '_', '-');
      out.emplace_back(key, value);
    }
    return out;
  });
}

// Expands --config into option tokens placed right after the subcommand name, so that
// explicit command-line values (which come later) win.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  std::string config;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (starts_with(args[i], "--config=")) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config.empty()) return rest;
  auto pos = std::find_if(rest.begin(), rest.end(), [&](const std::string& s) {
    for (auto* sub : app.get_subcommands({}))
      if (sub->get_name() == s) return true;
    return false;
  });
  if (pos == rest.end()) return rest;
  const CLI::App* sub = app.get_subcommand(*pos);
  std::vector<std::string> injected;
  for (auto& [key, value] : read_config(config)) {
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) opt = app.get_option_no_throw("--" + key);
    if (!opt) {
      bool known = false;
      for (auto* other : app.get_subcommands({})) known = known || other->get_option_no_throw("--" + key);
      if (!known) throw Failure(kFormat, config + ": unknown key '" + key + "'");
      continue;  // belongs to another stage
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  rest.insert(pos + 1, injected.begin(), injected.end());
  return rest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept embeddings from semantic networks and their use for text similarity and milieu assignment"};
  app.name("semcept");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Globals globals;
  app.add_option("--seed", globals.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", globals.threads, "Worker threads; >1 makes train nondeterministic")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--config", globals.config, "Flat 'key = value' file with option defaults");

  WalkArgs walk;
  TrainArgs train_args;
  WctArgs wct;
  ClassifyArgs classify;
  EvaluateArgs evaluate;
  SimArgs sim;
  add_walk(app, walk);
  add_train(app, train_args);
  add_wct(app, wct);
  add_classify(app, classify);
  add_evaluate(app, evaluate);
  add_sim(app, sim);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(app, std::move(args));
    RunInfo run{args, nullptr, &globals};
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      return app.exit(e);
    }
    run.command = app.get_subcommands().front();
    const auto& name = run.command->get_name();
    if (name == "walk") return run_walk(walk, run);
    if (name == "train") return run_train(train_args, run);
    if (name == "wct") return run_wct(wct, run);
    if (name == "classify") return run_classify(classify, run);
    if (name == "evaluate") return run_evaluate(evaluate, run);
    if (name == "sim") return run_sim(sim, run);
    return kGeneral;
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kGeneral;
  }
}
