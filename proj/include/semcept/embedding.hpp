#ifndef SEMCEPT_EMBEDDING_HPP
#define SEMCEPT_EMBEDDING_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "text.hpp"

namespace semcept {

struct CosineResult {
  double value = 0.0;
  bool zero_input = false;  // at least one vector was all-zero; value is then 0
};

template <class T, class U>
CosineResult cosine_flagged(std::span<const T> u, std::span<const U> v) {
  if (u.size() != v.size())
    throw std::invalid_argument("cosine: dimension mismatch " + std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()));
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double a = u[i], b = v[i];
    dot += a * b;
    nu += a * a;
    nv += b * b;
  }
  if (nu == 0.0 || nv == 0.0) return {0.0, true};
  double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return {std::clamp(c, -1.0, 1.0), false};
}

/// u.v / (|u||v|); 0 when either vector is all-zero.
template <class T, class U>
double cosine(std::span<const T> u, std::span<const U> v) {
  return cosine_flagged(u, v).value;
}

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  return cosine(std::span<const double>(u), std::span<const double>(v));
}

inline bool is_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

/// Token -> dense index, ordered by descending frequency then token text.
class Vocabulary {
 public:
  struct Entry {
    std::string token;
    std::uint64_t count = 0;
  };

  Vocabulary() = default;

  /// Counts whitespace-separated tokens, drops those below min_count.
  static Vocabulary build(std::istream& corpus, std::uint64_t min_count) {
    std::unordered_map<std::string, std::uint64_t> counts;
    std::string line;
    while (std::getline(corpus, line))
      for (auto& tok : split_whitespace(line)) ++counts[tok];
    return from_counts(counts, min_count);
  }

  template <class Map>
  static Vocabulary from_counts(const Map& counts, std::uint64_t min_count) {
    if (min_count == 0) throw std::invalid_argument("min_count must be positive");
    Vocabulary v;
    for (auto& [tok, n] : counts)
      if (n >= min_count) v.entries_.push_back({tok, n});
    if (v.entries_.empty())
      throw EmptyVocabulary("vocabulary is empty after applying min_count " + std::to_string(min_count));
    std::sort(v.entries_.begin(), v.entries_.end(), [](const Entry& a, const Entry& b) {
      return a.count != b.count ? a.count > b.count : a.token < b.token;
    });
    v.min_count_ = min_count;
    v.reindex();
    return v;
  }

  /// Vocabulary with the given token order and unit counts (used when loading tables).
  static Vocabulary from_tokens(std::vector<std::string> tokens) {
    Vocabulary v;
    for (auto& t : tokens) v.entries_.push_back({std::move(t), 1});
    v.reindex();
    if (v.index_.size() != v.entries_.size()) throw FormatError("duplicate token in vocabulary");
    return v;
  }

  std::optional<std::size_t> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::uint64_t total_tokens() const noexcept { return total_; }
  std::uint64_t min_count() const noexcept { return min_count_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.entries_.size() == b.entries_.size() &&
           std::equal(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                      [](const Entry& x, const Entry& y) { return x.token == y.token && x.count == y.count; });
  }

 private:
  void reindex() {
    index_.clear();
    total_ = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      index_.emplace(entries_[i].token, i);
      total_ += entries_[i].count;
    }
  }

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t total_ = 0;
  std::uint64_t min_count_ = 1;
};

/// Input ("embedding") and output (context) vectors for a vocabulary.
/// Only input vectors are used for similarity; loaded tables have no output vectors.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(Vocabulary vocab, std::size_t dimension, bool with_output = true)
      : vocab_(std::move(vocab)),
        dim_(dimension),
        input_(vocab_.size() * dimension, 0.0f),
        output_(with_output ? vocab_.size() * dimension : 0, 0.0f) {
    if (dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
  }

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vocab_.size(); }
  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  bool has_output() const noexcept { return !output_.empty(); }

  std::span<float> input(std::size_t i) { return {input_.data() + i * dim_, dim_}; }
  std::span<const float> input(std::size_t i) const { return {input_.data() + i * dim_, dim_}; }
  std::span<float> output(std::size_t i) { return {output_.data() + i * dim_, dim_}; }
  std::span<const float> output(std::size_t i) const { return {output_.data() + i * dim_, dim_}; }

  /// Input vector of a token; nullopt for unknown tokens.
  std::optional<std::span<const float>> find(std::string_view token) const {
    auto i = vocab_.find(token);
    if (!i) return std::nullopt;
    return input(*i);
  }

  bool contains(std::string_view token) const { return vocab_.find(token).has_value(); }

  std::vector<float>& input_data() noexcept { return input_; }
  const std::vector<float>& input_data() const noexcept { return input_; }
  std::vector<float>& output_data() noexcept { return output_; }

  bool all_finite() const {
    auto fin = [](float x) { return std::isfinite(x); };
    return std::all_of(input_.begin(), input_.end(), fin) && std::all_of(output_.begin(), output_.end(), fin);
  }

 private:
  Vocabulary vocab_;
  std::size_t dim_ = 0;
  std::vector<float> input_;
  std::vector<float> output_;
};

namespace detail {

inline void write_float(std::ostream& os, float x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(x));
  os << buf;
}

}  // namespace detail

/// Text format: header `<vocab_size> <dimension>`, then `token v1 .. vd` per line,
/// values with 9 significant digits (exact for float).
inline void save_table(std::ostream& os, const EmbeddingTable& table) {
  os << table.size() << ' ' << table.dimension() << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    os << table.vocabulary()[i].token;
    for (float x : table.input(i)) {
      os << ' ';
      detail::write_float(os, x);
    }
    os << '\n';
  }
  if (!os) throw Error("failed to write embedding table");
}

inline EmbeddingTable load_table(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw FormatError("missing header line");
  auto header = split_whitespace(line);
  std::size_t n = 0, dim = 0;
  try {
    if (header.size() != 2) throw std::invalid_argument("fields");
    n = std::stoul(header[0]);
    dim = std::stoul(header[1]);
  } catch (const std::exception&) {
    throw FormatError("header must be '<vocab_size> <dimension>'", lineno);
  }
  if (dim == 0) throw FormatError("dimension must be positive", lineno);

  std::vector<std::string> tokens;
  std::vector<float> values;
  tokens.reserve(n);
  values.reserve(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line()) throw FormatError("truncated table: expected " + std::to_string(n) + " rows, got " +
                                        std::to_string(i));
    auto f = split_whitespace(line);
    if (f.size() != dim + 1)
      throw FormatError("row has " + std::to_string(f.size() - 1) + " values, expected " + std::to_string(dim),
                        lineno);
    tokens.push_back(f[0]);
    for (std::size_t d = 1; d <= dim; ++d) {
      char* end = nullptr;
      float x = std::strtof(f[d].c_str(), &end);
      if (end != f[d].c_str() + f[d].size() || !std::isfinite(x))
        throw FormatError("bad value '" + f[d] + "'", lineno);
      values.push_back(x);
    }
  }
  if (next_line()) throw FormatError("extra rows after " + std::to_string(n) + " declared entries", lineno);

  EmbeddingTable table(Vocabulary::from_tokens(std::move(tokens)), dim, false);
  table.input_data() = std::move(values);
  return table;
}

}  // namespace semcept

#endif  // SEMCEPT_EMBEDDING_HPP
