#ifndef SEMCEPT_SGNS_HPP
#define SEMCEPT_SGNS_HPP

// Skip-gram with negative sampling.
//
// For a center vector u, a positive context vector v+ and negatives v1..vk the pair loss is
//   L = -log s(u.v+) - sum_i log s(-u.vi)
// with s the logistic function. Gradients:
//   dL/du  = (s(u.v+) - 1) v+ + sum_i s(u.vi) vi
//   dL/dv+ = (s(u.v+) - 1) u
//   dL/dvi = s(u.vi) u

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "embedding.hpp"
#include "errors.hpp"
#include "random.hpp"

namespace semcept {

struct TrainConfig {
  std::size_t dimension = 300;
  std::size_t window = 7;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double initial_learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  double subsample_t = 1e-4;  // 0 disables subsampling
  double unigram_power = 0.75;
  std::uint64_t min_count = 5;
  std::uint64_t rng_seed = 1;

  void validate() const {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (negatives < 1) throw std::invalid_argument("negatives must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(initial_learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
    if (min_learning_rate < 0 || min_learning_rate > initial_learning_rate)
      throw std::invalid_argument("min learning rate must lie in [0, initial learning rate]");
    if (subsample_t < 0) throw std::invalid_argument("subsample threshold must be >= 0");
    if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  }
};

inline double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

/// log s(x), stable for large |x|.
inline double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

template <class T>
double dot(std::span<const T> a, std::span<const T> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

template <class T>
double pair_loss(std::span<const T> center, std::span<const T> positive, std::span<const std::span<const T>> negatives) {
  double loss = -log_sigmoid(dot(center, positive));
  for (auto& n : negatives) loss -= log_sigmoid(-dot(center, n));
  return loss;
}

struct PairGradient {
  std::vector<double> center;
  std::vector<double> positive;
  std::vector<std::vector<double>> negatives;
};

template <class T>
PairGradient pair_loss_gradient(std::span<const T> center, std::span<const T> positive,
                                std::span<const std::span<const T>> negatives) {
  const std::size_t d = center.size();
  PairGradient g;
  g.center.assign(d, 0.0);
  g.positive.assign(d, 0.0);
  double gp = sigmoid(dot(center, positive)) - 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    g.center[i] += gp * positive[i];
    g.positive[i] = gp * center[i];
  }
  for (auto& n : negatives) {
    double gn = sigmoid(dot(center, n));
    auto& gv = g.negatives.emplace_back(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      g.center[i] += gn * n[i];
      gv[i] = gn * center[i];
    }
  }
  return g;
}

/// Draws token indices with probability proportional to count^power.
class NegativeSampler {
 public:
  NegativeSampler(const Vocabulary& vocab, double power) {
    cumulative_.reserve(vocab.size());
    double acc = 0;
    for (auto& e : vocab.entries()) {
      acc += std::pow(static_cast<double>(e.count), power);
      cumulative_.push_back(acc);
    }
    for (auto& c : cumulative_) c /= acc;
  }

  std::size_t draw(RandomSource& rng) const {
    double u = rng.uniform01();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    auto i = static_cast<std::size_t>(it - cumulative_.begin());
    return std::min(i, cumulative_.size() - 1);
  }

  double probability(std::size_t i) const { return cumulative_[i] - (i ? cumulative_[i - 1] : 0.0); }
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

/// A fixed (center, context, negatives) triple, for evaluating loss on a frozen batch.
struct TrainingPair {
  std::size_t center = 0;
  std::size_t context = 0;
  std::vector<std::size_t> negatives;
};

inline double pair_loss(const EmbeddingTable& table, const TrainingPair& p) {
  std::vector<std::span<const float>> negs;
  for (auto n : p.negatives) negs.push_back(table.output(n));
  return pair_loss<float>(table.input(p.center), table.output(p.context), negs);
}

inline double batch_loss(const EmbeddingTable& table, std::span<const TrainingPair> batch) {
  double s = 0;
  for (auto& p : batch) s += pair_loss(table, p);
  return batch.empty() ? 0.0 : s / static_cast<double>(batch.size());
}

struct TrainStats {
  std::uint64_t updates = 0;  // (center, context) pairs
  std::vector<double> epoch_mean_loss;
  double final_learning_rate = 0;
};

struct TrainOptions {
  unsigned threads = 1;  // >1: lock-free shared updates, not reproducible
  // Called after every corpus line in single-threaded mode.
  std::function<void(const EmbeddingTable&, std::uint64_t tokens_processed)> observer;
};

namespace detail {

struct EncodedCorpus {
  std::vector<std::vector<std::uint32_t>> lines;
  std::uint64_t tokens = 0;
};

inline EncodedCorpus encode(const std::vector<std::string>& lines, const Vocabulary& vocab) {
  EncodedCorpus c;
  c.lines.reserve(lines.size());
  for (auto& line : lines) {
    auto& ids = c.lines.emplace_back();
    for (auto& tok : split_whitespace(line))
      if (auto i = vocab.find(tok)) ids.push_back(static_cast<std::uint32_t>(*i));
    c.tokens += ids.size();
  }
  return c;
}

class SgnsWorker {
 public:
  SgnsWorker(EmbeddingTable& table, const TrainConfig& cfg, const NegativeSampler& sampler,
             const std::vector<double>& keep_prob, std::uint64_t seed)
      : table_(table), cfg_(cfg), sampler_(sampler), keep_prob_(keep_prob), rng_(seed),
        grad_(table.dimension()) {}

  /// Trains on one line; returns summed loss and number of pair updates.
  std::pair<double, std::uint64_t> line(const std::vector<std::uint32_t>& ids, double lr,
                                        std::uint64_t step_base) {
    kept_.clear();
    for (auto id : ids)
      if (keep_prob_.empty() || keep_prob_[id] >= 1.0 || rng_.uniform01() < keep_prob_[id]) kept_.push_back(id);
    double loss = 0;
    std::uint64_t updates = 0;
    const auto n = kept_.size();
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t radius = 1 + rng_.index(cfg_.window);
      std::size_t lo = i >= radius ? i - radius : 0;
      std::size_t hi = std::min(n - 1, i + radius);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        loss += update(kept_[i], kept_[j], lr, step_base + updates);
        ++updates;
      }
    }
    return {loss, updates};
  }

 private:
  double update(std::size_t center, std::size_t context, double lr, std::uint64_t step) {
    auto u = table_.input(center);
    std::fill(grad_.begin(), grad_.end(), 0.0f);
    double loss = 0;
    for (std::size_t k = 0; k <= cfg_.negatives; ++k) {
      std::size_t target = context;
      double label = 1.0;
      if (k > 0) {
        target = sampler_.draw(rng_);
        if (target == context) continue;
        label = 0.0;
      }
      auto v = table_.output(target);
      double s = dot<float>(u, v);
      if (!std::isfinite(s)) {
        std::ostringstream msg;
        msg << "non-finite score at update " << step << " (learning rate " << lr << ")";
        throw TrainingError(msg.str());
      }
      loss -= label > 0 ? log_sigmoid(s) : log_sigmoid(-s);
      auto g = static_cast<float>((label - sigmoid(s)) * lr);
      for (std::size_t d = 0; d < u.size(); ++d) {
        grad_[d] += g * v[d];
        v[d] += g * u[d];
      }
    }
    for (std::size_t d = 0; d < u.size(); ++d) u[d] += grad_[d];
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "non-finite loss at update " << step << " (learning rate " << lr << ")";
      throw TrainingError(msg.str());
    }
    return loss;
  }

  EmbeddingTable& table_;
  const TrainConfig& cfg_;
  const NegativeSampler& sampler_;
  const std::vector<double>& keep_prob_;
  RandomSource rng_;
  std::vector<float> grad_;
  std::vector<std::uint32_t> kept_;
};

}  // namespace detail

/// Word2vec-style keep probability for frequent-token subsampling.
inline std::vector<double> keep_probabilities(const Vocabulary& vocab, double t) {
  if (t <= 0) return {};
  std::vector<double> keep(vocab.size());
  const double threshold = t * static_cast<double>(vocab.total_tokens());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    double f = static_cast<double>(vocab[i].count);
    keep[i] = (std::sqrt(f / threshold) + 1.0) * threshold / f;
  }
  return keep;
}

/// Trains SGNS vectors on whitespace-tokenized lines.
inline EmbeddingTable train(const std::vector<std::string>& lines, const TrainConfig& cfg,
                            const TrainOptions& opts = {}, TrainStats* stats = nullptr) {
  cfg.validate();
  std::unordered_map<std::string, std::uint64_t> counts;
  for (auto& line : lines)
    for (auto& tok : split_whitespace(line)) ++counts[tok];
  auto vocab = Vocabulary::from_counts(counts, cfg.min_count);
  auto corpus = detail::encode(lines, vocab);

  EmbeddingTable table(vocab, cfg.dimension);
  {
    RandomSource init(derive_seed(cfg.rng_seed, "init"));
    const double scale = 1.0 / static_cast<double>(cfg.dimension);
    for (auto& x : table.input_data()) x = static_cast<float>((init.uniform01() - 0.5) * scale);
  }
  NegativeSampler sampler(table.vocabulary(), cfg.unigram_power);
  auto keep = keep_probabilities(table.vocabulary(), cfg.subsample_t);

  const double total = static_cast<double>(corpus.tokens * cfg.epochs) + 1.0;
  auto rate = [&](std::uint64_t processed) {
    return std::max(cfg.min_learning_rate, cfg.initial_learning_rate * (1.0 - static_cast<double>(processed) / total));
  };

  TrainStats local;
  std::uint64_t processed = 0;
  if (opts.threads <= 1) {
    detail::SgnsWorker worker(table, cfg, sampler, keep, derive_seed(cfg.rng_seed, "worker"));
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      double loss = 0;
      std::uint64_t updates = 0;
      for (auto& ids : corpus.lines) {
        auto [l, u] = worker.line(ids, rate(processed), local.updates + updates);
        loss += l;
        updates += u;
        processed += ids.size();
        if (opts.observer) opts.observer(table, processed);
      }
      local.updates += updates;
      local.epoch_mean_loss.push_back(updates ? loss / static_cast<double>(updates) : 0.0);
    }
  } else {
    // Workers share the weight arrays without locking; concurrent updates may overwrite
    // each other, which SGD tolerates for sparse updates.
    std::atomic<std::uint64_t> shared_processed{0};
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::vector<double> loss(opts.threads, 0.0);
      std::vector<std::uint64_t> updates(opts.threads, 0);
      std::vector<std::exception_ptr> errors(opts.threads);
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < opts.threads; ++t)
        pool.emplace_back([&, t] {
          try {
            detail::SgnsWorker worker(table, cfg, sampler, keep, derive_seed(cfg.rng_seed, "worker", epoch * 1024 + t));
            for (std::size_t i = t; i < corpus.lines.size(); i += opts.threads) {
              auto& ids = corpus.lines[i];
              auto [l, u] = worker.line(ids, rate(shared_processed.load(std::memory_order_relaxed)), updates[t]);
              loss[t] += l;
              updates[t] += u;
              shared_processed.fetch_add(ids.size(), std::memory_order_relaxed);
            }
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
      double l = 0;
      std::uint64_t u = 0;
      for (unsigned t = 0; t < opts.threads; ++t) {
        l += loss[t];
        u += updates[t];
      }
      local.updates += u;
      local.epoch_mean_loss.push_back(u ? l / static_cast<double>(u) : 0.0);
    }
    processed = shared_processed.load();
  }
  local.final_learning_rate = rate(processed);
  if (!table.all_finite()) throw TrainingError("training produced non-finite weights");
  if (stats) *stats = std::move(local);
  return table;
}

inline EmbeddingTable train(std::istream& corpus, const TrainConfig& cfg, const TrainOptions& opts = {},
                            TrainStats* stats = nullptr) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(corpus, line)) lines.push_back(std::move(line));
  return train(lines, cfg, opts, stats);
}

}  // namespace semcept

#endif  // SEMCEPT_SGNS_HPP
