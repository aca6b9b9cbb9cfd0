#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lexalign/errors.hpp"
#include "lexalign/json.hpp"
#include "lexalign/pairs.hpp"
#include "lexalign/util.hpp"

namespace lexalign {

struct EmbeddingVector {
  std::vector<double> values;
  std::string source_fingerprint;  // hash of (text, backend_id, head_version)
};

// d = 1 - (A.B)/(|A||B|), clamped against rounding drift at the ends.
inline double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("cosine distance over dimensions " + std::to_string(a.size()) +
                            " and " + std::to_string(b.size()));
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) throw ZeroNorm("cosine distance of a zero vector");
  double d = 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(d, 0.0, 2.0);
}

inline double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine_distance(a.values, b.values);
}

// L = label.d^2 + (1-label).max(0, margin-d)^2
inline double contrastive_loss(double d, int label, double margin) {
  if (label != 0 && label != 1)
    throw PreconditionError("contrastive loss label must be 0 or 1");
  if (!(margin > 0)) throw PreconditionError("contrastive loss margin must be positive");
  if (!(d >= 0.0 && d <= 2.0))
    throw PreconditionError("contrastive loss distance outside [0, 2]");
  if (label == 1) return d * d;
  double hinge = std::max(0.0, margin - d);
  return hinge * hinge;
}

struct TrainingConfig {
  int epochs = 25;
  double learning_rate = 2e-5;
  double margin = 0.5;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 16;
  unsigned seed = 0;

  void validate() const {
    if (epochs < 1) throw PreconditionError("epochs must be at least 1");
    if (!(learning_rate > 0)) throw PreconditionError("learning rate must be positive");
    if (!(margin > 0 && margin <= 2.0))
      throw PreconditionError("margin must be in (0, 2], the cosine distance range");
    if (batch_size < 1) throw PreconditionError("batch size must be at least 1");
  }
};

// ---------------------------------------------------------------------------
// Base encoders
// ---------------------------------------------------------------------------

class BaseEncoder {
 public:
  virtual ~BaseEncoder() = default;
  virtual std::vector<double> encode(const std::string& text) const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string id() const = 0;
};

// Character n-gram hashing encoder: deterministic, offline, no model files.
// Each 3-5 gram flips one signed coordinate; vectors are L2-normalized.
class HashedNgramEncoder : public BaseEncoder {
 public:
  explicit HashedNgramEncoder(std::size_t dim = 256) : dim_(dim) {
    if (dim_ < 2) throw PreconditionError("encoder dimension must be at least 2");
  }

  std::vector<double> encode(const std::string& text) const override {
    std::string lower = util::to_lower(util::trim(text));
    if (lower.empty()) throw PreconditionError("cannot embed empty text");
    std::vector<double> v(dim_, 0.0);
    auto add = [&](std::string_view gram) {
      std::uint64_t h = util::fnv1a(gram);
      double sign = (h >> 63) ? 1.0 : -1.0;
      v[h % dim_] += sign;
    };
    for (std::size_t n = 3; n <= 5; ++n)
      for (std::size_t i = 0; i + n <= lower.size(); ++i)
        add(std::string_view(lower).substr(i, n));
    add(lower);  // whole text, so short inputs still map somewhere
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (auto& x : v) x /= norm;
    return v;
  }

  std::size_t dim() const override { return dim_; }
  std::string id() const override { return "hashed-ngram-v1/" + std::to_string(dim_); }

 private:
  std::size_t dim_;
};

// Fixed text -> vector table, for tests and synthetic experiments.
class StaticVectorEncoder : public BaseEncoder {
 public:
  StaticVectorEncoder(std::map<std::string, std::vector<double>> table, std::size_t dim,
                      std::string id = "static-v1")
      : table_(std::move(table)), dim_(dim), id_(std::move(id)) {
    for (const auto& [text, v] : table_)
      if (v.size() != dim_)
        throw DimensionMismatch("static vector for \"" + text + "\" has dimension " +
                                std::to_string(v.size()));
  }

  std::vector<double> encode(const std::string& text) const override {
    auto it = table_.find(text);
    if (it == table_.end())
      throw PreconditionError("static encoder has no vector for \"" + text + "\"");
    return it->second;
  }

  std::size_t dim() const override { return dim_; }
  std::string id() const override { return id_; }

 private:
  std::map<std::string, std::vector<double>> table_;
  std::size_t dim_;
  std::string id_;
};

// ---------------------------------------------------------------------------
// Linear head
// ---------------------------------------------------------------------------

// Trainable map y = Wx + b on top of a frozen base encoder. Square heads
// start at the identity so an untrained head reproduces the base geometry;
// non-square heads start from a seeded uniform fan-in init.
class LinearHead {
 public:
  LinearHead() = default;

  LinearHead(std::size_t d_base, std::size_t d_out, unsigned seed)
      : d_base_(d_base), d_out_(d_out), w_(d_out * d_base, 0.0), b_(d_out, 0.0) {
    if (d_base < 1 || d_out < 1) throw PreconditionError("head dimensions must be positive");
    if (d_base == d_out) {
      for (std::size_t i = 0; i < d_out; ++i) w_[i * d_base + i] = 1.0;
    } else {
      std::mt19937 rng(seed);
      double bound = std::sqrt(6.0 / static_cast<double>(d_base + d_out));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (auto& x : w_) x = dist(rng);
    }
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    if (x.size() != d_base_)
      throw DimensionMismatch("head expects dimension " + std::to_string(d_base_) + ", got " +
                              std::to_string(x.size()));
    std::vector<double> y(d_out_);
    for (std::size_t i = 0; i < d_out_; ++i) {
      double acc = b_[i];
      const double* row = &w_[i * d_base_];
      for (std::size_t j = 0; j < d_base_; ++j) acc += row[j] * x[j];
      y[i] = acc;
    }
    return y;
  }

  std::size_t d_base() const { return d_base_; }
  std::size_t d_out() const { return d_out_; }
  std::vector<double>& weights() { ++revision_; return w_; }
  std::vector<double>& bias() { ++revision_; return b_; }
  const std::vector<double>& weights() const { return w_; }
  const std::vector<double>& bias() const { return b_; }

  // Memoized on a revision counter bumped by the mutable accessors, since
  // embedding fingerprints ask for the version on every call. Mutation
  // through a reference obtained before the last version() call is not
  // observable; re-acquire weights()/bias() per update round.
  std::string version() const {
    if (memo_.empty() || memo_revision_ != revision_) {
      std::string blob;
      blob.reserve((w_.size() + b_.size()) * 18);
      for (double x : w_) blob += util::format_double(x) + ",";
      for (double x : b_) blob += util::format_double(x) + ",";
      memo_ = util::fnv1a_hex(blob);
      memo_revision_ = revision_;
    }
    return memo_;
  }

 private:
  std::size_t d_base_ = 0;
  std::size_t d_out_ = 0;
  std::vector<double> w_;  // row-major, d_out x d_base
  std::vector<double> b_;
  unsigned long revision_ = 0;
  mutable unsigned long memo_revision_ = 0;
  mutable std::string memo_;
};

// ---------------------------------------------------------------------------
// Backend
// ---------------------------------------------------------------------------

enum class BackendMode { FrozenBaseWithHead, FullyTunable };

// FrozenBaseWithHead trains only the linear head, with the analytic
// gradients below. FullyTunable hands the whole model to an external trainer
// through the fine_tune hook and is otherwise interface-compatible.
class EmbeddingBackend {
 public:
  using FineTuneHook =
      std::function<std::vector<double>(const PairDataset&, const TrainingConfig&)>;

  EmbeddingBackend(std::shared_ptr<BaseEncoder> base, LinearHead head)
      : base_(std::move(base)), head_(std::move(head)), mode_(BackendMode::FrozenBaseWithHead) {
    if (head_->d_base() != base_->dim())
      throw DimensionMismatch("head input dimension does not match encoder");
  }

  EmbeddingBackend(std::shared_ptr<BaseEncoder> base, FineTuneHook hook)
      : base_(std::move(base)), fine_tune_(std::move(hook)), mode_(BackendMode::FullyTunable) {}

  BackendMode mode() const { return mode_; }
  const std::shared_ptr<BaseEncoder>& base() const { return base_; }

  LinearHead& head() {
    if (!head_) throw PreconditionError("backend has no trainable head");
    return *head_;
  }
  const LinearHead& head() const {
    if (!head_) throw PreconditionError("backend has no trainable head");
    return *head_;
  }

  std::string backend_id() const { return base_->id(); }

  std::string head_version() const { return head_ ? head_->version() : std::string("base"); }

  std::size_t dim() const { return head_ ? head_->d_out() : base_->dim(); }

  EmbeddingVector embed(const std::string& text) const {
    EmbeddingVector v;
    v.values = head_ ? head_->apply(base_->encode(text)) : base_->encode(text);
    v.source_fingerprint =
        util::fnv1a_hex(text + '\x1f' + backend_id() + '\x1f' + head_version());
    for (double x : v.values)
      if (!std::isfinite(x)) throw NonFiniteLoss("non-finite embedding for \"" + text + "\"");
    return v;
  }

  std::vector<double> run_fine_tune(const PairDataset& dataset, const TrainingConfig& cfg) {
    if (!fine_tune_)
      throw PreconditionError("FullyTunable backend has no external trainer attached");
    return fine_tune_(dataset, cfg);
  }

 private:
  std::shared_ptr<BaseEncoder> base_;
  std::optional<LinearHead> head_;
  FineTuneHook fine_tune_;
  BackendMode mode_;
};

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace detail {

struct PairGradient {
  double loss = 0.0;
  std::vector<double> grad_w;  // same layout as head weights
  std::vector<double> grad_b;
};

// Analytic gradient of the contrastive loss of one pair with respect to the
// head parameters. With y = Wx + b and c = cos(y1, y2):
//   dc/dy1 = y2/(|y1||y2|) - c*y1/|y1|^2, dd/dy1 = -dc/dy1,
//   dL/dd = 2d (label 1) or -2*max(0, margin-d) (label 0).
inline PairGradient pair_gradient(const LinearHead& head, const std::vector<double>& x1,
                                  const std::vector<double>& x2, int label, double margin) {
  std::vector<double> y1 = head.apply(x1);
  std::vector<double> y2 = head.apply(x2);
  std::size_t d_out = head.d_out(), d_base = head.d_base();

  double dot = 0, n1 = 0, n2 = 0;
  for (std::size_t i = 0; i < d_out; ++i) {
    dot += y1[i] * y2[i];
    n1 += y1[i] * y1[i];
    n2 += y2[i] * y2[i];
  }
  if (n1 == 0 || n2 == 0) throw ZeroNorm("head output collapsed to zero during training");
  double norm1 = std::sqrt(n1), norm2 = std::sqrt(n2);
  double cos = dot / (norm1 * norm2);
  double d = std::clamp(1.0 - cos, 0.0, 2.0);

  PairGradient out;
  out.loss = contrastive_loss(d, label, margin);
  out.grad_w.assign(d_out * d_base, 0.0);
  out.grad_b.assign(d_out, 0.0);

  double dl_dd = label == 1 ? 2.0 * d : -2.0 * std::max(0.0, margin - d);
  if (dl_dd == 0.0) return out;  // flat region of the hinge

  for (std::size_t i = 0; i < d_out; ++i) {
    double dc_dy1 = y2[i] / (norm1 * norm2) - cos * y1[i] / n1;
    double dc_dy2 = y1[i] / (norm1 * norm2) - cos * y2[i] / n2;
    double dL_dy1 = dl_dd * -dc_dy1;
    double dL_dy2 = dl_dd * -dc_dy2;
    out.grad_b[i] = dL_dy1 + dL_dy2;
    double* row = &out.grad_w[i * d_base];
    for (std::size_t j = 0; j < d_base; ++j) row[j] = dL_dy1 * x1[j] + dL_dy2 * x2[j];
  }
  return out;
}

class AdamW {
 public:
  AdamW(std::size_t n, const TrainingConfig& cfg)
      : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  // Decoupled weight decay: the decay term bypasses the moment estimates.
  void step(std::vector<double>& params, const std::vector<double>& grad, bool decay) {
    ++t_;
    double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
      v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
      double update = (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + cfg_.epsilon);
      if (decay) update += cfg_.weight_decay * params[i];
      params[i] -= cfg_.learning_rate * update;
    }
  }

 private:
  TrainingConfig cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

}  // namespace detail

struct TrainResult {
  std::vector<double> loss_history;  // one mean loss per epoch
};

// Head-only contrastive training over the train split. Base vectors are
// computed once (the base is frozen); batches reshuffle each epoch from a
// single seeded stream, so a fixed seed reproduces the loss history exactly.
inline TrainResult train(EmbeddingBackend& backend, const PairDataset& dataset,
                         const TrainingConfig& cfg) {
  cfg.validate();
  if (dataset.train.empty()) throw PreconditionError("training set is empty");
  if (backend.mode() == BackendMode::FullyTunable)
    return {backend.run_fine_tune(dataset, cfg)};

  const BaseEncoder& base = *backend.base();
  std::map<std::string, std::vector<double>> base_cache;
  auto encoded = [&](const std::string& text) -> const std::vector<double>& {
    auto it = base_cache.find(text);
    if (it == base_cache.end()) it = base_cache.emplace(text, base.encode(text)).first;
    return it->second;
  };
  for (const auto& p : dataset.train) {
    if (!p.label) throw PreconditionError("training pair " + p.pair_id + " has no label");
    encoded(p.a1.text);
    encoded(p.a2.text);
  }

  LinearHead& head = backend.head();
  detail::AdamW opt_w(head.weights().size(), cfg);
  detail::AdamW opt_b(head.bias().size(), cfg);
  std::mt19937 rng(cfg.seed);
  std::vector<std::size_t> order(dataset.train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      std::size_t end = std::min(order.size(), start + cfg.batch_size);
      auto n = static_cast<double>(end - start);
      std::vector<double> grad_w(head.weights().size(), 0.0);
      std::vector<double> grad_b(head.bias().size(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const ArgumentPair& p = dataset.train[order[k]];
        auto g = detail::pair_gradient(head, encoded(p.a1.text), encoded(p.a2.text), *p.label,
                                       cfg.margin);
        batch_loss += g.loss;
        for (std::size_t i = 0; i < grad_w.size(); ++i) grad_w[i] += g.grad_w[i] / n;
        for (std::size_t i = 0; i < grad_b.size(); ++i) grad_b[i] += g.grad_b[i] / n;
      }
      if (!std::isfinite(batch_loss))
        throw NonFiniteLoss("training diverged at epoch " + std::to_string(epoch));
      epoch_loss += batch_loss;
      opt_w.step(head.weights(), grad_w, true);
      opt_b.step(head.bias(), grad_b, false);  // bias is conventionally not decayed
    }
    double mean = epoch_loss / static_cast<double>(dataset.train.size());
    if (!std::isfinite(mean))
      throw NonFiniteLoss("training diverged at epoch " + std::to_string(epoch));
    result.loss_history.push_back(mean);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Average precision
// ---------------------------------------------------------------------------

struct ScoredPair {
  std::string pair_id;
  double score = 0.0;  // higher = more concordant
  int label = 0;
};

// AP = mean of precision@rank over the positives, ranked by score
// descending with ties broken by pair_id so the value is reproducible.
inline double average_precision(std::vector<ScoredPair> scored) {
  std::sort(scored.begin(), scored.end(), [](const ScoredPair& a, const ScoredPair& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.pair_id < b.pair_id;
  });
  std::size_t positives_seen = 0;
  double sum = 0.0;
  for (std::size_t rank = 0; rank < scored.size(); ++rank) {
    if (scored[rank].label != 1) continue;
    ++positives_seen;
    sum += static_cast<double>(positives_seen) / static_cast<double>(rank + 1);
  }
  if (positives_seen == 0) throw NoPositives("no concordant pairs to rank");
  return sum / static_cast<double>(positives_seen);
}

// Scores test pairs with 1 - cosine_distance of the backend's embeddings.
inline double average_precision(const EmbeddingBackend& backend,
                                const std::vector<ArgumentPair>& test) {
  std::vector<ScoredPair> scored;
  scored.reserve(test.size());
  for (const auto& p : test) {
    if (!p.label) throw PreconditionError("test pair " + p.pair_id + " has no label");
    double d = cosine_distance(backend.embed(p.a1.text), backend.embed(p.a2.text));
    scored.push_back({p.pair_id, 1.0 - d, *p.label});
  }
  return average_precision(std::move(scored));
}

// ---------------------------------------------------------------------------
// Gradient check
// ---------------------------------------------------------------------------

// Compares the analytic head gradient of the mean loss against central
// finite differences. Callers should keep sampled pairs away from the hinge
// point d = margin for label 0, where the loss is not differentiable.
inline double gradient_check(EmbeddingBackend& backend, const std::vector<ArgumentPair>& pairs,
                             const TrainingConfig& cfg, double step = 1e-5) {
  if (backend.mode() != BackendMode::FrozenBaseWithHead)
    throw PreconditionError("gradient check requires a trainable head");
  if (pairs.empty()) throw PreconditionError("gradient check needs at least one pair");

  LinearHead& head = backend.head();
  const BaseEncoder& base = *backend.base();
  std::map<std::string, std::vector<double>> cache;
  auto encoded = [&](const std::string& text) -> const std::vector<double>& {
    auto it = cache.find(text);
    if (it == cache.end()) it = cache.emplace(text, base.encode(text)).first;
    return it->second;
  };

  auto n = static_cast<double>(pairs.size());
  std::vector<double> grad_w(head.weights().size(), 0.0);
  std::vector<double> grad_b(head.bias().size(), 0.0);
  for (const auto& p : pairs) {
    if (!p.label) throw PreconditionError("gradient check pair " + p.pair_id + " has no label");
    auto g = detail::pair_gradient(head, encoded(p.a1.text), encoded(p.a2.text), *p.label,
                                   cfg.margin);
    for (std::size_t i = 0; i < grad_w.size(); ++i) grad_w[i] += g.grad_w[i] / n;
    for (std::size_t i = 0; i < grad_b.size(); ++i) grad_b[i] += g.grad_b[i] / n;
  }

  auto mean_loss = [&]() {
    double total = 0.0;
    for (const auto& p : pairs) {
      double d = cosine_distance(head.apply(encoded(p.a1.text)), head.apply(encoded(p.a2.text)));
      total += contrastive_loss(d, *p.label, cfg.margin);
    }
    return total / n;
  };

  double max_rel = 0.0;
  auto check_param = [&](std::vector<double>& params, const std::vector<double>& analytic) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      double saved = params[i];
      params[i] = saved + step;
      double up = mean_loss();
      params[i] = saved - step;
      double down = mean_loss();
      params[i] = saved;
      double numeric = (up - down) / (2.0 * step);
      double denom = std::max({1e-8, std::abs(numeric), std::abs(analytic[i])});
      max_rel = std::max(max_rel, std::abs(numeric - analytic[i]) / denom);
    }
  };
  check_param(head.weights(), grad_w);
  check_param(head.bias(), grad_b);
  return max_rel;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline constexpr int kHeadSchemaVersion = 1;

inline jsonx::Json head_to_json(const LinearHead& head, const TrainingConfig& cfg,
                                const std::vector<double>& loss_history) {
  jsonx::Json j;
  j["schema_version"] = kHeadSchemaVersion;
  j["d_base"] = head.d_base();
  j["d_out"] = head.d_out();
  j["w"] = head.weights();
  j["bias"] = head.bias();
  j["config"] = {{"epochs", cfg.epochs},           {"learning_rate", cfg.learning_rate},
                 {"margin", cfg.margin},           {"weight_decay", cfg.weight_decay},
                 {"beta1", cfg.beta1},             {"beta2", cfg.beta2},
                 {"epsilon", cfg.epsilon},         {"batch_size", cfg.batch_size},
                 {"seed", cfg.seed}};
  j["loss_history"] = loss_history;
  return j;
}

struct SavedHead {
  LinearHead head;
  TrainingConfig config;
  std::vector<double> loss_history;
};

inline SavedHead head_from_json(const jsonx::Json& j) {
  jsonx::require_schema_version<MalformedCorpus>(j, kHeadSchemaVersion, "head record");
  SavedHead out;
  auto d_base = static_cast<std::size_t>(jsonx::require_int<MalformedCorpus>(j, "d_base", "head"));
  auto d_out = static_cast<std::size_t>(jsonx::require_int<MalformedCorpus>(j, "d_out", "head"));
  out.head = LinearHead(d_base, d_out, 0);
  out.head.weights() = j.at("w").get<std::vector<double>>();
  out.head.bias() = j.at("bias").get<std::vector<double>>();
  if (out.head.weights().size() != d_base * d_out || out.head.bias().size() != d_out)
    throw MalformedCorpus("head record: parameter sizes do not match dimensions");
  const auto& cfg = jsonx::require<MalformedCorpus>(j, "config", "head");
  out.config.epochs = static_cast<int>(jsonx::require_int<MalformedCorpus>(cfg, "epochs", "head.config"));
  out.config.learning_rate = jsonx::require_number<MalformedCorpus>(cfg, "learning_rate", "head.config");
  out.config.margin = jsonx::require_number<MalformedCorpus>(cfg, "margin", "head.config");
  out.config.weight_decay = jsonx::require_number<MalformedCorpus>(cfg, "weight_decay", "head.config");
  out.config.beta1 = jsonx::require_number<MalformedCorpus>(cfg, "beta1", "head.config");
  out.config.beta2 = jsonx::require_number<MalformedCorpus>(cfg, "beta2", "head.config");
  out.config.epsilon = jsonx::require_number<MalformedCorpus>(cfg, "epsilon", "head.config");
  out.config.batch_size = static_cast<int>(jsonx::require_int<MalformedCorpus>(cfg, "batch_size", "head.config"));
  out.config.seed = static_cast<unsigned>(jsonx::require_int<MalformedCorpus>(cfg, "seed", "head.config"));
  out.loss_history = j.at("loss_history").get<std::vector<double>>();
  return out;
}

// Simple fingerprint-keyed store for embeddings, saved as one JSON file.
class EmbeddingCache {
 public:
  std::optional<std::vector<double>> find(const std::string& fingerprint) const {
    auto it = entries_.find(fingerprint);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& fingerprint, std::vector<double> values) {
    entries_[fingerprint] = std::move(values);
  }

  const std::vector<double>& get_or_compute(const EmbeddingBackend& backend,
                                            const std::string& text) {
    std::string fp = util::fnv1a_hex(text + '\x1f' + backend.backend_id() + '\x1f' +
                                     backend.head_version());
    auto it = entries_.find(fp);
    if (it == entries_.end()) it = entries_.emplace(fp, backend.embed(text).values).first;
    return it->second;
  }

  std::size_t size() const { return entries_.size(); }

  void save(const std::filesystem::path& path) const {
    jsonx::Json j;
    j["schema_version"] = 1;
    j["entries"] = jsonx::Json::object();
    for (const auto& [fp, values] : entries_) j["entries"][fp] = values;
    util::write_file(path, j.dump(2) + "\n");
  }

  static EmbeddingCache load(const std::filesystem::path& path) {
    EmbeddingCache cache;
    jsonx::Json j = jsonx::parse<MalformedCorpus>(util::read_file(path), "embedding cache");
    jsonx::require_schema_version<MalformedCorpus>(j, 1, "embedding cache");
    for (const auto& [fp, values] : j.at("entries").items())
      cache.entries_[fp] = values.get<std::vector<double>>();
    return cache;
  }

 private:
  std::map<std::string, std::vector<double>> entries_;
};

}  // namespace lexalign
