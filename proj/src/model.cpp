// Copyright 2026 The localeq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "localeq/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "localeq/parallel.hpp"

namespace localeq {
namespace {

constexpr std::size_t kShards = 8;
constexpr std::uint64_t kShuffleStream = 0x5u;
constexpr std::uint64_t kDropoutStream = 0xD0u;

using ConstMap = Eigen::Map<const Matrix>;
using ConstRowMap = Eigen::Map<const RowVector>;

ParameterTensor head_tensor(std::string name, std::size_t rows, std::size_t cols) {
  ParameterTensor t;
  t.name = std::move(name);
  t.rows = rows;
  t.cols = cols;
  t.values.assign(rows * cols, 0.0);
  t.gradient.assign(rows * cols, 0.0);
  return t;
}

RowVector head_logits(const ClassifierHead& head, const RowVector& pooled) {
  const ConstMap w(head.weight.values.data(), static_cast<Eigen::Index>(head.weight.rows),
                   static_cast<Eigen::Index>(head.weight.cols));
  const ConstRowMap b(head.bias.values.data(), static_cast<Eigen::Index>(head.bias.size()));
  return pooled * w + b;
}

// Logits for prepared rows in eval mode.
Matrix logits_prepared(const ModelBundle& bundle, std::span<const PreparedInput> rows, std::size_t threads) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(bundle.n_pts()));
  const std::size_t blocks = std::min<std::size_t>(rows.size(), std::max<std::size_t>(threads, 1) * 4);
  parallel_for(blocks, threads, [&](std::size_t blk) {
    const std::size_t begin = rows.size() * blk / blocks;
    const std::size_t end = rows.size() * (blk + 1) / blocks;
    ForwardCache cache;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = rows[i];
      const RowVector pooled = bundle.encoders[r.encoder].forward(r.tokens, false, nullptr, cache);
      out.row(static_cast<Eigen::Index>(i)) = head_logits(bundle.heads[r.head], pooled);
    }
  });
  return out;
}

std::vector<PreparedInput> prepare_dataset(const ModelBundle& bundle, const Dataset& data) {
  std::vector<PreparedInput> rows;
  rows.reserve(data.size());
  for (const auto& ex : data.examples()) rows.push_back(prepare_input(bundle, ex.query, ex.locale));
  return rows;
}

// Dense 0/1 target row.
std::vector<double> target_row(const LabeledExample& ex, std::size_t n_pts) {
  std::vector<double> y(n_pts, 0.0);
  for (auto pt : ex.labels) {
    if (pt.index >= n_pts) throw DataError("label index out of range for model");
    y[pt.index] = 1.0;
  }
  return y;
}

double mean_bce(const Matrix& logits, const Dataset& data) {
  if (data.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto n_pts = static_cast<std::size_t>(logits.cols());
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto y = target_row(data.examples()[i], n_pts);
    for (std::size_t p = 0; p < n_pts; ++p)
      total += bce_with_logits(logits(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)), y[p]);
  }
  return total / (static_cast<double>(data.size()) * static_cast<double>(n_pts));
}

// Gradient buffers for one shard, allocated when first touched.
struct ShardGrads {
  std::vector<std::optional<GradientSet>> encoders;
  std::vector<std::optional<GradientSet>> heads;
  std::vector<bool> encoder_touched;
  std::vector<bool> head_touched;
  double loss = 0.0;

  GradientSet& encoder(const ModelBundle& b, std::size_t i) {
    if (!encoders[i]) encoders[i] = make_gradient_set(b.encoders[i].params());
    else if (!encoder_touched[i]) zero(*encoders[i]);
    encoder_touched[i] = true;
    return *encoders[i];
  }
  GradientSet& head(const ModelBundle& b, std::size_t i) {
    if (!heads[i]) heads[i] = GradientSet{std::vector<double>(b.heads[i].weight.size()),
                                          std::vector<double>(b.heads[i].bias.size())};
    else if (!head_touched[i]) zero(*heads[i]);
    head_touched[i] = true;
    return *heads[i];
  }
  void reset() {
    std::fill(encoder_touched.begin(), encoder_touched.end(), false);
    std::fill(head_touched.begin(), head_touched.end(), false);
    loss = 0.0;
  }
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::vector<std::uint64_t> steps;  // per tensor
};

}  // namespace

std::string_view to_string(VariantKind v) {
  switch (v) {
    case VariantKind::kNonUnified: return "noncons";
    case VariantKind::kUnifiedAgnostic: return "cons-agnostic";
    case VariantKind::kUnifiedAware: return "cons-aware";
    case VariantKind::kDisjointPerLocale: return "disjoint";
  }
  return "?";
}

VariantKind parse_variant(std::string_view s) {
  if (s == "noncons") return VariantKind::kNonUnified;
  if (s == "cons-agnostic") return VariantKind::kUnifiedAgnostic;
  if (s == "cons-aware") return VariantKind::kUnifiedAware;
  if (s == "disjoint") return VariantKind::kDisjointPerLocale;
  throw std::invalid_argument("unknown variant '" + std::string(s) +
                              "' (expected noncons, cons-agnostic, cons-aware or disjoint)");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0, 1)");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("Adam betas must be in [0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (max_epochs == 0) throw std::invalid_argument("max_epochs must be >= 1");
  if (patience == 0) throw std::invalid_argument("patience must be >= 1");
}

ModelBundle ModelBundle::create(VariantKind variant, EncoderConfig config, LocaleRegistry locales, PtRegistry pts,
                                std::uint64_t seed) {
  if (locales.size() == 0) throw std::invalid_argument("model needs at least one locale");
  if (pts.size() == 0) throw std::invalid_argument("model needs at least one product type");
  config.n_locales = locales.size();
  config.validate();

  ModelBundle b;
  b.variant = variant;
  b.encoder_config = config;
  b.locales = std::move(locales);
  b.pts = std::move(pts);
  b.locales.freeze();
  b.pts.freeze();

  Rng rng(seed);
  const std::size_t n_enc = variant == VariantKind::kDisjointPerLocale ? b.locales.size() : 1;
  for (std::size_t i = 0; i < n_enc; ++i) b.encoders.emplace_back(config, rng);
  const std::size_t n_heads = b.per_locale_heads() ? b.locales.size() : 1;
  for (std::size_t h = 0; h < n_heads; ++h) {
    ClassifierHead head;
    const std::string prefix = "head." + std::to_string(h);
    head.weight = head_tensor(prefix + ".weight", config.d_model, b.pts.size());
    head.bias = head_tensor(prefix + ".bias", 1, b.pts.size());
    for (auto& w : head.weight.values) w = 0.02 * rng.normal();
    b.heads.push_back(std::move(head));
  }
  return b;
}

Tokenizer ModelBundle::tokenizer() const {
  return Tokenizer(encoder_config.n_locales, encoder_config.n_buckets, encoder_config.max_len);
}

std::size_t ModelBundle::n_parameters() const {
  std::size_t n = 0;
  for (const auto* p : parameter_list()) n += p->size();
  return n;
}

std::vector<ParameterTensor*> ModelBundle::parameter_list() {
  std::vector<ParameterTensor*> out;
  for (auto& e : encoders)
    for (auto& p : e.params()) out.push_back(&p);
  for (auto& h : heads) {
    out.push_back(&h.weight);
    out.push_back(&h.bias);
  }
  return out;
}

std::vector<const ParameterTensor*> ModelBundle::parameter_list() const {
  std::vector<const ParameterTensor*> out;
  for (const auto& e : encoders)
    for (const auto& p : e.params()) out.push_back(&p);
  for (const auto& h : heads) {
    out.push_back(&h.weight);
    out.push_back(&h.bias);
  }
  return out;
}

PreparedInput prepare_input(const ModelBundle& bundle, std::string_view query, LocaleId locale) {
  if (locale.index >= bundle.locales.size()) throw DataError("locale index out of range for model");
  PreparedInput in;
  const Tokenizer tok = bundle.tokenizer();
  switch (bundle.variant) {
    case VariantKind::kUnifiedAgnostic:
      in.tokens = tok.tokenize(query, std::nullopt);
      break;
    case VariantKind::kUnifiedAware:
      in.tokens = tok.tokenize(query, locale);
      break;
    case VariantKind::kNonUnified:
      in.tokens = tok.tokenize(query, std::nullopt);
      in.head = locale.index;
      break;
    case VariantKind::kDisjointPerLocale:
      in.tokens = tok.tokenize(query, std::nullopt);
      in.head = locale.index;
      in.encoder = locale.index;
      break;
  }
  return in;
}

PreparedInput prepare_input(const ModelBundle& bundle, std::string_view query, std::string_view locale_code) {
  if (auto l = bundle.locales.find(locale_code)) return prepare_input(bundle, query, *l);
  if (bundle.per_locale_heads())
    throw DataError("no head for locale '" + std::string(locale_code) + "'");
  PreparedInput in;
  const Tokenizer tok = bundle.tokenizer();
  in.tokens = bundle.variant == VariantKind::kUnifiedAware ? tok.tokenize_unknown_locale(query)
                                                           : tok.tokenize(query, std::nullopt);
  in.locale_known = false;
  return in;
}

ScoreBatch forward_scores(const ModelBundle& bundle, std::span<const QueryInput> batch, bool train_mode,
                          std::uint64_t dropout_seed) {
  ScoreBatch out;
  out.scores.resize(static_cast<Eigen::Index>(batch.size()), static_cast<Eigen::Index>(bundle.n_pts()));
  ForwardCache cache;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto in = prepare_input(bundle, batch[i].query, batch[i].locale);
    Rng rng(derive_seed(dropout_seed, i));
    const RowVector pooled = bundle.encoders[in.encoder].forward(in.tokens, train_mode, &rng, cache);
    out.scores.row(static_cast<Eigen::Index>(i)) = head_logits(bundle.heads[in.head], pooled).unaryExpr(&sigmoid);
    out.locale_known.push_back(in.locale_known);
  }
  return out;
}

Matrix score_prepared(const ModelBundle& bundle, std::span<const PreparedInput> rows, std::size_t threads) {
  return logits_prepared(bundle, rows, threads).unaryExpr(&sigmoid);
}

Matrix score_dataset(const ModelBundle& bundle, const Dataset& data, std::size_t threads) {
  const auto rows = prepare_dataset(bundle, data);
  return score_prepared(bundle, rows, threads);
}

double evaluate_loss(const ModelBundle& bundle, const Dataset& data, std::size_t threads) {
  const auto rows = prepare_dataset(bundle, data);
  return mean_bce(logits_prepared(bundle, rows, threads), data);
}

TrainResult train(ModelBundle& bundle, const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                  const ProgressFn& progress) {
  cfg.validate();
  if (train_set.empty()) throw DataError("training set is empty");
  for (auto& e : bundle.encoders) e.set_dropout_rate(cfg.dropout);

  const std::size_t n_pts = bundle.n_pts();
  const auto rows = prepare_dataset(bundle, train_set);
  const auto val_rows = prepare_dataset(bundle, val_set);
  std::vector<std::vector<double>> targets;
  targets.reserve(train_set.size());
  for (const auto& ex : train_set.examples()) targets.push_back(target_row(ex, n_pts));

  auto params = bundle.parameter_list();
  AdamState adam;
  for (const auto* p : params) {
    adam.m.emplace_back(p->size(), 0.0);
    adam.v.emplace_back(p->size(), 0.0);
    adam.steps.push_back(0);
  }
  // Offsets of each encoder / head inside `params`.
  std::vector<std::size_t> enc_offset, head_offset;
  {
    std::size_t off = 0;
    for (const auto& e : bundle.encoders) {
      enc_offset.push_back(off);
      off += e.params().size();
    }
    for (std::size_t h = 0; h < bundle.heads.size(); ++h) head_offset.push_back(off + 2 * h);
  }

  std::vector<ShardGrads> shards(kShards);
  for (auto& s : shards) {
    s.encoders.resize(bundle.encoders.size());
    s.heads.resize(bundle.heads.size());
    s.encoder_touched.assign(bundle.encoders.size(), false);
    s.head_touched.assign(bundle.heads.size(), false);
  }

  TrainResult result;
  std::vector<std::vector<double>> best;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<std::size_t> order(rows.size());
  std::vector<std::vector<double>> grad_sum(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) grad_sum[k].assign(params[k]->size(), 0.0);
  std::vector<bool> param_touched(params.size());

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream, epoch));
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const std::size_t n = stop - start;
      const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n_pts));

      parallel_for(kShards, cfg.threads, [&](std::size_t s) {
        auto& sh = shards[s];
        sh.reset();
        ForwardCache cache;
        const std::size_t b0 = start + n * s / kShards;
        const std::size_t b1 = start + n * (s + 1) / kShards;
        for (std::size_t pos = b0; pos < b1; ++pos) {
          const std::size_t idx = order[pos];
          const auto& in = rows[idx];
          const auto& y = targets[idx];
          Rng drop(derive_seed(cfg.seed, kDropoutStream, epoch, pos));
          const auto& enc = bundle.encoders[in.encoder];
          const auto& head = bundle.heads[in.head];
          const RowVector pooled = enc.forward(in.tokens, true, &drop, cache);
          const RowVector z = head_logits(head, pooled);
          RowVector dz(z.size());
          for (Eigen::Index p = 0; p < z.size(); ++p) {
            sh.loss += bce_with_logits(z(p), y[static_cast<std::size_t>(p)]);
            dz(p) = (sigmoid(z(p)) - y[static_cast<std::size_t>(p)]) * scale;
          }
          auto& hg = sh.head(bundle, in.head);
          Eigen::Map<Matrix> dw(hg[0].data(), static_cast<Eigen::Index>(head.weight.rows),
                                static_cast<Eigen::Index>(head.weight.cols));
          dw.noalias() += pooled.transpose() * dz;
          Eigen::Map<RowVector>(hg[1].data(), dz.size()) += dz;
          const ConstMap w(head.weight.values.data(), static_cast<Eigen::Index>(head.weight.rows),
                           static_cast<Eigen::Index>(head.weight.cols));
          const RowVector d_pooled = dz * w.transpose();
          enc.backward(cache, d_pooled, sh.encoder(bundle, in.encoder));
        }
      });

      // Reduce in shard order.
      std::fill(param_touched.begin(), param_touched.end(), false);
      double batch_loss = 0.0;
      for (auto& sh : shards) {
        batch_loss += sh.loss;
        for (std::size_t e = 0; e < sh.encoders.size(); ++e) {
          if (!sh.encoder_touched[e]) continue;
          for (std::size_t k = 0; k < sh.encoders[e]->size(); ++k) {
            auto& dst = grad_sum[enc_offset[e] + k];
            if (!param_touched[enc_offset[e] + k]) {
              std::fill(dst.begin(), dst.end(), 0.0);
              param_touched[enc_offset[e] + k] = true;
            }
            const auto& src = (*sh.encoders[e])[k];
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
          }
        }
        for (std::size_t h = 0; h < sh.heads.size(); ++h) {
          if (!sh.head_touched[h]) continue;
          for (std::size_t k = 0; k < 2; ++k) {
            auto& dst = grad_sum[head_offset[h] + k];
            if (!param_touched[head_offset[h] + k]) {
              std::fill(dst.begin(), dst.end(), 0.0);
              param_touched[head_offset[h] + k] = true;
            }
            const auto& src = (*sh.heads[h])[k];
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
          }
        }
      }
      if (!std::isfinite(batch_loss))
        throw TrainingError("training loss became non-finite in epoch " + std::to_string(epoch + 1) +
                            "; lower the learning rate (currently " + std::to_string(cfg.learning_rate) + ")");
      epoch_loss += batch_loss;

      // Adam. Tensors without a gradient in this batch (heads of locales not
      // present) are left untouched, moments included.
      for (std::size_t k = 0; k < params.size(); ++k) {
        if (!param_touched[k]) continue;
        const auto step = static_cast<double>(++adam.steps[k]);
        const double bc1 = 1.0 - std::pow(cfg.beta1, step);
        const double bc2 = 1.0 - std::pow(cfg.beta2, step);
        auto& vals = params[k]->values;
        auto& m = adam.m[k];
        auto& v = adam.v[k];
        const auto& g = grad_sum[k];
        for (std::size_t i = 0; i < vals.size(); ++i) {
          m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
          v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
          vals[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.epsilon);
        }
      }
    }

    const double train_loss = epoch_loss / (static_cast<double>(rows.size()) * static_cast<double>(n_pts));
    const double val_loss =
        val_rows.empty() ? train_loss : mean_bce(logits_prepared(bundle, val_rows, cfg.threads), val_set);
    result.train_loss.push_back(train_loss);
    result.val_loss.push_back(val_loss);
    if (progress) progress(epoch + 1, train_loss, val_loss);
    if (!std::isfinite(val_loss))
      throw TrainingError("validation loss became non-finite; lower the learning rate");

    if (val_loss < best_val) {
      best_val = val_loss;
      result.best_epoch = epoch + 1;
      since_best = 0;
      best.clear();
      for (const auto* p : params) best.push_back(p->values);
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }

  for (std::size_t k = 0; k < params.size(); ++k) params[k]->values = best[k];
  bundle.metadata.epochs_run = result.train_loss.size();
  bundle.metadata.best_epoch = result.best_epoch;
  bundle.metadata.final_val_loss = best_val;
  return result;
}

Prediction predict(const ModelBundle& bundle, std::string_view query, std::string_view locale, double threshold) {
  const auto in = prepare_input(bundle, query, locale);
  ForwardCache cache;
  const RowVector pooled = bundle.encoders[in.encoder].forward(in.tokens, false, nullptr, cache);
  const RowVector z = head_logits(bundle.heads[in.head], pooled);
  Prediction out;
  out.locale_known = in.locale_known;
  for (Eigen::Index p = 0; p < z.size(); ++p) {
    const double s = sigmoid(z(p));
    if (s >= threshold) out.product_types.push_back({ProductTypeId{static_cast<std::uint32_t>(p)}, s});
  }
  std::stable_sort(out.product_types.begin(), out.product_types.end(),
                   [](const ScoredPt& a, const ScoredPt& b) { return a.score > b.score; });
  return out;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_with_logits(double z, double y) { return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z))); }

}  // namespace localeq
