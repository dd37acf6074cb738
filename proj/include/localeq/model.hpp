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

#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "localeq/core.hpp"
#include "localeq/encoder.hpp"
#include "localeq/tokenizer.hpp"

namespace localeq {

enum class VariantKind { kNonUnified, kUnifiedAgnostic, kUnifiedAware, kDisjointPerLocale };

// CLI spellings: noncons, cons-agnostic, cons-aware, disjoint.
std::string_view to_string(VariantKind v);
VariantKind parse_variant(std::string_view s);

struct ClassifierHead {
  ParameterTensor weight;  // d_model x P
  ParameterTensor bias;    // 1 x P
};

struct TrainConfig {
  double learning_rate = 8e-5;
  double dropout = 0.001;
  std::size_t batch_size = 256;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t max_epochs = 20;
  std::size_t patience = 3;
  std::uint64_t seed = 7;
  std::size_t threads = 1;

  void validate() const;
};

struct TrainingMetadata {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double final_val_loss = std::numeric_limits<double>::quiet_NaN();
};

// Encoder(s), classifier head(s), registries and tokenizer settings. The
// unified variants hold one encoder and one head; NonUnified holds one head
// per locale over a shared encoder; DisjointPerLocale holds one of each per
// locale.
struct ModelBundle {
  VariantKind variant = VariantKind::kUnifiedAgnostic;
  EncoderConfig encoder_config;
  std::vector<Encoder> encoders;
  std::vector<ClassifierHead> heads;
  LocaleRegistry locales;
  PtRegistry pts;
  TrainingMetadata metadata;

  // Fresh bundle. Encoders are initialized before heads, in locale order.
  static ModelBundle create(VariantKind variant, EncoderConfig config, LocaleRegistry locales, PtRegistry pts,
                            std::uint64_t seed);

  Tokenizer tokenizer() const;
  std::size_t n_pts() const { return pts.size(); }
  std::size_t n_parameters() const;
  bool per_locale_heads() const {
    return variant == VariantKind::kNonUnified || variant == VariantKind::kDisjointPerLocale;
  }

  // Every trainable tensor in checkpoint order: encoders, then heads.
  std::vector<ParameterTensor*> parameter_list();
  std::vector<const ParameterTensor*> parameter_list() const;
};

// Tokens plus the encoder and head that serve one (query, locale) row.
struct PreparedInput {
  TokenSequence tokens;
  std::size_t encoder = 0;
  std::size_t head = 0;
  bool locale_known = true;
};

// Throws DataError("no head for locale ...") for per-locale variants when the
// locale is unknown; the locale-aware variant falls back to the reserved
// unknown-locale token.
PreparedInput prepare_input(const ModelBundle& bundle, std::string_view query, std::string_view locale_code);
PreparedInput prepare_input(const ModelBundle& bundle, std::string_view query, LocaleId locale);

struct QueryInput {
  std::string query;
  std::string locale;
};

struct ScoreBatch {
  Matrix scores;  // rows x P, sigmoid outputs
  std::vector<bool> locale_known;
};

ScoreBatch forward_scores(const ModelBundle& bundle, std::span<const QueryInput> batch, bool train_mode = false,
                          std::uint64_t dropout_seed = 0);

// Eval-mode scores for prepared rows; parallel over rows.
Matrix score_prepared(const ModelBundle& bundle, std::span<const PreparedInput> rows, std::size_t threads = 1);
Matrix score_dataset(const ModelBundle& bundle, const Dataset& data, std::size_t threads = 1);

struct TrainResult {
  std::vector<double> train_loss;  // mean BCE per epoch
  std::vector<double> val_loss;
  std::size_t best_epoch = 0;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ProgressFn = std::function<void(std::size_t epoch, double train_loss, double val_loss)>;

// Mean multi-label BCE-with-logits, Adam, seeded per-epoch shuffles, early
// stopping on validation loss. Leaves the best-validation parameters in the
// bundle. Gradients are accumulated in a fixed number of shards and reduced
// in shard order, so results do not depend on `threads`.
TrainResult train(ModelBundle& bundle, const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                  const ProgressFn& progress = {});

// Mean BCE over all (example, PT) pairs in eval mode.
double evaluate_loss(const ModelBundle& bundle, const Dataset& data, std::size_t threads = 1);

struct ScoredPt {
  ProductTypeId pt;
  double score = 0.0;
};

struct Prediction {
  std::vector<ScoredPt> product_types;  // score >= threshold, descending
  bool locale_known = true;
  bool refused() const { return product_types.empty(); }
};

Prediction predict(const ModelBundle& bundle, std::string_view query, std::string_view locale, double threshold);

double sigmoid(double z);
// max(z, 0) - z * y + log(1 + exp(-|z|))
double bce_with_logits(double z, double y);

}  // namespace localeq
