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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "localeq/rng.hpp"
#include "localeq/tokenizer.hpp"

namespace localeq {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

struct EncoderConfig {
  std::size_t d_model = 32;
  std::size_t n_layers = 2;
  std::size_t n_heads = 4;
  std::size_t d_ff = 64;
  std::size_t max_len = 24;
  std::size_t n_buckets = 2048;
  std::size_t n_locales = 1;
  double dropout_rate = 0.001;

  void validate() const;
  std::size_t vocab_total() const { return kFirstLocaleToken + n_locales + n_buckets; }
  bool operator==(const EncoderConfig&) const = default;
};

struct ParameterTensor {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<double> gradient;

  std::size_t size() const { return values.size(); }
  void zero_grad() { std::fill(gradient.begin(), gradient.end(), 0.0); }
};

// Gradient buffers laid out like a parameter list; one per worker shard.
using GradientSet = std::vector<std::vector<double>>;

GradientSet make_gradient_set(std::span<const ParameterTensor> params);
void zero(GradientSet& g);

// Activations retained by a forward pass for the matching backward pass.
struct LayerCache {
  Matrix x_in;
  Matrix ln1_hat;
  Vector ln1_rstd;
  Matrix h1;
  Matrix q, k, v;
  std::vector<Matrix> attn;  // per head, rows sum to 1
  Matrix ctx;
  Matrix attn_drop;          // empty when dropout is off
  Matrix x_mid;
  Matrix ln2_hat;
  Vector ln2_rstd;
  Matrix h2;
  Matrix ff_pre;
  Matrix ff_act;
  Matrix ff_drop;
};

struct ForwardCache {
  std::vector<std::uint32_t> ids;
  Matrix emb_drop;
  std::vector<LayerCache> layers;
  Matrix final_in;
  Matrix final_hat;
  Vector final_rstd;
  bool valid = false;
};

// Pre-layer-norm transformer encoder pooled at the CLS position.
class Encoder {
 public:
  Encoder() = default;
  // Weights from N(0, 0.02), biases 0, layer-norm gains 1.
  Encoder(const EncoderConfig& config, Rng& rng);

  const EncoderConfig& config() const { return config_; }
  void set_dropout_rate(double rate) { config_.dropout_rate = rate; }
  std::vector<ParameterTensor>& params() { return params_; }
  const std::vector<ParameterTensor>& params() const { return params_; }
  std::size_t n_parameters() const;

  // Single sequence. `dropout_rng` is only used when train_mode is set.
  RowVector forward(const TokenSequence& seq, bool train_mode, Rng* dropout_rng, ForwardCache& cache) const;

  // Adds d(loss)/d(params) for one sequence given d(loss)/d(pooled).
  void backward(const ForwardCache& cache, const RowVector& d_pooled, GradientSet& grads) const;
  void backward(const ForwardCache& cache, const RowVector& d_pooled);

  // Batch of sequences; row i of the result is the pooled vector of seqs[i].
  // Example i draws dropout from a stream derived from (dropout_seed, i).
  Matrix encode(std::span<const TokenSequence> seqs, bool train_mode, std::uint64_t dropout_seed,
                std::vector<ForwardCache>* caches = nullptr) const;
  void backward(std::span<const ForwardCache> caches, const Matrix& d_pooled);

  void zero_grad();

 private:
  enum LayerParam : std::size_t {
    kLn1G, kLn1B, kWq, kBq, kWk, kBk, kWv, kBv, kWo, kBo, kLn2G, kLn2B, kW1, kB1, kW2, kB2, kPerLayer
  };
  std::size_t layer_param(std::size_t layer, LayerParam p) const { return 2 + layer * kPerLayer + p; }
  std::size_t final_gain() const { return 2 + config_.n_layers * kPerLayer; }

  EncoderConfig config_;
  std::vector<ParameterTensor> params_;
};

// Softmax of each row in place, ignoring columns whose mask entry is false.
void masked_softmax_rows(Matrix& scores, const std::vector<bool>& key_mask);

// Layer norm without affine terms; returns normalized rows and 1/std per row.
Matrix layer_norm_hat(const Matrix& x, Vector& rstd);

}  // namespace localeq
