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

#include "localeq/encoder.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace localeq {
namespace {

using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;
using ConstRowMap = Eigen::Map<const RowVector>;
using MutRowMap = Eigen::Map<RowVector>;

constexpr double kLayerNormEps = 1e-12;
constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;
const double kInvSqrt2Pi = std::numbers::inv_sqrtpi * kInvSqrt2;

ConstMap as_matrix(const ParameterTensor& p) {
  return ConstMap(p.values.data(), static_cast<Eigen::Index>(p.rows), static_cast<Eigen::Index>(p.cols));
}
ConstRowMap as_row(const ParameterTensor& p) {
  return ConstRowMap(p.values.data(), static_cast<Eigen::Index>(p.size()));
}
MutMap grad_matrix(std::vector<double>& g, const ParameterTensor& p) {
  return MutMap(g.data(), static_cast<Eigen::Index>(p.rows), static_cast<Eigen::Index>(p.cols));
}
MutRowMap grad_row(std::vector<double>& g) { return MutRowMap(g.data(), static_cast<Eigen::Index>(g.size())); }

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_grad(double x) {
  return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  Matrix m(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform() < rate ? 0.0 : keep_scale;
  return m;
}

Matrix affine(const Matrix& hat, const ParameterTensor& gain, const ParameterTensor& bias) {
  return ((hat.array().rowwise() * as_row(gain).array()).rowwise() + as_row(bias).array()).matrix();
}

Matrix linear(const Matrix& x, const ParameterTensor& w, const ParameterTensor& b) {
  Matrix y = x * as_matrix(w);
  y.rowwise() += as_row(b);
  return y;
}

// d(loss)/d(x) for rows normalized as xhat = (x - mean) * rstd.
Matrix layer_norm_backward(const Matrix& hat, const Vector& rstd, const Matrix& d_hat) {
  const double inv_d = 1.0 / static_cast<double>(hat.cols());
  Matrix dx(hat.rows(), hat.cols());
  for (Eigen::Index i = 0; i < hat.rows(); ++i) {
    const double m1 = d_hat.row(i).sum() * inv_d;
    const double m2 = d_hat.row(i).dot(hat.row(i)) * inv_d;
    dx.row(i) = rstd(i) * (d_hat.row(i).array() - m1 - hat.row(i).array() * m2).matrix();
  }
  return dx;
}

ParameterTensor make_param(std::string name, std::size_t rows, std::size_t cols) {
  ParameterTensor p;
  p.name = std::move(name);
  p.rows = rows;
  p.cols = cols;
  p.values.assign(rows * cols, 0.0);
  p.gradient.assign(rows * cols, 0.0);
  return p;
}

}  // namespace

void EncoderConfig::validate() const {
  if (d_model == 0 || n_layers == 0 || n_heads == 0 || d_ff == 0 || n_buckets == 0)
    throw std::invalid_argument("encoder config: sizes must be positive");
  if (d_model % n_heads != 0) throw std::invalid_argument("encoder config: d_model must be divisible by n_heads");
  if (max_len < 3) throw std::invalid_argument("encoder config: max_len must be >= 3");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw std::invalid_argument("encoder config: dropout_rate must be in [0, 1)");
}

GradientSet make_gradient_set(std::span<const ParameterTensor> params) {
  GradientSet g;
  g.reserve(params.size());
  for (const auto& p : params) g.emplace_back(p.size(), 0.0);
  return g;
}

void zero(GradientSet& g) {
  for (auto& v : g) std::fill(v.begin(), v.end(), 0.0);
}

void masked_softmax_rows(Matrix& scores, const std::vector<bool>& key_mask) {
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < scores.cols(); ++j)
      if (key_mask[static_cast<std::size_t>(j)]) mx = std::max(mx, scores(i, j));
    double sum = 0.0;
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      const double e = key_mask[static_cast<std::size_t>(j)] ? std::exp(scores(i, j) - mx) : 0.0;
      scores(i, j) = e;
      sum += e;
    }
    scores.row(i) /= sum;
  }
}

Matrix layer_norm_hat(const Matrix& x, Vector& rstd) {
  const double inv_d = 1.0 / static_cast<double>(x.cols());
  Matrix hat(x.rows(), x.cols());
  rstd.resize(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double mean = x.row(i).sum() * inv_d;
    const RowVector centered = x.row(i).array() - mean;
    const double var = centered.squaredNorm() * inv_d;
    rstd(i) = 1.0 / std::sqrt(var + kLayerNormEps);
    hat.row(i) = centered * rstd(i);
  }
  return hat;
}

Encoder::Encoder(const EncoderConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  const auto d = config_.d_model;
  const auto ff = config_.d_ff;
  params_.push_back(make_param("token_embedding", config_.vocab_total(), d));
  params_.push_back(make_param("position_embedding", config_.max_len, d));
  for (std::size_t l = 0; l < config_.n_layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    params_.push_back(make_param(pre + "ln1.gain", 1, d));
    params_.push_back(make_param(pre + "ln1.bias", 1, d));
    params_.push_back(make_param(pre + "attn.wq", d, d));
    params_.push_back(make_param(pre + "attn.bq", 1, d));
    params_.push_back(make_param(pre + "attn.wk", d, d));
    params_.push_back(make_param(pre + "attn.bk", 1, d));
    params_.push_back(make_param(pre + "attn.wv", d, d));
    params_.push_back(make_param(pre + "attn.bv", 1, d));
    params_.push_back(make_param(pre + "attn.wo", d, d));
    params_.push_back(make_param(pre + "attn.bo", 1, d));
    params_.push_back(make_param(pre + "ln2.gain", 1, d));
    params_.push_back(make_param(pre + "ln2.bias", 1, d));
    params_.push_back(make_param(pre + "ff.w1", d, ff));
    params_.push_back(make_param(pre + "ff.b1", 1, ff));
    params_.push_back(make_param(pre + "ff.w2", ff, d));
    params_.push_back(make_param(pre + "ff.b2", 1, d));
  }
  params_.push_back(make_param("final_ln.gain", 1, d));
  params_.push_back(make_param("final_ln.bias", 1, d));

  for (auto& p : params_) {
    const bool is_gain = p.name.ends_with(".gain");
    const bool is_bias = p.rows == 1 && !is_gain;
    if (is_gain) std::fill(p.values.begin(), p.values.end(), 1.0);
    else if (!is_bias)
      for (auto& v : p.values) v = 0.02 * rng.normal();
  }
}

std::size_t Encoder::n_parameters() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

void Encoder::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

RowVector Encoder::forward(const TokenSequence& seq, bool train_mode, Rng* dropout_rng, ForwardCache& cache) const {
  const auto n = static_cast<Eigen::Index>(seq.ids.size());
  const auto d = static_cast<Eigen::Index>(config_.d_model);
  if (n == 0) throw std::invalid_argument("encoder: empty sequence");
  if (seq.ids.size() > config_.max_len) throw std::invalid_argument("encoder: sequence longer than max_len");
  for (auto id : seq.ids)
    if (id >= config_.vocab_total()) throw std::out_of_range("encoder: token id out of range");
  const bool drop = train_mode && config_.dropout_rate > 0.0;
  if (drop && dropout_rng == nullptr) throw std::invalid_argument("encoder: dropout needs an rng");

  cache.valid = false;
  cache.ids = seq.ids;
  const auto tok = as_matrix(params_[0]);
  const auto pos = as_matrix(params_[1]);
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = tok.row(seq.ids[static_cast<std::size_t>(i)]) + pos.row(i);
  if (drop) {
    cache.emb_drop = dropout_mask(n, d, config_.dropout_rate, *dropout_rng);
    x = x.cwiseProduct(cache.emb_drop);
  } else {
    cache.emb_drop.resize(0, 0);
  }

  std::vector<bool> key_mask(seq.ids.size());
  for (std::size_t j = 0; j < seq.ids.size(); ++j) key_mask[j] = seq.ids[j] != kPadToken;

  const auto heads = static_cast<Eigen::Index>(config_.n_heads);
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  cache.layers.resize(config_.n_layers);
  for (std::size_t l = 0; l < config_.n_layers; ++l) {
    auto& lc = cache.layers[l];
    auto P = [&](LayerParam p) -> const ParameterTensor& { return params_[layer_param(l, p)]; };
    lc.x_in = x;
    lc.ln1_hat = layer_norm_hat(x, lc.ln1_rstd);
    lc.h1 = affine(lc.ln1_hat, P(kLn1G), P(kLn1B));
    lc.q = linear(lc.h1, P(kWq), P(kBq));
    lc.k = linear(lc.h1, P(kWk), P(kBk));
    lc.v = linear(lc.h1, P(kWv), P(kBv));
    lc.ctx.resize(n, d);
    lc.attn.resize(config_.n_heads);
    for (Eigen::Index h = 0; h < heads; ++h) {
      Matrix s = (lc.q.middleCols(h * dh, dh) * lc.k.middleCols(h * dh, dh).transpose()) * scale;
      masked_softmax_rows(s, key_mask);
      lc.ctx.middleCols(h * dh, dh) = s * lc.v.middleCols(h * dh, dh);
      lc.attn[static_cast<std::size_t>(h)] = std::move(s);
    }
    Matrix out = linear(lc.ctx, P(kWo), P(kBo));
    if (drop) {
      lc.attn_drop = dropout_mask(n, d, config_.dropout_rate, *dropout_rng);
      out = out.cwiseProduct(lc.attn_drop);
    } else {
      lc.attn_drop.resize(0, 0);
    }
    x += out;
    lc.x_mid = x;
    lc.ln2_hat = layer_norm_hat(x, lc.ln2_rstd);
    lc.h2 = affine(lc.ln2_hat, P(kLn2G), P(kLn2B));
    lc.ff_pre = linear(lc.h2, P(kW1), P(kB1));
    lc.ff_act = lc.ff_pre.unaryExpr(&gelu);
    Matrix f = linear(lc.ff_act, P(kW2), P(kB2));
    if (drop) {
      lc.ff_drop = dropout_mask(n, d, config_.dropout_rate, *dropout_rng);
      f = f.cwiseProduct(lc.ff_drop);
    } else {
      lc.ff_drop.resize(0, 0);
    }
    x += f;
  }
  cache.final_in = x;
  cache.final_hat = layer_norm_hat(x, cache.final_rstd);
  const auto& gain = params_[final_gain()];
  const auto& bias = params_[final_gain() + 1];
  RowVector pooled = cache.final_hat.row(0).cwiseProduct(as_row(gain)) + as_row(bias);
  cache.valid = true;
  return pooled;
}

void Encoder::backward(const ForwardCache& cache, const RowVector& d_pooled, GradientSet& grads) const {
  if (!cache.valid) throw std::logic_error("encoder: backward called without a matching forward pass");
  if (grads.size() != params_.size()) throw std::invalid_argument("encoder: gradient set does not match parameters");
  const auto n = static_cast<Eigen::Index>(cache.ids.size());
  const auto d = static_cast<Eigen::Index>(config_.d_model);

  const auto gi = final_gain();
  grad_row(grads[gi]) += d_pooled.cwiseProduct(cache.final_hat.row(0));
  grad_row(grads[gi + 1]) += d_pooled;
  Matrix dx = Matrix::Zero(n, d);
  {
    const Matrix d_hat = d_pooled.cwiseProduct(as_row(params_[gi]));
    Vector r(1);
    r(0) = cache.final_rstd(0);
    dx.row(0) = layer_norm_backward(cache.final_hat.topRows(1), r, d_hat).row(0);
  }

  const auto heads = static_cast<Eigen::Index>(config_.n_heads);
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  for (std::size_t li = config_.n_layers; li-- > 0;) {
    const auto& lc = cache.layers[li];
    auto idx = [&](LayerParam p) { return layer_param(li, p); };
    auto W = [&](LayerParam p) { return as_matrix(params_[idx(p)]); };

    // Feed-forward residual branch.
    Matrix df = lc.ff_drop.size() ? Matrix(dx.cwiseProduct(lc.ff_drop)) : dx;
    grad_matrix(grads[idx(kW2)], params_[idx(kW2)]).noalias() += lc.ff_act.transpose() * df;
    grad_row(grads[idx(kB2)]) += df.colwise().sum();
    Matrix d_pre = (df * W(kW2).transpose()).cwiseProduct(lc.ff_pre.unaryExpr(&gelu_grad));
    grad_matrix(grads[idx(kW1)], params_[idx(kW1)]).noalias() += lc.h2.transpose() * d_pre;
    grad_row(grads[idx(kB1)]) += d_pre.colwise().sum();
    Matrix dh2 = d_pre * W(kW1).transpose();
    grad_row(grads[idx(kLn2G)]) += dh2.cwiseProduct(lc.ln2_hat).colwise().sum();
    grad_row(grads[idx(kLn2B)]) += dh2.colwise().sum();
    dx += layer_norm_backward(lc.ln2_hat, lc.ln2_rstd, (dh2.array().rowwise() * as_row(params_[idx(kLn2G)]).array()).matrix());

    // Attention residual branch.
    Matrix d_out = lc.attn_drop.size() ? Matrix(dx.cwiseProduct(lc.attn_drop)) : dx;
    grad_matrix(grads[idx(kWo)], params_[idx(kWo)]).noalias() += lc.ctx.transpose() * d_out;
    grad_row(grads[idx(kBo)]) += d_out.colwise().sum();
    Matrix d_ctx = d_out * W(kWo).transpose();
    Matrix dq(n, d), dk(n, d), dv(n, d);
    for (Eigen::Index h = 0; h < heads; ++h) {
      const Matrix& a = lc.attn[static_cast<std::size_t>(h)];
      const auto dc = d_ctx.middleCols(h * dh, dh);
      dv.middleCols(h * dh, dh).noalias() = a.transpose() * dc;
      Matrix da = dc * lc.v.middleCols(h * dh, dh).transpose();
      const Vector row_dot = da.cwiseProduct(a).rowwise().sum();
      Matrix ds = a.cwiseProduct(Matrix(da.colwise() - row_dot)) * scale;
      dq.middleCols(h * dh, dh).noalias() = ds * lc.k.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh).noalias() = ds.transpose() * lc.q.middleCols(h * dh, dh);
    }
    grad_matrix(grads[idx(kWq)], params_[idx(kWq)]).noalias() += lc.h1.transpose() * dq;
    grad_matrix(grads[idx(kWk)], params_[idx(kWk)]).noalias() += lc.h1.transpose() * dk;
    grad_matrix(grads[idx(kWv)], params_[idx(kWv)]).noalias() += lc.h1.transpose() * dv;
    grad_row(grads[idx(kBq)]) += dq.colwise().sum();
    grad_row(grads[idx(kBk)]) += dk.colwise().sum();
    grad_row(grads[idx(kBv)]) += dv.colwise().sum();
    Matrix dh1 = dq * W(kWq).transpose() + dk * W(kWk).transpose() + dv * W(kWv).transpose();
    grad_row(grads[idx(kLn1G)]) += dh1.cwiseProduct(lc.ln1_hat).colwise().sum();
    grad_row(grads[idx(kLn1B)]) += dh1.colwise().sum();
    dx += layer_norm_backward(lc.ln1_hat, lc.ln1_rstd, (dh1.array().rowwise() * as_row(params_[idx(kLn1G)]).array()).matrix());
  }

  if (cache.emb_drop.size()) dx = dx.cwiseProduct(cache.emb_drop);
  auto g_tok = grad_matrix(grads[0], params_[0]);
  auto g_pos = grad_matrix(grads[1], params_[1]);
  for (Eigen::Index i = 0; i < n; ++i) {
    g_tok.row(cache.ids[static_cast<std::size_t>(i)]) += dx.row(i);
    g_pos.row(i) += dx.row(i);
  }
}

void Encoder::backward(const ForwardCache& cache, const RowVector& d_pooled) {
  auto grads = make_gradient_set(params_);
  backward(cache, d_pooled, grads);
  for (std::size_t p = 0; p < params_.size(); ++p)
    for (std::size_t i = 0; i < grads[p].size(); ++i) params_[p].gradient[i] += grads[p][i];
}

Matrix Encoder::encode(std::span<const TokenSequence> seqs, bool train_mode, std::uint64_t dropout_seed,
                       std::vector<ForwardCache>* caches) const {
  Matrix out(static_cast<Eigen::Index>(seqs.size()), static_cast<Eigen::Index>(config_.d_model));
  if (caches) caches->resize(seqs.size());
  ForwardCache scratch;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    Rng rng(derive_seed(dropout_seed, i));
    auto& cache = caches ? (*caches)[i] : scratch;
    out.row(static_cast<Eigen::Index>(i)) = forward(seqs[i], train_mode, &rng, cache);
  }
  return out;
}

void Encoder::backward(std::span<const ForwardCache> caches, const Matrix& d_pooled) {
  if (static_cast<Eigen::Index>(caches.size()) != d_pooled.rows())
    throw std::invalid_argument("encoder: batch size mismatch in backward");
  auto grads = make_gradient_set(params_);
  for (std::size_t i = 0; i < caches.size(); ++i)
    backward(caches[i], d_pooled.row(static_cast<Eigen::Index>(i)), grads);
  for (std::size_t p = 0; p < params_.size(); ++p)
    for (std::size_t i = 0; i < grads[p].size(); ++i) params_[p].gradient[i] += grads[p][i];
}

}  // namespace localeq
