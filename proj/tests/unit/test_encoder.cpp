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

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <set>

#include "localeq/encoder.hpp"
#include "localeq/gradcheck.hpp"

using namespace localeq;

namespace {

EncoderConfig small_config() {
  EncoderConfig c;
  c.d_model = 16;
  c.n_layers = 2;
  c.n_heads = 4;
  c.d_ff = 32;
  c.max_len = 12;
  c.n_buckets = 64;
  c.n_locales = 2;
  c.dropout_rate = 0.1;
  return c;
}

std::vector<TokenSequence> some_sequences(const EncoderConfig& c) {
  Tokenizer tok(c.n_locales, c.n_buckets, c.max_len);
  return {tok.tokenize("harry potter mug", LocaleId{0}), tok.tokenize("garden hose", std::nullopt),
          tok.tokenize("a", LocaleId{1}), tok.tokenize("", std::nullopt)};
}

}  // namespace

TEST(EncoderConfig, Validation) {
  auto c = small_config();
  c.n_heads = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.dropout_rate = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.max_len = 2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Encoder, IdenticalSequencesGiveIdenticalRows) {
  Rng rng(1);
  Encoder enc(small_config(), rng);
  const auto seqs = some_sequences(enc.config());
  std::vector<TokenSequence> same(3, seqs[0]);
  const Matrix out = enc.encode(same, false, 0);
  EXPECT_EQ(out.row(0), out.row(1));
  EXPECT_EQ(out.row(0), out.row(2));
}

TEST(Encoder, BatchPermutationPermutesRows) {
  Rng rng(2);
  Encoder enc(small_config(), rng);
  auto seqs = some_sequences(enc.config());
  const Matrix a = enc.encode(seqs, false, 0);
  std::vector<TokenSequence> rev(seqs.rbegin(), seqs.rend());
  const Matrix b = enc.encode(rev, false, 0);
  for (Eigen::Index i = 0; i < a.rows(); ++i) EXPECT_EQ(a.row(i), b.row(a.rows() - 1 - i));
}

TEST(Encoder, DropoutOnlyInTrainMode) {
  Rng rng(3);
  Encoder enc(small_config(), rng);
  const auto seqs = some_sequences(enc.config());
  EXPECT_EQ(enc.encode(seqs, false, 1), enc.encode(seqs, false, 2));
  EXPECT_NE(enc.encode(seqs, true, 1), enc.encode(seqs, false, 1));
  EXPECT_EQ(enc.encode(seqs, true, 1), enc.encode(seqs, true, 1));
}

TEST(Encoder, RejectsOverlongSequence) {
  Rng rng(4);
  Encoder enc(small_config(), rng);
  TokenSequence seq;
  seq.ids.assign(enc.config().max_len + 1, kClsToken);
  ForwardCache cache;
  EXPECT_THROW(enc.forward(seq, false, nullptr, cache), std::invalid_argument);
}

TEST(Encoder, BackwardWithoutForwardThrows) {
  Rng rng(5);
  Encoder enc(small_config(), rng);
  ForwardCache cache;
  auto grads = make_gradient_set(enc.params());
  EXPECT_THROW(enc.backward(cache, RowVector::Ones(16), grads), std::logic_error);
}

TEST(Encoder, BackwardIsLinearInUpstream) {
  Rng rng(6);
  auto cfg = small_config();
  cfg.dropout_rate = 0.0;
  Encoder enc(cfg, rng);
  const auto seqs = some_sequences(cfg);
  ForwardCache cache;
  enc.forward(seqs[0], false, nullptr, cache);
  Rng up(9);
  RowVector g(16);
  for (auto& v : g) v = up.normal();

  auto zero_g = make_gradient_set(enc.params());
  enc.backward(cache, RowVector::Zero(16), zero_g);
  for (const auto& t : zero_g)
    for (double v : t) EXPECT_EQ(v, 0.0);

  auto g1 = make_gradient_set(enc.params());
  auto g2 = make_gradient_set(enc.params());
  enc.backward(cache, g, g1);
  enc.backward(cache, 2.0 * g, g2);
  double nonzero = 0.0;
  for (std::size_t t = 0; t < g1.size(); ++t)
    for (std::size_t i = 0; i < g1[t].size(); ++i) {
      EXPECT_NEAR(g2[t][i], 2.0 * g1[t][i], 1e-12 * (1.0 + std::abs(g1[t][i])));
      nonzero += std::abs(g1[t][i]);
    }
  EXPECT_GT(nonzero, 0.0);
}

TEST(Softmax, RowsSumToOneAndMaskedColumnsAreZero) {
  Rng rng(7);
  Matrix s(5, 6);
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j) s(i, j) = 10.0 * rng.normal();
  const std::vector<bool> mask = {true, true, false, true, true, false};
  Matrix ref = s;
  masked_softmax_rows(s, mask);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    double m = -INFINITY;
    for (Eigen::Index j = 0; j < 6; ++j)
      if (mask[j]) m = std::max(m, ref(i, j));
    double z = 0.0;
    for (Eigen::Index j = 0; j < 6; ++j)
      if (mask[j]) z += std::exp(ref(i, j) - m);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < 6; ++j) {
      const double expect = mask[j] ? std::exp(ref(i, j) - m) / z : 0.0;
      EXPECT_NEAR(s(i, j), expect, 1e-15);
      sum += s(i, j);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(GradCheck, TinyModelMatchesFiniteDifferences) {
  const auto start = std::chrono::steady_clock::now();
  const auto report = grad_check(GradCheckOptions{}, 7);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(report.max_rel_error, 1e-4);
  EXPECT_LT(seconds, 60.0);
  std::set<std::string> names;
  for (const auto& g : report.groups) {
    EXPECT_TRUE(names.insert(g.name).second) << g.name;
    EXPECT_GT(g.n_values, 0u);
    EXPECT_LT(g.max_rel_error, 1e-4) << g.name;
  }
  EXPECT_EQ(names.size(), 2u + 16u + 2u + 2u);  // embeddings, one layer, final norm, head
}

TEST(GradCheck, ZeroParametersProduceNoNaN) {
  GradCheckOptions o;
  o.zero_params = true;
  const auto report = grad_check(o, 3);
  EXPECT_FALSE(std::isnan(report.max_rel_error));
  EXPECT_FALSE(std::isnan(report.loss));
  EXPECT_LT(report.max_rel_error, 1e-4);
}

TEST(GradCheck, DeterministicUnderSeed) {
  const auto a = grad_check(GradCheckOptions{}, 11);
  const auto b = grad_check(GradCheckOptions{}, 11);
  EXPECT_EQ(a.max_rel_error, b.max_rel_error);
  EXPECT_EQ(a.loss, b.loss);
}
