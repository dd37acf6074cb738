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

#include "localeq/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace localeq {
namespace {

// max() that lets NaN through.
double worst(double a, double b) { return (std::isnan(a) || std::isnan(b)) ? std::nan("") : std::max(a, b); }

struct TinyModel {
  Encoder encoder;
  ParameterTensor weight;  // d x P
  ParameterTensor bias;    // 1 x P
  std::vector<TokenSequence> batch;
  std::vector<std::vector<double>> targets;

  std::vector<ParameterTensor*> tensors() {
    std::vector<ParameterTensor*> out;
    for (auto& p : encoder.params()) out.push_back(&p);
    out.push_back(&weight);
    out.push_back(&bias);
    return out;
  }

  RowVector logits(const RowVector& pooled) const {
    const Eigen::Map<const Matrix> w(weight.values.data(), static_cast<Eigen::Index>(weight.rows),
                                     static_cast<Eigen::Index>(weight.cols));
    const Eigen::Map<const RowVector> b(bias.values.data(), static_cast<Eigen::Index>(bias.size()));
    return pooled * w + b;
  }

  double loss() const {
    ForwardCache cache;
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const RowVector z = logits(encoder.forward(batch[i], false, nullptr, cache));
      for (Eigen::Index p = 0; p < z.size(); ++p) {
        const double y = targets[i][static_cast<std::size_t>(p)];
        total += std::max(z(p), 0.0) - z(p) * y + std::log1p(std::exp(-std::abs(z(p))));
      }
    }
    return total / static_cast<double>(batch.size() * weight.cols);
  }

  // Gradients in tensors() order.
  GradientSet gradient() const {
    GradientSet enc = make_gradient_set(encoder.params());
    std::vector<double> dw(weight.size(), 0.0), db(bias.size(), 0.0);
    const double scale = 1.0 / static_cast<double>(batch.size() * weight.cols);
    const Eigen::Map<const Matrix> w(weight.values.data(), static_cast<Eigen::Index>(weight.rows),
                                     static_cast<Eigen::Index>(weight.cols));
    ForwardCache cache;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const RowVector pooled = encoder.forward(batch[i], false, nullptr, cache);
      const RowVector z = logits(pooled);
      RowVector dz(z.size());
      for (Eigen::Index p = 0; p < z.size(); ++p) {
        const double s = 1.0 / (1.0 + std::exp(-z(p)));
        dz(p) = (s - targets[i][static_cast<std::size_t>(p)]) * scale;
      }
      Eigen::Map<Matrix>(dw.data(), w.rows(), w.cols()) += pooled.transpose() * dz;
      Eigen::Map<RowVector>(db.data(), dz.size()) += dz;
      encoder.backward(cache, dz * w.transpose(), enc);
    }
    enc.push_back(std::move(dw));
    enc.push_back(std::move(db));
    return enc;
  }
};

}  // namespace

GradCheckReport grad_check(const GradCheckOptions& options, std::uint64_t seed) {
  Rng rng(seed);
  TinyModel m;
  m.encoder = Encoder(options.config, rng);
  const std::size_t d = options.config.d_model;
  m.weight = {"head.weight", d, options.n_pts, std::vector<double>(d * options.n_pts),
              std::vector<double>(d * options.n_pts)};
  m.bias = {"head.bias", 1, options.n_pts, std::vector<double>(options.n_pts), std::vector<double>(options.n_pts)};
  for (auto* t : m.tensors()) {
    const bool gain = t->name.ends_with(".gain");
    for (auto& v : t->values) {
      if (options.zero_params) v = 0.0;
      else v = (gain ? 1.0 : 0.0) + options.init_scale * rng.normal();
    }
  }

  // Random sequences: CLS, random ids, sometimes trailing PAD.
  const auto vocab = static_cast<std::uint32_t>(options.config.vocab_total());
  for (std::size_t i = 0; i < options.batch; ++i) {
    TokenSequence seq;
    seq.ids.push_back(kClsToken);
    const std::size_t len = 2 + rng.below(options.config.max_len - 1);
    while (seq.ids.size() < len) seq.ids.push_back(kSepToken + static_cast<std::uint32_t>(rng.below(vocab - kSepToken)));
    if (i % 2 == 1)
      while (seq.ids.size() < options.config.max_len) seq.ids.push_back(kPadToken);
    m.batch.push_back(std::move(seq));
    std::vector<double> y(options.n_pts, 0.0);
    y[rng.below(options.n_pts)] = 1.0;
    if (rng.bernoulli(0.5)) y[rng.below(options.n_pts)] = 1.0;
    m.targets.push_back(std::move(y));
  }

  GradCheckReport report;
  report.loss = m.loss();
  const GradientSet analytic = m.gradient();
  auto tensors = m.tensors();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    GradCheckGroup g;
    g.name = tensors[k]->name;
    g.n_values = tensors[k]->size();
    for (std::size_t i = 0; i < tensors[k]->size(); ++i) {
      double& v = tensors[k]->values[i];
      const double saved = v;
      v = saved + options.step;
      const double up = m.loss();
      v = saved - options.step;
      const double down = m.loss();
      v = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[k][i];
      const double abs_err = std::abs(a - numeric);
      const double denom = std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
      g.max_abs_error = worst(g.max_abs_error, abs_err);
      g.max_rel_error = worst(g.max_rel_error, abs_err / denom);
    }
    report.max_rel_error = worst(report.max_rel_error, g.max_rel_error);
    report.groups.push_back(std::move(g));
  }
  return report;
}

}  // namespace localeq
