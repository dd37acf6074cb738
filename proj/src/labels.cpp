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

#include "localeq/labels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace localeq {

std::vector<ClickAggregate> aggregate(const std::vector<ClickRecord>& clicklog) {
  std::map<std::pair<LocaleId, std::string_view>, ClickAggregate> by_key;
  for (const auto& r : clicklog) {
    if (r.clicks == 0) continue;
    auto& agg = by_key[{r.locale, r.query}];
    if (agg.total_clicks == 0) {
      agg.locale = r.locale;
      agg.query = r.query;
    }
    agg.per_pt_clicks[r.item.pt] += r.clicks;
    agg.total_clicks += r.clicks;
  }
  std::vector<ClickAggregate> out;
  out.reserve(by_key.size());
  for (auto& [key, agg] : by_key) out.push_back(std::move(agg));
  return out;
}

std::vector<PTProbability> probabilities(const ClickAggregate& agg) {
  std::vector<PTProbability> out;
  out.reserve(agg.per_pt_clicks.size());
  const auto total = static_cast<double>(agg.total_clicks);
  for (const auto& [pt, c] : agg.per_pt_clicks) out.push_back({pt, static_cast<double>(c) / total});
  return out;
}

namespace {

// c / total > t  <=>  c * 2^53 > M * total, where t = M * 2^-53 exactly.
bool share_exceeds(std::uint64_t c, std::uint64_t total, double threshold) {
  int exp = 0;
  const double frac = std::frexp(threshold, &exp);  // threshold = frac * 2^exp, frac in [0.5, 1)
  // threshold in [0.5, 1) means exp == 0.
  const auto mantissa = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  const unsigned __int128 lhs = static_cast<unsigned __int128>(c) << 53;
  const unsigned __int128 rhs = static_cast<unsigned __int128>(mantissa) * total;
  return exp == 0 ? lhs > rhs : false;
}

}  // namespace

std::optional<LabeledExample> derive(const ClickAggregate& agg, double threshold) {
  if (!(threshold >= 0.5 && threshold < 1.0))
    throw std::invalid_argument("derive: threshold must be in [0.5, 1)");
  for (const auto& [pt, c] : agg.per_pt_clicks) {
    if (share_exceeds(c, agg.total_clicks, threshold))
      return LabeledExample{agg.locale, agg.query, {pt}};
  }
  return std::nullopt;
}

Dataset derive_all(const std::vector<ClickRecord>& clicklog, std::size_t n_locales,
                   const DeriveOptions& options) {
  std::vector<LabeledExample> examples;
  for (const auto& agg : aggregate(clicklog)) {
    if (agg.total_clicks < options.min_total_clicks) continue;
    if (auto ex = derive(agg, options.threshold)) examples.push_back(std::move(*ex));
  }
  if (examples.empty()) throw DataError("no trainable labels");
  return Dataset(std::move(examples), Split::kTrain, Provenance::kDerived, n_locales);
}

}  // namespace localeq
