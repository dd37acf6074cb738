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
#include <map>
#include <optional>
#include <vector>

#include "localeq/core.hpp"

namespace localeq {

struct ClickAggregate {
  LocaleId locale;
  std::string query;
  std::map<ProductTypeId, std::uint64_t> per_pt_clicks;
  std::uint64_t total_clicks = 0;
};

struct PTProbability {
  ProductTypeId pt;
  double p = 0.0;
};

// One aggregate per (locale, query) with at least one click, sorted by
// (locale, query).
std::vector<ClickAggregate> aggregate(const std::vector<ClickRecord>& clicklog);

// Click share of each product type for one aggregate.
std::vector<PTProbability> probabilities(const ClickAggregate& agg);

// The product type whose click share is strictly above `threshold`, compared
// exactly in integer arithmetic. Throws for thresholds outside [0.5, 1).
std::optional<LabeledExample> derive(const ClickAggregate& agg, double threshold = 0.5);

struct DeriveOptions {
  double threshold = 0.5;
  std::uint64_t min_total_clicks = 1;
};

// aggregate + derive over a whole log. Throws DataError("no trainable labels")
// when nothing survives.
Dataset derive_all(const std::vector<ClickRecord>& clicklog, std::size_t n_locales,
                   const DeriveOptions& options = {});

}  // namespace localeq
