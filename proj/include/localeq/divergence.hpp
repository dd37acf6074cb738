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
#include <string>
#include <vector>

#include "localeq/core.hpp"

namespace localeq {

struct PTDistribution {
  std::vector<double> probs;  // indexed by PT
  std::size_t support = 0;
  std::uint64_t total_clicks = 0;
};

// Per-(locale, query) PT click counts plus per-locale PT click totals.
class ClickIndex {
 public:
  ClickIndex(const std::vector<ClickRecord>& clicklog, std::size_t n_locales, std::size_t n_pts);

  const std::map<ProductTypeId, std::uint64_t>* counts(LocaleId l, std::string_view query) const;
  std::uint64_t locale_pt_clicks(LocaleId l, ProductTypeId pt) const;
  // Queries with clicks in the locale, sorted.
  std::vector<std::string> queries(LocaleId l) const;
  std::size_t n_pts() const { return n_pts_; }
  std::size_t n_locales() const { return per_locale_.size(); }

 private:
  std::size_t n_pts_;
  std::vector<std::map<std::string, std::map<ProductTypeId, std::uint64_t>, std::less<>>> per_locale_;
  std::vector<std::vector<std::uint64_t>> pt_totals_;
};

std::optional<PTDistribution> pt_distribution(const ClickIndex& index, LocaleId locale, std::string_view query);

// Optimal transport cost with ground distance 1 between distinct PTs:
// half the L1 distance.
double emd_unit(const PTDistribution& p, const PTDistribution& q);

struct EMDRecord {
  std::string query;
  LocaleId locale_a, locale_b;
  double emd = 0.0;
  std::uint64_t clicks_a = 0, clicks_b = 0;
};

struct HistogramBin {
  double lo = 0.0, hi = 0.0, density = 0.0;
};

struct PairDivergence {
  std::vector<EMDRecord> records;  // sorted by query
  std::vector<HistogramBin> histogram;
  bool empty_intersection = false;
};

// One record per query with at least min_clicks on both sides; the histogram
// is a density over [0, 1] (bar areas sum to 1). The top edge is closed.
PairDivergence pair_divergence(const ClickIndex& index, LocaleId a, LocaleId b, std::uint64_t min_clicks = 5,
                               std::size_t bins = 19);

enum class DivergenceCategory { kSimilar, kNoisy, kDialectalOrSelection, kSelection };
std::string_view to_string(DivergenceCategory c);

struct CategorizeOptions {
  double similar_below = 0.1;
  double alpha = 0.01;
};

// Two-sided two-proportion z test p-value for x1/n1 vs x2/n2 (pooled variance).
double two_proportion_p_value(std::uint64_t x1, std::uint64_t n1, std::uint64_t x2, std::uint64_t n2);

// similar when emd < similar_below; noisy when the share test cannot reject
// equality for the dominant PT of either side (ties to the lower index);
// otherwise dialectal-or-selection, or selection when a side's dominant PT
// has no clicks at all in the other locale.
DivergenceCategory categorize(const EMDRecord& record, const ClickIndex& index, const CategorizeOptions& opts = {});

std::string emd_records_csv(const PairDivergence& d, const LocaleRegistry& locales, const ClickIndex& index,
                            const CategorizeOptions& opts = {});
std::string emd_histogram_csv(const PairDivergence& d);

}  // namespace localeq
