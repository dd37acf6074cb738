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

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "localeq/labels.hpp"
#include "localeq/rng.hpp"

using namespace localeq;

namespace {

ClickRecord rec(std::uint32_t locale, std::string query, std::uint32_t pt, std::uint64_t clicks) {
  return {LocaleId{locale}, std::move(query), ItemId{pt * 10, ProductTypeId{pt}}, clicks, 0};
}

ClickAggregate agg(std::map<std::uint32_t, std::uint64_t> counts) {
  ClickAggregate a;
  a.query = "q";
  for (auto [pt, c] : counts) {
    a.per_pt_clicks[ProductTypeId{pt}] = c;
    a.total_clicks += c;
  }
  return a;
}

}  // namespace

TEST(Aggregate, SumsPerPtAndDropsZeroClicks) {
  auto out = aggregate({rec(0, "q", 1, 8), rec(0, "q", 2, 2), rec(0, "z", 1, 0), rec(1, "q", 1, 3)});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].locale.index, 0u);
  EXPECT_EQ(out[0].total_clicks, 10u);
  EXPECT_EQ(out[0].per_pt_clicks.at(ProductTypeId{1}), 8u);
  EXPECT_EQ(out[0].per_pt_clicks.at(ProductTypeId{2}), 2u);
  EXPECT_EQ(out[1].locale.index, 1u);
}

TEST(Aggregate, MatchesHashAndSumOracle) {
  Rng rng(11);
  std::vector<ClickRecord> log;
  for (int i = 0; i < 10000; ++i)
    log.push_back(rec(static_cast<std::uint32_t>(rng.below(3)), "q" + std::to_string(rng.below(200)),
                      static_cast<std::uint32_t>(rng.below(6)), rng.below(5)));
  std::unordered_map<std::string, std::map<std::uint32_t, std::uint64_t>> oracle;
  for (const auto& r : log) {
    if (r.clicks == 0) continue;
    oracle[std::to_string(r.locale.index) + "|" + r.query][r.item.pt.index] += r.clicks;
  }
  const auto out = aggregate(log);
  ASSERT_EQ(out.size(), oracle.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& a = out[i];
    if (i > 0) {
      const auto& p = out[i - 1];
      EXPECT_TRUE(p.locale < a.locale || (p.locale == a.locale && p.query < a.query));
    }
    const auto& expect = oracle.at(std::to_string(a.locale.index) + "|" + a.query);
    ASSERT_EQ(a.per_pt_clicks.size(), expect.size());
    std::uint64_t total = 0;
    for (const auto& [pt, c] : a.per_pt_clicks) {
      EXPECT_EQ(c, expect.at(pt.index));
      total += c;
    }
    EXPECT_EQ(a.total_clicks, total);
  }
}

TEST(Derive, WorkedExamples) {
  auto a = derive(agg({{0, 8}, {1, 2}}));
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->labels, std::vector<ProductTypeId>{ProductTypeId{0}});
  EXPECT_FALSE(derive(agg({{0, 5}, {1, 5}})).has_value());
  auto single = derive(agg({{3, 1}}));
  ASSERT_TRUE(single.has_value());
  EXPECT_EQ(single->labels[0].index, 3u);
}

TEST(Derive, StrictBoundaryIsExact) {
  // 0.5 + tiny: 500000001 / 1000000000 clicks passes, 500000000 does not.
  EXPECT_TRUE(derive(agg({{0, 500000001}, {1, 499999999}})).has_value());
  EXPECT_FALSE(derive(agg({{0, 500000000}, {1, 500000000}})).has_value());
  EXPECT_FALSE(derive(agg({{0, 3}, {1, 1}}), 0.75).has_value());
  EXPECT_TRUE(derive(agg({{0, 76}, {1, 24}}), 0.75).has_value());
}

TEST(Derive, ThresholdOutOfRangeThrows) {
  EXPECT_ANY_THROW(derive(agg({{0, 1}}), 0.49));
  EXPECT_ANY_THROW(derive(agg({{0, 1}}), 1.0));
}

TEST(Derive, ProbabilitiesSumToOne) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    std::map<std::uint32_t, std::uint64_t> counts;
    for (int k = 0; k < 1 + static_cast<int>(rng.below(7)); ++k) counts[static_cast<std::uint32_t>(rng.below(20))] = 1 + rng.below(1000);
    double s = 0.0;
    for (const auto& p : probabilities(agg(counts))) s += p.p;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(DeriveAll, AllFiftyFiftyIsAnError) {
  EXPECT_THROW(derive_all({rec(0, "q", 0, 5), rec(0, "q", 1, 5)}, 1), DataError);
}

TEST(DeriveAll, MonotoneInThreshold) {
  Rng rng(5);
  std::vector<ClickRecord> log;
  for (int i = 0; i < 3000; ++i)
    log.push_back(rec(static_cast<std::uint32_t>(rng.below(2)), "q" + std::to_string(rng.below(300)),
                      static_cast<std::uint32_t>(rng.below(3)), 1 + rng.below(4)));
  std::size_t prev = SIZE_MAX;
  for (double t : {0.5, 0.6, 0.7, 0.8, 0.9}) {
    DeriveOptions o;
    o.threshold = t;
    std::size_t n = 0;
    try {
      n = derive_all(log, 2, o).size();
    } catch (const DataError&) {
    }
    EXPECT_LE(n, prev);
    prev = n;
  }
}
