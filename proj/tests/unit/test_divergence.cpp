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

#include <algorithm>
#include <map>

#include "localeq/divergence.hpp"
#include "localeq/rng.hpp"
#include "localeq/synth.hpp"
#include "oracles.hpp"

using namespace localeq;

namespace {

PTDistribution dist(std::vector<double> p) {
  PTDistribution d;
  d.probs = std::move(p);
  for (double v : d.probs) d.support += v > 0.0;
  d.total_clicks = 100;
  return d;
}

PTDistribution random_dist(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& v : p) {
    v = rng.bernoulli(0.25) ? 0.0 : rng.uniform();
    s += v;
  }
  if (s == 0.0) {
    p[0] = 1.0;
    s = 1.0;
  }
  for (auto& v : p) v /= s;
  return dist(p);
}

ClickRecord rec(std::uint32_t l, const std::string& q, std::uint32_t pt, std::uint64_t clicks) {
  return {LocaleId{l}, q, ItemId{pt, ProductTypeId{pt}}, clicks, 0};
}

}  // namespace

TEST(Emd, WorkedExample) {
  // 0.8 and 0.2 are not representable; agreement is to within a few ulps.
  EXPECT_DOUBLE_EQ(emd_unit(dist({0.8, 0.2}), dist({0.5, 0.5})), 0.3);
  EXPECT_EQ(emd_unit(dist({0.75, 0.25}), dist({0.5, 0.5})), 0.25);
  EXPECT_EQ(emd_unit(dist({1.0, 0.0}), dist({0.0, 1.0})), 1.0);
  EXPECT_EQ(emd_unit(dist({0.25, 0.75}), dist({0.25, 0.75})), 0.0);
}

TEST(Emd, MatchesMinCostTransportSolver) {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.below(8);
    const auto p = random_dist(rng, n);
    const auto q = random_dist(rng, n);
    EXPECT_NEAR(emd_unit(p, q), oracle::unit_metric_transport(p.probs, q.probs), 1e-9);
  }
}

TEST(Emd, Properties) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_dist(rng, 6), q = random_dist(rng, 6), r = random_dist(rng, 6);
    const double pq = emd_unit(p, q);
    EXPECT_GE(pq, 0.0);
    EXPECT_LE(pq, 1.0);
    EXPECT_EQ(pq, emd_unit(q, p));
    EXPECT_LE(pq, emd_unit(p, r) + emd_unit(r, q) + 1e-12);
  }
  EXPECT_THROW(emd_unit(dist({1.0}), dist({0.5, 0.5})), std::invalid_argument);
}

TEST(PtDistribution, FromClickLog) {
  ClickIndex idx({rec(0, "q", 0, 8), rec(0, "q", 1, 2), rec(1, "q", 1, 0)}, 2, 3);
  const auto d = pt_distribution(idx, LocaleId{0}, "q");
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->probs, (std::vector<double>{0.8, 0.2, 0.0}));
  EXPECT_EQ(d->support, 2u);
  EXPECT_EQ(d->total_clicks, 10u);
  EXPECT_FALSE(pt_distribution(idx, LocaleId{1}, "q").has_value());
  EXPECT_FALSE(pt_distribution(idx, LocaleId{0}, "nope").has_value());
}

TEST(PairDivergence, MinClicksAndHistogram) {
  std::vector<ClickRecord> log;
  Rng rng(3);
  for (int i = 0; i < 60; ++i) {
    const std::string q = "q" + std::to_string(i);
    log.push_back(rec(0, q, 0, 5 + rng.below(10)));
    log.push_back(rec(0, q, 1, rng.below(10)));
    log.push_back(rec(1, q, 0, 5 + rng.below(10)));
    log.push_back(rec(1, q, 2, rng.below(10)));
  }
  log.push_back(rec(0, "rare", 0, 2));
  log.push_back(rec(1, "rare", 1, 2));
  ClickIndex idx(log, 2, 3);
  const auto d = pair_divergence(idx, LocaleId{0}, LocaleId{1}, 5, 19);
  EXPECT_EQ(d.records.size(), 60u);
  EXPECT_FALSE(d.empty_intersection);
  ASSERT_EQ(d.histogram.size(), 19u);
  double area = 0.0;
  for (const auto& b : d.histogram) area += b.density * (b.hi - b.lo);
  EXPECT_NEAR(area, 1.0, 1e-12);
  EXPECT_EQ(d.histogram.back().hi, 1.0);

  const auto none = pair_divergence(idx, LocaleId{0}, LocaleId{1}, 1000, 19);
  EXPECT_TRUE(none.empty_intersection);
  for (const auto& b : none.histogram) EXPECT_EQ(b.density, 0.0);
  EXPECT_THROW(pair_divergence(idx, LocaleId{0}, LocaleId{5}), DataError);
}

TEST(PairDivergence, EmdOfOneLandsInLastBin) {
  ClickIndex idx({rec(0, "q", 0, 10), rec(1, "q", 1, 10)}, 2, 2);
  const auto d = pair_divergence(idx, LocaleId{0}, LocaleId{1}, 5, 19);
  ASSERT_EQ(d.records.size(), 1u);
  EXPECT_EQ(d.records[0].emd, 1.0);
  EXPECT_GT(d.histogram.back().density, 0.0);
}

TEST(TwoProportion, KnownValue) {
  EXPECT_NEAR(two_proportion_p_value(50, 100, 30, 100), 0.003892417122778627, 1e-12);
  EXPECT_EQ(two_proportion_p_value(5, 10, 5, 10), 1.0);
  EXPECT_EQ(two_proportion_p_value(0, 0, 3, 10), 1.0);
}

TEST(Categorize, AllCategories) {
  std::vector<ClickRecord> log = {
      // similar
      rec(0, "same", 0, 50), rec(1, "same", 0, 52),
      // noisy: few clicks, shares not significantly different
      rec(0, "thin", 0, 3), rec(0, "thin", 1, 2), rec(1, "thin", 0, 2), rec(1, "thin", 1, 3),
      // dialectal: both PTs exist in both locales
      rec(0, "roma", 0, 90), rec(0, "roma", 1, 10), rec(1, "roma", 1, 90), rec(1, "roma", 0, 10),
      // selection: PT 2 has no clicks at all in locale 1
      rec(0, "kettle", 2, 80), rec(1, "kettle", 1, 80)};
  ClickIndex idx(log, 2, 3);
  auto cat = [&](const std::string& q) {
    const auto a = *pt_distribution(idx, LocaleId{0}, q);
    const auto b = *pt_distribution(idx, LocaleId{1}, q);
    EMDRecord r{q, LocaleId{0}, LocaleId{1}, emd_unit(a, b), a.total_clicks, b.total_clicks};
    return categorize(r, idx);
  };
  EXPECT_EQ(cat("same"), DivergenceCategory::kSimilar);
  EXPECT_EQ(cat("thin"), DivergenceCategory::kNoisy);
  EXPECT_EQ(cat("roma"), DivergenceCategory::kDialectalOrSelection);
  EXPECT_EQ(cat("kettle"), DivergenceCategory::kSelection);
  EXPECT_EQ(to_string(DivergenceCategory::kDialectalOrSelection), "dialectal-or-selection");
}

TEST(BenchWorldDivergence, FlipQueriesDivergeMoreThanTypical) {
  const auto w = generate(WorldSpec{});
  const std::size_t L = w.spec.n_locales;
  ClickIndex idx(w.clicklog, L, w.spec.n_pts);
  std::map<std::string, std::size_t> tidx;
  for (std::size_t t = 0; t < w.templates.size(); ++t) tidx[w.templates[t]] = t;
  std::size_t checked = 0;
  for (std::uint32_t a = 0; a < L; ++a)
    for (std::uint32_t b = a + 1; b < L; ++b) {
      const auto d = pair_divergence(idx, LocaleId{a}, LocaleId{b}, 5, 19);
      std::vector<double> plain;
      std::vector<double> flips;
      for (const auto& r : d.records) {
        const auto& f = w.flipped[tidx.at(r.query)];
        if (f.empty()) plain.push_back(r.emd);
        else if (f[a] != f[b]) flips.push_back(r.emd);
      }
      if (flips.empty() || plain.empty()) continue;
      std::sort(plain.begin(), plain.end());
      const double median = plain[plain.size() / 2];
      for (double e : flips) EXPECT_GT(e, median);
      checked += flips.size();
    }
  EXPECT_GT(checked, 0u);
}
