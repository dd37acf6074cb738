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

#include <numeric>

#include "localeq/rng.hpp"
#include "oracles.hpp"

using namespace localeq;

namespace {

std::vector<ScoredPair> random_pairs(Rng& rng, std::size_t n, int levels) {
  std::vector<ScoredPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    ScoredPair p;
    p.gold = rng.bernoulli(0.3);
    // Quantized scores force ties; gold pairs lean higher.
    const double raw = std::min(0.999, rng.uniform() * 0.7 + (p.gold ? 0.3 : 0.0));
    p.score = std::floor(raw * levels) / levels;
    pairs.push_back(p);
  }
  if (std::none_of(pairs.begin(), pairs.end(), [](const ScoredPair& p) { return p.gold; })) pairs[0].gold = true;
  return pairs;
}

Dataset singleton(std::vector<std::pair<std::uint32_t, std::uint32_t>> locale_pt, std::size_t n_locales) {
  std::vector<LabeledExample> ex;
  for (std::size_t i = 0; i < locale_pt.size(); ++i)
    ex.push_back({LocaleId{locale_pt[i].first}, "q" + std::to_string(i), {ProductTypeId{locale_pt[i].second}}});
  return Dataset(ex, Split::kTest, Provenance::kSyntheticGold, n_locales);
}

}  // namespace

TEST(PrSweep, MatchesBruteForceOnRandomInstances) {
  Rng rng(2024);
  for (int inst = 0; inst < 100; ++inst) {
    const auto pairs = random_pairs(rng, 1 + rng.below(500), 2 + static_cast<int>(rng.below(60)));
    const auto curve = pr_sweep(pairs);
    const auto brute = oracle::brute_curve(pairs);
    ASSERT_EQ(curve.points.size(), brute.size());
    for (std::size_t i = 0; i < brute.size(); ++i) {
      EXPECT_EQ(curve.points[i].threshold, brute[i].threshold);
      EXPECT_EQ(curve.points[i].tp, brute[i].tp);
      EXPECT_EQ(curve.points[i].fp, brute[i].fp);
      EXPECT_EQ(curve.points[i].fn, brute[i].fn);
      EXPECT_EQ(curve.points[i].precision, brute[i].precision);
      EXPECT_EQ(curve.points[i].recall, brute[i].recall);
    }
    for (double target : {0.5, 0.8, 0.95}) {
      const auto got = recall_at_precision(curve, target);
      const auto want = oracle::scan_recall_at_precision(brute, target);
      EXPECT_EQ(got.attainable, want.attainable);
      EXPECT_EQ(got.recall, want.recall);
      if (want.attainable) {
        EXPECT_EQ(got.threshold, want.threshold);
        EXPECT_EQ(got.precision, want.precision);
      }
    }
  }
}

TEST(PrSweep, Errors) {
  EXPECT_THROW(pr_sweep({{0.3, false}, {0.2, false}}), MetricError);
  EXPECT_THROW(pr_sweep({{std::nan(""), true}}), MetricError);
}

TEST(RecallAtPrecision, PerfectCurve) {
  const auto op = recall_at_precision(pr_sweep({{0.9, true}, {0.8, true}, {0.1, false}}), 0.8);
  EXPECT_TRUE(op.attainable);
  EXPECT_EQ(op.recall, 1.0);
  EXPECT_EQ(op.threshold, 0.8);
}

TEST(RecallAtPrecision, UnattainableRefrainsEverywhere) {
  const auto op = recall_at_precision(pr_sweep({{0.9, false}, {0.8, true}}), 0.8);
  EXPECT_FALSE(op.attainable);
  EXPECT_EQ(op.recall, 0.0);
  EXPECT_GT(op.threshold, 1.0);
  EXPECT_EQ(op.threshold, kRefrainAll);
}

TEST(EvaluateAt, CountsDirectly) {
  const std::vector<ScoredPair> pairs = {{0.9, true}, {0.7, false}, {0.6, true}, {0.2, true}};
  const auto op = evaluate_at(pairs, 0.6);
  EXPECT_DOUBLE_EQ(op.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(op.recall, 2.0 / 3.0);
}

TEST(PerPtAccuracy, OracleAndConstantScorers) {
  const auto data = singleton({{0, 0}, {0, 1}, {0, 2}, {0, 1}}, 1);
  Matrix oracle_scores = Matrix::Zero(4, 3);
  for (int i = 0; i < 4; ++i) oracle_scores(i, data.examples()[i].labels[0].index) = 1.0;
  for (const auto& [pt, acc] : per_pt_accuracy(oracle_scores, data)) EXPECT_EQ(acc.accuracy(), 1.0);

  Matrix constant = Matrix::Zero(4, 3);
  constant.col(1).setConstant(0.9);
  const auto acc = per_pt_accuracy(constant, data);
  EXPECT_EQ(acc.at(ProductTypeId{1}).accuracy(), 1.0);
  EXPECT_EQ(acc.at(ProductTypeId{1}).count, 2u);
  EXPECT_EQ(acc.at(ProductTypeId{0}).accuracy(), 0.0);
  EXPECT_EQ(acc.at(ProductTypeId{2}).accuracy(), 0.0);
  EXPECT_THROW(per_pt_accuracy(Matrix::Zero(0, 3), Dataset({}, Split::kTest, Provenance::kSyntheticGold, 1)),
               MetricError);
}

TEST(PerPtAccuracy, MatchesNaiveRecount) {
  Rng rng(8);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> rows;
  for (int i = 0; i < 300; ++i) rows.emplace_back(0, static_cast<std::uint32_t>(rng.below(6)));
  const auto data = singleton(rows, 1);
  Matrix s(300, 6);
  for (Eigen::Index i = 0; i < 300; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) s(i, j) = rng.uniform();
  std::vector<std::uint64_t> n(6, 0), c(6, 0);
  for (Eigen::Index i = 0; i < 300; ++i) {
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < 6; ++j)
      if (s(i, j) > s(i, arg)) arg = j;
    const auto g = rows[static_cast<std::size_t>(i)].second;
    ++n[g];
    c[g] += arg == static_cast<Eigen::Index>(g);
  }
  for (const auto& [pt, acc] : per_pt_accuracy(s, data)) {
    EXPECT_EQ(acc.count, n[pt.index]);
    EXPECT_EQ(acc.correct, c[pt.index]);
  }
}

TEST(HeadTorsoTail, SmallCases) {
  const auto eq = head_torso_tail({1.0, 1.0, 1.0});
  EXPECT_EQ(eq.head.size(), 1u);
  EXPECT_EQ(eq.torso.size(), 1u);
  EXPECT_EQ(eq.tail.size(), 1u);
  const auto one = head_torso_tail({5.0});
  EXPECT_EQ(one.head.size(), 1u);
  EXPECT_TRUE(one.torso.empty());
  EXPECT_TRUE(one.tail.empty());
  EXPECT_THROW(head_torso_tail({0.0, 0.0}), MetricError);
}

TEST(HeadTorsoTail, ZipfPartitionMatchesCumulativeOracle) {
  std::vector<double> mass(500);
  for (std::size_t i = 0; i < mass.size(); ++i) mass[i] = 1000.0 / std::pow(static_cast<double>(i + 1), 1.05);
  // Shuffle the index order so sorting matters.
  Rng rng(4);
  rng.shuffle(std::span(mass));
  const auto b = head_torso_tail(mass);
  EXPECT_EQ(b.head.size() + b.torso.size() + b.tail.size(), mass.size());
  std::vector<int> seen(mass.size(), 0);
  for (const auto* part : {&b.head, &b.torso, &b.tail})
    for (auto pt : *part) ++seen[pt.index];
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_LT(b.head.size(), b.torso.size());
  EXPECT_LT(b.torso.size(), b.tail.size());

  std::vector<std::size_t> order(mass.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto c) { return mass[a] > mass[c] || (mass[a] == mass[c] && a < c); });
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  double before = 0.0, head = 0.0;
  for (auto i : order) {
    const auto bucket = b.bucket_of(ProductTypeId{static_cast<std::uint32_t>(i)});
    ASSERT_TRUE(bucket.has_value());
    const auto want = before < total / 3 ? PtBucket::kHead : before < 2 * total / 3 ? PtBucket::kTorso : PtBucket::kTail;
    EXPECT_EQ(*bucket, want);
    if (want == PtBucket::kHead) head += mass[i];
    before += mass[i];
  }
  EXPECT_NEAR(b.head_mass, head / total, 1e-12);
  EXPECT_NEAR(b.head_mass + b.torso_mass + b.tail_mass, 1.0, 1e-12);
}

TEST(Pearson, ReferenceCases) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  EXPECT_NEAR(pearson(x, x), 1.0, 1e-15);
  std::vector<double> neg;
  for (double v : x) neg.push_back(7.0 - 2.0 * v);
  EXPECT_NEAR(pearson(x, neg), -1.0, 1e-15);
  EXPECT_THROW(pearson({1, 1, 1}, {1, 2, 3}), MetricError);
  EXPECT_THROW(pearson({1}, {1}), MetricError);
}

TEST(Pearson, MatchesSumFormulaOnRandomPairs) {
  Rng rng(99);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> x, y;
    for (int i = 0; i < 100; ++i) {
      x.push_back(rng.normal() * 10.0 + 3.0);
      y.push_back(0.5 * x.back() + rng.normal());
    }
    EXPECT_NEAR(pearson(x, y), oracle::pearson_sums(x, y), 1e-12);
  }
}

TEST(BuildReport, PooledBucketsAndPerLocaleRows) {
  // Two locales, 2 PTs. Locale 0 scored perfectly, locale 1 inverted.
  const auto data = singleton({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, 2);
  Matrix s(4, 2);
  s << 0.9, 0.1, 0.2, 0.8, 0.3, 0.7, 0.6, 0.4;
  LocaleRegistry locales({"US", "MX"});
  LocaleBuckets buckets{{LocaleId{0}}, {LocaleId{1}}};
  const auto r = build_report(s, data, locales, buckets, 0.8);
  EXPECT_EQ(r.bucket("Hi-Re").op.recall, 1.0);
  EXPECT_EQ(r.bucket("Hi-Re").op.threshold, 0.8);
  EXPECT_FALSE(r.bucket("Lo-Re").op.attainable);
  EXPECT_EQ(r.bucket("Lo-Re").refrain_rate, 1.0);
  ASSERT_EQ(r.locales.size(), 2u);
  EXPECT_EQ(r.threshold_for(LocaleId{0}), 0.8);
  EXPECT_EQ(r.threshold_for(LocaleId{1}), kRefrainAll);
  EXPECT_EQ(r.bucket("WW").n_examples, 4u);

  const auto cal = parse_calibration(calibration_json(r).dump());
  EXPECT_EQ(cal.threshold_for("US"), 0.8);
  EXPECT_EQ(cal.threshold_for("MX"), kRefrainAll);
  EXPECT_TRUE(cal.global.has_value());
  EXPECT_THROW(parse_calibration("{\"kind\":\"x\"}"), DataError);

  const auto g = build_report(s, data, locales, buckets, 0.8, ThresholdMode::kGlobal);
  EXPECT_EQ(g.threshold_for(LocaleId{0}), g.global_threshold);
  EXPECT_EQ(g.threshold_for(LocaleId{1}), g.global_threshold);
  EXPECT_EQ(report_to_json(r)["kind"], "eval-report");
}
