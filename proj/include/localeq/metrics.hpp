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
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "localeq/core.hpp"
#include "localeq/encoder.hpp"

namespace localeq {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScoredPair {
  double score = 0.0;
  bool gold = false;
};

struct PRPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

struct PRCurve {
  std::vector<PRPoint> points;  // thresholds strictly decreasing
  std::uint64_t total_gold = 0;
};

// Micro sweep over scored (example, PT) pairs. Candidate thresholds are the
// distinct scores, descending; a pair is predicted when score >= threshold.
PRCurve pr_sweep(std::vector<ScoredPair> pairs);

// Threshold strictly above every probability: the model refrains on all input.
inline const double kRefrainAll = std::nextafter(1.0, 2.0);

struct OperatingPoint {
  double recall = 0.0;
  double precision = 1.0;
  double threshold = kRefrainAll;
  bool attainable = false;
};

// Highest recall among points with precision >= target; among equal recalls
// the highest threshold wins.
OperatingPoint recall_at_precision(const PRCurve& curve, double target = 0.8);

// Precision and recall of `pairs` when predicting score >= threshold.
OperatingPoint evaluate_at(const std::vector<ScoredPair>& pairs, double threshold);

// All (example, PT) pairs of a score matrix against gold labels.
std::vector<ScoredPair> scored_pairs(const Matrix& scores, const Dataset& gold);
std::vector<ScoredPair> scored_pairs(const Matrix& scores, const Dataset& gold, const std::vector<bool>& rows);

struct PtAccuracy {
  std::uint64_t count = 0;
  std::uint64_t correct = 0;
  double accuracy() const { return count ? static_cast<double>(correct) / static_cast<double>(count) : 0.0; }
};

// Argmax prediction (ties to the lower PT index). Every gold label of an
// example is one occurrence of that PT; the occurrence is correct when the
// argmax is in the gold set. PTs without occurrences are omitted.
std::map<ProductTypeId, PtAccuracy> per_pt_accuracy(const Matrix& scores, const Dataset& eval);
std::map<ProductTypeId, PtAccuracy> per_pt_accuracy(const Matrix& scores, const Dataset& eval,
                                                    const std::vector<bool>& rows);

// Argmax top-1 of each row.
std::vector<ProductTypeId> argmax_rows(const Matrix& scores);

enum class PtBucket { kHead, kTorso, kTail };
std::string_view to_string(PtBucket b);

struct PtBuckets {
  std::vector<ProductTypeId> head, torso, tail;
  double head_mass = 0.0, torso_mass = 0.0, tail_mass = 0.0;  // fractions of the total
  std::optional<PtBucket> bucket_of(ProductTypeId pt) const;
};

// Sort by mass descending (ties by index). A PT is head while the mass before
// it is < 1/3 of the total, torso while < 2/3, tail otherwise. Zero-mass PTs
// are left out.
PtBuckets head_torso_tail(const std::vector<double>& mass);

double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

enum class ThresholdMode { kPerLocale, kGlobal };

struct LocaleResult {
  std::string locale;
  std::size_t n_examples = 0;
  std::uint64_t gold_pairs = 0;
  OperatingPoint op;
  double refrain_rate = 0.0;
  std::optional<std::string> error;
};

struct BucketResult {
  std::string name;  // "Lo-Re", "Hi-Re", "WW"
  std::size_t n_examples = 0;
  OperatingPoint op;
  double refrain_rate = 0.0;
};

struct EvalReport {
  double target_precision = 0.8;
  ThresholdMode mode = ThresholdMode::kPerLocale;
  std::vector<LocaleResult> locales;
  std::vector<BucketResult> buckets;
  double global_threshold = kRefrainAll;

  const BucketResult& bucket(std::string_view name) const;
  double threshold_for(LocaleId l) const;
};

// Per-locale operating points from per-locale sweeps (or, in global mode, the
// WW threshold applied to every locale); bucket rows from pooled pairs.
// Refrain rate is the share of examples whose top score is below the
// threshold that applies to them.
EvalReport build_report(const Matrix& scores, const Dataset& eval, const LocaleRegistry& locales,
                        const LocaleBuckets& buckets, double target_precision = 0.8,
                        ThresholdMode mode = ThresholdMode::kPerLocale);

nlohmann::ordered_json report_to_json(const EvalReport& report);
std::string report_csv(const EvalReport& report);
std::string pr_curve_csv(const PRCurve& curve);

// Per-locale thresholds for the server.
nlohmann::ordered_json calibration_json(const EvalReport& report);

struct Calibration {
  std::map<std::string, double> per_locale;
  std::optional<double> global;
  double threshold_for(std::string_view locale) const;  // per-locale, then global, then 0.5
};
Calibration parse_calibration(std::string_view text);

}  // namespace localeq
