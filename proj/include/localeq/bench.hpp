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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "localeq/labels.hpp"
#include "localeq/metrics.hpp"
#include "localeq/model.hpp"
#include "localeq/synth.hpp"

namespace localeq {

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Query mass per PT: clicks landing on the PT's items.
std::vector<double> click_mass(const std::vector<ClickRecord>& clicklog, std::size_t n_pts);

// Optimizer settings of the shipped benchmark. The model is far smaller than
// a pretrained encoder, so it trains from scratch at a larger step size.
TrainConfig benchmark_train_config();

// Everything a pipeline run needs, loaded from one JSON file. Sections:
// world, split, labels, encoder, train, eval, bench. Unknown keys are errors.
struct RunConfig {
  WorldSpec world;
  SplitFractions split;
  DeriveOptions labels;
  EncoderConfig encoder;
  TrainConfig train = benchmark_train_config();
  double target_precision = 0.8;
  ThresholdMode threshold_mode = ThresholdMode::kPerLocale;
  std::vector<VariantKind> variants = {VariantKind::kNonUnified, VariantKind::kUnifiedAgnostic,
                                       VariantKind::kUnifiedAware};

  void validate() const;
  // Sets the world and training seeds together.
  void set_seed(std::uint64_t seed);
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::ordered_json to_json(const RunConfig& cfg);

EncoderConfig encoder_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

// Data shared by all variants of a run.
struct BenchData {
  World world;
  WorldSplit split;
  Dataset train;  // derived from train-template clicks
  Dataset val;    // derived from validation-template clicks
  Dataset test;   // synthetic gold, test templates x all locales
  LocaleBuckets buckets;
  std::vector<double> pt_mass;  // training clicks per PT
  PtBuckets pt_buckets;
};

BenchData prepare_bench_data(const RunConfig& cfg);

struct BucketAccuracy {
  double head = 0.0, torso = 0.0, tail = 0.0;
};

struct VariantResult {
  VariantKind variant;
  TrainResult training;
  std::size_t n_parameters = 0;
  std::string model_version;
  EvalReport report;
  double flip_accuracy = 0.0;  // top-1 on flip-manifest records
  std::size_t flip_records = 0;
  std::optional<double> lo_re_pearson;
  std::optional<double> hi_re_pearson;
  BucketAccuracy bucket_accuracy;
  std::map<ProductTypeId, PtAccuracy> per_pt;
};

struct BenchResult {
  std::vector<VariantResult> variants;
  std::vector<ModelBundle> models;  // same order as variants
};

using LogFn = std::function<void(const std::string&)>;

BenchResult run_bench(const RunConfig& cfg, const BenchData& data, const LogFn& log = {});

// Evaluation of one trained bundle against the shared data.
VariantResult evaluate_variant(const ModelBundle& bundle, const RunConfig& cfg, const BenchData& data);

// Pearson(per-PT training count, per-PT accuracy) over PTs with test
// occurrences in the given locales; nullopt when undefined.
std::optional<double> count_accuracy_pearson(const Matrix& scores, const BenchData& data,
                                             const std::vector<LocaleId>& locales);

nlohmann::ordered_json bench_report_json(const RunConfig& cfg, const BenchData& data, const BenchResult& result);
std::string bench_grid(const BenchResult& result);
std::string per_pt_csv(const std::map<ProductTypeId, PtAccuracy>& per_pt, const PtRegistry& pts,
                       const PtBuckets& buckets);

}  // namespace localeq
