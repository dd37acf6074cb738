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

#include "localeq/bench.hpp"

using namespace localeq;
using nlohmann::json;

TEST(RunConfig, ShippedConfigMatchesDefaults) {
  const auto cfg = load_run_config(std::string(LOCALEQ_SOURCE_DIR) + "/configs/bench.json");
  EXPECT_EQ(to_json(cfg).dump(), to_json(RunConfig{}).dump());
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.set_seed(99);
  c.target_precision = 0.7;
  c.threshold_mode = ThresholdMode::kGlobal;
  c.variants = {VariantKind::kDisjointPerLocale};
  c.world.n_locales = 2;
  const auto codes = c.world.locale_codes();
  c.world.queries_per_locale = {{codes[0], 10}, {codes[1], 20}};
  const auto back = run_config_from_json(json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_EQ(back.world.seed, 99u);
  EXPECT_EQ(back.train.seed, 99u);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(run_config_from_json(json::parse(R"({"nope":{}})")), DataError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"train":{"lr":0.1,"lrr":1}})")), DataError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"encoder":{"d_model":"x"}})")), DataError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"split":{"train":0.5}})")), DataError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"bench":{"variants":["bert"]}})")), DataError);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"eval":{"threshold_mode":"both"}})")), DataError);
  EXPECT_THROW(load_run_config("/nonexistent/bench.json"), DataError);
}

TEST(RunConfig, PartialConfigKeepsDefaults) {
  const auto c = run_config_from_json(json::parse(R"({"train":{"max_epochs":2}})"));
  EXPECT_EQ(c.train.max_epochs, 2u);
  EXPECT_DOUBLE_EQ(c.train.learning_rate, benchmark_train_config().learning_rate);
  EXPECT_EQ(c.world.n_pts, 200u);
}

TEST(Bench, ClickMass) {
  std::vector<ClickRecord> log(3);
  log[0].item.pt = ProductTypeId{0};
  log[0].clicks = 3;
  log[1].item.pt = ProductTypeId{2};
  log[1].clicks = 5;
  log[2].item.pt = ProductTypeId{0};
  log[2].clicks = 1;
  EXPECT_EQ(click_mass(log, 3), (std::vector<double>{4, 0, 5}));
  EXPECT_THROW(click_mass(log, 2), DataError);
}
