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

#include "localeq/server.hpp"

#include "httplib.h"
#include "json.hpp"

using namespace localeq;
using nlohmann::json;

namespace {

ModelBundle small(VariantKind v) {
  EncoderConfig c;
  c.d_model = 8;
  c.n_layers = 1;
  c.n_heads = 2;
  c.d_ff = 16;
  c.max_len = 10;
  c.n_buckets = 64;
  return ModelBundle::create(v, c, LocaleRegistry({"US", "DE"}), PtRegistry({"mug", "book", "lamp"}), 5);
}

PredictService service(VariantKind v, double threshold = 0.4) {
  Calibration cal;
  cal.per_locale["US"] = threshold;
  cal.global = 0.45;
  return PredictService(small(v), cal);
}

}  // namespace

TEST(Server, StatusCodes) {
  const auto svc = service(VariantKind::kNonUnified);
  EXPECT_EQ(svc.predict("text/plain", R"({"query":"mug","locale":"US"})").status, 415);
  EXPECT_EQ(svc.predict("application/json", "{not json").status, 400);
  EXPECT_EQ(svc.predict("application/json", "[1,2]").status, 400);
  EXPECT_EQ(svc.predict("application/json", R"({"locale":"US"})").status, 400);
  EXPECT_EQ(svc.predict("application/json", R"({"query":3,"locale":"US"})").status, 400);
  EXPECT_EQ(svc.predict("application/json", R"({"query":"mug"})").status, 400);
  EXPECT_EQ(svc.predict("application/json", R"({"query":"mug","locale":"US","extra":1})").status, 400);
  EXPECT_EQ(svc.predict("application/json", R"({"query":"mug","locale":"US","threshold":"x"})").status, 400);
  EXPECT_EQ(svc.predict("application/json", R"({"query":"   ","locale":"US"})").status, 422);
  EXPECT_EQ(svc.predict("application/json", R"({"query":"mug","locale":"US","threshold":1.5})").status, 422);
  EXPECT_EQ(svc.predict("application/json", R"({"query":"mug","locale":"FR"})").status, 422);
  EXPECT_EQ(svc.predict("Application/JSON; charset=utf-8", R"({"query":"mug","locale":"US"})").status, 200);
  const auto err = json::parse(svc.predict("text/plain", "").body);
  EXPECT_TRUE(err.contains("error"));
}

TEST(Server, BodyMatchesLibraryPrediction) {
  const auto svc = service(VariantKind::kUnifiedAware);
  for (const char* loc : {"US", "DE"}) {
    const std::string req = json{{"query", "blue coffee mug"}, {"locale", loc}}.dump();
    const auto r = svc.predict("application/json", req);
    ASSERT_EQ(r.status, 200);
    const double t = svc.calibration().threshold_for(loc);
    const auto p = predict(svc.bundle(), "blue coffee mug", loc, t);
    EXPECT_EQ(r.body, prediction_body(svc.bundle(), p, t, svc.model_version()));
  }
  EXPECT_DOUBLE_EQ(json::parse(svc.predict("application/json", R"({"query":"a","locale":"US"})").body)["threshold"]
                       .get<double>(),
                   0.4);
  EXPECT_DOUBLE_EQ(json::parse(svc.predict("application/json", R"({"query":"a","locale":"DE"})").body)["threshold"]
                       .get<double>(),
                   0.45);
}

TEST(Server, ThresholdOverrideAndRefusal) {
  const auto svc = service(VariantKind::kUnifiedAgnostic);
  const auto all = json::parse(svc.predict("application/json", R"({"query":"mug","locale":"US","threshold":0})").body);
  EXPECT_EQ(all["product_types"].size(), 3u);
  EXPECT_FALSE(all["refused"].get<bool>());
  double prev = 2.0;
  for (const auto& pt : all["product_types"]) {
    EXPECT_LE(pt["score"].get<double>(), prev);
    prev = pt["score"].get<double>();
  }
  const auto none = json::parse(svc.predict("application/json", R"({"query":"mug","locale":"US","threshold":1})").body);
  EXPECT_TRUE(none["product_types"].empty());
  EXPECT_TRUE(none["refused"].get<bool>());
}

TEST(Server, UnknownLocaleOnAwareModel) {
  const auto svc = service(VariantKind::kUnifiedAware);
  const auto r = svc.predict("application/json", R"({"query":"mug","locale":"JP"})");
  ASSERT_EQ(r.status, 200);
  EXPECT_FALSE(json::parse(r.body)["locale_known"].get<bool>());
  EXPECT_TRUE(json::parse(svc.predict("application/json", R"({"query":"mug","locale":"US"})").body)["locale_known"]
                  .get<bool>());
}

TEST(Server, VersionAndHealth) {
  const auto svc = service(VariantKind::kDisjointPerLocale);
  EXPECT_EQ(svc.healthz().status, 200);
  const auto v = json::parse(svc.version().body);
  EXPECT_EQ(v["model_version"], svc.model_version());
  EXPECT_EQ(v["variant"], "disjoint");
}

TEST(Server, HttpRoundTrip) {
  auto svc = std::make_shared<const PredictService>(service(VariantKind::kNonUnified));
  PredictServer server(svc);
  const int port = server.start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  httplib::Client cli("127.0.0.1", port);
  const std::string body = R"({"query":"lamp","locale":"DE"})";
  auto res = cli.Post("/predict", body, "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, svc->predict("application/json", body).body);
  res = cli.Post("/predict", body, "text/plain");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 415);
  res = cli.Get("/healthz");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = cli.Get("/version");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["model_version"], svc->model_version());
  server.stop();
}

TEST(Server, ParseBind) {
  EXPECT_EQ(parse_bind("0.0.0.0:8080"), std::make_pair(std::string("0.0.0.0"), 8080));
  EXPECT_THROW(parse_bind("8080"), std::invalid_argument);
  EXPECT_THROW(parse_bind("host:"), std::invalid_argument);
  EXPECT_THROW(parse_bind("host:70000"), std::invalid_argument);
}
