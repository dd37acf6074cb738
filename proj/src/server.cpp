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

#include "localeq/server.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

// The default backlog of 5 drops connections under a burst of clients.
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#include "httplib.h"
#include "json.hpp"
#include "localeq/checkpoint.hpp"

namespace localeq {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

HttpReply error_reply(int status, const std::string& message) {
  ordered_json j;
  j["error"] = message;
  return {status, j.dump()};
}

bool is_json_content_type(std::string_view ct) {
  const auto semi = ct.find(';');
  std::string base(ct.substr(0, semi));
  base.erase(std::remove_if(base.begin(), base.end(), [](unsigned char c) { return std::isspace(c); }), base.end());
  std::transform(base.begin(), base.end(), base.begin(), [](unsigned char c) { return std::tolower(c); });
  return base == "application/json";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

PredictService::PredictService(ModelBundle bundle, Calibration calibration)
    : bundle_(std::move(bundle)), calibration_(std::move(calibration)), version_(localeq::model_version(bundle_)) {}

std::string prediction_body(const ModelBundle& bundle, const Prediction& p, double threshold,
                            const std::string& model_version) {
  ordered_json j;
  ordered_json pts = ordered_json::array();
  for (const auto& s : p.product_types) pts.push_back({{"name", bundle.pts.name(s.pt)}, {"score", s.score}});
  j["product_types"] = std::move(pts);
  j["refused"] = p.refused();
  j["locale_known"] = p.locale_known;
  j["threshold"] = threshold;
  j["model_version"] = model_version;
  return j.dump();
}

HttpReply PredictService::predict(std::string_view content_type, std::string_view body) const {
  if (!is_json_content_type(content_type)) return error_reply(415, "content type must be application/json");
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return error_reply(400, "request body is not valid JSON");
  }
  if (!req.is_object()) return error_reply(400, "request body must be a JSON object");
  if (!req.contains("query") || !req["query"].is_string()) return error_reply(400, "\"query\" must be a string");
  if (!req.contains("locale") || !req["locale"].is_string()) return error_reply(400, "\"locale\" must be a string");
  for (const auto& [key, v] : req.items())
    if (key != "query" && key != "locale" && key != "threshold") return error_reply(400, "unknown field \"" + key + "\"");
  const auto query = req["query"].get<std::string>();
  const auto locale = req["locale"].get<std::string>();
  if (trim(query).empty()) return error_reply(422, "query is empty");

  double threshold = calibration_.threshold_for(locale);
  if (req.contains("threshold")) {
    if (!req["threshold"].is_number()) return error_reply(400, "\"threshold\" must be a number");
    threshold = req["threshold"].get<double>();
    if (!(threshold >= 0.0 && threshold <= 1.0)) return error_reply(422, "threshold must be in [0, 1]");
  }
  try {
    const auto p = localeq::predict(bundle_, query, locale, threshold);
    return {200, prediction_body(bundle_, p, threshold, version_)};
  } catch (const DataError& e) {
    return error_reply(422, e.what());
  }
}

HttpReply PredictService::version() const {
  ordered_json j;
  j["model_version"] = version_;
  j["variant"] = std::string(to_string(bundle_.variant));
  return {200, j.dump()};
}

PredictServer::PredictServer(std::shared_ptr<const PredictService> service)
    : service_(std::move(service)), http_(std::make_unique<httplib::Server>()) {
  auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  auto svc = service_;
  http_->Post("/predict", [svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->predict(req.get_header_value("Content-Type"), req.body));
  });
  http_->Get("/healthz", [svc, send](const httplib::Request&, httplib::Response& res) { send(res, svc->healthz()); });
  http_->Get("/version", [svc, send](const httplib::Request&, httplib::Response& res) { send(res, svc->version()); });
}

PredictServer::~PredictServer() { stop(); }

int PredictServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) bound = http_->bind_to_any_port(host);
  else if (!http_->bind_to_port(host, port)) bound = -1;
  if (bound <= 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return bound;
}

void PredictServer::listen(const std::string& host, int port) {
  if (!http_->bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  http_->listen_after_bind();
}

void PredictServer::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

std::pair<std::string, int> parse_bind(std::string_view bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string_view::npos || colon == 0) throw std::invalid_argument("bind address must be host:port");
  int port = -1;
  const auto digits = bind.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || port < 0 || port > 65535)
    throw std::invalid_argument("bad port in bind address '" + std::string(bind) + "'");
  return {std::string(bind.substr(0, colon)), port};
}

}  // namespace localeq
