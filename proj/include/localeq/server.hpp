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

#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include "localeq/metrics.hpp"
#include "localeq/model.hpp"

namespace httplib {
class Server;
}

namespace localeq {

struct HttpReply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Request handling without the transport, so it can be tested in-process.
// Immutable after construction; safe to call from many threads.
class PredictService {
 public:
  PredictService(ModelBundle bundle, Calibration calibration);

  HttpReply predict(std::string_view content_type, std::string_view body) const;
  HttpReply healthz() const { return {200, "ok", "text/plain"}; }
  HttpReply version() const;

  const ModelBundle& bundle() const { return bundle_; }
  const Calibration& calibration() const { return calibration_; }
  const std::string& model_version() const { return version_; }

 private:
  ModelBundle bundle_;
  Calibration calibration_;
  std::string version_;
};

// JSON body that POST /predict returns for a successful prediction.
std::string prediction_body(const ModelBundle& bundle, const Prediction& p, double threshold,
                            const std::string& model_version);

// HTTP front end. start() binds and serves on a background thread.
class PredictServer {
 public:
  explicit PredictServer(std::shared_ptr<const PredictService> service);
  ~PredictServer();
  PredictServer(const PredictServer&) = delete;
  PredictServer& operator=(const PredictServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws on failure.
  int start(const std::string& host, int port);
  // Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

 private:
  std::shared_ptr<const PredictService> service_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

// "host:port" -> (host, port); throws std::invalid_argument.
std::pair<std::string, int> parse_bind(std::string_view bind);

}  // namespace localeq
