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
#include <string>
#include <string_view>

#include "localeq/core.hpp"
#include "localeq/model.hpp"

namespace localeq {

inline constexpr std::string_view kCheckpointMagic = "LQPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public DataError {
 public:
  using DataError::DataError;
};

// Layout, all integers little-endian:
//   "LQPT" | u32 version | u64 CRC-64/XZ of payload | payload
//   payload = u64 header length | JSON header | f64 tensor values
// Tensors follow ModelBundle::parameter_list() order: every encoder's
// tensors (embeddings, layers, final norm), then each head's weight and bias.
std::string serialize_checkpoint(const ModelBundle& bundle);
ModelBundle deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::string& path, const ModelBundle& bundle);
ModelBundle load_checkpoint(const std::string& path);

// Hex CRC of the serialized bundle; identifies a model in reports and the server.
std::string model_version(const ModelBundle& bundle);

}  // namespace localeq
