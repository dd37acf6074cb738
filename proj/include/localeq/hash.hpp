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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace localeq {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = kFnvOffset;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

// CRC-64/XZ (ECMA-182 polynomial, reflected, init and xorout all ones).
class Crc64 {
 public:
  Crc64() = default;
  void update(std::span<const std::uint8_t> data);
  void update(std::string_view data);
  std::uint64_t value() const { return ~state_; }

  static std::uint64_t of(std::span<const std::uint8_t> data) {
    Crc64 c;
    c.update(data);
    return c.value();
  }

 private:
  std::uint64_t state_ = ~0ULL;
};

}  // namespace localeq
