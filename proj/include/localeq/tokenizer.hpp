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
#include <string_view>
#include <vector>

#include "localeq/core.hpp"

namespace localeq {

inline constexpr std::uint32_t kPadToken = 0;
inline constexpr std::uint32_t kClsToken = 1;
inline constexpr std::uint32_t kSepToken = 2;
inline constexpr std::uint32_t kUnkLocaleToken = 3;
inline constexpr std::uint32_t kFirstLocaleToken = 4;

struct TokenSequence {
  std::vector<std::uint32_t> ids;
  bool operator==(const TokenSequence&) const = default;
};

// Lowercases ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic letters.
// Other code points pass through unchanged.
std::string utf8_lower(std::string_view s);

// Hashing tokenizer. Each whitespace-separated word yields its whole-word
// bucket followed by the buckets of its character trigrams (words of more
// than three code points only). Buckets are FNV-1a 64 of the UTF-8 bytes
// modulo n_buckets, placed after the reserved and locale ids.
class Tokenizer {
 public:
  Tokenizer(std::size_t n_locales, std::size_t n_buckets, std::size_t max_len);

  TokenSequence tokenize(std::string_view query, std::optional<LocaleId> locale) const;
  // Locale-prefixed layout with the reserved unknown-locale token.
  TokenSequence tokenize_unknown_locale(std::string_view query) const;

  std::uint32_t locale_token(LocaleId l) const;
  std::uint32_t bucket_token(std::string_view piece) const;

  std::size_t n_locales() const { return n_locales_; }
  std::size_t n_buckets() const { return n_buckets_; }
  std::size_t max_len() const { return max_len_; }
  std::size_t vocab_total() const { return kFirstLocaleToken + n_locales_ + n_buckets_; }

 private:
  TokenSequence build(std::string_view query, std::optional<std::uint32_t> prefix) const;

  std::size_t n_locales_;
  std::size_t n_buckets_;
  std::size_t max_len_;
};

}  // namespace localeq
