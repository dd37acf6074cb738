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

#include "localeq/tokenizer.hpp"

#include <stdexcept>

#include "localeq/hash.hpp"

namespace localeq {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

// Invalid sequences decode byte by byte and are passed through untouched.
std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xc2 && b0 <= 0xdf) { len = 2; cp = b0 & 0x1f; }
    else if (b0 >= 0xe0 && b0 <= 0xef) { len = 3; cp = b0 & 0x0f; }
    else if (b0 >= 0xf0 && b0 <= 0xf4) { len = 4; cp = b0 & 0x07; }
    bool ok = i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xc0) != 0x80) ok = false;
      else cp = (cp << 6) | (b & 0x3f);
    }
    if (!ok) { len = 1; cp = 0xfffd0000u | b0; }  // marker: raw byte
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

char32_t lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c < 0x80) return c;
  if (c >= 0xc0 && c <= 0xde && c != 0xd7) return c + 32;
  if (c == 0x130) return U'i';
  if (c == 0x178) return 0xff;
  if ((c >= 0x100 && c <= 0x137) || (c >= 0x14a && c <= 0x177)) return (c % 2 == 0) ? c + 1 : c;
  if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17e)) return (c % 2 == 1) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3a9 && c != 0x3a2) return c + 32;
  if (c == 0x386) return 0x3ac;
  if (c >= 0x388 && c <= 0x38a) return c + 37;
  if (c == 0x38c) return 0x3cc;
  if (c == 0x38e || c == 0x38f) return c + 63;
  if (c >= 0x410 && c <= 0x42f) return c + 32;
  if (c >= 0x400 && c <= 0x40f) return c + 80;
  return c;
}

void append_utf8(std::string& out, char32_t c) {
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xc0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3f));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xe0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (c & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (c & 0x3f));
  }
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::string utf8_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto& cp : decode(s)) {
    if ((cp.value & 0xffff0000u) == 0xfffd0000u) out += s[cp.offset];
    else append_utf8(out, lower(cp.value));
  }
  return out;
}

Tokenizer::Tokenizer(std::size_t n_locales, std::size_t n_buckets, std::size_t max_len)
    : n_locales_(n_locales), n_buckets_(n_buckets), max_len_(max_len) {
  if (max_len < 3) throw std::invalid_argument("tokenizer: max_len must be >= 3");
  if (n_buckets == 0) throw std::invalid_argument("tokenizer: n_buckets must be >= 1");
}

std::uint32_t Tokenizer::locale_token(LocaleId l) const {
  if (l.index >= n_locales_) throw std::out_of_range("tokenizer: locale index out of range");
  return kFirstLocaleToken + l.index;
}

std::uint32_t Tokenizer::bucket_token(std::string_view piece) const {
  return static_cast<std::uint32_t>(kFirstLocaleToken + n_locales_ + fnv1a64(piece) % n_buckets_);
}

TokenSequence Tokenizer::tokenize(std::string_view query, std::optional<LocaleId> locale) const {
  if (locale) return build(query, locale_token(*locale));
  return build(query, std::nullopt);
}

TokenSequence Tokenizer::tokenize_unknown_locale(std::string_view query) const {
  return build(query, kUnkLocaleToken);
}

TokenSequence Tokenizer::build(std::string_view query, std::optional<std::uint32_t> prefix) const {
  TokenSequence seq;
  seq.ids.push_back(kClsToken);
  if (prefix) {
    seq.ids.push_back(*prefix);
    seq.ids.push_back(kSepToken);
  }
  const std::string text = utf8_lower(query);
  std::string_view rest(text);
  while (seq.ids.size() < max_len_) {
    while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
    if (rest.empty()) break;
    std::size_t end = 0;
    while (end < rest.size() && !is_space(rest[end])) ++end;
    const std::string_view word = rest.substr(0, end);
    rest.remove_prefix(end);

    seq.ids.push_back(bucket_token(word));
    const auto cps = decode(word);
    if (cps.size() > 3) {
      for (std::size_t i = 0; i + 3 <= cps.size() && seq.ids.size() < max_len_; ++i) {
        const auto begin = cps[i].offset;
        const auto stop = cps[i + 2].offset + cps[i + 2].length;
        seq.ids.push_back(bucket_token(word.substr(begin, stop - begin)));
      }
    }
  }
  if (seq.ids.size() > max_len_) seq.ids.resize(max_len_);
  return seq;
}

}  // namespace localeq
