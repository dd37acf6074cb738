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

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace localeq {

inline constexpr std::string_view kFormatLine = "#localeq-format v1";

// Bad input data or a violated invariant in user-supplied files. The CLI maps
// this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LocaleId {
  std::uint32_t index = 0;
  auto operator<=>(const LocaleId&) const = default;
};

struct ProductTypeId {
  std::uint32_t index = 0;
  auto operator<=>(const ProductTypeId&) const = default;
};

struct ItemId {
  std::uint32_t index = 0;
  ProductTypeId pt;
  auto operator<=>(const ItemId&) const = default;
};

// Dense string <-> index map. After freeze() lookups never mutate.
template <typename Id>
class Registry {
 public:
  Registry() = default;
  explicit Registry(std::vector<std::string> names) {
    for (auto& n : names) intern(n);
  }

  Id intern(std::string_view key) {
    if (auto found = find(key)) return *found;
    if (frozen_) throw DataError("unknown key '" + std::string(key) + "' in frozen registry");
    const auto idx = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(key);
    index_.emplace(names_.back(), idx);
    return Id{idx};
  }

  std::optional<Id> find(std::string_view key) const {
    auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return Id{it->second};
  }

  Id at(std::string_view key) const {
    if (auto found = find(key)) return *found;
    throw DataError("unknown key '" + std::string(key) + "'");
  }

  const std::string& name(Id id) const { return names_.at(id.index); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  bool operator==(const Registry& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
  bool frozen_ = false;
};

using LocaleRegistry = Registry<LocaleId>;
using PtRegistry = Registry<ProductTypeId>;

// Locale and product-type registries plus the item -> product type map.
struct Catalog {
  LocaleRegistry locales;
  PtRegistry pts;
  std::unordered_map<std::uint32_t, ProductTypeId> item_pt;

  void freeze() {
    locales.freeze();
    pts.freeze();
  }
};

struct ClickRecord {
  LocaleId locale;
  std::string query;
  ItemId item;
  std::uint64_t clicks = 0;
  std::uint64_t impressions = 0;  // 0 = unknown
};

struct LabeledExample {
  LocaleId locale;
  std::string query;
  std::vector<ProductTypeId> labels;  // sorted, unique, non-empty
};

enum class Split { kTrain, kValidation, kTest };
enum class Provenance { kDerived, kSyntheticGold, kExternal };

std::string_view to_string(Split s);
std::string_view to_string(Provenance p);

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<LabeledExample> examples, Split split, Provenance provenance,
          std::size_t n_locales);

  const std::vector<LabeledExample>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  Split split() const { return split_; }
  Provenance provenance() const { return provenance_; }
  std::size_t count(LocaleId l) const { return per_locale_.at(l.index); }
  const std::vector<std::size_t>& per_locale_counts() const { return per_locale_; }

 private:
  std::vector<LabeledExample> examples_;
  Split split_ = Split::kTrain;
  Provenance provenance_ = Provenance::kExternal;
  std::vector<std::size_t> per_locale_;
};

struct LocaleBuckets {
  std::vector<LocaleId> hi_re;
  std::vector<LocaleId> lo_re;
};

// The k locales with the most samples are high-resource; ties go to the
// lower index.
LocaleBuckets bucket_locales(const std::vector<std::size_t>& counts, std::size_t k);

// --- file formats -----------------------------------------------------------

std::vector<ClickRecord> load_clicklog(const std::string& path, Catalog& catalog);
std::vector<ClickRecord> parse_clicklog(std::string_view text, Catalog& catalog);
std::string format_clicklog(const std::vector<ClickRecord>& records, const Catalog& catalog);
void save_clicklog(const std::string& path, const std::vector<ClickRecord>& records,
                   const Catalog& catalog);

Dataset load_dataset(const std::string& path, Catalog& catalog, Split split, Provenance provenance);
Dataset parse_dataset(std::string_view text, Catalog& catalog, Split split, Provenance provenance);
std::string format_dataset(const Dataset& dataset, const Catalog& catalog);
void save_dataset(const std::string& path, const Dataset& dataset, const Catalog& catalog);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace localeq
