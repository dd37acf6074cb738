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
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "localeq/core.hpp"

namespace localeq {

struct WorldSpec {
  std::size_t n_locales = 20;
  std::size_t n_pts = 200;
  std::size_t n_items_per_pt = 4;
  double zipf_exponent = 1.1;
  double hi_re_fraction = 0.45;
  double size_ratio = 100.0;
  std::size_t vocab_size = 1100;
  std::size_t terms_per_pt = 5;
  double flip_fraction = 0.02;
  double selection_fraction = 0.05;
  double click_noise = 0.1;
  // Explicit per-locale query counts keyed by locale code. When empty the
  // counts come from hi_re_queries, hi_re_fraction and size_ratio.
  std::map<std::string, std::size_t> queries_per_locale;
  std::uint64_t seed = 7;

  std::size_t n_templates = 4000;
  std::size_t hi_re_queries = 800;
  std::size_t clicks_per_query = 40;
  // Size of the locale group in which dialectal terms take their alternate
  // meaning, as a share of all locales.
  double flip_locale_fraction = 0.4;
  // Share of locales whose catalog drops a selection-masked product type.
  double selection_locale_fraction = 0.3;

  void validate() const;
  std::vector<std::string> locale_codes() const;
  std::vector<std::size_t> query_counts() const;
  std::size_t n_hi_re() const;
};

WorldSpec world_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const WorldSpec& spec);

struct FlipRecord {
  std::string query;
  LocaleId locale;
  ProductTypeId intended;
};

struct World {
  WorldSpec spec;
  Catalog catalog;
  std::vector<std::vector<bool>> in_catalog;     // [locale][pt]
  std::vector<std::string> templates;            // surface strings, unique
  std::vector<ProductTypeId> template_pt;        // intended PT before locale effects
  std::vector<std::vector<bool>> flipped;        // [template][locale], empty row if not dialectal
  std::vector<ProductTypeId> flip_alt;           // alternate PT of dialectal templates
  std::vector<std::vector<std::uint32_t>> locale_queries;  // template indices per locale
  std::vector<ClickRecord> clicklog;
  Dataset gold;
  std::vector<FlipRecord> flip_manifest;

  // PT a query from template t is meant to find in locale l, after dialect
  // flips and catalog redirects.
  ProductTypeId intended(std::size_t t, LocaleId l) const;
  ProductTypeId redirect(ProductTypeId pt, LocaleId l) const;
};

// Normalized Zipf weights by PT index (rank = index + 1).
std::vector<double> pt_popularity(const WorldSpec& spec);

World generate(const WorldSpec& spec);

struct WorldSplit {
  Dataset train_gold;
  Dataset val_gold;
  Dataset test_gold;
  std::vector<ClickRecord> train_clicklog;
  std::vector<Split> template_split;
};

// Splits by query template so no template lands in two splits.
WorldSplit split_world(const World& world, double train, double val, double test, std::uint64_t seed);

std::string format_flip_manifest(const std::vector<FlipRecord>& records, const Catalog& catalog);
std::vector<FlipRecord> parse_flip_manifest(std::string_view text, const Catalog& catalog);

// Writes clicklog.tsv, gold.jsonl, flip_manifest.jsonl and catalog.json.
void write_world(const World& world, const std::string& dir);

// Frozen locale and PT registries from a catalog.json written by write_world.
Catalog read_catalog_json(const std::string& path);

}  // namespace localeq
