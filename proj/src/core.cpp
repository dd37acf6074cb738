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

#include "localeq/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace localeq {

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "?";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kDerived: return "derived";
    case Provenance::kSyntheticGold: return "synthetic-gold";
    case Provenance::kExternal: return "external";
  }
  return "?";
}

Dataset::Dataset(std::vector<LabeledExample> examples, Split split, Provenance provenance,
                 std::size_t n_locales)
    : examples_(std::move(examples)), split_(split), provenance_(provenance), per_locale_(n_locales, 0) {
  for (auto& ex : examples_) {
    if (ex.labels.empty()) throw DataError("example '" + ex.query + "' has no labels");
    std::sort(ex.labels.begin(), ex.labels.end());
    if (std::adjacent_find(ex.labels.begin(), ex.labels.end()) != ex.labels.end())
      throw DataError("example '" + ex.query + "' has duplicate labels");
    if (ex.locale.index >= n_locales) throw DataError("example locale index out of range");
    ++per_locale_[ex.locale.index];
  }
}

LocaleBuckets bucket_locales(const std::vector<std::size_t>& counts, std::size_t k) {
  std::vector<std::uint32_t> order(counts.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return counts[a] > counts[b]; });
  LocaleBuckets out;
  for (std::size_t r = 0; r < order.size(); ++r)
    (r < k ? out.hi_re : out.lo_re).push_back(LocaleId{order[r]});
  auto by_index = [](LocaleId a, LocaleId b) { return a.index < b.index; };
  std::sort(out.hi_re.begin(), out.hi_re.end(), by_index);
  std::sort(out.lo_re.begin(), out.lo_re.end(), by_index);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("write failed for '" + path + "'");
}

namespace {

constexpr std::string_view kClicklogHeader =
    "locale_code\tquery\titem_index\tpt_name\tclicks\timpressions";

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

std::string at_line(std::size_t line, std::string_view msg) {
  return "line " + std::to_string(line) + ": " + std::string(msg);
}

std::uint64_t parse_u64(std::string_view s, std::size_t line, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw DataError(at_line(line, "bad " + std::string(what) + " '" + std::string(s) + "'"));
  return v;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

// Consumes the version line and returns the index of the first line after it.
std::size_t check_version(const std::vector<std::string_view>& lines) {
  if (lines.empty()) return 0;
  if (lines[0] != kFormatLine)
    throw DataError(at_line(1, "expected format line '" + std::string(kFormatLine) + "'"));
  return 1;
}

}  // namespace

std::vector<ClickRecord> parse_clicklog(std::string_view text, Catalog& catalog) {
  std::vector<ClickRecord> out;
  auto lines = split_lines(text);
  while (!lines.empty() && is_blank(lines.back())) lines.pop_back();
  std::size_t i = check_version(lines);
  if (i >= lines.size()) return out;
  if (lines[i] != kClicklogHeader) throw DataError(at_line(i + 1, "missing or malformed header"));
  for (++i; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    std::vector<std::string_view> cols;
    std::string_view rest = lines[i];
    for (;;) {
      auto tab = rest.find('\t');
      cols.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (cols.size() != 6) throw DataError(at_line(ln, "expected 6 tab-separated columns"));
    ClickRecord rec;
    auto locale = catalog.locales.find(cols[0]);
    if (!locale) {
      if (catalog.locales.frozen())
        throw DataError(at_line(ln, "unknown locale code '" + std::string(cols[0]) + "'"));
      if (cols[0].empty()) throw DataError(at_line(ln, "empty locale code"));
      locale = catalog.locales.intern(cols[0]);
    }
    rec.locale = *locale;
    rec.query = std::string(cols[1]);
    const auto item_index = parse_u64(cols[2], ln, "item_index");
    if (item_index > UINT32_MAX) throw DataError(at_line(ln, "item_index out of range"));
    auto pt = catalog.pts.find(cols[3]);
    if (!pt) {
      if (catalog.pts.frozen())
        throw DataError(at_line(ln, "unknown product type '" + std::string(cols[3]) + "'"));
      if (cols[3].empty()) throw DataError(at_line(ln, "empty product type"));
      pt = catalog.pts.intern(cols[3]);
    }
    auto [it, inserted] = catalog.item_pt.emplace(static_cast<std::uint32_t>(item_index), *pt);
    if (!inserted && it->second != *pt)
      throw DataError(at_line(ln, "item " + std::to_string(item_index) + " mapped to two product types"));
    rec.item = ItemId{static_cast<std::uint32_t>(item_index), *pt};
    rec.clicks = parse_u64(cols[4], ln, "clicks");
    rec.impressions = parse_u64(cols[5], ln, "impressions");
    if (rec.impressions != 0 && rec.impressions < rec.clicks)
      throw DataError(at_line(ln, "clicks exceed impressions"));
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<ClickRecord> load_clicklog(const std::string& path, Catalog& catalog) {
  return parse_clicklog(read_file(path), catalog);
}

std::string format_clicklog(const std::vector<ClickRecord>& records, const Catalog& catalog) {
  std::string out;
  out.reserve(64 + records.size() * 48);
  out += kFormatLine;
  out += '\n';
  out += kClicklogHeader;
  out += '\n';
  for (const auto& r : records) {
    if (r.query.find_first_of("\t\n") != std::string::npos)
      throw DataError("query contains a tab or newline: '" + r.query + "'");
    out += catalog.locales.name(r.locale);
    out += '\t';
    out += r.query;
    out += '\t';
    out += std::to_string(r.item.index);
    out += '\t';
    out += catalog.pts.name(r.item.pt);
    out += '\t';
    out += std::to_string(r.clicks);
    out += '\t';
    out += std::to_string(r.impressions);
    out += '\n';
  }
  return out;
}

void save_clicklog(const std::string& path, const std::vector<ClickRecord>& records,
                   const Catalog& catalog) {
  write_file(path, format_clicklog(records, catalog));
}

Dataset parse_dataset(std::string_view text, Catalog& catalog, Split split, Provenance provenance) {
  using nlohmann::json;
  std::vector<LabeledExample> examples;
  auto lines = split_lines(text);
  std::size_t i = check_version(lines);
  for (; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    const std::size_t ln = i + 1;
    json obj;
    try {
      obj = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw DataError(at_line(ln, std::string("invalid JSON: ") + e.what()));
    }
    if (!obj.is_object() || !obj.contains("locale") || !obj.contains("query") || !obj.contains("labels") ||
        !obj["locale"].is_string() || !obj["query"].is_string() || !obj["labels"].is_array())
      throw DataError(at_line(ln, "expected object with string locale, string query, array labels"));
    LabeledExample ex;
    try {
      ex.locale = catalog.locales.intern(obj["locale"].get<std::string>());
      ex.query = obj["query"].get<std::string>();
      for (const auto& l : obj["labels"]) {
        if (!l.is_string()) throw DataError("label is not a string");
        ex.labels.push_back(catalog.pts.intern(l.get<std::string>()));
      }
    } catch (const DataError& e) {
      throw DataError(at_line(ln, e.what()));
    }
    examples.push_back(std::move(ex));
  }
  try {
    return Dataset(std::move(examples), split, provenance, catalog.locales.size());
  } catch (const DataError& e) {
    throw DataError(std::string("dataset: ") + e.what());
  }
}

Dataset load_dataset(const std::string& path, Catalog& catalog, Split split, Provenance provenance) {
  return parse_dataset(read_file(path), catalog, split, provenance);
}

std::string format_dataset(const Dataset& dataset, const Catalog& catalog) {
  using nlohmann::ordered_json;
  std::string out(kFormatLine);
  out += '\n';
  for (const auto& ex : dataset.examples()) {
    ordered_json obj;
    obj["locale"] = catalog.locales.name(ex.locale);
    obj["query"] = ex.query;
    auto labels = ordered_json::array();
    for (auto pt : ex.labels) labels.push_back(catalog.pts.name(pt));
    obj["labels"] = std::move(labels);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_dataset(const std::string& path, const Dataset& dataset, const Catalog& catalog) {
  write_file(path, format_dataset(dataset, catalog));
}

}  // namespace localeq
