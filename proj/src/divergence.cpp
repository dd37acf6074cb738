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

#include "localeq/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace localeq {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Dominant PT of a count map: most clicks, ties to the lower index.
ProductTypeId dominant(const std::map<ProductTypeId, std::uint64_t>& counts) {
  ProductTypeId best{};
  std::uint64_t most = 0;
  for (const auto& [pt, c] : counts)
    if (c > most) {
      most = c;
      best = pt;
    }
  return best;
}

std::uint64_t count_of(const std::map<ProductTypeId, std::uint64_t>& counts, ProductTypeId pt) {
  auto it = counts.find(pt);
  return it == counts.end() ? 0 : it->second;
}

std::uint64_t total_of(const std::map<ProductTypeId, std::uint64_t>& counts) {
  std::uint64_t t = 0;
  for (const auto& [pt, c] : counts) t += c;
  return t;
}

}  // namespace

ClickIndex::ClickIndex(const std::vector<ClickRecord>& clicklog, std::size_t n_locales, std::size_t n_pts)
    : n_pts_(n_pts), per_locale_(n_locales), pt_totals_(n_locales, std::vector<std::uint64_t>(n_pts, 0)) {
  for (const auto& r : clicklog) {
    if (r.clicks == 0) continue;
    if (r.locale.index >= n_locales || r.item.pt.index >= n_pts)
      throw DataError("click record outside the locale / product-type registries");
    auto it = per_locale_[r.locale.index].find(r.query);
    if (it == per_locale_[r.locale.index].end()) it = per_locale_[r.locale.index].emplace(r.query, std::map<ProductTypeId, std::uint64_t>{}).first;
    it->second[r.item.pt] += r.clicks;
    pt_totals_[r.locale.index][r.item.pt.index] += r.clicks;
  }
}

const std::map<ProductTypeId, std::uint64_t>* ClickIndex::counts(LocaleId l, std::string_view query) const {
  if (l.index >= per_locale_.size()) return nullptr;
  const auto& m = per_locale_[l.index];
  auto it = m.find(query);
  return it == m.end() ? nullptr : &it->second;
}

std::uint64_t ClickIndex::locale_pt_clicks(LocaleId l, ProductTypeId pt) const {
  return pt_totals_.at(l.index).at(pt.index);
}

std::vector<std::string> ClickIndex::queries(LocaleId l) const {
  std::vector<std::string> out;
  for (const auto& [q, c] : per_locale_.at(l.index)) out.push_back(q);
  return out;
}

std::optional<PTDistribution> pt_distribution(const ClickIndex& index, LocaleId locale, std::string_view query) {
  const auto* counts = index.counts(locale, query);
  if (!counts) return std::nullopt;
  const std::uint64_t total = total_of(*counts);
  if (total == 0) return std::nullopt;
  PTDistribution d;
  d.probs.assign(index.n_pts(), 0.0);
  d.total_clicks = total;
  for (const auto& [pt, c] : *counts) {
    d.probs[pt.index] = static_cast<double>(c) / static_cast<double>(total);
    ++d.support;
  }
  return d;
}

double emd_unit(const PTDistribution& p, const PTDistribution& q) {
  if (p.probs.size() != q.probs.size()) throw std::invalid_argument("emd_unit: distributions use different registries");
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) l1 += std::abs(p.probs[i] - q.probs[i]);
  return std::clamp(0.5 * l1, 0.0, 1.0);
}

PairDivergence pair_divergence(const ClickIndex& index, LocaleId a, LocaleId b, std::uint64_t min_clicks,
                               std::size_t bins) {
  if (a.index >= index.n_locales() || b.index >= index.n_locales())
    throw DataError("pair_divergence: locale not present in the click log registry");
  if (bins == 0) throw std::invalid_argument("pair_divergence: bins must be >= 1");
  PairDivergence out;
  for (const auto& q : index.queries(a)) {
    const auto pa = pt_distribution(index, a, q);
    const auto pb = pt_distribution(index, b, q);
    if (!pa || !pb || pa->total_clicks < min_clicks || pb->total_clicks < min_clicks) continue;
    out.records.push_back({q, a, b, emd_unit(*pa, *pb), pa->total_clicks, pb->total_clicks});
  }
  out.empty_intersection = out.records.empty();

  std::vector<std::size_t> counts(bins, 0);
  for (const auto& r : out.records) {
    auto k = static_cast<std::size_t>(r.emd * static_cast<double>(bins));
    counts[std::min(k, bins - 1)] += 1;
  }
  const double width = 1.0 / static_cast<double>(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    HistogramBin bin;
    bin.lo = static_cast<double>(k) * width;
    bin.hi = k + 1 == bins ? 1.0 : static_cast<double>(k + 1) * width;
    bin.density = out.records.empty()
                      ? 0.0
                      : static_cast<double>(counts[k]) / (static_cast<double>(out.records.size()) * width);
    out.histogram.push_back(bin);
  }
  return out;
}

std::string_view to_string(DivergenceCategory c) {
  switch (c) {
    case DivergenceCategory::kSimilar: return "similar";
    case DivergenceCategory::kNoisy: return "noisy";
    case DivergenceCategory::kDialectalOrSelection: return "dialectal-or-selection";
    case DivergenceCategory::kSelection: return "selection";
  }
  return "?";
}

double two_proportion_p_value(std::uint64_t x1, std::uint64_t n1, std::uint64_t x2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) return 1.0;
  const double p1 = static_cast<double>(x1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(x2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
  const double var = pooled * (1.0 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
  if (var <= 0.0) return p1 == p2 ? 1.0 : 0.0;
  const double z = (p1 - p2) / std::sqrt(var);
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

DivergenceCategory categorize(const EMDRecord& record, const ClickIndex& index, const CategorizeOptions& opts) {
  if (record.emd < opts.similar_below) return DivergenceCategory::kSimilar;
  const auto* ca = index.counts(record.locale_a, record.query);
  const auto* cb = index.counts(record.locale_b, record.query);
  if (!ca || !cb) return DivergenceCategory::kNoisy;
  const std::uint64_t na = total_of(*ca), nb = total_of(*cb);
  const ProductTypeId da = dominant(*ca), db = dominant(*cb);
  auto not_rejected = [&](ProductTypeId pt) {
    return two_proportion_p_value(count_of(*ca, pt), na, count_of(*cb, pt), nb) >= opts.alpha;
  };
  if (not_rejected(da) && not_rejected(db)) return DivergenceCategory::kNoisy;
  if (index.locale_pt_clicks(record.locale_b, da) == 0 || index.locale_pt_clicks(record.locale_a, db) == 0)
    return DivergenceCategory::kSelection;
  return DivergenceCategory::kDialectalOrSelection;
}

std::string emd_records_csv(const PairDivergence& d, const LocaleRegistry& locales, const ClickIndex& index,
                            const CategorizeOptions& opts) {
  std::string out(kFormatLine);
  out += "\nquery,locale_a,locale_b,emd,clicks_a,clicks_b,category\n";
  for (const auto& r : d.records)
    out += csv_field(r.query) + "," + locales.name(r.locale_a) + "," + locales.name(r.locale_b) + "," + fmt(r.emd) +
           "," + std::to_string(r.clicks_a) + "," + std::to_string(r.clicks_b) + "," +
           std::string(to_string(categorize(r, index, opts))) + "\n";
  return out;
}

std::string emd_histogram_csv(const PairDivergence& d) {
  std::string out(kFormatLine);
  out += "\nbin_lo,bin_hi,density\n";
  for (const auto& b : d.histogram) out += fmt(b.lo) + "," + fmt(b.hi) + "," + fmt(b.density) + "\n";
  return out;
}

}  // namespace localeq
