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

#include "localeq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>
#include <span>
#include <unordered_map>
#include <unordered_set>

#include "localeq/rng.hpp"

namespace localeq {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kDefaultLocales[] = {"US", "DE", "UK", "JP", "IN", "IT", "CA", "FR", "ES", "MX",
                                         "BR", "AE", "AU", "SA", "EG", "NL", "TR", "SE", "SG", "PL"};

void require(bool ok, const std::string& msg) {
  if (!ok) throw DataError("world spec: " + msg);
}

bool is_fraction(double v) { return v >= 0.0 && v <= 1.0; }

std::string make_word(Rng& rng) {
  static constexpr std::string_view kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p",
                                                 "r", "s", "t", "v", "z", "br", "tr", "st", "pl"};
  static constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  static constexpr std::string_view kCodas[] = {"", "", "n", "r", "s", "l", "x"};
  std::string w;
  const auto syllables = 2 + rng.below(2);
  for (std::uint64_t s = 0; s < syllables; ++s) {
    w += kOnsets[rng.below(std::size(kOnsets))];
    w += kVowels[rng.below(std::size(kVowels))];
  }
  w += kCodas[rng.below(std::size(kCodas))];
  return w;
}

// Draws from a discrete distribution given its cumulative weights.
std::size_t draw_cumulative(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

// k distinct values from [0, n), in ascending order.
std::vector<std::uint32_t> sample_subset(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

void WorldSpec::validate() const {
  require(n_locales >= 1 && n_pts >= 1 && n_items_per_pt >= 1 && vocab_size >= 1 && terms_per_pt >= 1,
          "counts must be >= 1");
  require(n_templates >= 1 && hi_re_queries >= 1 && clicks_per_query >= 1, "counts must be >= 1");
  require(zipf_exponent > 0.0, "zipf_exponent must be positive");
  require(size_ratio > 0.0, "size_ratio must be positive");
  require(is_fraction(hi_re_fraction) && is_fraction(flip_fraction) && is_fraction(selection_fraction) &&
              is_fraction(click_noise) && is_fraction(flip_locale_fraction) &&
              is_fraction(selection_locale_fraction),
          "fractions must lie in [0, 1]");
  require(n_pts * terms_per_pt <= vocab_size,
          "n_pts * terms_per_pt exceeds vocab_size; cannot build disjoint term pools");
  const auto codes = locale_codes();
  for (const auto& [code, count] : queries_per_locale) {
    require(std::find(codes.begin(), codes.end(), code) != codes.end(),
            "queries_per_locale names unknown locale '" + code + "'");
    require(count >= 1, "queries_per_locale counts must be >= 1");
  }
  if (!queries_per_locale.empty())
    require(queries_per_locale.size() == n_locales, "queries_per_locale must list every locale");
  for (auto q : query_counts()) require(q <= n_templates, "a locale asks for more queries than n_templates");
}

std::vector<std::string> WorldSpec::locale_codes() const {
  std::vector<std::string> codes;
  for (std::size_t i = 0; i < n_locales; ++i) {
    if (n_locales <= std::size(kDefaultLocales)) {
      codes.emplace_back(kDefaultLocales[i]);
    } else {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "L%03zu", i);
      codes.emplace_back(buf);
    }
  }
  return codes;
}

std::size_t WorldSpec::n_hi_re() const {
  return static_cast<std::size_t>(std::llround(hi_re_fraction * static_cast<double>(n_locales)));
}

std::vector<std::size_t> WorldSpec::query_counts() const {
  std::vector<std::size_t> out(n_locales);
  const auto codes = locale_codes();
  if (!queries_per_locale.empty()) {
    for (std::size_t i = 0; i < n_locales; ++i) {
      auto it = queries_per_locale.find(codes[i]);
      out[i] = it == queries_per_locale.end() ? 0 : it->second;
    }
    return out;
  }
  const std::size_t hi = n_hi_re();
  const auto lo = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(static_cast<double>(hi_re_queries) / size_ratio)));
  for (std::size_t i = 0; i < n_locales; ++i) out[i] = i < hi ? hi_re_queries : lo;
  return out;
}

WorldSpec world_spec_from_json(const json& j) {
  if (!j.is_object()) throw DataError("world spec: expected a JSON object");
  WorldSpec s;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "n_locales") s.n_locales = v.get<std::size_t>();
      else if (key == "n_pts") s.n_pts = v.get<std::size_t>();
      else if (key == "n_items_per_pt") s.n_items_per_pt = v.get<std::size_t>();
      else if (key == "zipf_exponent") s.zipf_exponent = v.get<double>();
      else if (key == "hi_re_fraction") s.hi_re_fraction = v.get<double>();
      else if (key == "size_ratio") s.size_ratio = v.get<double>();
      else if (key == "vocab_size") s.vocab_size = v.get<std::size_t>();
      else if (key == "terms_per_pt") s.terms_per_pt = v.get<std::size_t>();
      else if (key == "flip_fraction") s.flip_fraction = v.get<double>();
      else if (key == "selection_fraction") s.selection_fraction = v.get<double>();
      else if (key == "click_noise") s.click_noise = v.get<double>();
      else if (key == "queries_per_locale") s.queries_per_locale = v.get<std::map<std::string, std::size_t>>();
      else if (key == "seed") s.seed = v.get<std::uint64_t>();
      else if (key == "n_templates") s.n_templates = v.get<std::size_t>();
      else if (key == "hi_re_queries") s.hi_re_queries = v.get<std::size_t>();
      else if (key == "clicks_per_query") s.clicks_per_query = v.get<std::size_t>();
      else if (key == "flip_locale_fraction") s.flip_locale_fraction = v.get<double>();
      else if (key == "selection_locale_fraction") s.selection_locale_fraction = v.get<double>();
      else throw DataError("world spec: unknown key '" + key + "'");
    } catch (const json::exception& e) {
      throw DataError("world spec: bad value for '" + key + "': " + e.what());
    }
  }
  s.validate();
  return s;
}

ordered_json to_json(const WorldSpec& s) {
  ordered_json j;
  j["n_locales"] = s.n_locales;
  j["n_pts"] = s.n_pts;
  j["n_items_per_pt"] = s.n_items_per_pt;
  j["zipf_exponent"] = s.zipf_exponent;
  j["hi_re_fraction"] = s.hi_re_fraction;
  j["size_ratio"] = s.size_ratio;
  j["vocab_size"] = s.vocab_size;
  j["terms_per_pt"] = s.terms_per_pt;
  j["flip_fraction"] = s.flip_fraction;
  j["selection_fraction"] = s.selection_fraction;
  j["click_noise"] = s.click_noise;
  if (!s.queries_per_locale.empty()) j["queries_per_locale"] = s.queries_per_locale;
  j["seed"] = s.seed;
  j["n_templates"] = s.n_templates;
  j["hi_re_queries"] = s.hi_re_queries;
  j["clicks_per_query"] = s.clicks_per_query;
  j["flip_locale_fraction"] = s.flip_locale_fraction;
  j["selection_locale_fraction"] = s.selection_locale_fraction;
  return j;
}

std::vector<double> pt_popularity(const WorldSpec& spec) {
  std::vector<double> w(spec.n_pts);
  double total = 0.0;
  for (std::size_t p = 0; p < spec.n_pts; ++p) {
    w[p] = std::pow(static_cast<double>(p + 1), -spec.zipf_exponent);
    total += w[p];
  }
  for (auto& v : w) v /= total;
  return w;
}

ProductTypeId World::redirect(ProductTypeId pt, LocaleId l) const {
  // Next-best is the closest more popular PT in the catalog, else the closest
  // less popular one.
  const auto& present = in_catalog[l.index];
  if (present[pt.index]) return pt;
  for (std::uint32_t p = pt.index; p-- > 0;)
    if (present[p]) return ProductTypeId{p};
  for (std::uint32_t p = pt.index + 1; p < present.size(); ++p)
    if (present[p]) return ProductTypeId{p};
  throw DataError("locale catalog is empty");
}

ProductTypeId World::intended(std::size_t t, LocaleId l) const {
  ProductTypeId pt = template_pt[t];
  if (!flipped[t].empty() && flipped[t][l.index]) pt = flip_alt[t];
  return redirect(pt, l);
}

World generate(const WorldSpec& spec) {
  spec.validate();
  World w;
  w.spec = spec;
  const std::size_t L = spec.n_locales;
  const std::size_t P = spec.n_pts;
  const std::size_t T = spec.n_templates;

  for (const auto& code : spec.locale_codes()) w.catalog.locales.intern(code);
  for (std::size_t p = 0; p < P; ++p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "PT_%04zu", p);
    w.catalog.pts.intern(buf);
  }
  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t k = 0; k < spec.n_items_per_pt; ++k)
      w.catalog.item_pt.emplace(static_cast<std::uint32_t>(p * spec.n_items_per_pt + k),
                                ProductTypeId{static_cast<std::uint32_t>(p)});
  w.catalog.freeze();

  // Vocabulary: disjoint PT term pools first, shared stopwords after.
  Rng text_rng(derive_seed(spec.seed, 0));
  std::vector<std::string> vocab;
  {
    std::unordered_set<std::string> seen;
    std::size_t attempts = 0;
    while (vocab.size() < spec.vocab_size) {
      auto word = make_word(text_rng);
      if (seen.insert(word).second) vocab.push_back(std::move(word));
      if (++attempts > spec.vocab_size * 200) throw DataError("world spec: vocab_size too large to fill");
    }
  }
  const std::size_t n_pt_terms = P * spec.terms_per_pt;
  const std::size_t n_stop = spec.vocab_size - n_pt_terms;

  // Templates per PT by largest-remainder apportionment of the Zipf weights,
  // dealt out in random order.
  const auto popularity = pt_popularity(spec);
  std::vector<double> cumulative(P);
  std::partial_sum(popularity.begin(), popularity.end(), cumulative.begin());
  std::vector<std::uint32_t> template_owner;
  {
    std::vector<std::size_t> quota(P);
    std::vector<std::pair<double, std::size_t>> remainder(P);
    std::size_t assigned = 0;
    for (std::size_t p = 0; p < P; ++p) {
      const double exact = popularity[p] * static_cast<double>(T);
      quota[p] = static_cast<std::size_t>(exact);
      remainder[p] = {exact - static_cast<double>(quota[p]), p};
      assigned += quota[p];
    }
    std::stable_sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < T; ++k, ++assigned) ++quota[remainder[k % P].second];
    template_owner.reserve(T);
    for (std::size_t p = 0; p < P; ++p) template_owner.insert(template_owner.end(), quota[p], static_cast<std::uint32_t>(p));
    text_rng.shuffle(std::span(template_owner));
  }

  std::unordered_set<std::string> seen_templates;
  w.templates.reserve(T);
  w.template_pt.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t p = template_owner[t];
    std::string query;
    bool done = false;
    for (int attempt = 0; attempt < 256 && !done; ++attempt) {
      const auto n_terms = 1 + text_rng.below(4);
      std::vector<std::string_view> words;
      bool has_pt_term = false;
      for (std::uint64_t k = 0; k < n_terms; ++k) {
        if (n_stop > 0 && text_rng.bernoulli(0.3)) {
          words.push_back(vocab[n_pt_terms + text_rng.below(n_stop)]);
        } else {
          words.push_back(vocab[p * spec.terms_per_pt + text_rng.below(spec.terms_per_pt)]);
          has_pt_term = true;
        }
      }
      if (!has_pt_term)
        words[text_rng.below(words.size())] = vocab[p * spec.terms_per_pt + text_rng.below(spec.terms_per_pt)];
      query.clear();
      for (std::size_t k = 0; k < words.size(); ++k) {
        if (k) query += ' ';
        query += words[k];
      }
      done = seen_templates.insert(query).second;
    }
    if (!done)
      throw DataError("world spec: cannot build unique query templates; raise terms_per_pt or vocab_size");
    w.templates.push_back(query);
    w.template_pt.push_back(ProductTypeId{static_cast<std::uint32_t>(p)});
  }

  // Dialectal terms: a PT term that means another PT in one designated
  // locale group. Every template containing such a term is dialectal.
  // Terms are taken in random order, skipping any that would overshoot the
  // template budget, until flip_fraction of the templates are covered.
  Rng flip_rng(derive_seed(spec.seed, 1));
  w.flipped.assign(T, {});
  w.flip_alt.assign(T, ProductTypeId{});
  const auto n_flip = std::min<std::size_t>(
      T, static_cast<std::size_t>(std::llround(spec.flip_fraction * static_cast<double>(T))));
  const auto n_flip_locales = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(spec.flip_locale_fraction * static_cast<double>(L))), 1,
      std::max<std::size_t>(1, L - 1));
  if (P > 1 && L > 1 && n_flip > 0) {
    std::vector<bool> group(L, false);
    for (auto l : sample_subset(flip_rng, L, n_flip_locales)) group[l] = true;

    std::unordered_map<std::string_view, std::size_t> term_index;
    for (std::size_t v = 0; v < n_pt_terms; ++v) term_index.emplace(vocab[v], v);
    std::vector<std::vector<std::uint32_t>> templates_with(n_pt_terms);
    for (std::size_t t = 0; t < T; ++t) {
      std::string_view rest(w.templates[t]);
      std::vector<std::size_t> seen;
      while (!rest.empty()) {
        const auto sp = rest.find(' ');
        const auto word = rest.substr(0, sp);
        rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
        auto it = term_index.find(word);
        if (it == term_index.end() || std::find(seen.begin(), seen.end(), it->second) != seen.end()) continue;
        seen.push_back(it->second);
        templates_with[it->second].push_back(static_cast<std::uint32_t>(t));
      }
    }
    std::vector<std::uint32_t> terms(n_pt_terms);
    std::iota(terms.begin(), terms.end(), 0u);
    flip_rng.shuffle(std::span(terms));
    std::size_t covered = 0;
    for (auto v : terms) {
      if (covered >= n_flip) break;
      std::vector<std::uint32_t> fresh;
      for (auto t : templates_with[v])
        if (w.flipped[t].empty()) fresh.push_back(t);
      if (fresh.empty() || covered + fresh.size() > n_flip) continue;
      const auto own = static_cast<std::uint32_t>(v / spec.terms_per_pt);
      // The alternate meaning is drawn by popularity, like any query intent.
      std::uint32_t alt = own;
      while (alt == own) alt = static_cast<std::uint32_t>(draw_cumulative(flip_rng, cumulative));
      for (auto t : fresh) {
        w.flipped[t] = group;
        w.flip_alt[t] = ProductTypeId{alt};
      }
      covered += fresh.size();
    }
  }

  // Selection differences: some PTs are missing from some locale catalogs.
  Rng sel_rng(derive_seed(spec.seed, 2));
  w.in_catalog.assign(L, std::vector<bool>(P, true));
  const auto n_masked_pts =
      static_cast<std::size_t>(std::llround(spec.selection_fraction * static_cast<double>(P)));
  const auto n_mask_locales = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(spec.selection_locale_fraction * static_cast<double>(L))), 1,
      std::max<std::size_t>(1, L - 1));
  if (L > 1) {
    for (auto p : sample_subset(sel_rng, P, std::min(n_masked_pts, P)))
      for (auto l : sample_subset(sel_rng, L, n_mask_locales)) w.in_catalog[l][p] = false;
  }
  for (std::size_t l = 0; l < L; ++l)
    if (std::none_of(w.in_catalog[l].begin(), w.in_catalog[l].end(), [](bool b) { return b; }))
      throw DataError("world spec: a locale catalog ended up empty");

  // Per-locale traffic and clicks, each locale on its own sub-seed.
  // Query sets are dealt from shuffled decks of all templates so every
  // template is issued about equally often across locales.
  const auto counts = spec.query_counts();
  w.locale_queries.resize(L);
  {
    Rng deck_rng(derive_seed(spec.seed, 4));
    std::vector<std::uint32_t> deck;
    std::size_t pos = 0;
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<bool> taken(T, false);
      auto& mine = w.locale_queries[l];
      while (mine.size() < counts[l]) {
        if (pos == deck.size()) {
          deck.resize(T);
          std::iota(deck.begin(), deck.end(), 0u);
          deck_rng.shuffle(std::span(deck));
          pos = 0;
        }
        const auto t = deck[pos++];
        if (taken[t]) continue;
        taken[t] = true;
        mine.push_back(t);
      }
      std::sort(mine.begin(), mine.end());
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    Rng rng(derive_seed(spec.seed, 3, l));
    const LocaleId loc{static_cast<std::uint32_t>(l)};

    std::vector<std::uint32_t> catalog_pts;
    for (std::size_t p = 0; p < P; ++p)
      if (w.in_catalog[l][p]) catalog_pts.push_back(static_cast<std::uint32_t>(p));

    for (auto t : w.locale_queries[l]) {
      const auto target = w.intended(t, loc);
      const std::uint64_t c = spec.clicks_per_query;
      const std::uint64_t total = std::max<std::uint64_t>(1, c / 2 + rng.below(c + 1));
      std::map<std::uint32_t, std::uint64_t> per_item;
      for (std::uint64_t k = 0; k < total; ++k) {
        std::uint32_t pt = target.index;
        if (rng.bernoulli(spec.click_noise)) pt = catalog_pts[rng.below(catalog_pts.size())];
        const auto item = static_cast<std::uint32_t>(pt * spec.n_items_per_pt + rng.below(spec.n_items_per_pt));
        ++per_item[item];
      }
      for (const auto& [item, clicks] : per_item) {
        ClickRecord r;
        r.locale = loc;
        r.query = w.templates[t];
        r.item = ItemId{item, w.catalog.item_pt.at(item)};
        r.clicks = clicks;
        r.impressions = clicks + rng.below(2 * clicks + 1);
        w.clicklog.push_back(std::move(r));
      }
    }
  }

  std::vector<LabeledExample> gold;
  gold.reserve(L * T);
  for (std::size_t l = 0; l < L; ++l) {
    const LocaleId loc{static_cast<std::uint32_t>(l)};
    for (std::size_t t = 0; t < T; ++t) gold.push_back({loc, w.templates[t], {w.intended(t, loc)}});
    for (auto t : w.locale_queries[l])
      if (!w.flipped[t].empty() && w.flipped[t][l]) w.flip_manifest.push_back({w.templates[t], loc, w.intended(t, loc)});
  }
  w.gold = Dataset(std::move(gold), Split::kTest, Provenance::kSyntheticGold, L);
  return w;
}

WorldSplit split_world(const World& world, double train, double val, double test, std::uint64_t seed) {
  if (!(train > 0 && val > 0 && test > 0) || std::abs(train + val + test - 1.0) > 1e-9)
    throw DataError("split fractions must be positive and sum to 1");
  const std::size_t T = world.templates.size();
  std::vector<std::uint32_t> order(T);
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(derive_seed(seed, 100));
  rng.shuffle(std::span(order));
  const auto n_train = static_cast<std::size_t>(std::llround(train * static_cast<double>(T)));
  const auto n_val = static_cast<std::size_t>(std::llround(val * static_cast<double>(T)));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= T) throw DataError("split_world: a split would be empty");

  WorldSplit out;
  out.template_split.assign(T, Split::kTest);
  for (std::size_t i = 0; i < T; ++i)
    out.template_split[order[i]] = i < n_train ? Split::kTrain : (i < n_train + n_val ? Split::kValidation : Split::kTest);

  std::unordered_map<std::string_view, Split> by_query;
  for (std::size_t t = 0; t < T; ++t) by_query.emplace(world.templates[t], out.template_split[t]);

  std::vector<LabeledExample> tr, va, te;
  for (const auto& ex : world.gold.examples()) {
    switch (by_query.at(ex.query)) {
      case Split::kTrain: tr.push_back(ex); break;
      case Split::kValidation: va.push_back(ex); break;
      case Split::kTest: te.push_back(ex); break;
    }
  }
  const auto L = world.catalog.locales.size();
  out.train_gold = Dataset(std::move(tr), Split::kTrain, Provenance::kSyntheticGold, L);
  out.val_gold = Dataset(std::move(va), Split::kValidation, Provenance::kSyntheticGold, L);
  out.test_gold = Dataset(std::move(te), Split::kTest, Provenance::kSyntheticGold, L);
  for (const auto& r : world.clicklog)
    if (by_query.at(r.query) == Split::kTrain) out.train_clicklog.push_back(r);
  return out;
}

std::string format_flip_manifest(const std::vector<FlipRecord>& records, const Catalog& catalog) {
  std::string out(kFormatLine);
  out += '\n';
  for (const auto& r : records) {
    ordered_json j;
    j["query"] = r.query;
    j["locale"] = catalog.locales.name(r.locale);
    j["intended"] = catalog.pts.name(r.intended);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<FlipRecord> parse_flip_manifest(std::string_view text, const Catalog& catalog) {
  std::vector<FlipRecord> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kFormatLine) throw DataError("flip manifest: missing format line");
      continue;
    }
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      out.push_back({j.at("query").get<std::string>(), catalog.locales.at(j.at("locale").get<std::string>()),
                     catalog.pts.at(j.at("intended").get<std::string>())});
    } catch (const json::exception& e) {
      throw DataError("flip manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_world(const World& world, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  save_clicklog((d / "clicklog.tsv").string(), world.clicklog, world.catalog);
  save_dataset((d / "gold.jsonl").string(), world.gold, world.catalog);
  write_file((d / "flip_manifest.jsonl").string(), format_flip_manifest(world.flip_manifest, world.catalog));

  ordered_json cat;
  cat["format"] = std::string(kFormatLine.substr(1));
  cat["spec"] = to_json(world.spec);
  cat["locales"] = world.catalog.locales.names();
  cat["pts"] = world.catalog.pts.names();
  const auto hi = world.spec.n_hi_re();
  std::vector<std::string> hi_codes, lo_codes;
  for (std::size_t l = 0; l < world.catalog.locales.size(); ++l)
    (l < hi ? hi_codes : lo_codes).push_back(world.catalog.locales.names()[l]);
  cat["hi_re"] = hi_codes;
  cat["lo_re"] = lo_codes;
  ordered_json masked = ordered_json::object();
  for (std::size_t l = 0; l < world.in_catalog.size(); ++l) {
    std::vector<std::string> missing;
    for (std::size_t p = 0; p < world.in_catalog[l].size(); ++p)
      if (!world.in_catalog[l][p]) missing.push_back(world.catalog.pts.names()[p]);
    if (!missing.empty()) masked[world.catalog.locales.names()[l]] = missing;
  }
  cat["missing_from_catalog"] = masked;
  write_file((d / "catalog.json").string(), cat.dump(2) + "\n");
}

Catalog read_catalog_json(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError("catalog '" + path + "' is not valid JSON: " + e.what());
  }
  Catalog c;
  try {
    for (const auto& code : j.at("locales")) c.locales.intern(code.get<std::string>());
    for (const auto& name : j.at("pts")) c.pts.intern(name.get<std::string>());
  } catch (const json::exception& e) {
    throw DataError("catalog '" + path + "': " + e.what());
  }
  c.freeze();
  return c;
}

}  // namespace localeq
