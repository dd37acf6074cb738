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

#include "localeq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

namespace localeq {
namespace {

using nlohmann::ordered_json;

double ratio(std::uint64_t a, std::uint64_t b) { return static_cast<double>(a) / static_cast<double>(b); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json op_json(const OperatingPoint& op) {
  ordered_json j;
  j["recall"] = op.recall;
  j["precision"] = op.precision;
  j["threshold"] = op.threshold;
  j["attainable"] = op.attainable;
  return j;
}

double refrain_rate(const Matrix& scores, const std::vector<std::size_t>& rows,
                    const std::function<double(std::size_t)>& threshold_of) {
  if (rows.empty()) return 0.0;
  std::size_t refrained = 0;
  for (auto r : rows)
    if (scores.row(static_cast<Eigen::Index>(r)).maxCoeff() < threshold_of(r)) ++refrained;
  return static_cast<double>(refrained) / static_cast<double>(rows.size());
}

}  // namespace

PRCurve pr_sweep(std::vector<ScoredPair> pairs) {
  PRCurve curve;
  for (const auto& p : pairs) {
    if (std::isnan(p.score)) throw MetricError("pr_sweep: NaN score");
    if (p.gold) ++curve.total_gold;
  }
  if (curve.total_gold == 0) throw MetricError("pr_sweep: no gold pairs");
  std::stable_sort(pairs.begin(), pairs.end(), [](const ScoredPair& a, const ScoredPair& b) { return a.score > b.score; });
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < pairs.size();) {
    const double t = pairs[i].score;
    for (; i < pairs.size() && pairs[i].score == t; ++i) (pairs[i].gold ? tp : fp) += 1;
    PRPoint pt;
    pt.threshold = t;
    pt.tp = tp;
    pt.fp = fp;
    pt.fn = curve.total_gold - tp;
    pt.precision = tp + fp ? ratio(tp, tp + fp) : 1.0;
    pt.recall = ratio(tp, curve.total_gold);
    curve.points.push_back(pt);
  }
  return curve;
}

OperatingPoint recall_at_precision(const PRCurve& curve, double target) {
  OperatingPoint best;
  for (const auto& p : curve.points) {
    if (p.precision < target) continue;
    if (!best.attainable || p.recall > best.recall) {
      best.recall = p.recall;
      best.precision = p.precision;
      best.threshold = p.threshold;
      best.attainable = true;
    }
  }
  return best;
}

OperatingPoint evaluate_at(const std::vector<ScoredPair>& pairs, double threshold) {
  std::uint64_t tp = 0, fp = 0, gold = 0;
  for (const auto& p : pairs) {
    if (p.gold) ++gold;
    if (p.score >= threshold) (p.gold ? tp : fp) += 1;
  }
  OperatingPoint op;
  op.threshold = threshold;
  op.precision = tp + fp ? ratio(tp, tp + fp) : 1.0;
  op.recall = gold ? ratio(tp, gold) : 0.0;
  op.attainable = true;
  return op;
}

std::vector<ScoredPair> scored_pairs(const Matrix& scores, const Dataset& gold, const std::vector<bool>& rows) {
  if (static_cast<std::size_t>(scores.rows()) != gold.size())
    throw std::invalid_argument("scored_pairs: score rows do not match dataset size");
  std::vector<ScoredPair> out;
  const auto n_pts = static_cast<std::size_t>(scores.cols());
  std::vector<bool> is_gold(n_pts);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!rows.empty() && !rows[i]) continue;
    std::fill(is_gold.begin(), is_gold.end(), false);
    for (auto pt : gold.examples()[i].labels)
      if (pt.index < n_pts) is_gold[pt.index] = true;
    for (std::size_t p = 0; p < n_pts; ++p)
      out.push_back({scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)), is_gold[p]});
  }
  return out;
}

std::vector<ScoredPair> scored_pairs(const Matrix& scores, const Dataset& gold) { return scored_pairs(scores, gold, {}); }

std::vector<ProductTypeId> argmax_rows(const Matrix& scores) {
  std::vector<ProductTypeId> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index p = 1; p < scores.cols(); ++p)
      if (scores(i, p) > scores(i, best)) best = p;
    out[static_cast<std::size_t>(i)] = ProductTypeId{static_cast<std::uint32_t>(best)};
  }
  return out;
}

std::map<ProductTypeId, PtAccuracy> per_pt_accuracy(const Matrix& scores, const Dataset& eval,
                                                    const std::vector<bool>& rows) {
  if (eval.empty()) throw MetricError("per_pt_accuracy: empty evaluation set");
  if (static_cast<std::size_t>(scores.rows()) != eval.size())
    throw std::invalid_argument("per_pt_accuracy: score rows do not match dataset size");
  const auto top = argmax_rows(scores);
  std::map<ProductTypeId, PtAccuracy> out;
  for (std::size_t i = 0; i < eval.size(); ++i) {
    if (!rows.empty() && !rows[i]) continue;
    const auto& labels = eval.examples()[i].labels;
    const bool hit = std::binary_search(labels.begin(), labels.end(), top[i]);
    for (auto pt : labels) {
      auto& a = out[pt];
      ++a.count;
      if (hit) ++a.correct;
    }
  }
  return out;
}

std::map<ProductTypeId, PtAccuracy> per_pt_accuracy(const Matrix& scores, const Dataset& eval) {
  return per_pt_accuracy(scores, eval, {});
}

std::string_view to_string(PtBucket b) {
  switch (b) {
    case PtBucket::kHead: return "head";
    case PtBucket::kTorso: return "torso";
    case PtBucket::kTail: return "tail";
  }
  return "?";
}

std::optional<PtBucket> PtBuckets::bucket_of(ProductTypeId pt) const {
  auto in = [&](const std::vector<ProductTypeId>& v) { return std::find(v.begin(), v.end(), pt) != v.end(); };
  if (in(head)) return PtBucket::kHead;
  if (in(torso)) return PtBucket::kTorso;
  if (in(tail)) return PtBucket::kTail;
  return std::nullopt;
}

PtBuckets head_torso_tail(const std::vector<double>& mass) {
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw MetricError("head_torso_tail: masses must be finite and >= 0");
    total += m;
  }
  if (!(total > 0.0)) throw MetricError("head_torso_tail: total mass is zero");
  std::vector<std::size_t> order(mass.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mass[a] > mass[b]; });
  PtBuckets out;
  double before = 0.0;
  for (auto i : order) {
    if (mass[i] == 0.0) break;
    const ProductTypeId pt{static_cast<std::uint32_t>(i)};
    const double frac = mass[i] / total;
    // Compare in mass units to keep exact thirds exact.
    if (3.0 * before < total) {
      out.head.push_back(pt);
      out.head_mass += frac;
    } else if (3.0 * before < 2.0 * total) {
      out.torso.push_back(pt);
      out.torso_mass += frac;
    } else {
      out.tail.push_back(pt);
      out.tail_mass += frac;
    }
    before += mass[i];
  }
  return out;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
  if (xs.size() < 2) throw MetricError("pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw MetricError("pearson: correlation undefined for zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

const BucketResult& EvalReport::bucket(std::string_view name) const {
  for (const auto& b : buckets)
    if (b.name == name) return b;
  throw std::out_of_range("no bucket named " + std::string(name));
}

double EvalReport::threshold_for(LocaleId l) const {
  if (mode == ThresholdMode::kGlobal) return global_threshold;
  return l.index < locales.size() ? locales[l.index].op.threshold : kRefrainAll;
}

EvalReport build_report(const Matrix& scores, const Dataset& eval, const LocaleRegistry& locales,
                        const LocaleBuckets& buckets, double target_precision, ThresholdMode mode) {
  if (static_cast<std::size_t>(scores.rows()) != eval.size())
    throw std::invalid_argument("build_report: score rows do not match dataset size");
  EvalReport report;
  report.target_precision = target_precision;
  report.mode = mode;

  const std::size_t n_loc = locales.size();
  std::vector<std::vector<std::size_t>> rows_of(n_loc);
  for (std::size_t i = 0; i < eval.size(); ++i) rows_of.at(eval.examples()[i].locale.index).push_back(i);

  auto mask_for = [&](const std::vector<LocaleId>& ls) {
    std::vector<bool> m(eval.size(), false);
    for (auto l : ls)
      for (auto r : rows_of[l.index]) m[r] = true;
    return m;
  };
  std::vector<LocaleId> all;
  for (std::uint32_t l = 0; l < n_loc; ++l) all.push_back(LocaleId{l});

  struct Pooled {
    std::string name;
    std::vector<LocaleId> members;
  };
  const std::vector<Pooled> pooled = {{"Lo-Re", buckets.lo_re}, {"Hi-Re", buckets.hi_re}, {"WW", all}};
  for (const auto& p : pooled) {
    BucketResult b;
    b.name = p.name;
    const auto mask = mask_for(p.members);
    b.n_examples = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
    const auto pairs = scored_pairs(scores, eval, mask);
    if (std::any_of(pairs.begin(), pairs.end(), [](const ScoredPair& s) { return s.gold; }))
      b.op = recall_at_precision(pr_sweep(pairs), target_precision);
    report.buckets.push_back(std::move(b));
  }
  report.global_threshold = report.buckets.back().op.threshold;

  for (std::uint32_t l = 0; l < n_loc; ++l) {
    LocaleResult r;
    r.locale = locales.name(LocaleId{l});
    r.n_examples = rows_of[l].size();
    const auto pairs = scored_pairs(scores, eval, mask_for({LocaleId{l}}));
    for (const auto& p : pairs) r.gold_pairs += p.gold;
    try {
      if (mode == ThresholdMode::kGlobal) {
        if (r.gold_pairs == 0) throw MetricError("no gold pairs for locale " + r.locale);
        r.op = evaluate_at(pairs, report.global_threshold);
        r.op.attainable = r.op.precision >= target_precision;
      } else {
        r.op = recall_at_precision(pr_sweep(pairs), target_precision);
      }
    } catch (const MetricError& e) {
      r.error = e.what();
    }
    const double t = r.op.threshold;
    r.refrain_rate = refrain_rate(scores, rows_of[l], [&](std::size_t) { return t; });
    report.locales.push_back(std::move(r));
  }

  for (std::size_t k = 0; k < pooled.size(); ++k) {
    std::vector<std::size_t> rows;
    for (auto l : pooled[k].members) rows.insert(rows.end(), rows_of[l.index].begin(), rows_of[l.index].end());
    report.buckets[k].refrain_rate = refrain_rate(scores, rows, [&](std::size_t r) {
      return report.threshold_for(eval.examples()[r].locale);
    });
  }
  return report;
}

ordered_json report_to_json(const EvalReport& report) {
  ordered_json j;
  j["format"] = std::string(kFormatLine.substr(1));
  j["kind"] = "eval-report";
  j["target_precision"] = report.target_precision;
  j["threshold_mode"] = report.mode == ThresholdMode::kPerLocale ? "per-locale" : "global";
  j["global_threshold"] = report.global_threshold;
  ordered_json bs = ordered_json::array();
  for (const auto& b : report.buckets) {
    ordered_json e;
    e["bucket"] = b.name;
    e["n_examples"] = b.n_examples;
    e["recall_at_precision"] = op_json(b.op);
    e["refrain_rate"] = b.refrain_rate;
    bs.push_back(std::move(e));
  }
  j["buckets"] = std::move(bs);
  ordered_json ls = ordered_json::array();
  for (const auto& l : report.locales) {
    ordered_json e;
    e["locale"] = l.locale;
    e["n_examples"] = l.n_examples;
    e["gold_pairs"] = l.gold_pairs;
    e["recall_at_precision"] = op_json(l.op);
    e["refrain_rate"] = l.refrain_rate;
    if (l.error) e["error"] = *l.error;
    ls.push_back(std::move(e));
  }
  j["locales"] = std::move(ls);
  return j;
}

std::string report_csv(const EvalReport& report) {
  std::string out(kFormatLine);
  out += "\nscope,name,recall_at_p,precision,threshold,attainable,refrain_rate\n";
  for (const auto& b : report.buckets)
    out += "bucket," + b.name + "," + fmt(b.op.recall) + "," + fmt(b.op.precision) + "," + fmt(b.op.threshold) +
           "," + (b.op.attainable ? "1" : "0") + "," + fmt(b.refrain_rate) + "\n";
  for (const auto& l : report.locales)
    out += "locale," + l.locale + "," + fmt(l.op.recall) + "," + fmt(l.op.precision) + "," + fmt(l.op.threshold) +
           "," + (l.op.attainable ? "1" : "0") + "," + fmt(l.refrain_rate) + "\n";
  return out;
}

std::string pr_curve_csv(const PRCurve& curve) {
  std::string out(kFormatLine);
  out += "\nthreshold,precision,recall,tp,fp,fn\n";
  for (const auto& p : curve.points)
    out += fmt(p.threshold) + "," + fmt(p.precision) + "," + fmt(p.recall) + "," + std::to_string(p.tp) + "," +
           std::to_string(p.fp) + "," + std::to_string(p.fn) + "\n";
  return out;
}

ordered_json calibration_json(const EvalReport& report) {
  ordered_json j;
  j["format"] = std::string(kFormatLine.substr(1));
  j["kind"] = "calibration";
  j["target_precision"] = report.target_precision;
  j["threshold_mode"] = report.mode == ThresholdMode::kPerLocale ? "per-locale" : "global";
  j["global_threshold"] = report.global_threshold;
  ordered_json t = ordered_json::object();
  for (const auto& l : report.locales)
    if (!l.error) t[l.locale] = report.mode == ThresholdMode::kGlobal ? report.global_threshold : l.op.threshold;
  j["thresholds"] = std::move(t);
  return j;
}

double Calibration::threshold_for(std::string_view locale) const {
  if (auto it = per_locale.find(std::string(locale)); it != per_locale.end()) return it->second;
  if (global) return *global;
  return 0.5;
}

Calibration parse_calibration(std::string_view text) {
  Calibration c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object() || j.value("kind", "") != "calibration")
      throw DataError("calibration file must be a JSON object with \"kind\": \"calibration\"");
    if (j.contains("global_threshold")) c.global = j.at("global_threshold").get<double>();
    if (j.contains("thresholds"))
      for (const auto& [k, v] : j.at("thresholds").items()) c.per_locale[k] = v.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed calibration JSON: ") + e.what());
  }
  return c;
}

}  // namespace localeq
