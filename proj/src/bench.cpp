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

#include "localeq/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "localeq/checkpoint.hpp"

namespace localeq {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <typename T>
T get(const json& v, const std::string& section, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw DataError(section + ": bad value for '" + key + "': " + e.what());
  }
}

void require_object(const json& j, const std::string& section) {
  if (!j.is_object()) throw DataError(section + ": expected a JSON object");
}

std::string fmt(double v, const char* spec = "%.17g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

double bucket_micro_accuracy(const std::map<ProductTypeId, PtAccuracy>& per_pt, const std::vector<ProductTypeId>& members) {
  std::uint64_t count = 0, correct = 0;
  for (auto pt : members) {
    auto it = per_pt.find(pt);
    if (it == per_pt.end()) continue;
    count += it->second.count;
    correct += it->second.correct;
  }
  return count ? static_cast<double>(correct) / static_cast<double>(count) : 0.0;
}

std::vector<bool> locale_mask(const Dataset& d, const std::vector<LocaleId>& locales) {
  std::vector<bool> in_set;
  for (auto l : locales) {
    if (in_set.size() <= l.index) in_set.resize(l.index + 1, false);
    in_set[l.index] = true;
  }
  std::vector<bool> mask(d.size(), false);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto idx = d.examples()[i].locale.index;
    mask[i] = idx < in_set.size() && in_set[idx];
  }
  return mask;
}

ordered_json op_json(const OperatingPoint& op) {
  ordered_json j;
  j["recall"] = op.recall;
  j["precision"] = op.precision;
  j["threshold"] = op.threshold;
  j["attainable"] = op.attainable;
  return j;
}

}  // namespace

std::vector<double> click_mass(const std::vector<ClickRecord>& clicklog, std::size_t n_pts) {
  std::vector<double> mass(n_pts, 0.0);
  for (const auto& r : clicklog) {
    if (r.item.pt.index >= n_pts) throw DataError("click record outside the product-type registry");
    mass[r.item.pt.index] += static_cast<double>(r.clicks);
  }
  return mass;
}

TrainConfig benchmark_train_config() {
  TrainConfig t;
  t.learning_rate = 0.005;
  t.batch_size = 64;
  t.max_epochs = 15;
  t.patience = 3;
  return t;
}

void RunConfig::validate() const {
  world.validate();
  if (!(split.train > 0 && split.val > 0 && split.test > 0) ||
      std::abs(split.train + split.val + split.test - 1.0) > 1e-9)
    throw DataError("split: fractions must be positive and sum to 1");
  if (!(labels.threshold >= 0.5 && labels.threshold < 1.0)) throw DataError("labels: threshold must be in [0.5, 1)");
  auto enc = encoder;
  enc.n_locales = world.n_locales;
  try {
    enc.validate();
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  if (!(target_precision > 0.0 && target_precision <= 1.0)) throw DataError("eval: target_precision must be in (0, 1]");
  if (variants.empty()) throw DataError("bench: at least one variant is required");
}

void RunConfig::set_seed(std::uint64_t seed) {
  world.seed = seed;
  train.seed = seed;
}

EncoderConfig encoder_config_from_json(const json& j) {
  require_object(j, "encoder");
  EncoderConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "d_model") c.d_model = get<std::size_t>(v, "encoder", key);
    else if (key == "n_layers") c.n_layers = get<std::size_t>(v, "encoder", key);
    else if (key == "n_heads") c.n_heads = get<std::size_t>(v, "encoder", key);
    else if (key == "d_ff") c.d_ff = get<std::size_t>(v, "encoder", key);
    else if (key == "max_len") c.max_len = get<std::size_t>(v, "encoder", key);
    else if (key == "n_buckets") c.n_buckets = get<std::size_t>(v, "encoder", key);
    else throw DataError("encoder: unknown key '" + key + "'");
  }
  return c;
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  require_object(j, "train");
  for (const auto& [key, v] : j.items()) {
    if (key == "learning_rate") c.learning_rate = get<double>(v, "train", key);
    else if (key == "dropout") c.dropout = get<double>(v, "train", key);
    else if (key == "batch_size") c.batch_size = get<std::size_t>(v, "train", key);
    else if (key == "beta1") c.beta1 = get<double>(v, "train", key);
    else if (key == "beta2") c.beta2 = get<double>(v, "train", key);
    else if (key == "epsilon") c.epsilon = get<double>(v, "train", key);
    else if (key == "max_epochs") c.max_epochs = get<std::size_t>(v, "train", key);
    else if (key == "patience") c.patience = get<std::size_t>(v, "train", key);
    else if (key == "seed") c.seed = get<std::uint64_t>(v, "train", key);
    else throw DataError("train: unknown key '" + key + "'");
  }
  return c;
}

RunConfig run_config_from_json(const json& j) {
  require_object(j, "run config");
  RunConfig c;
  for (const auto& [section, v] : j.items()) {
    if (section == "format") {
      continue;
    } else if (section == "world") {
      c.world = world_spec_from_json(v);
    } else if (section == "split") {
      require_object(v, "split");
      for (const auto& [key, x] : v.items()) {
        if (key == "train") c.split.train = get<double>(x, "split", key);
        else if (key == "val") c.split.val = get<double>(x, "split", key);
        else if (key == "test") c.split.test = get<double>(x, "split", key);
        else throw DataError("split: unknown key '" + key + "'");
      }
    } else if (section == "labels") {
      require_object(v, "labels");
      for (const auto& [key, x] : v.items()) {
        if (key == "threshold") c.labels.threshold = get<double>(x, "labels", key);
        else if (key == "min_total_clicks") c.labels.min_total_clicks = get<std::uint64_t>(x, "labels", key);
        else throw DataError("labels: unknown key '" + key + "'");
      }
    } else if (section == "encoder") {
      c.encoder = encoder_config_from_json(v);
    } else if (section == "train") {
      c.train = train_config_from_json(v, c.train);
    } else if (section == "eval") {
      require_object(v, "eval");
      for (const auto& [key, x] : v.items()) {
        if (key == "target_precision") {
          c.target_precision = get<double>(x, "eval", key);
        } else if (key == "threshold_mode") {
          const auto mode = get<std::string>(x, "eval", key);
          if (mode == "per-locale") c.threshold_mode = ThresholdMode::kPerLocale;
          else if (mode == "global") c.threshold_mode = ThresholdMode::kGlobal;
          else throw DataError("eval: threshold_mode must be per-locale or global");
        } else {
          throw DataError("eval: unknown key '" + key + "'");
        }
      }
    } else if (section == "bench") {
      require_object(v, "bench");
      for (const auto& [key, x] : v.items()) {
        if (key == "variants") {
          c.variants.clear();
          for (const auto& name : get<std::vector<std::string>>(x, "bench", key)) {
            try {
              c.variants.push_back(parse_variant(name));
            } catch (const std::invalid_argument& e) {
              throw DataError(std::string("bench: ") + e.what());
            }
          }
        } else {
          throw DataError("bench: unknown key '" + key + "'");
        }
      }
    } else {
      throw DataError("run config: unknown section '" + section + "'");
    }
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError("run config '" + path + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["world"] = to_json(c.world);
  j["split"] = {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}};
  j["labels"] = {{"threshold", c.labels.threshold}, {"min_total_clicks", c.labels.min_total_clicks}};
  j["encoder"] = {{"d_model", c.encoder.d_model}, {"n_layers", c.encoder.n_layers}, {"n_heads", c.encoder.n_heads},
                  {"d_ff", c.encoder.d_ff},       {"max_len", c.encoder.max_len},   {"n_buckets", c.encoder.n_buckets}};
  j["train"] = {{"learning_rate", c.train.learning_rate}, {"dropout", c.train.dropout},
                {"batch_size", c.train.batch_size},       {"beta1", c.train.beta1},
                {"beta2", c.train.beta2},                 {"epsilon", c.train.epsilon},
                {"max_epochs", c.train.max_epochs},       {"patience", c.train.patience},
                {"seed", c.train.seed}};
  j["eval"] = {{"target_precision", c.target_precision},
               {"threshold_mode", c.threshold_mode == ThresholdMode::kPerLocale ? "per-locale" : "global"}};
  std::vector<std::string> names;
  for (auto v : c.variants) names.emplace_back(to_string(v));
  j["bench"] = {{"variants", names}};
  return j;
}

BenchData prepare_bench_data(const RunConfig& cfg) {
  cfg.validate();
  BenchData d;
  d.world = generate(cfg.world);
  d.split = split_world(d.world, cfg.split.train, cfg.split.val, cfg.split.test, cfg.world.seed);
  const std::size_t L = d.world.catalog.locales.size();

  std::unordered_map<std::string_view, Split> by_query;
  for (std::size_t t = 0; t < d.world.templates.size(); ++t)
    by_query.emplace(d.world.templates[t], d.split.template_split[t]);
  std::vector<ClickRecord> val_log;
  for (const auto& r : d.world.clicklog)
    if (by_query.at(r.query) == Split::kValidation) val_log.push_back(r);

  d.train = derive_all(d.split.train_clicklog, L, cfg.labels);
  d.val = derive_all(val_log, L, cfg.labels);
  d.val = Dataset(d.val.examples(), Split::kValidation, Provenance::kDerived, L);
  d.test = d.split.test_gold;
  d.buckets = bucket_locales(d.train.per_locale_counts(), cfg.world.n_hi_re());

  d.pt_mass = click_mass(d.split.train_clicklog, d.world.catalog.pts.size());
  d.pt_buckets = head_torso_tail(d.pt_mass);
  return d;
}

std::optional<double> count_accuracy_pearson(const Matrix& scores, const BenchData& data,
                                             const std::vector<LocaleId>& locales) {
  const auto mask = locale_mask(data.test, locales);
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) return std::nullopt;
  const auto per_pt = per_pt_accuracy(scores, data.test, mask);
  std::vector<double> train_count(data.world.catalog.pts.size(), 0.0);
  const auto train_mask = locale_mask(data.train, locales);
  for (std::size_t i = 0; i < data.train.size(); ++i)
    if (train_mask[i])
      for (auto pt : data.train.examples()[i].labels) train_count[pt.index] += 1.0;
  std::vector<double> xs, ys;
  for (const auto& [pt, acc] : per_pt) {
    xs.push_back(train_count[pt.index]);
    ys.push_back(acc.accuracy());
  }
  try {
    return pearson(xs, ys);
  } catch (const MetricError&) {
    return std::nullopt;
  }
}

VariantResult evaluate_variant(const ModelBundle& bundle, const RunConfig& cfg, const BenchData& data) {
  VariantResult r;
  r.variant = bundle.variant;
  r.n_parameters = bundle.n_parameters();
  r.model_version = model_version(bundle);
  const Matrix scores = score_dataset(bundle, data.test, cfg.train.threads);
  r.report = build_report(scores, data.test, data.world.catalog.locales, data.buckets, cfg.target_precision,
                          cfg.threshold_mode);
  r.per_pt = per_pt_accuracy(scores, data.test);
  r.bucket_accuracy.head = bucket_micro_accuracy(r.per_pt, data.pt_buckets.head);
  r.bucket_accuracy.torso = bucket_micro_accuracy(r.per_pt, data.pt_buckets.torso);
  r.bucket_accuracy.tail = bucket_micro_accuracy(r.per_pt, data.pt_buckets.tail);
  r.lo_re_pearson = count_accuracy_pearson(scores, data, data.buckets.lo_re);
  r.hi_re_pearson = count_accuracy_pearson(scores, data, data.buckets.hi_re);

  std::vector<PreparedInput> flips;
  for (const auto& f : data.world.flip_manifest) flips.push_back(prepare_input(bundle, f.query, f.locale));
  if (!flips.empty()) {
    const auto top = argmax_rows(score_prepared(bundle, flips, cfg.train.threads));
    std::size_t hit = 0;
    for (std::size_t i = 0; i < flips.size(); ++i) hit += top[i] == data.world.flip_manifest[i].intended;
    r.flip_accuracy = static_cast<double>(hit) / static_cast<double>(flips.size());
  }
  r.flip_records = flips.size();
  return r;
}

BenchResult run_bench(const RunConfig& cfg, const BenchData& data, const LogFn& log) {
  BenchResult out;
  for (auto variant : cfg.variants) {
    auto bundle = ModelBundle::create(variant, cfg.encoder, data.world.catalog.locales, data.world.catalog.pts,
                                      cfg.train.seed);
    if (log) log("training " + std::string(to_string(variant)) + " (" + std::to_string(bundle.n_parameters()) +
                 " parameters, " + std::to_string(data.train.size()) + " examples)");
    ProgressFn progress;
    if (log)
      progress = [&](std::size_t epoch, double tl, double vl) {
        log("  epoch " + std::to_string(epoch) + " train " + fmt(tl, "%.6f") + " val " + fmt(vl, "%.6f"));
      };
    auto training = train(bundle, data.train, data.val, cfg.train, progress);
    auto r = evaluate_variant(bundle, cfg, data);
    r.training = std::move(training);
    if (log)
      log("  " + std::string(to_string(variant)) + ": WW recall@p " + fmt(r.report.bucket("WW").op.recall, "%.4f") +
          ", Lo-Re " + fmt(r.report.bucket("Lo-Re").op.recall, "%.4f"));
    out.variants.push_back(std::move(r));
    out.models.push_back(std::move(bundle));
  }
  return out;
}

std::string per_pt_csv(const std::map<ProductTypeId, PtAccuracy>& per_pt, const PtRegistry& pts,
                       const PtBuckets& buckets) {
  std::string out(kFormatLine);
  out += "\npt,count,accuracy,bucket\n";
  for (const auto& [pt, acc] : per_pt) {
    const auto b = buckets.bucket_of(pt);
    out += pts.name(pt) + "," + std::to_string(acc.count) + "," + fmt(acc.accuracy()) + "," +
           (b ? std::string(to_string(*b)) : std::string("none")) + "\n";
  }
  return out;
}

ordered_json bench_report_json(const RunConfig& cfg, const BenchData& data, const BenchResult& result) {
  const auto& locales = data.world.catalog.locales;
  ordered_json j;
  j["format"] = std::string(kFormatLine.substr(1));
  j["kind"] = "bench-report";
  j["config"] = to_json(cfg);

  ordered_json ds;
  ds["train_examples"] = data.train.size();
  ds["val_examples"] = data.val.size();
  ds["test_examples"] = data.test.size();
  ds["flip_records"] = data.world.flip_manifest.size();
  std::vector<std::string> hi, lo;
  for (auto l : data.buckets.hi_re) hi.push_back(locales.name(l));
  for (auto l : data.buckets.lo_re) lo.push_back(locales.name(l));
  ds["hi_re"] = hi;
  ds["lo_re"] = lo;
  ordered_json per_locale = ordered_json::object();
  for (std::uint32_t l = 0; l < locales.size(); ++l) per_locale[locales.name(LocaleId{l})] = data.train.count(LocaleId{l});
  ds["train_per_locale"] = per_locale;
  ds["pt_buckets"] = {{"head", data.pt_buckets.head.size()},
                      {"torso", data.pt_buckets.torso.size()},
                      {"tail", data.pt_buckets.tail.size()},
                      {"head_mass", data.pt_buckets.head_mass},
                      {"torso_mass", data.pt_buckets.torso_mass},
                      {"tail_mass", data.pt_buckets.tail_mass}};
  j["data"] = ds;

  ordered_json vs = ordered_json::array();
  for (const auto& r : result.variants) {
    ordered_json v;
    v["variant"] = std::string(to_string(r.variant));
    v["n_parameters"] = r.n_parameters;
    v["model_version"] = r.model_version;
    v["epochs_run"] = r.training.train_loss.size();
    v["best_epoch"] = r.training.best_epoch;
    v["train_loss"] = r.training.train_loss;
    v["val_loss"] = r.training.val_loss;
    ordered_json grid;
    for (const auto& b : r.report.buckets) grid[b.name] = op_json(b.op);
    v["recall_at_precision"] = grid;
    v["flip_accuracy"] = r.flip_accuracy;
    v["flip_records"] = r.flip_records;
    v["lo_re_pearson"] = r.lo_re_pearson ? ordered_json(*r.lo_re_pearson) : ordered_json(nullptr);
    v["hi_re_pearson"] = r.hi_re_pearson ? ordered_json(*r.hi_re_pearson) : ordered_json(nullptr);
    v["bucket_accuracy"] = {{"head", r.bucket_accuracy.head},
                            {"torso", r.bucket_accuracy.torso},
                            {"tail", r.bucket_accuracy.tail}};
    v["report"] = report_to_json(r.report);
    vs.push_back(std::move(v));
  }
  j["variants"] = vs;
  return j;
}

std::string bench_grid(const BenchResult& result) {
  std::string out = "variant          Lo-Re     Hi-Re     WW        flip-acc  pearson(Lo-Re)\n";
  for (const auto& r : result.variants) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-15s  %-8.4f  %-8.4f  %-8.4f  %-8.4f  %s\n",
                  std::string(to_string(r.variant)).c_str(), r.report.bucket("Lo-Re").op.recall,
                  r.report.bucket("Hi-Re").op.recall, r.report.bucket("WW").op.recall, r.flip_accuracy,
                  r.lo_re_pearson ? fmt(*r.lo_re_pearson, "%.4f").c_str() : "n/a");
    out += line;
  }
  return out;
}

}  // namespace localeq
