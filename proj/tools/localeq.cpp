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

// localeq: command-line front end for the query -> product-type workbench.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "localeq/bench.hpp"
#include "localeq/checkpoint.hpp"
#include "localeq/divergence.hpp"
#include "localeq/labels.hpp"
#include "localeq/metrics.hpp"
#include "localeq/model.hpp"
#include "localeq/parallel.hpp"
#include "localeq/server.hpp"
#include "localeq/synth.hpp"

namespace fs = std::filesystem;
using namespace localeq;

namespace {

void progress(const std::string& line) { std::cerr << line << '\n'; }

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

// Locale and PT registries of a trained model, frozen, for reading eval files.
Catalog model_catalog(const ModelBundle& bundle) {
  Catalog c;
  c.locales = bundle.locales;
  c.pts = bundle.pts;
  c.freeze();
  return c;
}

LocaleBuckets buckets_from_train(const std::string& train_path, Catalog& catalog, std::optional<std::size_t> n_hi_re) {
  const auto train = load_dataset(train_path, catalog, Split::kTrain, Provenance::kDerived);
  const std::size_t L = catalog.locales.size();
  const std::size_t k = n_hi_re ? *n_hi_re : static_cast<std::size_t>(std::llround(0.45 * static_cast<double>(L)));
  return bucket_locales(train.per_locale_counts(), std::min(k, L));
}

LocaleBuckets all_hi_re(std::size_t n_locales) {
  LocaleBuckets b;
  for (std::uint32_t l = 0; l < n_locales; ++l) b.hi_re.push_back(LocaleId{l});
  return b;
}

std::vector<double> label_mass(const Dataset& d, std::size_t n_pts) {
  std::vector<double> mass(n_pts, 0.0);
  for (const auto& ex : d.examples())
    for (auto pt : ex.labels) mass[pt.index] += 1.0;
  return mass;
}

struct Common {
  std::size_t threads = 0;
  std::size_t resolved() const { return resolve_threads(threads ? std::optional<std::size_t>(threads) : std::nullopt); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"localeq: multi-locale query to product-type classification workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "localeq 1.0");
  Common common;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic world and its train/val/test splits");
  std::string synth_config, synth_out;
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--config", synth_config, "Run config JSON (world and split sections are used)")
      ->check(CLI::ExistingFile);
  synth->add_option("--seed", synth_seed, "Override the world seed");
  synth->add_option("--out", synth_out, "Output directory")->required();

  // derive
  auto* derive_cmd = app.add_subcommand("derive", "Derive singleton training labels from a click log");
  std::string derive_log, derive_catalog, derive_out;
  double derive_threshold = 0.5;
  std::uint64_t derive_min_clicks = 1;
  derive_cmd->add_option("--clicklog", derive_log, "Click log TSV")->required()->check(CLI::ExistingFile);
  derive_cmd->add_option("--catalog", derive_catalog, "catalog.json fixing the locale and PT registries")
      ->check(CLI::ExistingFile);
  derive_cmd->add_option("--threshold", derive_threshold, "Keep a label when its click share is above this")
      ->capture_default_str();
  derive_cmd->add_option("--min-clicks", derive_min_clicks, "Minimum total clicks per query")->capture_default_str();
  derive_cmd->add_option("--out", derive_out, "Output JSONL")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train one model variant");
  std::string train_variant, train_data, val_data, train_catalog, train_config, train_out;
  std::optional<double> lr, dropout;
  std::optional<std::size_t> epochs, batch, patience;
  std::optional<std::uint64_t> train_seed;
  train_cmd->add_option("--variant", train_variant, "noncons | cons-agnostic | cons-aware | disjoint")
      ->required()
      ->check(CLI::IsMember({"noncons", "cons-agnostic", "cons-aware", "disjoint"}));
  train_cmd->add_option("--train", train_data, "Training JSONL")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--val", val_data, "Validation JSONL (early stopping)")->check(CLI::ExistingFile);
  train_cmd->add_option("--catalog", train_catalog, "catalog.json with the full locale and PT registries")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--config", train_config, "Run config JSON (encoder and train sections are used)")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--lr", lr, "Learning rate");
  train_cmd->add_option("--dropout", dropout, "Dropout rate");
  train_cmd->add_option("--epochs", epochs, "Maximum epochs");
  train_cmd->add_option("--batch-size", batch, "Mini-batch size");
  train_cmd->add_option("--patience", patience, "Early-stopping patience in epochs");
  train_cmd->add_option("--seed", train_seed, "Initialization and shuffling seed");
  train_cmd->add_option("--threads", common.threads, "Worker threads (default: LOCALEQ_THREADS or 1)");
  train_cmd->add_option("--out", train_out, "Checkpoint path")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint: recall at target precision, per-PT accuracy");
  std::string eval_model, eval_gold, eval_train, eval_clicklog, eval_out;
  double eval_target = 0.8;
  bool eval_global = false;
  std::optional<std::size_t> eval_hi_re;
  eval_cmd->add_option("--model", eval_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gold", eval_gold, "Gold evaluation JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--train", eval_train, "Training JSONL used to bucket locales and PTs")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--clicklog", eval_clicklog, "Training click log; PT mass becomes click mass")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--n-hi-re", eval_hi_re, "Number of high-resource locales (default 45% of locales)");
  eval_cmd->add_option("--target-precision", eval_target, "Precision bar")->capture_default_str();
  eval_cmd->add_flag("--global-threshold", eval_global, "One pooled threshold for all locales");
  eval_cmd->add_option("--threads", common.threads, "Worker threads");
  eval_cmd->add_option("--out", eval_out, "Output directory")->required();

  // pr-curve
  auto* pr_cmd = app.add_subcommand("pr-curve", "Write a precision-recall curve as CSV");
  std::string pr_model, pr_gold, pr_locale, pr_out;
  pr_cmd->add_option("--model", pr_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  pr_cmd->add_option("--gold", pr_gold, "Gold evaluation JSONL")->required()->check(CLI::ExistingFile);
  pr_cmd->add_option("--locale", pr_locale, "Restrict to one locale (default: all, pooled)");
  pr_cmd->add_option("--threads", common.threads, "Worker threads");
  pr_cmd->add_option("--out", pr_out, "Output CSV")->required();

  // analyze-pt
  auto* apt_cmd = app.add_subcommand("analyze-pt", "Head/torso/tail accuracy and count-accuracy correlation");
  std::string apt_model, apt_gold, apt_train, apt_clicklog, apt_out;
  std::optional<std::size_t> apt_hi_re;
  apt_cmd->add_option("--model", apt_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  apt_cmd->add_option("--gold", apt_gold, "Gold evaluation JSONL")->required()->check(CLI::ExistingFile);
  apt_cmd->add_option("--train", apt_train, "Training JSONL (PT mass and sample counts)")
      ->required()
      ->check(CLI::ExistingFile);
  apt_cmd->add_option("--clicklog", apt_clicklog, "Training click log; PT mass becomes click mass")
      ->check(CLI::ExistingFile);
  apt_cmd->add_option("--n-hi-re", apt_hi_re, "Number of high-resource locales (default 45% of locales)");
  apt_cmd->add_option("--threads", common.threads, "Worker threads");
  apt_cmd->add_option("--out", apt_out, "Output directory")->required();

  // analyze-emd
  auto* emd_cmd = app.add_subcommand("analyze-emd", "Per-query EMD between two locales' PT click distributions");
  std::string emd_log, emd_catalog, emd_a, emd_b, emd_out;
  std::uint64_t emd_min_clicks = 5;
  std::size_t emd_bins = 19;
  double emd_similar = 0.1, emd_alpha = 0.01;
  emd_cmd->add_option("--clicklog", emd_log, "Click log TSV")->required()->check(CLI::ExistingFile);
  emd_cmd->add_option("--catalog", emd_catalog, "catalog.json fixing the registries")->check(CLI::ExistingFile);
  emd_cmd->add_option("--locale-a", emd_a, "First locale code")->required();
  emd_cmd->add_option("--locale-b", emd_b, "Second locale code")->required();
  emd_cmd->add_option("--min-clicks", emd_min_clicks, "Minimum clicks per side")->capture_default_str();
  emd_cmd->add_option("--bins", emd_bins, "Histogram bins over [0, 1]")->capture_default_str();
  emd_cmd->add_option("--similar-below", emd_similar, "EMD below this is 'similar'")->capture_default_str();
  emd_cmd->add_option("--alpha", emd_alpha, "Significance level of the noise test")->capture_default_str();
  emd_cmd->add_option("--out", emd_out, "Output directory")->required();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict product types for one query");
  std::string pred_model, pred_query, pred_locale, pred_calibration;
  std::optional<double> pred_threshold;
  predict_cmd->add_option("--model", pred_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--query", pred_query, "Query text")->required();
  predict_cmd->add_option("--locale", pred_locale, "Locale code")->required();
  predict_cmd->add_option("--threshold", pred_threshold, "Score threshold in [0, 1]");
  predict_cmd->add_option("--calibration", pred_calibration, "calibration.json from eval")->check(CLI::ExistingFile);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve predictions over HTTP");
  std::string serve_model, serve_calibration, serve_bind = "127.0.0.1:8080";
  serve_cmd->add_option("--model", serve_model, "Checkpoint")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--calibration", serve_calibration, "calibration.json from eval")->check(CLI::ExistingFile);
  serve_cmd->add_option("--bind", serve_bind, "host:port")->capture_default_str();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Train and compare all variants on the benchmark world");
  std::string bench_config, bench_out;
  std::optional<std::uint64_t> bench_seed;
  bool bench_save = false;
  bench_cmd->add_option("--config", bench_config, "Run config JSON (default: built-in benchmark spec)")
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--seed", bench_seed, "Seed for world generation and training");
  bench_cmd->add_option("--threads", common.threads, "Worker threads");
  bench_cmd->add_option("--out", bench_out, "Output directory")->required();
  bench_cmd->add_flag("--save-models", bench_save, "Also write each variant's checkpoint and calibration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      RunConfig cfg = synth_config.empty() ? RunConfig{} : load_run_config(synth_config);
      if (synth_seed) cfg.world.seed = *synth_seed;
      const World world = generate(cfg.world);
      write_world(world, synth_out);
      const auto split = split_world(world, cfg.split.train, cfg.split.val, cfg.split.test, cfg.world.seed);
      std::vector<ClickRecord> val_log;
      std::unordered_map<std::string_view, Split> by_query;
      for (std::size_t t = 0; t < world.templates.size(); ++t) by_query.emplace(world.templates[t], split.template_split[t]);
      for (const auto& r : world.clicklog)
        if (by_query.at(r.query) == Split::kValidation) val_log.push_back(r);
      save_clicklog(out_path(synth_out, "clicklog_train.tsv"), split.train_clicklog, world.catalog);
      save_clicklog(out_path(synth_out, "clicklog_val.tsv"), val_log, world.catalog);
      save_dataset(out_path(synth_out, "test_gold.jsonl"), split.test_gold, world.catalog);
      progress("wrote world with " + std::to_string(world.clicklog.size()) + " click records to " + synth_out);
      return 0;
    }

    if (derive_cmd->parsed()) {
      Catalog catalog = derive_catalog.empty() ? Catalog{} : read_catalog_json(derive_catalog);
      const auto log = load_clicklog(derive_log, catalog);
      DeriveOptions opts;
      opts.threshold = derive_threshold;
      opts.min_total_clicks = derive_min_clicks;
      if (!(opts.threshold >= 0.5 && opts.threshold < 1.0)) throw DataError("--threshold must be in [0.5, 1)");
      const auto data = derive_all(log, catalog.locales.size(), opts);
      save_dataset(derive_out, data, catalog);
      progress("derived " + std::to_string(data.size()) + " labeled queries");
      return 0;
    }

    if (train_cmd->parsed()) {
      RunConfig cfg;
      if (!train_config.empty()) cfg = load_run_config(train_config);
      TrainConfig tc = cfg.train;
      if (lr) tc.learning_rate = *lr;
      if (dropout) tc.dropout = *dropout;
      if (epochs) tc.max_epochs = *epochs;
      if (batch) tc.batch_size = *batch;
      if (patience) tc.patience = *patience;
      if (train_seed) tc.seed = *train_seed;
      tc.threads = common.resolved();
      Catalog catalog = train_catalog.empty() ? Catalog{} : read_catalog_json(train_catalog);
      const auto train_set = load_dataset(train_data, catalog, Split::kTrain, Provenance::kDerived);
      const auto val_set =
          val_data.empty() ? Dataset{} : load_dataset(val_data, catalog, Split::kValidation, Provenance::kDerived);
      const Dataset train_fixed(train_set.examples(), Split::kTrain, Provenance::kDerived, catalog.locales.size());
      const Dataset val_fixed(val_set.examples(), Split::kValidation, Provenance::kDerived, catalog.locales.size());
      auto bundle = ModelBundle::create(parse_variant(train_variant), cfg.encoder, catalog.locales, catalog.pts, tc.seed);
      progress("training " + train_variant + " with " + std::to_string(bundle.n_parameters()) + " parameters");
      train(bundle, train_fixed, val_fixed, tc, [](std::size_t epoch, double tl, double vl) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "epoch %zu train %.6f val %.6f", epoch, tl, vl);
        progress(buf);
      });
      save_checkpoint(train_out, bundle);
      progress("saved " + train_out);
      return 0;
    }

    if (eval_cmd->parsed()) {
      const auto bundle = load_checkpoint(eval_model);
      Catalog catalog = model_catalog(bundle);
      const auto gold = load_dataset(eval_gold, catalog, Split::kTest, Provenance::kExternal);
      const auto scores = score_dataset(bundle, gold, common.resolved());
      const auto buckets =
          eval_train.empty() ? all_hi_re(catalog.locales.size()) : buckets_from_train(eval_train, catalog, eval_hi_re);
      const auto report = build_report(scores, gold, catalog.locales, buckets, eval_target,
                                       eval_global ? ThresholdMode::kGlobal : ThresholdMode::kPerLocale);
      std::vector<double> mass;
      if (!eval_clicklog.empty())
        mass = click_mass(load_clicklog(eval_clicklog, catalog), catalog.pts.size());
      else if (!eval_train.empty())
        mass = label_mass(load_dataset(eval_train, catalog, Split::kTrain, Provenance::kDerived), catalog.pts.size());
      else
        mass = label_mass(gold, catalog.pts.size());
      write_file(out_path(eval_out, "report.json"), report_to_json(report).dump(2) + "\n");
      write_file(out_path(eval_out, "report.csv"), report_csv(report));
      write_file(out_path(eval_out, "pr_curve.csv"), pr_curve_csv(pr_sweep(scored_pairs(scores, gold))));
      write_file(out_path(eval_out, "per_pt.csv"),
                 per_pt_csv(per_pt_accuracy(scores, gold), catalog.pts, head_torso_tail(mass)));
      write_file(out_path(eval_out, "calibration.json"), calibration_json(report).dump(2) + "\n");
      for (const auto& b : report.buckets)
        std::cout << b.name << "\trecall@" << eval_target << "=" << b.op.recall << "\tthreshold=" << b.op.threshold
                  << "\n";
      return 0;
    }

    if (pr_cmd->parsed()) {
      const auto bundle = load_checkpoint(pr_model);
      Catalog catalog = model_catalog(bundle);
      const auto gold = load_dataset(pr_gold, catalog, Split::kTest, Provenance::kExternal);
      const auto scores = score_dataset(bundle, gold, common.resolved());
      std::vector<bool> mask;
      if (!pr_locale.empty()) {
        const auto l = catalog.locales.at(pr_locale);
        mask.assign(gold.size(), false);
        for (std::size_t i = 0; i < gold.size(); ++i) mask[i] = gold.examples()[i].locale == l;
      }
      write_file(pr_out, pr_curve_csv(pr_sweep(scored_pairs(scores, gold, mask))));
      return 0;
    }

    if (apt_cmd->parsed()) {
      const auto bundle = load_checkpoint(apt_model);
      Catalog catalog = model_catalog(bundle);
      const auto gold = load_dataset(apt_gold, catalog, Split::kTest, Provenance::kExternal);
      const auto train_set = load_dataset(apt_train, catalog, Split::kTrain, Provenance::kDerived);
      BenchData data;
      data.train = Dataset(train_set.examples(), Split::kTrain, Provenance::kDerived, catalog.locales.size());
      data.test = Dataset(gold.examples(), Split::kTest, Provenance::kExternal, catalog.locales.size());
      data.world.catalog = catalog;
      data.buckets = buckets_from_train(apt_train, catalog, apt_hi_re);
      data.pt_mass = apt_clicklog.empty() ? label_mass(data.train, catalog.pts.size())
                                          : click_mass(load_clicklog(apt_clicklog, catalog), catalog.pts.size());
      data.pt_buckets = head_torso_tail(data.pt_mass);
      RunConfig cfg;
      cfg.train.threads = common.resolved();
      const auto scores = score_dataset(bundle, data.test, cfg.train.threads);
      const auto per_pt = per_pt_accuracy(scores, data.test);
      auto micro = [&](const std::vector<ProductTypeId>& members) {
        std::uint64_t n = 0, c = 0;
        for (auto pt : members)
          if (auto it = per_pt.find(pt); it != per_pt.end()) {
            n += it->second.count;
            c += it->second.correct;
          }
        return n ? static_cast<double>(c) / static_cast<double>(n) : 0.0;
      };
      std::vector<LocaleId> all;
      for (std::uint32_t l = 0; l < catalog.locales.size(); ++l) all.push_back(LocaleId{l});
      auto opt = [](std::optional<double> v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
      nlohmann::ordered_json j;
      j["format"] = std::string(kFormatLine.substr(1));
      j["kind"] = "pt-analysis";
      j["buckets"] = {{"head", {{"n_pts", data.pt_buckets.head.size()}, {"mass", data.pt_buckets.head_mass}, {"accuracy", micro(data.pt_buckets.head)}}},
                      {"torso", {{"n_pts", data.pt_buckets.torso.size()}, {"mass", data.pt_buckets.torso_mass}, {"accuracy", micro(data.pt_buckets.torso)}}},
                      {"tail", {{"n_pts", data.pt_buckets.tail.size()}, {"mass", data.pt_buckets.tail_mass}, {"accuracy", micro(data.pt_buckets.tail)}}}};
      j["pearson"] = {{"Lo-Re", opt(count_accuracy_pearson(scores, data, data.buckets.lo_re))},
                      {"Hi-Re", opt(count_accuracy_pearson(scores, data, data.buckets.hi_re))},
                      {"WW", opt(count_accuracy_pearson(scores, data, all))}};
      write_file(out_path(apt_out, "pt_analysis.json"), j.dump(2) + "\n");
      write_file(out_path(apt_out, "per_pt.csv"), per_pt_csv(per_pt, catalog.pts, data.pt_buckets));
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (emd_cmd->parsed()) {
      Catalog catalog = emd_catalog.empty() ? Catalog{} : read_catalog_json(emd_catalog);
      const auto log = load_clicklog(emd_log, catalog);
      const ClickIndex index(log, catalog.locales.size(), catalog.pts.size());
      const auto a = catalog.locales.at(emd_a);
      const auto b = catalog.locales.at(emd_b);
      const auto d = pair_divergence(index, a, b, emd_min_clicks, emd_bins);
      const CategorizeOptions opts{emd_similar, emd_alpha};
      write_file(out_path(emd_out, "emd_records.csv"), emd_records_csv(d, catalog.locales, index, opts));
      write_file(out_path(emd_out, "emd_hist.csv"), emd_histogram_csv(d));
      if (d.empty_intersection) progress("warning: no shared queries with enough clicks on both sides");
      else progress(std::to_string(d.records.size()) + " shared queries");
      return 0;
    }

    if (predict_cmd->parsed()) {
      if (pred_query.find_first_not_of(" \t\r\n") == std::string::npos) throw DataError("query is empty");
      const auto bundle = load_checkpoint(pred_model);
      Calibration cal;
      if (!pred_calibration.empty()) cal = parse_calibration(read_file(pred_calibration));
      const double threshold = pred_threshold ? *pred_threshold : cal.threshold_for(pred_locale);
      if (!(threshold >= 0.0 && threshold <= 1.0)) throw DataError("--threshold must be in [0, 1]");
      const auto p = predict(bundle, pred_query, pred_locale, threshold);
      if (!p.locale_known) progress("warning: locale '" + pred_locale + "' is not known to the model");
      std::cout << prediction_body(bundle, p, threshold, model_version(bundle)) << "\n";
      return 0;
    }

    if (serve_cmd->parsed()) {
      auto bundle = load_checkpoint(serve_model);
      Calibration cal;
      if (!serve_calibration.empty()) cal = parse_calibration(read_file(serve_calibration));
      const auto [host, port] = parse_bind(serve_bind);
      auto service = std::make_shared<const PredictService>(std::move(bundle), std::move(cal));
      PredictServer server(service);
      progress("serving " + service->model_version() + " on " + serve_bind);
      server.listen(host, port);
      return 0;
    }

    if (bench_cmd->parsed()) {
      RunConfig cfg = bench_config.empty() ? RunConfig{} : load_run_config(bench_config);
      if (bench_seed) cfg.set_seed(*bench_seed);
      cfg.train.threads = common.resolved();
      const auto data = prepare_bench_data(cfg);
      progress("world: " + std::to_string(data.train.size()) + " train, " + std::to_string(data.val.size()) +
               " val, " + std::to_string(data.test.size()) + " test examples");
      const auto result = run_bench(cfg, data, progress);
      write_file(out_path(bench_out, "bench_report.json"), bench_report_json(cfg, data, result).dump(2) + "\n");
      const std::string grid = bench_grid(result);
      write_file(out_path(bench_out, "grid.txt"), std::string(kFormatLine) + "\n" + grid);
      if (bench_save) {
        for (std::size_t i = 0; i < result.models.size(); ++i) {
          const std::string name(to_string(result.models[i].variant));
          save_checkpoint(out_path(bench_out, name + ".lqpt"), result.models[i]);
          write_file(out_path(bench_out, name + ".calibration.json"),
                     calibration_json(result.variants[i].report).dump(2) + "\n");
        }
        save_dataset(out_path(bench_out, "train.jsonl"), data.train, data.world.catalog);
        save_clicklog(out_path(bench_out, "clicklog_train.tsv"), data.split.train_clicklog, data.world.catalog);
        save_dataset(out_path(bench_out, "test_gold.jsonl"), data.test, data.world.catalog);
      }
      std::cout << grid;
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
