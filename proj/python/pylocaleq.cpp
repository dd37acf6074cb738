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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "localeq/bench.hpp"
#include "localeq/checkpoint.hpp"
#include "localeq/divergence.hpp"
#include "localeq/gradcheck.hpp"
#include "localeq/server.hpp"

namespace py = pybind11;
using namespace localeq;

namespace {

struct Model {
  ModelBundle bundle;
  std::string version;

  explicit Model(ModelBundle b) : bundle(std::move(b)), version(model_version(bundle)) {}

  static Model load(const std::string& path) { return Model(load_checkpoint(path)); }
  void save(const std::string& path) const { save_checkpoint(path, bundle); }

  py::dict predict(const std::string& query, const std::string& locale, double threshold) const {
    const auto p = localeq::predict(bundle, query, locale, threshold);
    py::list pts;
    for (const auto& s : p.product_types) pts.append(py::make_tuple(bundle.pts.name(s.pt), s.score));
    py::dict d;
    d["product_types"] = pts;
    d["refused"] = p.refused();
    d["locale_known"] = p.locale_known;
    return d;
  }

  py::array_t<double> scores(const std::vector<std::string>& queries, const std::vector<std::string>& locales) const {
    if (queries.size() != locales.size()) throw std::invalid_argument("queries and locales differ in length");
    std::vector<QueryInput> rows;
    for (std::size_t i = 0; i < queries.size(); ++i) rows.push_back({queries[i], locales[i]});
    const auto s = forward_scores(bundle, rows).scores;
    py::array_t<double> out({static_cast<py::ssize_t>(s.rows()), static_cast<py::ssize_t>(s.cols())});
    std::copy(s.data(), s.data() + s.size(), out.mutable_data());
    return out;
  }
};

Model train_model(const std::string& variant, const std::string& train_path, const std::string& val_path,
                  const std::string& catalog_path, const std::optional<std::string>& config_path) {
  const RunConfig cfg = config_path ? load_run_config(*config_path) : RunConfig{};
  Catalog catalog = read_catalog_json(catalog_path);
  catalog.freeze();
  const auto train_set = load_dataset(train_path, catalog, Split::kTrain, Provenance::kDerived);
  const auto val_set = load_dataset(val_path, catalog, Split::kValidation, Provenance::kDerived);
  auto bundle = ModelBundle::create(parse_variant(variant), cfg.encoder, catalog.locales, catalog.pts, cfg.train.seed);
  {
    py::gil_scoped_release release;
    train(bundle, train_set, val_set, cfg.train);
  }
  return Model(std::move(bundle));
}

py::dict operating_point(const std::vector<double>& scores, const std::vector<bool>& gold, double target) {
  if (scores.size() != gold.size()) throw std::invalid_argument("scores and gold differ in length");
  std::vector<ScoredPair> pairs;
  for (std::size_t i = 0; i < scores.size(); ++i) pairs.push_back({scores[i], gold[i]});
  const auto op = recall_at_precision(pr_sweep(std::move(pairs)), target);
  py::dict d;
  d["recall"] = op.recall;
  d["precision"] = op.precision;
  d["threshold"] = op.threshold;
  d["attainable"] = op.attainable;
  return d;
}

double emd(const std::vector<double>& p, const std::vector<double>& q) {
  PTDistribution a, b;
  a.probs = p;
  b.probs = q;
  return emd_unit(a, b);
}

py::dict synth(const std::string& out_dir, const std::optional<std::string>& config_path,
               std::optional<std::uint64_t> seed) {
  RunConfig cfg = config_path ? load_run_config(*config_path) : RunConfig{};
  if (seed) cfg.world.seed = *seed;
  const auto world = generate(cfg.world);
  write_world(world, out_dir);
  py::dict d;
  d["locales"] = world.catalog.locales.names();
  d["product_types"] = world.catalog.pts.size();
  d["click_records"] = world.clicklog.size();
  d["flip_records"] = world.flip_manifest.size();
  return d;
}

}  // namespace

PYBIND11_MODULE(pylocaleq, m) {
  m.doc() = "Multi-locale query to product-type classification";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  py::class_<Model>(m, "Model")
      .def_static("load", &Model::load, py::arg("path"))
      .def("save", &Model::save, py::arg("path"))
      .def("predict", &Model::predict, py::arg("query"), py::arg("locale"), py::arg("threshold") = 0.5)
      .def("scores", &Model::scores, py::arg("queries"), py::arg("locales"),
           "Sigmoid scores, one row per query and one column per product type.")
      .def_property_readonly("variant", [](const Model& s) { return std::string(to_string(s.bundle.variant)); })
      .def_property_readonly("version", [](const Model& s) { return s.version; })
      .def_property_readonly("locales", [](const Model& s) { return s.bundle.locales.names(); })
      .def_property_readonly("product_types", [](const Model& s) { return s.bundle.pts.names(); })
      .def_property_readonly("n_parameters", [](const Model& s) { return s.bundle.n_parameters(); });

  m.def("train", &train_model, py::arg("variant"), py::arg("train"), py::arg("val"), py::arg("catalog"),
        py::arg("config") = py::none(), "Train one variant from JSONL datasets and a catalog.json.");
  m.def("synth", &synth, py::arg("out_dir"), py::arg("config") = py::none(), py::arg("seed") = py::none(),
        "Generate a synthetic world into out_dir.");
  m.def("recall_at_precision", &operating_point, py::arg("scores"), py::arg("gold"), py::arg("target") = 0.8);
  m.def("emd", &emd, py::arg("p"), py::arg("q"), "Earth mover's distance under the unit ground metric.");
  m.def(
      "grad_check", [](std::uint64_t seed) { return grad_check(GradCheckOptions{}, seed).max_rel_error; },
      py::arg("seed") = 1);
  m.def("default_config", [] { return to_json(RunConfig{}).dump(2); });
}
