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

#include "localeq/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "localeq/hash.hpp"

namespace localeq {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view& in, const char* what) {
  if (in.size() < sizeof(T)) throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
  T v;
  std::memcpy(&v, in.data(), sizeof(T));
  in.remove_prefix(sizeof(T));
  return v;
}

std::vector<std::string> tensor_names(const ModelBundle& b) {
  std::vector<std::string> names;
  for (std::size_t e = 0; e < b.encoders.size(); ++e)
    for (const auto& p : b.encoders[e].params()) names.push_back("encoder." + std::to_string(e) + "." + p.name);
  for (const auto& h : b.heads) {
    names.push_back(h.weight.name);
    names.push_back(h.bias.name);
  }
  return names;
}

json header_of(const ModelBundle& b) {
  const auto& c = b.encoder_config;
  json h;
  h["variant"] = std::string(to_string(b.variant));
  h["encoder"] = {{"d_model", c.d_model},     {"n_layers", c.n_layers},   {"n_heads", c.n_heads},
                  {"d_ff", c.d_ff},           {"max_len", c.max_len},     {"n_buckets", c.n_buckets},
                  {"n_locales", c.n_locales}, {"dropout_rate", c.dropout_rate}};
  h["locales"] = b.locales.names();
  h["product_types"] = b.pts.names();
  json meta;
  meta["epochs_run"] = b.metadata.epochs_run;
  meta["best_epoch"] = b.metadata.best_epoch;
  meta["final_val_loss"] = std::isfinite(b.metadata.final_val_loss) ? json(b.metadata.final_val_loss) : json(nullptr);
  h["metadata"] = meta;
  json tensors = json::array();
  const auto names = tensor_names(b);
  const auto params = b.parameter_list();
  for (std::size_t i = 0; i < params.size(); ++i)
    tensors.push_back({{"name", names[i]}, {"rows", params[i]->rows}, {"cols", params[i]->cols}});
  h["tensors"] = tensors;
  return h;
}

}  // namespace

std::string serialize_checkpoint(const ModelBundle& bundle) {
  const std::string header = header_of(bundle).dump();
  std::string payload;
  put<std::uint64_t>(payload, header.size());
  payload += header;
  for (const auto* p : bundle.parameter_list())
    for (double v : p->values) put<double>(payload, v);

  std::string out(kCheckpointMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  Crc64 crc;
  crc.update(payload);
  put<std::uint64_t>(out, crc.value());
  out += payload;
  return out;
}

ModelBundle deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < kCheckpointMagic.size() || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic)
    throw CheckpointError("not a checkpoint file (bad magic)");
  bytes.remove_prefix(kCheckpointMagic.size());
  const auto version = take<std::uint32_t>(bytes, "version");
  if (version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  const auto stored_crc = take<std::uint64_t>(bytes, "checksum");
  Crc64 crc;
  crc.update(bytes);
  std::string_view payload = bytes;
  const auto header_len = take<std::uint64_t>(payload, "header length");
  if (payload.size() < header_len) throw CheckpointError("checkpoint truncated inside header");
  if (crc.value() != stored_crc) throw CheckpointError("checkpoint checksum mismatch (file corrupt)");

  json h;
  try {
    h = json::parse(payload.substr(0, header_len));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  payload.remove_prefix(header_len);

  ModelBundle b;
  try {
    EncoderConfig c;
    const auto& e = h.at("encoder");
    c.d_model = e.at("d_model");
    c.n_layers = e.at("n_layers");
    c.n_heads = e.at("n_heads");
    c.d_ff = e.at("d_ff");
    c.max_len = e.at("max_len");
    c.n_buckets = e.at("n_buckets");
    c.n_locales = e.at("n_locales");
    c.dropout_rate = e.at("dropout_rate");
    const auto variant = parse_variant(h.at("variant").get<std::string>());
    LocaleRegistry locales(h.at("locales").get<std::vector<std::string>>());
    PtRegistry pts(h.at("product_types").get<std::vector<std::string>>());
    if (locales.size() != c.n_locales) throw CheckpointError("checkpoint locale count disagrees with config");
    b = ModelBundle::create(variant, c, std::move(locales), std::move(pts), 0);
    const auto& meta = h.at("metadata");
    b.metadata.epochs_run = meta.at("epochs_run");
    b.metadata.best_epoch = meta.at("best_epoch");
    b.metadata.final_val_loss = meta.at("final_val_loss").is_null()
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : meta.at("final_val_loss").get<double>();

    const auto& tensors = h.at("tensors");
    const auto names = tensor_names(b);
    auto params = b.parameter_list();
    if (tensors.size() != params.size()) throw CheckpointError("checkpoint tensor count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& t = tensors[i];
      if (t.at("name").get<std::string>() != names[i] || t.at("rows").get<std::size_t>() != params[i]->rows ||
          t.at("cols").get<std::size_t>() != params[i]->cols)
        throw CheckpointError("checkpoint tensor " + std::to_string(i) + " does not match the model layout");
      for (auto& v : params[i]->values) v = take<double>(payload, "tensor data");
    }
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("invalid checkpoint configuration: ") + e.what());
  }
  if (!payload.empty()) throw CheckpointError("checkpoint has trailing bytes");
  return b;
}

void save_checkpoint(const std::string& path, const ModelBundle& bundle) {
  write_file(path, serialize_checkpoint(bundle));
}

ModelBundle load_checkpoint(const std::string& path) { return deserialize_checkpoint(read_file(path)); }

std::string model_version(const ModelBundle& bundle) {
  const std::string bytes = serialize_checkpoint(bundle);
  std::uint64_t crc = 0;
  std::memcpy(&crc, bytes.data() + kCheckpointMagic.size() + sizeof(std::uint32_t), sizeof(crc));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(crc));
  return std::string(to_string(bundle.variant)) + "-" + buf;
}

}  // namespace localeq
