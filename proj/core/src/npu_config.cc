/* Copyright 2026 The NpuPlan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "npuplan/npu_config.h"

#include <set>

#include "json_util.h"

namespace npuplan {

using internal::field_error;
using internal::Json;
using internal::OrderedJson;

namespace {

constexpr const char* kTermNames[kNumCostTerms] = {
    "ifm_full", "ifm_partial", "ofm_full", "ofm_partial", "wm_partial",
    "w_partial"};

Bytes read_bytes(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    field_error(path, "expected non-negative integer byte count");
  }
  return v.get<Bytes>();
}

void read_int_pair(const Json& v, const std::string& path, int* h, int* w) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
      !v[1].is_number_integer()) {
    field_error(path, "expected [h, w]");
  }
  *h = v[0].get<int>();
  *w = v[1].get<int>();
}

}  // namespace

const char* to_string(CostTerm term) {
  return kTermNames[static_cast<int>(term)];
}

NpuConfig NpuConfig::plain() {
  NpuConfig cfg;
  cfg.layout_tile_h = 1;
  cfg.layout_tile_w = 1;
  cfg.ifm_band = IfmBand::kKernelRows;
  cfg.weight_buffers = cfg.double_buffer;
  cfg.window_staging = false;
  return cfg;
}

void NpuConfig::validate() const {
  auto require = [](long long v, const char* name) {
    if (v <= 0) {
      throw Error(ErrorCode::kSchema,
                  std::string("npu config: ") + name + " must be positive");
    }
  };
  require(on_chip_bytes, "on_chip_bytes");
  require(element_bytes, "element_bytes");
  require(maa_count, "maa_count");
  require(mac_count, "mac_count");
  require(ifm_chunks, "ifm_chunks");
  require(patch_h, "patch_h");
  require(patch_w, "patch_w");
  require(accum_bytes, "accum_bytes");
  require(double_buffer, "double_buffer");
  require(alignment_bytes, "alignment_bytes");
  require(layout_tile_h, "layout_tile_h");
  require(layout_tile_w, "layout_tile_w");
  require(weight_buffers, "weight_buffers");
}

bool NpuConfig::mac_consistent() const {
  return Bytes{maa_count} * patch_h * patch_w * ifm_chunks == mac_count;
}

Bytes align_up(Bytes bytes, int alignment) {
  if (alignment <= 1) return bytes;
  return (bytes + alignment - 1) / alignment * alignment;
}

int round_up(int value, int multiple) {
  if (multiple <= 1) return value;
  return (value + multiple - 1) / multiple * multiple;
}

Bytes tensor_bytes(const TensorShape& shape, const NpuConfig& cfg) {
  Bytes raw = Bytes{round_up(shape.h, cfg.layout_tile_h)} *
              round_up(shape.w, cfg.layout_tile_w) * shape.c *
              cfg.element_bytes;
  return align_up(raw, cfg.alignment_bytes);
}

NpuConfig parse_npu_config(std::string_view text) {
  Json doc = internal::parse_json_document(text, "npu config");
  if (!doc.is_object()) field_error("<root>", "expected object");

  NpuConfig cfg;
  if (doc.contains("preset")) {
    const Json& p = doc["preset"];
    if (p == "plain") {
      cfg = NpuConfig::plain();
    } else if (p != "default") {
      field_error("preset", "expected \"default\" or \"plain\"");
    }
  }
  struct IntField {
    const char* key;
    int* dst;
  };
  const IntField ints[] = {
      {"element_bytes", &cfg.element_bytes},
      {"maa_count", &cfg.maa_count},
      {"mac_count", &cfg.mac_count},
      {"ifm_chunks", &cfg.ifm_chunks},
      {"patch_h", &cfg.patch_h},
      {"patch_w", &cfg.patch_w},
      {"accum_bytes", &cfg.accum_bytes},
      {"double_buffer", &cfg.double_buffer},
      {"alignment_bytes", &cfg.alignment_bytes},
      {"weight_buffers", &cfg.weight_buffers},
  };
  std::set<std::string> known = {"preset",        "on_chip_bytes",
                                 "patch",         "layout_tile",
                                 "ifm_band",      "window_staging",
                                 "cost_overrides"};
  for (const IntField& f : ints) {
    known.insert(f.key);
    if (doc.contains(f.key)) {
      *f.dst = static_cast<int>(internal::get_int(doc, f.key, "<root>"));
    }
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!known.count(it.key())) field_error(it.key(), "unknown field");
  }
  if (doc.contains("on_chip_bytes")) {
    cfg.on_chip_bytes = internal::get_int(doc, "on_chip_bytes", "<root>");
  }
  if (doc.contains("patch")) {
    read_int_pair(doc["patch"], "patch", &cfg.patch_h, &cfg.patch_w);
  }
  if (doc.contains("layout_tile")) {
    read_int_pair(doc["layout_tile"], "layout_tile", &cfg.layout_tile_h,
                  &cfg.layout_tile_w);
  }
  if (doc.contains("ifm_band")) {
    const Json& v = doc["ifm_band"];
    if (v == "patch-rows") {
      cfg.ifm_band = IfmBand::kPatchRows;
    } else if (v == "kernel-rows") {
      cfg.ifm_band = IfmBand::kKernelRows;
    } else {
      field_error("ifm_band", "expected \"patch-rows\" or \"kernel-rows\"");
    }
  }
  if (doc.contains("window_staging")) {
    if (!doc["window_staging"].is_boolean()) {
      field_error("window_staging", "expected boolean");
    }
    cfg.window_staging = doc["window_staging"].get<bool>();
  }
  if (doc.contains("cost_overrides")) {
    const Json& ov = doc["cost_overrides"];
    if (!ov.is_object()) field_error("cost_overrides", "expected object");
    for (auto it = ov.begin(); it != ov.end(); ++it) {
      int term = -1;
      for (int t = 0; t < kNumCostTerms; ++t) {
        if (it.key() == kTermNames[t]) term = t;
      }
      const std::string path = "cost_overrides." + it.key();
      if (term < 0) field_error(path, "unknown cost term");
      CostOverride& dst = cfg.overrides[term];
      if (it->is_object()) {
        for (auto l = it->begin(); l != it->end(); ++l) {
          Bytes b = read_bytes(*l, path + "." + l.key());
          if (l.key() == "*") {
            dst.all = b;
          } else {
            dst.per_layer[l.key()] = b;
          }
        }
      } else {
        dst.all = read_bytes(*it, path);
      }
    }
  }
  cfg.validate();
  return cfg;
}

NpuConfig load_npu_config(const std::filesystem::path& path) {
  return parse_npu_config(internal::read_text_file(path));
}

std::string npu_config_json(const NpuConfig& cfg) {
  OrderedJson doc;
  doc["on_chip_bytes"] = cfg.on_chip_bytes;
  doc["element_bytes"] = cfg.element_bytes;
  doc["maa_count"] = cfg.maa_count;
  doc["mac_count"] = cfg.mac_count;
  doc["ifm_chunks"] = cfg.ifm_chunks;
  doc["patch"] = {cfg.patch_h, cfg.patch_w};
  doc["accum_bytes"] = cfg.accum_bytes;
  doc["double_buffer"] = cfg.double_buffer;
  doc["alignment_bytes"] = cfg.alignment_bytes;
  doc["layout_tile"] = {cfg.layout_tile_h, cfg.layout_tile_w};
  doc["ifm_band"] =
      cfg.ifm_band == IfmBand::kPatchRows ? "patch-rows" : "kernel-rows";
  doc["weight_buffers"] = cfg.weight_buffers;
  doc["window_staging"] = cfg.window_staging;
  OrderedJson ov = OrderedJson::object();
  for (int t = 0; t < kNumCostTerms; ++t) {
    const CostOverride& o = cfg.overrides[t];
    if (o.empty()) continue;
    if (o.per_layer.empty()) {
      ov[kTermNames[t]] = *o.all;
    } else {
      OrderedJson per = OrderedJson::object();
      if (o.all) per["*"] = *o.all;
      for (const auto& [name, bytes] : o.per_layer) per[name] = bytes;
      ov[kTermNames[t]] = std::move(per);
    }
  }
  doc["cost_overrides"] = std::move(ov);
  return doc.dump(2);
}

}  // namespace npuplan
