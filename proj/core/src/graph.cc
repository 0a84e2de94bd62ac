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

#include "npuplan/graph.h"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json_util.h"

namespace npuplan {

using internal::field_error;
using internal::Json;
using internal::OrderedJson;

namespace {

constexpr struct {
  LayerKind kind;
  const char* name;
} kKindNames[] = {
    {LayerKind::kConvolution, "convolution"},
    {LayerKind::kPoolingMax, "pooling-max"},
    {LayerKind::kPoolingAvg, "pooling-avg"},
    {LayerKind::kConcatenation, "concatenation"},
    {LayerKind::kElementwiseAdd, "elementwise-add"},
    {LayerKind::kFullyConnected, "fully-connected"},
    {LayerKind::kInput, "input"},
    {LayerKind::kOutput, "output"},
};

// Reads an optional [h, w] pair.
void read_pair(const Json& obj, const char* key, const std::string& path,
               int min_value, int* h, int* w) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string field = path + "." + key;
  if (!it->is_array() || it->size() != 2) {
    field_error(field, "expected [h, w]");
  }
  for (const Json& v : *it) {
    if (!v.is_number_integer() || v.get<long long>() < min_value ||
        v.get<long long>() > (1 << 20)) {
      field_error(field, min_value > 0 ? "expected positive integers"
                                       : "expected non-negative integers");
    }
  }
  *h = (*it)[0].get<int>();
  *w = (*it)[1].get<int>();
}

std::string layer_path(std::size_t i) {
  return "layers[" + std::to_string(i) + "]";
}

[[noreturn]] void shape_error(const LayerNode& l, const std::string& msg) {
  throw Error(ErrorCode::kShape, "layer '" + l.name + "': " + msg);
}

int window_out(int in, int pad, int kernel, int stride) {
  int span = in + 2 * pad - kernel;
  if (span < 0) return 0;
  return span / stride + 1;
}

}  // namespace

const char* to_string(LayerKind kind) {
  for (const auto& e : kKindNames) {
    if (e.kind == kind) return e.name;
  }
  return "unknown";
}

std::optional<LayerKind> parse_layer_kind(std::string_view text) {
  for (const auto& e : kKindNames) {
    if (text == e.name) return e.kind;
  }
  return std::nullopt;
}

std::optional<LayerId> NetworkGraph::find(std::string_view n) const {
  for (const LayerNode& l : layers) {
    if (l.name == n) return l.id;
  }
  return std::nullopt;
}

LayerId NetworkGraph::input_layer() const {
  for (const LayerNode& l : layers) {
    if (l.kind == LayerKind::kInput) return l.id;
  }
  return kNoLayer;
}

void NetworkGraph::rebuild() {
  const std::size_t n = layers.size();
  preds.assign(n, {});
  succs.assign(n, {});
  std::vector<int> indegree(n, 0);
  for (const Edge& e : edges) {
    succs[index(e.src)].push_back(e.dst);
    preds[index(e.dst)].push_back(e.src);
    ++indegree[index(e.dst)];
  }
  // Kahn's algorithm, lowest declaration index first, so the order is a
  // pure function of the document.
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(static_cast<int>(i));
  }
  topo_order.clear();
  topo_order.reserve(n);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    topo_order.push_back(layer_id(v));
    for (LayerId s : succs[v]) {
      if (--indegree[index(s)] == 0) ready.push(index(s));
    }
  }
  if (topo_order.size() != n) topo_order.clear();
}

NetworkGraph parse_network(std::string_view text) {
  Json doc = internal::parse_json_document(text, "network document");
  if (!doc.is_object()) field_error("<root>", "expected object");

  static const std::set<std::string> kRootKeys = {"name", "input", "layers",
                                                  "edges"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!kRootKeys.count(it.key())) field_error(it.key(), "unknown field");
  }

  NetworkGraph g;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) field_error("name", "expected string");
    g.name = doc["name"].get<std::string>();
  }
  if (!doc.contains("input")) field_error("input", "missing");
  const Json& input = doc["input"];
  if (!input.is_array() || input.size() != 3) {
    field_error("input", "expected [h, w, c]");
  }
  for (const Json& v : input) {
    if (!v.is_number_integer() || v.get<long long>() <= 0 ||
        v.get<long long>() > (1 << 20)) {
      field_error("input", "expected positive integers");
    }
  }
  g.input = {input[0].get<int>(), input[1].get<int>(), input[2].get<int>()};

  if (!doc.contains("layers")) field_error("layers", "missing");
  const Json& layers = doc["layers"];
  if (!layers.is_array()) field_error("layers", "expected array");

  static const std::set<std::string> kLayerKeys = {
      "name", "kind", "kernel", "stride", "pad", "out_channels", "activation"};
  std::unordered_map<std::string, LayerId> by_name;
  int inputs = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Json& rec = layers[i];
    const std::string path = layer_path(i);
    if (!rec.is_object()) field_error(path, "expected object");
    for (auto it = rec.begin(); it != rec.end(); ++it) {
      if (!kLayerKeys.count(it.key())) {
        field_error(path + "." + it.key(), "unknown field");
      }
    }
    LayerNode l;
    l.id = layer_id(static_cast<std::int32_t>(i));
    if (!rec.contains("name") || !rec["name"].is_string() ||
        rec["name"].get<std::string>().empty()) {
      field_error(path + ".name", "expected non-empty string");
    }
    l.name = rec["name"].get<std::string>();
    if (!rec.contains("kind") || !rec["kind"].is_string()) {
      field_error(path + ".kind", "expected string");
    }
    auto kind = parse_layer_kind(rec["kind"].get<std::string>());
    if (!kind) {
      field_error(path + ".kind",
                  "unknown kind '" + rec["kind"].get<std::string>() + "'");
    }
    l.kind = *kind;
    read_pair(rec, "kernel", path, 1, &l.kernel_h, &l.kernel_w);
    read_pair(rec, "stride", path, 1, &l.stride_h, &l.stride_w);
    read_pair(rec, "pad", path, 0, &l.pad_h, &l.pad_w);
    if (rec.contains("out_channels")) {
      l.out_channels = internal::get_positive_int(rec, "out_channels", path);
    } else if (has_weights(l.kind)) {
      field_error(path + ".out_channels",
                  std::string("required for ") + to_string(l.kind));
    }
    if (rec.contains("activation")) {
      if (!rec["activation"].is_string()) {
        field_error(path + ".activation", "expected string");
      }
      l.activation = rec["activation"].get<std::string>();
    }
    if (!by_name.emplace(l.name, l.id).second) {
      throw Error(ErrorCode::kSchema, "duplicate layer name '" + l.name + "'");
    }
    if (l.kind == LayerKind::kInput) ++inputs;
    g.layers.push_back(std::move(l));
  }
  if (inputs != 1) {
    throw Error(ErrorCode::kSchema,
                "expected exactly one input layer, found " +
                    std::to_string(inputs));
  }

  if (doc.contains("edges")) {
    const Json& edges = doc["edges"];
    if (!edges.is_array()) field_error("edges", "expected array");
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const Json& rec = edges[i];
      const std::string path = "edges[" + std::to_string(i) + "]";
      if (!rec.is_object() || rec.size() != 2 || !rec.contains("src") ||
          !rec.contains("dst") || !rec["src"].is_string() ||
          !rec["dst"].is_string()) {
        field_error(path, "expected {\"src\": name, \"dst\": name}");
      }
      Edge e;
      for (const char* end : {"src", "dst"}) {
        const std::string n = rec[end].get<std::string>();
        auto it = by_name.find(n);
        if (it == by_name.end()) {
          throw Error(ErrorCode::kSchema, path + "." + end +
                                              ": unknown layer '" + n + "'");
        }
        (std::string_view(end) == "src" ? e.src : e.dst) = it->second;
      }
      if (!seen.emplace(index(e.src), index(e.dst)).second) {
        throw Error(ErrorCode::kSchema,
                    path + ": duplicate edge '" + g.layer(e.src).name +
                        "' -> '" + g.layer(e.dst).name + "'");
      }
      if (g.layer(e.dst).kind == LayerKind::kInput) {
        throw Error(ErrorCode::kSchema, path + ": input layer '" +
                                            g.layer(e.dst).name +
                                            "' cannot have predecessors");
      }
      g.edges.push_back(e);
    }
  }
  g.rebuild();
  return g;
}

NetworkGraph load_network(const std::filesystem::path& path) {
  return parse_network(internal::read_text_file(path));
}

std::string serialize_network(const NetworkGraph& graph) {
  OrderedJson doc;
  doc["name"] = graph.name;
  doc["input"] = {graph.input.h, graph.input.w, graph.input.c};
  OrderedJson layers = OrderedJson::array();
  for (const LayerNode& l : graph.layers) {
    OrderedJson rec;
    rec["name"] = l.name;
    rec["kind"] = to_string(l.kind);
    rec["kernel"] = {l.kernel_h, l.kernel_w};
    rec["stride"] = {l.stride_h, l.stride_w};
    rec["pad"] = {l.pad_h, l.pad_w};
    if (l.out_channels > 0) rec["out_channels"] = l.out_channels;
    if (!l.activation.empty()) rec["activation"] = l.activation;
    layers.push_back(std::move(rec));
  }
  doc["layers"] = std::move(layers);
  OrderedJson edges = OrderedJson::array();
  for (const Edge& e : graph.edges) {
    edges.push_back({{"src", graph.layer(e.src).name},
                     {"dst", graph.layer(e.dst).name}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

DagCheck validate_dag(const NetworkGraph& graph) {
  DagCheck result;
  const std::size_t n = graph.layers.size();
  if (graph.preds.size() != n) {
    NetworkGraph copy = graph;
    copy.rebuild();
    return validate_dag(copy);
  }
  // Iterative three-colour DFS; the first back edge found closes the
  // reported cycle.
  enum Colour : char { kWhite, kGrey, kBlack };
  std::vector<Colour> colour(n, kWhite);
  std::vector<int> parent(n, -1);
  for (std::size_t root = 0; root < n; ++root) {
    if (colour[root] != kWhite) continue;
    std::vector<std::pair<int, std::size_t>> stack = {{int(root), 0}};
    colour[root] = kGrey;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < graph.succs[v].size()) {
        int s = index(graph.succs[v][next++]);
        if (colour[s] == kWhite) {
          colour[s] = kGrey;
          parent[s] = v;
          stack.push_back({s, 0});
        } else if (colour[s] == kGrey) {
          result.ok = false;
          for (int u = v; u != s; u = parent[u]) {
            result.cycle.push_back(layer_id(u));
          }
          result.cycle.push_back(layer_id(s));
          std::reverse(result.cycle.begin(), result.cycle.end());
          return result;
        }
      } else {
        colour[v] = kBlack;
        stack.pop_back();
      }
    }
  }
  return result;
}

void require_dag(const NetworkGraph& graph) {
  DagCheck check = validate_dag(graph);
  if (check.ok) return;
  std::vector<std::string> names;
  std::string joined;
  for (LayerId id : check.cycle) {
    names.push_back(graph.layer(id).name);
    if (!joined.empty()) joined += " -> ";
    joined += names.back();
  }
  const std::string what = "cycle: " + joined + " -> " + names.front();
  throw CycleError(what, std::move(names));
}

NetworkGraph infer_shapes(NetworkGraph graph, int element_bytes) {
  TensorShape in = graph.input;
  return infer_shapes(std::move(graph), in.h, in.w, in.c, element_bytes);
}

NetworkGraph infer_shapes(NetworkGraph g, int input_h, int input_w,
                          int input_c, int element_bytes) {
  if (g.preds.size() != g.layers.size()) g.rebuild();
  require_dag(g);
  g.input = {input_h, input_w, input_c};
  const Bytes eb = element_bytes;
  for (LayerId id : g.topo_order) {
    LayerNode& l = g.layers[index(id)];
    const auto& preds = g.preds[index(id)];
    if (l.kind == LayerKind::kInput) {
      l.in_h = l.out_h = input_h;
      l.in_w = l.out_w = input_w;
      l.in_channels = l.out_channels = input_c;
      l.weight_bytes = 0;
      continue;
    }
    if (preds.empty()) shape_error(l, "not reachable from the input layer");
    if (!is_merge(l.kind) && preds.size() != 1) {
      shape_error(l, std::string(to_string(l.kind)) + " expects 1 input, has " +
                         std::to_string(preds.size()));
    }
    const LayerNode& first = g.layer(preds.front());
    l.in_h = first.out_h;
    l.in_w = first.out_w;
    l.in_channels = first.out_channels;
    l.weight_bytes = 0;
    switch (l.kind) {
      case LayerKind::kConvolution:
      case LayerKind::kPoolingMax:
      case LayerKind::kPoolingAvg: {
        int oh = window_out(l.in_h, l.pad_h, l.kernel_h, l.stride_h);
        int ow = window_out(l.in_w, l.pad_w, l.kernel_w, l.stride_w);
        if (oh <= 0 || ow <= 0) {
          std::ostringstream msg;
          msg << "non-positive output " << oh << "x" << ow << " from input "
              << l.in_h << "x" << l.in_w;
          shape_error(l, msg.str());
        }
        l.out_h = oh;
        l.out_w = ow;
        if (l.kind == LayerKind::kConvolution) {
          l.weight_bytes = Bytes{l.kernel_h} * l.kernel_w * l.in_channels *
                           l.out_channels * eb;
        } else {
          if (l.out_channels != 0 && l.out_channels != l.in_channels) {
            shape_error(l, "pooling cannot change channel count");
          }
          l.out_channels = l.in_channels;
        }
        break;
      }
      case LayerKind::kFullyConnected:
        l.out_h = l.out_w = 1;
        l.weight_bytes =
            Bytes{l.in_h} * l.in_w * l.in_channels * l.out_channels * eb;
        break;
      case LayerKind::kOutput:
        l.out_h = l.in_h;
        l.out_w = l.in_w;
        if (l.out_channels != 0 && l.out_channels != l.in_channels) {
          shape_error(l, "output layer cannot change channel count");
        }
        l.out_channels = l.in_channels;
        break;
      case LayerKind::kConcatenation: {
        int channels = 0;
        for (LayerId p : preds) {
          const LayerNode& pl = g.layer(p);
          if (pl.out_h != l.in_h || pl.out_w != l.in_w) {
            std::ostringstream msg;
            msg << "input '" << pl.name << "' is " << pl.out_h << "x"
                << pl.out_w << ", expected " << l.in_h << "x" << l.in_w;
            shape_error(l, msg.str());
          }
          channels += pl.out_channels;
        }
        if (l.out_channels != 0 && l.out_channels != channels) {
          shape_error(l, "declared out_channels " +
                             std::to_string(l.out_channels) +
                             " != sum of inputs " + std::to_string(channels));
        }
        l.in_channels = l.out_channels = channels;
        l.out_h = l.in_h;
        l.out_w = l.in_w;
        break;
      }
      case LayerKind::kElementwiseAdd: {
        if (preds.size() < 2) shape_error(l, "elementwise-add needs 2 inputs");
        for (LayerId p : preds) {
          const LayerNode& pl = g.layer(p);
          if (pl.out_shape() != first.out_shape()) {
            std::ostringstream msg;
            msg << "input '" << pl.name << "' is " << pl.out_h << "x"
                << pl.out_w << "x" << pl.out_channels << ", expected "
                << first.out_h << "x" << first.out_w << "x"
                << first.out_channels;
            shape_error(l, msg.str());
          }
        }
        if (l.out_channels != 0 && l.out_channels != first.out_channels) {
          shape_error(l, "declared out_channels mismatch");
        }
        l.out_h = l.in_h;
        l.out_w = l.in_w;
        l.out_channels = first.out_channels;
        break;
      }
      case LayerKind::kInput:
        break;
    }
  }
  return g;
}

}  // namespace npuplan
