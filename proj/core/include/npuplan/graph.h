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

#ifndef NPUPLAN_GRAPH_H_
#define NPUPLAN_GRAPH_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "npuplan/types.h"

namespace npuplan {

enum class LayerKind {
  kConvolution,
  kPoolingMax,
  kPoolingAvg,
  kConcatenation,
  kElementwiseAdd,
  kFullyConnected,
  kInput,
  kOutput,
};

const char* to_string(LayerKind kind);
std::optional<LayerKind> parse_layer_kind(std::string_view text);

inline bool is_merge(LayerKind kind) {
  return kind == LayerKind::kConcatenation ||
         kind == LayerKind::kElementwiseAdd;
}
inline bool is_pooling(LayerKind kind) {
  return kind == LayerKind::kPoolingMax || kind == LayerKind::kPoolingAvg;
}
// Layers that run on the MAC arrays and carry weights.
inline bool has_weights(LayerKind kind) {
  return kind == LayerKind::kConvolution ||
         kind == LayerKind::kFullyConnected;
}

struct LayerNode {
  LayerId id = kNoLayer;
  std::string name;
  LayerKind kind = LayerKind::kConvolution;
  int kernel_h = 1;
  int kernel_w = 1;
  int stride_h = 1;
  int stride_w = 1;
  int pad_h = 0;
  int pad_w = 0;
  // 0 until inferred for kinds that do not declare it.
  int in_channels = 0;
  int out_channels = 0;
  int in_h = 0;
  int in_w = 0;
  int out_h = 0;
  int out_w = 0;
  Bytes weight_bytes = 0;
  std::string activation;

  TensorShape in_shape() const { return {in_h, in_w, in_channels}; }
  TensorShape out_shape() const { return {out_h, out_w, out_channels}; }
};

struct Edge {
  LayerId src = kNoLayer;
  LayerId dst = kNoLayer;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct NetworkGraph {
  std::string name;
  TensorShape input;
  std::vector<LayerNode> layers;
  std::vector<Edge> edges;
  // Empty when the edge set contains a cycle.
  std::vector<LayerId> topo_order;
  // Per-layer adjacency in edge declaration order. The order of a
  // concatenation's predecessors is its channel order.
  std::vector<std::vector<LayerId>> preds;
  std::vector<std::vector<LayerId>> succs;

  const LayerNode& layer(LayerId id) const { return layers[index(id)]; }
  std::optional<LayerId> find(std::string_view name) const;
  LayerId input_layer() const;
  std::size_t size() const { return layers.size(); }

  // Recomputes preds/succs/topo_order from `edges`.
  void rebuild();
};

// Parses the JSON network document described in README.md.
// Throws Error{kParse} on malformed text or fields and Error{kSchema} on
// duplicate names, unknown edge endpoints and similar structural problems.
NetworkGraph parse_network(std::string_view text);
NetworkGraph load_network(const std::filesystem::path& path);

// Canonical document form; parse_network(serialize_network(g)) reproduces
// the layer and edge sets of g.
std::string serialize_network(const NetworkGraph& graph);

struct DagCheck {
  bool ok = true;
  // One cycle, as layer ids in edge order, when !ok.
  std::vector<LayerId> cycle;
};

DagCheck validate_dag(const NetworkGraph& graph);
// Throws CycleError when validate_dag fails.
void require_dag(const NetworkGraph& graph);

// Fills in_*/out_* dims, channels and weight_bytes in topological order.
// Throws Error{kShape} naming the offending layer.
NetworkGraph infer_shapes(NetworkGraph graph, int input_h, int input_w,
                          int input_c, int element_bytes = 1);
NetworkGraph infer_shapes(NetworkGraph graph, int element_bytes = 1);

}  // namespace npuplan

#endif  // NPUPLAN_GRAPH_H_
