#pragma once
// Layered network descriptions: JSON (de)serialization, shape composition,
// parameter accounting, and the bundled reference configurations.

#include <string>
#include <vector>

#include "common.hpp"

namespace snntopo {

enum class LayerKind { Conv, Pool, Linear, Residual };
enum class PoolKind { Max, Avg };
enum class ShortcutKind { Identity, Projection };

struct Shape {
  u32 h = 0, w = 0, c = 0;
  u64 count() const { return static_cast<u64>(h) * w * c; }
  bool operator==(const Shape&) const = default;
};

struct LayerSpec {
  LayerKind kind = LayerKind::Conv;
  // Conv
  u32 c_in = 0, c_out = 0;
  u32 kh = 0, kw = 0;
  u32 stride = 1;
  u32 padding = 0;
  // Pool
  PoolKind pool = PoolKind::Max;
  u32 win_h = 0, win_w = 0;
  // Linear
  u64 n_in = 0, n_out = 0;
  // Residual: shortcut joins input of layers[source] to output of layers[target].
  // Projection shortcuts reuse c_in/c_out; their stride is derived from shapes.
  u32 source = 0, target = 0;
  ShortcutKind shortcut = ShortcutKind::Identity;

  bool has_weights() const {
    return kind == LayerKind::Conv || kind == LayerKind::Linear ||
           (kind == LayerKind::Residual && shortcut == ShortcutKind::Projection);
  }
};

struct ArchitectureSpec {
  std::string name;
  Shape input;
  std::vector<LayerSpec> layers;

  // Filled by validation. in_shape[i] is the tensor entering layer i;
  // out_shape[i] the tensor after it (residual entries pass through).
  std::vector<Shape> in_shape;
  std::vector<Shape> out_shape;

  // Indices of layers that carry weights (conv, linear, projection residual),
  // in layer order. Mask layout and graph partitions follow this order.
  std::vector<u32> weighted;
};

// Parses + validates. Shape-composition violations report the layer index.
ArchitectureSpec load_architecture(const std::string& json_text);
ArchitectureSpec load_architecture_file(const std::string& path);
std::string architecture_to_json(const ArchitectureSpec& spec);

// Re-runs composition on a hand-built spec (mutates derived fields).
void validate_architecture(ArchitectureSpec& spec);

u64 layer_param_count(const LayerSpec& layer);
u64 total_param_count(const ArchitectureSpec& spec);

// Weight tensor dims, mask-layout order: conv (c_out, c_in, kh, kw),
// linear (n_in, n_out), projection (c_out, c_in, 1, 1).
std::vector<u64> layer_weight_dims(const LayerSpec& layer);

// Derived projection stride (input-to-output spatial ratio); 1 for identity.
u32 residual_stride(const ArchitectureSpec& spec, u32 layer_index);

// Names: conv6, resnet20, resnet32, wide-resnet-28-2.
ArchitectureSpec builtin_architecture(const std::string& name, u32 input_h, u32 input_w,
                                      u32 num_classes);
std::vector<std::string> builtin_architecture_names();

// Shapes, per-layer parameter counts, totals; for human/CLI consumption.
std::string architecture_info_json(const ArchitectureSpec& spec);

}  // namespace snntopo
