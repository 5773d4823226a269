#pragma once
// Mask -> graph encodings. Unrolled graphs have one node per feature-map
// element (channel-first layout, core nodes before padding nodes); rolled
// variants collapse spatial structure. build_mge chains per-layer graphs,
// splicing pooling bridges and residual shortcut groups.

#include "archspec.hpp"
#include "graph.hpp"
#include "mask.hpp"

namespace snntopo {

enum class Encoding { Unrolled, Rolled, RolledChannel };

Encoding encoding_from_name(const std::string& name);

// One edge per (output position, output channel, surviving kernel cell).
// Left ids: core nodes first (ci*h*w + y*w + x), padding border after.
BipartiteGraph encode_conv(const Shape& in_raw, const LayerSpec& layer, const MaskLayer& mask,
                           bool weighted);

// Left a = f / n_out, right b = f % n_out for surviving flat index f.
BipartiteGraph encode_linear(const LayerSpec& layer, const MaskLayer& mask, bool weighted);

// Kernel-position nodes: |L| = c_in*kh*kw, |R| = c_out, one edge per
// surviving weight. Linear layers fall back to encode_linear.
BipartiteGraph encode_rolled(const LayerSpec& layer, const MaskLayer& mask, bool weighted);

// Channel nodes: |L| = c_in, |R| = c_out, edge iff the (co, ci) kernel slice
// keeps any weight. Weighted edges carry the sum of |w| over the slice.
// Linear layers fall back to encode_linear.
BipartiteGraph encode_rolled_channel(const LayerSpec& layer, const MaskLayer& mask, bool weighted);

// Rewires a layer graph whose input was pooled: every edge leaving a pooled
// node is replicated once per pre-pool node in that pooling window; edges
// leaving padding nodes pass through untouched.
BipartiteGraph pooling_bridge(const BipartiteGraph& next, const LayerSpec& pool,
                              const Shape& pre_pool);

// Shortcut edge groups. Identity: one edge per feature-map element (unit
// weight). Projection: 1x1 conv with the given spatial stride.
BipartiteGraph residual_identity(const Shape& shape, bool weighted);
BipartiteGraph residual_projection(const Shape& src, const Shape& dst, u32 stride,
                                   const MaskLayer& mask, bool weighted);

// Single weighted layer as a standalone two-partition graph.
// `weighted_pos` indexes the mask layout (ArchitectureSpec::weighted order).
MultipartiteGraph encode_layer_graph(const ArchitectureSpec& spec, const SparseMask& mask,
                                     size_t weighted_pos, Encoding encoding, bool weighted);

// Whole-network unrolled graph: N weighted layers -> N+1 partitions.
MultipartiteGraph build_mge(const ArchitectureSpec& spec, const SparseMask& mask, bool weighted);

}  // namespace snntopo
