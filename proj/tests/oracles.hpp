#pragma once
// Brute-force reference implementations for tests. These deliberately follow
// different code paths than src/: direct simulation, exhaustive enumeration,
// and dense linear algebra, so agreement is meaningful.

#include <set>
#include <vector>

#include "core/archspec.hpp"
#include "core/graph.hpp"
#include "core/mask.hpp"

namespace oracle {

using snntopo::ArchitectureSpec;
using snntopo::LayerSpec;
using snntopo::MaskLayer;
using snntopo::MultipartiteGraph;
using snntopo::Shape;
using snntopo::u32;
using snntopo::u64;

// Simulates every convolution step on the padded grid and records one
// (input element, output element) pair per surviving kernel cell. Node ids
// follow the documented core-first channel-major layout, built here by
// scanning the grid rather than by index arithmetic.
std::vector<std::pair<u32, u32>> conv_edges(const Shape& in_raw, const LayerSpec& layer,
                                            const std::set<u64>& surviving);

// Expected sizes by direct formula.
u64 conv_left_size(const Shape& in_raw, const LayerSpec& layer);
u64 conv_right_size(const Shape& in_raw, const LayerSpec& layer);

// Pooling window membership: for each pooled node, the pre-pool node ids in
// its window (computed by scanning the pre-pool grid for matching windows).
std::vector<std::vector<u32>> pool_windows(const Shape& pre_pool, const LayerSpec& pool);

// Flat sorted edge list (with global ids) pulled out of a built graph.
std::vector<std::pair<u32, u32>> graph_edges(const MultipartiteGraph& g);

}  // namespace oracle
