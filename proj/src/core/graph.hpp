#pragma once
// Graph containers for unrolled network encodings. A BipartiteGraph is one
// layer's edge set; a MultipartiteGraph chains layer graphs into partitions
// with CSR storage both ways. Node ids are partition-local core nodes first,
// padding nodes after, so partition alignment is exact on core counts.

#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace snntopo {

struct BipartiteGraph {
  u32 n_left = 0, n_right = 0;
  u32 left_core = 0;  // left ids >= left_core are padding nodes
  bool weighted = false;
  std::vector<u32> src, dst;   // parallel arrays, one entry per edge
  std::vector<double> w;       // empty unless weighted

  u64 n_edges() const { return src.size(); }
  void add_edge(u32 a, u32 b) {
    src.push_back(a);
    dst.push_back(b);
  }
  void add_edge(u32 a, u32 b, double weight) {
    add_edge(a, b);
    w.push_back(weight);
  }
};

struct Partition {
  u64 offset = 0;
  u32 core = 0;
  u32 pad = 0;
  u32 total() const { return core + pad; }
};

struct ResidualGroup {
  u32 from_partition = 0;
  u32 to_partition = 0;
  u64 edges = 0;
};

struct MultipartiteGraph {
  std::vector<Partition> partitions;
  std::vector<ResidualGroup> residual_groups;
  bool weighted = false;
  u64 n_nodes = 0;
  u64 n_edges = 0;

  // forward: out-edges by source; reverse: in-edges by destination
  std::vector<u64> fwd_ptr;
  std::vector<u32> fwd_dst;
  std::vector<double> fwd_w;
  std::vector<u64> rev_ptr;
  std::vector<u32> rev_src;
  std::vector<double> rev_w;

  u32 partition_of(u32 node) const;
  bool is_padding(u32 node) const;
  u64 core_nodes() const;
};

// Assembles CSR from staged edges. Edges must respect partition structure:
// consecutive partitions, or a declared residual pair two partitions apart.
class GraphBuilder {
public:
  explicit GraphBuilder(bool weighted) { g_.weighted = weighted; }

  // Returns the partition index. Padding can be widened later (next layer's
  // geometry determines it) as long as no edges touch the partition yet.
  u32 add_partition(u32 core, u32 pad = 0);
  void set_partition_pad(u32 partition, u32 pad);

  // Attaches one layer graph between two existing adjacent partitions. Left
  // span (core+pad) must equal the bipartite left size; same on the right.
  void add_layer_edges(u32 left_partition, u32 right_partition, const BipartiteGraph& bg);

  // Residual shortcut edges, local core ids on both sides.
  void add_residual_edges(u32 from_partition, u32 to_partition, const BipartiteGraph& bg);

  MultipartiteGraph finish();

private:
  MultipartiteGraph g_;
  std::vector<u32> e_src_, e_dst_;
  std::vector<double> e_w_;
  bool finished_ = false;
};

// Undirected simple view: parallel edges merged (weights summed as |w|),
// used by the metrics that are defined on simple graphs.
struct UndirectedView {
  u64 n = 0;
  std::vector<u64> ptr;
  std::vector<u32> adj;
  std::vector<double> w;  // |w|, merged; empty when built unweighted

  u64 degree(u32 v) const { return ptr[v + 1] - ptr[v]; }
  u64 n_simple_edges() const { return adj.size() / 2; }
};

UndirectedView build_undirected(const MultipartiteGraph& g, bool with_weights);

// Induced subgraph on core nodes: drops padding nodes and their edges.
MultipartiteGraph core_view(const MultipartiteGraph& g);

// Wraps a single layer graph as a two-partition multipartite graph.
MultipartiteGraph to_multipartite(const BipartiteGraph& bg);

// --- serialization ---
// Text edge list with a partition header, and a binary CSR container.
// Format is chosen by `format` on save ("edgelist" | "csr") and sniffed on load.
void save_graph(const MultipartiteGraph& g, const std::string& path, const std::string& format);
MultipartiteGraph load_graph(const std::string& path);

}  // namespace snntopo
