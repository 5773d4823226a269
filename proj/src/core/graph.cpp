#include "graph.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <numeric>

#include "binio.hpp"

namespace snntopo {

u32 MultipartiteGraph::partition_of(u32 node) const {
  require(node < n_nodes, errc::invalid_argument, "node id out of range");
  u32 lo = 0, hi = static_cast<u32>(partitions.size());
  while (hi - lo > 1) {
    u32 mid = lo + (hi - lo) / 2;
    if (partitions[mid].offset <= node) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

bool MultipartiteGraph::is_padding(u32 node) const {
  const Partition& p = partitions[partition_of(node)];
  return node - p.offset >= p.core;
}

u64 MultipartiteGraph::core_nodes() const {
  u64 n = 0;
  for (const auto& p : partitions) n += p.core;
  return n;
}

u32 GraphBuilder::add_partition(u32 core, u32 pad) {
  require(!finished_, errc::state_error, "builder already finished");
  Partition p;
  p.offset = g_.partitions.empty() ? 0
                                   : g_.partitions.back().offset + g_.partitions.back().total();
  p.core = core;
  p.pad = pad;
  require(p.offset + p.total() <= 0xffffffffull, errc::unsupported,
          "graph exceeds 32-bit node id space");
  g_.partitions.push_back(p);
  return static_cast<u32>(g_.partitions.size() - 1);
}

void GraphBuilder::set_partition_pad(u32 partition, u32 pad) {
  require(partition + 1 == g_.partitions.size(), errc::state_error,
          "padding can only be widened on the trailing partition");
  g_.partitions[partition].pad = pad;
  require(g_.partitions[partition].offset + g_.partitions[partition].total() <= 0xffffffffull,
          errc::unsupported, "graph exceeds 32-bit node id space");
}

void GraphBuilder::add_layer_edges(u32 left, u32 right, const BipartiteGraph& bg) {
  require(right == left + 1 && right < g_.partitions.size(), errc::invalid_argument,
          "layer edges must join consecutive partitions");
  const Partition& pl = g_.partitions[left];
  const Partition& pr = g_.partitions[right];
  require(bg.n_left == pl.total() && bg.left_core == pl.core, errc::shape_mismatch,
          "left span does not match partition");
  require(bg.n_right == pr.core, errc::shape_mismatch, "right span does not match partition");
  require(bg.weighted == g_.weighted, errc::state_error, "weighted flag mismatch");
  u32 lo = static_cast<u32>(pl.offset), ro = static_cast<u32>(pr.offset);
  for (u64 e = 0; e < bg.n_edges(); ++e) {
    e_src_.push_back(lo + bg.src[e]);
    e_dst_.push_back(ro + bg.dst[e]);
  }
  if (g_.weighted) e_w_.insert(e_w_.end(), bg.w.begin(), bg.w.end());
}

void GraphBuilder::add_residual_edges(u32 from, u32 to, const BipartiteGraph& bg) {
  require(to == from + 2 && to < g_.partitions.size(), errc::invalid_argument,
          "residual edges must skip exactly one partition");
  const Partition& pf = g_.partitions[from];
  const Partition& pt = g_.partitions[to];
  require(bg.n_left == pf.core && bg.n_right == pt.core, errc::shape_mismatch,
          "residual span must cover the core nodes of its partitions");
  require(bg.weighted == g_.weighted, errc::state_error, "weighted flag mismatch");
  u32 fo = static_cast<u32>(pf.offset), to_off = static_cast<u32>(pt.offset);
  for (u64 e = 0; e < bg.n_edges(); ++e) {
    e_src_.push_back(fo + bg.src[e]);
    e_dst_.push_back(to_off + bg.dst[e]);
  }
  if (g_.weighted) e_w_.insert(e_w_.end(), bg.w.begin(), bg.w.end());
  g_.residual_groups.push_back(ResidualGroup{from, to, bg.n_edges()});
}

namespace {

void build_csr(u64 n_nodes, const std::vector<u32>& keys, const std::vector<u32>& values,
               const std::vector<double>& weights, std::vector<u64>& ptr, std::vector<u32>& out,
               std::vector<double>& out_w) {
  ptr.assign(n_nodes + 1, 0);
  for (u32 k : keys) ++ptr[k + 1];
  for (u64 i = 0; i < n_nodes; ++i) ptr[i + 1] += ptr[i];
  out.resize(keys.size());
  out_w.resize(weights.empty() ? 0 : keys.size());
  std::vector<u64> cursor(ptr.begin(), ptr.end() - 1);
  for (u64 e = 0; e < keys.size(); ++e) {
    u64 slot = cursor[keys[e]]++;
    out[slot] = values[e];
    if (!weights.empty()) out_w[slot] = weights[e];
  }
}

// rev order must not depend on edge staging order, or a save/load cycle
// would change it; always derive rev from the forward CSR
void build_reverse(MultipartiteGraph& g) {
  std::vector<u32> src(g.n_edges), dst(g.n_edges);
  std::vector<double> wts(g.weighted ? g.n_edges : 0);
  u64 e = 0;
  for (u64 u = 0; u < g.n_nodes; ++u) {
    for (u64 k = g.fwd_ptr[u]; k < g.fwd_ptr[u + 1]; ++k, ++e) {
      src[e] = static_cast<u32>(u);
      dst[e] = g.fwd_dst[k];
      if (g.weighted) wts[e] = g.fwd_w[k];
    }
  }
  build_csr(g.n_nodes, dst, src, wts, g.rev_ptr, g.rev_src, g.rev_w);
}

}  // namespace

MultipartiteGraph GraphBuilder::finish() {
  require(!finished_, errc::state_error, "builder already finished");
  finished_ = true;
  require(!g_.partitions.empty(), errc::invalid_argument, "graph has no partitions");
  g_.n_nodes = g_.partitions.back().offset + g_.partitions.back().total();
  g_.n_edges = e_src_.size();
  for (u64 e = 0; e < g_.n_edges; ++e) {
    require(e_src_[e] < g_.n_nodes && e_dst_[e] < g_.n_nodes, errc::invalid_argument,
            "edge endpoint out of range");
  }
  build_csr(g_.n_nodes, e_src_, e_dst_, e_w_, g_.fwd_ptr, g_.fwd_dst, g_.fwd_w);
  build_reverse(g_);
  e_src_.clear();
  e_src_.shrink_to_fit();
  e_dst_.clear();
  e_dst_.shrink_to_fit();
  e_w_.clear();
  e_w_.shrink_to_fit();
  return std::move(g_);
}

UndirectedView build_undirected(const MultipartiteGraph& g, bool with_weights) {
  with_weights = with_weights && g.weighted;
  UndirectedView v;
  v.n = g.n_nodes;
  std::vector<u64> deg(g.n_nodes, 0);
  for (u64 u = 0; u < g.n_nodes; ++u) {
    deg[u] += g.fwd_ptr[u + 1] - g.fwd_ptr[u];
    deg[u] += g.rev_ptr[u + 1] - g.rev_ptr[u];
  }
  v.ptr.assign(g.n_nodes + 1, 0);
  for (u64 i = 0; i < g.n_nodes; ++i) v.ptr[i + 1] = v.ptr[i] + deg[i];
  v.adj.resize(v.ptr.back());
  if (with_weights) v.w.resize(v.ptr.back());
  std::vector<u64> cursor(v.ptr.begin(), v.ptr.end() - 1);
  for (u64 u = 0; u < g.n_nodes; ++u) {
    for (u64 e = g.fwd_ptr[u]; e < g.fwd_ptr[u + 1]; ++e) {
      u64 slot = cursor[u]++;
      v.adj[slot] = g.fwd_dst[e];
      if (with_weights) v.w[slot] = std::abs(g.fwd_w[e]);
    }
    for (u64 e = g.rev_ptr[u]; e < g.rev_ptr[u + 1]; ++e) {
      u64 slot = cursor[u]++;
      v.adj[slot] = g.rev_src[e];
      if (with_weights) v.w[slot] = std::abs(g.rev_w[e]);
    }
  }
  // merge parallel edges per node; weights accumulate
  std::vector<u64> new_ptr(g.n_nodes + 1, 0);
  u64 write = 0;
  for (u64 u = 0; u < g.n_nodes; ++u) {
    u64 lo = v.ptr[u], hi = v.ptr[u + 1];
    if (with_weights) {
      std::vector<std::pair<u32, double>> tmp;
      tmp.reserve(hi - lo);
      for (u64 e = lo; e < hi; ++e) tmp.emplace_back(v.adj[e], v.w[e]);
      std::sort(tmp.begin(), tmp.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (u64 i = 0; i < tmp.size(); ++i) {
        if (i > 0 && tmp[i].first == v.adj[write - 1]) {
          v.w[write - 1] += tmp[i].second;
        } else {
          v.adj[write] = tmp[i].first;
          v.w[write] = tmp[i].second;
          ++write;
        }
      }
    } else {
      std::sort(v.adj.begin() + lo, v.adj.begin() + hi);
      for (u64 e = lo; e < hi; ++e) {
        if (e > lo && v.adj[e] == v.adj[e - 1]) continue;
        v.adj[write++] = v.adj[e];
      }
    }
    new_ptr[u + 1] = write;
  }
  v.adj.resize(write);
  if (with_weights) v.w.resize(write);
  v.ptr = std::move(new_ptr);
  return v;
}

MultipartiteGraph core_view(const MultipartiteGraph& g) {
  MultipartiteGraph out;
  out.weighted = g.weighted;
  out.residual_groups = g.residual_groups;  // residual edges touch core nodes only
  std::vector<u32> remap(g.n_nodes, 0xffffffffu);
  u64 off = 0;
  for (const auto& p : g.partitions) {
    Partition np;
    np.offset = off;
    np.core = p.core;
    np.pad = 0;
    for (u32 i = 0; i < p.core; ++i) remap[p.offset + i] = static_cast<u32>(off + i);
    off += p.core;
    out.partitions.push_back(np);
  }
  out.n_nodes = off;
  std::vector<u32> src, dst;
  std::vector<double> wts;
  for (u64 u = 0; u < g.n_nodes; ++u) {
    if (remap[u] == 0xffffffffu) continue;
    for (u64 e = g.fwd_ptr[u]; e < g.fwd_ptr[u + 1]; ++e) {
      u32 v = g.fwd_dst[e];
      if (remap[v] == 0xffffffffu) continue;
      src.push_back(remap[u]);
      dst.push_back(remap[v]);
      if (g.weighted) wts.push_back(g.fwd_w[e]);
    }
  }
  out.n_edges = src.size();
  build_csr(out.n_nodes, src, dst, wts, out.fwd_ptr, out.fwd_dst, out.fwd_w);
  build_reverse(out);
  return out;
}

MultipartiteGraph to_multipartite(const BipartiteGraph& bg) {
  GraphBuilder b(bg.weighted);
  u32 p0 = b.add_partition(bg.left_core, bg.n_left - bg.left_core);
  u32 p1 = b.add_partition(bg.n_right, 0);
  b.add_layer_edges(p0, p1, bg);
  return b.finish();
}

// --- serialization ---

static constexpr char kCsrMagic[8] = {'S', 'N', 'N', 'C', 'S', 'R', '0', '1'};

static void save_edgelist(const MultipartiteGraph& g, const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "wb");
  require(f != nullptr, errc::io_error, "cannot open " + path + " for writing");
  std::fprintf(f, "snngraph 1\n");
  std::fprintf(f, "weighted %d\n", g.weighted ? 1 : 0);
  std::fprintf(f, "partitions %zu\n", g.partitions.size());
  for (const auto& p : g.partitions) std::fprintf(f, "partition %u %u\n", p.core, p.pad);
  std::fprintf(f, "residuals %zu\n", g.residual_groups.size());
  for (const auto& r : g.residual_groups) {
    std::fprintf(f, "residual %u %u %" PRIu64 "\n", r.from_partition, r.to_partition, r.edges);
  }
  std::fprintf(f, "edges %" PRIu64 "\n", g.n_edges);
  for (u64 u = 0; u < g.n_nodes; ++u) {
    for (u64 e = g.fwd_ptr[u]; e < g.fwd_ptr[u + 1]; ++e) {
      if (g.weighted) {
        std::fprintf(f, "%" PRIu64 " %u %.17g\n", u, g.fwd_dst[e], g.fwd_w[e]);
      } else {
        std::fprintf(f, "%" PRIu64 " %u\n", u, g.fwd_dst[e]);
      }
    }
  }
  bool ok = std::fflush(f) == 0 && std::ferror(f) == 0;
  std::fclose(f);
  require(ok, errc::io_error, "write failed for " + path);
}

static void save_csr(const MultipartiteGraph& g, const std::string& path) {
  BinWriter w(path);
  w.bytes(kCsrMagic, 8);
  w.u32v(1);
  w.u8(g.weighted ? 1 : 0);
  w.u32v(static_cast<u32>(g.partitions.size()));
  for (const auto& p : g.partitions) {
    w.u32v(p.core);
    w.u32v(p.pad);
  }
  w.u32v(static_cast<u32>(g.residual_groups.size()));
  for (const auto& r : g.residual_groups) {
    w.u32v(r.from_partition);
    w.u32v(r.to_partition);
    w.u64v(r.edges);
  }
  w.u64v(g.n_edges);
  for (u64 i = 0; i <= g.n_nodes; ++i) w.u64v(g.fwd_ptr[i]);
  for (u64 e = 0; e < g.n_edges; ++e) w.u32v(g.fwd_dst[e]);
  if (g.weighted) {
    for (u64 e = 0; e < g.n_edges; ++e) w.f64(g.fwd_w[e]);
  }
  w.close();
}

void save_graph(const MultipartiteGraph& g, const std::string& path, const std::string& format) {
  if (format == "edgelist") {
    save_edgelist(g, path);
  } else if (format == "csr") {
    save_csr(g, path);
  } else {
    fail(errc::invalid_argument, "unknown graph format '" + format + "'");
  }
}

namespace {

void finalize_partitions(MultipartiteGraph& g) {
  u64 off = 0;
  for (auto& p : g.partitions) {
    p.offset = off;
    off += p.total();
  }
  g.n_nodes = off;
  require(off <= 0xffffffffull, errc::unsupported, "graph exceeds 32-bit node id space");
}

MultipartiteGraph load_csr(const std::string& path) {
  BinReader r(path);
  char magic[8];
  r.bytes(magic, 8);
  require(std::memcmp(magic, kCsrMagic, 8) == 0, errc::parse_error, path + ": bad magic");
  require(r.read_u32() == 1, errc::parse_error, path + ": unsupported version");
  MultipartiteGraph g;
  g.weighted = r.read_u8() != 0;
  u32 nparts = r.read_u32();
  require(nparts >= 1 && nparts <= 1u << 20, errc::parse_error, path + ": implausible partitions");
  for (u32 i = 0; i < nparts; ++i) {
    Partition p;
    p.core = r.read_u32();
    p.pad = r.read_u32();
    g.partitions.push_back(p);
  }
  u32 nres = r.read_u32();
  for (u32 i = 0; i < nres; ++i) {
    ResidualGroup rg;
    rg.from_partition = r.read_u32();
    rg.to_partition = r.read_u32();
    rg.edges = r.read_u64();
    g.residual_groups.push_back(rg);
  }
  finalize_partitions(g);
  g.n_edges = r.read_u64();
  g.fwd_ptr = r.read_u64s(g.n_nodes + 1);
  require(g.fwd_ptr.front() == 0 && g.fwd_ptr.back() == g.n_edges, errc::parse_error,
          path + ": corrupt CSR offsets");
  g.fwd_dst.resize(g.n_edges);
  for (u64 e = 0; e < g.n_edges; ++e) {
    g.fwd_dst[e] = r.read_u32();
    require(g.fwd_dst[e] < g.n_nodes, errc::parse_error, path + ": edge target out of range");
  }
  if (g.weighted) g.fwd_w = r.read_f64s(g.n_edges);
  return g;
}

MultipartiteGraph load_edgelist(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  require(f != nullptr, errc::io_error, "cannot open " + path);
  MultipartiteGraph g;
  std::vector<u32> src, dst;
  std::vector<double> wts;
  char word[32];
  int version = 0;
  bool ok = std::fscanf(f, "%31s %d", word, &version) == 2 &&
            std::strcmp(word, "snngraph") == 0 && version == 1;
  int weighted_flag = 0;
  size_t nparts = 0, nres = 0;
  u64 nedges = 0;
  ok = ok && std::fscanf(f, "%31s %d", word, &weighted_flag) == 2 &&
       std::strcmp(word, "weighted") == 0;
  ok = ok && std::fscanf(f, "%31s %zu", word, &nparts) == 2 &&
       std::strcmp(word, "partitions") == 0;
  if (ok) {
    for (size_t i = 0; i < nparts && ok; ++i) {
      Partition p;
      ok = std::fscanf(f, "%31s %u %u", word, &p.core, &p.pad) == 3 &&
           std::strcmp(word, "partition") == 0;
      g.partitions.push_back(p);
    }
  }
  ok = ok && std::fscanf(f, "%31s %zu", word, &nres) == 2 && std::strcmp(word, "residuals") == 0;
  for (size_t i = 0; i < nres && ok; ++i) {
    ResidualGroup rg;
    ok = std::fscanf(f, "%31s %u %u %" SCNu64, word, &rg.from_partition, &rg.to_partition,
                     &rg.edges) == 4 &&
         std::strcmp(word, "residual") == 0;
    g.residual_groups.push_back(rg);
  }
  ok = ok && std::fscanf(f, "%31s %" SCNu64, word, &nedges) == 2 &&
       std::strcmp(word, "edges") == 0;
  if (ok) {
    g.weighted = weighted_flag != 0;
    src.reserve(nedges);
    dst.reserve(nedges);
    if (g.weighted) wts.reserve(nedges);
    for (u64 e = 0; e < nedges && ok; ++e) {
      u32 a, b;
      if (g.weighted) {
        double wv;
        ok = std::fscanf(f, "%u %u %lf", &a, &b, &wv) == 3;
        wts.push_back(wv);
      } else {
        ok = std::fscanf(f, "%u %u", &a, &b) == 2;
      }
      src.push_back(a);
      dst.push_back(b);
    }
  }
  std::fclose(f);
  require(ok, errc::parse_error, path + ": malformed edge list");
  finalize_partitions(g);
  g.n_edges = src.size();
  for (u64 e = 0; e < g.n_edges; ++e) {
    require(src[e] < g.n_nodes && dst[e] < g.n_nodes, errc::parse_error,
            path + ": edge endpoint out of range");
  }
  build_csr(g.n_nodes, src, dst, wts, g.fwd_ptr, g.fwd_dst, g.fwd_w);
  build_csr(g.n_nodes, dst, src, wts, g.rev_ptr, g.rev_src, g.rev_w);
  return g;
}

}  // namespace

MultipartiteGraph load_graph(const std::string& path) {
  char magic[8] = {0};
  {
    std::ifstream probe(path, std::ios::binary);
    require(probe.good(), errc::io_error, "cannot open " + path);
    probe.read(magic, 8);
  }
  if (std::memcmp(magic, kCsrMagic, 8) == 0) {
    MultipartiteGraph g = load_csr(path);
    build_reverse(g);  // reverse CSR is not stored
    return g;
  }
  return load_edgelist(path);
}

}  // namespace snntopo
