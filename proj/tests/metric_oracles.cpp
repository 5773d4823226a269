#include "metric_oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace oracle {

SimpleGraph extract(const MultipartiteGraph& g) {
  SimpleGraph s;
  s.n = g.n_nodes;
  s.adj.resize(s.n);
  s.adj_w.resize(s.n);
  s.partition.resize(s.n);
  s.n_partitions = static_cast<u32>(g.partitions.size());
  for (u32 p = 0; p < s.n_partitions; ++p) {
    const auto& part = g.partitions[p];
    for (u32 i = 0; i < part.total(); ++i) s.partition[part.offset + i] = p;
  }
  for (u64 u = 0; u < g.n_nodes; ++u) {
    for (u64 e = g.fwd_ptr[u]; e < g.fwd_ptr[u + 1]; ++e) {
      u32 v = g.fwd_dst[e];
      s.dir_edges.emplace_back(static_cast<u32>(u), v);
      double w = g.weighted ? g.fwd_w[e] : 1.0;
      if (g.weighted) s.dir_w.push_back(w);
      if (static_cast<u32>(u) != v) {
        s.adj[u].insert(v);
        s.adj[v].insert(static_cast<u32>(u));
        s.adj_w[u][v] += std::abs(w);
        s.adj_w[v][static_cast<u32>(u)] += std::abs(w);
      }
    }
  }
  return s;
}

u64 count_components(const SimpleGraph& s, const std::set<u32>& removed_nodes,
                     const std::set<std::pair<u32, u32>>& removed_edges) {
  std::vector<int> seen(s.n, 0);
  u64 comps = 0;
  auto edge_removed = [&](u32 a, u32 b) {
    return removed_edges.count({std::min(a, b), std::max(a, b)}) > 0;
  };
  for (u32 start = 0; start < s.n; ++start) {
    if (seen[start] || removed_nodes.count(start)) continue;
    ++comps;
    std::vector<u32> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      u32 v = stack.back();
      stack.pop_back();
      for (u32 w : s.adj[v]) {
        if (seen[w] || removed_nodes.count(w) || edge_removed(v, w)) continue;
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return comps;
}

u64 bridges_by_removal(const SimpleGraph& s) {
  u64 base = count_components(s, {}, {});
  u64 bridges = 0;
  for (u32 a = 0; a < s.n; ++a) {
    for (u32 b : s.adj[a]) {
      if (b < a) continue;
      if (count_components(s, {}, {{a, b}}) > base) ++bridges;
    }
  }
  return bridges;
}

u64 articulation_by_removal(const SimpleGraph& s) {
  u64 base = count_components(s, {}, {});
  u64 cuts = 0;
  for (u32 v = 0; v < s.n; ++v) {
    if (count_components(s, {v}, {}) > base) ++cuts;
  }
  return cuts;
}

std::vector<u32> core_numbers_peel(const SimpleGraph& s) {
  std::vector<u32> core(s.n, 0);
  for (u32 k = 1;; ++k) {
    // peel everything of degree < k; whoever survives has core >= k
    std::set<u32> alive;
    for (u32 v = 0; v < s.n; ++v) alive.insert(v);
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto it = alive.begin(); it != alive.end();) {
        u32 v = *it;
        u32 deg = 0;
        for (u32 w : s.adj[v])
          if (alive.count(w)) ++deg;
        if (deg < k) {
          it = alive.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    if (alive.empty()) break;
    for (u32 v : alive) core[v] = k;
  }
  return core;
}

u64 motif_census_growth(const SimpleGraph& s, u32 m) {
  std::set<std::vector<u32>> found;   // size-m, sorted
  std::set<std::vector<u32>> seen_partial;
  std::vector<u32> cur;
  // grow connected sets one neighbor at a time, deduplicating at every size
  std::function<void(std::vector<u32>&)> grow = [&](std::vector<u32>& set) {
    if (set.size() == m) {
      found.insert(set);
      return;
    }
    if (!seen_partial.insert(set).second) return;
    std::set<u32> boundary;
    for (u32 v : set)
      for (u32 w : s.adj[v])
        if (!std::binary_search(set.begin(), set.end(), w)) boundary.insert(w);
    for (u32 w : boundary) {
      std::vector<u32> next = set;
      next.insert(std::lower_bound(next.begin(), next.end(), w), w);
      grow(next);
    }
  };
  for (u32 v = 0; v < s.n; ++v) {
    std::vector<u32> set{v};
    grow(set);
  }
  return found.size();
}

u64 motif_census_subsets(const SimpleGraph& s, u32 m) {
  std::vector<u32> pick(m);
  u64 count = 0;
  std::function<void(u32, u32)> rec = [&](u32 depth, u32 start) {
    if (depth == m) {
      // connectivity of the induced subgraph by BFS over pick
      std::set<u32> in(pick.begin(), pick.end());
      std::set<u32> seen{pick[0]};
      std::vector<u32> stack{pick[0]};
      while (!stack.empty()) {
        u32 v = stack.back();
        stack.pop_back();
        for (u32 w : s.adj[v]) {
          if (in.count(w) && !seen.count(w)) {
            seen.insert(w);
            stack.push_back(w);
          }
        }
      }
      if (seen.size() == m) ++count;
      return;
    }
    for (u32 v = start; v < s.n; ++v) {
      pick[depth] = v;
      rec(depth + 1, v + 1);
    }
  };
  if (s.n >= m) rec(0, 0);
  return count;
}

void dense_spectral(const SimpleGraph& s, double& gap, double& radius) {
  const u32 n = static_cast<u32>(s.n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (u32 v = 0; v < n; ++v)
    for (auto& [w, wt] : s.adj_w[v]) A(v, w) = wt;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  double mu0 = es.eigenvalues()(n - 1);
  double scale = std::max(1.0, std::abs(mu0));
  gap = 0.0;
  for (u32 i = n; i-- > 0;) {
    if (mu0 - es.eigenvalues()(i) > 1e-9 * scale) {
      gap = mu0 - es.eigenvalues()(i);
      break;
    }
  }
  Eigen::VectorXd deg = A.rowwise().sum();
  Eigen::MatrixXd L = Eigen::MatrixXd(deg.asDiagonal()) - A;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> el(L);
  radius = el.eigenvalues()(n - 1);
}

MetricRef all_metrics(const SimpleGraph& s, u32 motif_size) {
  MetricRef r;
  const u64 ne = s.dir_edges.size();
  std::vector<u64> indeg(s.n, 0), outdeg(s.n, 0);
  for (auto& [a, b] : s.dir_edges) {
    ++outdeg[a];
    ++indeg[b];
  }
  u64 r_out_sum = 0, r_in_sum = 0;
  for (u32 v = 0; v < s.n; ++v) {
    bool first = s.partition[v] == 0;
    bool last = s.partition[v] + 1 == s.n_partitions;
    if (outdeg[v] == 0 && !last) {
      r.sink += 1;
      r_in_sum += indeg[v];
    }
    if (indeg[v] == 0 && !first) {
      r.source += 1;
      r_out_sum += outdeg[v];
    }
    if (indeg[v] + outdeg[v] == 0) r.disconnected += 1;
  }
  r.r_out = ne > 0 ? static_cast<double>(r_out_sum) / ne : 0.0;
  r.r_in = ne > 0 ? static_cast<double>(r_in_sum) / ne : 0.0;

  // k-hop reach by set expansion on the directed edge list
  u64 s1 = 0, s2 = 0;
  for (u32 v = 0; v < s.n; ++v) {
    std::set<u32> hop1;
    for (auto& [a, b] : s.dir_edges)
      if (a == v && b != v) hop1.insert(b);
    std::set<u32> hop2 = hop1;
    for (u32 u : hop1)
      for (auto& [a, b] : s.dir_edges)
        if (a == u && b != v) hop2.insert(b);
    s1 += hop1.size();
    s2 += hop2.size();
  }
  r.n1 = static_cast<double>(s1) / s.n;
  r.n2 = static_cast<double>(s2) / s.n;

  r.motif = static_cast<double>(motif_census_growth(s, motif_size));

  auto cores = core_numbers_peel(s);
  u64 csum = 0;
  for (u32 c : cores) csum += c;
  r.kcore = static_cast<double>(csum) / s.n;

  double st = 0.0;
  for (u64 e = 0; e < s.dir_edges.size(); ++e)
    st += s.dir_w.empty() ? 1.0 : std::abs(s.dir_w[e]);
  r.strength = st / s.n;

  r.components = static_cast<double>(count_components(s, {}, {}));
  r.c_avg = r.components > 0 ? static_cast<double>(s.n) / r.components : 0.0;
  r.cut_edges = static_cast<double>(bridges_by_removal(s));
  r.cut_nodes = static_cast<double>(articulation_by_removal(s));
  dense_spectral(s, r.spectral_gap, r.spectral_radius);
  return r;
}

}  // namespace oracle
