#include "topometrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "json.hpp"
#include "parallel.hpp"
#include "spectral.hpp"

namespace snntopo {

namespace {

bool want(u32 groups, MetricGroup g) { return (groups & static_cast<u32>(g)) != 0; }

void local_metrics(const MultipartiteGraph& g, TopometricVector& out) {
  const u32 last = static_cast<u32>(g.partitions.size() - 1);
  u64 sink = 0, source = 0, disc = 0, r_out_sum = 0, r_in_sum = 0;
  for (u64 u = 0; u < g.n_nodes; ++u) {
    u64 od = g.fwd_ptr[u + 1] - g.fwd_ptr[u];
    u64 id = g.rev_ptr[u + 1] - g.rev_ptr[u];
    u32 p = g.partition_of(static_cast<u32>(u));
    if (od == 0 && p != last) {
      ++sink;
      r_in_sum += id;
    }
    if (id == 0 && p != 0) {
      ++source;
      r_out_sum += od;
    }
    if (od + id == 0) ++disc;
  }
  double nv = static_cast<double>(g.n_nodes);
  double ne = static_cast<double>(g.n_edges);
  out.sink = {sink / nv, static_cast<double>(sink)};
  out.source = {source / nv, static_cast<double>(source)};
  out.disconnected = {disc / nv, static_cast<double>(disc)};
  out.r_out = {ne > 0 ? r_out_sum / ne : 0.0, static_cast<double>(r_out_sum)};
  out.r_in = {ne > 0 ? r_in_sum / ne : 0.0, static_cast<double>(r_in_sum)};
}

// distinct nodes reachable in one / two forward hops, averaged over all nodes
void khop_metrics(const MultipartiteGraph& g, u32 workers, TopometricVector& out) {
  const u64 n = g.n_nodes;
  const u64 chunk = 2048;
  const u64 n_chunks = (n + chunk - 1) / chunk;
  std::vector<u64> part1(n_chunks, 0), part2(n_chunks, 0);
  parallel_for(n_chunks, workers, [&](u64 c) {
    thread_local std::vector<u32> stamp;
    thread_local u32 tick = 0;
    if (stamp.size() < n) stamp.assign(n, 0);
    u64 s1 = 0, s2 = 0;
    const u64 lo = c * chunk, hi = std::min(n, lo + chunk);
    for (u64 u = lo; u < hi; ++u) {
      ++tick;
      if (tick == 0) {  // wrapped: reset stamps
        std::fill(stamp.begin(), stamp.end(), 0);
        tick = 1;
      }
      u64 c1 = 0, c2 = 0;
      for (u64 e = g.fwd_ptr[u]; e < g.fwd_ptr[u + 1]; ++e) {
        u32 v = g.fwd_dst[e];
        if (stamp[v] != tick && v != u) {
          stamp[v] = tick;
          ++c1;
        }
      }
      c2 = c1;
      for (u64 e = g.fwd_ptr[u]; e < g.fwd_ptr[u + 1]; ++e) {
        u32 v = g.fwd_dst[e];
        for (u64 f = g.fwd_ptr[v]; f < g.fwd_ptr[v + 1]; ++f) {
          u32 w = g.fwd_dst[f];
          if (stamp[w] != tick && w != u) {
            stamp[w] = tick;
            ++c2;
          }
        }
      }
      s1 += c1;
      s2 += c2;
    }
    part1[c] = s1;
    part2[c] = s2;
  });
  u64 sum1 = 0, sum2 = 0;
  for (u64 c = 0; c < n_chunks; ++c) {
    sum1 += part1[c];
    sum2 += part2[c];
  }
  out.n1 = {static_cast<double>(sum1) / n, static_cast<double>(sum1)};
  out.n2 = {static_cast<double>(sum2) / n, static_cast<double>(sum2)};
}

// Connected induced subgraph census of size m on the simple undirected view.
// Each subgraph is enumerated exactly once (subgraph-extension with exclusive
// neighborhoods, rooted at its minimum node). When `p` < 1 each extension
// branch is taken with probability p and every hit weighs p^-(m-1).
struct MotifScratch {
  std::vector<u32> seen;  // root-call stamps over sub + its neighborhood + ext
  u32 tick = 0;
};

double motif_root(const UndirectedView& u, u32 root, u32 m, double p, Rng* rng,
                  MotifScratch& sc) {
  if (sc.seen.size() < u.n) sc.seen.assign(u.n, 0);
  ++sc.tick;
  if (sc.tick == 0) {
    std::fill(sc.seen.begin(), sc.seen.end(), 0);
    sc.tick = 1;
  }
  const u32 tick = sc.tick;
  sc.seen[root] = tick;
  // frame depth == current subgraph size; seen covers sub + N(sub) above root,
  // so the exclusive-neighborhood test is a single stamp lookup
  struct Frame {
    std::vector<u32> ext;
    std::vector<u32> marked;  // stamped when this frame was created; unmarked on pop
  };
  std::vector<Frame> stack;
  {
    Frame f0;
    for (u64 e = u.ptr[root]; e < u.ptr[root + 1]; ++e) {
      u32 w = u.adj[e];
      if (w > root && sc.seen[w] != tick) {
        sc.seen[w] = tick;
        f0.ext.push_back(w);
      }
    }
    stack.push_back(std::move(f0));
  }
  double hits = 0.0;
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.ext.empty()) {
      for (u32 x : f.marked) sc.seen[x] = 0;
      stack.pop_back();
      continue;
    }
    u32 w = f.ext.back();
    f.ext.pop_back();  // permanent: later branches of this frame exclude w
    if (p < 1.0 && rng->uniform() >= p) continue;
    if (stack.size() + 1 == m) {
      hits += 1.0;
      continue;
    }
    Frame child;
    child.ext = f.ext;
    for (u64 e = u.ptr[w]; e < u.ptr[w + 1]; ++e) {
      u32 x = u.adj[e];
      if (x > root && sc.seen[x] != tick) {
        sc.seen[x] = tick;
        child.ext.push_back(x);
        child.marked.push_back(x);
      }
    }
    stack.push_back(std::move(child));
  }
  if (p < 1.0) {
    for (u32 i = 1; i < m; ++i) hits /= p;
  }
  return hits;
}

void motif_metrics(const UndirectedView& u, const MetricsConfig& cfg, TopometricVector& out) {
  const u32 m = cfg.motif_size;
  require(m >= 2 && m <= 8, errc::invalid_argument, "motif size out of range");
  // work proxy: sum of degree^(m-1); switch to sampling above the budget
  long double work = 0.0L;
  for (u64 v = 0; v < u.n; ++v) {
    long double d = static_cast<long double>(u.degree(static_cast<u32>(v)));
    long double t = 1.0L;
    for (u32 i = 1; i < m; ++i) t *= d;
    work += t;
  }
  double p = 1.0;
  if (work > static_cast<long double>(cfg.motif_budget)) {
    p = std::pow(static_cast<double>(cfg.motif_budget) / static_cast<double>(work),
                 1.0 / (m - 1));
    p = std::clamp(p, 1e-4, 1.0);
  }
  const u64 chunk = 512;
  const u64 n_chunks = (u.n + chunk - 1) / chunk;
  std::vector<double> partial(n_chunks, 0.0);
  parallel_for(n_chunks, cfg.workers, [&](u64 c) {
    thread_local MotifScratch sc;
    double acc = 0.0;
    const u64 lo = c * chunk, hi = std::min<u64>(u.n, lo + chunk);
    for (u64 v = lo; v < hi; ++v) {
      if (p < 1.0) {
        Rng rng(splitmix64(cfg.seed ^ splitmix64(v + 1)));
        acc += motif_root(u, static_cast<u32>(v), m, p, &rng, sc);
      } else {
        acc += motif_root(u, static_cast<u32>(v), m, 1.0, nullptr, sc);
      }
    }
    partial[c] = acc;
  });
  double total = 0.0;
  for (double x : partial) total += x;
  out.motif4 = {total / static_cast<double>(u.n), total};
  out.motif_size = m;
  double frac = 1.0;
  for (u32 i = 1; i < m; ++i) frac *= p;
  out.motif_sample_fraction = frac;
}

}  // namespace

std::vector<u32> core_numbers(const UndirectedView& u) {
  const u64 n = u.n;
  std::vector<u32> deg(n), pos(n), vert(n), core(n);
  u32 maxdeg = 0;
  for (u64 v = 0; v < n; ++v) {
    deg[v] = static_cast<u32>(u.degree(static_cast<u32>(v)));
    maxdeg = std::max(maxdeg, deg[v]);
  }
  std::vector<u32> bin(maxdeg + 2, 0);
  for (u64 v = 0; v < n; ++v) ++bin[deg[v]];
  u32 start = 0;
  for (u32 d = 0; d <= maxdeg; ++d) {
    u32 cnt = bin[d];
    bin[d] = start;
    start += cnt;
  }
  for (u64 v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]];
    vert[pos[v]] = static_cast<u32>(v);
    ++bin[deg[v]];
  }
  for (u32 d = maxdeg + 1; d-- > 1;) bin[d] = bin[d - 1];
  bin[0] = 0;
  for (u64 i = 0; i < n; ++i) {
    u32 v = vert[i];
    core[v] = deg[v];
    for (u64 e = u.ptr[v]; e < u.ptr[v + 1]; ++e) {
      u32 w = u.adj[e];
      if (deg[w] > deg[v]) {
        u32 dw = deg[w], pw = pos[w];
        u32 ps = bin[dw], s = vert[ps];
        if (w != s) {
          pos[w] = ps;
          vert[pw] = s;
          pos[s] = pw;
          vert[ps] = w;
        }
        ++bin[dw];
        --deg[w];
      }
    }
  }
  return core;
}

namespace {

void strength_metrics(const MultipartiteGraph& g, const UndirectedView& simple,
                      TopometricVector& out) {
  auto core = core_numbers(simple);
  u64 core_sum = 0;
  for (u32 c : core) core_sum += c;
  out.kcore = {static_cast<double>(core_sum) / g.n_nodes, static_cast<double>(core_sum)};
  double s = 0.0;
  if (g.weighted) {
    for (double w : g.rev_w) s += std::abs(w);
  } else {
    s = static_cast<double>(g.n_edges);
  }
  out.strength = {s / static_cast<double>(g.n_nodes), s};
}

void global_metrics(const UndirectedView& u, u64 n_edges_directed, TopometricVector& out) {
  const u64 n = u.n;
  // weakly connected components, BFS
  std::vector<u32> comp(n, 0xffffffffu);
  std::vector<u32> queue;
  u64 n_comp = 0;
  for (u64 s = 0; s < n; ++s) {
    if (comp[s] != 0xffffffffu) continue;
    u32 id = static_cast<u32>(n_comp++);
    comp[s] = id;
    queue.assign(1, static_cast<u32>(s));
    while (!queue.empty()) {
      u32 v = queue.back();
      queue.pop_back();
      for (u64 e = u.ptr[v]; e < u.ptr[v + 1]; ++e) {
        u32 w = u.adj[e];
        if (comp[w] == 0xffffffffu) {
          comp[w] = id;
          queue.push_back(w);
        }
      }
    }
  }
  out.components = {static_cast<double>(n_comp) / n, static_cast<double>(n_comp)};
  double cavg = n_comp > 0 ? static_cast<double>(n) / n_comp : 0.0;
  out.c_avg = {cavg, cavg};

  // bridges + articulation points, iterative low-link DFS on the simple view
  std::vector<u32> disc(n, 0), low(n, 0);
  std::vector<u32> parent(n, 0xffffffffu);
  std::vector<u64> it(n, 0);
  std::vector<u8> parent_skipped(n, 0), is_cut(n, 0);
  u64 bridges = 0;
  u32 timer = 1;
  std::vector<u32> stack;
  for (u64 s = 0; s < n; ++s) {
    if (disc[s] != 0) continue;
    u32 root = static_cast<u32>(s);
    u32 root_children = 0;
    stack.assign(1, root);
    disc[root] = low[root] = timer++;
    it[root] = u.ptr[root];
    while (!stack.empty()) {
      u32 v = stack.back();
      if (it[v] < u.ptr[v + 1]) {
        u32 w = u.adj[it[v]++];
        if (w == parent[v] && !parent_skipped[v]) {
          parent_skipped[v] = 1;  // simple view: skip the tree edge once
          continue;
        }
        if (disc[w] == 0) {
          parent[w] = v;
          parent_skipped[w] = 0;
          disc[w] = low[w] = timer++;
          it[w] = u.ptr[w];
          if (v == root) ++root_children;
          stack.push_back(w);
        } else {
          low[v] = std::min(low[v], disc[w]);
        }
      } else {
        stack.pop_back();
        if (!stack.empty()) {
          u32 pv = stack.back();
          low[pv] = std::min(low[pv], low[v]);
          if (low[v] > disc[pv]) ++bridges;
          if (pv != root && low[v] >= disc[pv]) is_cut[pv] = 1;
        }
      }
    }
    if (root_children >= 2) is_cut[root] = 1;
  }
  u64 cuts = 0;
  for (u64 v = 0; v < n; ++v) cuts += is_cut[v];
  out.cut_edges = {n_edges_directed > 0 ? static_cast<double>(bridges) / n_edges_directed : 0.0,
                   static_cast<double>(bridges)};
  out.cut_nodes = {static_cast<double>(cuts) / n, static_cast<double>(cuts)};
}

void expansion_metrics(const UndirectedView& u, const MetricsConfig& cfg, TopometricVector& out) {
  LanczosOptions opt;
  opt.tol = cfg.spectral_tol;
  opt.max_iter = cfg.spectral_max_iter;
  opt.seed = splitmix64(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  auto adj = adjacency_op(u);
  auto top2 = lanczos_top_distinct(adj, 2, opt);
  bool conv = !top2.empty();
  double gap = 0.0;
  if (top2.size() == 2) gap = top2[0] - top2[1];
  out.spectral_gap = {gap, gap};
  auto lap = laplacian_op(u);
  auto rho = lanczos_extreme(lap, true, opt);
  conv = conv && rho.converged;
  out.spectral_radius = {rho.value, rho.value};
  out.spectral_converged = conv;
}

}  // namespace

TopometricVector compute_topometrics(const MultipartiteGraph& g_in, const MetricsConfig& cfg) {
  const MultipartiteGraph* gp = &g_in;
  MultipartiteGraph reduced;
  if (cfg.exclude_padding) {
    reduced = core_view(g_in);
    gp = &reduced;
  }
  const MultipartiteGraph& g = *gp;
  require(g.n_nodes > 0, errc::invalid_argument, "graph has no nodes");

  TopometricVector out;
  out.n_nodes = g.n_nodes;
  out.n_edges = g.n_edges;
  out.padding_excluded = cfg.exclude_padding;
  out.groups_computed = cfg.groups;
  out.motif_size = cfg.motif_size;

  const bool needs_simple = want(cfg.groups, MetricGroup::Neighbor) ||
                            want(cfg.groups, MetricGroup::Strength) ||
                            want(cfg.groups, MetricGroup::Global) ||
                            want(cfg.groups, MetricGroup::Expansion);
  UndirectedView simple;
  if (needs_simple) simple = build_undirected(g, false);
  UndirectedView weighted_view;
  const UndirectedView* spectral_view = &simple;
  if (want(cfg.groups, MetricGroup::Expansion) && g.weighted) {
    weighted_view = build_undirected(g, true);
    spectral_view = &weighted_view;
  }

  // group tasks run under one worker budget; inner loops parallelize too
  std::vector<std::function<void()>> tasks;
  if (want(cfg.groups, MetricGroup::Local)) tasks.push_back([&] { local_metrics(g, out); });
  if (want(cfg.groups, MetricGroup::Neighbor)) {
    tasks.push_back([&] { khop_metrics(g, cfg.workers, out); });
    tasks.push_back([&] { motif_metrics(simple, cfg, out); });
  }
  if (want(cfg.groups, MetricGroup::Strength))
    tasks.push_back([&] { strength_metrics(g, simple, out); });
  if (want(cfg.groups, MetricGroup::Global))
    tasks.push_back([&] { global_metrics(simple, g.n_edges, out); });
  if (want(cfg.groups, MetricGroup::Expansion))
    tasks.push_back([&] { expansion_metrics(*spectral_view, cfg, out); });
  // groups write disjoint fields; reductions inside each are order-fixed,
  // so results do not depend on scheduling
  u32 group_workers = std::min<u32>(resolve_workers(cfg.workers), static_cast<u32>(tasks.size()));
  parallel_for(tasks.size(), group_workers, [&](u64 i) { tasks[i](); });
  return out;
}

const std::vector<std::string>& topometric_names() {
  static const std::vector<std::string> names = {
      "sink",   "source",   "disconnected", "r_out",     "r_in",
      "n1",     "n2",       "motif4",       "kcore",     "strength",
      "components", "c_avg", "cut_edges",   "cut_nodes", "spectral_gap",
      "spectral_radius"};
  return names;
}

std::vector<double> topometric_values(const TopometricVector& v) {
  return {v.sink.value,       v.source.value,    v.disconnected.value, v.r_out.value,
          v.r_in.value,       v.n1.value,        v.n2.value,           v.motif4.value,
          v.kcore.value,      v.strength.value,  v.components.value,   v.c_avg.value,
          v.cut_edges.value,  v.cut_nodes.value, v.spectral_gap.value,
          v.spectral_radius.value};
}

std::vector<double> topometric_raw_values(const TopometricVector& v) {
  return {v.sink.raw,      v.source.raw,    v.disconnected.raw, v.r_out.raw,
          v.r_in.raw,      v.n1.raw,        v.n2.raw,           v.motif4.raw,
          v.kcore.raw,     v.strength.raw,  v.components.raw,   v.c_avg.raw,
          v.cut_edges.raw, v.cut_nodes.raw, v.spectral_gap.raw,
          v.spectral_radius.raw};
}

std::string topometrics_json(const TopometricVector& v) {
  nlohmann::json j;
  const auto& names = topometric_names();
  auto vals = topometric_values(v);
  auto raws = topometric_raw_values(v);
  for (size_t i = 0; i < names.size(); ++i) {
    j["metrics"][names[i]] = {{"value", vals[i]}, {"raw", raws[i]}};
  }
  j["n_nodes"] = v.n_nodes;
  j["n_edges"] = v.n_edges;
  j["padding_excluded"] = v.padding_excluded;
  j["spectral_converged"] = v.spectral_converged;
  j["motif_size"] = v.motif_size;
  j["motif_sample_fraction"] = v.motif_sample_fraction;
  return j.dump(2);
}

std::string topometrics_csv_header() {
  std::string h = "label";
  for (const auto& n : topometric_names()) h += "," + n;
  for (const auto& n : topometric_names()) h += "," + n + "_raw";
  h += ",n_nodes,n_edges,motif_size,motif_sample_fraction,spectral_converged,padding_excluded";
  return h;
}

std::string topometrics_csv_row(const std::string& label, const TopometricVector& v) {
  char buf[64];
  std::string row = label;
  auto add = [&](double x) {
    row += ',';
    row += double_repr(x);
  };
  for (double x : topometric_values(v)) add(x);
  for (double x : topometric_raw_values(v)) add(x);
  std::snprintf(buf, sizeof buf, ",%llu,%llu,%u",
                static_cast<unsigned long long>(v.n_nodes),
                static_cast<unsigned long long>(v.n_edges), v.motif_size);
  row += buf;
  add(v.motif_sample_fraction);
  std::snprintf(buf, sizeof buf, ",%d,%d", v.spectral_converged ? 1 : 0,
                v.padding_excluded ? 1 : 0);
  row += buf;
  return row;
}

u32 parse_metric_groups(const std::vector<std::string>& names) {
  if (names.empty()) return static_cast<u32>(MetricGroup::All);
  u32 g = 0;
  for (const auto& n : names) {
    if (n == "local") g |= static_cast<u32>(MetricGroup::Local);
    else if (n == "neighbor") g |= static_cast<u32>(MetricGroup::Neighbor);
    else if (n == "strength") g |= static_cast<u32>(MetricGroup::Strength);
    else if (n == "global") g |= static_cast<u32>(MetricGroup::Global);
    else if (n == "expansion") g |= static_cast<u32>(MetricGroup::Expansion);
    else if (n == "all") g |= static_cast<u32>(MetricGroup::All);
    else fail(errc::invalid_argument, "unknown metric group '" + n + "'");
  }
  return g;
}

}  // namespace snntopo
