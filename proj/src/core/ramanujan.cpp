#include "ramanujan.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "parallel.hpp"
#include "spectral.hpp"
#include "topometrics.hpp"

namespace snntopo {

namespace {

// largest magnitude after deflating one copy each of the trivial pair; the
// sign flip over the right side turns the mu0 eigenvector into the -mu0 one
double nontrivial_mu_hat(const UndirectedView& u, const std::vector<u8>& is_left,
                         const RamanujanOptions& opt, double* mu0_out, bool* converged) {
  LanczosOptions lo;
  lo.tol = opt.tol;
  lo.max_iter = opt.max_iter;
  lo.seed = opt.seed;
  auto adj = adjacency_op(u);
  auto top = lanczos_extreme(adj, true, lo);
  *converged = *converged && top.converged;
  double mu0 = top.value;
  *mu0_out = mu0;
  if (mu0 <= opt.tol) return 0.0;  // edgeless or vanishing spectrum
  std::vector<double> flip = top.vector;
  for (u64 v = 0; v < u.n; ++v) {
    if (!is_left[v]) flip[v] = -flip[v];
  }
  auto defl = deflated_op(adj, {{mu0, top.vector}, {-mu0, flip}});
  lo.seed = splitmix64(opt.seed ^ 0x5ca1ab1eull);
  auto rest = lanczos_extreme_magnitude(defl, lo);
  *converged = *converged && rest.converged;
  return std::clamp(std::abs(rest.value), 0.0, mu0);
}

// gap mu0 - (largest distinct eigenvalue below it); 0 when the whole
// spectrum collapses to one point
double distinct_gap(const UndirectedView& u, const RamanujanOptions& opt, bool* converged) {
  LanczosOptions lo;
  lo.tol = opt.tol;
  lo.max_iter = opt.max_iter;
  lo.seed = splitmix64(opt.seed ^ 0x9e3779b9ull);
  auto top2 = lanczos_top_distinct(adjacency_op(u), 2, lo);
  if (top2.empty()) {
    *converged = false;
    return 0.0;
  }
  return top2.size() == 2 ? top2[0] - top2[1] : 0.0;
}

struct SubView {
  UndirectedView plain;
  UndirectedView weighted;
  std::vector<u8> is_left;
};

SubView induced_subgraph(const UndirectedView& plain, const UndirectedView& weighted,
                         const std::vector<u8>& is_left, const std::vector<u32>& keep) {
  SubView s;
  std::vector<u32> remap(plain.n, 0xffffffffu);
  for (u32 i = 0; i < keep.size(); ++i) remap[keep[i]] = i;
  const u64 m = keep.size();
  s.plain.n = m;
  s.weighted.n = m;
  s.plain.ptr.assign(m + 1, 0);
  s.weighted.ptr.assign(m + 1, 0);
  s.is_left.resize(m);
  for (u32 i = 0; i < m; ++i) {
    u32 v = keep[i];
    s.is_left[i] = is_left[v];
    for (u64 e = plain.ptr[v]; e < plain.ptr[v + 1]; ++e) {
      if (remap[plain.adj[e]] != 0xffffffffu) ++s.plain.ptr[i + 1];
    }
  }
  for (u64 i = 0; i < m; ++i) s.plain.ptr[i + 1] += s.plain.ptr[i];
  s.weighted.ptr = s.plain.ptr;  // same adjacency structure
  s.plain.adj.resize(s.plain.ptr.back());
  s.weighted.adj.resize(s.plain.ptr.back());
  if (!weighted.w.empty()) s.weighted.w.resize(s.plain.ptr.back());
  std::vector<u64> cursor(s.plain.ptr.begin(), s.plain.ptr.end() - 1);
  for (u32 i = 0; i < m; ++i) {
    u32 v = keep[i];
    for (u64 e = plain.ptr[v]; e < plain.ptr[v + 1]; ++e) {
      u32 t = remap[plain.adj[e]];
      if (t == 0xffffffffu) continue;
      u64 slot = cursor[i]++;
      s.plain.adj[slot] = t;
      s.weighted.adj[slot] = t;
      if (!weighted.w.empty()) s.weighted.w[slot] = weighted.w[e];
    }
  }
  return s;
}

double delta_r_of(const UndirectedView& plain, const std::vector<u8>& is_left,
                  const RamanujanOptions& opt, double d_avg, double* mu0, double* mu_hat,
                  bool* converged) {
  *mu_hat = nontrivial_mu_hat(plain, is_left, opt, mu0, converged);
  return 2.0 * std::sqrt(std::max(0.0, d_avg - 1.0)) - *mu_hat;
}

}  // namespace

std::vector<SubgraphSpec> icore_family(const UndirectedView& u) {
  auto core = core_numbers(u);
  u32 degeneracy = 0;
  for (u32 c : core) degeneracy = std::max(degeneracy, c);
  std::vector<SubgraphSpec> family;
  for (u32 i = 3; i <= degeneracy; ++i) {
    SubgraphSpec s;
    s.label = i;
    for (u32 v = 0; v < core.size(); ++v) {
      if (core[v] >= i) s.nodes.push_back(v);
    }
    if (s.nodes.empty()) break;
    family.push_back(std::move(s));
  }
  return family;
}

RamanujanValues ramanujan_values(const MultipartiteGraph& g, const RamanujanOptions& opt) {
  require(g.partitions.size() == 2, errc::invalid_argument,
          "expected a single-layer (two-partition) graph");
  RamanujanValues out;
  const u64 left = g.partitions[0].total();
  const u64 right = g.partitions[1].total();
  out.d_left = left > 0 ? static_cast<double>(g.n_edges) / left : 0.0;
  out.d_right = right > 0 ? static_cast<double>(g.n_edges) / right : 0.0;
  out.feasible = std::min(out.d_left, out.d_right) >= 3.0;
  out.unit_weights = !g.weighted;

  auto plain = build_undirected(g, false);
  auto weighted = g.weighted ? build_undirected(g, true) : plain;
  std::vector<u8> is_left(g.n_nodes, 0);
  for (u64 v = 0; v < left; ++v) is_left[v] = 1;

  const u64 se = plain.n_simple_edges();
  out.d_avg = g.n_nodes > 0 ? 2.0 * static_cast<double>(se) / g.n_nodes : 0.0;
  if (out.d_avg > 1.0) {
    out.delta_r_defined = true;
    out.delta_r = delta_r_of(plain, is_left, opt, out.d_avg, &out.mu0, &out.mu_hat,
                             &out.converged);
  }

  auto family = opt.family ? opt.family(plain) : icore_family(plain);
  double sum_dr = 0.0, sum_gap = 0.0;
  const std::vector<u32>* prev_nodes = nullptr;
  for (size_t fi = 0; fi < family.size(); ++fi) {
    const auto& member = family[fi];
    if (member.nodes.empty()) continue;
    // nested families repeat node sets when a level is skipped entirely;
    // identical sets give identical metrics
    if (prev_nodes != nullptr && member.nodes == *prev_nodes) {
      CoreSubgraphInfo info = out.cores.back();
      info.order = member.label;
      sum_dr += info.delta_r;
      sum_gap += info.weighted_gap;
      out.cores.push_back(info);
      prev_nodes = &family[fi].nodes;
      continue;
    }
    auto sub = induced_subgraph(plain, weighted, is_left, member.nodes);
    CoreSubgraphInfo info;
    info.order = member.label;
    info.nodes = sub.plain.n;
    info.edges = sub.plain.n_simple_edges();
    info.d_avg = 2.0 * static_cast<double>(info.edges) / sub.plain.n;
    info.regular = true;
    for (u64 v = 0; v + 1 < sub.plain.n; ++v) {
      if (sub.plain.degree(static_cast<u32>(v)) != sub.plain.degree(static_cast<u32>(v + 1))) {
        info.regular = false;
        break;
      }
    }
    RamanujanOptions sub_opt = opt;
    sub_opt.seed = splitmix64(opt.seed ^ (0x1000 + member.label));
    double m0 = 0.0, mh = 0.0;
    info.delta_r = delta_r_of(sub.plain, sub.is_left, sub_opt, info.d_avg, &m0, &mh,
                              &out.converged);
    info.weighted_gap = distinct_gap(g.weighted ? sub.weighted : sub.plain, sub_opt,
                                     &out.converged);
    sum_dr += info.delta_r;
    sum_gap += info.weighted_gap;
    if (!info.regular) out.any_core_irregular = true;
    out.cores.push_back(info);
    prev_nodes = &family[fi].nodes;
  }
  if (!out.cores.empty()) {
    out.imdb_defined = true;
    out.delta_r_imdb = sum_dr / out.cores.size();
    out.lambda_imsg = sum_gap / out.cores.size();
  }
  return out;
}

RamanujanReport ramanujan_report(const ArchitectureSpec& spec, const SparseMask& mask,
                                 Encoding encoding, const RamanujanOptions& opt, u32 workers) {
  validate_mask(mask, spec);
  RamanujanReport rep;
  rep.arch = spec.name;
  rep.encoding = encoding;
  rep.layers.resize(mask.layers.size());
  parallel_for(mask.layers.size(), workers, [&](u64 p) {
    RamanujanLayerReport lr;
    lr.position = static_cast<u32>(p);
    lr.layer_index = mask.layers[p].layer_index;
    lr.density = mask.layers[p].density();
    auto g = encode_layer_graph(spec, mask, p, encoding, mask.has_weights());
    RamanujanOptions lo = opt;
    lo.seed = splitmix64(opt.seed ^ splitmix64(p + 0x7777));
    lr.values = ramanujan_values(g, lo);
    rep.layers[p] = std::move(lr);
  });
  return rep;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y, bool* defined) {
  require(x.size() == y.size(), errc::invalid_argument, "series length mismatch");
  const size_t n = x.size();
  if (defined) *defined = false;
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  if (defined) *defined = true;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

// Series are sum-scaled so layers of different magnitude share an axis.
bool sum_scale(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  if (std::abs(s) < 1e-300) return false;
  for (double& x : v) x /= s;
  return true;
}

}  // namespace

CorrelationReport density_correlation_study(const ArchitectureSpec& spec, const SparseMask& mask,
                                            Encoding encoding, const RamanujanOptions& opt,
                                            u32 workers) {
  auto rep = ramanujan_report(spec, mask, encoding, opt, workers);
  CorrelationReport out;
  for (const auto& lr : rep.layers) {
    if (!lr.values.feasible || !lr.values.delta_r_defined || !lr.values.imdb_defined) continue;
    out.positions.push_back(lr.position);
    out.density.push_back(lr.density);
    out.delta_r.push_back(lr.values.delta_r);
    out.delta_r_imdb.push_back(lr.values.delta_r_imdb);
    out.lambda_imsg.push_back(lr.values.lambda_imsg);
  }
  require(out.positions.size() >= 3, errc::invalid_argument,
          "need at least three feasible layers for the correlation study");
  sum_scale(out.density);
  bool s1 = sum_scale(out.delta_r);
  bool s2 = sum_scale(out.delta_r_imdb);
  bool s3 = sum_scale(out.lambda_imsg);
  out.r_delta_r = pearson(out.density, out.delta_r, &out.r_delta_r_defined);
  out.r_imdb = pearson(out.density, out.delta_r_imdb, &out.r_imdb_defined);
  out.r_imsg = pearson(out.density, out.lambda_imsg, &out.r_imsg_defined);
  out.r_delta_r_defined = out.r_delta_r_defined && s1;
  out.r_imdb_defined = out.r_imdb_defined && s2;
  out.r_imsg_defined = out.r_imsg_defined && s3;
  return out;
}

static const char* encoding_name(Encoding e) {
  switch (e) {
    case Encoding::Unrolled: return "unrolled";
    case Encoding::Rolled: return "rolled";
    case Encoding::RolledChannel: return "rolled-channel";
  }
  return "?";
}

std::string ramanujan_json(const RamanujanReport& r) {
  nlohmann::json j;
  j["arch"] = r.arch;
  j["encoding"] = encoding_name(r.encoding);
  j["layers"] = nlohmann::json::array();
  for (const auto& lr : r.layers) {
    nlohmann::json l;
    l["position"] = lr.position;
    l["layer_index"] = lr.layer_index;
    l["density"] = lr.density;
    const auto& v = lr.values;
    l["d_left"] = v.d_left;
    l["d_right"] = v.d_right;
    l["feasible"] = v.feasible;
    if (v.feasible) {
      if (v.delta_r_defined) {
        l["delta_r"] = v.delta_r;
        l["d_avg"] = v.d_avg;
        l["mu0"] = v.mu0;
        l["mu_hat"] = v.mu_hat;
      }
      if (v.imdb_defined) {
        l["delta_r_imdb"] = v.delta_r_imdb;
        l["lambda_imsg"] = v.lambda_imsg;
        l["any_core_irregular"] = v.any_core_irregular;
        l["cores"] = nlohmann::json::array();
        for (const auto& c : v.cores) {
          l["cores"].push_back({{"order", c.order},
                                {"nodes", c.nodes},
                                {"edges", c.edges},
                                {"d_avg", c.d_avg},
                                {"regular", c.regular},
                                {"delta_r", c.delta_r},
                                {"weighted_gap", c.weighted_gap}});
        }
      }
      l["unit_weights"] = v.unit_weights;
      l["converged"] = v.converged;
    }
    j["layers"].push_back(std::move(l));
  }
  return j.dump(2);
}

std::string correlation_csv(const CorrelationReport& r) {
  std::string s = "position,density,delta_r,delta_r_imdb,lambda_imsg\n";
  for (size_t i = 0; i < r.positions.size(); ++i) {
    s += std::to_string(r.positions[i]) + ',' + double_repr(r.density[i]) + ',' +
         double_repr(r.delta_r[i]) + ',' + double_repr(r.delta_r_imdb[i]) + ',' +
         double_repr(r.lambda_imsg[i]) + '\n';
  }
  return s;
}

std::string correlation_json(const CorrelationReport& r) {
  nlohmann::json j;
  j["positions"] = r.positions;
  j["density"] = r.density;
  j["delta_r"] = r.delta_r;
  j["delta_r_imdb"] = r.delta_r_imdb;
  j["lambda_imsg"] = r.lambda_imsg;
  j["pearson"] = {{"delta_r", r.r_delta_r},
                  {"delta_r_imdb", r.r_imdb},
                  {"lambda_imsg", r.r_imsg}};
  j["pearson_defined"] = {{"delta_r", r.r_delta_r_defined},
                          {"delta_r_imdb", r.r_imdb_defined},
                          {"lambda_imsg", r.r_imsg_defined}};
  return j.dump(2);
}

}  // namespace snntopo
