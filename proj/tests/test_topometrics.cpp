#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core/encoder.hpp"
#include "core/mask.hpp"
#include "core/topometrics.hpp"
#include "metric_oracles.hpp"
#include "random_graphs.hpp"

using namespace snntopo;

namespace {

// chain graphs: one node per partition, one edge between consecutive ones
MultipartiteGraph chain(u32 len, bool weighted = false) {
  GraphBuilder b(weighted);
  for (u32 i = 0; i < len; ++i) b.add_partition(1, 0);
  for (u32 i = 0; i + 1 < len; ++i) {
    BipartiteGraph bg;
    bg.n_left = bg.left_core = 1;
    bg.n_right = 1;
    bg.weighted = weighted;
    if (weighted) {
      bg.add_edge(0, 0, 1.0);
    } else {
      bg.add_edge(0, 0);
    }
    b.add_layer_edges(i, i + 1, bg);
  }
  return b.finish();
}

MetricsConfig exact_cfg(u32 motif_size = 4) {
  MetricsConfig cfg;
  cfg.motif_size = motif_size;
  cfg.motif_budget = ~0ull;  // force the exact census
  cfg.workers = 2;
  return cfg;
}

void check_against_oracle(const MultipartiteGraph& g, const MetricsConfig& cfg) {
  auto v = compute_topometrics(g, cfg);
  auto ref = oracle::all_metrics(oracle::extract(g), cfg.motif_size);
  double nv = static_cast<double>(g.n_nodes);
  CHECK(v.sink.raw == ref.sink);
  CHECK(v.source.raw == ref.source);
  CHECK(v.disconnected.raw == ref.disconnected);
  CHECK(v.sink.value == doctest::Approx(ref.sink / nv).epsilon(1e-12));
  CHECK(v.r_out.value == doctest::Approx(ref.r_out).epsilon(1e-12));
  CHECK(v.r_in.value == doctest::Approx(ref.r_in).epsilon(1e-12));
  CHECK(v.n1.value == doctest::Approx(ref.n1).epsilon(1e-12));
  CHECK(v.n2.value == doctest::Approx(ref.n2).epsilon(1e-12));
  CHECK(v.motif4.raw == ref.motif);
  CHECK(v.kcore.value == doctest::Approx(ref.kcore).epsilon(1e-12));
  CHECK(v.strength.value == doctest::Approx(ref.strength).epsilon(1e-9));
  CHECK(v.components.raw == ref.components);
  CHECK(v.c_avg.value == doctest::Approx(ref.c_avg).epsilon(1e-12));
  CHECK(v.cut_edges.raw == ref.cut_edges);
  CHECK(v.cut_nodes.raw == ref.cut_nodes);
  CHECK(std::abs(v.spectral_gap.value - ref.spectral_gap) <
        1e-6 * std::max(1.0, std::abs(ref.spectral_gap)));
  CHECK(std::abs(v.spectral_radius.value - ref.spectral_radius) <
        1e-6 * std::max(1.0, std::abs(ref.spectral_radius)));
}

}  // namespace

TEST_CASE("three-node chain has no sinks, sources, or isolated nodes") {
  auto g = chain(3);
  auto v = compute_topometrics(g, exact_cfg());
  CHECK(v.sink.raw == 0);
  CHECK(v.source.raw == 0);
  CHECK(v.disconnected.raw == 0);
  CHECK(v.n2.value == doctest::Approx(1.0));  // 2 + 1 + 0 over 3 nodes
  CHECK(v.cut_edges.raw == 2);
  CHECK(v.cut_nodes.raw == 1);
  CHECK(v.spectral_gap.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  CHECK(v.c_avg.value == doctest::Approx(3.0));
}

TEST_CASE("isolated middle node counts as disconnected, sink, and source") {
  GraphBuilder b(false);
  b.add_partition(1, 0);
  b.add_partition(2, 0);  // node 1 connected, node 2 isolated
  b.add_partition(1, 0);
  BipartiteGraph bg01;
  bg01.n_left = bg01.left_core = 1;
  bg01.n_right = 2;
  bg01.add_edge(0, 0);
  b.add_layer_edges(0, 1, bg01);
  BipartiteGraph bg12;
  bg12.n_left = bg12.left_core = 2;
  bg12.n_right = 1;
  bg12.add_edge(0, 0);
  b.add_layer_edges(1, 2, bg12);
  auto g = b.finish();
  auto v = compute_topometrics(g, exact_cfg());
  CHECK(v.disconnected.raw == 1);
  CHECK(v.sink.raw == 1);
  CHECK(v.source.raw == 1);
  check_against_oracle(g, exact_cfg());
}

TEST_CASE("removable in-connections follow the sink example") {
  // middle node x with indegree 2 and outdegree 0, |E| = 10 total
  GraphBuilder b(false);
  b.add_partition(4, 0);
  b.add_partition(3, 0);
  b.add_partition(4, 0);
  BipartiteGraph bg01;
  bg01.n_left = bg01.left_core = 4;
  bg01.n_right = 3;
  // x is middle node id 2: give it indegree 2
  bg01.add_edge(0, 2);
  bg01.add_edge(1, 2);
  bg01.add_edge(0, 0);
  bg01.add_edge(1, 1);
  bg01.add_edge(2, 0);
  bg01.add_edge(3, 1);
  b.add_layer_edges(0, 1, bg01);
  BipartiteGraph bg12;
  bg12.n_left = bg12.left_core = 3;
  bg12.n_right = 4;
  bg12.add_edge(0, 0);
  bg12.add_edge(0, 1);
  bg12.add_edge(1, 2);
  bg12.add_edge(1, 3);
  b.add_layer_edges(1, 2, bg12);
  auto g = b.finish();
  REQUIRE(g.n_edges == 10);
  auto v = compute_topometrics(g, exact_cfg());
  CHECK(v.sink.raw == 1);
  CHECK(v.r_in.value == doctest::Approx(0.2));
  check_against_oracle(g, exact_cfg());
}

TEST_CASE("one-hop reach on a complete 2x3 bipartite graph") {
  BipartiteGraph bg;
  bg.n_left = bg.left_core = 2;
  bg.n_right = 3;
  for (u32 a = 0; a < 2; ++a)
    for (u32 b2 = 0; b2 < 3; ++b2) bg.add_edge(a, b2);
  auto g = to_multipartite(bg);
  auto v = compute_topometrics(g, exact_cfg());
  CHECK(v.n1.value == doctest::Approx(1.2));
}

TEST_CASE("four-node undirected path holds exactly one 4-motif") {
  auto g = chain(4);
  auto v = compute_topometrics(g, exact_cfg());
  CHECK(v.motif4.raw == 1.0);
  CHECK(v.motif_sample_fraction == 1.0);
  // independent cross-check between the two oracle strategies
  auto s = oracle::extract(g);
  CHECK(oracle::motif_census_growth(s, 4) == 1);
  CHECK(oracle::motif_census_subsets(s, 4) == 1);
}

TEST_CASE("triangle via a residual edge gives core number two everywhere") {
  GraphBuilder b(false);
  b.add_partition(1, 0);
  b.add_partition(1, 0);
  b.add_partition(1, 0);
  BipartiteGraph e;
  e.n_left = e.left_core = 1;
  e.n_right = 1;
  e.add_edge(0, 0);
  b.add_layer_edges(0, 1, e);
  b.add_layer_edges(1, 2, e);
  b.add_residual_edges(0, 2, e);
  auto g = b.finish();
  auto v = compute_topometrics(g, exact_cfg());
  CHECK(v.kcore.value == doctest::Approx(2.0));
  CHECK(v.cut_edges.raw == 0);
  CHECK(v.cut_nodes.raw == 0);
  check_against_oracle(g, exact_cfg());
}

TEST_CASE("star graph core numbers are all one") {
  BipartiteGraph bg;
  bg.n_left = bg.left_core = 1;
  bg.n_right = 4;
  for (u32 i = 0; i < 4; ++i) bg.add_edge(0, i);
  auto v = compute_topometrics(to_multipartite(bg), exact_cfg());
  CHECK(v.kcore.value == doctest::Approx(1.0));
}

TEST_CASE("strength sums absolute incoming weights") {
  BipartiteGraph bg;
  bg.n_left = bg.left_core = 2;
  bg.n_right = 1;
  bg.weighted = true;
  bg.add_edge(0, 0, 0.5);
  bg.add_edge(1, 0, -1.5);
  auto v = compute_topometrics(to_multipartite(bg), exact_cfg());
  CHECK(v.strength.raw == doctest::Approx(2.0));
  CHECK(v.strength.value == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("two disjoint edges form two components of mean size two") {
  BipartiteGraph bg;
  bg.n_left = bg.left_core = 2;
  bg.n_right = 2;
  bg.add_edge(0, 0);
  bg.add_edge(1, 1);
  auto v = compute_topometrics(to_multipartite(bg), exact_cfg());
  CHECK(v.components.raw == 2);
  CHECK(v.c_avg.value == doctest::Approx(2.0));
}

TEST_CASE("single edge spectral radius of the laplacian is two") {
  auto g = chain(2);
  auto v = compute_topometrics(g, exact_cfg());
  CHECK(v.spectral_radius.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("edgeless graph degenerates cleanly") {
  GraphBuilder b(false);
  b.add_partition(5, 0);
  auto g = b.finish();
  auto v = compute_topometrics(g, exact_cfg());
  CHECK(v.sink.raw == 0);    // single partition is both first and last
  CHECK(v.source.raw == 0);
  CHECK(v.disconnected.raw == 5);
  CHECK(v.n1.value == 0.0);
  CHECK(v.spectral_gap.value == 0.0);
  CHECK(v.spectral_radius.value == doctest::Approx(0.0));
  CHECK(v.r_out.value == 0.0);
  CHECK(v.components.raw == 5);
}

TEST_CASE("random graphs agree with the brute-force reference suite") {
  Rng rng(0xfeedbeef);
  for (int iter = 0; iter < 120; ++iter) {
    u32 scale = 4 + static_cast<u32>(rng.below(36));
    if (iter % 20 == 19) scale = 80 + static_cast<u32>(rng.below(121));  // up to 200 nodes
    auto g = testutil::random_multipartite(rng, scale);
    check_against_oracle(g, exact_cfg());
  }
}

TEST_CASE("metrics are deterministic across worker counts") {
  Rng rng(77);
  auto g = testutil::random_multipartite(rng, 50);
  MetricsConfig a = exact_cfg();
  a.workers = 1;
  MetricsConfig b = exact_cfg();
  b.workers = 7;
  auto va = topometric_values(compute_topometrics(g, a));
  auto vb = topometric_values(compute_topometrics(g, b));
  REQUIRE(va.size() == 16);
  for (size_t i = 0; i < va.size(); ++i) CHECK(va[i] == vb[i]);
}

TEST_CASE("adding an edge moves monotone metrics the right way") {
  Rng rng(909);
  for (int iter = 0; iter < 25; ++iter) {
    u32 p_count = 2 + static_cast<u32>(rng.below(3));
    GraphBuilder b1(false), b2(false);
    std::vector<u32> cores(p_count);
    for (u32 p = 0; p < p_count; ++p) {
      cores[p] = 2 + static_cast<u32>(rng.below(6));
      b1.add_partition(cores[p], 0);
      b2.add_partition(cores[p], 0);
    }
    bool added = false;
    for (u32 p = 0; p + 1 < p_count; ++p) {
      auto bg = testutil::random_bipartite(rng, cores[p], cores[p], cores[p + 1], false, 0.4);
      b1.add_layer_edges(p, p + 1, bg);
      if (!added) {
        // add one extra edge not already present
        u64 possible = static_cast<u64>(cores[p]) * cores[p + 1];
        std::set<std::pair<u32, u32>> have;
        for (u64 e = 0; e < bg.n_edges(); ++e) have.insert({bg.src[e], bg.dst[e]});
        if (have.size() < possible) {
          for (u64 f = 0; f < possible; ++f) {
            u32 a = static_cast<u32>(f / cores[p + 1]);
            u32 d = static_cast<u32>(f % cores[p + 1]);
            if (!have.count({a, d})) {
              bg.add_edge(a, d);
              added = true;
              break;
            }
          }
        }
      }
      b2.add_layer_edges(p, p + 1, bg);
    }
    auto before = compute_topometrics(b1.finish(), exact_cfg());
    auto after = compute_topometrics(b2.finish(), exact_cfg());
    if (!added) continue;
    CHECK(after.sink.raw <= before.sink.raw);
    CHECK(after.source.raw <= before.source.raw);
    CHECK(after.disconnected.raw <= before.disconnected.raw);
    CHECK(after.n1.raw >= before.n1.raw);
    CHECK(after.kcore.raw >= before.kcore.raw);
    CHECK(after.spectral_radius.value >= before.spectral_radius.value - 1e-7);
  }
}

TEST_CASE("padding exclusion reduces to the core-induced subgraph") {
  LayerSpec l;
  l.kind = LayerKind::Conv;
  l.c_in = 1;
  l.c_out = 1;
  l.kh = l.kw = 3;
  l.stride = 1;
  l.padding = 1;
  MaskLayer dense;
  dense.dims = layer_weight_dims(l);
  for (u64 i = 0; i < 9; ++i) dense.indices.push_back(i);
  auto bg = encode_conv(Shape{4, 4, 1}, l, dense, false);
  auto g = to_multipartite(bg);
  REQUIRE(g.n_nodes == 52);  // 16 core + 20 pad + 16 out

  auto cv = core_view(g);
  CHECK(cv.n_nodes == 32);
  CHECK(cv.partitions[0].pad == 0);
  u64 interior_edges = 0;
  for (u64 u = 0; u < 16; ++u) interior_edges += g.fwd_ptr[u + 1] - g.fwd_ptr[u];
  CHECK(cv.n_edges == interior_edges);

  MetricsConfig cfg = exact_cfg();
  cfg.exclude_padding = true;
  auto ve = compute_topometrics(g, cfg);
  CHECK(ve.n_nodes == 32);
  CHECK(ve.padding_excluded);
  auto direct = compute_topometrics(cv, exact_cfg());
  auto a = topometric_values(ve);
  auto d = topometric_values(direct);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(d[i]).epsilon(1e-9));
  check_against_oracle(cv, exact_cfg());
}

TEST_CASE("group selection computes only the asked-for families") {
  auto g = chain(3);
  MetricsConfig cfg = exact_cfg();
  cfg.groups = parse_metric_groups({"local"});
  auto v = compute_topometrics(g, cfg);
  CHECK(v.groups_computed == static_cast<u32>(MetricGroup::Local));
  CHECK(v.n1.value == 0.0);            // untouched default
  CHECK(v.spectral_radius.value == 0.0);
  CHECK_THROWS_AS((void)parse_metric_groups({"bogus"}), Error);
}

TEST_CASE("sampled census estimates the exact count") {
  // moderately dense graph: forces sampling with a small budget
  Rng rng(31337);
  GraphBuilder b(false);
  b.add_partition(18, 0);
  b.add_partition(18, 0);
  auto bg = testutil::random_bipartite(rng, 18, 18, 18, false, 0.5);
  b.add_layer_edges(0, 1, bg);
  auto g = b.finish();

  auto exact = compute_topometrics(g, exact_cfg());
  MetricsConfig cfg = exact_cfg();
  cfg.motif_budget = 3'000;
  cfg.seed = 5;
  auto sampled = compute_topometrics(g, cfg);
  REQUIRE(sampled.motif_sample_fraction < 1.0);
  CHECK(sampled.motif_sample_fraction > 0.0);
  CHECK(sampled.motif4.raw ==
        doctest::Approx(exact.motif4.raw).epsilon(0.25));  // deterministic given the seed
  auto again = compute_topometrics(g, cfg);
  CHECK(again.motif4.raw == sampled.motif4.raw);
}

TEST_CASE("motif size three on the triangle") {
  GraphBuilder b(false);
  b.add_partition(1, 0);
  b.add_partition(1, 0);
  b.add_partition(1, 0);
  BipartiteGraph e;
  e.n_left = e.left_core = 1;
  e.n_right = 1;
  e.add_edge(0, 0);
  b.add_layer_edges(0, 1, e);
  b.add_layer_edges(1, 2, e);
  b.add_residual_edges(0, 2, e);
  auto g = b.finish();
  auto v = compute_topometrics(g, exact_cfg(3));
  CHECK(v.motif4.raw == 1.0);
  CHECK(v.motif_size == 3);
}

TEST_CASE("csv row and json report carry all sixteen metrics") {
  auto g = chain(3);
  auto v = compute_topometrics(g, exact_cfg());
  auto header = topometrics_csv_header();
  auto row = topometrics_csv_row("chain3", v);
  size_t hc = std::count(header.begin(), header.end(), ',');
  size_t rc = std::count(row.begin(), row.end(), ',');
  CHECK(hc == rc);
  CHECK(hc == 16 * 2 + 6);
  auto j = topometrics_json(v);
  for (const auto& name : topometric_names()) CHECK(j.find('"' + name + '"') != std::string::npos);
}

TEST_CASE("weight scaling scales strength and spectral values linearly") {
  Rng rng(4242);
  GraphBuilder b1(true), b2(true);
  b1.add_partition(6, 0);
  b1.add_partition(6, 0);
  b2.add_partition(6, 0);
  b2.add_partition(6, 0);
  auto bg = testutil::random_bipartite(rng, 6, 6, 6, true, 0.6);
  BipartiteGraph scaled = bg;
  for (double& w : scaled.w) w *= 4.0;  // power of two: exact fp scaling
  b1.add_layer_edges(0, 1, bg);
  b2.add_layer_edges(0, 1, scaled);
  auto v1 = compute_topometrics(b1.finish(), exact_cfg());
  auto v2 = compute_topometrics(b2.finish(), exact_cfg());
  CHECK(v2.strength.value == doctest::Approx(4.0 * v1.strength.value).epsilon(1e-12));
  CHECK(v2.spectral_gap.value == doctest::Approx(4.0 * v1.spectral_gap.value).epsilon(1e-7));
  CHECK(v2.spectral_radius.value ==
        doctest::Approx(4.0 * v1.spectral_radius.value).epsilon(1e-7));
  // unweighted families unchanged
  CHECK(v2.kcore.value == v1.kcore.value);
  CHECK(v2.motif4.raw == v1.motif4.raw);
  CHECK(v2.components.raw == v1.components.raw);
}
