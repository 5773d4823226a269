#pragma once
// Expander-quality measures over single-layer bipartite graphs: the bound
// difference 2*sqrt(d_avg-1) - mu_hat, its mean over the nested i-core
// subgraphs (i = 3 .. degeneracy), and the matching mean weighted gap.
// For bipartite graphs both +mu0 and -mu0 count as trivial; one copy of each
// is deflated away before mu_hat is read off.

#include <functional>
#include <string>
#include <vector>

#include "archspec.hpp"
#include "encoder.hpp"
#include "graph.hpp"
#include "mask.hpp"

namespace snntopo {

// One member of the subgraph family the iterative means run over.
struct SubgraphSpec {
  u32 label = 0;  // i for the default i-core family
  std::vector<u32> nodes;
};

// Strategy producing the family from the simple undirected view. The default
// is the nested i-core sequence for i = 3 .. degeneracy.
using SubgraphFamily = std::function<std::vector<SubgraphSpec>(const UndirectedView&)>;

std::vector<SubgraphSpec> icore_family(const UndirectedView& u);

struct RamanujanOptions {
  double tol = 1e-10;
  u32 max_iter = 0;
  u64 seed = 0xabcdef;
  SubgraphFamily family;  // empty -> icore_family
};

struct CoreSubgraphInfo {
  u32 order = 0;  // the i of the i-core
  u64 nodes = 0;
  u64 edges = 0;  // simple undirected
  double d_avg = 0.0;
  bool regular = false;
  double delta_r = 0.0;
  double weighted_gap = 0.0;
};

struct RamanujanValues {
  double d_left = 0.0, d_right = 0.0;  // |E| over each side size
  bool feasible = false;               // min(d_left, d_right) >= 3

  bool delta_r_defined = false;  // needs graph-level d_avg > 1
  double delta_r = 0.0;
  double d_avg = 0.0;
  double mu0 = 0.0, mu_hat = 0.0;

  bool imdb_defined = false;  // needs a nonempty 3-core
  double delta_r_imdb = 0.0;
  double lambda_imsg = 0.0;
  bool unit_weights = false;  // lambda computed with w=1 (unweighted input)
  bool any_core_irregular = false;
  std::vector<CoreSubgraphInfo> cores;
  bool converged = true;
};

// `layer_graph` must be a two-partition graph (one encoded layer).
RamanujanValues ramanujan_values(const MultipartiteGraph& layer_graph,
                                 const RamanujanOptions& opt = {});

struct RamanujanLayerReport {
  u32 position = 0;     // index into the mask's weighted-layer order
  u32 layer_index = 0;  // architecture layer index
  double density = 0.0;
  RamanujanValues values;  // metric fields meaningful only when feasible
};

struct RamanujanReport {
  std::string arch;
  Encoding encoding = Encoding::Rolled;
  std::vector<RamanujanLayerReport> layers;
};

RamanujanReport ramanujan_report(const ArchitectureSpec& spec, const SparseMask& mask,
                                 Encoding encoding, const RamanujanOptions& opt = {},
                                 u32 workers = 0);

std::string ramanujan_json(const RamanujanReport& r);

// Per-layer metric-vs-density correlation after scaling every series by its
// sum. Uses feasible layers only.
struct CorrelationReport {
  std::vector<u32> positions;  // feasible layer positions
  std::vector<double> density, delta_r, delta_r_imdb, lambda_imsg;  // sum-scaled
  double r_delta_r = 0.0, r_imdb = 0.0, r_imsg = 0.0;
  bool r_delta_r_defined = false, r_imdb_defined = false, r_imsg_defined = false;
};

CorrelationReport density_correlation_study(const ArchitectureSpec& spec, const SparseMask& mask,
                                            Encoding encoding, const RamanujanOptions& opt = {},
                                            u32 workers = 0);

std::string correlation_csv(const CorrelationReport& r);
std::string correlation_json(const CorrelationReport& r);

// Pearson correlation; defined=false when either side has no variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y, bool* defined = nullptr);

}  // namespace snntopo
