#pragma once
// Sixteen graph metrics over a multipartite network encoding, grouped into
// local / neighbor / strength / global / expansion families. Counts carry a
// raw twin next to the normalized value; means and spectral values are
// reported as-is with the node/edge totals alongside.

#include <string>
#include <vector>

#include "graph.hpp"

namespace snntopo {

struct MetricValue {
  double value = 0.0;  // normalized (counts) or the mean / spectral value
  double raw = 0.0;    // unnormalized count or sum
};

struct TopometricVector {
  MetricValue sink, source, disconnected, r_out, r_in;
  MetricValue n1, n2, motif4;
  MetricValue kcore, strength;
  MetricValue components, c_avg, cut_edges, cut_nodes;
  MetricValue spectral_gap, spectral_radius;

  u64 n_nodes = 0;  // totals used for normalization
  u64 n_edges = 0;
  bool padding_excluded = false;
  bool spectral_converged = true;
  u32 motif_size = 4;
  double motif_sample_fraction = 1.0;  // < 1 when the census was sampled
  u32 groups_computed = 0;             // bitmask of MetricGroup
};

enum class MetricGroup : u32 {
  Local = 1,
  Neighbor = 2,
  Strength = 4,
  Global = 8,
  Expansion = 16,
  All = 31,
};

struct MetricsConfig {
  u32 groups = static_cast<u32>(MetricGroup::All);
  bool exclude_padding = false;
  u32 workers = 0;  // 0: hardware concurrency
  u32 motif_size = 4;
  u64 motif_budget = 20'000'000;  // work bound before the census switches to sampling
  u64 seed = 1;
  double spectral_tol = 1e-8;
  u32 spectral_max_iter = 0;
};

TopometricVector compute_topometrics(const MultipartiteGraph& g, const MetricsConfig& cfg = {});

// canonical feature order shared by the analysis and ranking stages
const std::vector<std::string>& topometric_names();
std::vector<double> topometric_values(const TopometricVector& v);  // normalized, name order
std::vector<double> topometric_raw_values(const TopometricVector& v);

std::string topometrics_json(const TopometricVector& v);
std::string topometrics_csv_header();
std::string topometrics_csv_row(const std::string& label, const TopometricVector& v);

u32 parse_metric_groups(const std::vector<std::string>& names);  // "local", "neighbor", ...

// Core number per node on the simple view (bucket peeling).
std::vector<u32> core_numbers(const UndirectedView& u);

}  // namespace snntopo
