#pragma once
// Sparse binary masks over the weighted layers of an architecture, the three
// random pruning schemes (uniform, ER, ERK), optional weight attachment, and
// the on-disk container.

#include <string>
#include <vector>

#include "archspec.hpp"
#include "common.hpp"

namespace snntopo {

struct MaskLayer {
  u32 layer_index = 0;          // index into ArchitectureSpec::layers
  std::vector<u64> dims;        // weight tensor dims (layer_weight_dims order)
  std::vector<u64> indices;     // surviving flat indices, sorted ascending
  std::vector<double> weights;  // empty, or one finite nonzero value per index

  u64 size() const {
    u64 n = 1;
    for (u64 d : dims) n *= d;
    return n;
  }
  u64 nnz() const { return indices.size(); }
  double density() const { return size() == 0 ? 0.0 : static_cast<double>(nnz()) / size(); }
};

struct SparseMask {
  std::string arch_name;
  std::string method;  // uniform | er | erk | external
  double sparsity = 0.0;
  u64 seed = 0;
  std::vector<MaskLayer> layers;  // one per weighted layer, in weighted order

  bool has_weights() const { return !layers.empty() && !layers[0].weights.empty(); }
  u64 total_size() const;
  u64 total_nnz() const;
};

struct MaskGenOptions {
  // Layers listed here are kept dense and excluded from the sparsity budget.
  std::vector<u32> frozen_layers;
};

// Per-layer sparsity: each layer keeps exactly round((1-s) * |W_l|) weights.
SparseMask generate_uniform(const ArchitectureSpec& spec, double sparsity, u64 seed,
                            const MaskGenOptions& opt = {});

// Global budget round((1-s) * total) split proportionally to per-layer keep
// factors (ER: channel harmonic term; ERK adds kernel dims), with iterative
// cap-at-1 rescaling and largest-remainder apportionment so the global count
// is exact.
SparseMask generate_er(const ArchitectureSpec& spec, double sparsity, u64 seed,
                       const MaskGenOptions& opt = {});
SparseMask generate_erk(const ArchitectureSpec& spec, double sparsity, u64 seed,
                        const MaskGenOptions& opt = {});

SparseMask generate_mask(const ArchitectureSpec& spec, const std::string& method, double sparsity,
                         u64 seed, const MaskGenOptions& opt = {});

enum class WeightInit { GaussianFanIn, UnitMagnitude };

// Fills weights on a binary mask; errors if weights are already present.
void attach_weights(SparseMask& mask, const ArchitectureSpec& spec, WeightInit init, u64 seed);

// Structural consistency against the architecture; throws on violation.
void validate_mask(const SparseMask& mask, const ArchitectureSpec& spec);

// Per-layer and overall densities plus warnings (empty layers, saturated
// layers). JSON text.
std::string density_report(const SparseMask& mask, const ArchitectureSpec& spec);

// Binary container (path) plus JSON sidecar (path + ".json").
void save_mask(const SparseMask& mask, const std::string& path);
SparseMask load_mask(const std::string& path);

}  // namespace snntopo
