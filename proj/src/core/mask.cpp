#include "mask.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "binio.hpp"
#include "json.hpp"

namespace snntopo {

using njson = nlohmann::ordered_json;

u64 SparseMask::total_size() const {
  u64 n = 0;
  for (const auto& l : layers) n += l.size();
  return n;
}

u64 SparseMask::total_nnz() const {
  u64 n = 0;
  for (const auto& l : layers) n += l.nnz();
  return n;
}

namespace {

struct LayerPlan {
  u32 layer_index = 0;
  u64 size = 0;
  double keep_factor = 0.0;  // per-weight keep probability up to the global scale
  bool frozen = false;
  u64 count = 0;
  double fraction = 0.0;  // fractional remainder used by apportionment
};

bool is_frozen(const MaskGenOptions& opt, u32 layer_index) {
  return std::find(opt.frozen_layers.begin(), opt.frozen_layers.end(), layer_index) !=
         opt.frozen_layers.end();
}

std::vector<LayerPlan> weighted_plan(const ArchitectureSpec& spec, const MaskGenOptions& opt) {
  std::vector<LayerPlan> plan;
  for (u32 li : spec.weighted) {
    LayerPlan p;
    p.layer_index = li;
    u64 n = 1;
    for (u64 d : layer_weight_dims(spec.layers[li])) n *= d;
    p.size = n;
    p.frozen = is_frozen(opt, li);
    plan.push_back(p);
  }
  return plan;
}

double er_factor(const LayerSpec& l) {
  double fan_in, fan_out;
  if (l.kind == LayerKind::Linear) {
    fan_in = static_cast<double>(l.n_in);
    fan_out = static_cast<double>(l.n_out);
  } else {
    fan_in = static_cast<double>(l.c_in);
    fan_out = static_cast<double>(l.c_out);
  }
  return (fan_in + fan_out) / (fan_in * fan_out);
}

double erk_factor(const LayerSpec& l) {
  if (l.kind == LayerKind::Linear) return er_factor(l);
  double ci = l.c_in, co = l.c_out;
  double kh = l.kind == LayerKind::Conv ? l.kh : 1.0;
  double kw = l.kind == LayerKind::Conv ? l.kw : 1.0;
  return (ci + co + kh + kw) / (ci * co * kh * kw);
}

// Finds the global scale so that sum over layers of min(1, scale*factor)*size
// equals the budget, capping saturated layers and re-solving on the rest.
void solve_budget(std::vector<LayerPlan>& plan, u64 budget) {
  u64 capacity = 0;
  for (auto& p : plan)
    if (!p.frozen) capacity += p.size;
  require(budget <= capacity, errc::invalid_argument, "sparsity budget exceeds layer capacity");

  std::vector<size_t> active;
  for (size_t i = 0; i < plan.size(); ++i)
    if (!plan[i].frozen) active.push_back(i);
  u64 capped_total = 0;
  for (;;) {
    long double denom = 0.0L;
    for (size_t i : active) denom += static_cast<long double>(plan[i].keep_factor) * plan[i].size;
    if (active.empty() || denom == 0.0L) break;
    long double scale = (static_cast<long double>(budget) - capped_total) / denom;
    std::vector<size_t> still;
    bool capped_any = false;
    for (size_t i : active) {
      if (scale * plan[i].keep_factor >= 1.0L) {
        plan[i].count = plan[i].size;
        plan[i].fraction = 0.0;
        capped_total += plan[i].size;
        capped_any = true;
      } else {
        still.push_back(i);
      }
    }
    if (!capped_any) {
      for (size_t i : active) {
        long double real = scale * plan[i].keep_factor * plan[i].size;
        plan[i].count = static_cast<u64>(real);
        plan[i].fraction = static_cast<double>(real - plan[i].count);
      }
      break;
    }
    active = std::move(still);
  }

  // Largest-remainder apportionment: make the global count exact.
  i64 have = 0;
  for (const auto& p : plan)
    if (!p.frozen) have += static_cast<i64>(p.count);
  i64 deficit = static_cast<i64>(budget) - have;
  std::vector<size_t> order;
  for (size_t i = 0; i < plan.size(); ++i)
    if (!plan[i].frozen) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return plan[a].fraction > plan[b].fraction;  // ties keep lower position first
  });
  while (deficit > 0) {
    bool moved = false;
    for (size_t i : order) {
      if (deficit == 0) break;
      if (plan[i].count < plan[i].size) {
        ++plan[i].count;
        --deficit;
        moved = true;
      }
    }
    require(moved, errc::numeric_error, "budget apportionment failed to converge");
  }
  while (deficit < 0) {
    bool moved = false;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (deficit == 0) break;
      if (plan[*it].count > 0) {
        --plan[*it].count;
        ++deficit;
        moved = true;
      }
    }
    require(moved, errc::numeric_error, "budget apportionment failed to converge");
  }
}

SparseMask realize(const ArchitectureSpec& spec, std::vector<LayerPlan>& plan,
                   const std::string& method, double sparsity, u64 seed) {
  SparseMask mask;
  mask.arch_name = spec.name;
  mask.method = method;
  mask.sparsity = sparsity;
  mask.seed = seed;
  Rng root(seed);
  for (size_t pos = 0; pos < plan.size(); ++pos) {
    LayerPlan& p = plan[pos];
    MaskLayer l;
    l.layer_index = p.layer_index;
    l.dims = layer_weight_dims(spec.layers[p.layer_index]);
    Rng layer_rng = root.fork(pos);
    l.indices = sample_distinct(p.size, p.count, layer_rng);
    mask.layers.push_back(std::move(l));
  }
  return mask;
}

void check_sparsity(double s) {
  require(s >= 0.0 && s < 1.0, errc::invalid_argument,
          "sparsity must lie in [0, 1); got " + std::to_string(s));
}

}  // namespace

SparseMask generate_uniform(const ArchitectureSpec& spec, double sparsity, u64 seed,
                            const MaskGenOptions& opt) {
  check_sparsity(sparsity);
  auto plan = weighted_plan(spec, opt);
  for (auto& p : plan) {
    p.count = p.frozen ? p.size
                       : static_cast<u64>(std::llround((1.0 - sparsity) * static_cast<double>(p.size)));
  }
  return realize(spec, plan, "uniform", sparsity, seed);
}

static SparseMask generate_scaled(const ArchitectureSpec& spec, double sparsity, u64 seed,
                                  const MaskGenOptions& opt, const std::string& method,
                                  double (*factor)(const LayerSpec&)) {
  check_sparsity(sparsity);
  auto plan = weighted_plan(spec, opt);
  u64 total = 0, frozen_total = 0;
  for (auto& p : plan) {
    p.keep_factor = factor(spec.layers[p.layer_index]);
    total += p.size;
    if (p.frozen) {
      p.count = p.size;
      frozen_total += p.size;
    }
  }
  u64 global = static_cast<u64>(std::llround((1.0 - sparsity) * static_cast<double>(total)));
  u64 budget = global > frozen_total ? global - frozen_total : 0;
  budget = std::min(budget, total - frozen_total);
  solve_budget(plan, budget);
  return realize(spec, plan, method, sparsity, seed);
}

SparseMask generate_er(const ArchitectureSpec& spec, double sparsity, u64 seed,
                       const MaskGenOptions& opt) {
  return generate_scaled(spec, sparsity, seed, opt, "er", er_factor);
}

SparseMask generate_erk(const ArchitectureSpec& spec, double sparsity, u64 seed,
                        const MaskGenOptions& opt) {
  return generate_scaled(spec, sparsity, seed, opt, "erk", erk_factor);
}

SparseMask generate_mask(const ArchitectureSpec& spec, const std::string& method, double sparsity,
                         u64 seed, const MaskGenOptions& opt) {
  if (method == "uniform") return generate_uniform(spec, sparsity, seed, opt);
  if (method == "er") return generate_er(spec, sparsity, seed, opt);
  if (method == "erk") return generate_erk(spec, sparsity, seed, opt);
  fail(errc::invalid_argument, "unknown mask method '" + method + "'");
}

void attach_weights(SparseMask& mask, const ArchitectureSpec& spec, WeightInit init, u64 seed) {
  require(!mask.has_weights(), errc::state_error, "mask already carries weights");
  validate_mask(mask, spec);
  Rng root(seed);
  for (size_t pos = 0; pos < mask.layers.size(); ++pos) {
    MaskLayer& l = mask.layers[pos];
    const LayerSpec& ls = spec.layers[l.layer_index];
    double std_dev = 1.0;
    if (init == WeightInit::GaussianFanIn) {
      double fan_in;
      switch (ls.kind) {
        case LayerKind::Linear:
          fan_in = static_cast<double>(ls.n_in);
          break;
        case LayerKind::Conv:
          fan_in = static_cast<double>(ls.c_in) * ls.kh * ls.kw;
          break;
        default:
          fan_in = static_cast<double>(ls.c_in);
          break;
      }
      std_dev = std::sqrt(2.0 / fan_in);
    }
    Rng rng = root.fork(pos);
    l.weights.resize(l.indices.size());
    for (auto& w : l.weights) {
      if (init == WeightInit::UnitMagnitude) {
        w = 1.0;
        continue;
      }
      do {
        w = std_dev * rng.gaussian();
      } while (w == 0.0);
    }
  }
}

void validate_mask(const SparseMask& mask, const ArchitectureSpec& spec) {
  require(mask.layers.size() == spec.weighted.size(), errc::shape_mismatch,
          "mask has " + std::to_string(mask.layers.size()) + " layers, architecture expects " +
              std::to_string(spec.weighted.size()));
  for (size_t pos = 0; pos < mask.layers.size(); ++pos) {
    const MaskLayer& l = mask.layers[pos];
    std::string tag = "mask layer " + std::to_string(pos);
    require(l.layer_index == spec.weighted[pos], errc::shape_mismatch,
            tag + ": layer index does not follow the architecture's weighted order");
    require(l.dims == layer_weight_dims(spec.layers[l.layer_index]), errc::shape_mismatch,
            tag + ": weight dims do not match the architecture");
    u64 size = l.size();
    u64 prev = 0;
    bool first = true;
    for (u64 idx : l.indices) {
      require(idx < size, errc::invalid_argument, tag + ": index out of range");
      require(first || idx > prev, errc::invalid_argument, tag + ": indices not sorted unique");
      prev = idx;
      first = false;
    }
    if (!l.weights.empty()) {
      require(l.weights.size() == l.indices.size(), errc::shape_mismatch,
              tag + ": weight count does not match index count");
      for (double w : l.weights) {
        require(std::isfinite(w) && w != 0.0, errc::invalid_argument,
                tag + ": weights must be finite and nonzero");
      }
    }
  }
}

std::string density_report(const SparseMask& mask, const ArchitectureSpec& spec) {
  validate_mask(mask, spec);
  njson j;
  j["architecture"] = mask.arch_name;
  j["method"] = mask.method;
  j["sparsity_target"] = mask.sparsity;
  j["seed"] = mask.seed;
  j["total_weights"] = mask.total_size();
  j["surviving_weights"] = mask.total_nnz();
  j["overall_density"] =
      mask.total_size() == 0 ? 0.0 : static_cast<double>(mask.total_nnz()) / mask.total_size();
  j["has_weights"] = mask.has_weights();
  j["layers"] = njson::array();
  std::vector<std::string> warnings;
  static const char* kind_names[] = {"conv", "pool", "linear", "residual"};
  for (size_t pos = 0; pos < mask.layers.size(); ++pos) {
    const MaskLayer& l = mask.layers[pos];
    njson e;
    e["layer_index"] = l.layer_index;
    e["kind"] = kind_names[static_cast<int>(spec.layers[l.layer_index].kind)];
    e["size"] = l.size();
    e["nnz"] = l.nnz();
    e["density"] = l.density();
    e["saturated"] = l.nnz() == l.size();
    j["layers"].push_back(std::move(e));
    if (l.nnz() == 0) {
      warnings.push_back("layer " + std::to_string(l.layer_index) + " has zero surviving weights");
    }
  }
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

static constexpr char kMaskMagic[8] = {'S', 'N', 'N', 'M', 'A', 'S', 'K', '1'};

void save_mask(const SparseMask& mask, const std::string& path) {
  BinWriter w(path);
  w.bytes(kMaskMagic, 8);
  w.u32v(1);  // container version
  w.str(mask.arch_name);
  w.str(mask.method);
  w.f64(mask.sparsity);
  w.u64v(mask.seed);
  w.u32v(static_cast<u32>(mask.layers.size()));
  for (const auto& l : mask.layers) {
    w.u32v(l.layer_index);
    w.u32v(static_cast<u32>(l.dims.size()));
    w.u64s(l.dims);
    w.u64v(l.nnz());
    w.u8(l.weights.empty() ? 0 : 1);
    w.u64s(l.indices);
    w.f64s(l.weights);
  }
  w.close();

  njson side;
  side["format"] = "snnmask";
  side["version"] = 1;
  side["architecture"] = mask.arch_name;
  side["method"] = mask.method;
  side["sparsity_target"] = mask.sparsity;
  side["seed"] = mask.seed;
  side["total_weights"] = mask.total_size();
  side["surviving_weights"] = mask.total_nnz();
  side["has_weights"] = mask.has_weights();
  side["layers"] = njson::array();
  for (const auto& l : mask.layers) {
    njson e;
    e["layer_index"] = l.layer_index;
    e["dims"] = l.dims;
    e["nnz"] = l.nnz();
    e["density"] = l.density();
    side["layers"].push_back(std::move(e));
  }
  std::ofstream sf(path + ".json", std::ios::binary);
  require(sf.good(), errc::io_error, "cannot write sidecar for " + path);
  sf << side.dump(2) << "\n";
}

SparseMask load_mask(const std::string& path) {
  BinReader r(path);
  char magic[8];
  r.bytes(magic, 8);
  require(std::memcmp(magic, kMaskMagic, 8) == 0, errc::parse_error,
          path + ": not a mask container");
  u32 version = r.read_u32();
  require(version == 1, errc::parse_error, path + ": unsupported container version");
  SparseMask mask;
  mask.arch_name = r.read_str();
  mask.method = r.read_str();
  mask.sparsity = r.read_f64();
  mask.seed = r.read_u64();
  u32 n_layers = r.read_u32();
  require(n_layers <= 1u << 16, errc::parse_error, path + ": implausible layer count");
  for (u32 i = 0; i < n_layers; ++i) {
    MaskLayer l;
    l.layer_index = r.read_u32();
    u32 ndims = r.read_u32();
    require(ndims >= 1 && ndims <= 8, errc::parse_error, path + ": implausible dim count");
    l.dims = r.read_u64s(ndims);
    u64 nnz = r.read_u64();
    require(nnz <= l.size(), errc::parse_error, path + ": nnz exceeds layer size");
    bool has_w = r.read_u8() != 0;
    l.indices = r.read_u64s(nnz);
    if (has_w) l.weights = r.read_f64s(nnz);
    mask.layers.push_back(std::move(l));
  }
  return mask;
}

}  // namespace snntopo
