#include "encoder.hpp"

#include <algorithm>
#include <optional>

namespace snntopo {

Encoding encoding_from_name(const std::string& name) {
  if (name == "unrolled") return Encoding::Unrolled;
  if (name == "rolled") return Encoding::Rolled;
  if (name == "rolled-channel" || name == "rolled_channel") return Encoding::RolledChannel;
  fail(errc::invalid_argument, "unknown encoding '" + name + "'");
}

namespace {

void check_mask_layer(const LayerSpec& layer, const MaskLayer& mask, bool weighted) {
  require(mask.dims == layer_weight_dims(layer), errc::shape_mismatch,
          "mask layer dims do not match the layer");
  require(!weighted || !mask.weights.empty(), errc::state_error,
          "weighted encoding requires an weighted mask");
}

// Maps a padded-grid position to the core-first node layout.
struct PaddedIndexer {
  u32 h, w, pad, ph, pw;
  u32 core_per_channel, border_per_channel, core_total;
  std::vector<u32> border_rank;  // per padded cell; UINT32_MAX on interior

  PaddedIndexer(const Shape& in_raw, u32 padding, u32 channels)
      : h(in_raw.h), w(in_raw.w), pad(padding), ph(h + 2 * padding), pw(w + 2 * padding) {
    core_per_channel = h * w;
    border_per_channel = ph * pw - core_per_channel;
    core_total = core_per_channel * channels;
    border_rank.assign(static_cast<size_t>(ph) * pw, 0xffffffffu);
    u32 rank = 0;
    for (u32 y = 0; y < ph; ++y) {
      for (u32 x = 0; x < pw; ++x) {
        bool interior = y >= pad && y < pad + h && x >= pad && x < pad + w;
        if (!interior) border_rank[static_cast<size_t>(y) * pw + x] = rank++;
      }
    }
  }

  u32 id(u32 ci, u32 y, u32 x) const {
    u32 r = border_rank[static_cast<size_t>(y) * pw + x];
    if (r == 0xffffffffu) {
      return ci * core_per_channel + (y - pad) * w + (x - pad);
    }
    return core_total + ci * border_per_channel + r;
  }
};

}  // namespace

BipartiteGraph encode_conv(const Shape& in_raw, const LayerSpec& layer, const MaskLayer& mask,
                           bool weighted) {
  require(layer.kind == LayerKind::Conv, errc::invalid_argument, "encode_conv expects a conv layer");
  require(in_raw.c == layer.c_in, errc::shape_mismatch, "input channels do not match layer");
  check_mask_layer(layer, mask, weighted);
  u32 ph = in_raw.h + 2 * layer.padding, pw = in_raw.w + 2 * layer.padding;
  require(ph >= layer.kh && pw >= layer.kw, errc::shape_mismatch, "kernel exceeds padded input");
  u32 oh = (ph - layer.kh) / layer.stride + 1;
  u32 ow = (pw - layer.kw) / layer.stride + 1;

  u64 left_total = static_cast<u64>(ph) * pw * layer.c_in;
  u64 right_total = static_cast<u64>(oh) * ow * layer.c_out;
  require(left_total <= 0xffffffffull && right_total <= 0xffffffffull, errc::unsupported,
          "layer too large for 32-bit ids");
  BipartiteGraph bg;
  bg.weighted = weighted;
  bg.n_left = static_cast<u32>(left_total);
  bg.left_core = static_cast<u32>(in_raw.count());
  bg.n_right = static_cast<u32>(right_total);

  PaddedIndexer ix(in_raw, layer.padding, layer.c_in);
  u64 steps = static_cast<u64>(oh) * ow;
  bg.src.reserve(mask.nnz() * steps);
  bg.dst.reserve(mask.nnz() * steps);
  if (weighted) bg.w.reserve(mask.nnz() * steps);

  u32 khw = layer.kh * layer.kw;
  u32 kin = layer.c_in * khw;
  for (u64 e = 0; e < mask.nnz(); ++e) {
    u64 f = mask.indices[e];
    u32 co = static_cast<u32>(f / kin);
    u32 rem = static_cast<u32>(f % kin);
    u32 ci = rem / khw;
    u32 kr = rem % khw;
    u32 ky = kr / layer.kw;
    u32 kx = kr % layer.kw;
    double wv = weighted ? mask.weights[e] : 0.0;
    u32 b_base = co * oh * ow;
    for (u32 oy = 0; oy < oh; ++oy) {
      u32 y = oy * layer.stride + ky;
      for (u32 ox = 0; ox < ow; ++ox) {
        u32 x = ox * layer.stride + kx;
        u32 a = ix.id(ci, y, x);
        u32 b = b_base + oy * ow + ox;
        if (weighted) {
          bg.add_edge(a, b, wv);
        } else {
          bg.add_edge(a, b);
        }
      }
    }
  }
  return bg;
}

BipartiteGraph encode_linear(const LayerSpec& layer, const MaskLayer& mask, bool weighted) {
  require(layer.kind == LayerKind::Linear, errc::invalid_argument,
          "encode_linear expects a linear layer");
  check_mask_layer(layer, mask, weighted);
  require(layer.n_in <= 0xffffffffull && layer.n_out <= 0xffffffffull, errc::unsupported,
          "layer too large for 32-bit ids");
  BipartiteGraph bg;
  bg.weighted = weighted;
  bg.n_left = bg.left_core = static_cast<u32>(layer.n_in);
  bg.n_right = static_cast<u32>(layer.n_out);
  for (u64 e = 0; e < mask.nnz(); ++e) {
    u64 f = mask.indices[e];
    u32 a = static_cast<u32>(f / layer.n_out);
    u32 b = static_cast<u32>(f % layer.n_out);
    if (weighted) {
      bg.add_edge(a, b, mask.weights[e]);
    } else {
      bg.add_edge(a, b);
    }
  }
  return bg;
}

BipartiteGraph encode_rolled(const LayerSpec& layer, const MaskLayer& mask, bool weighted) {
  if (layer.kind == LayerKind::Linear) return encode_linear(layer, mask, weighted);
  check_mask_layer(layer, mask, weighted);
  u32 kh = layer.kind == LayerKind::Conv ? layer.kh : 1;
  u32 kw = layer.kind == LayerKind::Conv ? layer.kw : 1;
  BipartiteGraph bg;
  bg.weighted = weighted;
  bg.n_left = bg.left_core = layer.c_in * kh * kw;
  bg.n_right = layer.c_out;
  u32 khw = kh * kw;
  u32 kin = layer.c_in * khw;
  for (u64 e = 0; e < mask.nnz(); ++e) {
    u64 f = mask.indices[e];
    u32 co = static_cast<u32>(f / kin);
    u32 rem = static_cast<u32>(f % kin);
    if (weighted) {
      bg.add_edge(rem, co, mask.weights[e]);
    } else {
      bg.add_edge(rem, co);
    }
  }
  return bg;
}

BipartiteGraph encode_rolled_channel(const LayerSpec& layer, const MaskLayer& mask,
                                     bool weighted) {
  if (layer.kind == LayerKind::Linear) return encode_linear(layer, mask, weighted);
  check_mask_layer(layer, mask, weighted);
  u32 kh = layer.kind == LayerKind::Conv ? layer.kh : 1;
  u32 kw = layer.kind == LayerKind::Conv ? layer.kw : 1;
  BipartiteGraph bg;
  bg.weighted = weighted;
  bg.n_left = bg.left_core = layer.c_in;
  bg.n_right = layer.c_out;
  u32 khw = kh * kw;
  u32 kin = layer.c_in * khw;
  std::vector<double> acc(static_cast<size_t>(layer.c_in) * layer.c_out, 0.0);
  std::vector<u8> present(acc.size(), 0);
  for (u64 e = 0; e < mask.nnz(); ++e) {
    u64 f = mask.indices[e];
    u32 co = static_cast<u32>(f / kin);
    u32 ci = static_cast<u32>(f % kin) / khw;
    size_t slot = static_cast<size_t>(ci) * layer.c_out + co;
    present[slot] = 1;
    if (weighted) acc[slot] += std::abs(mask.weights[e]);
  }
  for (u32 ci = 0; ci < layer.c_in; ++ci) {
    for (u32 co = 0; co < layer.c_out; ++co) {
      size_t slot = static_cast<size_t>(ci) * layer.c_out + co;
      if (!present[slot]) continue;
      if (weighted) {
        bg.add_edge(ci, co, acc[slot]);
      } else {
        bg.add_edge(ci, co);
      }
    }
  }
  return bg;
}

BipartiteGraph pooling_bridge(const BipartiteGraph& next, const LayerSpec& pool,
                              const Shape& pre_pool) {
  require(pool.kind == LayerKind::Pool, errc::invalid_argument, "pooling_bridge expects a pool");
  u32 h = pre_pool.h, w = pre_pool.w, c = pre_pool.c;
  require(h >= pool.win_h && w >= pool.win_w, errc::shape_mismatch,
          "pooling window exceeds input");
  u32 oh = (h - pool.win_h) / pool.stride + 1;
  u32 ow = (w - pool.win_w) / pool.stride + 1;
  require(next.left_core == oh * ow * c, errc::shape_mismatch,
          "layer graph does not sit on the pooled grid");

  BipartiteGraph bg;
  bg.weighted = next.weighted;
  bg.left_core = static_cast<u32>(pre_pool.count());
  bg.n_left = bg.left_core + (next.n_left - next.left_core);
  bg.n_right = next.n_right;
  u32 window = pool.win_h * pool.win_w;
  bg.src.reserve(next.n_edges() * window);
  bg.dst.reserve(next.n_edges() * window);
  if (bg.weighted) bg.w.reserve(next.n_edges() * window);

  u32 pooled_per_channel = oh * ow;
  for (u64 e = 0; e < next.n_edges(); ++e) {
    u32 u = next.src[e];
    u32 v = next.dst[e];
    double wv = bg.weighted ? next.w[e] : 0.0;
    if (u >= next.left_core) {  // padding node: passes through unreplicated
      u32 a = bg.left_core + (u - next.left_core);
      if (bg.weighted) {
        bg.add_edge(a, v, wv);
      } else {
        bg.add_edge(a, v);
      }
      continue;
    }
    u32 ci = u / pooled_per_channel;
    u32 rem = u % pooled_per_channel;
    u32 py = rem / ow;
    u32 px = rem % ow;
    for (u32 dy = 0; dy < pool.win_h; ++dy) {
      u32 y = py * pool.stride + dy;
      for (u32 dx = 0; dx < pool.win_w; ++dx) {
        u32 x = px * pool.stride + dx;
        u32 a = ci * h * w + y * w + x;
        if (bg.weighted) {
          bg.add_edge(a, v, wv);
        } else {
          bg.add_edge(a, v);
        }
      }
    }
  }
  return bg;
}

BipartiteGraph residual_identity(const Shape& shape, bool weighted) {
  BipartiteGraph bg;
  bg.weighted = weighted;
  u64 n = shape.count();
  require(n <= 0xffffffffull, errc::unsupported, "layer too large for 32-bit ids");
  bg.n_left = bg.left_core = static_cast<u32>(n);
  bg.n_right = static_cast<u32>(n);
  for (u32 i = 0; i < n; ++i) {
    if (weighted) {
      bg.add_edge(i, i, 1.0);
    } else {
      bg.add_edge(i, i);
    }
  }
  return bg;
}

BipartiteGraph residual_projection(const Shape& src, const Shape& dst, u32 stride,
                                   const MaskLayer& mask, bool weighted) {
  require(!weighted || !mask.weights.empty(), errc::state_error,
          "weighted encoding requires an weighted mask");
  require(stride >= 1 && src.h == dst.h * stride && src.w == dst.w * stride, errc::shape_mismatch,
          "projection stride does not map source onto target");
  BipartiteGraph bg;
  bg.weighted = weighted;
  bg.n_left = bg.left_core = static_cast<u32>(src.count());
  bg.n_right = static_cast<u32>(dst.count());
  u32 per_in = src.h * src.w;
  u32 per_out = dst.h * dst.w;
  for (u64 e = 0; e < mask.nnz(); ++e) {
    u64 f = mask.indices[e];
    u32 co = static_cast<u32>(f / src.c);
    u32 ci = static_cast<u32>(f % src.c);
    double wv = weighted ? mask.weights[e] : 0.0;
    for (u32 oy = 0; oy < dst.h; ++oy) {
      for (u32 ox = 0; ox < dst.w; ++ox) {
        u32 a = ci * per_in + (oy * stride) * src.w + ox * stride;
        u32 b = co * per_out + oy * dst.w + ox;
        if (weighted) {
          bg.add_edge(a, b, wv);
        } else {
          bg.add_edge(a, b);
        }
      }
    }
  }
  return bg;
}

MultipartiteGraph encode_layer_graph(const ArchitectureSpec& spec, const SparseMask& mask,
                                     size_t weighted_pos, Encoding encoding, bool weighted) {
  validate_mask(mask, spec);
  require(weighted_pos < spec.weighted.size(), errc::invalid_argument,
          "weighted layer position out of range");
  u32 li = spec.weighted[weighted_pos];
  const LayerSpec& layer = spec.layers[li];
  const MaskLayer& ml = mask.layers[weighted_pos];
  BipartiteGraph bg;
  if (layer.kind == LayerKind::Residual) {
    const Shape& src = spec.in_shape[layer.source];
    const Shape& dst = spec.out_shape[layer.target];
    if (encoding == Encoding::Unrolled) {
      bg = residual_projection(src, dst, residual_stride(spec, li), ml, weighted);
    } else {
      LayerSpec as_conv;
      as_conv.kind = LayerKind::Conv;
      as_conv.c_in = layer.c_in;
      as_conv.c_out = layer.c_out;
      as_conv.kh = as_conv.kw = 1;
      MaskLayer conv_mask = ml;
      conv_mask.dims = {layer.c_out, layer.c_in, 1, 1};
      bg = encoding == Encoding::Rolled ? encode_rolled(as_conv, conv_mask, weighted)
                                        : encode_rolled_channel(as_conv, conv_mask, weighted);
    }
  } else if (layer.kind == LayerKind::Linear) {
    bg = encode_linear(layer, ml, weighted);
  } else {
    switch (encoding) {
      case Encoding::Unrolled:
        bg = encode_conv(spec.in_shape[li], layer, ml, weighted);
        break;
      case Encoding::Rolled:
        bg = encode_rolled(layer, ml, weighted);
        break;
      case Encoding::RolledChannel:
        bg = encode_rolled_channel(layer, ml, weighted);
        break;
    }
  }
  return to_multipartite(bg);
}

MultipartiteGraph build_mge(const ArchitectureSpec& spec, const SparseMask& mask, bool weighted) {
  validate_mask(mask, spec);
  require(!weighted || mask.has_weights(), errc::state_error,
          "weighted graph requires an weighted mask");
  GraphBuilder b(weighted);
  require(spec.input.count() <= 0xffffffffull, errc::unsupported, "input too large");
  u32 last_p = b.add_partition(static_cast<u32>(spec.input.count()));

  std::optional<u32> pending_pool;
  std::vector<std::pair<u32, u32>> layer_parts(spec.layers.size(), {0, 0});
  std::vector<size_t> mask_pos(spec.layers.size(), SIZE_MAX);
  for (size_t pos = 0; pos < spec.weighted.size(); ++pos) mask_pos[spec.weighted[pos]] = pos;

  for (u32 i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    switch (l.kind) {
      case LayerKind::Pool:
        require(!pending_pool, errc::unsupported, "consecutive pooling layers are unsupported");
        pending_pool = i;
        break;
      case LayerKind::Conv:
      case LayerKind::Linear: {
        const MaskLayer& ml = mask.layers[mask_pos[i]];
        BipartiteGraph bg = l.kind == LayerKind::Conv
                                ? encode_conv(spec.in_shape[i], l, ml, weighted)
                                : encode_linear(l, ml, weighted);
        if (pending_pool) {
          const LayerSpec& pool = spec.layers[*pending_pool];
          bg = pooling_bridge(bg, pool, spec.in_shape[*pending_pool]);
          pending_pool.reset();
        }
        b.set_partition_pad(last_p, bg.n_left - bg.left_core);
        u32 next_p = b.add_partition(bg.n_right);
        b.add_layer_edges(last_p, next_p, bg);
        layer_parts[i] = {last_p, next_p};
        last_p = next_p;
        break;
      }
      case LayerKind::Residual: {
        require(!pending_pool, errc::unsupported, "pooling inside a residual block");
        u32 from = layer_parts[l.source].first;
        u32 to = layer_parts[l.target].second;
        BipartiteGraph bg;
        if (l.shortcut == ShortcutKind::Identity) {
          bg = residual_identity(spec.in_shape[l.source], weighted);
        } else {
          bg = residual_projection(spec.in_shape[l.source], spec.out_shape[l.target],
                                   residual_stride(spec, i), mask.layers[mask_pos[i]], weighted);
        }
        b.add_residual_edges(from, to, bg);
        break;
      }
    }
  }
  require(!pending_pool, errc::unsupported, "trailing pooling layer has no consumer");
  return b.finish();
}

}  // namespace snntopo
