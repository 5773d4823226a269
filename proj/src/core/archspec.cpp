#include "archspec.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace snntopo {

using njson = nlohmann::ordered_json;

static std::string layer_tag(u32 i) { return "layer " + std::to_string(i); }

u64 layer_param_count(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::Conv:
      return static_cast<u64>(l.c_in) * l.c_out * l.kh * l.kw;
    case LayerKind::Linear:
      return l.n_in * l.n_out;
    case LayerKind::Residual:
      return l.shortcut == ShortcutKind::Projection ? static_cast<u64>(l.c_in) * l.c_out : 0;
    default:
      return 0;
  }
}

u64 total_param_count(const ArchitectureSpec& spec) {
  u64 total = 0;
  for (const auto& l : spec.layers) total += layer_param_count(l);
  return total;
}

std::vector<u64> layer_weight_dims(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::Conv:
      return {l.c_out, l.c_in, l.kh, l.kw};
    case LayerKind::Linear:
      return {l.n_in, l.n_out};
    case LayerKind::Residual:
      require(l.shortcut == ShortcutKind::Projection, errc::invalid_argument,
              "identity shortcut carries no weights");
      return {l.c_out, l.c_in, 1, 1};
    default:
      fail(errc::invalid_argument, "layer carries no weights");
  }
}

u32 residual_stride(const ArchitectureSpec& spec, u32 layer_index) {
  require(layer_index < spec.layers.size(), errc::invalid_argument, "residual index out of range");
  const LayerSpec& l = spec.layers[layer_index];
  require(l.kind == LayerKind::Residual, errc::invalid_argument, "not a residual layer");
  if (l.shortcut == ShortcutKind::Identity) return 1;
  const Shape& src = spec.in_shape[l.source];
  const Shape& dst = spec.out_shape[l.target];
  return src.h / dst.h;
}

static Shape conv_output(const Shape& in, const LayerSpec& l, u32 index) {
  require(in.c == l.c_in, errc::shape_mismatch,
          layer_tag(index) + ": expects " + std::to_string(l.c_in) + " input channels, got " +
              std::to_string(in.c));
  u32 ph = in.h + 2 * l.padding;
  u32 pw = in.w + 2 * l.padding;
  require(ph >= l.kh && pw >= l.kw, errc::shape_mismatch,
          layer_tag(index) + ": kernel exceeds padded input");
  Shape out;
  out.h = (ph - l.kh) / l.stride + 1;
  out.w = (pw - l.kw) / l.stride + 1;
  out.c = l.c_out;
  return out;
}

static Shape pool_output(const Shape& in, const LayerSpec& l, u32 index) {
  require(in.h >= l.win_h && in.w >= l.win_w, errc::shape_mismatch,
          layer_tag(index) + ": pooling window exceeds input");
  Shape out;
  out.h = (in.h - l.win_h) / l.stride + 1;
  out.w = (in.w - l.win_w) / l.stride + 1;
  out.c = in.c;
  return out;
}

void validate_architecture(ArchitectureSpec& spec) {
  require(!spec.name.empty(), errc::invalid_argument, "architecture name is empty");
  require(spec.input.h > 0 && spec.input.w > 0 && spec.input.c > 0, errc::invalid_argument,
          "input shape must be positive");
  require(!spec.layers.empty(), errc::invalid_argument, "architecture has no layers");

  spec.in_shape.assign(spec.layers.size(), Shape{});
  spec.out_shape.assign(spec.layers.size(), Shape{});
  spec.weighted.clear();

  Shape cur = spec.input;
  for (u32 i = 0; i < spec.layers.size(); ++i) {
    LayerSpec& l = spec.layers[i];
    spec.in_shape[i] = cur;
    switch (l.kind) {
      case LayerKind::Conv:
        require(l.c_in > 0 && l.c_out > 0 && l.kh > 0 && l.kw > 0 && l.stride > 0,
                errc::invalid_argument, layer_tag(i) + ": conv parameters must be positive");
        cur = conv_output(cur, l, i);
        break;
      case LayerKind::Pool:
        require(l.win_h > 0 && l.win_w > 0 && l.stride > 0, errc::invalid_argument,
                layer_tag(i) + ": pool parameters must be positive");
        cur = pool_output(cur, l, i);
        break;
      case LayerKind::Linear:
        require(l.n_in > 0 && l.n_out > 0, errc::invalid_argument,
                layer_tag(i) + ": linear sizes must be positive");
        require(cur.count() == l.n_in, errc::shape_mismatch,
                layer_tag(i) + ": expects " + std::to_string(l.n_in) + " inputs, got " +
                    std::to_string(cur.count()));
        cur = Shape{1, 1, static_cast<u32>(l.n_out)};
        break;
      case LayerKind::Residual: {
        require(l.source < l.target && l.target < i, errc::invalid_argument,
                layer_tag(i) + ": residual must name earlier layers with source < target");
        require(spec.layers[l.source].kind == LayerKind::Conv &&
                    spec.layers[l.target].kind == LayerKind::Conv,
                errc::invalid_argument, layer_tag(i) + ": residual endpoints must be conv layers");
        // The shortcut spans one block: target is the next weighted layer
        // after source, with nothing pooled in between.
        bool adjacent = false;
        for (u32 j = l.source + 1; j <= l.target; ++j) {
          if (spec.layers[j].has_weights()) {
            adjacent = (j == l.target);
            break;
          }
          require(spec.layers[j].kind != LayerKind::Pool, errc::invalid_argument,
                  layer_tag(i) + ": pooling inside a residual block is unsupported");
        }
        require(adjacent, errc::invalid_argument,
                layer_tag(i) + ": residual endpoints must be consecutive weighted layers");
        const Shape& src = spec.in_shape[l.source];
        const Shape& dst = spec.out_shape[l.target];
        if (l.shortcut == ShortcutKind::Identity) {
          require(src == dst, errc::shape_mismatch,
                  layer_tag(i) + ": identity shortcut requires equal shapes");
        } else {
          require(l.c_in == src.c && l.c_out == dst.c, errc::shape_mismatch,
                  layer_tag(i) + ": projection channels do not match endpoint shapes");
          require(dst.h > 0 && dst.w > 0 && src.h % dst.h == 0 && src.w % dst.w == 0,
                  errc::shape_mismatch, layer_tag(i) + ": projection spatial ratio not integral");
          require(src.h / dst.h == src.w / dst.w, errc::shape_mismatch,
                  layer_tag(i) + ": projection stride differs between axes");
        }
        break;
      }
    }
    spec.out_shape[i] = cur;
    if (l.has_weights()) spec.weighted.push_back(i);
  }
  require(!spec.weighted.empty(), errc::invalid_argument, "architecture has no weighted layers");
}

static LayerSpec layer_from_json(const njson& j, u32 index) {
  LayerSpec l;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "conv") {
    l.kind = LayerKind::Conv;
    l.c_in = j.at("c_in").get<u32>();
    l.c_out = j.at("c_out").get<u32>();
    auto k = j.at("kernel");
    require(k.is_array() && k.size() == 2, errc::parse_error,
            layer_tag(index) + ": kernel must be [kh, kw]");
    l.kh = k[0].get<u32>();
    l.kw = k[1].get<u32>();
    l.stride = j.value("stride", 1u);
    l.padding = j.value("padding", 0u);
  } else if (kind == "pool") {
    l.kind = LayerKind::Pool;
    std::string p = j.at("pool").get<std::string>();
    require(p == "max" || p == "avg", errc::parse_error,
            layer_tag(index) + ": pool must be max or avg");
    l.pool = p == "max" ? PoolKind::Max : PoolKind::Avg;
    auto wnd = j.at("window");
    require(wnd.is_array() && wnd.size() == 2, errc::parse_error,
            layer_tag(index) + ": window must be [h, w]");
    l.win_h = wnd[0].get<u32>();
    l.win_w = wnd[1].get<u32>();
    l.stride = j.value("stride", l.win_h);
  } else if (kind == "linear") {
    l.kind = LayerKind::Linear;
    l.n_in = j.at("n_in").get<u64>();
    l.n_out = j.at("n_out").get<u64>();
  } else if (kind == "residual") {
    l.kind = LayerKind::Residual;
    l.source = j.at("source").get<u32>();
    l.target = j.at("target").get<u32>();
    std::string s = j.at("shortcut").get<std::string>();
    require(s == "identity" || s == "projection", errc::parse_error,
            layer_tag(index) + ": shortcut must be identity or projection");
    l.shortcut = s == "identity" ? ShortcutKind::Identity : ShortcutKind::Projection;
    if (l.shortcut == ShortcutKind::Projection) {
      l.c_in = j.at("c_in").get<u32>();
      l.c_out = j.at("c_out").get<u32>();
    }
  } else {
    fail(errc::parse_error, layer_tag(index) + ": unknown kind '" + kind + "'");
  }
  return l;
}

ArchitectureSpec load_architecture(const std::string& json_text) {
  njson j;
  try {
    j = njson::parse(json_text);
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("architecture JSON: ") + e.what());
  }
  ArchitectureSpec spec;
  try {
    spec.name = j.at("name").get<std::string>();
    auto in = j.at("input");
    require(in.is_array() && in.size() == 3, errc::parse_error, "input must be [h, w, c]");
    spec.input = Shape{in[0].get<u32>(), in[1].get<u32>(), in[2].get<u32>()};
    const auto& layers = j.at("layers");
    require(layers.is_array(), errc::parse_error, "layers must be an array");
    for (u32 i = 0; i < layers.size(); ++i) spec.layers.push_back(layer_from_json(layers[i], i));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("architecture JSON: ") + e.what());
  }
  validate_architecture(spec);
  return spec;
}

ArchitectureSpec load_architecture_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_architecture(ss.str());
}

std::string architecture_to_json(const ArchitectureSpec& spec) {
  njson j;
  j["name"] = spec.name;
  j["input"] = {spec.input.h, spec.input.w, spec.input.c};
  j["layers"] = njson::array();
  for (const auto& l : spec.layers) {
    njson e;
    switch (l.kind) {
      case LayerKind::Conv:
        e["kind"] = "conv";
        e["c_in"] = l.c_in;
        e["c_out"] = l.c_out;
        e["kernel"] = {l.kh, l.kw};
        e["stride"] = l.stride;
        e["padding"] = l.padding;
        break;
      case LayerKind::Pool:
        e["kind"] = "pool";
        e["pool"] = l.pool == PoolKind::Max ? "max" : "avg";
        e["window"] = {l.win_h, l.win_w};
        e["stride"] = l.stride;
        break;
      case LayerKind::Linear:
        e["kind"] = "linear";
        e["n_in"] = l.n_in;
        e["n_out"] = l.n_out;
        break;
      case LayerKind::Residual:
        e["kind"] = "residual";
        e["source"] = l.source;
        e["target"] = l.target;
        e["shortcut"] = l.shortcut == ShortcutKind::Identity ? "identity" : "projection";
        if (l.shortcut == ShortcutKind::Projection) {
          e["c_in"] = l.c_in;
          e["c_out"] = l.c_out;
        }
        break;
    }
    j["layers"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

// ---- bundled configurations ----

namespace {

LayerSpec conv(u32 c_in, u32 c_out, u32 k, u32 stride, u32 padding) {
  LayerSpec l;
  l.kind = LayerKind::Conv;
  l.c_in = c_in;
  l.c_out = c_out;
  l.kh = l.kw = k;
  l.stride = stride;
  l.padding = padding;
  return l;
}

LayerSpec pool(PoolKind kind, u32 win, u32 stride) {
  LayerSpec l;
  l.kind = LayerKind::Pool;
  l.pool = kind;
  l.win_h = l.win_w = win;
  l.stride = stride;
  return l;
}

LayerSpec linear(u64 n_in, u64 n_out) {
  LayerSpec l;
  l.kind = LayerKind::Linear;
  l.n_in = n_in;
  l.n_out = n_out;
  return l;
}

LayerSpec residual(u32 source, u32 target, ShortcutKind kind, u32 c_in = 0, u32 c_out = 0) {
  LayerSpec l;
  l.kind = LayerKind::Residual;
  l.source = source;
  l.target = target;
  l.shortcut = kind;
  l.c_in = c_in;
  l.c_out = c_out;
  return l;
}

ArchitectureSpec make_conv6(u32 h, u32 w, u32 classes) {
  require(h % 8 == 0 && w % 8 == 0 && h >= 8 && w >= 8, errc::invalid_argument,
          "conv6 input sides must be multiples of 8");
  ArchitectureSpec s;
  s.name = "conv6";
  s.input = Shape{h, w, 3};
  u32 widths[3] = {64, 128, 256};
  u32 c = 3;
  for (u32 b = 0; b < 3; ++b) {
    s.layers.push_back(conv(c, widths[b], 3, 1, 1));
    s.layers.push_back(conv(widths[b], widths[b], 3, 1, 1));
    s.layers.push_back(pool(PoolKind::Max, 2, 2));
    c = widths[b];
  }
  u64 flat = static_cast<u64>(h / 8) * (w / 8) * 256;
  s.layers.push_back(linear(flat, 256));
  s.layers.push_back(linear(256, 256));
  s.layers.push_back(linear(256, classes));
  validate_architecture(s);
  return s;
}

// Three stages of basic blocks (two 3x3 convs + shortcut); the first block of
// stages 2 and 3 halves the spatial grid and doubles the width through a
// projection shortcut. Final global average pool feeds one classifier layer.
ArchitectureSpec make_resnet(const std::string& name, u32 blocks_per_stage, u32 h, u32 w,
                             u32 classes, u32 width_mult) {
  require(h % 4 == 0 && w % 4 == 0 && h >= 8 && w >= 8, errc::invalid_argument,
          name + " input sides must be multiples of 4 and at least 8");
  ArchitectureSpec s;
  s.name = name;
  s.input = Shape{h, w, 3};
  s.layers.push_back(conv(3, 16, 3, 1, 1));
  u32 in_c = 16;
  u32 stage_width[3] = {16 * width_mult, 32 * width_mult, 64 * width_mult};
  for (u32 stage = 0; stage < 3; ++stage) {
    u32 out_c = stage_width[stage];
    for (u32 b = 0; b < blocks_per_stage; ++b) {
      u32 stride = (stage > 0 && b == 0) ? 2 : 1;
      u32 first = static_cast<u32>(s.layers.size());
      s.layers.push_back(conv(in_c, out_c, 3, stride, 1));
      s.layers.push_back(conv(out_c, out_c, 3, 1, 1));
      if (in_c == out_c && stride == 1) {
        s.layers.push_back(residual(first, first + 1, ShortcutKind::Identity));
      } else {
        s.layers.push_back(residual(first, first + 1, ShortcutKind::Projection, in_c, out_c));
      }
      in_c = out_c;
    }
  }
  u32 final_side = h / 4;
  s.layers.push_back(pool(PoolKind::Avg, final_side, final_side));
  s.layers.push_back(linear(in_c, classes));
  validate_architecture(s);
  return s;
}

}  // namespace

std::vector<std::string> builtin_architecture_names() {
  return {"conv6", "resnet20", "resnet32", "wide-resnet-28-2"};
}

ArchitectureSpec builtin_architecture(const std::string& name, u32 h, u32 w, u32 classes) {
  require(classes > 0, errc::invalid_argument, "num_classes must be positive");
  if (name == "conv6") return make_conv6(h, w, classes);
  if (name == "resnet20") return make_resnet(name, 3, h, w, classes, 1);
  if (name == "resnet32") return make_resnet(name, 5, h, w, classes, 1);
  if (name == "wide-resnet-28-2") return make_resnet(name, 4, h, w, classes, 2);
  fail(errc::invalid_argument, "unknown builtin architecture '" + name + "'");
}

std::string architecture_info_json(const ArchitectureSpec& spec) {
  njson j;
  j["name"] = spec.name;
  j["input"] = {spec.input.h, spec.input.w, spec.input.c};
  j["total_params"] = total_param_count(spec);
  j["weighted_layers"] = spec.weighted;
  j["layers"] = njson::array();
  static const char* kind_names[] = {"conv", "pool", "linear", "residual"};
  for (u32 i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    njson e;
    e["index"] = i;
    e["kind"] = kind_names[static_cast<int>(l.kind)];
    e["in_shape"] = {spec.in_shape[i].h, spec.in_shape[i].w, spec.in_shape[i].c};
    e["out_shape"] = {spec.out_shape[i].h, spec.out_shape[i].w, spec.out_shape[i].c};
    e["params"] = layer_param_count(l);
    j["layers"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace snntopo
