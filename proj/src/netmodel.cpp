#include "dnnmodel/netmodel.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dnnmodel/errors.hpp"
#include "json.hpp"

namespace dnnmodel {

namespace builtin_data {
// Generated from src/netmodel/builtin/*.json at configure time.
extern const std::span<const std::pair<std::string_view, std::string_view>> documents;
}  // namespace builtin_data

using json = nlohmann::ordered_json;

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::FullyConnected: return "fc";
    case LayerKind::Pool: return "pool";
    case LayerKind::Activation: return "act";
    case LayerKind::Concat: return "concat";
    case LayerKind::Add: return "add";
  }
  return "?";
}

std::int64_t ResolvedLayer::filter_taps() const {
  if (!spec.connections.empty()) {
    std::int64_t taps = 0;
    for (const auto& row : spec.connections) taps += static_cast<std::int64_t>(row.size());
    return taps;
  }
  return static_cast<std::int64_t>(out_channels) * (in_channels / groups());
}

std::int64_t ResolvedLayer::channels_per_filter() const {
  if (out_channels == 0) return 0;
  const std::int64_t taps = filter_taps();
  return (taps + out_channels - 1) / out_channels;
}

bool ResolvedLayer::connects(int filter, int channel) const {
  if (!spec.connections.empty()) {
    const auto& row = spec.connections.at(static_cast<std::size_t>(filter));
    return std::find(row.begin(), row.end(), channel) != row.end();
  }
  const int per_group_in = in_channels / groups();
  const int per_group_out = out_channels / groups();
  return channel / per_group_in == filter / per_group_out;
}

namespace {

constexpr std::string_view kNetworkInput = "input";

std::string where(std::size_t index, const std::string& name) {
  std::ostringstream os;
  os << "layer " << index;
  if (!name.empty()) os << " (" << name << ")";
  return os.str();
}

int get_int(const json& obj, const char* key, int fallback, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ParseError(ctx + ": '" + key + "' must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) throw ParseError(ctx + ": '" + key + "' out of range");
  return static_cast<int>(v);
}

void require(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key)) throw ParseError(ctx + ": missing required field '" + key + "'");
}

LayerKind parse_kind(const json& j, const std::string& ctx) {
  if (!j.is_string()) throw ParseError(ctx + ": 'type' must be a string");
  const auto s = j.get<std::string>();
  for (auto k : {LayerKind::Conv, LayerKind::FullyConnected, LayerKind::Pool, LayerKind::Activation,
                 LayerKind::Concat, LayerKind::Add})
    if (to_string(k) == s) return k;
  throw ParseError(ctx + ": unknown layer type '" + s + "'");
}

LayerSpec parse_layer(const json& j, std::size_t index, const std::set<std::string>& known) {
  static const std::set<std::string> allowed{"type", "name",   "out_channels", "kernel",      "stride",
                                             "pad",  "groups", "bias",         "inputs",      "connections"};
  std::string ctx = where(index, "");
  if (!j.is_object()) throw ParseError(ctx + ": layer must be an object");

  LayerSpec layer;
  require(j, "name", ctx);
  if (!j["name"].is_string()) throw ParseError(ctx + ": 'name' must be a string");
  layer.name = j["name"].get<std::string>();
  ctx = where(index, layer.name);
  if (layer.name.empty()) throw ParseError(ctx + ": empty layer name");
  if (layer.name == kNetworkInput) throw ParseError(ctx + ": 'input' is reserved for the network input");
  if (known.contains(layer.name)) throw ParseError(ctx + ": duplicate layer name");

  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) throw ParseError(ctx + ": unknown key '" + key + "'");

  require(j, "type", ctx);
  layer.kind = parse_kind(j["type"], ctx);

  const bool conv = layer.kind == LayerKind::Conv;
  const bool fc = layer.kind == LayerKind::FullyConnected;
  const bool pool = layer.kind == LayerKind::Pool;

  if (conv || fc) {
    require(j, "out_channels", ctx);
    layer.out_channels = get_int(j, "out_channels", 0, ctx);
    if (layer.out_channels < 1) throw ParseError(ctx + ": out_channels must be >= 1");
    if (auto it = j.find("bias"); it != j.end()) {
      if (!it->is_boolean()) throw ParseError(ctx + ": 'bias' must be a boolean");
      layer.has_bias = it->get<bool>();
    }
  } else {
    layer.has_bias = false;
  }

  if (conv || pool) {
    require(j, "kernel", ctx);
    const auto& k = j["kernel"];
    if (!k.is_array() || k.size() != 2 || !k[0].is_number_integer() || !k[1].is_number_integer())
      throw ParseError(ctx + ": 'kernel' must be [height, width]");
    layer.kernel_h = k[0].get<int>();
    layer.kernel_w = k[1].get<int>();
    if (layer.kernel_h < 1 || layer.kernel_w < 1) throw ParseError(ctx + ": kernel extents must be >= 1");
    layer.stride = get_int(j, "stride", 1, ctx);
    if (layer.stride < 1) throw ParseError(ctx + ": stride must be >= 1");
    layer.pad = get_int(j, "pad", 0, ctx);
    if (layer.pad < 0) throw ParseError(ctx + ": pad must be >= 0");
  }

  if (conv) {
    layer.groups = get_int(j, "groups", 1, ctx);
    if (layer.groups < 1) throw ParseError(ctx + ": groups must be >= 1");
    if (layer.out_channels % layer.groups != 0)
      throw ParseError(ctx + ": out_channels not divisible by groups");
    if (auto it = j.find("connections"); it != j.end()) {
      if (layer.groups != 1) throw ParseError(ctx + ": 'connections' cannot be combined with groups");
      if (!it->is_array() || it->size() != static_cast<std::size_t>(layer.out_channels))
        throw ParseError(ctx + ": 'connections' must list one channel set per output channel");
      for (const auto& row : *it) {
        if (!row.is_array() || row.empty()) throw ParseError(ctx + ": empty connection row");
        std::vector<int> channels;
        for (const auto& c : row) {
          if (!c.is_number_integer() || c.get<int>() < 0) throw ParseError(ctx + ": bad channel index");
          channels.push_back(c.get<int>());
        }
        if (std::set<int>(channels.begin(), channels.end()).size() != channels.size())
          throw ParseError(ctx + ": repeated channel in connection row");
        layer.connections.push_back(std::move(channels));
      }
    }
  } else if (j.contains("groups") || j.contains("connections")) {
    if (!fc) throw ParseError(ctx + ": 'groups'/'connections' only apply to conv layers");
  }

  if (auto it = j.find("inputs"); it != j.end()) {
    if (!it->is_array()) throw ParseError(ctx + ": 'inputs' must be a list of layer names");
    for (const auto& s : *it) {
      if (!s.is_string()) throw ParseError(ctx + ": 'inputs' must be a list of layer names");
      auto src = s.get<std::string>();
      if (src != kNetworkInput && !known.contains(src))
        throw ParseError(ctx + ": input '" + src + "' does not name an earlier layer");
      layer.inputs.push_back(std::move(src));
    }
  }
  const auto n_inputs = layer.inputs.size();
  if (layer.kind == LayerKind::Concat && n_inputs < 1) throw ParseError(ctx + ": concat needs 'inputs'");
  if (layer.kind == LayerKind::Add && n_inputs < 2) throw ParseError(ctx + ": add needs at least two inputs");
  if (layer.kind != LayerKind::Concat && layer.kind != LayerKind::Add && n_inputs > 1)
    throw ParseError(ctx + ": only concat/add layers take multiple inputs");
  return layer;
}

struct Shape {
  int channels;
  int height;
  int width;
};

int output_extent(int in, int kernel, int pad, int stride, const std::string& ctx) {
  const int span = in - kernel + 2 * pad;
  if (span < 0) throw ShapeError(ctx + ": kernel larger than padded input");
  return span / stride + 1;
}

}  // namespace

NetworkSpec parse_network(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed network document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("network document must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (key != "name" && key != "input" && key != "layers") throw ParseError("unknown top-level key '" + key + "'");

  NetworkSpec net;
  if (!doc.contains("name") || !doc["name"].is_string()) throw ParseError("missing network 'name'");
  net.name = doc["name"].get<std::string>();

  if (!doc.contains("input") || !doc["input"].is_object()) throw ParseError("missing 'input' shape");
  const auto& in = doc["input"];
  for (const auto& [key, _] : in.items())
    if (key != "channels" && key != "height" && key != "width") throw ParseError("unknown input key '" + key + "'");
  for (const char* key : {"channels", "height", "width"}) require(in, key, "input");
  net.input = {get_int(in, "channels", 0, "input"), get_int(in, "height", 0, "input"),
               get_int(in, "width", 0, "input")};
  if (net.input.channels < 1 || net.input.height < 1 || net.input.width < 1)
    throw ParseError("input: dimensions must be >= 1");

  if (!doc.contains("layers") || !doc["layers"].is_array()) throw ParseError("missing 'layers' list");
  if (doc["layers"].empty()) throw ParseError("network has no layers");
  std::set<std::string> known;
  std::size_t index = 0;
  for (const auto& j : doc["layers"]) {
    net.layers.push_back(parse_layer(j, index++, known));
    known.insert(net.layers.back().name);
  }
  return net;
}

std::string serialize_network(const NetworkSpec& net) {
  std::ostringstream os;
  json input = {{"channels", net.input.channels}, {"height", net.input.height}, {"width", net.input.width}};
  os << "{\n  \"name\": " << json(net.name).dump() << ",\n  \"input\": " << input.dump() << ",\n  \"layers\": [\n";
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    json j;
    j["type"] = to_string(l.kind);
    j["name"] = l.name;
    if (is_compute(l.kind)) j["out_channels"] = l.out_channels;
    if (l.kind == LayerKind::Conv || l.kind == LayerKind::Pool) {
      j["kernel"] = {l.kernel_h, l.kernel_w};
      j["stride"] = l.stride;
      j["pad"] = l.pad;
    }
    if (l.kind == LayerKind::Conv) j["groups"] = l.groups;
    if (is_compute(l.kind)) j["bias"] = l.has_bias;
    if (!l.inputs.empty()) j["inputs"] = l.inputs;
    if (!l.connections.empty()) j["connections"] = l.connections;
    os << "    " << j.dump() << (i + 1 < net.layers.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

NetworkSpec load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open network file '" + path.string() + "': file not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

ResolvedNetwork resolve_shapes(const NetworkSpec& net, int batch) {
  if (batch < 1) throw ShapeError("batch must be >= 1");
  ResolvedNetwork out;
  out.name = net.name;
  out.batch = batch;
  out.layers.reserve(net.layers.size());

  std::map<std::string, Shape, std::less<>> produced;
  produced.emplace(std::string(kNetworkInput), Shape{net.input.channels, net.input.height, net.input.width});
  Shape previous = produced.at(std::string(kNetworkInput));

  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& spec = net.layers[i];
    const auto ctx = where(i, spec.name);
    std::vector<Shape> sources;
    if (spec.inputs.empty()) {
      sources.push_back(previous);
    } else {
      for (const auto& src : spec.inputs) {
        auto it = produced.find(src);
        if (it == produced.end()) throw ShapeError(ctx + ": unknown input '" + src + "'");
        sources.push_back(it->second);
      }
    }
    const Shape in = sources.front();

    ResolvedLayer layer;
    layer.spec = spec;
    layer.in_channels = in.channels;
    layer.in_height = in.height;
    layer.in_width = in.width;

    switch (spec.kind) {
      case LayerKind::Conv: {
        if (in.channels % spec.groups != 0) throw ShapeError(ctx + ": input channels not divisible by groups");
        for (const auto& row : spec.connections)
          for (int c : row)
            if (c >= in.channels) throw ShapeError(ctx + ": connection references a missing input channel");
        layer.kernel_h = spec.kernel_h;
        layer.kernel_w = spec.kernel_w;
        layer.out_channels = spec.out_channels;
        layer.out_height = output_extent(in.height, spec.kernel_h, spec.pad, spec.stride, ctx);
        layer.out_width = output_extent(in.width, spec.kernel_w, spec.pad, spec.stride, ctx);
        break;
      }
      case LayerKind::FullyConnected:
        layer.kernel_h = in.height;
        layer.kernel_w = in.width;
        layer.out_channels = spec.out_channels;
        layer.out_height = 1;
        layer.out_width = 1;
        layer.spec.stride = 1;
        layer.spec.pad = 0;
        break;
      case LayerKind::Pool:
        layer.kernel_h = spec.kernel_h;
        layer.kernel_w = spec.kernel_w;
        layer.out_channels = in.channels;
        layer.out_height = output_extent(in.height, spec.kernel_h, spec.pad, spec.stride, ctx);
        layer.out_width = output_extent(in.width, spec.kernel_w, spec.pad, spec.stride, ctx);
        break;
      case LayerKind::Activation:
        layer.out_channels = in.channels;
        layer.out_height = in.height;
        layer.out_width = in.width;
        break;
      case LayerKind::Concat: {
        int channels = 0;
        for (const auto& s : sources) {
          if (s.height != in.height || s.width != in.width)
            throw ShapeError(ctx + ": concat inputs differ in spatial size");
          channels += s.channels;
        }
        layer.in_channels = channels;
        layer.out_channels = channels;
        layer.out_height = in.height;
        layer.out_width = in.width;
        break;
      }
      case LayerKind::Add:
        for (const auto& s : sources)
          if (s.channels != in.channels || s.height != in.height || s.width != in.width)
            throw ShapeError(ctx + ": add inputs differ in shape");
        layer.out_channels = in.channels;
        layer.out_height = in.height;
        layer.out_width = in.width;
        break;
    }

    previous = {layer.out_channels, layer.out_height, layer.out_width};
    produced.emplace(spec.name, previous);
    out.layers.push_back(std::move(layer));
  }
  return out;
}

NetworkSpec builtin(std::string_view name) {
  for (const auto& [id, doc] : builtin_data::documents)
    if (id == name) return parse_network(doc);
  throw ModelError("unknown built-in network '" + std::string(name) + "'");
}

std::span<const std::string_view> builtin_names() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> v;
    for (const auto& [id, _] : builtin_data::documents) v.push_back(id);
    return v;
  }();
  return names;
}

}  // namespace dnnmodel
