#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dnnmodel {

enum class LayerKind { Conv, FullyConnected, Pool, Activation, Concat, Add };

/// Tag used in network-description files ("conv", "fc", "pool", "act", "concat", "add").
std::string_view to_string(LayerKind kind);

/// True for layers that carry weights and MACs.
constexpr bool is_compute(LayerKind kind) { return kind == LayerKind::Conv || kind == LayerKind::FullyConnected; }

struct LayerSpec {
  LayerKind kind = LayerKind::Conv;
  std::string name;
  int out_channels = 0;  // conv and fc only
  int kernel_h = 1;
  int kernel_w = 1;
  int stride = 1;
  int pad = 0;
  int groups = 1;
  bool has_bias = true;
  // Source layers by name. Empty means the previous layer (or the network input for the first layer).
  std::vector<std::string> inputs;
  // Optional sparse filter-to-channel table: connections[m] lists the input channels filter m reads.
  std::vector<std::vector<int>> connections;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct InputShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  friend bool operator==(const InputShape&, const InputShape&) = default;
};

struct NetworkSpec {
  std::string name;
  InputShape input;
  std::vector<LayerSpec> layers;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct ResolvedLayer {
  LayerSpec spec;
  int in_channels = 0;
  int in_height = 0;
  int in_width = 0;
  int out_channels = 0;
  int out_height = 0;
  int out_width = 0;
  // Effective kernel; fc layers cover the whole input plane.
  int kernel_h = 1;
  int kernel_w = 1;

  LayerKind kind() const { return spec.kind; }
  const std::string& name() const { return spec.name; }
  int stride() const { return spec.stride; }
  int pad() const { return spec.pad; }
  int groups() const { return spec.kind == LayerKind::Conv ? spec.groups : 1; }

  /// Sum over filters of the number of input channels each filter reads.
  std::int64_t filter_taps() const;
  /// Input channels read per filter (C/G); the rounded-up mean for connection tables.
  std::int64_t channels_per_filter() const;
  /// Whether filter m reads input channel c.
  bool connects(int filter, int channel) const;
};

struct ResolvedNetwork {
  std::string name;
  int batch = 1;
  std::vector<ResolvedLayer> layers;
};

/// Parses and validates a JSON network description. Throws ParseError naming the layer on failure.
NetworkSpec parse_network(std::string_view text);

/// Canonical JSON form; parse_network(serialize_network(n)) == n.
std::string serialize_network(const NetworkSpec& net);

NetworkSpec load_network(const std::filesystem::path& path);

/// Propagates shapes through the layer list. Throws ShapeError on underflow or divisibility violations.
ResolvedNetwork resolve_shapes(const NetworkSpec& net, int batch = 1);

NetworkSpec builtin(std::string_view name);
std::span<const std::string_view> builtin_names();

}  // namespace dnnmodel
