#include "dnnmodel/stats.hpp"

#include "dnnmodel/checked.hpp"

namespace dnnmodel {

LayerStats layer_stats(const ResolvedLayer& layer, int batch) {
  LayerStats s;
  s.name = layer.name();
  s.kind = layer.kind();
  s.input_words = checked_product(batch, layer.in_channels, layer.in_height, layer.in_width);
  s.output_words = checked_product(batch, layer.out_channels, layer.out_height, layer.out_width);
  if (!is_compute(layer.kind())) return s;

  const std::int64_t taps = checked_product(layer.filter_taps(), layer.kernel_h, layer.kernel_w);
  s.weight_words = taps;
  s.weights = layer.spec.has_bias ? checked_add(taps, layer.out_channels) : taps;
  s.macs = checked_product(taps, batch, layer.out_height, layer.out_width);
  return s;
}

NetworkStats network_stats(const ResolvedNetwork& net) {
  NetworkStats out;
  out.name = net.name;
  for (const auto& layer : net.layers) {
    if (!is_compute(layer.kind())) continue;
    auto s = layer_stats(layer, net.batch);
    auto& bucket = layer.kind() == LayerKind::Conv ? out.conv : out.fc;
    bucket.weights = checked_add(bucket.weights, s.weights);
    bucket.macs = checked_add(bucket.macs, s.macs);
    out.layers.push_back(std::move(s));
  }
  out.total = {checked_add(out.conv.weights, out.fc.weights), checked_add(out.conv.macs, out.fc.macs)};
  return out;
}

}  // namespace dnnmodel
