#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dnnmodel/netmodel.hpp"

namespace dnnmodel {

struct LayerStats {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  std::int64_t weights = 0;       // filter weights plus biases
  std::int64_t macs = 0;
  std::int64_t input_words = 0;   // N*C*H*W
  std::int64_t weight_words = 0;  // filter weights only; biases are never MAC operands
  std::int64_t output_words = 0;  // N*M*E*F
};

struct CountPair {
  std::int64_t weights = 0;
  std::int64_t macs = 0;
};

struct NetworkStats {
  std::string name;
  std::vector<LayerStats> layers;  // conv and fc layers only
  CountPair conv;
  CountPair fc;
  CountPair total;
};

LayerStats layer_stats(const ResolvedLayer& layer, int batch = 1);
NetworkStats network_stats(const ResolvedNetwork& net);

}  // namespace dnnmodel
