#pragma once

#include "dnnmodel/netmodel.hpp"

namespace dnnmodel::testing {

struct ConvShape {
  int c = 1, h = 1, w = 1;
  int m = 1, r = 1, s = 1;
  int stride = 1, pad = 0, groups = 1;
  bool bias = false;
};

inline NetworkSpec single_conv_net(const ConvShape& k) {
  NetworkSpec net;
  net.name = "single";
  net.input = {k.c, k.h, k.w};
  LayerSpec l;
  l.kind = LayerKind::Conv;
  l.name = "conv";
  l.out_channels = k.m;
  l.kernel_h = k.r;
  l.kernel_w = k.s;
  l.stride = k.stride;
  l.pad = k.pad;
  l.groups = k.groups;
  l.has_bias = k.bias;
  net.layers.push_back(l);
  return net;
}

inline ResolvedLayer conv_layer(const ConvShape& k, int batch = 1) {
  return resolve_shapes(single_conv_net(k), batch).layers.front();
}

// N=C=M=1, 3x3 input, 2x2 filter: E=F=2, T=16, Di=9, Dw=4, Do=4.
inline ResolvedLayer tiny_layer() { return conv_layer({.c = 1, .h = 3, .w = 3, .m = 1, .r = 2, .s = 2}); }

}  // namespace dnnmodel::testing
