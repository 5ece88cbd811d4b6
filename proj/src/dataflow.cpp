#include "dnnmodel/dataflow.hpp"

#include <algorithm>

#include "dnnmodel/checked.hpp"
#include "dnnmodel/stats.hpp"

namespace dnnmodel {

namespace {

std::int64_t at_least_one(std::int64_t v) { return std::max<std::int64_t>(v, 1); }

void clamp_factors(ReuseFactors& f) {
  for (auto& t : f.per_type) {
    t.rf_reuse = t.rf_resident ? at_least_one(t.rf_reuse) : 1;
    t.noc_multicast = at_least_one(t.noc_multicast);
    t.spatial_accum = at_least_one(t.spatial_accum);
  }
}

}  // namespace

ReuseFactors reuse_factors(DataflowKind kind, const ResolvedLayer& layer, const ArchConfig& arch, int batch) {
  const std::int64_t pes = arch.pe_count;
  const std::int64_t filters = layer.out_channels;
  const std::int64_t channels = layer.channels_per_filter();
  const std::int64_t kh = layer.kernel_h;
  const std::int64_t kw = layer.kernel_w;
  const std::int64_t out_h = layer.out_height;
  const std::int64_t out_w = layer.out_width;
  const std::int64_t taps = kh * kw;
  const std::int64_t lanes = arch.nlr_lane_width;

  // Filters mapped side by side, outputs mapped side by side, channels folded into one RS PE.
  const std::int64_t mapped_filters = std::clamp<std::int64_t>(pes / taps, 1, std::max<std::int64_t>(filters, 1));
  const std::int64_t mapped_outputs = std::min(pes, out_h * out_w);
  const std::int64_t folded_channels = std::min<std::int64_t>(arch.rs_channels_per_pe, layer.in_channels);

  ReuseFactors f;
  f.kind = kind;
  auto& in = f[DataType::Input];
  auto& wt = f[DataType::Weight];
  auto& ps = f[DataType::Psum];

  switch (kind) {
    case DataflowKind::WeightStationary:
      wt.rf_resident = true;
      wt.rf_reuse = checked_product(batch, out_h, out_w);
      in.noc_multicast = mapped_filters;
      ps.spatial_accum = taps;
      break;
    case DataflowKind::OutputStationary:
      ps.rf_resident = true;
      ps.rf_reuse = checked_product(channels, kh, kw);
      in.noc_multicast = std::min(taps, mapped_outputs);
      wt.noc_multicast = mapped_outputs;
      break;
    case DataflowKind::NoLocalReuse:
      in.noc_multicast = std::min(filters, lanes);
      ps.spatial_accum = std::min(checked_product(channels, kh, kw), lanes);
      break;
    case DataflowKind::RowStationary:
      wt.rf_resident = true;
      wt.rf_reuse = out_w;
      wt.noc_multicast = std::min(out_h, pes);
      in.rf_resident = true;
      in.rf_reuse = kw;
      in.noc_multicast = std::min(kh, pes);
      ps.rf_resident = true;
      ps.rf_reuse = kw * folded_channels;
      ps.spatial_accum = kh;
      break;
  }
  clamp_factors(f);
  return f;
}

AccessCounts access_counts(const ReuseFactors& f, const ResolvedLayer& layer, int batch) {
  const auto s = layer_stats(layer, batch);
  const std::int64_t macs = s.macs;

  AccessCounts out;
  out.total_macs = macs;
  auto set = [&](DataType t, Level l, std::int64_t v) {
    out.counts(static_cast<Eigen::Index>(index(t)), static_cast<Eigen::Index>(index(l))) = v;
  };

  for (auto [type, unique] : {std::pair{DataType::Input, s.input_words}, std::pair{DataType::Weight, s.weight_words}}) {
    const auto& r = f[type];
    // Every unique word crosses the NoC at least once.
    const std::int64_t deliveries = std::max(ceil_div(macs, r.rf_reuse), unique);
    const std::int64_t buffer_reads =
        std::min(std::max(ceil_div(deliveries, r.noc_multicast), unique), deliveries);
    set(type, Level::RegisterFile, r.rf_resident ? macs : 0);
    set(type, Level::NoC, deliveries);
    set(type, Level::Buffer, buffer_reads);
    set(type, Level::Dram, unique);
  }

  const auto& p = f[DataType::Psum];
  const std::int64_t twice_macs = checked_mul(2, macs);
  const std::int64_t updates = checked_mul(2, ceil_div(macs, checked_mul(p.rf_reuse, p.spatial_accum)));
  set(DataType::Psum, Level::RegisterFile, p.rf_resident ? twice_macs : 0);
  set(DataType::Psum, Level::NoC, ceil_div(macs, p.rf_reuse));
  set(DataType::Psum, Level::Buffer, std::min(std::max(updates, s.output_words), twice_macs));
  set(DataType::Psum, Level::Dram, s.output_words);
  return out;
}

AccessCounts analyze_layer(DataflowKind kind, const ResolvedLayer& layer, const ArchConfig& arch, int batch) {
  return access_counts(reuse_factors(kind, layer, arch, batch), layer, batch);
}

}  // namespace dnnmodel
