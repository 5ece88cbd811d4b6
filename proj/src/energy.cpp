#include "dnnmodel/energy.hpp"

#include <algorithm>

#include "dnnmodel/errors.hpp"

namespace dnnmodel {

void Modifiers::validate(const ArchConfig& arch) const {
  if (!(input_density > 0.0 && input_density <= 1.0)) throw ConfigError("input density must be in (0, 1]");
  if (!(weight_density > 0.0 && weight_density <= 1.0)) throw ConfigError("weight density must be in (0, 1]");
  for (auto bits : {input_bits, weight_bits})
    if (bits && (*bits < 1 || *bits > arch.word_bits))
      throw ConfigError("bitwidth must be in [1, " + std::to_string(arch.word_bits) + "]");
}

EnergyReport layer_energy(const AccessCounts& counts, const ArchConfig& arch, const Modifiers& mods) {
  mods.validate(arch);
  const double word = arch.word_bits;
  const double in_bits = mods.input_bits.value_or(arch.word_bits);
  const double w_bits = mods.weight_bits.value_or(arch.word_bits);

  // Movement scales linearly with bits; psums stay at full width.
  const Eigen::Vector3d bit_scale(in_bits / word, w_bits / word, 1.0);
  Eigen::RowVector4d level_cost;
  for (auto l : kAllLevels) level_cost(static_cast<Eigen::Index>(index(l))) = arch.energy.at(l);

  EnergyReport r;
  r.movement = (counts.counts.cast<double>().array().colwise() * bit_scale.array()).rowwise() * level_cost.array();
  r.compute = static_cast<double>(counts.total_macs) * arch.mac_energy * (in_bits * w_bits) / (word * word) *
              (mods.input_density * mods.weight_density);
  return r;
}

NetworkEnergy network_energy(const ResolvedNetwork& net, DataflowKind kind, const ArchConfig& arch,
                             const Modifiers& mods) {
  arch.validate();
  mods.validate(arch);
  NetworkEnergy out;
  out.network = net.name;
  out.dataflow = kind;
  out.aggregate.layer = "total";
  out.aggregate.dataflow = kind;
  out.conv_aggregate.layer = "conv_total";
  out.conv_aggregate.dataflow = kind;
  for (const auto& layer : net.layers) {
    if (!is_compute(layer.kind())) continue;
    auto report = layer_energy(analyze_layer(kind, layer, arch, net.batch), arch, mods);
    report.layer = layer.name();
    report.dataflow = kind;
    out.aggregate += report;
    if (layer.kind() == LayerKind::Conv) out.conv_aggregate += report;
    out.layers.push_back(std::move(report));
    out.kinds.push_back(layer.kind());
  }
  return out;
}

const ComparisonEntry& ComparisonReport::operator[](DataflowKind k) const {
  return entries[static_cast<std::size_t>(k)];
}

ComparisonReport compare_dataflows(const ResolvedNetwork& net, const ArchConfig& arch, const Modifiers& mods) {
  ComparisonReport out;
  out.network = net.name;
  for (std::size_t i = 0; i < kAllDataflows.size(); ++i)
    out.entries[i].energy = network_energy(net, kAllDataflows[i], arch, mods);

  auto argmin = [&](auto total_of) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.entries.size(); ++i)
      if (total_of(out.entries[i]) < total_of(out.entries[best])) best = i;
    return best;
  };
  auto total = [](const ComparisonEntry& e) { return e.energy.aggregate.total(); };
  auto conv_total = [](const ComparisonEntry& e) { return e.energy.conv_aggregate.total(); };
  const auto best = argmin(total);
  const auto conv_best = argmin(conv_total);
  out.winner = kAllDataflows[best];
  out.conv_winner = kAllDataflows[conv_best];

  const double min_total = total(out.entries[best]);
  const double min_conv = conv_total(out.entries[conv_best]);
  for (auto& e : out.entries) {
    e.normalized = min_total > 0.0 ? total(e) / min_total : 1.0;
    e.conv_normalized = min_conv > 0.0 ? conv_total(e) / min_conv : 1.0;
  }
  return out;
}

}  // namespace dnnmodel
