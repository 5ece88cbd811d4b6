#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dnnmodel/arch.hpp"
#include "dnnmodel/dataflow.hpp"
#include "dnnmodel/netmodel.hpp"

namespace dnnmodel {

/// Precision and sparsity knobs. Unset bitwidths mean the architecture word width.
struct Modifiers {
  double input_density = 1.0;
  double weight_density = 1.0;
  std::optional<int> input_bits;
  std::optional<int> weight_bits;

  void validate(const ArchConfig& arch) const;
};

/// Energy per (data type, level), in units of one RF word access.
using EnergyMatrix = Eigen::Matrix<double, static_cast<int>(kDataTypeCount), static_cast<int>(kLevelCount)>;

struct EnergyReport {
  std::string layer;
  DataflowKind dataflow = DataflowKind::RowStationary;
  EnergyMatrix movement = EnergyMatrix::Zero();
  double compute = 0.0;
  // Multiply normalized energy by this to get calibrated units (e.g. pJ per RF access).
  double scale = 1.0;

  double movement_total() const { return movement.sum(); }
  double total() const { return compute + movement_total(); }
  Eigen::Vector3d per_type() const { return movement.rowwise().sum(); }
  Eigen::RowVector4d per_level() const { return movement.colwise().sum(); }
  double at(DataType t, Level l) const {
    return movement(static_cast<Eigen::Index>(index(t)), static_cast<Eigen::Index>(index(l)));
  }

  EnergyReport& operator+=(const EnergyReport& other) {
    movement += other.movement;
    compute += other.compute;
    return *this;
  }
};

EnergyReport layer_energy(const AccessCounts& counts, const ArchConfig& arch, const Modifiers& mods = {});

struct NetworkEnergy {
  std::string network;
  DataflowKind dataflow = DataflowKind::RowStationary;
  std::vector<EnergyReport> layers;  // conv and fc layers in network order
  std::vector<LayerKind> kinds;      // parallel to layers
  EnergyReport aggregate;            // all layers
  EnergyReport conv_aggregate;       // conv layers only
};

NetworkEnergy network_energy(const ResolvedNetwork& net, DataflowKind kind, const ArchConfig& arch,
                             const Modifiers& mods = {});

struct ComparisonEntry {
  NetworkEnergy energy;
  double normalized = 1.0;       // aggregate total / min aggregate total
  double conv_normalized = 1.0;  // conv-only aggregate / min conv-only aggregate
};

struct ComparisonReport {
  std::string network;
  std::array<ComparisonEntry, 4> entries;  // kAllDataflows order
  DataflowKind winner = DataflowKind::RowStationary;
  DataflowKind conv_winner = DataflowKind::RowStationary;

  const ComparisonEntry& operator[](DataflowKind k) const;
};

ComparisonReport compare_dataflows(const ResolvedNetwork& net, const ArchConfig& arch, const Modifiers& mods = {});

}  // namespace dnnmodel
