#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

#include "dnnmodel/arch.hpp"
#include "dnnmodel/netmodel.hpp"
#include "dnnmodel/types.hpp"

namespace dnnmodel {

/// How one data type is reused under a dataflow.
struct TypeReuse {
  bool rf_resident = false;
  std::int64_t rf_reuse = 1;       // uses served per RF fill
  std::int64_t noc_multicast = 1;  // PEs served per buffer read
  std::int64_t spatial_accum = 1;  // psum only: partial sums merged on the array per buffer update

  friend bool operator==(const TypeReuse&, const TypeReuse&) = default;
};

struct ReuseFactors {
  DataflowKind kind = DataflowKind::RowStationary;
  std::array<TypeReuse, kDataTypeCount> per_type{};

  const TypeReuse& operator[](DataType t) const { return per_type[index(t)]; }
  TypeReuse& operator[](DataType t) { return per_type[index(t)]; }
};

/// Word-access counts; rows are DataType, columns are Level.
using AccessMatrix = Eigen::Matrix<std::int64_t, static_cast<int>(kDataTypeCount), static_cast<int>(kLevelCount)>;

struct AccessCounts {
  AccessMatrix counts = AccessMatrix::Zero();
  std::int64_t total_macs = 0;

  std::int64_t operator()(DataType t, Level l) const {
    return counts(static_cast<Eigen::Index>(index(t)), static_cast<Eigen::Index>(index(l)));
  }
};

/// Reuse-factor table for a layer. Degenerate shapes clamp every factor to 1.
ReuseFactors reuse_factors(DataflowKind kind, const ResolvedLayer& layer, const ArchConfig& arch, int batch = 1);

/// Per-type, per-level access counts. Throws OverflowError past 2^63-1.
AccessCounts access_counts(const ReuseFactors& factors, const ResolvedLayer& layer, int batch = 1);

/// reuse_factors followed by access_counts.
AccessCounts analyze_layer(DataflowKind kind, const ResolvedLayer& layer, const ArchConfig& arch, int batch = 1);

}  // namespace dnnmodel
