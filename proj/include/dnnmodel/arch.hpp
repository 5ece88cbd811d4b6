#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "dnnmodel/types.hpp"

namespace dnnmodel {

/// Per-word access cost at each storage level, in units of one RF access.
struct EnergyTable {
  double rf = 1.0;
  double noc = 2.0;
  double buffer = 6.0;
  double dram = 200.0;

  double at(Level level) const {
    switch (level) {
      case Level::RegisterFile: return rf;
      case Level::NoC: return noc;
      case Level::Buffer: return buffer;
      case Level::Dram: return dram;
    }
    return 0.0;
  }

  friend bool operator==(const EnergyTable&, const EnergyTable&) = default;
};

struct ArchConfig {
  int pe_count = 256;
  std::int64_t rf_bytes = 512;
  std::int64_t buffer_bytes = 131072;
  int word_bits = 16;
  EnergyTable energy;
  double mac_energy = 1.0;  // per word_bits x word_bits MAC
  int rs_channels_per_pe = 4;
  int nlr_lane_width = 16;

  /// Throws ConfigError if a field is out of range or the level costs are not monotone.
  void validate() const;

  /// Global buffer capacity seen by a dataflow; NLR reclaims the PE register files.
  std::int64_t effective_buffer_bytes(DataflowKind kind) const;

  friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

ArchConfig default_arch();

/// Parses an arch document; absent fields keep their defaults and an empty document yields default_arch().
ArchConfig parse_arch(std::string_view text);
std::string serialize_arch(const ArchConfig& arch);
ArchConfig load_arch(const std::filesystem::path& path);

}  // namespace dnnmodel
