#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace dnnmodel {

enum class DataType { Input = 0, Weight = 1, Psum = 2 };
enum class Level { RegisterFile = 0, NoC = 1, Buffer = 2, Dram = 3 };
enum class DataflowKind { WeightStationary, OutputStationary, NoLocalReuse, RowStationary };

inline constexpr std::size_t kDataTypeCount = 3;
inline constexpr std::size_t kLevelCount = 4;

inline constexpr std::array<DataType, kDataTypeCount> kAllDataTypes{DataType::Input, DataType::Weight,
                                                                     DataType::Psum};
inline constexpr std::array<Level, kLevelCount> kAllLevels{Level::RegisterFile, Level::NoC, Level::Buffer,
                                                           Level::Dram};
inline constexpr std::array<DataflowKind, 4> kAllDataflows{
    DataflowKind::WeightStationary, DataflowKind::OutputStationary, DataflowKind::NoLocalReuse,
    DataflowKind::RowStationary};

constexpr std::string_view to_string(DataType t) {
  switch (t) {
    case DataType::Input: return "input";
    case DataType::Weight: return "weight";
    case DataType::Psum: return "psum";
  }
  return "?";
}

constexpr std::string_view to_string(Level l) {
  switch (l) {
    case Level::RegisterFile: return "rf";
    case Level::NoC: return "noc";
    case Level::Buffer: return "buffer";
    case Level::Dram: return "dram";
  }
  return "?";
}

/// Short lowercase tag used on the command line and in reports.
constexpr std::string_view to_string(DataflowKind k) {
  switch (k) {
    case DataflowKind::WeightStationary: return "ws";
    case DataflowKind::OutputStationary: return "os";
    case DataflowKind::NoLocalReuse: return "nlr";
    case DataflowKind::RowStationary: return "rs";
  }
  return "?";
}

constexpr std::optional<DataflowKind> parse_dataflow(std::string_view s) {
  for (auto k : kAllDataflows)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

constexpr std::size_t index(DataType t) { return static_cast<std::size_t>(t); }
constexpr std::size_t index(Level l) { return static_cast<std::size_t>(l); }

}  // namespace dnnmodel
