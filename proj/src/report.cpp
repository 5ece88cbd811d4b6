#include "dnnmodel/report.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"

namespace dnnmodel::report {

using json = nlohmann::ordered_json;

std::optional<Format> parse_format(std::string_view s) {
  if (s == "table") return Format::Table;
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  return std::nullopt;
}

namespace {

json breakdown_json(const EnergyReport& r) {
  json j;
  j["layer"] = r.layer;
  j["dataflow"] = to_string(r.dataflow);
  j["total"] = r.total();
  j["compute"] = r.compute;
  j["movement"] = r.movement_total();
  json by_type, by_level, matrix;
  const auto per_type = r.per_type();
  const auto per_level = r.per_level();
  for (auto t : kAllDataTypes) by_type[std::string(to_string(t))] = per_type(static_cast<Eigen::Index>(index(t)));
  for (auto l : kAllLevels) by_level[std::string(to_string(l))] = per_level(static_cast<Eigen::Index>(index(l)));
  for (auto t : kAllDataTypes) {
    json row;
    for (auto l : kAllLevels) row[std::string(to_string(l))] = r.at(t, l);
    matrix[std::string(to_string(t))] = row;
  }
  j["by_type"] = by_type;
  j["by_level"] = by_level;
  j["matrix"] = matrix;
  j["scale"] = r.scale;
  return j;
}

void energy_csv_rows(std::ostream& os, const EnergyReport& r) {
  for (auto t : kAllDataTypes)
    for (auto l : kAllLevels)
      fmt::print(os, "{},{},{},{},{}\n", r.layer, to_string(r.dataflow), to_string(t), to_string(l), r.at(t, l));
  fmt::print(os, "{},{},compute,mac,{}\n", r.layer, to_string(r.dataflow), r.compute);
}

void energy_table_row(std::ostream& os, const EnergyReport& r) {
  const auto t = r.per_type();
  const auto l = r.per_level();
  fmt::print(os, "{:<24} {:>12.4e} {:>12.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}\n",
             r.layer, r.total(), r.compute, t(0), t(1), t(2), l(0), l(1), l(2), l(3));
}

}  // namespace

void write_stats(std::ostream& os, const NetworkStats& stats, Format format) {
  switch (format) {
    case Format::Csv:
      os << "layer,kind,weights,macs,di,dw,do\n";
      for (const auto& l : stats.layers)
        fmt::print(os, "{},{},{},{},{},{},{}\n", l.name, to_string(l.kind), l.weights, l.macs, l.input_words,
                   l.weight_words, l.output_words);
      fmt::print(os, "total,,{},{},,,\n", stats.total.weights, stats.total.macs);
      break;
    case Format::Json: {
      json j;
      j["network"] = stats.name;
      json layers = json::array();
      for (const auto& l : stats.layers)
        layers.push_back({{"layer", l.name}, {"kind", to_string(l.kind)}, {"weights", l.weights}, {"macs", l.macs},
                          {"di", l.input_words}, {"dw", l.weight_words}, {"do", l.output_words}});
      j["layers"] = layers;
      j["conv"] = {{"weights", stats.conv.weights}, {"macs", stats.conv.macs}};
      j["fc"] = {{"weights", stats.fc.weights}, {"macs", stats.fc.macs}};
      j["total"] = {{"weights", stats.total.weights}, {"macs", stats.total.macs}};
      os << j.dump(2) << "\n";
      break;
    }
    case Format::Table:
      fmt::print(os, "network: {}\n", stats.name);
      fmt::print(os, "{:<24} {:<5} {:>14} {:>16} {:>12} {:>12} {:>12}\n", "layer", "kind", "weights", "macs", "di",
                 "dw", "do");
      for (const auto& l : stats.layers)
        fmt::print(os, "{:<24} {:<5} {:>14} {:>16} {:>12} {:>12} {:>12}\n", l.name, to_string(l.kind), l.weights,
                   l.macs, l.input_words, l.weight_words, l.output_words);
      fmt::print(os, "{:<24} {:<5} {:>14} {:>16}\n", "conv", "", stats.conv.weights, stats.conv.macs);
      fmt::print(os, "{:<24} {:<5} {:>14} {:>16}\n", "fc", "", stats.fc.weights, stats.fc.macs);
      fmt::print(os, "{:<24} {:<5} {:>14} {:>16}\n", "total", "", stats.total.weights, stats.total.macs);
      break;
  }
}

void write_energy(std::ostream& os, const NetworkEnergy& energy, Format format) {
  switch (format) {
    case Format::Csv:
      os << "layer,dataflow,type,level,energy\n";
      for (const auto& r : energy.layers) energy_csv_rows(os, r);
      energy_csv_rows(os, energy.conv_aggregate);
      energy_csv_rows(os, energy.aggregate);
      break;
    case Format::Json: {
      json j;
      j["network"] = energy.network;
      j["dataflow"] = to_string(energy.dataflow);
      json layers = json::array();
      for (const auto& r : energy.layers) layers.push_back(breakdown_json(r));
      j["layers"] = layers;
      j["conv_aggregate"] = breakdown_json(energy.conv_aggregate);
      j["aggregate"] = breakdown_json(energy.aggregate);
      os << j.dump(2) << "\n";
      break;
    }
    case Format::Table:
      fmt::print(os, "network: {}  dataflow: {}\n", energy.network, to_string(energy.dataflow));
      fmt::print(os, "{:<24} {:>12} {:>12} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}\n", "layer", "total",
                 "compute", "input", "weight", "psum", "rf", "noc", "buffer", "dram");
      for (const auto& r : energy.layers) energy_table_row(os, r);
      energy_table_row(os, energy.conv_aggregate);
      energy_table_row(os, energy.aggregate);
      break;
  }
}

void write_comparison(std::ostream& os, const ComparisonReport& cmp, Format format) {
  switch (format) {
    case Format::Csv:
      os << "dataflow,total,normalized,conv_total,conv_normalized,input,weight,psum,rf,noc,buffer,dram,compute\n";
      for (const auto& e : cmp.entries) {
        const auto& a = e.energy.aggregate;
        const auto t = a.per_type();
        const auto l = a.per_level();
        fmt::print(os, "{},{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(e.energy.dataflow), a.total(),
                   e.normalized, e.energy.conv_aggregate.total(), e.conv_normalized, t(0), t(1), t(2), l(0), l(1),
                   l(2), l(3), a.compute);
      }
      break;
    case Format::Json: {
      json j;
      j["network"] = cmp.network;
      j["winner"] = to_string(cmp.winner);
      j["conv_winner"] = to_string(cmp.conv_winner);
      json entries = json::array();
      for (const auto& e : cmp.entries) {
        json x;
        x["dataflow"] = to_string(e.energy.dataflow);
        x["normalized"] = e.normalized;
        x["conv_normalized"] = e.conv_normalized;
        x["aggregate"] = breakdown_json(e.energy.aggregate);
        x["conv_aggregate"] = breakdown_json(e.energy.conv_aggregate);
        entries.push_back(x);
      }
      j["entries"] = entries;
      os << j.dump(2) << "\n";
      break;
    }
    case Format::Table: {
      fmt::print(os, "network: {}\n", cmp.network);
      fmt::print(os, "{:<8} {:>12} {:>8} {:>12} {:>8}   {:>7} {:>7} {:>7}   {:>7} {:>7} {:>7} {:>7}\n", "dataflow",
                 "total", "norm", "conv_total", "conv", "input", "weight", "psum", "rf", "noc", "buffer", "dram");
      for (const auto& e : cmp.entries) {
        const auto& a = e.energy.aggregate;
        const double move = a.movement_total();
        const Eigen::Vector3d t = a.per_type() / move;
        const Eigen::RowVector4d l = a.per_level() / move;
        fmt::print(os,
                   "{:<8} {:>12.4e} {:>8.3f} {:>12.4e} {:>8.3f}   {:>6.1f}% {:>6.1f}% {:>6.1f}%   {:>6.1f}% {:>6.1f}% "
                   "{:>6.1f}% {:>6.1f}%\n",
                   to_string(e.energy.dataflow), a.total(), e.normalized, e.energy.conv_aggregate.total(),
                   e.conv_normalized, 100 * t(0), 100 * t(1), 100 * t(2), 100 * l(0), 100 * l(1), 100 * l(2),
                   100 * l(3));
      }
      fmt::print(os, "winner: {} (conv layers: {})\n", to_string(cmp.winner), to_string(cmp.conv_winner));
      break;
    }
  }
}

void write_mult_counts(std::ostream& os, std::span<const MultCount> counts, Format format) {
  const std::int64_t direct = [&] {
    for (const auto& c : counts)
      if (c.method == TransformMethod::Direct) return c.multiplications;
    return std::int64_t{0};
  }();
  // Strassen is measured against the N^3 schoolbook product, the rest against direct convolution.
  auto ratio = [&](const MultCount& c) {
    const double base = c.method == TransformMethod::Strassen
                            ? static_cast<double>(c.matrix_size) * static_cast<double>(c.matrix_size) *
                                  static_cast<double>(c.matrix_size)
                            : static_cast<double>(direct);
    return base > 0 ? base / static_cast<double>(c.multiplications) : 0.0;
  };
  switch (format) {
    case Format::Csv:
      os << "method,output_size,filter_size,matrix_size,multiplications,reduction_vs_direct\n";
      for (const auto& c : counts)
        fmt::print(os, "{},{},{},{},{},{}\n", to_string(c.method), c.output_size, c.filter_size, c.matrix_size,
                   c.multiplications, ratio(c));
      break;
    case Format::Json: {
      json arr = json::array();
      for (const auto& c : counts)
        arr.push_back({{"method", to_string(c.method)}, {"output_size", c.output_size},
                       {"filter_size", c.filter_size}, {"matrix_size", c.matrix_size},
                       {"multiplications", c.multiplications}, {"reduction_vs_direct", ratio(c)}});
      os << arr.dump(2) << "\n";
      break;
    }
    case Format::Table:
      fmt::print(os, "{:<10} {:>8} {:>8} {:>8} {:>16} {:>10}\n", "method", "No", "Nf", "N", "mults", "vs direct");
      for (const auto& c : counts)
        fmt::print(os, "{:<10} {:>8} {:>8} {:>8} {:>16} {:>10.4f}\n", to_string(c.method), c.output_size,
                   c.filter_size, c.matrix_size, c.multiplications, ratio(c));
      break;
  }
}

}  // namespace dnnmodel::report
