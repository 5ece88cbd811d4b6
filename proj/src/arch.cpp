#include "dnnmodel/arch.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "dnnmodel/errors.hpp"
#include "json.hpp"

namespace dnnmodel {

using json = nlohmann::ordered_json;

void ArchConfig::validate() const {
  if (pe_count < 1) throw ConfigError("pe_count must be >= 1");
  if (rf_bytes < 0 || buffer_bytes < 0) throw ConfigError("storage capacities must be >= 0");
  if (word_bits < 1 || word_bits > 64) throw ConfigError("word_bits must be in [1, 64]");
  if (rs_channels_per_pe < 1) throw ConfigError("rs_channels_per_pe must be >= 1");
  if (nlr_lane_width < 1) throw ConfigError("nlr_lane_width must be >= 1");
  if (!(mac_energy > 0.0)) throw ConfigError("mac_energy must be > 0");
  for (auto level : kAllLevels)
    if (!(energy.at(level) > 0.0)) throw ConfigError("energy." + std::string(to_string(level)) + " must be > 0");
  if (!(energy.rf <= energy.noc && energy.noc <= energy.buffer && energy.buffer <= energy.dram))
    throw ConfigError("energy costs must satisfy rf <= noc <= buf <= dram");
}

std::int64_t ArchConfig::effective_buffer_bytes(DataflowKind kind) const {
  if (kind == DataflowKind::NoLocalReuse) return buffer_bytes + static_cast<std::int64_t>(pe_count) * rf_bytes;
  return buffer_bytes;
}

ArchConfig default_arch() { return ArchConfig{}; }

namespace {

template <typename T>
void read_field(const json& doc, const char* key, T& field) {
  auto it = doc.find(key);
  if (it == doc.end()) return;
  if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  } else {
    if (!it->is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  }
  field = it->get<T>();
}

}  // namespace

ArchConfig parse_arch(std::string_view text) {
  ArchConfig arch;
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) return arch;

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed arch document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("arch document must be a JSON object");

  static const std::set<std::string> allowed{"pe_count",   "rf_bytes",           "buffer_bytes",  "word_bits",
                                             "energy",     "mac_energy",         "rs_channels_per_pe",
                                             "nlr_lane_width"};
  for (const auto& [key, _] : doc.items())
    if (!allowed.contains(key)) throw ConfigError("unknown arch key '" + key + "'");

  read_field(doc, "pe_count", arch.pe_count);
  read_field(doc, "rf_bytes", arch.rf_bytes);
  read_field(doc, "buffer_bytes", arch.buffer_bytes);
  read_field(doc, "word_bits", arch.word_bits);
  read_field(doc, "mac_energy", arch.mac_energy);
  read_field(doc, "rs_channels_per_pe", arch.rs_channels_per_pe);
  read_field(doc, "nlr_lane_width", arch.nlr_lane_width);
  if (auto it = doc.find("energy"); it != doc.end()) {
    if (!it->is_object()) throw ConfigError("'energy' must be an object");
    for (const auto& [key, _] : it->items())
      if (key != "rf" && key != "noc" && key != "buf" && key != "dram")
        throw ConfigError("unknown energy key '" + key + "'");
    read_field(*it, "rf", arch.energy.rf);
    read_field(*it, "noc", arch.energy.noc);
    read_field(*it, "buf", arch.energy.buffer);
    read_field(*it, "dram", arch.energy.dram);
  }
  arch.validate();
  return arch;
}

std::string serialize_arch(const ArchConfig& arch) {
  json doc;
  doc["pe_count"] = arch.pe_count;
  doc["rf_bytes"] = arch.rf_bytes;
  doc["buffer_bytes"] = arch.buffer_bytes;
  doc["word_bits"] = arch.word_bits;
  doc["energy"] = {{"rf", arch.energy.rf}, {"noc", arch.energy.noc}, {"buf", arch.energy.buffer},
                   {"dram", arch.energy.dram}};
  doc["mac_energy"] = arch.mac_energy;
  doc["rs_channels_per_pe"] = arch.rs_channels_per_pe;
  doc["nlr_lane_width"] = arch.nlr_lane_width;
  return doc.dump(2) + "\n";
}

ArchConfig load_arch(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open arch file '" + path.string() + "': file not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_arch(buf.str());
}

}  // namespace dnnmodel
