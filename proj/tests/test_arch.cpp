#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dnnmodel/arch.hpp"
#include "dnnmodel/errors.hpp"

using namespace dnnmodel;

TEST_CASE("defaults") {
  const auto a = default_arch();
  CHECK(a.pe_count == 256);
  CHECK(a.rf_bytes == 512);
  CHECK(a.buffer_bytes == 131072);
  CHECK(a.word_bits == 16);
  CHECK(a.energy == EnergyTable{1, 2, 6, 200});
  CHECK(a.mac_energy == 1.0);
  CHECK(a.rs_channels_per_pe == 4);
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("empty document gives the defaults") {
  CHECK(parse_arch("") == default_arch());
  CHECK(parse_arch("  \n") == default_arch());
  CHECK(parse_arch("{}") == default_arch());
}

TEST_CASE("field override") {
  const auto a = parse_arch(R"({"energy": {"dram": 100}})");
  CHECK(a.energy == EnergyTable{1, 2, 6, 100});
  CHECK(parse_arch(R"({"pe_count": 168, "word_bits": 8})").pe_count == 168);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(parse_arch(R"({"energy": {"dram": 0.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_arch(R"({"energy": {"rf": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_arch(R"({"pe_count": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_arch(R"({"word_bits": 65})"), ConfigError);
  CHECK_THROWS_AS(parse_arch(R"({"pe_count": 1.5})"), ConfigError);
  CHECK_THROWS_AS(parse_arch(R"({"cache": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_arch(R"({"energy": {"l2": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_arch("{"), ConfigError);
  CHECK_NOTHROW(parse_arch(R"({"energy": {"rf": 1, "noc": 1, "buf": 1, "dram": 1}})"));
}

TEST_CASE("serialize then parse is the identity") {
  ArchConfig a;
  a.pe_count = 168;
  a.rf_bytes = 1024;
  a.buffer_bytes = 108 * 1024;
  a.word_bits = 12;
  a.energy = {0.5, 1.25, 6.0, 210.5};
  a.mac_energy = 0.75;
  a.rs_channels_per_pe = 2;
  a.nlr_lane_width = 8;
  CHECK(parse_arch(serialize_arch(a)) == a);
  CHECK(parse_arch(serialize_arch(default_arch())) == default_arch());
}

TEST_CASE("NLR buffer absorbs the register files") {
  const auto a = default_arch();
  CHECK(a.effective_buffer_bytes(DataflowKind::NoLocalReuse) == 131072 + 256 * 512);
  CHECK(a.effective_buffer_bytes(DataflowKind::RowStationary) == 131072);
}

TEST_CASE("load_arch") {
  CHECK_THROWS_AS(load_arch("/nonexistent/arch.json"), ModelError);
  const auto path = std::filesystem::temp_directory_path() / "dnnmodel_arch_test.json";
  std::ofstream(path) << R"({"energy": {"dram": 100}})";
  CHECK(load_arch(path).energy.dram == 100);
  std::filesystem::remove(path);
}
