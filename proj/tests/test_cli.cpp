#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnnmodel/cli.hpp"
#include "json.hpp"

using namespace dnnmodel;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) v.push_back(line);
  return v;
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const auto path = fs::temp_directory_path() / ("dnnmodel_cli_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

const char* kTinyNet = R"({"name": "tiny", "input": {"channels": 2, "height": 6, "width": 6}, "layers": [
  {"type": "conv", "name": "c1", "out_channels": 3, "kernel": [3, 3]},
  {"type": "act", "name": "r1"},
  {"type": "fc", "name": "f1", "out_channels": 5}]})";

}  // namespace

TEST_CASE("stats") {
  const auto r = run({"stats", "--builtin", "alexnet"});
  CHECK(r.code == 0);
  CHECK(r.out.find("60965224") != std::string::npos);
  CHECK(r.out.find("724406816") != std::string::npos);

  const auto csv = run({"stats", "--builtin", "lenet5", "--format", "csv"});
  CHECK(csv.code == 0);
  const auto rows = lines(csv.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "layer,kind,weights,macs,di,dw,do");
  CHECK(rows[5].rfind("total,", 0) == 0);

  const auto j = json::parse(run({"stats", "--builtin", "vgg16", "--format", "json"}).out);
  CHECK(j["total"]["weights"] == 138'357'544);
  CHECK(j["layers"].size() == 16);
}

TEST_CASE("input errors exit 1") {
  const auto r = run({"stats", "--net", "/nonexistent/missing.json"});
  CHECK(r.code == cli::kExitInputError);
  CHECK(r.err.find("not found") != std::string::npos);

  const auto bad = temp_file("bad.json", R"({"name": "x", "input": {"channels": 1, "height": 2, "width": 2},
    "layers": [{"type": "conv", "name": "big", "out_channels": 1, "kernel": [3, 3]}]})");
  const auto shape = run({"stats", "--net", bad.string()});
  CHECK(shape.code == 1);
  CHECK(shape.err.find("big") != std::string::npos);
  fs::remove(bad);

  const auto arch = temp_file("badarch.json", R"({"energy": {"dram": 0.5}})");
  CHECK(run({"compare", "--builtin", "lenet5", "--arch", arch.string()}).code == 1);
  fs::remove(arch);
  CHECK(run({"analyze", "--builtin", "lenet5", "--dataflow", "rs", "--bits", "17"}).code == 1);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({"analyze", "--builtin", "alexnet", "--dataflow", "xyz"}).code == cli::kExitUsageError);
  CHECK(run({"analyze", "--builtin", "alexnet"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"stats"}).code == 2);
  CHECK(run({"stats", "--builtin", "lenet5", "--net", "x.json"}).code == 2);
  CHECK(run({"stats", "--builtin", "mobilenet"}).code == 2);
  CHECK(run({"stats", "--builtin", "lenet5", "--format", "xml"}).code == 2);
  CHECK(run({"stats", "--builtin", "lenet5", "--bogus"}).code == 2);
  CHECK(run({"kernels"}).code == 2);
  CHECK(run({"compress", "--encode"}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("compare") != std::string::npos);
}

TEST_CASE("stats ignores dataflow and energy flags") {
  const auto plain = run({"stats", "--builtin", "lenet5"});
  const auto extra = run({"stats", "--builtin", "lenet5", "--dataflow", "ws", "--bits", "8", "--seed", "3"});
  CHECK(extra.code == 0);
  CHECK(extra.out == plain.out);
}

TEST_CASE("analyze") {
  const auto r = run({"analyze", "--builtin", "alexnet", "--dataflow", "rs", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["dataflow"] == "rs");
  CHECK(j["layers"].size() == 8);
  CHECK(j["aggregate"]["total"].get<double>() > 0);
  CHECK(j["aggregate"]["by_type"].size() == 3);
  CHECK(j["aggregate"]["by_level"].size() == 4);

  auto compute = [](const std::vector<std::string>& args) {
    const auto j = json::parse(run(args).out);
    return j["aggregate"]["compute"].get<double>();
  };
  const double base = compute({"analyze", "--builtin", "lenet5", "--dataflow", "nlr", "--format", "json"});
  const double b8 = compute({"analyze", "--builtin", "lenet5", "--dataflow", "nlr", "--bits", "8", "--format", "json"});
  CHECK(b8 == 0.25 * base);

  const auto csv = lines(run({"analyze", "--builtin", "lenet5", "--dataflow", "ws", "--format", "csv"}).out);
  CHECK(csv[0] == "layer,dataflow,type,level,energy");
  CHECK(csv.size() == 1 + 6 * 13);
}

TEST_CASE("compare") {
  const auto j = json::parse(run({"compare", "--builtin", "alexnet", "--format", "json"}).out);
  CHECK(j["winner"] == "rs");
  CHECK(j["conv_winner"] == "rs");
  const auto lenet = json::parse(run({"compare", "--builtin", "lenet5", "--format", "json"}).out);
  CHECK(lenet["entries"].size() == 4);

  // A flat cost table (DRAM as cheap as the RF) moves the breakdown on-chip.
  const auto arch = temp_file("flat.json", R"({"energy": {"rf": 1, "noc": 1, "buf": 1, "dram": 1}})");
  const auto flat =
      json::parse(run({"compare", "--builtin", "alexnet", "--arch", arch.string(), "--format", "json"}).out);
  fs::remove(arch);
  for (std::size_t i = 0; i < 4; ++i) {
    auto share = [&](const json& doc) {
      const auto& a = doc["entries"][i]["aggregate"];
      return a["by_level"]["dram"].get<double>() / a["movement"].get<double>();
    };
    CAPTURE(i);
    CHECK(share(flat) < share(j));
  }
}

TEST_CASE("kernels") {
  const auto v = run({"kernels", "verify", "--size", "8"});
  CHECK(v.code == 0);
  CHECK(v.out.find("FAIL") == std::string::npos);
  CHECK(run({"kernels", "verify", "--size", "2"}).code == 1);

  const auto c = run({"kernels", "count", "--output-size", "32", "--filter-size", "5", "--format", "csv"});
  CHECK(c.code == 0);
  CHECK(c.out.find("25600") != std::string::npos);
  CHECK(c.out.find("77824") != std::string::npos);
  const auto w = run({"kernels", "count", "--output-size", "8", "--filter-size", "3", "--format", "json"});
  CHECK(w.out.find("2.25") != std::string::npos);
  CHECK(run({"kernels", "count", "--matrix-size", "6"}).code == 1);
}

TEST_CASE("compress") {
  const auto r = run({"compress", "--sparsity", "0.7", "--n", "10000", "--seed", "1", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["ratio"].get<double>() >= 1.5);
  CHECK(j["lossless"] == true);

  const auto relu = json::parse(run({"compress", "--relu-mean", "-0.5", "--n", "20000", "--format", "json"}).out);
  CHECK(relu["workload"].get<std::string>().find("relu") != std::string::npos);
  CHECK(relu["lossless"] == true);
}

TEST_CASE("compress file round trip") {
  std::string raw;
  for (std::uint16_t w : {0, 0, 0, 5, 0, 0xABCD, 0, 0, 0}) {
    raw.push_back(char(w & 0xFF));
    raw.push_back(char(w >> 8));
  }
  const auto in = temp_file("words.bin", raw);
  const auto enc = fs::temp_directory_path() / "dnnmodel_cli_words.rle";
  const auto dec = fs::temp_directory_path() / "dnnmodel_cli_words.out";
  CHECK(run({"compress", "--encode", "--in", in.string(), "--out", enc.string()}).code == 0);
  CHECK(fs::file_size(enc) == 8);  // 3 pairs, 63 bits
  CHECK(run({"compress", "--decode", "--in", enc.string(), "--out", dec.string()}).code == 0);
  std::ifstream back(dec, std::ios::binary);
  CHECK(std::string(std::istreambuf_iterator<char>(back), {}) == raw);

  const auto odd = temp_file("odd.bin", "abc");
  CHECK(run({"compress", "--encode", "--in", odd.string()}).code == 1);
  for (const auto& p : {in, enc, dec, odd}) fs::remove(p);
}

TEST_CASE("prune") {
  const auto net = temp_file("tiny.json", kTinyNet);
  const auto r = run({"prune", "--fraction", "0.5", "--net", net.string(), "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const double n = j["total"]["weights"].get<double>();
  CHECK(n == 2 * 3 * 9 + 4 * 4 * 3 * 5);
  CHECK(std::abs(j["total"]["density"].get<double>() - 0.5) <= 1.0 / n);

  const auto energy = run({"prune", "--fraction", "0.3", "--net", net.string(), "--order", "energy"});
  CHECK(energy.code == 0);
  CHECK(run({"prune", "--fraction", "0.3", "--net", net.string(), "--max-weights", "10"}).code == 1);
  CHECK(run({"prune", "--fraction", "1.5", "--net", net.string()}).code == 2);
  fs::remove(net);
}

TEST_CASE("identical invocations give identical reports") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"compare", "--builtin", "googlenet", "--format", "csv"},
           {"compress", "--sparsity", "0.6", "--n", "5000", "--seed", "42"},
           {"kernels", "verify", "--size", "9", "--seed", "5", "--format", "csv"},
           {"prune", "--builtin", "lenet5", "--fraction", "0.7", "--seed", "8"}}) {
    const auto a = run(args), b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
  CHECK(run({"compress", "--seed", "1"}).out != run({"compress", "--seed", "2"}).out);
}

TEST_CASE("--out writes the report to a file") {
  const auto path = fs::temp_directory_path() / "dnnmodel_cli_report.csv";
  const auto r = run({"stats", "--builtin", "lenet5", "--format", "csv", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  CHECK(std::string(std::istreambuf_iterator<char>(in), {}) ==
        run({"stats", "--builtin", "lenet5", "--format", "csv"}).out);
  fs::remove(path);
  CHECK(run({"stats", "--builtin", "lenet5", "--out", "/nonexistent/dir/x.csv"}).code == 1);
}
