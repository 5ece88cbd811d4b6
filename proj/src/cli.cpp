#include "dnnmodel/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dnnmodel/arch.hpp"
#include "dnnmodel/energy.hpp"
#include "dnnmodel/errors.hpp"
#include "dnnmodel/kernels.hpp"
#include "dnnmodel/netmodel.hpp"
#include "dnnmodel/optkit.hpp"
#include "dnnmodel/report.hpp"
#include "dnnmodel/stats.hpp"
#include "json.hpp"

namespace dnnmodel::cli {

namespace {

using report::Format;
using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string builtin_name;
  std::string net_path;
  std::string arch_path;
  std::string dataflow;
  int batch = 1;
  std::optional<int> bits;
  double density_in = 1.0;
  double density_w = 1.0;
  std::string format = "table";
  std::string out_path;
  std::uint64_t seed = 1;

  // kernels
  int size = 8;
  int instances = 20;
  std::int64_t output_size = 32;
  std::int64_t filter_size = 3;
  std::int64_t matrix_size = 64;

  // compress
  double sparsity = 0.7;
  std::size_t n = 10000;
  std::optional<double> relu_mean;
  bool encode = false;
  bool decode = false;
  std::string in_path;

  // prune
  double fraction = 0.5;
  std::string order = "magnitude";
  std::int64_t max_weights = 20'000'000;
};

Format format_of(const RunConfig& cfg) { return *report::parse_format(cfg.format); }

ResolvedNetwork load_resolved(const RunConfig& cfg) {
  if (cfg.builtin_name.empty() == cfg.net_path.empty())
    throw UsageError("exactly one of --builtin or --net is required");
  const auto spec = cfg.builtin_name.empty() ? load_network(cfg.net_path) : builtin(cfg.builtin_name);
  return resolve_shapes(spec, cfg.batch);
}

ArchConfig load_arch_config(const RunConfig& cfg) {
  return cfg.arch_path.empty() ? default_arch() : load_arch(cfg.arch_path);
}

Modifiers modifiers_of(const RunConfig& cfg) {
  Modifiers mods;
  mods.input_density = cfg.density_in;
  mods.weight_density = cfg.density_w;
  mods.input_bits = cfg.bits;
  mods.weight_bits = cfg.bits;
  return mods;
}

// Reports go to --out when given, else to the command's output stream.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out_path, std::ios::binary);
  if (!file) throw ModelError("cannot write '" + cfg.out_path + "'");
  file << text;
}

void add_network_options(CLI::App* cmd, RunConfig& cfg) {
  auto* b = cmd->add_option("--builtin", cfg.builtin_name, "Built-in network")
                ->check(CLI::IsMember(std::vector<std::string>(builtin_names().begin(), builtin_names().end())));
  auto* n = cmd->add_option("--net", cfg.net_path, "Network description file");
  b->excludes(n);
  cmd->add_option("--batch", cfg.batch, "Batch size")->check(CLI::PositiveNumber);
}

void add_format_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"table", "csv", "json"}));
  cmd->add_option("--out", cfg.out_path, "Write the report to this file");
}

void add_energy_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--arch", cfg.arch_path, "Architecture description file");
  cmd->add_option("--bits", cfg.bits, "Input and weight bitwidth");
  cmd->add_option("--density-in", cfg.density_in, "Input density in (0, 1]");
  cmd->add_option("--density-w", cfg.density_w, "Weight density in (0, 1]");
}

int cmd_stats(const RunConfig& cfg, std::ostream& out) {
  const auto stats = network_stats(load_resolved(cfg));
  std::ostringstream os;
  report::write_stats(os, stats, format_of(cfg));
  emit(cfg, out, os.str());
  return kExitOk;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const auto kind = parse_dataflow(cfg.dataflow);
  if (!kind) throw UsageError("unknown dataflow '" + cfg.dataflow + "'");
  const auto energy = network_energy(load_resolved(cfg), *kind, load_arch_config(cfg), modifiers_of(cfg));
  std::ostringstream os;
  report::write_energy(os, energy, format_of(cfg));
  emit(cfg, out, os.str());
  return kExitOk;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  const auto cmp = compare_dataflows(load_resolved(cfg), load_arch_config(cfg), modifiers_of(cfg));
  std::ostringstream os;
  report::write_comparison(os, cmp, format_of(cfg));
  emit(cfg, out, os.str());
  return kExitOk;
}

int cmd_kernels_verify(const RunConfig& cfg, std::ostream& out) {
  if (cfg.size < 3) throw ModelError("--size must be >= 3 for 3x3 filters");
  if (cfg.instances < 1) throw ModelError("--instances must be >= 1");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> channels(1, 4);

  const std::array<const char*, 6> names{"direct-im2col", "direct-winograd", "direct-fft",
                                         "im2col-winograd", "im2col-fft",    "winograd-fft"};
  const std::array<double, 6> tolerance{1e-9, 1e-6, 1e-6, 1e-6, 1e-6, 1e-6};
  std::array<double, 6> worst{};
  for (int i = 0; i < cfg.instances; ++i) {
    const auto c = channels(rng), m = channels(rng);
    const auto input = random_tensor<double>({c, cfg.size, cfg.size}, rng);
    const auto filters = random_tensor<double>({m, c, 3, 3}, rng);
    const std::array outputs{conv_direct(input, filters), conv_im2col(input, filters),
                             conv_winograd_f22_33(input, filters), conv_fft(input, filters)};
    std::size_t k = 0;
    for (std::size_t a = 0; a < outputs.size(); ++a)
      for (std::size_t b = a + 1; b < outputs.size(); ++b, ++k)
        worst[k] = std::max(worst[k], max_relative_deviation(outputs[a], outputs[b]));
  }

  bool ok = true;
  std::ostringstream os;
  const auto format = format_of(cfg);
  if (format == Format::Json) {
    json j = json::array();
    for (std::size_t k = 0; k < names.size(); ++k)
      j.push_back({{"pair", names[k]}, {"max_relative_deviation", worst[k]}, {"tolerance", tolerance[k]},
                   {"pass", worst[k] <= tolerance[k]}});
    os << j.dump(2) << "\n";
  } else {
    if (format == Format::Csv) os << "pair,max_relative_deviation,tolerance,pass\n";
    for (std::size_t k = 0; k < names.size(); ++k) {
      const bool pass = worst[k] <= tolerance[k];
      if (format == Format::Csv)
        fmt::print(os, "{},{},{},{}\n", names[k], worst[k], tolerance[k], pass ? "true" : "false");
      else
        fmt::print(os, "{:<16} max deviation {:.3e} (tolerance {:.0e}) {}\n", names[k], worst[k], tolerance[k],
                   pass ? "ok" : "FAIL");
    }
  }
  for (std::size_t k = 0; k < names.size(); ++k) ok = ok && worst[k] <= tolerance[k];
  emit(cfg, out, os.str());
  return ok ? kExitOk : kExitInputError;
}

int cmd_kernels_count(const RunConfig& cfg, std::ostream& out) {
  std::vector<MultCount> counts{mult_count(TransformMethod::Direct, cfg.output_size, cfg.filter_size),
                                mult_count(TransformMethod::Fft, cfg.output_size, cfg.filter_size)};
  if (cfg.filter_size == 3) counts.push_back(mult_count(TransformMethod::Winograd, cfg.output_size, 3));
  counts.push_back(mult_count(TransformMethod::Strassen, 1, 1, cfg.matrix_size));
  std::ostringstream os;
  report::write_mult_counts(os, counts, format_of(cfg));
  emit(cfg, out, os.str());
  return kExitOk;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open '" + path + "': file not found");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cmd_compress(const RunConfig& cfg, std::ostream& out) {
  if (cfg.encode && cfg.decode) throw UsageError("--encode and --decode are exclusive");
  if (cfg.encode || cfg.decode) {
    if (cfg.in_path.empty()) throw UsageError("--encode/--decode need --in");
    const auto raw = read_bytes(cfg.in_path);
    std::string payload;
    if (cfg.encode) {
      if (raw.size() % 2 != 0) throw ModelError("input is not a whole number of 16-bit words");
      std::vector<std::uint16_t> words(raw.size() / 2);
      for (std::size_t i = 0; i < words.size(); ++i)
        words[i] = static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
      const auto bytes = rle_encode(words);
      payload.assign(bytes.begin(), bytes.end());
    } else {
      for (auto w : rle_decode(raw)) {
        payload.push_back(static_cast<char>(w & 0xFF));
        payload.push_back(static_cast<char>(w >> 8));
      }
    }
    emit(cfg, out, payload);
    return kExitOk;
  }

  if (cfg.n == 0) throw ModelError("--n must be >= 1");
  const auto stream = cfg.relu_mean ? synthetic_relu_stream(cfg.n, *cfg.relu_mean, cfg.seed)
                                    : synthetic_sparse_stream(cfg.n, cfg.sparsity, cfg.seed);
  const auto stats = sparse_stats(stream);
  const auto pairs = rle_pairs(stream).size();
  const auto bytes = rle_encode(stream);
  const bool lossless = rle_decode(bytes) == stream;
  const double ratio = compression_ratio(stream);
  const std::string workload = cfg.relu_mean ? fmt::format("relu(mean={})", *cfg.relu_mean)
                                             : fmt::format("iid(sparsity={})", cfg.sparsity);

  std::ostringstream os;
  switch (format_of(cfg)) {
    case Format::Json:
      os << json{{"workload", workload},     {"words", stats.elements}, {"zeros", stats.zeros},
                 {"density", stats.density}, {"pairs", pairs},          {"bytes", bytes.size()},
                 {"ratio", ratio},           {"lossless", lossless}}
                .dump(2)
         << "\n";
      break;
    case Format::Csv:
      os << "workload,words,zeros,density,pairs,bytes,ratio,lossless\n";
      fmt::print(os, "{},{},{},{},{},{},{},{}\n", workload, stats.elements, stats.zeros, stats.density, pairs,
                 bytes.size(), ratio, lossless ? "true" : "false");
      break;
    case Format::Table:
      fmt::print(os, "workload: {}\nwords: {}  zeros: {}  density: {:.4f}\npairs: {}  bytes: {}\n", workload,
                 stats.elements, stats.zeros, stats.density, pairs, bytes.size());
      fmt::print(os, "ratio: {:.4f}\nlossless: {}\n", ratio, lossless ? "yes" : "NO");
      break;
  }
  emit(cfg, out, os.str());
  return lossless ? kExitOk : kExitInputError;
}

int cmd_prune(const RunConfig& cfg, std::ostream& out) {
  const auto net = load_resolved(cfg);
  std::vector<const ResolvedLayer*> layers;
  std::int64_t total = 0;
  for (const auto& l : net.layers)
    if (is_compute(l.kind())) {
      layers.push_back(&l);
      total += layer_stats(l, 1).weight_words;
    }
  if (layers.empty()) throw ModelError("network has no conv or fc layers to prune");
  if (total > cfg.max_weights)
    throw ModelError(fmt::format("network has {} weights; raise --max-weights to prune it", total));

  std::vector<double> cost;
  if (cfg.order == "energy") {
    const auto kind = parse_dataflow(cfg.dataflow.empty() ? "rs" : cfg.dataflow);
    if (!kind) throw UsageError("unknown dataflow '" + cfg.dataflow + "'");
    const auto energy = network_energy(net, *kind, load_arch_config(cfg), modifiers_of(cfg));
    for (std::size_t i = 0; i < layers.size(); ++i)
      cost.push_back(energy.layers[i].total() / static_cast<double>(layer_stats(*layers[i], 1).weight_words));
  }

  // Synthetic weights, N(0, 1/fan_in) per layer.
  std::mt19937_64 rng(cfg.seed);
  std::vector<DenseTensor<float>> weights;
  for (const auto* l : layers) {
    const auto count = layer_stats(*l, 1).weight_words;
    const auto fan_in = static_cast<double>(count) / l->out_channels;
    std::normal_distribution<float> dist(0.0f, static_cast<float>(1.0 / std::sqrt(fan_in)));
    DenseTensor<float> t({count});
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()(i) = dist(rng);
    weights.push_back(std::move(t));
  }
  const auto pruned = prune_global<float>(weights, cfg.fraction, cost);

  std::ostringstream os;
  const auto format = format_of(cfg);
  json j;
  json rows = json::array();
  if (format == Format::Csv) os << "layer,weights,zeros,density\n";
  if (format == Format::Table)
    fmt::print(os, "network: {}  fraction: {}  order: {}\n{:<24} {:>12} {:>12} {:>9}\n", net.name, cfg.fraction,
               cfg.order, "layer", "weights", "zeros", "density");
  std::int64_t zeros = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto s = sparse_stats(pruned[i].pruned);
    zeros += s.zeros;
    if (format == Format::Csv) fmt::print(os, "{},{},{},{}\n", layers[i]->name(), s.elements, s.zeros, s.density);
    if (format == Format::Table)
      fmt::print(os, "{:<24} {:>12} {:>12} {:>9.4f}\n", layers[i]->name(), s.elements, s.zeros, s.density);
    rows.push_back({{"layer", layers[i]->name()}, {"weights", s.elements}, {"zeros", s.zeros}, {"density", s.density}});
  }
  const double density = 1.0 - static_cast<double>(zeros) / static_cast<double>(total);
  if (format == Format::Csv) fmt::print(os, "total,{},{},{}\n", total, zeros, density);
  if (format == Format::Table) fmt::print(os, "{:<24} {:>12} {:>12} {:>9.4f}\n", "total", total, zeros, density);
  if (format == Format::Json) {
    j["network"] = net.name;
    j["fraction"] = cfg.fraction;
    j["order"] = cfg.order;
    j["layers"] = rows;
    j["total"] = {{"weights", total}, {"zeros", zeros}, {"density", density}};
    os << j.dump(2) << "\n";
  }
  emit(cfg, out, os.str());
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Analytical energy and cost model for DNN accelerators", "dnnmodel"};
  app.require_subcommand(1);

  // Network subcommands share every common flag; those a subcommand does not use are ignored.
  auto network_command = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    add_network_options(cmd, cfg);
    add_format_options(cmd, cfg);
    add_energy_options(cmd, cfg);
    cmd->add_option("--dataflow", cfg.dataflow, "ws, os, nlr or rs")->check(CLI::IsMember({"ws", "os", "nlr", "rs"}));
    cmd->add_option("--seed", cfg.seed, "Random seed");
    return cmd;
  };

  auto* stats = network_command("stats", "Per-layer and total weight/MAC counts");
  auto* analyze = network_command("analyze", "Energy breakdown for one dataflow");
  analyze->get_option("--dataflow")->required();
  auto* compare = network_command("compare", "Energy of all four dataflows, normalized to the best");

  auto* kernels = app.add_subcommand("kernels", "Reference convolution kernels");
  kernels->require_subcommand(1);
  auto* verify = kernels->add_subcommand("verify", "Cross-check direct, im2col, Winograd and FFT convolution");
  verify->add_option("--size", cfg.size, "Input height and width");
  verify->add_option("--instances", cfg.instances, "Random instances to check");
  verify->add_option("--seed", cfg.seed, "Random seed");
  add_format_options(verify, cfg);
  auto* count = kernels->add_subcommand("count", "Multiplication counts per transform method");
  count->add_option("--output-size", cfg.output_size, "Output size No");
  count->add_option("--filter-size", cfg.filter_size, "Filter size Nf");
  count->add_option("--matrix-size", cfg.matrix_size, "Matrix size N for Strassen");
  count->add_option("--seed", cfg.seed, "Random seed (unused; accepted for uniformity)");
  add_format_options(count, cfg);

  auto* compress = app.add_subcommand("compress", "Run-length codec for activation streams");
  compress->add_flag("--encode", cfg.encode, "Encode little-endian 16-bit words from --in");
  compress->add_flag("--decode", cfg.decode, "Decode a bitstream from --in");
  compress->add_option("--in", cfg.in_path, "Input file for --encode/--decode");
  compress->add_option("--sparsity", cfg.sparsity, "Zero fraction of the synthetic i.i.d. stream")
      ->check(CLI::Range(0.0, 1.0));
  compress->add_option("--relu-mean", cfg.relu_mean, "Use a ReLU(N(mean,1)) synthetic stream instead");
  compress->add_option("--n", cfg.n, "Synthetic stream length");
  compress->add_option("--seed", cfg.seed, "Random seed");
  add_format_options(compress, cfg);

  auto* prune = network_command("prune", "Magnitude pruning of synthetic weights");
  prune->add_option("--fraction", cfg.fraction, "Fraction of weights to remove")->check(CLI::Range(0.0, 1.0));
  prune->add_option("--order", cfg.order, "magnitude or energy")->check(CLI::IsMember({"magnitude", "energy"}));
  prune->add_option("--max-weights", cfg.max_weights, "Refuse networks larger than this");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  }

  try {
    if (stats->parsed()) return cmd_stats(cfg, out);
    if (analyze->parsed()) return cmd_analyze(cfg, out);
    if (compare->parsed()) return cmd_compare(cfg, out);
    if (verify->parsed()) return cmd_kernels_verify(cfg, out);
    if (count->parsed()) return cmd_kernels_count(cfg, out);
    if (compress->parsed()) return cmd_compress(cfg, out);
    if (prune->parsed()) return cmd_prune(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitUsageError;
}

}  // namespace dnnmodel::cli
