#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dnnmodel/errors.hpp"
#include "dnnmodel/netmodel.hpp"
#include "support/layers.hpp"

using namespace dnnmodel;

namespace {

int count_kind(const NetworkSpec& net, LayerKind kind) {
  int n = 0;
  for (const auto& l : net.layers) n += l.kind == kind;
  return n;
}

const char* kMinimal = R"({"name": "one", "input": {"channels": 1, "height": 1, "width": 1},
  "layers": [{"type": "conv", "name": "c", "out_channels": 1, "kernel": [1, 1]}]})";

}  // namespace

TEST_CASE("minimal document parses to one layer") {
  const auto net = parse_network(kMinimal);
  REQUIRE(net.layers.size() == 1);
  CHECK(net.layers[0].kind == LayerKind::Conv);
  CHECK(net.layers[0].out_channels == 1);
  CHECK(net.layers[0].groups == 1);
  CHECK(net.layers[0].has_bias);
  CHECK(net.input == InputShape{1, 1, 1});
}

TEST_CASE("alexnet has 5 conv and 3 fc layers") {
  const auto net = builtin("alexnet");
  CHECK(count_kind(net, LayerKind::Conv) == 5);
  CHECK(count_kind(net, LayerKind::FullyConnected) == 3);
}

TEST_CASE("lenet5 has 2 conv and 2 fc layers") {
  const auto net = builtin("lenet5");
  CHECK(count_kind(net, LayerKind::Conv) == 2);
  CHECK(count_kind(net, LayerKind::FullyConnected) == 2);
}

TEST_CASE("vgg16 has 16 weight layers, 13 of them conv") {
  const auto net = builtin("vgg16");
  CHECK(count_kind(net, LayerKind::Conv) == 13);
  CHECK(count_kind(net, LayerKind::Conv) + count_kind(net, LayerKind::FullyConnected) == 16);
}

TEST_CASE("unknown built-in name") {
  CHECK_THROWS_AS(builtin("mobilenet"), ModelError);
  CHECK_THROWS_WITH_AS(builtin("mobilenet"), doctest::Contains("mobilenet"), ModelError);
}

TEST_CASE("stride 0 names the offending layer") {
  const char* doc = R"({"name": "bad", "input": {"channels": 1, "height": 4, "width": 4},
    "layers": [{"type": "conv", "name": "first", "out_channels": 1, "kernel": [1, 1]},
               {"type": "conv", "name": "second", "out_channels": 1, "kernel": [1, 1], "stride": 0}]})";
  CHECK_THROWS_WITH_AS(parse_network(doc), doctest::Contains("layer 1 (second)"), ParseError);
}

TEST_CASE("semantic errors") {
  auto with_layer = [](const std::string& layer) {
    return R"({"name": "n", "input": {"channels": 2, "height": 4, "width": 4}, "layers": [)" + layer + "]}";
  };
  CHECK_THROWS_AS(parse_network("{"), ParseError);
  CHECK_THROWS_AS(parse_network("[]"), ParseError);
  CHECK_THROWS_AS(parse_network(with_layer(R"({"type": "deconv", "name": "x", "out_channels": 1})")), ParseError);
  CHECK_THROWS_AS(parse_network(with_layer(R"({"type": "conv", "name": "x"})")), ParseError);
  CHECK_THROWS_AS(parse_network(with_layer(R"({"type": "conv", "name": "x", "out_channels": -3})")), ParseError);
  CHECK_THROWS_AS(parse_network(with_layer(R"({"type": "conv", "name": "x", "out_channels": 1, "pad": -1})")),
                  ParseError);
  CHECK_THROWS_AS(parse_network(with_layer(R"({"type": "conv", "name": "x", "out_channels": 1, "color": 1})")),
                  ParseError);
  CHECK_THROWS_AS(parse_network(with_layer(R"({"type": "conv", "name": "x", "out_channels": 3, "groups": 2})")),
                  ParseError);
  CHECK_THROWS_AS(
      parse_network(R"({"name": "n", "input": {"channels": 1, "height": 1, "width": 1}, "layers": []})"),
      ParseError);
  CHECK_THROWS_AS(parse_network(R"({"name": "n", "input": {"channels": 1, "height": 1, "width": 1},
      "layers": [{"type": "act", "name": "a"}], "extra": 1})"),
                  ParseError);
}

TEST_CASE("alexnet conv1 resolves to 55x55") {
  const auto net = resolve_shapes(builtin("alexnet"));
  const auto& conv1 = net.layers.front();
  CHECK(conv1.name() == "conv1");
  CHECK(conv1.in_height == 227);
  CHECK(conv1.out_height == 55);
  CHECK(conv1.out_width == 55);
  CHECK(conv1.out_channels == 96);
}

TEST_CASE("size-preserving padding") {
  const auto l = testing::conv_layer({.c = 3, .h = 224, .w = 224, .m = 8, .r = 3, .s = 3, .pad = 1});
  CHECK(l.out_height == 224);
  CHECK(l.out_width == 224);
}

TEST_CASE("shape underflow and divisibility") {
  CHECK_THROWS_AS(testing::conv_layer({.c = 1, .h = 2, .w = 2, .m = 1, .r = 3, .s = 3}), ShapeError);
  CHECK_THROWS_AS(testing::conv_layer({.c = 3, .h = 4, .w = 4, .m = 2, .groups = 2}), ShapeError);
  CHECK_THROWS_AS(resolve_shapes(builtin("lenet5"), 0), ShapeError);
}

TEST_CASE("fc resolves as a full-extent conv") {
  const auto net = resolve_shapes(builtin("alexnet"));
  for (const auto& l : net.layers) {
    if (l.kind() != LayerKind::FullyConnected) continue;
    CHECK(l.kernel_h == l.in_height);
    CHECK(l.kernel_w == l.in_width);
    CHECK(l.out_height == 1);
    CHECK(l.out_width == 1);
    CHECK(l.groups() == 1);
  }
}

TEST_CASE("built-ins resolve and keep consecutive shapes consistent") {
  for (auto name : builtin_names()) {
    CAPTURE(name);
    const auto spec = builtin(name);
    const auto net = resolve_shapes(spec);
    REQUIRE(net.layers.size() == spec.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
      const auto& l = net.layers[i];
      CHECK(l.out_height >= 1);
      CHECK(l.out_width >= 1);
      if (l.kind() == LayerKind::Conv) {
        CHECK(std::int64_t{l.out_height} * l.stride() <= l.in_height - l.kernel_h + 2 * l.pad() + l.stride());
        CHECK(std::int64_t{l.out_width} * l.stride() <= l.in_width - l.kernel_w + 2 * l.pad() + l.stride());
      }
      if (i + 1 < net.layers.size() && net.layers[i + 1].spec.inputs.empty()) {
        CHECK(net.layers[i + 1].in_channels == l.out_channels);
        CHECK(net.layers[i + 1].in_height == l.out_height);
        CHECK(net.layers[i + 1].in_width == l.out_width);
      }
    }
  }
}

TEST_CASE("serialize then parse round-trips") {
  for (auto name : builtin_names()) {
    CAPTURE(name);
    const auto net = builtin(name);
    const auto again = parse_network(serialize_network(net));
    CHECK(again == net);
    CHECK(serialize_network(again) == serialize_network(net));
  }
  const auto minimal = parse_network(kMinimal);
  CHECK(parse_network(serialize_network(minimal)) == minimal);
}

TEST_CASE("fc ignores kernel fields, non-compute layers carry no bias") {
  const auto net = parse_network(R"({"name": "n", "input": {"channels": 1, "height": 4, "width": 4}, "layers": [
    {"type": "pool", "name": "p", "kernel": [2, 2], "stride": 2},
    {"type": "fc", "name": "f", "out_channels": 3, "kernel": [9, 9], "stride": 5}]})");
  CHECK_FALSE(net.layers[0].has_bias);
  CHECK(net.layers[1].kernel_h == 1);
  CHECK(net.layers[1].stride == 1);
  const auto r = resolve_shapes(net);
  CHECK(r.layers[1].kernel_h == 2);
  CHECK(r.layers[1].out_height == 1);
}

TEST_CASE("concat and add merge branches") {
  const auto net = resolve_shapes(parse_network(R"({"name": "n", "input": {"channels": 4, "height": 8, "width": 8},
    "layers": [
      {"type": "conv", "name": "a", "out_channels": 2, "kernel": [1, 1]},
      {"type": "conv", "name": "b", "out_channels": 3, "kernel": [3, 3], "pad": 1, "inputs": ["input"]},
      {"type": "concat", "name": "cat", "inputs": ["a", "b"]},
      {"type": "conv", "name": "d", "out_channels": 5, "kernel": [1, 1], "inputs": ["input"]},
      {"type": "conv", "name": "e", "out_channels": 5, "kernel": [1, 1], "inputs": ["cat"]},
      {"type": "add", "name": "sum", "inputs": ["d", "e"]}]})"));
  CHECK(net.layers[1].in_channels == 4);
  CHECK(net.layers[2].out_channels == 5);
  CHECK(net.layers[4].in_channels == 5);
  CHECK(net.layers[5].out_channels == 5);
  CHECK(net.layers[5].out_height == 8);
}

TEST_CASE("lenet c3 uses the sparse connection table") {
  const auto net = resolve_shapes(builtin("lenet5"));
  const auto it = std::find_if(net.layers.begin(), net.layers.end(), [](auto& l) { return l.name() == "c3"; });
  REQUIRE(it != net.layers.end());
  int links = 0;
  for (int m = 0; m < it->out_channels; ++m)
    for (int c = 0; c < it->in_channels; ++c) links += it->connects(m, c);
  CHECK(links == 60);
  CHECK(it->connects(0, 0));
  CHECK_FALSE(it->connects(0, 5));
}

TEST_CASE("load_network reports missing files") {
  CHECK_THROWS_WITH_AS(load_network("/nonexistent/net.json"), doctest::Contains("not found"), ModelError);
  const auto path = std::filesystem::temp_directory_path() / "dnnmodel_netmodel_test.json";
  std::ofstream(path) << kMinimal;
  CHECK(load_network(path).layers.size() == 1);
  std::filesystem::remove(path);
}
