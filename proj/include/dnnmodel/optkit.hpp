#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dnnmodel/errors.hpp"
#include "dnnmodel/tensor.hpp"

namespace dnnmodel {

struct SparseStats {
  std::int64_t elements = 0;
  std::int64_t zeros = 0;
  double density = 0.0;  // 1 - zeros/elements; 0 for an empty sequence
};

template <typename Range>
SparseStats sparse_stats(const Range& values) {
  SparseStats s;
  for (const auto& v : values) {
    ++s.elements;
    if (v == 0) ++s.zeros;
  }
  s.density = s.elements == 0 ? 0.0 : 1.0 - static_cast<double>(s.zeros) / static_cast<double>(s.elements);
  return s;
}

template <typename Scalar>
SparseStats sparse_stats(const DenseTensor<Scalar>& t) {
  return sparse_stats(std::span<const Scalar>(t.data().data(), static_cast<std::size_t>(t.size())));
}

template <typename Scalar>
struct PruneResult {
  DenseTensor<Scalar> pruned;
  Eigen::Array<bool, Eigen::Dynamic, 1> mask;  // true where the weight survives
};

/// Pruning across several tensors at once. Exactly floor(fraction * total) weights are zeroed, smallest
/// |w| / layer_cost first; ties go to the lower (tensor, flat index). An empty layer_cost means cost 1 for
/// every tensor, i.e. plain global magnitude pruning. Larger costs make a layer's weights go first.
template <typename Scalar>
std::vector<PruneResult<Scalar>> prune_global(std::span<const DenseTensor<Scalar>> layers, double fraction,
                                              std::span<const double> layer_cost = {}) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("prune fraction must be in [0, 1]");
  if (!layer_cost.empty() && layer_cost.size() != layers.size())
    throw ConfigError("need one cost per pruned tensor");
  for (double c : layer_cost)
    if (!(c > 0.0)) throw ConfigError("layer costs must be > 0");

  struct Slot {
    double score;
    std::uint32_t layer;
    Eigen::Index flat;
  };
  std::vector<Slot> slots;
  std::vector<PruneResult<Scalar>> out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const double cost = layer_cost.empty() ? 1.0 : layer_cost[l];
    const auto& data = layers[l].data();
    for (Eigen::Index i = 0; i < data.size(); ++i)
      slots.push_back({std::abs(static_cast<double>(data(i))) / cost, static_cast<std::uint32_t>(l), i});
    out.push_back({layers[l], Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(data.size(), true)});
  }

  const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(slots.size())));
  auto before = [](const Slot& a, const Slot& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.layer != b.layer) return a.layer < b.layer;
    return a.flat < b.flat;
  };
  std::nth_element(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(count), slots.end(), before);
  for (std::size_t i = 0; i < count; ++i) {
    auto& r = out[slots[i].layer];
    r.pruned.data()(slots[i].flat) = Scalar(0);
    r.mask(slots[i].flat) = false;
  }
  return out;
}

/// Zeroes exactly floor(fraction * n) entries with the smallest magnitude.
template <typename Scalar>
PruneResult<Scalar> prune_magnitude(const DenseTensor<Scalar>& weights, double fraction) {
  return std::move(prune_global<Scalar>(std::span(&weights, 1), fraction).front());
}

/// Symmetric uniform quantizer with step max|t| / (2^(bits-1) - 1). The level count is clamped to 1 at bits=1.
template <typename Scalar>
DenseTensor<Scalar> quantize_uniform(const DenseTensor<Scalar>& t, int bits) {
  if (bits < 1 || bits > 16) throw ConfigError("quantizer bits must be in [1, 16]");
  const Scalar peak = t.data().cwiseAbs().maxCoeff();
  DenseTensor<Scalar> out = t;
  if (peak == Scalar(0)) return out;
  const Scalar levels = static_cast<Scalar>(std::max((1 << (bits - 1)) - 1, 1));
  const Scalar step = peak / levels;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const Scalar k = std::round(t.data()(i) / step);
    // Extremes map back exactly, which keeps the quantizer idempotent.
    out.data()(i) = std::abs(k) == levels ? std::copysign(peak, k) : k * peak / levels;
  }
  return out;
}

// Run-length codec for 16-bit activation streams: big-endian packed 21-bit pairs of a 5-bit zero-run
// length and a 16-bit value, zero-padded to a byte boundary. A pair (r, v) decodes to r zeros then v.

inline constexpr int kRleRunBits = 5;
inline constexpr int kRleValueBits = 16;
inline constexpr int kRlePairBits = kRleRunBits + kRleValueBits;
inline constexpr std::uint32_t kRleMaxRun = (1u << kRleRunBits) - 1;

struct RlePair {
  std::uint8_t run = 0;
  std::uint16_t value = 0;

  friend bool operator==(const RlePair&, const RlePair&) = default;
};

/// Single-pass encoder with bounded state.
class RleEncoder {
 public:
  void push(std::uint16_t word);
  /// Flushes the trailing zero run and the final partial byte. No push() may follow.
  void finish();
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  const std::vector<RlePair>& pairs() const { return pairs_; }

 private:
  void emit(std::uint32_t run, std::uint16_t value);

  std::vector<std::uint8_t> bytes_;
  std::vector<RlePair> pairs_;
  std::uint64_t pending_ = 0;  // bits not yet written, right-aligned
  int pending_bits_ = 0;
  std::uint32_t run_ = 0;
  bool finished_ = false;
};

std::vector<RlePair> rle_pairs(std::span<const std::uint16_t> stream);
std::vector<std::uint8_t> rle_encode(std::span<const std::uint16_t> stream);
/// Throws ParseError on a truncated pair or non-zero padding.
std::vector<std::uint16_t> rle_decode(std::span<const std::uint8_t> bytes);

/// Raw bits (16 per word) over encoded payload bits (21 per pair). Throws ConfigError on an empty stream.
double compression_ratio(std::span<const std::uint16_t> stream);

/// i.i.d. stream: each word is zero with probability zero_fraction, otherwise uniform in [1, 65535].
std::vector<std::uint16_t> synthetic_sparse_stream(std::size_t n, double zero_fraction, std::uint64_t seed);

/// ReLU-like activations: max(0, z) with z ~ N(mean, 1), stored as Q8.8 fixed point.
std::vector<std::uint16_t> synthetic_relu_stream(std::size_t n, double mean, std::uint64_t seed);

}  // namespace dnnmodel
