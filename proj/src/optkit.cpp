#include "dnnmodel/optkit.hpp"

#include <random>

namespace dnnmodel {

void RleEncoder::emit(std::uint32_t run, std::uint16_t value) {
  pairs_.push_back({static_cast<std::uint8_t>(run), value});
  pending_ = (pending_ << kRlePairBits) | (static_cast<std::uint64_t>(run) << kRleValueBits) | value;
  pending_bits_ += kRlePairBits;
  while (pending_bits_ >= 8) {
    pending_bits_ -= 8;
    bytes_.push_back(static_cast<std::uint8_t>(pending_ >> pending_bits_));
  }
  pending_ &= (std::uint64_t{1} << pending_bits_) - 1;
}

void RleEncoder::push(std::uint16_t word) {
  if (finished_) throw ConfigError("push after finish");
  if (word != 0) {
    emit(run_, word);
    run_ = 0;
    return;
  }
  // A (31, 0) pair carries 31 zeros plus a literal zero.
  if (++run_ == kRleMaxRun + 1) {
    emit(kRleMaxRun, 0);
    run_ = 0;
  }
}

void RleEncoder::finish() {
  if (finished_) return;
  finished_ = true;
  if (run_ > 0) emit(run_ - 1, 0);
  run_ = 0;
  if (pending_bits_ > 0) bytes_.push_back(static_cast<std::uint8_t>(pending_ << (8 - pending_bits_)));
  pending_bits_ = 0;
  pending_ = 0;
}

namespace {

RleEncoder encode_all(std::span<const std::uint16_t> stream) {
  RleEncoder enc;
  for (auto w : stream) enc.push(w);
  enc.finish();
  return enc;
}

}  // namespace

std::vector<RlePair> rle_pairs(std::span<const std::uint16_t> stream) { return encode_all(stream).pairs(); }

std::vector<std::uint8_t> rle_encode(std::span<const std::uint16_t> stream) { return encode_all(stream).bytes(); }

std::vector<std::uint16_t> rle_decode(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint16_t> out;
  const std::size_t total_bits = bytes.size() * 8;
  std::size_t pos = 0;
  auto read = [&](int bits) {
    std::uint32_t v = 0;
    for (int i = 0; i < bits; ++i, ++pos) v = (v << 1) | ((bytes[pos / 8] >> (7 - pos % 8)) & 1u);
    return v;
  };
  while (total_bits - pos >= static_cast<std::size_t>(kRlePairBits)) {
    const auto run = read(kRleRunBits);
    const auto value = static_cast<std::uint16_t>(read(kRleValueBits));
    out.insert(out.end(), run, std::uint16_t{0});
    out.push_back(value);
  }
  const auto rest = total_bits - pos;
  if (rest >= 8) throw ParseError("truncated run-length pair at bit " + std::to_string(pos));
  if (read(static_cast<int>(rest)) != 0) throw ParseError("non-zero padding after the last run-length pair");
  return out;
}

double compression_ratio(std::span<const std::uint16_t> stream) {
  if (stream.empty()) throw ConfigError("compression ratio of an empty stream is undefined");
  const auto pairs = encode_all(stream).pairs().size();
  return static_cast<double>(kRleValueBits) * static_cast<double>(stream.size()) /
         (static_cast<double>(kRlePairBits) * static_cast<double>(pairs));
}

std::vector<std::uint16_t> synthetic_sparse_stream(std::size_t n, double zero_fraction, std::uint64_t seed) {
  if (!(zero_fraction >= 0.0 && zero_fraction <= 1.0)) throw ConfigError("sparsity must be in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution is_zero(zero_fraction);
  std::uniform_int_distribution<std::uint32_t> value(1, 0xFFFF);
  std::vector<std::uint16_t> out(n);
  for (auto& w : out) w = is_zero(rng) ? 0 : static_cast<std::uint16_t>(value(rng));
  return out;
}

std::vector<std::uint16_t> synthetic_relu_stream(std::size_t n, double mean, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(mean, 1.0);
  std::vector<std::uint16_t> out(n);
  for (auto& w : out) w = static_cast<std::uint16_t>(std::clamp(std::round(std::max(z(rng), 0.0) * 256.0), 0.0, 65535.0));
  return out;
}

}  // namespace dnnmodel
