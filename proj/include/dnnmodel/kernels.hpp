#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dnnmodel/errors.hpp"
#include "dnnmodel/tensor.hpp"

namespace dnnmodel {

/// Geometry of a stride/pad convolution of input [C,H,W] with filters [M,C,R,S].
struct ConvGeometry {
  Eigen::Index channels = 0;
  Eigen::Index height = 0;
  Eigen::Index width = 0;
  Eigen::Index filters = 0;
  Eigen::Index kernel_h = 0;
  Eigen::Index kernel_w = 0;
  Eigen::Index stride = 1;
  Eigen::Index pad = 0;
  Eigen::Index out_h = 0;
  Eigen::Index out_w = 0;
};

template <typename Scalar>
ConvGeometry conv_geometry(const DenseTensor<Scalar>& input, const DenseTensor<Scalar>& filters, int stride,
                           int pad) {
  if (input.rank() != 3) throw ShapeError("input must be [C,H,W]");
  if (filters.rank() != 4) throw ShapeError("filters must be [M,C,R,S]");
  if (filters.extent(1) != input.extent(0)) throw ShapeError("filter channels do not match input channels");
  if (stride < 1 || pad < 0) throw ShapeError("stride must be >= 1 and pad >= 0");
  ConvGeometry g;
  g.channels = input.extent(0);
  g.height = input.extent(1);
  g.width = input.extent(2);
  g.filters = filters.extent(0);
  g.kernel_h = filters.extent(2);
  g.kernel_w = filters.extent(3);
  g.stride = stride;
  g.pad = pad;
  const auto span_h = g.height + 2 * g.pad - g.kernel_h;
  const auto span_w = g.width + 2 * g.pad - g.kernel_w;
  if (span_h < 0 || span_w < 0) throw ShapeError("filter larger than padded input");
  g.out_h = span_h / g.stride + 1;
  g.out_w = span_w / g.stride + 1;
  return g;
}

/// Seven-loop reference: out[m,e,f] = sum_{c,r,s} in[c, e*U+r-pad, f*U+s-pad] * w[m,c,r,s].
template <typename Scalar>
DenseTensor<Scalar> conv_direct(const DenseTensor<Scalar>& input, const DenseTensor<Scalar>& filters, int stride = 1,
                                int pad = 0) {
  const auto g = conv_geometry(input, filters, stride, pad);
  DenseTensor<Scalar> out({g.filters, g.out_h, g.out_w});
  for (Eigen::Index m = 0; m < g.filters; ++m)
    for (Eigen::Index e = 0; e < g.out_h; ++e)
      for (Eigen::Index f = 0; f < g.out_w; ++f) {
        Scalar acc{0};
        for (Eigen::Index c = 0; c < g.channels; ++c)
          for (Eigen::Index r = 0; r < g.kernel_h; ++r) {
            const auto y = e * g.stride + r - g.pad;
            if (y < 0 || y >= g.height) continue;
            for (Eigen::Index s = 0; s < g.kernel_w; ++s) {
              const auto x = f * g.stride + s - g.pad;
              if (x < 0 || x >= g.width) continue;
              acc += input(c, y, x) * filters(m, c, r, s);
            }
          }
        out(m, e, f) = acc;
      }
  return out;
}

/// Toeplitz lowering: (C*R*S) x (E*F) patch matrix, one column per output pixel.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> im2col(const DenseTensor<Scalar>& input,
                                                             const ConvGeometry& g) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> patches =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(g.channels * g.kernel_h * g.kernel_w,
                                                                   g.out_h * g.out_w);
  for (Eigen::Index c = 0; c < g.channels; ++c)
    for (Eigen::Index r = 0; r < g.kernel_h; ++r)
      for (Eigen::Index s = 0; s < g.kernel_w; ++s) {
        const auto row = (c * g.kernel_h + r) * g.kernel_w + s;
        for (Eigen::Index e = 0; e < g.out_h; ++e) {
          const auto y = e * g.stride + r - g.pad;
          if (y < 0 || y >= g.height) continue;
          for (Eigen::Index f = 0; f < g.out_w; ++f) {
            const auto x = f * g.stride + s - g.pad;
            if (x >= 0 && x < g.width) patches(row, e * g.out_w + f) = input(c, y, x);
          }
        }
      }
  return patches;
}

template <typename Scalar>
DenseTensor<Scalar> conv_im2col(const DenseTensor<Scalar>& input, const DenseTensor<Scalar>& filters,
                                int stride = 1, int pad = 0) {
  const auto g = conv_geometry(input, filters, stride, pad);
  const auto patches = im2col(input, g);
  const auto k = g.channels * g.kernel_h * g.kernel_w;
  DenseTensor<Scalar> out({g.filters, g.out_h, g.out_w});
  out.matrix(g.filters, g.out_h * g.out_w).noalias() = filters.matrix(g.filters, k) * patches;
  return out;
}

namespace winograd {

// F(2x2, 3x3) with interpolation points {0, 1, -1}.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> input_transform() {
  Eigen::Matrix<Scalar, 4, 4> bt;
  bt << 1, 0, -1, 0,
        0, 1, 1, 0,
        0, -1, 1, 0,
        0, 1, 0, -1;
  return bt;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 3> filter_transform() {
  Eigen::Matrix<Scalar, 4, 3> g;
  g << 1, 0, 0,
       0.5, 0.5, 0.5,
       0.5, -0.5, 0.5,
       0, 0, 1;
  return g;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 4> output_transform() {
  Eigen::Matrix<Scalar, 2, 4> at;
  at << 1, 1, 1, 0,
        0, 1, -1, -1;
  return at;
}

inline constexpr int kTileMultiplications = 16;   // element-wise products per 2x2 output tile
inline constexpr int kDirectTileMultiplications = 36;  // 4 outputs x 9 taps

}  // namespace winograd

/// Winograd F(2x2, 3x3). Odd output extents are handled by zero-extending the last tile and cropping.
template <typename Scalar>
DenseTensor<Scalar> conv_winograd_f22_33(const DenseTensor<Scalar>& input, const DenseTensor<Scalar>& filters,
                                         int pad = 0) {
  const auto g = conv_geometry(input, filters, 1, pad);
  if (g.kernel_h != 3 || g.kernel_w != 3) throw ShapeError("Winograd F(2x2,3x3) needs a 3x3 filter");
  using Mat4 = Eigen::Matrix<Scalar, 4, 4>;

  const auto bt = winograd::input_transform<Scalar>();
  const auto gm = winograd::filter_transform<Scalar>();
  const auto at = winograd::output_transform<Scalar>();

  const auto tiles_h = (g.out_h + 1) / 2;
  const auto tiles_w = (g.out_w + 1) / 2;
  // Zero-padded source covering every 4x4 input tile.
  DenseTensor<Scalar> src({g.channels, 2 * tiles_h + 2, 2 * tiles_w + 2});
  for (Eigen::Index c = 0; c < g.channels; ++c)
    for (Eigen::Index y = 0; y < g.height; ++y)
      for (Eigen::Index x = 0; x < g.width; ++x) src(c, y + g.pad, x + g.pad) = input(c, y, x);

  std::vector<Mat4> transformed_filters(static_cast<std::size_t>(g.filters * g.channels));
  for (Eigen::Index m = 0; m < g.filters; ++m)
    for (Eigen::Index c = 0; c < g.channels; ++c) {
      Eigen::Matrix<Scalar, 3, 3> w;
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) w(r, s) = filters(m, c, r, s);
      transformed_filters[static_cast<std::size_t>(m * g.channels + c)] = gm * w * gm.transpose();
    }

  DenseTensor<Scalar> out({g.filters, g.out_h, g.out_w});
  std::vector<Mat4> transformed_tiles(static_cast<std::size_t>(g.channels));
  for (Eigen::Index th = 0; th < tiles_h; ++th)
    for (Eigen::Index tw = 0; tw < tiles_w; ++tw) {
      for (Eigen::Index c = 0; c < g.channels; ++c) {
        Mat4 d;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) d(i, j) = src(c, 2 * th + i, 2 * tw + j);
        transformed_tiles[static_cast<std::size_t>(c)] = bt * d * bt.transpose();
      }
      for (Eigen::Index m = 0; m < g.filters; ++m) {
        Mat4 acc = Mat4::Zero();
        for (Eigen::Index c = 0; c < g.channels; ++c)
          acc.array() += transformed_filters[static_cast<std::size_t>(m * g.channels + c)].array() *
                         transformed_tiles[static_cast<std::size_t>(c)].array();
        const Eigen::Matrix<Scalar, 2, 2> y = at * acc * at.transpose();
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            const auto e = 2 * th + i, f = 2 * tw + j;
            if (e < g.out_h && f < g.out_w) out(m, e, f) = y(i, j);
          }
      }
    }
  return out;
}

namespace fft {

constexpr std::int64_t next_pow2(std::int64_t n) {
  return n <= 1 ? 1 : static_cast<std::int64_t>(std::bit_ceil(static_cast<std::uint64_t>(n)));
}

/// In-place iterative radix-2 transform; size must be a power of two. Unnormalized in both directions.
template <typename Scalar>
void transform(std::complex<Scalar>* data, std::size_t n, std::size_t step, bool inverse) {
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    auto bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i * step], data[j * step]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const Scalar angle = (inverse ? 2 : -2) * std::numbers::pi_v<Scalar> / static_cast<Scalar>(len);
    const std::complex<Scalar> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<Scalar> w(1);
      for (std::size_t k = 0; k < len / 2; ++k) {
        auto& a = data[(i + k) * step];
        auto& b = data[(i + k + len / 2) * step];
        const auto t = b * w;
        b = a - t;
        a = a + t;
        w *= wlen;
      }
    }
  }
}

/// 2-D transform of an n x n row-major grid.
template <typename Scalar>
void transform_2d(std::vector<std::complex<Scalar>>& grid, std::size_t n, bool inverse) {
  for (std::size_t r = 0; r < n; ++r) transform(grid.data() + r * n, n, 1, inverse);
  for (std::size_t c = 0; c < n; ++c) transform(grid.data() + c, n, n, inverse);
}

}  // namespace fft

/// Convolution through the frequency domain: correlation = IFFT(sum_c X_c * conj(W_mc)).
template <typename Scalar>
DenseTensor<Scalar> conv_fft(const DenseTensor<Scalar>& input, const DenseTensor<Scalar>& filters, int pad = 0) {
  const auto g = conv_geometry(input, filters, 1, pad);
  const auto h = g.height + 2 * g.pad, w = g.width + 2 * g.pad;
  const auto n = static_cast<std::size_t>(
      fft::next_pow2(std::max(h + g.kernel_h - 1, w + g.kernel_w - 1)));
  using Complex = std::complex<Scalar>;

  std::vector<std::vector<Complex>> spectra(static_cast<std::size_t>(g.channels), std::vector<Complex>(n * n));
  for (Eigen::Index c = 0; c < g.channels; ++c) {
    auto& grid = spectra[static_cast<std::size_t>(c)];
    for (Eigen::Index y = 0; y < g.height; ++y)
      for (Eigen::Index x = 0; x < g.width; ++x)
        grid[static_cast<std::size_t>(y + g.pad) * n + static_cast<std::size_t>(x + g.pad)] = input(c, y, x);
    fft::transform_2d(grid, n, false);
  }

  DenseTensor<Scalar> out({g.filters, g.out_h, g.out_w});
  std::vector<Complex> acc(n * n), kernel(n * n);
  const Scalar norm = Scalar(1) / static_cast<Scalar>(n * n);
  for (Eigen::Index m = 0; m < g.filters; ++m) {
    std::fill(acc.begin(), acc.end(), Complex{});
    for (Eigen::Index c = 0; c < g.channels; ++c) {
      std::fill(kernel.begin(), kernel.end(), Complex{});
      for (Eigen::Index r = 0; r < g.kernel_h; ++r)
        for (Eigen::Index s = 0; s < g.kernel_w; ++s)
          kernel[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(s)] = filters(m, c, r, s);
      fft::transform_2d(kernel, n, false);
      const auto& x = spectra[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < n * n; ++i) acc[i] += x[i] * std::conj(kernel[i]);
    }
    fft::transform_2d(acc, n, true);
    for (Eigen::Index e = 0; e < g.out_h; ++e)
      for (Eigen::Index f = 0; f < g.out_w; ++f)
        out(m, e, f) = acc[static_cast<std::size_t>(e) * n + static_cast<std::size_t>(f)].real() * norm;
  }
  return out;
}

/// max|a - b| / max|a|, or the absolute deviation when a is all zeros.
template <typename Scalar>
Scalar max_relative_deviation(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b) {
  if (a.shape() != b.shape()) throw ShapeError("compared tensors differ in shape");
  const Scalar diff = (a.data() - b.data()).cwiseAbs().maxCoeff();
  const Scalar peak = a.data().cwiseAbs().maxCoeff();
  return peak > Scalar(0) ? diff / peak : diff;
}

enum class TransformMethod { Direct, Fft, Strassen, Winograd };

std::string_view to_string(TransformMethod method);

struct MultCount {
  TransformMethod method = TransformMethod::Direct;
  std::int64_t multiplications = 0;
  std::int64_t output_size = 0;  // No (outputs are No x No)
  std::int64_t filter_size = 0;  // Nf (filters are Nf x Nf)
  std::int64_t matrix_size = 0;  // N (Strassen multiplies N x N matrices)
};

/// Multiplication-count estimate for one transform method. Throws ConfigError on unsupported combinations.
MultCount mult_count(TransformMethod method, std::int64_t output_size, std::int64_t filter_size,
                     std::int64_t matrix_size = 1);

}  // namespace dnnmodel
