#include "dnnmodel/kernels.hpp"

#include <bit>

#include "dnnmodel/checked.hpp"

namespace dnnmodel {

std::string_view to_string(TransformMethod method) {
  switch (method) {
    case TransformMethod::Direct: return "direct";
    case TransformMethod::Fft: return "fft";
    case TransformMethod::Strassen: return "strassen";
    case TransformMethod::Winograd: return "winograd";
  }
  return "?";
}

MultCount mult_count(TransformMethod method, std::int64_t output_size, std::int64_t filter_size,
                     std::int64_t matrix_size) {
  if (output_size < 1 || filter_size < 1 || matrix_size < 1) throw ConfigError("sizes must be >= 1");
  MultCount out{method, 0, output_size, filter_size, matrix_size};
  const std::int64_t direct = checked_product(output_size, output_size, filter_size, filter_size);
  switch (method) {
    case TransformMethod::Direct:
      out.multiplications = direct;
      break;
    case TransformMethod::Fft: {
      // Two forward and one inverse n x n transform at n^2 log2(n) each, plus n^2 point-wise products.
      const std::int64_t n = fft::next_pow2(output_size + filter_size - 1);
      const std::int64_t log2n = std::countr_zero(static_cast<std::uint64_t>(n));
      const std::int64_t area = checked_mul(n, n);
      out.multiplications = checked_add(checked_product(3, area, log2n), area);
      break;
    }
    case TransformMethod::Strassen: {
      if (!std::has_single_bit(static_cast<std::uint64_t>(matrix_size)))
        throw ConfigError("Strassen count needs a power-of-two matrix size");
      std::int64_t count = 1;
      for (auto levels = std::countr_zero(static_cast<std::uint64_t>(matrix_size)); levels > 0; --levels)
        count = checked_mul(count, 7);
      out.multiplications = count;
      break;
    }
    case TransformMethod::Winograd:
      if (filter_size != 3) throw ConfigError("Winograd F(2x2,3x3) count needs a 3x3 filter");
      // 16 products per 2x2 tile instead of 36: direct / 2.25.
      out.multiplications = direct * winograd::kTileMultiplications / winograd::kDirectTileMultiplications;
      break;
  }
  return out;
}

}  // namespace dnnmodel
