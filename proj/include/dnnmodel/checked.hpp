#pragma once

#include <cstdint>
#include <string>

#include "dnnmodel/errors.hpp"

namespace dnnmodel {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("count exceeds 2^63-1");
  return r;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("count exceeds 2^63-1");
  return r;
}

template <typename... Ts>
std::int64_t checked_product(std::int64_t first, Ts... rest) {
  std::int64_t r = first;
  ((r = checked_mul(r, static_cast<std::int64_t>(rest))), ...);
  return r;
}

/// Ceiling division for non-negative numerator and positive denominator.
inline std::int64_t ceil_div(std::int64_t num, std::int64_t den) { return num / den + (num % den != 0 ? 1 : 0); }

}  // namespace dnnmodel
