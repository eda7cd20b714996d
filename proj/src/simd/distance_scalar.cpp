#include "ash/simd/distance.hpp"

#include <cmath>

namespace ash::simd {

void distance_row_scalar(double px, double py, const double* xs,
                         const double* ys, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - px;
    const double dy = ys[i] - py;
    out[i] = std::sqrt(dx * dx + dy * dy);
  }
}

}  // namespace ash::simd
