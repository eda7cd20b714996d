#include "ash/simd/distance.hpp"

#if defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>

namespace ash::simd {

void distance_row_neon(double px, double py, const double* xs,
                       const double* ys, double* out, std::size_t n) {
  const float64x2_t vpx = vdupq_n_f64(px);
  const float64x2_t vpy = vdupq_n_f64(py);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(xs + i), vpx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(ys + i), vpy);
    const float64x2_t s = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    vst1q_f64(out + i, vsqrtq_f64(s));
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - px;
    const double dy = ys[i] - py;
    out[i] = std::sqrt(dx * dx + dy * dy);
  }
}

}  // namespace ash::simd

#endif
