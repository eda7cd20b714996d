#include "ash/simd/distance.hpp"

#include <vector>

namespace ash::simd {

namespace {

using RowFn = void (*)(double, double, const double*, const double*, double*,
                       std::size_t);

Isa detect_isa() {
#if defined(__ARM_NEON)
  return Isa::Neon;
#elif defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
  return Isa::Scalar;
#else
  return Isa::Scalar;
#endif
}

RowFn select_row_fn(Isa isa) {
  switch (isa) {
#if defined(__ARM_NEON)
    case Isa::Neon: return &distance_row_neon;
#endif
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return &distance_row_avx2;
#endif
    default: return &distance_row_scalar;
  }
}

const Isa g_isa = detect_isa();
const RowFn g_row_fn = select_row_fn(g_isa);

}  // namespace

Isa active_isa() { return g_isa; }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "?";
}

void distance_row(double px, double py, const double* xs, const double* ys,
                  double* out, std::size_t n) {
  g_row_fn(px, py, xs, ys, out, n);
}

std::size_t nearest_point(double px, double py, const double* xs,
                          const double* ys, std::size_t n) {
  thread_local std::vector<double> buf;
  buf.resize(n);
  g_row_fn(px, py, xs, ys, buf.data(), n);
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (buf[i] < buf[best]) best = i;
  return best;
}

}  // namespace ash::simd
