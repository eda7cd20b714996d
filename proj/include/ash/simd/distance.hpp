#pragma once

#include <cstddef>

// Euclidean distance kernels used by the cost-matrix builders and the
// nearest-tower searches. A scalar reference implementation is always
// available; an AVX2 (or NEON) variant is selected at runtime when the CPU
// supports it. All variants perform the same operation sequence
// (sub, mul, add, sqrt — no FMA contraction), so results are bit-identical
// and the equivalence tests compare exactly.

namespace ash::simd {

enum class Isa { Scalar, Avx2, Neon };

// Active instruction set for the dispatched entry points.
Isa active_isa();
const char* isa_name(Isa isa);

// out[i] = sqrt((xs[i]-px)^2 + (ys[i]-py)^2), dispatched.
void distance_row(double px, double py, const double* xs, const double* ys,
                  double* out, std::size_t n);

// Index of the point nearest to (px, py); ties break to the smallest index.
// n must be > 0.
std::size_t nearest_point(double px, double py, const double* xs,
                          const double* ys, std::size_t n);

// Reference and vector variants, exposed for equivalence testing.
void distance_row_scalar(double px, double py, const double* xs,
                         const double* ys, double* out, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
void distance_row_avx2(double px, double py, const double* xs,
                       const double* ys, double* out, std::size_t n);
#endif
#if defined(__ARM_NEON)
void distance_row_neon(double px, double py, const double* xs,
                       const double* ys, double* out, std::size_t n);
#endif

}  // namespace ash::simd
