// SPDX-License-Identifier: Apache-2.0
//
// spectra: data-parallel inner-loop kernels.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (aarch64) variant selected once at
// runtime. All variants are bit-identical to the scalar reference: the
// scalar code mirrors the vector lane structure (4 independent accumulators,
// fused multiply-add) so that equivalence can be asserted exactly rather
// than within a tolerance. SPECTRA_FORCE_SCALAR=1 pins the scalar path.

#pragma once

#include <cstddef>
#include <cstdint>

namespace spectra::kernels {

/// Index of the minimum of values[i] + lambda * points[i] over i in [0, n).
/// Ties resolve to the smallest index. n must be >= 1.
std::size_t argmin_affine(const double* values, const double* points,
                          std::size_t n, double lambda);

/// Sum of v[0..n) with a fixed 4-lane blocked reduction order.
double sum(const double* v, std::size_t n);

/// Minimum of b[i] - a[i] over i in [0, n) and the index attaining it
/// (smallest index on ties). Used by upper-bound and dominance scans.
struct GapResult
{
    double gap;
    std::size_t index;
};
GapResult min_gap(const double* a, const double* b, std::size_t n);

/// Name of the dispatched implementation ("scalar", "avx2", "neon").
const char* active_backend();

namespace detail {
std::size_t argmin_affine_scalar(const double*, const double*, std::size_t, double);
double sum_scalar(const double*, std::size_t);
GapResult min_gap_scalar(const double*, const double*, std::size_t);
#if defined(__x86_64__) || defined(_M_X64)
std::size_t argmin_affine_avx2(const double*, const double*, std::size_t, double);
double sum_avx2(const double*, std::size_t);
GapResult min_gap_avx2(const double*, const double*, std::size_t);
#endif
#if defined(__aarch64__)
std::size_t argmin_affine_neon(const double*, const double*, std::size_t, double);
double sum_neon(const double*, std::size_t);
GapResult min_gap_neon(const double*, const double*, std::size_t);
#endif
} // namespace detail

} // namespace spectra::kernels
