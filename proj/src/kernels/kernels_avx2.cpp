// SPDX-License-Identifier: Apache-2.0
//
// AVX2 kernel variants. Lane layout and reduction order match the scalar
// reference exactly; see kernels.cpp.

#if defined(__x86_64__) || defined(_M_X64)

#include "spectra/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace spectra::kernels::detail {

namespace {

struct Best
{
    double value;
    std::size_t index;
};

inline Best reduce4(__m256d vals, __m256i idxs)
{
    alignas(32) double v[4];
    alignas(32) long long ix[4];
    _mm256_store_pd(v, vals);
    _mm256_store_si256(reinterpret_cast<__m256i*>(ix), idxs);
    Best out{v[0], static_cast<std::size_t>(ix[0])};
    for (int j = 1; j < 4; ++j) {
        const auto idx = static_cast<std::size_t>(ix[j]);
        if (v[j] < out.value || (v[j] == out.value && idx < out.index)) {
            out.value = v[j];
            out.index = idx;
        }
    }
    return out;
}

} // namespace

std::size_t argmin_affine_avx2(const double* values, const double* points,
                               std::size_t n, double lambda)
{
    const __m256d lam = _mm256_set1_pd(lambda);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256i bidx = _mm256_setzero_si256();
    __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
    const __m256i step = _mm256_set1_epi64x(4);
    const std::size_t main = n / 4 * 4;
    for (std::size_t i = 0; i < main; i += 4) {
        const __m256d v =
            _mm256_fmadd_pd(lam, _mm256_loadu_pd(points + i), _mm256_loadu_pd(values + i));
        const __m256d lt = _mm256_cmp_pd(v, best, _CMP_LT_OQ);
        best = _mm256_blendv_pd(best, v, lt);
        bidx = _mm256_castpd_si256(_mm256_blendv_pd(
            _mm256_castsi256_pd(bidx), _mm256_castsi256_pd(idx), lt));
        idx = _mm256_add_epi64(idx, step);
    }
    Best b = reduce4(best, bidx);
    for (std::size_t i = main; i < n; ++i) {
        const double v = std::fma(lambda, points[i], values[i]);
        if (v < b.value) {
            b.value = v;
            b.index = i;
        }
    }
    return b.index;
}

double sum_avx2(const double* v, std::size_t n)
{
    __m256d acc = _mm256_setzero_pd();
    const std::size_t main = n / 4 * 4;
    for (std::size_t i = 0; i < main; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + i));
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double total = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = main; i < n; ++i)
        total += v[i];
    return total;
}

GapResult min_gap_avx2(const double* a, const double* b, std::size_t n)
{
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256i bidx = _mm256_setzero_si256();
    __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
    const __m256i step = _mm256_set1_epi64x(4);
    const std::size_t main = n / 4 * 4;
    for (std::size_t i = 0; i < main; i += 4) {
        const __m256d g =
            _mm256_sub_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(a + i));
        const __m256d lt = _mm256_cmp_pd(g, best, _CMP_LT_OQ);
        best = _mm256_blendv_pd(best, g, lt);
        bidx = _mm256_castpd_si256(_mm256_blendv_pd(
            _mm256_castsi256_pd(bidx), _mm256_castsi256_pd(idx), lt));
        idx = _mm256_add_epi64(idx, step);
    }
    Best r = reduce4(best, bidx);
    for (std::size_t i = main; i < n; ++i) {
        const double g = b[i] - a[i];
        if (g < r.value) {
            r.value = g;
            r.index = i;
        }
    }
    return {r.value, r.index};
}

} // namespace spectra::kernels::detail

#endif // x86-64
