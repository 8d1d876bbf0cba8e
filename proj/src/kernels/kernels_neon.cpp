// SPDX-License-Identifier: Apache-2.0
//
// NEON kernel variants (aarch64). Two 2-wide registers emulate the fixed
// 4-lane layout of the scalar reference so all backends agree bitwise.

#if defined(__aarch64__)

#include "spectra/kernels.hpp"

#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace spectra::kernels::detail {

namespace {

struct Best
{
    double value;
    std::size_t index;
};

inline void update_pair(float64x2_t v, std::size_t i0, Best* lane)
{
    const double v0 = vgetq_lane_f64(v, 0);
    const double v1 = vgetq_lane_f64(v, 1);
    if (v0 < lane[0].value) {
        lane[0].value = v0;
        lane[0].index = i0;
    }
    if (v1 < lane[1].value) {
        lane[1].value = v1;
        lane[1].index = i0 + 1;
    }
}

inline Best reduce(const Best* lane)
{
    Best out = lane[0];
    for (int j = 1; j < 4; ++j) {
        if (lane[j].value < out.value ||
            (lane[j].value == out.value && lane[j].index < out.index))
            out = lane[j];
    }
    return out;
}

} // namespace

std::size_t argmin_affine_neon(const double* values, const double* points,
                               std::size_t n, double lambda)
{
    const double inf = std::numeric_limits<double>::infinity();
    Best lane[4] = {{inf, 0}, {inf, 0}, {inf, 0}, {inf, 0}};
    const float64x2_t lam = vdupq_n_f64(lambda);
    const std::size_t main = n / 4 * 4;
    for (std::size_t i = 0; i < main; i += 4) {
        const float64x2_t lo = vfmaq_f64(vld1q_f64(values + i), lam, vld1q_f64(points + i));
        const float64x2_t hi =
            vfmaq_f64(vld1q_f64(values + i + 2), lam, vld1q_f64(points + i + 2));
        update_pair(lo, i, lane);
        update_pair(hi, i + 2, lane + 2);
    }
    Best best = reduce(lane);
    for (std::size_t i = main; i < n; ++i) {
        const double v = std::fma(lambda, points[i], values[i]);
        if (v < best.value) {
            best.value = v;
            best.index = i;
        }
    }
    return best.index;
}

double sum_neon(const double* v, std::size_t n)
{
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    const std::size_t main = n / 4 * 4;
    for (std::size_t i = 0; i < main; i += 4) {
        acc01 = vaddq_f64(acc01, vld1q_f64(v + i));
        acc23 = vaddq_f64(acc23, vld1q_f64(v + i + 2));
    }
    double total = (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
                   (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
    for (std::size_t i = main; i < n; ++i)
        total += v[i];
    return total;
}

GapResult min_gap_neon(const double* a, const double* b, std::size_t n)
{
    const double inf = std::numeric_limits<double>::infinity();
    Best lane[4] = {{inf, 0}, {inf, 0}, {inf, 0}, {inf, 0}};
    const std::size_t main = n / 4 * 4;
    for (std::size_t i = 0; i < main; i += 4) {
        update_pair(vsubq_f64(vld1q_f64(b + i), vld1q_f64(a + i)), i, lane);
        update_pair(vsubq_f64(vld1q_f64(b + i + 2), vld1q_f64(a + i + 2)), i + 2, lane + 2);
    }
    Best best = reduce(lane);
    for (std::size_t i = main; i < n; ++i) {
        const double g = b[i] - a[i];
        if (g < best.value) {
            best.value = g;
            best.index = i;
        }
    }
    return {best.value, best.index};
}

} // namespace spectra::kernels::detail

#endif // aarch64
