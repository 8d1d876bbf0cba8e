// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference kernels and runtime dispatch.
//
// The scalar implementations intentionally mirror the vector variants:
// four independent accumulator lanes, std::fma for the affine combine, and
// a final (value, index) lexicographic reduction. This makes scalar and
// SIMD results bit-identical, which the equivalence tests assert.

#include "spectra/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace spectra::kernels {

namespace detail {

namespace {

struct Best
{
    double value;
    std::size_t index;
};

inline Best reduce(const Best* lanes, std::size_t count)
{
    Best out = lanes[0];
    for (std::size_t j = 1; j < count; ++j) {
        if (lanes[j].value < out.value ||
            (lanes[j].value == out.value && lanes[j].index < out.index))
            out = lanes[j];
    }
    return out;
}

} // namespace

std::size_t argmin_affine_scalar(const double* values, const double* points,
                                 std::size_t n, double lambda)
{
    const double inf = std::numeric_limits<double>::infinity();
    Best lane[4] = {{inf, 0}, {inf, 0}, {inf, 0}, {inf, 0}};
    const std::size_t main = n / 4 * 4;
    for (std::size_t i = 0; i < main; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double v = std::fma(lambda, points[i + j], values[i + j]);
            if (v < lane[j].value) {
                lane[j].value = v;
                lane[j].index = i + j;
            }
        }
    }
    Best best = reduce(lane, 4);
    for (std::size_t i = main; i < n; ++i) {
        const double v = std::fma(lambda, points[i], values[i]);
        if (v < best.value) {
            best.value = v;
            best.index = i;
        }
    }
    return best.index;
}

double sum_scalar(const double* v, std::size_t n)
{
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t main = n / 4 * 4;
    for (std::size_t i = 0; i < main; i += 4) {
        acc[0] += v[i];
        acc[1] += v[i + 1];
        acc[2] += v[i + 2];
        acc[3] += v[i + 3];
    }
    double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (std::size_t i = main; i < n; ++i)
        total += v[i];
    return total;
}

GapResult min_gap_scalar(const double* a, const double* b, std::size_t n)
{
    const double inf = std::numeric_limits<double>::infinity();
    Best lane[4] = {{inf, 0}, {inf, 0}, {inf, 0}, {inf, 0}};
    const std::size_t main = n / 4 * 4;
    for (std::size_t i = 0; i < main; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double g = b[i + j] - a[i + j];
            if (g < lane[j].value) {
                lane[j].value = g;
                lane[j].index = i + j;
            }
        }
    }
    Best best = reduce(lane, 4);
    for (std::size_t i = main; i < n; ++i) {
        const double g = b[i] - a[i];
        if (g < best.value) {
            best.value = g;
            best.index = i;
        }
    }
    return {best.value, best.index};
}

} // namespace detail

namespace {

struct Dispatch
{
    std::size_t (*argmin_affine)(const double*, const double*, std::size_t, double);
    double (*sum)(const double*, std::size_t);
    GapResult (*min_gap)(const double*, const double*, std::size_t);
    const char* name;
};

Dispatch select()
{
    if (const char* env = std::getenv("SPECTRA_FORCE_SCALAR");
        env && env[0] == '1')
        return {detail::argmin_affine_scalar, detail::sum_scalar,
                detail::min_gap_scalar, "scalar"};
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return {detail::argmin_affine_avx2, detail::sum_avx2,
                detail::min_gap_avx2, "avx2"};
#endif
#if defined(__aarch64__)
    return {detail::argmin_affine_neon, detail::sum_neon,
            detail::min_gap_neon, "neon"};
#endif
    return {detail::argmin_affine_scalar, detail::sum_scalar,
            detail::min_gap_scalar, "scalar"};
}

const Dispatch& table()
{
    static const Dispatch d = select();
    return d;
}

} // namespace

std::size_t argmin_affine(const double* values, const double* points,
                          std::size_t n, double lambda)
{
    return table().argmin_affine(values, points, n, lambda);
}

double sum(const double* v, std::size_t n)
{
    return table().sum(v, n);
}

GapResult min_gap(const double* a, const double* b, std::size_t n)
{
    return table().min_gap(a, b, n);
}

const char* active_backend()
{
    return table().name;
}

} // namespace spectra::kernels
