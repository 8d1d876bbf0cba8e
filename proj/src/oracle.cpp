// SPDX-License-Identifier: Apache-2.0

#include "spectra/oracle.hpp"

#include "spectra/kernels.hpp"
#include "spectra/objective.hpp"
#include "spectra/parallel.hpp"
#include "spectra/units.hpp"

#include <cmath>
#include <stdexcept>

namespace spectra {
namespace oracle {

std::vector<double> Grid::points_mw(double mask_mw) const
{
    const double mask_dbm = dbm_from_mw(mask_mw);
    std::vector<double> pts;
    pts.push_back(0.0);
    if (mask_dbm < floor_dbm) {
        pts.push_back(mask_mw);
        return pts;
    }
    const long steps = std::lround(std::floor((mask_dbm - floor_dbm) / granularity_db));
    pts.reserve(static_cast<std::size_t>(steps) + 3);
    for (long i = 0; i <= steps; ++i)
        pts.push_back(mw_from_dbm(floor_dbm + granularity_db * static_cast<double>(i)));
    if (pts.back() < mask_mw)
        pts.push_back(mask_mw);
    else
        pts.back() = mask_mw;
    return pts;
}

GridMin grid_min_table(const std::vector<double>& values,
                       const std::vector<double>& points, double lambda)
{
    const std::size_t idx =
        kernels::argmin_affine(values.data(), points.data(), points.size(), lambda);
    return {points[idx], values[idx] + lambda * points[idx], idx};
}

GridMin grid_min_subproblem(const std::function<double(double)>& fn, double lambda,
                            const std::vector<double>& points)
{
    std::vector<double> values(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        values[i] = fn(points[i]);
    return grid_min_table(values, points, lambda);
}

std::vector<double> exhaustive_per_user(const Channel& ch, const PowerAllocation& state,
                                        int n, double budget, const Grid& grid)
{
    const int K = ch.tones();
    // Per tone: grid and restriction-value table, computed once. Every
    // lambda probe afterwards is a cheap argmin over value + lambda * s.
    std::vector<std::vector<double>> pts(K), vals(K);
    parallel_for(static_cast<std::size_t>(K), [&](std::size_t k) {
        const TonePoint tp = make_tone_point(ch, state, static_cast<int>(k), n);
        pts[k] = grid.points_mw(tp.mask);
        vals[k].resize(pts[k].size());
        for (std::size_t i = 0; i < pts[k].size(); ++i)
            vals[k][i] = restriction_value(tp, pts[k][i]);
    });

    std::vector<double> powers(K);
    auto total_at = [&](double lambda) {
        for (int k = 0; k < K; ++k)
            powers[k] = grid_min_table(vals[k], pts[k], lambda).s;
        return kernels::sum(powers.data(), powers.size());
    };

    if (total_at(0.0) <= budget)
        return powers;

    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (total_at(hi) > budget && doublings < 200) {
        lo = hi;
        hi *= 2.0;
        ++doublings;
    }
    if (total_at(hi) > budget)
        throw std::runtime_error("exhaustive_per_user: bracket expansion failed");
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(hi, 1.0); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (total_at(mid) > budget)
            lo = mid;
        else
            hi = mid;
    }
    total_at(hi); // leave `powers` at the feasible endpoint
    return powers;
}

LemmaOrderReport verify_lemma_order(
    const MethodKind& kind_a, const MethodKind& kind_b,
    const std::vector<std::pair<const Channel*, const PowerAllocation*>>& instances,
    const ApproximationSpec& ref_config, double slack)
{
    LemmaOrderReport report;
    for (std::size_t inst = 0; inst < instances.size(); ++inst) {
        const Channel& ch = *instances[inst].first;
        const PowerAllocation& s = *instances[inst].second;
        for (int k = 0; k < ch.tones(); ++k) {
            for (int n = 0; n < ch.users(); ++n) {
                ApproximationSpec spec_a = ref_config;
                spec_a.kind = kind_a;
                ApproximationSpec spec_b = ref_config;
                spec_b.kind = kind_b;
                const auto app_a = build_approximation(spec_a, ch, s, k, n);
                const auto app_b = build_approximation(spec_b, ch, s, k, n);
                const auto grid = bound_grid(app_a.mask, app_a.build_point);
                std::vector<double> va(grid.size()), vb(grid.size());
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    va[i] = app_a.value(grid[i]);
                    vb[i] = app_b.value(grid[i]);
                }
                // Worst point of f_B - f_A: negative gap means a violation
                // of the ordering f_A <= f_B.
                const auto gap = kernels::min_gap(va.data(), vb.data(), grid.size());
                report.points_checked += static_cast<long long>(grid.size());
                if (std::isnan(gap.gap))
                    continue; // inf - inf at a shared log barrier point
                if (-gap.gap > report.worst_gap) {
                    report.worst_gap = -gap.gap;
                    report.worst_instance = static_cast<int>(inst);
                    report.worst_tone = k;
                    report.worst_user = n;
                    report.worst_x = grid[gap.index];
                }
                if (-gap.gap > slack)
                    report.pass = false;
            }
        }
    }
    return report;
}

} // namespace oracle
} // namespace spectra
