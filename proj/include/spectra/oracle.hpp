// SPDX-License-Identifier: Apache-2.0
//
// spectra: brute-force references. Grid searches at dBm granularity stand
// in for the exhaustive validation protocol; they are deliberately
// independent of the closed-form solution path.

#pragma once

#include "spectra/approximation.hpp"

#include <functional>
#include <vector>

namespace spectra {
namespace oracle {

/// dBm ladder from the floor up to the mask, plus the exact zero point.
struct Grid
{
    double granularity_db = 0.1;
    double floor_dbm = -80.0;

    /// Strictly increasing, endpoints included: {0} then floor..mask dBm.
    std::vector<double> points_mw(double mask_mw) const;
};

struct GridMin
{
    double s = 0.0;
    double value = 0.0;
    std::size_t index = 0;
};

/// Exact argmin of fn(s) + lambda * s over the grid points (ties to the
/// smaller point).
GridMin grid_min_subproblem(const std::function<double(double)>& fn, double lambda,
                            const std::vector<double>& points);

/// Same, but over a precomputed value table aligned with `points`.
GridMin grid_min_table(const std::vector<double>& values,
                       const std::vector<double>& points, double lambda);

/// Per-user optimum on the grid under the power budget: bisection on
/// lambda with per-tone grid argmins (value tables are precomputed once).
/// `state` provides the frozen interference of the other users.
std::vector<double> exhaustive_per_user(const Channel& ch, const PowerAllocation& state,
                                        int n, double budget, const Grid& grid);

struct LemmaOrderReport
{
    bool pass = true;
    double worst_gap = 0.0; // most positive violation of f_A <= f_B
    int worst_instance = -1;
    int worst_tone = -1;
    int worst_user = -1;
    double worst_x = 0.0;
    long long points_checked = 0;
};

/// Asserts f_app(kindA) <= f_app(kindB) + slack pointwise on the bound
/// grid, for every (tone, user) of every provided build state. Failures are
/// reported, not thrown.
LemmaOrderReport verify_lemma_order(
    const MethodKind& kind_a, const MethodKind& kind_b,
    const std::vector<std::pair<const Channel*, const PowerAllocation*>>& instances,
    const ApproximationSpec& ref_config, double slack = 1e-9);

} // namespace oracle
} // namespace spectra
