// SPDX-License-Identifier: Apache-2.0
//
// spectra: per-tone subproblem solvers for min over [0, mask] of
// f_app(x) + lambda * x. The stationarity polynomial has degree <= 3 for
// the framework methods (solved in closed form plus one Newton polish per
// root) and degree N for CA-DSB/SCALE/IASB10, handled by a deterministic
// numeric rootfinder. A fixed-point alternative mirrors the classic
// iterative updates.

#pragma once

#include "spectra/approximation.hpp"

#include <vector>

namespace spectra {

struct RootsResult
{
    std::vector<double> roots; // ascending, deduplicated
    bool identically_zero = false;
    bool used_numeric_fallback = false;
};

/// All real roots of the polynomial (ascending coefficients). Degrees up to
/// three are solved in closed form (Cardano / trigonometric branch) with a
/// Newton polish; higher degrees fall back to recursive critical-point
/// isolation with bisection. An all-zero polynomial sets identically_zero.
RootsResult real_roots(const PolynomialEq& poly);

enum class SolveMode { ClosedForm, FixedPoint };

struct FixedPointOptions
{
    double tol_db = 1e-6; // successive-iterate dBm-distance stop
    int max_iters = 50;
};

struct SubproblemSolution
{
    double s = 0.0;
    double value = 0.0;               // f_app(s) + lambda * s
    std::vector<double> candidates;   // points actually compared
    SolveMode method = SolveMode::ClosedForm;
    int fixed_point_iters = 0;
    bool fixed_point_converged = true;
    bool used_numeric_fallback = false;
    bool diverged_guard = false;
};

/// Exact minimizer over {0, mask, clamped real stationary points}; at most
/// five evaluations for degree <= 3. Ties break toward smaller s. Throws
/// std::runtime_error for emitted degree > 3 when the numeric fallback is
/// disabled.
SubproblemSolution solve_closed_form(const UnivariateApproximation& app, double lambda,
                                     bool allow_numeric_fallback = true);

/// Repeated substitution updates from the build point, projected on
/// [0, mask]. Non-convergence within the cap is reported, never silent.
SubproblemSolution solve_fixed_point(const UnivariateApproximation& app, double lambda,
                                     const FixedPointOptions& opts = {});

SubproblemSolution solve_subproblem(const UnivariateApproximation& app, double lambda,
                                    SolveMode mode, const FixedPointOptions& opts = {});

} // namespace spectra
