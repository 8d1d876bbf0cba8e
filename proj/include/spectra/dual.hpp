// SPDX-License-Identifier: Apache-2.0
//
// spectra: per-user dual problem. g_app(lambda) = -lambda * P + sum_k of
// the per-tone subproblem minima; lambda is found by bisection against the
// power budget. Tones within one evaluation solve independently (and in
// parallel); results are deterministic regardless of scheduling.

#pragma once

#include "spectra/subproblem.hpp"

#include <vector>

namespace spectra {

struct DualOptions
{
    double power_tol_rel = 1e-6;   // |total - budget| <= tol * budget
    double lambda_tol_rel = 1e-12; // bracket width stop, relative
    int max_bisect = 200;
    SolveMode mode = SolveMode::ClosedForm;
    FixedPointOptions fixed_point;
};

struct DualEval
{
    double g_app = 0.0;
    double total_power = 0.0;
    std::vector<SubproblemSolution> tones;
};

/// Evaluates the dual function at lambda for the given per-tone surrogates.
DualEval evaluate_dual(const std::vector<UnivariateApproximation>& apps, double budget,
                       double lambda, const DualOptions& opts);

struct UserSolveResult
{
    std::vector<double> powers; // per tone
    double lambda = 0.0;
    double total_power = 0.0;
    double surrogate_sum = 0.0; // sum_k f_app(s_k) at the returned powers
    bool budget_active = false;
    double power_residual = 0.0; // |total - budget| when active, else 0
    int bisect_steps = 0;
    bool bracket_ok = true;
    long long fixed_point_iters = 0;
    std::vector<int> fp_per_tone; // of the returned solves
    long long numeric_fallback_solves = 0;
    bool fixed_point_all_converged = true;
};

/// Either lambda = 0 with total power within budget, or the tightest
/// feasible (total <= budget) bisection endpoint, with the residual
/// reported rather than hidden. Throws only on bracket-expansion failure.
UserSolveResult solve_user(const std::vector<UnivariateApproximation>& apps,
                           double budget, const DualOptions& opts);

} // namespace spectra
