// SPDX-License-Identifier: Apache-2.0

#include "spectra/dual.hpp"

#include "spectra/kernels.hpp"
#include "spectra/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace spectra {

DualEval evaluate_dual(const std::vector<UnivariateApproximation>& apps, double budget,
                       double lambda, const DualOptions& opts)
{
    DualEval eval;
    eval.tones.resize(apps.size());
    parallel_for(apps.size(), [&](std::size_t k) {
        eval.tones[k] = solve_subproblem(apps[k], lambda, opts.mode, opts.fixed_point);
    });
    std::vector<double> powers(apps.size());
    double value_sum = 0.0;
    for (std::size_t k = 0; k < apps.size(); ++k) {
        powers[k] = eval.tones[k].s;
        value_sum += eval.tones[k].value;
    }
    eval.total_power = kernels::sum(powers.data(), powers.size());
    eval.g_app = -lambda * budget + value_sum;
    return eval;
}

namespace {

void absorb(UserSolveResult& res, const DualEval& eval, double lambda)
{
    res.lambda = lambda;
    res.total_power = eval.total_power;
    res.powers.resize(eval.tones.size());
    res.fp_per_tone.assign(eval.tones.size(), 0);
    res.surrogate_sum = 0.0;
    res.fixed_point_iters = 0;
    res.numeric_fallback_solves = 0;
    res.fixed_point_all_converged = true;
    for (std::size_t k = 0; k < eval.tones.size(); ++k) {
        const auto& t = eval.tones[k];
        res.powers[k] = t.s;
        res.fp_per_tone[k] = t.fixed_point_iters;
        res.surrogate_sum += t.value - lambda * t.s;
        res.fixed_point_iters += t.fixed_point_iters;
        res.numeric_fallback_solves += t.used_numeric_fallback ? 1 : 0;
        res.fixed_point_all_converged = res.fixed_point_all_converged &&
                                        t.fixed_point_converged;
    }
}

} // namespace

UserSolveResult solve_user(const std::vector<UnivariateApproximation>& apps,
                           double budget, const DualOptions& opts)
{
    if (!(budget > 0.0))
        throw std::invalid_argument("budget must be positive");
    UserSolveResult res;

    DualEval at_zero = evaluate_dual(apps, budget, 0.0, opts);
    if (at_zero.total_power <= budget * (1.0 + opts.power_tol_rel)) {
        absorb(res, at_zero, 0.0);
        res.budget_active = false;
        return res;
    }

    // Bracket: double lambda until the budget is met.
    double lo = 0.0;
    double hi = 1.0;
    DualEval at_hi = evaluate_dual(apps, budget, hi, opts);
    int doublings = 0;
    while (at_hi.total_power > budget && doublings < 200) {
        lo = hi;
        hi *= 2.0;
        at_hi = evaluate_dual(apps, budget, hi, opts);
        ++doublings;
    }
    if (at_hi.total_power > budget) {
        res.bracket_ok = false;
        throw std::runtime_error(
            "dual bracket expansion failed: total power " +
            std::to_string(at_hi.total_power) + " mW above budget " +
            std::to_string(budget) + " mW at lambda " + std::to_string(hi));
    }

    DualEval best_feasible = at_hi;
    double best_lambda = hi;
    int steps = 0;
    while (steps < opts.max_bisect) {
        if (hi - lo <= opts.lambda_tol_rel * std::max(hi, 1.0))
            break;
        const double mid = 0.5 * (lo + hi);
        DualEval at_mid = evaluate_dual(apps, budget, mid, opts);
        ++steps;
        if (at_mid.total_power > budget) {
            lo = mid;
        } else {
            hi = mid;
            best_feasible = std::move(at_mid);
            best_lambda = mid;
            if (budget - best_feasible.total_power <= opts.power_tol_rel * budget)
                break;
        }
    }

    absorb(res, best_feasible, best_lambda);
    res.budget_active = true;
    res.power_residual = std::fabs(budget - res.total_power);
    res.bisect_steps = steps;
    return res;
}

} // namespace spectra
