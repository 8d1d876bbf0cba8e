// SPDX-License-Identifier: Apache-2.0

#include "spectra/driver.hpp"

#include "spectra/units.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace spectra {

namespace {

PowerAllocation initial_point(const Channel& ch, const RunConfig& cfg)
{
    switch (cfg.init) {
    case InitRule::AllZero:
        return PowerAllocation::zeros(ch);
    case InitRule::Mask:
        return PowerAllocation::at_masks(ch);
    case InitRule::Given:
        if (cfg.init_given.users() != ch.users() || cfg.init_given.tones() != ch.tones())
            throw std::invalid_argument("init_given does not match the channel shape");
        return cfg.init_given;
    }
    return PowerAllocation::zeros(ch);
}

struct TurnResult
{
    int inner_iters = 0;
    double lambda = 0.0;
    bool any_accepted = false;
};

// One user's turn: inner iterations of build + dual solve + accept.
// `on_inner` runs after every inner iteration (accepted or not) and may
// observe the updated state.
template <typename Hook>
TurnResult run_user_turn(const Channel& ch, const RunConfig& cfg, PowerAllocation& s,
                         int n, int max_inner, SolveReport* report, int sweep,
                         Hook&& on_inner)
{
    const int K = ch.tones();
    const int N = ch.users();
    TurnResult turn;
    std::vector<UnivariateApproximation> apps(K);
    for (int inner = 1; inner <= max_inner; ++inner) {
        const auto t0 = std::chrono::steady_clock::now();
        double old_surrogate = 0.0;
        for (int k = 0; k < K; ++k) {
            apps[k] = build_approximation(cfg.spec_at(k, n, N), ch, s, k, n);
            old_surrogate += apps[k].value(apps[k].build_point);
        }
        UserSolveResult sol = solve_user(apps, ch.budget(n), cfg.dual);

        // Counting: every inner iteration builds one approximation per tone.
        if (report) {
            for (int k = 0; k < K; ++k) {
                report->approx_builds[static_cast<std::size_t>(k) * N + n] += 1;
                const int deg = apps[k].emitted_degree();
                if (deg >= 4)
                    report->solves_numeric += 1;
                else if (deg == 3)
                    report->solves_deg3 += 1;
                else if (deg == 2)
                    report->solves_deg2 += 1;
                else
                    report->solves_deg1 += 1;
            }
        }

        // Accept only surrogate-improving moves; this pins the monotone
        // objective trace even when the budget bisection leaves a residual.
        // A budget-infeasible iterate (e.g. a mask start above the budget)
        // must accept the repair move regardless. Turns containing a
        // bootstrapped surrogate (no value anchor) compare the true
        // restriction values instead.
        double current_total = 0.0;
        bool any_bootstrap = false;
        for (int k = 0; k < K; ++k) {
            current_total += s.at(k, n);
            any_bootstrap = any_bootstrap || apps[k].params.high_snr_bootstrap;
        }
        const bool infeasible = current_total > ch.budget(n) * (1.0 + 1e-9);
        bool accept;
        if (infeasible) {
            accept = true;
        } else if (any_bootstrap) {
            double true_old = 0.0, true_new = 0.0;
            for (int k = 0; k < K; ++k) {
                const TonePoint tp = make_tone_point(ch, s, k, n);
                true_old += restriction_value(tp, s.at(k, n));
                true_new += restriction_value(tp, sol.powers[k]);
            }
            accept = true_new <= true_old;
        } else {
            accept = sol.surrogate_sum <= old_surrogate;
        }
        double max_change_db = 0.0;
        if (accept) {
            // Powers far below the reporting floor snap to exact zero; this
            // keeps barrier methods from decaying into denormals.
            const double snap = 1e-3 * power_floor_mw();
            for (int k = 0; k < K; ++k) {
                const double next = sol.powers[k] < snap ? 0.0 : sol.powers[k];
                max_change_db = std::max(max_change_db, dbm_distance(next, s.at(k, n)));
                s.set(k, n, next);
            }
            turn.any_accepted = true;
            turn.lambda = sol.lambda;
            if (report)
                for (int k = 0; k < K; ++k)
                    report->fp_iters[static_cast<std::size_t>(k) * N + n] +=
                        sol.fp_per_tone[k];
        }
        turn.inner_iters = inner;

        if (report) {
            StageTrace st;
            st.sweep = sweep;
            st.user = n;
            st.inner = inner;
            st.objective = total_objective(ch, s);
            st.lambda = sol.lambda;
            st.user_power = sol.total_power;
            st.accepted = accept;
            st.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
            report->trace.push_back(st);
            if (!sol.fixed_point_all_converged)
                report->flags += "fixed-point cap hit (user " + std::to_string(n) + "); ";
        }

        on_inner(inner, sol, accept);

        if (!accept)
            break; // rebuilding at the same point cannot improve further
        if (max_change_db < cfg.inner_tol_db)
            break;
    }
    return turn;
}

} // namespace

SolveReport run(const Channel& ch, const RunConfig& cfg)
{
    if (cfg.max_outer < 1 || cfg.max_inner < 1)
        throw std::invalid_argument("iteration caps must be >= 1");
    if (!(cfg.outer_tol_rel > 0.0) || !(cfg.inner_tol_db > 0.0))
        throw std::invalid_argument("tolerances must be positive");
    const auto t0 = std::chrono::steady_clock::now();

    const int K = ch.tones();
    const int N = ch.users();
    SolveReport report;
    report.approx_builds.assign(static_cast<std::size_t>(K) * N, 0);
    report.fp_iters.assign(static_cast<std::size_t>(K) * N, 0);

    PowerAllocation s = initial_point(ch, cfg);
    double prev_objective = total_objective(ch, s);
    report.trace.push_back({0, -1, 0, prev_objective, 0.0, 0.0, true, 0.0});

    for (int sweep = 1; sweep <= cfg.max_outer; ++sweep) {
        report.lambda_per_sweep.emplace_back(N, 0.0);
        for (int n = 0; n < N; ++n) {
            TurnResult turn =
                run_user_turn(ch, cfg, s, n, cfg.max_inner, &report, sweep,
                              [](int, const UserSolveResult&, bool) {});
            report.lambda_per_sweep.back()[n] = turn.lambda;
        }
        report.sweeps_run = sweep;
        const double objective = total_objective(ch, s);
        const bool settled =
            std::fabs(prev_objective - objective) <=
            cfg.outer_tol_rel * std::max(1.0, std::fabs(objective));
        prev_objective = objective;
        if (!cfg.fixed_outer && settled)
            break;
    }
    if (!cfg.fixed_outer && report.sweeps_run == cfg.max_outer) {
        report.converged = false;
        report.flags += "outer sweep cap reached before the objective settled; ";
    }

    report.powers = s;
    report.user_rates = rates(ch, s);
    report.final_objective = prev_objective;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

ConvergenceCount count_convergence(const Channel& ch, const RunConfig& cfg,
                                   const oracle::Grid& grid, double accuracy_db)
{
    const int K = ch.tones();
    const int N = ch.users();
    ConvergenceCount out;
    out.approx_needed.assign(static_cast<std::size_t>(K) * N, -1);
    out.fp_needed.assign(static_cast<std::size_t>(K) * N, -1);
    out.oracle_powers.assign(static_cast<std::size_t>(K) * N, 0.0);
    out.final_powers.assign(static_cast<std::size_t>(K) * N, 0.0);

    PowerAllocation s = initial_point(ch, cfg);
    // Counting caps: give the inner loop room beyond the production cap so
    // slow methods are measured rather than truncated.
    const int inner_cap = std::max(cfg.max_inner, 30);

    for (int n = 0; n < N; ++n) {
        const std::vector<double> target =
            oracle::exhaustive_per_user(ch, s, n, ch.budget(n), grid);
        for (int k = 0; k < K; ++k)
            out.oracle_powers[static_cast<std::size_t>(k) * N + n] = target[k];

        std::vector<int> first_hit(K, -1);
        std::vector<long long> fp_at_hit(K, -1);
        std::vector<long long> fp_running(K, 0);

        run_user_turn(ch, cfg, s, n, inner_cap, nullptr, 0,
                      [&](int inner, const UserSolveResult& sol, bool accept) {
                          if (!accept)
                              return;
                          for (int k = 0; k < K; ++k) {
                              fp_running[k] += sol.fp_per_tone[k];
                              if (first_hit[k] == -1 &&
                                  dbm_distance(sol.powers[k], target[k]) <= accuracy_db) {
                                  first_hit[k] = inner;
                                  fp_at_hit[k] = fp_running[k];
                              }
                          }
                      });

        for (int k = 0; k < K; ++k) {
            const std::size_t idx = static_cast<std::size_t>(k) * N + n;
            out.final_powers[idx] = s.at(k, n);
            // Only cells whose method limit reached the oracle optimum are
            // comparable; the rest converged to a different optimum.
            if (first_hit[k] != -1 &&
                dbm_distance(s.at(k, n), target[k]) <= accuracy_db) {
                out.approx_needed[idx] = first_hit[k];
                out.fp_needed[idx] = fp_at_hit[k];
            }
        }
    }

    long long approx_sum = 0, fp_sum = 0;
    for (std::size_t i = 0; i < out.approx_needed.size(); ++i) {
        if (out.approx_needed[i] >= 0) {
            approx_sum += out.approx_needed[i];
            fp_sum += out.fp_needed[i];
            ++out.cells_counted;
        } else {
            ++out.cells_excluded;
        }
    }
    if (out.cells_counted > 0) {
        out.mean_approx = static_cast<double>(approx_sum) / out.cells_counted;
        out.mean_fp = static_cast<double>(fp_sum) / out.cells_counted;
    }
    return out;
}

std::vector<ApproximationSpec> allocate_hybrid(const Channel& ch, const std::string& rule,
                                               const ApproximationSpec& base)
{
    const int K = ch.tones();
    const int N = ch.users();
    std::vector<ApproximationSpec> map(static_cast<std::size_t>(K) * N, base);
    std::vector<bool> assigned(static_cast<std::size_t>(K) * N, false);
    std::vector<std::pair<std::string, MethodKind>> rest_clauses;

    std::size_t pos = 0;
    while (pos < rule.size()) {
        std::size_t comma = rule.find(',', pos);
        if (comma == std::string::npos)
            comma = rule.size();
        const std::string clause = rule.substr(pos, comma - pos);
        pos = comma + 1;
        if (clause.empty())
            continue;
        const std::size_t colon = clause.rfind(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("allocation clause '" + clause +
                                        "' must be selector:method");
        const std::string selector = clause.substr(0, colon);
        const MethodKind kind = MethodKind::parse(clause.substr(colon + 1));

        auto assign = [&](int k, int n) {
            map[static_cast<std::size_t>(k) * N + n].kind = kind;
            assigned[static_cast<std::size_t>(k) * N + n] = true;
        };
        if (selector == "all") {
            for (int k = 0; k < K; ++k)
                for (int n = 0; n < N; ++n)
                    assign(k, n);
        } else if (selector == "rest") {
            rest_clauses.emplace_back(selector, kind);
        } else if (selector.rfind("user", 0) == 0) {
            const int user_1based = std::stoi(selector.substr(4));
            if (user_1based < 1 || user_1based > N)
                throw std::invalid_argument("allocation rule names unknown user '" +
                                            selector + "' (channel has " +
                                            std::to_string(N) + " users)");
            for (int k = 0; k < K; ++k)
                assign(k, user_1based - 1);
        } else if (selector.rfind("tones>=", 0) == 0) {
            const int tone = std::stoi(selector.substr(7));
            if (tone < 0 || tone >= K)
                throw std::invalid_argument("allocation rule names unknown tone '" +
                                            selector + "'");
            for (int k = tone; k < K; ++k)
                for (int n = 0; n < N; ++n)
                    assign(k, n);
        } else if (selector.rfind("tones<", 0) == 0) {
            const int tone = std::stoi(selector.substr(6));
            if (tone < 1 || tone > K)
                throw std::invalid_argument("allocation rule names unknown tone '" +
                                            selector + "'");
            for (int k = 0; k < tone; ++k)
                for (int n = 0; n < N; ++n)
                    assign(k, n);
        } else {
            throw std::invalid_argument("unknown allocation selector '" + selector + "'");
        }
    }
    for (const auto& [selector, kind] : rest_clauses)
        for (std::size_t i = 0; i < map.size(); ++i)
            if (!assigned[i])
                map[i].kind = kind;
    return map;
}

} // namespace spectra
