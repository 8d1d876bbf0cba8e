// SPDX-License-Identifier: Apache-2.0
//
// spectra: the per-user iterative loop. Outer sweeps visit users in
// ascending index; each user's turn runs inner iterations that rebuild the
// per-tone surrogates at the current iterate and re-solve the per-user dual
// problem. A dual solution is accepted only when it improves the surrogate
// sum, which guarantees a nonincreasing true objective within each turn.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "spectra/dual.hpp"
#include "spectra/oracle.hpp"

#include <string>
#include <vector>

namespace spectra {

enum class InitRule { AllZero, Mask, Given };

struct RunConfig
{
    /// Per-(tone, user) method assignment; empty means uniform_spec
    /// everywhere. Index layout is k * N + n.
    std::vector<ApproximationSpec> assignment;
    ApproximationSpec uniform_spec;

    int max_outer = 50;
    bool fixed_outer = false;     // run exactly max_outer sweeps
    double outer_tol_rel = 1e-8;  // objective-change stopping rule
    int max_inner = 10;
    double inner_tol_db = 0.01;   // power-change stop, dBm-equivalent
    SolveMode mode = SolveMode::ClosedForm;
    InitRule init = InitRule::AllZero;
    PowerAllocation init_given;
    DualOptions dual;

    const ApproximationSpec& spec_at(int k, int n, int num_users) const
    {
        return assignment.empty()
                   ? uniform_spec
                   : assignment[static_cast<std::size_t>(k) * num_users + n];
    }
};

struct StageTrace
{
    int sweep = 0;
    int user = 0;
    int inner = 0;
    double objective = 0.0; // true total objective after the step
    double lambda = 0.0;
    double user_power = 0.0;
    bool accepted = true;
    double wall_ms = 0.0;
};

struct SolveReport
{
    PowerAllocation powers;
    std::vector<UserRate> user_rates;
    double final_objective = 0.0;
    std::vector<StageTrace> trace;
    std::vector<int> approx_builds;   // K*N
    std::vector<long long> fp_iters;  // K*N, from accepted solves
    std::vector<std::vector<double>> lambda_per_sweep; // [sweep][user]
    long long solves_deg1 = 0;
    long long solves_deg2 = 0;
    long long solves_deg3 = 0;
    long long solves_numeric = 0;
    bool converged = true;
    std::string flags;
    double wall_seconds = 0.0;
    int sweeps_run = 0;

    long long cubic_solves() const { return solves_deg3 + solves_numeric; }
};

SolveReport run(const Channel& ch, const RunConfig& cfg);

/// Convergence accounting against the per-user exhaustive-search oracle:
/// for each user turn of the first sweep, the number of approximations
/// (inner iterations) until the tone power is within `accuracy_db` of the
/// per-user oracle optimum. Cells that never reach the oracle optimum are
/// reported as -1 and excluded from means.
struct ConvergenceCount
{
    std::vector<int> approx_needed; // K*N, -1 excluded
    std::vector<long long> fp_needed; // K*N, -1 excluded
    std::vector<double> oracle_powers; // K*N, per-user oracle at each turn
    std::vector<double> final_powers;  // K*N, method limits at each turn
    double mean_approx = 0.0;
    double mean_fp = 0.0;
    int cells_counted = 0;
    int cells_excluded = 0;
};

ConvergenceCount count_convergence(const Channel& ch, const RunConfig& cfg,
                                   const oracle::Grid& grid, double accuracy_db = 0.1);

/// Parses an allocation rule into a per-(tone, user) assignment. Clauses
/// are comma separated: "all:<m>", "rest:<m>", "user<i>:<m>" (1-based),
/// "tones>=<j>:<m>", "tones<<j>:<m>" (0-based tone threshold). Unknown
/// users or tones throw std::invalid_argument.
std::vector<ApproximationSpec> allocate_hybrid(const Channel& ch, const std::string& rule,
                                               const ApproximationSpec& base);

} // namespace spectra
