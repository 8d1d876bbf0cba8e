// SPDX-License-Identifier: Apache-2.0
//
// spectra: seeded batch verification of the surrogate construction —
// value/derivative tightness at the build point, the global upper-bound
// property on the check grid, and the pairwise tightness dominance scans.

#pragma once

#include "spectra/approximation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spectra {

struct VerifyOptions
{
    int instances = 500;
    int users_min = 2;
    int users_max = 6;
    int tones = 4;
    std::uint64_t seed = 20260811ULL;
    double value_tol = 1e-9;      // |f_app - f| at the build point, absolute
    double derivative_tol = 1e-6; // relative
    double bound_slack = 1e-9;    // f_app >= f - slack on the grid
    double order_slack = 1e-9;    // pairwise dominance slack
    double coupling_db_min = 12.0;
    double coupling_db_max = 45.0;
    // Batch conditioning: keeps surrogate magnitudes small enough that the
    // absolute tolerances above are meaningful in double precision.
    double noise_floor_dbm = -50.0;
    bool corrupt_d = false; // negative-control hook: perturbs the slope
};

struct Violation
{
    std::string suite;   // cond14 | cond15 | cond16 | order
    std::string detail;  // kind or pair name
    int instance = -1;
    std::uint64_t seed = 0;
    int tone = 0;
    int user = 0;
    double x = 0.0;
    double magnitude = 0.0;
};

struct VerifyReport
{
    long long checks = 0;
    std::vector<Violation> violations;
    bool pass() const { return violations.empty(); }
};

/// The twelve method kinds under test.
std::vector<MethodKind> all_method_kinds();

/// Tightness dominance pairs (tighter, looser) asserted pointwise.
std::vector<std::pair<MethodKind, MethodKind>> tightness_pairs();

/// One deterministic verification instance: a synthetic channel and a mixed
/// build point (zeros, masks, interior draws).
struct VerifyInstance
{
    Channel channel;
    PowerAllocation build;
    int tone = 0;
    int user = 0;
    std::uint64_t seed = 0;
};

VerifyInstance make_verify_instance(const VerifyOptions& opts, int index);

/// Conditions at the build point and the upper bound on the check grid,
/// for every kind on every instance.
VerifyReport verify_conditions(const VerifyOptions& opts);

/// Pairwise dominance f_tighter <= f_looser on the same batch.
VerifyReport verify_tightness(const VerifyOptions& opts);

} // namespace spectra
