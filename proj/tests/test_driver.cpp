// SPDX-License-Identifier: Apache-2.0

#include "spectra/driver.hpp"
#include "spectra/presets.hpp"
#include "spectra/rng.hpp"
#include "spectra/units.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace spectra;

namespace {

RunConfig config_of(const char* method)
{
    RunConfig cfg;
    cfg.uniform_spec.kind = MethodKind::parse(method);
    return cfg;
}

Channel cond_channel(int users, int tones, std::uint64_t seed)
{
    SynthesisParams p;
    p.num_users = users;
    p.num_tones = tones;
    p.noise_floor_dbm = -45.0;
    p.noise_ramp_db = 20.0;
    p.seed = seed;
    return generate_synthetic(p);
}

} // namespace

TEST_CASE("run: single user converges to grid waterfilling in one turn")
{
    SynthesisParams p;
    p.num_users = 1;
    p.num_tones = 8;
    p.noise_floor_dbm = -30.0;
    p.noise_ramp_db = 20.0;
    p.mask_dbm = 10.0;
    p.budget_dbm = 13.0;
    p.seed = 31;
    const Channel ch = generate_synthetic(p);
    for (const char* m : {"iasb1", "iasb6", "cadsb", "scale", "iasb10"}) {
        const SolveReport rep = run(ch, config_of(m));
        CHECK(rep.converged);
        // one user turn suffices: first sweep, one accepted inner iteration
        oracle::Grid grid;
        const auto oracle_powers = oracle::exhaustive_per_user(
            ch, PowerAllocation::zeros(ch), 0, ch.budget(0), grid);
        PowerAllocation oracle_alloc(1, ch.tones());
        for (int k = 0; k < ch.tones(); ++k)
            oracle_alloc.set(k, 0, oracle_powers[k]);
        const double oracle_obj = total_objective(ch, oracle_alloc);
        CHECK(rep.final_objective <=
              oracle_obj + 1e-6 * std::fabs(oracle_obj)); // grid is coarser
        for (int k = 0; k < ch.tones(); ++k) {
            if (rep.powers.at(k, 0) <= power_floor_mw() &&
                oracle_powers[k] <= power_floor_mw())
                continue;
            CHECK(dbm_distance(rep.powers.at(k, 0), oracle_powers[k]) <= 0.1 + 1e-9);
        }
    }
}

TEST_CASE("run: zero-crosstalk users decouple into independent single-user runs")
{
    SynthesisParams p;
    p.num_users = 3;
    p.num_tones = 6;
    p.noise_floor_dbm = -35.0;
    p.noise_ramp_db = 10.0;
    p.budget_dbm = 15.0;
    p.mask_dbm = 13.0;
    p.seed = 33;
    Channel ch = generate_synthetic(p);
    for (int k = 0; k < ch.tones(); ++k)
        for (int n = 0; n < 3; ++n)
            for (int m = 0; m < 3; ++m)
                if (m != n)
                    ch.set_gain(k, n, m, 0.0);

    const SolveReport joint = run(ch, config_of("iasb3"));
    for (int n = 0; n < 3; ++n) {
        Channel solo(1, ch.tones());
        for (int k = 0; k < ch.tones(); ++k) {
            solo.set_noise(k, 0, ch.noise(k, n));
            solo.set_mask(k, 0, ch.mask(k, n));
        }
        solo.set_budget(0, ch.budget(n));
        solo.set_weight(0, ch.weight(n));
        const SolveReport single = run(solo, config_of("iasb1"));
        for (int k = 0; k < ch.tones(); ++k)
            CHECK(joint.powers.at(k, n) ==
                  doctest::Approx(single.powers.at(k, 0)).epsilon(1e-9));
    }
}

TEST_CASE("run: deterministic bitwise across repeats and thread settings")
{
    const Channel ch = cond_channel(4, 16, 35);
    const RunConfig cfg = config_of("iasb5");
    const SolveReport a = run(ch, cfg);
    const SolveReport b = run(ch, cfg);
    CHECK(a.powers == b.powers);
    CHECK(a.final_objective == b.final_objective);
}

TEST_CASE("run: objective trace is nonincreasing and feasibility holds")
{
    const Channel ch = cond_channel(5, 16, 37);
    for (const char* m : {"iasb1", "iasb3", "iasb8", "scale"}) {
        const SolveReport rep = run(ch, config_of(m));
        for (std::size_t i = 1; i < rep.trace.size(); ++i)
            CHECK(rep.trace[i].objective <= rep.trace[i - 1].objective + 1e-9);
        CHECK(rep.powers.within_masks(ch, 1e-9));
        for (int n = 0; n < ch.users(); ++n)
            CHECK(rep.powers.user_total(n) <= ch.budget(n) * (1 + 1e-6));
    }
}

TEST_CASE("run: escape instance separates nonconvex closed form from convex kinds")
{
    const Channel ch = escape_channel();
    auto run_mode = [&](const char* m, SolveMode mode) {
        RunConfig cfg = config_of(m);
        cfg.init = InitRule::Mask;
        cfg.mode = mode;
        cfg.dual.mode = mode;
        cfg.outer_tol_rel = 1e-12;
        return run(ch, cfg).final_objective;
    };
    const double i1 = run_mode("iasb1", SolveMode::ClosedForm);
    const double i3 = run_mode("iasb3", SolveMode::ClosedForm);
    CHECK(i3 < i1 - 1e-3);
    // fixed point stays at the boundary local optimum
    const double f3 = run_mode("iasb3", SolveMode::FixedPoint);
    CHECK(f3 == doctest::Approx(i1).epsilon(1e-9));
}

TEST_CASE("count_convergence: first approximation lands exactly on a decoupled channel")
{
    SynthesisParams p;
    p.num_users = 2;
    p.num_tones = 4;
    p.noise_floor_dbm = -30.0;
    p.budget_dbm = 18.0;
    p.mask_dbm = 10.0;
    p.seed = 39;
    Channel ch = generate_synthetic(p);
    for (int k = 0; k < ch.tones(); ++k) {
        ch.set_gain(k, 0, 1, 0.0);
        ch.set_gain(k, 1, 0, 0.0);
    }
    oracle::Grid grid;
    const auto cc = count_convergence(ch, config_of("iasb1"), grid, 0.1);
    CHECK(cc.cells_excluded == 0);
    for (int count : cc.approx_needed)
        CHECK(count == 1);
}

TEST_CASE("count_convergence: fixed-point counts are at least the closed-form counts")
{
    const Channel ch = cond_channel(3, 8, 41);
    oracle::Grid grid;
    for (const char* m : {"iasb1", "scale", "iasb5"}) {
        RunConfig closed = config_of(m);
        const auto cc = count_convergence(ch, closed, grid, 0.1);
        RunConfig fixed = config_of(m);
        fixed.mode = SolveMode::FixedPoint;
        fixed.dual.mode = SolveMode::FixedPoint;
        fixed.dual.fixed_point.tol_db = 0.01;
        const auto cf = count_convergence(ch, fixed, grid, 0.1);
        REQUIRE(cc.cells_counted > 0);
        REQUIRE(cf.cells_counted > 0);
        CHECK(cf.mean_fp >= cc.mean_approx - 1e-12);
    }
}

TEST_CASE("allocate_hybrid: uniform, per-user, tone threshold and errors")
{
    const Channel ch = cond_channel(2, 6, 43);
    ApproximationSpec base;
    base.kind = MethodKind::parse("iasb1");

    const auto uniform = allocate_hybrid(ch, "all:iasb1", base);
    for (const auto& spec : uniform)
        CHECK(spec.kind.tag == Method::IASB1);

    const auto per_user = allocate_hybrid(ch, "user2:iasb3,rest:iasb1", base);
    int iasb3_count = 0;
    for (int k = 0; k < ch.tones(); ++k)
        for (int n = 0; n < 2; ++n)
            if (per_user[k * 2 + n].kind.tag == Method::IASB3) {
                ++iasb3_count;
                CHECK(n == 1);
            }
    CHECK(iasb3_count == ch.tones()); // exactly K entries of iasb3

    const auto banded = allocate_hybrid(ch, "tones>=3:iasb3,rest:iasb6", base);
    CHECK(banded[0 * 2 + 0].kind.tag == Method::IASB6);
    CHECK(banded[3 * 2 + 0].kind.tag == Method::IASB3);

    CHECK_THROWS_WITH_AS(allocate_hybrid(ch, "user7:iasb1", base),
                         doctest::Contains("unknown user"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(allocate_hybrid(ch, "tones>=99:iasb1", base),
                         doctest::Contains("unknown tone"), std::invalid_argument);
    CHECK_THROWS_AS(allocate_hybrid(ch, "nonsense", base), std::invalid_argument);
}

TEST_CASE("run: hybrid allocation matches all-IASB3 on the escape instance")
{
    const Channel ch = escape_channel();
    auto run_alloc = [&](const char* alloc) {
        RunConfig cfg = config_of("iasb3");
        if (alloc)
            cfg.assignment = allocate_hybrid(ch, alloc, cfg.uniform_spec);
        cfg.init = InitRule::Mask;
        cfg.outer_tol_rel = 1e-12;
        return run(ch, cfg);
    };
    const SolveReport all3 = run_alloc(nullptr);
    const SolveReport hybrid = run_alloc("user2:iasb1,rest:iasb3");
    CHECK(std::fabs(hybrid.final_objective - all3.final_objective) <=
          1e-9 * std::fabs(all3.final_objective));
    CHECK(hybrid.cubic_solves() < all3.cubic_solves());
}

TEST_CASE("run: invalid configurations are rejected")
{
    const Channel ch = cond_channel(2, 2, 47);
    RunConfig cfg = config_of("iasb1");
    cfg.max_inner = 0;
    CHECK_THROWS_AS(run(ch, cfg), std::invalid_argument);
    cfg = config_of("iasb1");
    cfg.outer_tol_rel = 0.0;
    CHECK_THROWS_AS(run(ch, cfg), std::invalid_argument);
    cfg = config_of("iasb1");
    cfg.init = InitRule::Given; // shape mismatch
    CHECK_THROWS_AS(run(ch, cfg), std::invalid_argument);
}
