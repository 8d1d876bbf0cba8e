// SPDX-License-Identifier: Apache-2.0

#include "spectra/objective.hpp"
#include "spectra/rng.hpp"
#include "spectra/units.hpp"

#include <doctest.h>
#include <test_oracles.hpp>

#include <cmath>

using namespace spectra;
using namespace testsupport;

namespace {

PowerAllocation random_feasible(const Channel& ch, Rng& rng)
{
    PowerAllocation s = PowerAllocation::zeros(ch);
    for (int k = 0; k < ch.tones(); ++k)
        for (int n = 0; n < ch.users(); ++n)
            s.set(k, n, rng.uniform() * ch.mask(k, n));
    return s;
}

} // namespace

TEST_CASE("interference: single user sees exactly its noise")
{
    SynthesisParams p;
    p.num_users = 1;
    p.num_tones = 3;
    const Channel ch = generate_synthetic(p);
    const PowerAllocation s = PowerAllocation::at_masks(ch);
    for (int k = 0; k < 3; ++k)
        CHECK(interference(ch, s, k, 0) == ch.noise(k, 0));
}

TEST_CASE("interference: two users, a=0.5, s_other=1, z=0.5 gives 1.0")
{
    Channel ch(2, 1);
    ch.set_noise(0, 0, 0.5);
    ch.set_noise(0, 1, 0.5);
    ch.set_mask(0, 0, 2.0);
    ch.set_mask(0, 1, 2.0);
    ch.set_budget(0, 2.0);
    ch.set_budget(1, 2.0);
    ch.set_gain(0, 0, 1, 0.5);
    PowerAllocation s(2, 1);
    s.set(0, 1, 1.0);
    CHECK(interference(ch, s, 0, 0) == 1.0);
}

TEST_CASE("interference: random 6-user instance matches the summation oracle")
{
    const Channel ch = dense_test_channel(6, 8, 77);
    Rng rng(5);
    const PowerAllocation s = random_feasible(ch, rng);
    for (int k = 0; k < ch.tones(); ++k)
        for (int n = 0; n < ch.users(); ++n) {
            const double got = interference(ch, s, k, n);
            const double want = naive_interference(ch, s, k, n);
            CHECK(std::fabs(got - want) <= 1e-15 * want);
        }
}

TEST_CASE("interference: affine in each other user's power")
{
    const Channel ch = dense_test_channel(4, 2, 13);
    Rng rng(6);
    PowerAllocation a = random_feasible(ch, rng);
    PowerAllocation b = random_feasible(ch, rng);
    const double lam = 0.3;
    PowerAllocation mix = a;
    for (int m = 0; m < 4; ++m)
        mix.set(0, m, lam * a.at(0, m) + (1 - lam) * b.at(0, m));
    const double lhs = interference(ch, mix, 0, 1);
    const double rhs =
        lam * interference(ch, a, 0, 1) + (1 - lam) * interference(ch, b, 0, 1);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

TEST_CASE("per-tone objective: zero powers give exactly zero")
{
    const Channel ch = dense_test_channel(5, 4, 21);
    const PowerAllocation s = PowerAllocation::zeros(ch);
    for (int k = 0; k < ch.tones(); ++k)
        CHECK(per_tone_objective(ch, s, k) == 0.0);
}

TEST_CASE("per-tone objective: single user at s = z gives -log 2")
{
    Channel ch(1, 1);
    ch.set_noise(0, 0, 0.25);
    ch.set_mask(0, 0, 1.0);
    ch.set_budget(0, 1.0);
    PowerAllocation s(1, 1);
    s.set(0, 0, 0.25);
    CHECK(per_tone_objective(ch, s, 0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("per-tone objective: matches direct recomputation on random instances")
{
    const Channel ch = dense_test_channel(6, 6, 31);
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const PowerAllocation s = random_feasible(ch, rng);
        for (int k = 0; k < ch.tones(); ++k) {
            const double got = per_tone_objective(ch, s, k);
            const double want = naive_per_tone_objective(ch, s, k);
            CHECK(std::fabs(got - want) <= 1e-12 * std::max(1.0, std::fabs(want)));
        }
    }
}

TEST_CASE("objective: raising own power strictly lowers the own term")
{
    const Channel ch = dense_test_channel(3, 2, 41);
    Rng rng(9);
    const PowerAllocation s = random_feasible(ch, rng);
    const int k = 1, n = 2;
    auto own_term = [&](double x) {
        PowerAllocation t = s;
        t.set(k, n, x);
        return -ch.weight(n) * std::log1p(x / interference(ch, t, k, n));
    };
    CHECK(own_term(0.5) < own_term(0.2));
    CHECK(own_term(0.2) < own_term(0.0));
}

TEST_CASE("rates: zero allocation gives zero rates; s = z gives one bit")
{
    Channel ch(1, 2);
    for (int k = 0; k < 2; ++k) {
        ch.set_noise(k, 0, 0.5);
        ch.set_mask(k, 0, 2.0);
    }
    ch.set_budget(0, 4.0);
    PowerAllocation s(1, 2);
    auto r0 = rates(ch, s);
    CHECK(r0[0].rate_bps == 0.0);
    s.set(0, 0, 0.5); // one bit on tone 0
    auto r1 = rates(ch, s);
    CHECK(r1[0].bits_per_tone[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r1[0].rate_bps == doctest::Approx(ch.symbol_rate_hz() * 1.0).epsilon(1e-12));
}

TEST_CASE("rates: matches the summation oracle on a 2-user instance")
{
    const Channel ch = dense_test_channel(2, 5, 51);
    Rng rng(10);
    const PowerAllocation s = random_feasible(ch, rng);
    const auto r = rates(ch, s);
    for (int n = 0; n < 2; ++n) {
        double bits = 0.0;
        for (int k = 0; k < ch.tones(); ++k)
            bits += std::log2(1.0 + s.at(k, n) / naive_interference(ch, s, k, n));
        CHECK(r[n].bits_total == doctest::Approx(bits).epsilon(1e-12));
        CHECK(r[n].rate_bps == doctest::Approx(bits * ch.symbol_rate_hz()).epsilon(1e-12));
    }
}

TEST_CASE("restriction: zero cross gains reduce to single-log calculus")
{
    Channel ch(2, 1);
    ch.set_noise(0, 0, 0.3);
    ch.set_noise(0, 1, 0.4);
    ch.set_mask(0, 0, 5.0);
    ch.set_mask(0, 1, 5.0);
    ch.set_budget(0, 5.0);
    ch.set_budget(1, 5.0);
    PowerAllocation s(2, 1);
    s.set(0, 1, 2.0);
    const TonePoint tp = make_tone_point(ch, s, 0, 0);
    const double w = ch.weight(0), z = 0.3;
    for (double x : {0.0, 1.0, 4.0}) {
        double f, d1, d2;
        restriction_derivatives(tp, x, &f, &d1, &d2);
        CHECK(d1 == doctest::Approx(-w / (x + z)).epsilon(1e-14));
        CHECK(d2 == doctest::Approx(w / ((x + z) * (x + z))).epsilon(1e-14));
    }
}

TEST_CASE("restriction: derivatives match finite differences")
{
    // Benign scales keep the fixed mask-relative step well conditioned.
    SynthesisParams p;
    p.num_users = 5;
    p.num_tones = 3;
    p.noise_floor_dbm = -20.0;
    p.coupling_db_min = 6.0;
    p.coupling_db_max = 20.0;
    p.seed = 2024;
    const Channel ch = generate_synthetic(p);
    Rng rng(12);
    const PowerAllocation s = random_feasible(ch, rng);
    for (int n = 0; n < ch.users(); ++n) {
        const TonePoint tp = make_tone_point(ch, s, 1, n);
        const double h = 1e-6 * tp.mask;
        auto fn = [&](double x) { return restriction_value(tp, x); };
        for (double x : {0.3 * tp.mask, 0.7 * tp.mask}) {
            double f, d1, d2;
            restriction_derivatives(tp, x, &f, &d1, &d2);
            CHECK(f == doctest::Approx(fn(x)).epsilon(1e-14));
            CHECK(d1 == doctest::Approx(fd_first(fn, x, h)).epsilon(1e-5));
            CHECK(d2 == doctest::Approx(fd_second(fn, x, h)).epsilon(1e-4));
        }
    }
}
