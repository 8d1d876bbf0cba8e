// SPDX-License-Identifier: Apache-2.0

#include "spectra/channel.hpp"
#include "spectra/rng.hpp"
#include "spectra/units.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace spectra;

namespace {

struct TempDir
{
    std::filesystem::path path;
    TempDir()
    {
        path = std::filesystem::temp_directory_path() /
               ("spectra_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int counter;
};
int TempDir::counter = 0;

} // namespace

TEST_CASE("units: dBm/mW conversion is an exact inverse pair")
{
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double dbm = rng.uniform(-140.0, 30.0);
        const double back = dbm_from_mw(mw_from_dbm(dbm));
        CHECK(std::fabs(back - dbm) <= 1e-12 * std::max(1.0, std::fabs(dbm)));
    }
    CHECK(mw_from_dbm(dbm_from_mw(0.0)) == 0.0);
}

TEST_CASE("scenario: minimal single-user file")
{
    TempDir dir;
    const auto path = dir.path / "one.json";
    {
        std::ofstream out(path);
        out << R"({"version":1,"num_users":1,"num_tones":1,
                   "weights":[1.0],"budgets_dbm":[20.4],
                   "masks_dbm":20.4,"noise_dbm":-140.0})";
    }
    const Channel ch = load_scenario(path.string());
    CHECK(ch.users() == 1);
    CHECK(ch.tones() == 1);
    CHECK(ch.weight(0) == 1.0);
    CHECK(ch.noise(0, 0) == doctest::Approx(mw_from_dbm(-140.0)).epsilon(1e-12));
    CHECK(ch.mask(0, 0) == doctest::Approx(mw_from_dbm(20.4)).epsilon(1e-12));
    // single-user: no cross gains exist
    CHECK(ch.gain(0, 0, 0) == 0.0);
}

TEST_CASE("scenario: save/load round-trip is bit exact")
{
    TempDir dir;
    const auto path = dir.path / "rt.json";
    SynthesisParams p;
    p.num_users = 3;
    p.num_tones = 7;
    p.seed = 99;
    const Channel ch = generate_synthetic(p);
    save_scenario(ch, path.string());
    const Channel back = load_scenario(path.string());
    CHECK(back == ch);
}

TEST_CASE("scenario: zero noise is rejected naming the field")
{
    TempDir dir;
    const auto path = dir.path / "bad.json";
    {
        std::ofstream out(path);
        out << R"({"version":1,"num_users":1,"num_tones":1,
                   "weights":[1.0],"budgets_dbm":[20.4],
                   "masks_dbm":20.4,"noise_dbm":-99999.0})";
    }
    // -99999 dBm underflows to 0 mW, violating the strict-noise invariant.
    CHECK_THROWS_WITH_AS(load_scenario(path.string()),
                         doctest::Contains("noise must be strictly positive"),
                         std::invalid_argument);
}

TEST_CASE("scenario: parse errors carry field context")
{
    TempDir dir;
    const auto path = dir.path / "bad2.json";
    {
        std::ofstream out(path);
        out << R"({"version":1,"num_users":2,"num_tones":1,
                   "weights":[1.0],"budgets_dbm":[20.4,20.4],
                   "masks_dbm":20.4,"noise_dbm":-140.0})";
    }
    CHECK_THROWS_WITH_AS(load_scenario(path.string()), doctest::Contains("weights"),
                         std::runtime_error);
}

TEST_CASE("scenario: unwritable path reports an I/O error")
{
    SynthesisParams p;
    const Channel ch = generate_synthetic(p);
    CHECK_THROWS_AS(save_scenario(ch, "/nonexistent_dir_zz/x.json"), std::runtime_error);
}

TEST_CASE("scenario: two-user file lists exactly two gain entries per tone")
{
    TempDir dir;
    const auto path = dir.path / "two.json";
    Channel ch(2, 3);
    for (int k = 0; k < 3; ++k)
        for (int n = 0; n < 2; ++n) {
            ch.set_noise(k, n, 1e-10);
            ch.set_mask(k, n, 100.0);
            ch.set_gain(k, n, 1 - n, 0.01 * (k + 1) + 0.001 * n);
        }
    ch.set_budget(0, 100.0);
    ch.set_budget(1, 100.0);
    save_scenario(ch, path.string());
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    std::size_t count = 0, pos = 0;
    while ((pos = text.find("\"value\"", pos)) != std::string::npos) {
        ++count;
        ++pos;
    }
    CHECK(count == 6); // 2 ordered pairs x 3 tones
}

TEST_CASE("synthetic: deterministic for a fixed seed")
{
    SynthesisParams p;
    p.num_users = 4;
    p.num_tones = 12;
    p.seed = 4242;
    CHECK(generate_synthetic(p) == generate_synthetic(p));
    p.seed = 4243;
    CHECK_FALSE(generate_synthetic(p) == generate_synthetic(SynthesisParams{}));
}

TEST_CASE("synthetic: single user has an empty gains map")
{
    SynthesisParams p;
    p.num_users = 1;
    p.num_tones = 5;
    const Channel ch = generate_synthetic(p);
    for (int k = 0; k < 5; ++k)
        CHECK(ch.gain(k, 0, 0) == 0.0);
}

TEST_CASE("synthetic: N=6 K=64 seed=42 satisfies the gain/noise invariants everywhere")
{
    SynthesisParams p;
    p.num_users = 6;
    p.num_tones = 64;
    p.seed = 42;
    const Channel ch = generate_synthetic(p);
    for (int k = 0; k < ch.tones(); ++k)
        for (int n = 0; n < ch.users(); ++n) {
            CHECK(ch.noise(k, n) > 0.0);
            for (int m = 0; m < ch.users(); ++m) {
                if (m == n)
                    continue;
                CHECK(ch.gain(k, n, m) >= 0.0);
                CHECK(ch.gain(k, n, m) < 1.0);
            }
        }
}

TEST_CASE("synthetic: coupling ratio bound must be strictly positive")
{
    SynthesisParams p;
    p.coupling_db_min = 0.0;
    CHECK_THROWS_AS(generate_synthetic(p), std::invalid_argument);
}

TEST_CASE("power allocation: mask feasibility and totals")
{
    SynthesisParams p;
    p.num_users = 2;
    p.num_tones = 4;
    const Channel ch = generate_synthetic(p);
    PowerAllocation s = PowerAllocation::at_masks(ch);
    CHECK(s.within_masks(ch));
    CHECK(s.user_total(0) == doctest::Approx(4.0 * ch.mask(0, 0)));
    s.set(0, 0, ch.mask(0, 0) * 1.5);
    CHECK_FALSE(s.within_masks(ch));
}
