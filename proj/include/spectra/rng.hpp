// SPDX-License-Identifier: Apache-2.0
// spectra: deterministic random draws used by the synthetic generator and
// the verification batches. std::mt19937_64 has a standard-fixed sequence;
// the mappings below avoid the implementation-defined distributions so that
// results are reproducible across platforms and standard libraries.

#pragma once

#include <cstdint>
#include <random>

namespace spectra {

class Rng
{
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform()
    {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        // Modulo bias is irrelevant at the batch sizes used here.
        return eng_() % n;
    }

    int index(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

private:
    std::mt19937_64 eng_;
};

/// Stable stream split: derive an independent seed for substream `i`.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t i)
{
    // SplitMix64 finalizer.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace spectra
