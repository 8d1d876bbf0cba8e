// SPDX-License-Identifier: Apache-2.0
//
// spectra: iterative approximation methods for multi-user multi-carrier
// spectrum optimization
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

#include <cstdint>
#include <string>
#include <vector>

namespace spectra {

/// Static problem data for one scenario. All powers are linear mW; the
/// normalized cross gains a[k](n,m) couple transmitter m into receiver n
/// (direct gains are normalized away, the SNR gap is folded into noise).
/// Immutable after construction/validation; safe for concurrent reads.
class Channel
{
public:
    Channel() = default;
    Channel(int num_users, int num_tones);

    int users() const { return num_users_; }
    int tones() const { return num_tones_; }

    double gain(int k, int n, int m) const
    {
        return gains_[(static_cast<std::size_t>(k) * num_users_ + n) * num_users_ + m];
    }
    void set_gain(int k, int n, int m, double value);

    double noise(int k, int n) const
    {
        return noise_[static_cast<std::size_t>(k) * num_users_ + n];
    }
    void set_noise(int k, int n, double mw);

    double mask(int k, int n) const
    {
        return masks_[static_cast<std::size_t>(k) * num_users_ + n];
    }
    void set_mask(int k, int n, double mw);

    double budget(int n) const { return budgets_[n]; }
    void set_budget(int n, double mw);

    double weight(int n) const { return weights_[n]; }
    void set_weight(int n, double w);

    double symbol_rate_hz() const { return symbol_rate_hz_; }
    void set_symbol_rate_hz(double hz) { symbol_rate_hz_ = hz; }
    double tone_spacing_hz() const { return tone_spacing_hz_; }
    void set_tone_spacing_hz(double hz) { tone_spacing_hz_ = hz; }

    /// Throws std::invalid_argument naming the offending field if any
    /// invariant is violated (gains >= 0, noise > 0 strictly, masks > 0,
    /// budgets > 0, weights > 0).
    void validate() const;

    bool operator==(const Channel&) const = default;

private:
    int num_users_ = 0;
    int num_tones_ = 0;
    std::vector<double> gains_;   // K*N*N, receiver-major, diagonal unused (0)
    std::vector<double> noise_;   // K*N mW
    std::vector<double> masks_;   // K*N mW
    std::vector<double> budgets_; // N mW
    std::vector<double> weights_; // N
    double symbol_rate_hz_ = 4000.0;
    double tone_spacing_hz_ = 4312.5;
};

/// Transmit powers s[k](n) in mW, tone-major.
class PowerAllocation
{
public:
    PowerAllocation() = default;
    PowerAllocation(int num_users, int num_tones)
        : num_users_(num_users), num_tones_(num_tones),
          powers_(static_cast<std::size_t>(num_users) * num_tones, 0.0)
    {
    }

    static PowerAllocation zeros(const Channel& ch)
    {
        return PowerAllocation(ch.users(), ch.tones());
    }
    static PowerAllocation at_masks(const Channel& ch);

    int users() const { return num_users_; }
    int tones() const { return num_tones_; }

    double at(int k, int n) const
    {
        return powers_[static_cast<std::size_t>(k) * num_users_ + n];
    }
    void set(int k, int n, double mw)
    {
        powers_[static_cast<std::size_t>(k) * num_users_ + n] = mw;
    }

    const double* tone_row(int k) const
    {
        return powers_.data() + static_cast<std::size_t>(k) * num_users_;
    }

    /// Total power of user n across tones.
    double user_total(int n) const;

    /// True when 0 <= s <= mask everywhere (with tol slack on the mask).
    bool within_masks(const Channel& ch, double tol_rel = 1e-12) const;

    bool operator==(const PowerAllocation&) const = default;

private:
    int num_users_ = 0;
    int num_tones_ = 0;
    std::vector<double> powers_;
};

/// Parameters for the seeded synthetic channel generator. Couplings are
/// drawn per user pair as a direct-to-cross ratio in dB (log-uniform in
/// linear scale) and shaped across tones by a low-order random polynomial,
/// optionally amplified toward high tones.
struct SynthesisParams
{
    int num_users = 2;
    int num_tones = 16;
    double coupling_db_min = 12.0; // ratio below direct, > 0 dB
    double coupling_db_max = 45.0;
    double noise_floor_dbm = -140.0;
    double noise_ramp_db = 0.0; // extra normalized noise at the top tone
    double snr_gap_db = 12.9;   // folded into noise
    double mask_dbm = 20.4;
    double budget_dbm = 20.4;
    double high_tone_boost_db = 6.0; // extra crosstalk at the top tone
    std::uint64_t seed = 0;

    void validate() const; // throws std::invalid_argument
};

/// Deterministic for a fixed seed; all cross gains strictly below 1.
Channel generate_synthetic(const SynthesisParams& params);

/// Scenario file I/O (JSON, dB fields suffixed _dbm). Throws
/// std::runtime_error with line/field context on parse errors and
/// std::invalid_argument on invariant violations.
Channel load_scenario(const std::string& path);
void save_scenario(const Channel& ch, const std::string& path);

} // namespace spectra
