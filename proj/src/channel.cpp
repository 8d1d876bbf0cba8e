// SPDX-License-Identifier: Apache-2.0

#include "spectra/channel.hpp"

#include "spectra/rng.hpp"
#include "spectra/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spectra {

Channel::Channel(int num_users, int num_tones)
    : num_users_(num_users), num_tones_(num_tones),
      gains_(static_cast<std::size_t>(num_tones) * num_users * num_users, 0.0),
      noise_(static_cast<std::size_t>(num_tones) * num_users, 0.0),
      masks_(static_cast<std::size_t>(num_tones) * num_users, 0.0),
      budgets_(num_users, 0.0), weights_(num_users, 1.0)
{
    if (num_users < 1)
        throw std::invalid_argument("num_users must be >= 1");
    if (num_tones < 1)
        throw std::invalid_argument("num_tones must be >= 1");
}

void Channel::set_gain(int k, int n, int m, double value)
{
    if (n == m)
        throw std::invalid_argument("gain: direct entries (n == m) are normalized away");
    gains_[(static_cast<std::size_t>(k) * num_users_ + n) * num_users_ + m] = value;
}

void Channel::set_noise(int k, int n, double mw)
{
    noise_[static_cast<std::size_t>(k) * num_users_ + n] = mw;
}

void Channel::set_mask(int k, int n, double mw)
{
    masks_[static_cast<std::size_t>(k) * num_users_ + n] = mw;
}

void Channel::set_budget(int n, double mw) { budgets_[n] = mw; }

void Channel::set_weight(int n, double w) { weights_[n] = w; }

void Channel::validate() const
{
    auto at = [](int k, int n) {
        return " at tone " + std::to_string(k) + ", user " + std::to_string(n);
    };
    for (int k = 0; k < num_tones_; ++k) {
        for (int n = 0; n < num_users_; ++n) {
            if (!(noise(k, n) > 0.0))
                throw std::invalid_argument("noise must be strictly positive" + at(k, n));
            if (!(mask(k, n) > 0.0))
                throw std::invalid_argument("mask must be strictly positive" + at(k, n));
            for (int m = 0; m < num_users_; ++m) {
                if (m == n)
                    continue;
                const double a = gain(k, n, m);
                if (!(a >= 0.0) || !std::isfinite(a))
                    throw std::invalid_argument(
                        "gain must be finite and nonnegative" + at(k, n) +
                        ", transmitter " + std::to_string(m));
            }
        }
    }
    for (int n = 0; n < num_users_; ++n) {
        if (!(budget(n) > 0.0))
            throw std::invalid_argument("budget must be strictly positive for user " +
                                        std::to_string(n));
        if (!(weight(n) > 0.0))
            throw std::invalid_argument("weight must be strictly positive for user " +
                                        std::to_string(n));
    }
}

PowerAllocation PowerAllocation::at_masks(const Channel& ch)
{
    PowerAllocation s(ch.users(), ch.tones());
    for (int k = 0; k < ch.tones(); ++k)
        for (int n = 0; n < ch.users(); ++n)
            s.set(k, n, ch.mask(k, n));
    return s;
}

double PowerAllocation::user_total(int n) const
{
    double total = 0.0;
    for (int k = 0; k < num_tones_; ++k)
        total += at(k, n);
    return total;
}

bool PowerAllocation::within_masks(const Channel& ch, double tol_rel) const
{
    for (int k = 0; k < num_tones_; ++k)
        for (int n = 0; n < num_users_; ++n) {
            const double s = at(k, n);
            if (s < 0.0 || s > ch.mask(k, n) * (1.0 + tol_rel))
                return false;
        }
    return true;
}

void SynthesisParams::validate() const
{
    if (num_users < 1)
        throw std::invalid_argument("num_users must be >= 1");
    if (num_tones < 1)
        throw std::invalid_argument("num_tones must be >= 1");
    if (!(coupling_db_min > 0.0))
        throw std::invalid_argument(
            "coupling_db_min must be > 0 dB (cross gains strictly weaker than direct)");
    if (coupling_db_max < coupling_db_min)
        throw std::invalid_argument("coupling_db_max must be >= coupling_db_min");
    if (!(mask_dbm > -300.0) || !(budget_dbm > -300.0))
        throw std::invalid_argument("mask/budget out of range");
}

Channel generate_synthetic(const SynthesisParams& p)
{
    p.validate();
    const int N = p.num_users;
    const int K = p.num_tones;
    Channel ch(N, K);

    const double mask_mw = mw_from_dbm(p.mask_dbm);
    const double budget_mw = mw_from_dbm(p.budget_dbm);
    for (int k = 0; k < K; ++k) {
        // Normalized noise rises across the band as the direct channel
        // rolls off (twisted-pair attenuation grows with frequency).
        const double t = K > 1 ? static_cast<double>(k) / (K - 1) : 0.0;
        const double noise_mw =
            mw_from_dbm(p.noise_floor_dbm + p.snr_gap_db + p.noise_ramp_db * t);
        for (int n = 0; n < N; ++n) {
            ch.set_noise(k, n, noise_mw);
            ch.set_mask(k, n, mask_mw);
        }
    }
    for (int n = 0; n < N; ++n) {
        ch.set_budget(n, budget_mw);
        ch.set_weight(n, 1.0 / N);
    }

    // Per ordered pair (n, m): a base attenuation in dB plus a smooth cubic
    // profile over normalized tone index, plus the optional high-tone ramp.
    Rng rng(split_seed(p.seed, 0x6763u));
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < N; ++m) {
            if (m == n)
                continue;
            const double base_db = rng.uniform(p.coupling_db_min, p.coupling_db_max);
            const double c1 = rng.uniform(-3.0, 3.0);
            const double c2 = rng.uniform(-3.0, 3.0);
            const double c3 = rng.uniform(-3.0, 3.0);
            for (int k = 0; k < K; ++k) {
                const double t = K > 1 ? static_cast<double>(k) / (K - 1) : 0.0;
                double att_db = base_db + c1 * t + c2 * t * t + c3 * t * t * t -
                                p.high_tone_boost_db * t;
                // Keep cross gains strictly below the direct gain.
                if (att_db < 0.5)
                    att_db = 0.5;
                ch.set_gain(k, n, m, std::pow(10.0, -att_db / 10.0));
            }
        }
    }
    ch.validate();
    return ch;
}

} // namespace spectra
