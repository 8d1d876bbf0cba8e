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

#include <cmath>
#include <limits>

namespace spectra {

/// All solver arithmetic is carried out in linear milliwatts; dBm appears
/// only at I/O boundaries.
inline double mw_from_dbm(double dbm)
{
    return std::pow(10.0, dbm / 10.0);
}

/// Returns -inf for a zero power, which maps back to exactly 0 mW.
inline double dbm_from_mw(double mw)
{
    if (mw <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(mw);
}

inline double nats_to_bits(double nats)
{
    return nats / std::log(2.0);
}

/// dBm value whose conversion back to mW reproduces `mw` bit-for-bit when
/// `mw` lies in the image of mw_from_dbm (nudges by a few ulp if needed).
inline double dbm_exact_for_mw(double mw)
{
    const double d0 = dbm_from_mw(mw);
    if (!std::isfinite(d0))
        return d0;
    double lo = d0, hi = d0;
    for (int step = 0; step < 4; ++step) {
        if (mw_from_dbm(lo) == mw)
            return lo;
        if (mw_from_dbm(hi) == mw)
            return hi;
        lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
        hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
    }
    return d0;
}

/// Reporting defaults matching common ADSL practice. The SNR gap is folded
/// into the normalized noise at generation time; tone spacing and symbol
/// rate only scale reported quantities.
struct PaperDefaults
{
    double mask_dbm = 20.4;
    double budget_dbm = 20.4;
    double snr_gap_db = 12.9;
    double tone_spacing_hz = 4312.5;
    double symbol_rate_hz = 4000.0;
};

inline PaperDefaults paper_defaults() { return {}; }

/// Reference floor for dBm comparisons of near-zero powers (grid floor).
constexpr double kPowerFloorDbm = -80.0;

inline double power_floor_mw() { return mw_from_dbm(kPowerFloorDbm); }

/// |10*log10(a/b)| with both powers floored, so comparisons of tiny or zero
/// powers are well defined.
inline double dbm_distance(double a_mw, double b_mw)
{
    const double floor = power_floor_mw();
    const double a = std::max(a_mw, floor);
    const double b = std::max(b_mw, floor);
    return std::fabs(10.0 * std::log10(a / b));
}

} // namespace spectra
