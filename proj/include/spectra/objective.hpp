// SPDX-License-Identifier: Apache-2.0
//
// spectra: true nonconvex per-tone objective, rates, and the per-user
// univariate restriction used by every approximation builder.
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

#include "spectra/channel.hpp"

#include <vector>

namespace spectra {

/// Interference plus noise seen by user n on tone k: sum over m != n of
/// a(n,m) * s(m) + z(n). Strictly positive by the channel invariants.
double interference(const Channel& ch, const PowerAllocation& s, int k, int n);

/// Received signal: s(n) + interference.
double received(const Channel& ch, const PowerAllocation& s, int k, int n);

/// Weighted per-tone objective in nats:
///   f_k(s_k) = -sum_n w_n log(1 + s(n) / int(n)).
double per_tone_objective(const Channel& ch, const PowerAllocation& s, int k);

/// Sum of per_tone_objective over all tones.
double total_objective(const Channel& ch, const PowerAllocation& s);

struct UserRate
{
    double bits_total = 0.0;          // sum of per-tone bit loadings
    double rate_bps = 0.0;            // symbol_rate * bits_total
    std::vector<double> bits_per_tone; // log2(1 + SNR) per tone
};

/// Bit loadings use log2; the objective stays in natural log. The argmin is
/// unaffected, only reporting scales.
std::vector<UserRate> rates(const Channel& ch, const PowerAllocation& s);

/// Univariate restriction context for user n on tone k: every other user's
/// power on the tone is frozen, and x = s(k, n) varies over [0, mask].
///
/// Interferer m != n sees int_m(x) = other_base[m] + cross_gain[m] * x,
/// rec_m(x) = fixed_power[m] + int_m(x); the own interference own_int does
/// not depend on x.
struct TonePoint
{
    const Channel* ch = nullptr;
    int k = 0;
    int n = 0;
    double own_weight = 0.0;
    double own_int = 0.0;  // int_k^n
    double mask = 0.0;     // s_k^{n,mask}
    // One slot per interferer m != n, in ascending user order.
    std::vector<int> user;          // m
    std::vector<double> weight;     // w_m
    std::vector<double> cross_gain; // a(m, n): how much x couples into m
    std::vector<double> fixed_power; // frozen s(k, m)
    std::vector<double> base_int;   // int_m(x) - cross_gain * x (constant part)

    double interferer_int(std::size_t j, double x) const
    {
        return base_int[j] + cross_gain[j] * x;
    }
    double interferer_rec(std::size_t j, double x) const
    {
        return fixed_power[j] + interferer_int(j, x);
    }
};

/// Builds the restriction around the given full allocation (the frozen
/// interferer powers come from s; s(k, n) itself is ignored).
TonePoint make_tone_point(const Channel& ch, const PowerAllocation& s, int k, int n);

/// f_k(x; fixed others) in nats.
double restriction_value(const TonePoint& tp, double x);

/// Closed-form value, first and second derivative of the restriction,
/// including the interferers' dependence on x through their int_m.
void restriction_derivatives(const TonePoint& tp, double x, double* f, double* d1,
                             double* d2);

} // namespace spectra
