// SPDX-License-Identifier: Apache-2.0

#include "spectra/objective.hpp"

#include "spectra/units.hpp"

#include <cmath>

namespace spectra {

double interference(const Channel& ch, const PowerAllocation& s, int k, int n)
{
    double acc = ch.noise(k, n);
    const double* row = s.tone_row(k);
    for (int m = 0; m < ch.users(); ++m) {
        if (m == n)
            continue;
        acc += ch.gain(k, n, m) * row[m];
    }
    return acc;
}

double received(const Channel& ch, const PowerAllocation& s, int k, int n)
{
    return s.at(k, n) + interference(ch, s, k, n);
}

double per_tone_objective(const Channel& ch, const PowerAllocation& s, int k)
{
    double f = 0.0;
    for (int n = 0; n < ch.users(); ++n)
        f -= ch.weight(n) * std::log1p(s.at(k, n) / interference(ch, s, k, n));
    return f;
}

double total_objective(const Channel& ch, const PowerAllocation& s)
{
    double f = 0.0;
    for (int k = 0; k < ch.tones(); ++k)
        f += per_tone_objective(ch, s, k);
    return f;
}

std::vector<UserRate> rates(const Channel& ch, const PowerAllocation& s)
{
    std::vector<UserRate> out(ch.users());
    for (int n = 0; n < ch.users(); ++n) {
        out[n].bits_per_tone.resize(ch.tones());
        double bits = 0.0;
        for (int k = 0; k < ch.tones(); ++k) {
            const double b = std::log2(1.0 + s.at(k, n) / interference(ch, s, k, n));
            out[n].bits_per_tone[k] = b;
            bits += b;
        }
        out[n].bits_total = bits;
        out[n].rate_bps = ch.symbol_rate_hz() * bits;
    }
    return out;
}

TonePoint make_tone_point(const Channel& ch, const PowerAllocation& s, int k, int n)
{
    TonePoint tp;
    tp.ch = &ch;
    tp.k = k;
    tp.n = n;
    tp.own_weight = ch.weight(n);
    tp.mask = ch.mask(k, n);
    const int N = ch.users();
    const double* row = s.tone_row(k);

    double own = ch.noise(k, n);
    for (int m = 0; m < N; ++m) {
        if (m == n)
            continue;
        own += ch.gain(k, n, m) * row[m];
    }
    tp.own_int = own;

    tp.user.reserve(N - 1);
    for (int m = 0; m < N; ++m) {
        if (m == n)
            continue;
        double base = ch.noise(k, m);
        for (int p = 0; p < N; ++p) {
            if (p == m || p == n)
                continue;
            base += ch.gain(k, m, p) * row[p];
        }
        tp.user.push_back(m);
        tp.weight.push_back(ch.weight(m));
        tp.cross_gain.push_back(ch.gain(k, m, n));
        tp.fixed_power.push_back(row[m]);
        tp.base_int.push_back(base);
    }
    return tp;
}

double restriction_value(const TonePoint& tp, double x)
{
    double f = -tp.own_weight * std::log1p(x / tp.own_int);
    for (std::size_t j = 0; j < tp.user.size(); ++j)
        f -= tp.weight[j] * std::log1p(tp.fixed_power[j] / tp.interferer_int(j, x));
    return f;
}

void restriction_derivatives(const TonePoint& tp, double x, double* f, double* d1,
                             double* d2)
{
    double v = -tp.own_weight * std::log1p(x / tp.own_int);
    const double own_rec = x + tp.own_int;
    double g1 = -tp.own_weight / own_rec;
    double g2 = tp.own_weight / (own_rec * own_rec);
    for (std::size_t j = 0; j < tp.user.size(); ++j) {
        const double sj = tp.fixed_power[j];
        const double in = tp.interferer_int(j, x);
        const double re = sj + in;
        const double w = tp.weight[j];
        const double g = tp.cross_gain[j];
        v -= w * std::log1p(sj / in);
        g1 += w * g * sj / (re * in);
        g2 -= w * g * g * sj * (re + in) / (re * in * re * in);
    }
    if (f)
        *f = v;
    if (d1)
        *d1 = g1;
    if (d2)
        *d2 = g2;
}

} // namespace spectra
