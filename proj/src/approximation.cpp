// SPDX-License-Identifier: Apache-2.0

#include "spectra/approximation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace spectra {

namespace {

// Curvature of one interferer's exact rate term (negated second derivative
// of -w log(1 + s/int(x))): w g^2 s (rec+int) / (rec int)^2, evaluated at x.
double phi_term(const TonePoint& tp, std::size_t j, double x)
{
    const double in = tp.interferer_int(j, x);
    const double re = tp.fixed_power[j] + in;
    const double g = tp.cross_gain[j];
    return tp.weight[j] * g * g * tp.fixed_power[j] * (re + in) / (re * in * re * in);
}

// Curvature contributed by one alpha-bound term: w alpha g^2 / int(x)^2.
double psi_term(const TonePoint& tp, std::size_t j, double alpha, double x)
{
    const double in = tp.interferer_int(j, x);
    const double g = tp.cross_gain[j];
    return tp.weight[j] * alpha * g * g / (in * in);
}

} // namespace

int MethodKind::declared_degree(int num_users) const
{
    if (tag == Method::CADSB || tag == Method::SCALE)
        return num_users;
    const int alphas = alpha_all ? num_users - 1 : alpha_refs;
    return 1 + (use_quad ? 1 : 0) + (use_ref_log ? 2 : 0) + alphas;
}

bool MethodKind::is_convex_kind() const
{
    if (tag == Method::IASB1 || tag == Method::IASB6)
        return true;
    if (tag == Method::IASB2 && convex_quad)
        return true;
    return false;
}

std::string MethodKind::name() const
{
    switch (tag) {
    case Method::CADSB: return "cadsb";
    case Method::SCALE: return "scale";
    case Method::IASB1: return "iasb1";
    case Method::IASB2: return convex_quad ? "iasb2-convex" : "iasb2";
    case Method::IASB3: return "iasb3";
    case Method::IASB4: return "iasb4";
    case Method::IASB5: return "iasb5";
    case Method::IASB6: return "iasb6";
    case Method::IASB7: return "iasb7";
    case Method::IASB8: return "iasb8";
    case Method::IASB9: return "iasb9";
    case Method::IASB10: return "iasb10";
    case Method::Generalized: break;
    }
    std::string out = "ia";
    if (alpha_all)
        out += "n";
    else
        out += std::to_string(1 + (use_quad ? 1 : 0) + (use_ref_log ? 2 : 0) + alpha_refs);
    std::string terms;
    if (use_beta)
        terms += "b";
    if (use_ref_log)
        terms += "r";
    if (alpha_all)
        terms += "a";
    else if (alpha_refs == 1)
        terms += "a";
    else if (alpha_refs > 1)
        terms += "a" + std::to_string(alpha_refs);
    if (use_quad)
        terms += "l";
    if (!terms.empty())
        out += "-" + terms;
    return out;
}

MethodKind MethodKind::preset(Method tag)
{
    MethodKind k;
    k.tag = tag;
    switch (tag) {
    case Method::CADSB:
    case Method::SCALE:
    case Method::IASB1:
    case Method::Generalized:
        break;
    case Method::IASB2: k.use_quad = true; break;
    case Method::IASB3: k.use_ref_log = true; break;
    case Method::IASB4: k.alpha_refs = 1; break;
    case Method::IASB5: k.alpha_refs = 2; break;
    case Method::IASB6: k.use_beta = true; break;
    case Method::IASB7: k.use_beta = true; k.use_ref_log = true; break;
    case Method::IASB8: k.use_beta = true; k.alpha_refs = 2; break;
    case Method::IASB9: k.alpha_refs = 1; k.use_quad = true; break;
    case Method::IASB10: k.alpha_all = true; break;
    }
    return k;
}

MethodKind MethodKind::parse(const std::string& raw)
{
    std::string s;
    for (char c : raw)
        s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    if (s == "cadsb" || s == "ca-dsb")
        return preset(Method::CADSB);
    if (s == "scale")
        return preset(Method::SCALE);
    if (s == "iasb2-convex" || s == "iasb2c") {
        MethodKind k = preset(Method::IASB2);
        k.convex_quad = true;
        return k;
    }
    if (s.rfind("iasb", 0) == 0) {
        const std::string num = s.substr(4);
        static const Method table[] = {Method::IASB1, Method::IASB2, Method::IASB3,
                                       Method::IASB4, Method::IASB5, Method::IASB6,
                                       Method::IASB7, Method::IASB8, Method::IASB9,
                                       Method::IASB10};
        for (int i = 1; i <= 10; ++i)
            if (num == std::to_string(i))
                return preset(table[i - 1]);
        throw std::invalid_argument("unknown method name '" + raw + "'");
    }
    if (s.rfind("ia", 0) == 0) {
        MethodKind k;
        k.tag = Method::Generalized;
        std::size_t pos = 2;
        int budget = -1;
        if (pos < s.size() && s[pos] == 'n') {
            k.alpha_all = true;
            ++pos;
        } else {
            std::size_t digits = pos;
            while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits])))
                ++digits;
            if (digits == pos)
                throw std::invalid_argument("generalized method '" + raw +
                                            "' must be ia<digits|n>[-terms]");
            budget = std::stoi(s.substr(pos, digits - pos));
            pos = digits;
        }
        if (pos < s.size()) {
            if (s[pos] != '-')
                throw std::invalid_argument("generalized method '" + raw +
                                            "': expected '-' before terms");
            ++pos;
            while (pos < s.size()) {
                const char c = s[pos++];
                if (c == 'b') {
                    k.use_beta = true;
                } else if (c == 'l') {
                    k.use_quad = true;
                } else if (c == 'r') {
                    if (k.alpha_all)
                        throw std::invalid_argument("'r' cannot combine with degree n");
                    k.use_ref_log = true;
                } else if (c == 'a') {
                    int count = 1;
                    if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                        count = s[pos++] - '0';
                    if (!k.alpha_all)
                        k.alpha_refs += count;
                } else {
                    throw std::invalid_argument(std::string("unknown term '") + c +
                                                "' in method '" + raw + "'");
                }
            }
        }
        if (k.alpha_all && !k.use_quad && !k.use_ref_log && k.alpha_refs == 0 &&
            budget == -1) {
            // ian or ian-b or ian-a: alpha on all other users.
        }
        if (!k.alpha_all) {
            const int implied = 1 + (k.use_quad ? 1 : 0) + (k.use_ref_log ? 2 : 0) +
                                k.alpha_refs;
            if (budget != implied)
                throw std::invalid_argument(
                    "method '" + raw + "': degree budget " + std::to_string(budget) +
                    " does not match terms (implied " + std::to_string(implied) + ")");
        }
        return k;
    }
    throw std::invalid_argument("unknown method name '" + raw + "'");
}

std::vector<int> resolve_references(const ApproximationSpec& spec, int n, int num_users,
                                    int count)
{
    std::vector<int> out;
    if (count <= 0 || num_users <= 1)
        return out; // single-user: reference terms vanish, methods degenerate
    auto push = [&](int candidate) {
        if (candidate < 0 || candidate >= num_users || candidate == n)
            return;
        if (std::find(out.begin(), out.end(), candidate) != out.end())
            return;
        if (static_cast<int>(out.size()) < count)
            out.push_back(candidate);
    };
    for (int candidate : {spec.ref_q, spec.ref_t, spec.ref_fallback})
        push(candidate);
    const int available = std::min(count, num_users - 1);
    if (static_cast<int>(out.size()) < available)
        throw std::invalid_argument(
            "reference-line conflict: q/t/fallback leave user " + std::to_string(n) +
            " without " + std::to_string(available) + " distinct reference line(s)");
    return out; // shorter than count only when N-1 < count
}

double alpha_param(const Channel& ch, const PowerAllocation& s_build, int k, int m)
{
    const double sm = s_build.at(k, m);
    if (sm == 0.0)
        return 0.0;
    return sm / received(ch, s_build, k, m);
}

double cadsb_b_param(const Channel& ch, const PowerAllocation& s_build, int k, int n)
{
    double b = 0.0;
    for (int m = 0; m < ch.users(); ++m) {
        if (m == n)
            continue;
        b += ch.weight(m) * ch.gain(k, m, n) / interference(ch, s_build, k, m);
    }
    return b;
}

double scale_c_param(const Channel& ch, const PowerAllocation& s_build, int k, int m)
{
    const double sm = s_build.at(k, m);
    if (sm == 0.0)
        return 0.0;
    const double in = interference(ch, s_build, k, m);
    const double w = ch.weight(m);
    const double alpha = sm / (sm + in);
    return -w * std::log1p(sm / in) + w * alpha * std::log(sm / in);
}

namespace {

struct TuningInputs
{
    const TonePoint& tp;
    double build_x;
    std::vector<std::size_t> ref_slots;   // slots of 'r' references
    std::vector<std::size_t> alpha_slots; // slots of alpha references
    std::vector<double> alphas;           // per alpha slot
};

bool is_ref_slot(const TuningInputs& in, std::size_t j)
{
    return std::find(in.ref_slots.begin(), in.ref_slots.end(), j) != in.ref_slots.end();
}

// Sum of phi over interferers outside the 'r' set minus psi over the alpha
// set, at point x. This is the negated curvature budget available to beta/L.
double curvature_budget(const TuningInputs& in, double x)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < in.tp.user.size(); ++j)
        if (!is_ref_slot(in, j))
            acc += phi_term(in.tp, j, x);
    for (std::size_t i = 0; i < in.alpha_slots.size(); ++i)
        acc -= psi_term(in.tp, in.alpha_slots[i], in.alphas[i], x);
    return acc;
}

ThetaRecord compute_tuning(const MethodKind& kind, const TuningInputs& in,
                           const std::optional<double>& override_theta)
{
    ThetaRecord out;
    out.has_beta = kind.use_beta;
    out.has_quad = kind.use_quad;
    if (!kind.use_beta && !kind.use_quad)
        return out;

    const TonePoint& tp = in.tp;
    const double mask = tp.mask;
    const double wn = tp.own_weight;
    const bool has_alpha = !in.alpha_slots.empty();

    if (kind.use_beta) {
        if (override_theta) {
            out.beta = *override_theta;
        } else {
            // Own received-signal factor at s = 0, curvature sums at s = mask.
            double beta = tp.own_int * tp.own_int * curvature_budget(in, mask) / wn;
            if (has_alpha) {
                // The alpha terms add positive curvature to f2, so the
                // endpoint value alone does not bound it everywhere; clamp
                // with the check grid and never allow a loosening beta.
                double cap = beta;
                for (double x : bound_grid(mask, in.build_x)) {
                    const double rec = x + tp.own_int;
                    cap = std::min(cap, rec * rec * curvature_budget(in, x) / wn);
                }
                beta = std::max(0.0, cap);
            }
            out.beta = beta;
        }
    }

    if (kind.use_quad) {
        if (override_theta && !kind.use_beta) {
            out.quad = *override_theta;
            return out;
        }
        auto budget_with_beta = [&](double x) {
            double acc = curvature_budget(in, x);
            if (out.beta != 0.0) {
                const double rec = x + tp.own_int;
                acc -= out.beta * wn / (rec * rec);
            }
            return acc;
        };
        double L = budget_with_beta(mask) / 2.0;
        if (has_alpha || out.beta != 0.0) {
            for (double x : bound_grid(mask, in.build_x))
                L = std::min(L, budget_with_beta(x) / 2.0);
        }
        if (kind.convex_quad) {
            // Additional cap keeping f1 convex: L <= w_n / (2 rec_hat^2)
            // with the own power at the mask.
            const double rec_hat = mask + tp.own_int;
            L = std::min(L, wn / (2.0 * rec_hat * rec_hat));
        }
        out.quad = L;
    }
    return out;
}

} // namespace

ThetaRecord tuning_param(const MethodKind& kind, const Channel& ch,
                         const PowerAllocation& s_build, int k, int n,
                         const ApproximationSpec& spec)
{
    const TonePoint tp = make_tone_point(ch, s_build, k, n);
    TuningInputs in{tp, s_build.at(k, n), {}, {}, {}};

    const int n_refs = kind.use_ref_log ? 1 : 0;
    const int n_alpha = kind.alpha_all ? ch.users() - 1 : kind.alpha_refs;
    std::vector<int> refs;
    if (kind.alpha_all) {
        refs = resolve_references(spec, n, ch.users(), n_refs);
        for (std::size_t j = 0; j < tp.user.size(); ++j)
            in.alpha_slots.push_back(j);
    } else {
        refs = resolve_references(spec, n, ch.users(), n_refs + n_alpha);
    }
    auto slot_of = [&](int user) {
        for (std::size_t j = 0; j < tp.user.size(); ++j)
            if (tp.user[j] == user)
                return j;
        throw std::logic_error("reference user not found in tone point");
    };
    for (int i = 0; i < n_refs && i < static_cast<int>(refs.size()); ++i)
        in.ref_slots.push_back(slot_of(refs[i]));
    if (!kind.alpha_all)
        for (int i = n_refs; i < static_cast<int>(refs.size()); ++i)
            in.alpha_slots.push_back(slot_of(refs[i]));
    for (std::size_t j : in.alpha_slots)
        in.alphas.push_back(alpha_param(ch, s_build, k, tp.user[j]));

    return compute_tuning(kind, in, spec.theta_override);
}

std::vector<double> bound_grid(double mask, double build_point)
{
    std::vector<double> pts;
    pts.reserve(259);
    pts.push_back(0.0);
    for (int i = 1; i <= 256; ++i)
        pts.push_back(mask * static_cast<double>(i) / 257.0);
    pts.push_back(mask);
    pts.push_back(build_point);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double UnivariateApproximation::f1_value(double x) const
{
    double v = own_const;
    switch (own_style) {
    case OwnStyle::Ratio:
        v += own_coeff * std::log1p(x / own_int);
        break;
    case OwnStyle::Rec:
        v += own_coeff * std::log(x + own_int);
        break;
    case OwnStyle::Power:
        if (own_coeff != 0.0)
            v += own_coeff * std::log(x);
        break;
    }
    for (const Term& t : terms) {
        switch (t.style) {
        case Term::Style::RefLog:
            v -= t.w * std::log1p(t.s / (t.base + t.g * x));
            break;
        case Term::Style::RecLog:
            v -= t.w * std::log(t.s + t.base + t.g * x);
            break;
        case Term::Style::AlphaLog:
            v += t.coeff * std::log(t.base + t.g * x) + t.cnst;
            break;
        }
    }
    if (quad_L != 0.0) {
        const double dx = x - build_point;
        v -= quad_L * dx * dx;
    }
    return v;
}

double UnivariateApproximation::f1_derivative(double x) const
{
    double d = 0.0;
    for (const Pole& p : poles_)
        d += p.coef / (p.a * x + p.c);
    if (quad_L != 0.0)
        d -= 2.0 * quad_L * (x - build_point);
    return d;
}

int UnivariateApproximation::emitted_degree() const
{
    return static_cast<int>(poles_.size()) + (quad_L != 0.0 ? 1 : 0);
}

namespace {

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

void poly_acc(std::vector<double>& acc, const std::vector<double>& a, double scale)
{
    if (acc.size() < a.size())
        acc.resize(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        acc[i] += scale * a[i];
}

} // namespace

PolynomialEq UnivariateApproximation::stationarity(double lambda) const
{
    const double shift = lambda + lin_d;
    // Denominator D(x) = prod (a_i x + c_i) over pole factors.
    std::vector<double> denom{1.0};
    for (const Pole& p : poles_)
        denom = poly_mul(denom, {p.c, p.a});

    std::vector<double> out(static_cast<std::size_t>(emitted_degree()) + 1, 0.0);
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        std::vector<double> partial{1.0};
        for (std::size_t j = 0; j < poles_.size(); ++j)
            if (j != i)
                partial = poly_mul(partial, {poles_[j].c, poles_[j].a});
        poly_acc(out, partial, poles_[i].coef);
    }
    if (quad_L != 0.0) {
        poly_acc(out, poly_mul({shift + 2.0 * quad_L * build_point, -2.0 * quad_L}, denom),
                 1.0);
    } else {
        poly_acc(out, denom, shift);
    }
    out.resize(static_cast<std::size_t>(emitted_degree()) + 1, 0.0);
    return PolynomialEq{std::move(out)};
}

std::array<double, 8> UnivariateApproximation::rational_p() const
{
    if (emitted_degree() > 3)
        throw std::logic_error("rational p-form is only defined up to degree 3");
    std::vector<double> denom{1.0};
    for (const Pole& p : poles_)
        denom = poly_mul(denom, {p.c, p.a});
    std::vector<double> numer;
    for (std::size_t i = 0; i < poles_.size(); ++i) {
        std::vector<double> partial{1.0};
        for (std::size_t j = 0; j < poles_.size(); ++j)
            if (j != i)
                partial = poly_mul(partial, {poles_[j].c, poles_[j].a});
        poly_acc(numer, partial, poles_[i].coef);
    }
    if (quad_L != 0.0)
        poly_acc(numer, poly_mul({2.0 * quad_L * build_point, -2.0 * quad_L}, denom), 1.0);
    numer.resize(4, 0.0);
    denom.resize(4, 0.0);
    // (p1 x^3 + p2 x^2 + p3 x + p4) / (p5 x^3 + p6 x^2 + p7 x + p8)
    return {numer[3], numer[2], numer[1], numer[0], denom[3], denom[2], denom[1], denom[0]};
}

double UnivariateApproximation::fixed_point_step(double lambda, double x,
                                                 bool* diverged) const
{
    double rest = lambda + lin_d;
    const std::size_t first = own_pole_present_ ? 1 : 0;
    for (std::size_t i = first; i < poles_.size(); ++i)
        rest += poles_[i].coef / (poles_[i].a * x + poles_[i].c);
    if (quad_L != 0.0)
        rest -= 2.0 * quad_L * (x - build_point);

    if (diverged)
        *diverged = false;
    if (!(rest > 0.0) || !std::isfinite(rest)) {
        if (diverged)
            *diverged = true;
        return mask;
    }
    double next;
    if (own_style == OwnStyle::Power)
        next = -own_coeff / rest;
    else
        next = -own_coeff / rest - own_int;
    if (!std::isfinite(next)) {
        if (diverged)
            *diverged = true;
        return mask;
    }
    return std::clamp(next, 0.0, mask);
}

UnivariateApproximation build_approximation(const ApproximationSpec& spec,
                                            const Channel& ch,
                                            const PowerAllocation& s_build, int k, int n)
{
    const MethodKind& kind = spec.kind;
    const TonePoint tp = make_tone_point(ch, s_build, k, n);
    const double x0 = s_build.at(k, n);
    if (x0 < 0.0 || x0 > tp.mask * (1.0 + 1e-9))
        throw std::invalid_argument("build point outside [0, mask]");

    UnivariateApproximation app;
    app.kind = kind;
    app.tone = k;
    app.user = n;
    app.build_point = std::min(x0, tp.mask);
    app.mask = tp.mask;
    app.own_weight = tp.own_weight;
    app.own_int = tp.own_int;
    app.declared_degree = kind.declared_degree(ch.users());

    enum class TermRole { Plain, Ref, Alpha, RecAll, AlphaAll };
    std::vector<TermRole> role(tp.user.size(), TermRole::Plain);

    if (kind.tag == Method::CADSB) {
        app.own_style = UnivariateApproximation::OwnStyle::Rec;
        app.own_coeff = -tp.own_weight;
        for (std::size_t j = 0; j < tp.user.size(); ++j)
            role[j] = TermRole::RecAll;
        app.params.b = cadsb_b_param(ch, s_build, k, n);
    } else if (kind.tag == Method::SCALE) {
        app.own_style = UnivariateApproximation::OwnStyle::Power;
        double alpha_n = alpha_param(ch, s_build, k, n);
        double c_n = scale_c_param(ch, s_build, k, n);
        double user_total = 0.0;
        for (int kk = 0; kk < ch.tones(); ++kk)
            user_total += s_build.at(kk, n);
        if (alpha_n < 1e-15 && user_total > 0.0) {
            // Negligible own power on this tone: the alpha -> 0 limit has
            // no log barrier, so the tone can switch off cleanly instead of
            // decaying into denormals.
            alpha_n = 0.0;
            c_n = 0.0;
        }
        if (alpha_n == 0.0 && user_total == 0.0) {
            // The log bound has no tangent at zero own power; bootstrap with
            // the high-SNR limit (alpha = 1). The surrogate stays an upper
            // bound (log z <= log(1+z)) but is not tight at this one corner,
            // matching the classic initialization of the method.
            alpha_n = 1.0;
            c_n = 0.0;
            app.params.high_snr_bootstrap = true;
        }
        app.own_coeff = -tp.own_weight * alpha_n;
        app.own_const = tp.own_weight * alpha_n * std::log(tp.own_int) - c_n;
        app.params.own_alpha = alpha_n;
        app.params.own_c = c_n;
        for (std::size_t j = 0; j < tp.user.size(); ++j)
            role[j] = TermRole::AlphaAll;
    } else {
        app.own_style = UnivariateApproximation::OwnStyle::Ratio;
        const int n_refs = kind.use_ref_log ? 1 : 0;
        const int n_alpha = kind.alpha_all ? ch.users() - 1 : kind.alpha_refs;
        TuningInputs tin{tp, app.build_point, {}, {}, {}};
        std::vector<int> refs;
        if (kind.alpha_all) {
            refs = resolve_references(spec, n, ch.users(), n_refs);
            for (std::size_t j = 0; j < tp.user.size(); ++j) {
                role[j] = TermRole::Alpha;
                tin.alpha_slots.push_back(j);
            }
        } else {
            refs = resolve_references(spec, n, ch.users(), n_refs + n_alpha);
        }
        auto slot_of = [&](int user) {
            for (std::size_t j = 0; j < tp.user.size(); ++j)
                if (tp.user[j] == user)
                    return j;
            throw std::logic_error("reference user not found in tone point");
        };
        for (int i = 0; i < static_cast<int>(refs.size()); ++i) {
            const std::size_t j = slot_of(refs[i]);
            if (i < n_refs) {
                role[j] = TermRole::Ref;
                tin.ref_slots.push_back(j);
            } else if (!kind.alpha_all) {
                role[j] = TermRole::Alpha;
                tin.alpha_slots.push_back(j);
            }
        }
        for (std::size_t j : tin.alpha_slots)
            tin.alphas.push_back(alpha_param(ch, s_build, k, tp.user[j]));

        const ThetaRecord theta = compute_tuning(kind, tin, spec.theta_override);
        app.params.beta = theta.beta;
        app.params.quad_L = theta.quad;
        app.quad_L = theta.quad;
        app.own_coeff = -tp.own_weight * (1.0 - theta.beta);
    }

    // Interferer terms of f1 plus the linearization slope d = f2'(x~),
    // assembled termwise to avoid cancellation: an interferer kept exactly
    // in f1 contributes nothing to d; an alpha-bound interferer contributes
    // exactly zero at the build point; everything else contributes its full
    // (or residual) derivative.
    double d = 0.0;
    const double own_rec0 = app.build_point + tp.own_int;
    if (app.own_style == UnivariateApproximation::OwnStyle::Ratio &&
        app.params.beta != 0.0)
        d += -app.params.beta * tp.own_weight / own_rec0;

    for (std::size_t j = 0; j < tp.user.size(); ++j) {
        const double w = tp.weight[j];
        const double g = tp.cross_gain[j];
        const double sj = tp.fixed_power[j];
        const double base = tp.base_int[j];
        const double int0 = tp.interferer_int(j, app.build_point);
        const double rec0 = sj + int0;
        switch (role[j]) {
        case TermRole::Plain:
            d += w * g * sj / (rec0 * int0);
            break;
        case TermRole::Ref:
            if (sj > 0.0)
                app.terms.push_back({UnivariateApproximation::Term::Style::RefLog, w, g,
                                     sj, base, 0.0, 0.0});
            break;
        case TermRole::RecAll:
            app.terms.push_back({UnivariateApproximation::Term::Style::RecLog, w, g, sj,
                                 base, 0.0, 0.0});
            d += w * g / int0;
            break;
        case TermRole::Alpha:
        case TermRole::AlphaAll: {
            const int m = tp.user[j];
            const double alpha = alpha_param(ch, s_build, k, m);
            const double c = scale_c_param(ch, s_build, k, m);
            app.params.alpha_users.push_back(m);
            app.params.alphas.push_back(alpha);
            app.params.cs.push_back(c);
            if (alpha > 0.0) {
                const double coeff = w * alpha;
                const double cnst = -coeff * std::log(sj) - c;
                app.terms.push_back({UnivariateApproximation::Term::Style::AlphaLog, w, g,
                                     sj, base, coeff, cnst});
            }
            // The residual f2 part of an alpha-bound term is stationary at
            // the build point (the bound is tight to first order there), so
            // it contributes nothing to d.
            break;
        }
        }
    }

    // Pole list for the rational derivative; own pole first.
    if (app.own_style == UnivariateApproximation::OwnStyle::Power) {
        if (app.own_coeff != 0.0) {
            app.poles_.push_back({app.own_coeff, 1.0, 0.0});
            app.own_pole_present_ = true;
        }
    } else {
        app.poles_.push_back({app.own_coeff, 1.0, tp.own_int});
        app.own_pole_present_ = true;
    }
    for (const auto& t : app.terms) {
        if (t.g == 0.0)
            continue;
        switch (t.style) {
        case UnivariateApproximation::Term::Style::RefLog:
            app.poles_.push_back({-t.w * t.g, t.g, t.base + t.s});
            app.poles_.push_back({t.w * t.g, t.g, t.base});
            break;
        case UnivariateApproximation::Term::Style::RecLog:
            app.poles_.push_back({-t.w * t.g, t.g, t.base + t.s});
            break;
        case UnivariateApproximation::Term::Style::AlphaLog:
            app.poles_.push_back({t.coeff * t.g, t.g, t.base});
            break;
        }
    }

    app.lin_d = d;
    if (app.params.high_snr_bootstrap) {
        // No value anchor exists at zero own power; the remaining f2 parts
        // are tangent to the zero function there.
        app.lin_e = 0.0;
    } else {
        const double f_at_build = restriction_value(tp, app.build_point);
        app.lin_e = f_at_build - app.f1_value(app.build_point) - d * app.build_point;
    }
    app.closed_form = app.emitted_degree() <= 3;
    return app;
}

} // namespace spectra
