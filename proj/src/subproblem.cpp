// SPDX-License-Identifier: Apache-2.0

#include "spectra/subproblem.hpp"

#include "spectra/units.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectra {

namespace {

double poly_eval(const std::vector<double>& c, double x)
{
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;)
        acc = acc * x + c[i];
    return acc;
}

double poly_eval_deriv(const std::vector<double>& c, double x)
{
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 1;)
        acc = acc * x + c[i] * static_cast<double>(i);
    return acc;
}

double newton_polish(const std::vector<double>& c, double x)
{
    for (int it = 0; it < 2; ++it) {
        const double p = poly_eval(c, x);
        const double dp = poly_eval_deriv(c, x);
        if (dp == 0.0 || !std::isfinite(dp))
            break;
        const double step = p / dp;
        if (!std::isfinite(step))
            break;
        x -= step;
    }
    return x;
}

// Effective coefficients: strip leading entries that are negligible
// relative to the largest coefficient.
std::vector<double> trim(const std::vector<double>& c)
{
    double scale = 0.0;
    for (double v : c)
        scale = std::max(scale, std::fabs(v));
    if (scale == 0.0)
        return {};
    std::size_t deg = c.size();
    while (deg > 0 && std::fabs(c[deg - 1]) <= 1e-14 * scale)
        --deg;
    return {c.begin(), c.begin() + deg};
}

void solve_quadratic(double c0, double c1, double c2, std::vector<double>& out)
{
    // Numerically stable form of the quadratic formula.
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0)
        return;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
    if (q != 0.0) {
        out.push_back(q / c2);
        out.push_back(c0 / q);
    } else {
        out.push_back(0.0);
        out.push_back(-c1 / c2);
    }
}

void solve_cubic(const std::vector<double>& c, std::vector<double>& out)
{
    // Normalize to x^3 + a x^2 + b x + d, depress with x = t - a/3.
    const double a = c[2] / c[3];
    const double b = c[1] / c[3];
    const double d = c[0] / c[3];
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
    const double shift = -a / 3.0;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    if (disc > 0.0) {
        // Three real roots: trigonometric branch.
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int j = 0; j < 3; ++j)
            out.push_back(shift + m * std::cos(theta - 2.0 * M_PI * j / 3.0));
    } else {
        // One real root: Cardano.
        const double rad = q * q / 4.0 + p * p * p / 27.0; // >= 0 here
        const double sq = std::sqrt(std::max(rad, 0.0));
        const double u = std::cbrt(-q / 2.0 + sq);
        const double v = std::cbrt(-q / 2.0 - sq);
        out.push_back(shift + u + v);
        if (disc == 0.0 && (p != 0.0 || q != 0.0))
            out.push_back(shift - (u + v) / 2.0); // double root
    }
}

// Deterministic fallback for degree >= 4: the real roots of p' split the
// line into monotone pieces; bisect each sign-changing bracket.
void solve_numeric(const std::vector<double>& c, std::vector<double>& out);

void candidate_roots(const std::vector<double>& c, std::vector<double>& out)
{
    const std::size_t deg = c.size() - 1;
    if (deg == 1) {
        out.push_back(-c[0] / c[1]);
    } else if (deg == 2) {
        solve_quadratic(c[0], c[1], c[2], out);
    } else if (deg == 3) {
        solve_cubic(c, out);
    } else if (deg >= 4) {
        solve_numeric(c, out);
    }
    // A leading coefficient that is small (but above the trim threshold)
    // pushes one root far out and poisons the closed forms for the near
    // ones. The truncated polynomial locates those; the polish against the
    // full polynomial below sorts the candidates out.
    if (deg >= 2) {
        double scale = 0.0;
        for (double v : c)
            scale = std::max(scale, std::fabs(v));
        if (std::fabs(c[deg]) <= 1e-5 * scale) {
            const std::vector<double> lower = trim({c.begin(), c.end() - 1});
            if (lower.size() >= 2)
                candidate_roots(lower, out);
        }
    }
}

std::vector<double> roots_of(const std::vector<double>& c)
{
    std::vector<double> out;
    candidate_roots(c, out);
    for (double& r : out)
        r = newton_polish(c, r);
    // Keep only candidates that are actual roots of the full polynomial.
    std::vector<double> roots;
    for (double r : out) {
        double mag = std::fabs(c[0]);
        double xp = 1.0;
        for (std::size_t i = 1; i < c.size(); ++i) {
            xp *= std::fabs(r);
            mag += std::fabs(c[i]) * xp;
        }
        if (std::fabs(poly_eval(c, r)) <= 1e-9 * mag)
            roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end());
    // Collapse duplicates produced by multiple-root branches.
    double span = 1.0;
    for (double r : roots)
        span = std::max(span, std::fabs(r));
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double a, double b) { return std::fabs(a - b) <= 1e-12 * span; }),
                roots.end());
    return roots;
}

void solve_numeric(const std::vector<double>& c, std::vector<double>& out)
{
    std::vector<double> deriv(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i)
        deriv[i - 1] = c[i] * static_cast<double>(i);
    const std::vector<double> dtrim = trim(deriv);
    std::vector<double> crit;
    if (dtrim.size() >= 2)
        crit = roots_of(dtrim);

    // Cauchy bound on root magnitude.
    double bound = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        bound = std::max(bound, std::fabs(c[i] / c.back()));
    bound += 1.0;

    std::vector<double> knots{-bound};
    for (double r : crit)
        if (r > -bound && r < bound)
            knots.push_back(r);
    knots.push_back(bound);

    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double lo = knots[i], hi = knots[i + 1];
        double flo = poly_eval(c, lo), fhi = poly_eval(c, hi);
        if (flo == 0.0) {
            out.push_back(lo);
            continue;
        }
        if (fhi == 0.0) {
            if (i + 2 == knots.size())
                out.push_back(hi);
            continue;
        }
        if ((flo < 0.0) == (fhi < 0.0))
            continue;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::fabs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = poly_eval(c, mid);
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        out.push_back(0.5 * (lo + hi));
    }
}

} // namespace

RootsResult real_roots(const PolynomialEq& poly)
{
    RootsResult res;
    const std::vector<double> c = trim(poly.coeffs);
    if (c.empty()) {
        res.identically_zero = true;
        return res;
    }
    if (c.size() == 1)
        return res; // nonzero constant: no roots
    res.used_numeric_fallback = c.size() - 1 > 3;
    res.roots = roots_of(c);
    return res;
}

namespace {

SubproblemSolution pick_candidates(const UnivariateApproximation& app, double lambda,
                                   const std::vector<double>& roots)
{
    SubproblemSolution sol;
    sol.candidates.push_back(0.0);
    for (double r : roots) {
        const double clamped = std::clamp(r, 0.0, app.mask);
        sol.candidates.push_back(clamped);
    }
    sol.candidates.push_back(app.mask);
    std::sort(sol.candidates.begin(), sol.candidates.end());
    sol.candidates.erase(std::unique(sol.candidates.begin(), sol.candidates.end()),
                         sol.candidates.end());

    double best = std::numeric_limits<double>::infinity();
    double best_x = 0.0;
    for (double x : sol.candidates) {
        const double v = app.value(x) + lambda * x;
        if (v < best) { // strict: ties stay with the smaller candidate
            best = v;
            best_x = x;
        }
    }
    sol.s = best_x;
    sol.value = best;
    return sol;
}

} // namespace

SubproblemSolution solve_closed_form(const UnivariateApproximation& app, double lambda,
                                     bool allow_numeric_fallback)
{
    if (!app.closed_form && !allow_numeric_fallback)
        throw std::runtime_error(
            "no closed-form roots: stationarity polynomial of degree " +
            std::to_string(app.emitted_degree()) + " for method " + app.kind.name());

    PolynomialEq poly = app.stationarity(lambda);
    // Rescale the variable to [0, 1] for conditioning; roots map back by
    // the mask factor.
    const double scale = app.mask > 0.0 ? app.mask : 1.0;
    double f = 1.0;
    for (auto& coef : poly.coeffs) {
        coef *= f;
        f *= scale;
    }
    RootsResult roots = real_roots(poly);
    std::vector<double> mapped;
    mapped.reserve(roots.roots.size());
    for (double r : roots.roots)
        mapped.push_back(r * scale);

    SubproblemSolution sol = pick_candidates(app, lambda, mapped);
    sol.method = SolveMode::ClosedForm;
    sol.used_numeric_fallback = !app.closed_form;
    return sol;
}

SubproblemSolution solve_fixed_point(const UnivariateApproximation& app, double lambda,
                                     const FixedPointOptions& opts)
{
    SubproblemSolution sol;
    sol.method = SolveMode::FixedPoint;
    double x = app.build_point;
    bool diverged = false;
    bool converged = false;
    int it = 0;
    while (it < opts.max_iters) {
        const double next = app.fixed_point_step(lambda, x, &diverged);
        sol.diverged_guard = sol.diverged_guard || diverged;
        ++it;
        const bool done = dbm_distance(next, x) <= opts.tol_db;
        x = next;
        if (done) {
            converged = true;
            break;
        }
    }
    // Count updates that moved the iterate; the confirming update is not an
    // extra unit of work in the usual accounting (one update suffices for
    // the methods whose step equals the closed form).
    sol.fixed_point_iters = converged ? std::max(1, it - 1) : it;
    sol.fixed_point_converged = converged;
    sol.s = x;
    sol.value = app.value(x) + lambda * x;
    sol.candidates = {x};
    return sol;
}

SubproblemSolution solve_subproblem(const UnivariateApproximation& app, double lambda,
                                    SolveMode mode, const FixedPointOptions& opts)
{
    return mode == SolveMode::ClosedForm ? solve_closed_form(app, lambda)
                                         : solve_fixed_point(app, lambda, opts);
}

} // namespace spectra
