// SPDX-License-Identifier: Apache-2.0

#include "spectra/verify.hpp"

#include "spectra/parallel.hpp"
#include "spectra/rng.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace spectra {

std::vector<MethodKind> all_method_kinds()
{
    std::vector<MethodKind> kinds;
    for (Method m : {Method::CADSB, Method::SCALE, Method::IASB1, Method::IASB2,
                     Method::IASB3, Method::IASB4, Method::IASB5, Method::IASB6,
                     Method::IASB7, Method::IASB8, Method::IASB9, Method::IASB10})
        kinds.push_back(MethodKind::preset(m));
    return kinds;
}

std::vector<std::pair<MethodKind, MethodKind>> tightness_pairs()
{
    auto p = [](Method a, Method b) {
        return std::make_pair(MethodKind::preset(a), MethodKind::preset(b));
    };
    return {
        p(Method::IASB1, Method::CADSB),  p(Method::IASB2, Method::IASB1),
        p(Method::IASB3, Method::IASB1),  p(Method::IASB4, Method::IASB1),
        p(Method::IASB3, Method::IASB4),  p(Method::IASB5, Method::IASB4),
        p(Method::IASB5, Method::IASB1),  p(Method::IASB6, Method::IASB1),
        p(Method::IASB7, Method::IASB3),  p(Method::IASB8, Method::IASB5),
        p(Method::IASB10, Method::IASB1), p(Method::IASB10, Method::IASB4),
        p(Method::IASB10, Method::IASB5), p(Method::IASB10, Method::CADSB),
        p(Method::IASB10, Method::SCALE),
    };
}

VerifyInstance make_verify_instance(const VerifyOptions& opts, int index)
{
    VerifyInstance inst;
    inst.seed = split_seed(opts.seed, static_cast<std::uint64_t>(index));

    SynthesisParams params;
    params.num_users = opts.users_min + index % (opts.users_max - opts.users_min + 1);
    params.num_tones = opts.tones;
    params.coupling_db_min = opts.coupling_db_min;
    params.coupling_db_max = opts.coupling_db_max;
    params.noise_floor_dbm = opts.noise_floor_dbm;
    params.seed = inst.seed;
    inst.channel = generate_synthetic(params);

    Rng rng(split_seed(inst.seed, 0xb1dULL));
    inst.build = PowerAllocation::zeros(inst.channel);
    for (int k = 0; k < inst.channel.tones(); ++k) {
        for (int n = 0; n < inst.channel.users(); ++n) {
            const double mask = inst.channel.mask(k, n);
            const double u = rng.uniform();
            double s;
            if (u < 0.2)
                s = 0.0;
            else if (u < 0.4)
                s = mask;
            else
                s = rng.uniform() * mask;
            inst.build.set(k, n, s);
        }
    }
    inst.tone = rng.index(inst.channel.tones());
    inst.user = rng.index(inst.channel.users());
    // The tested user's own build power stays strictly positive: the SCALE
    // bound is not first-order tight at zero own power (which is why that
    // method starts from a high-SNR point rather than from zero).
    if (inst.build.at(inst.tone, inst.user) == 0.0)
        inst.build.set(inst.tone, inst.user,
                       (0.05 + 0.9 * rng.uniform()) *
                           inst.channel.mask(inst.tone, inst.user));
    return inst;
}

namespace {

ApproximationSpec default_spec(MethodKind kind)
{
    ApproximationSpec spec;
    spec.kind = kind;
    spec.ref_q = 0;
    spec.ref_t = 1;
    spec.ref_fallback = 2;
    return spec;
}

} // namespace


namespace {

void sort_violations(VerifyReport& report)
{
    std::sort(report.violations.begin(), report.violations.end(),
              [](const Violation& a, const Violation& b) {
                  if (a.instance != b.instance)
                      return a.instance < b.instance;
                  if (a.suite != b.suite)
                      return a.suite < b.suite;
                  return a.detail < b.detail;
              });
}

} // namespace

VerifyReport verify_conditions(const VerifyOptions& opts)
{
    VerifyReport report;
    std::mutex mu;
    const auto kinds = all_method_kinds();

    parallel_for(static_cast<std::size_t>(opts.instances), [&](std::size_t idx) {
        const VerifyInstance inst = make_verify_instance(opts, static_cast<int>(idx));
        const int k = inst.tone;
        const int n = inst.user;
        const TonePoint tp = make_tone_point(inst.channel, inst.build, k, n);
        double f0, f1;
        restriction_derivatives(tp, inst.build.at(k, n), &f0, &f1, nullptr);
        const auto grid = bound_grid(tp.mask, inst.build.at(k, n));
        std::vector<double> f_true(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            f_true[i] = restriction_value(tp, grid[i]);

        std::vector<Violation> local;
        long long local_checks = 0;
        for (const MethodKind& kind : kinds) {
            auto app = build_approximation(default_spec(kind), inst.channel, inst.build,
                                           k, n);
            if (opts.corrupt_d)
                app.lin_d += 1e-3 * (1.0 + std::fabs(app.lin_d));
            auto flag = [&](const char* suite, double x, double magnitude) {
                local.push_back({suite, kind.name(), static_cast<int>(idx), inst.seed, k,
                                 n, x, magnitude});
            };
            // Condition: value match at the build point.
            const double value_err = std::fabs(app.value(app.build_point) - f0);
            ++local_checks;
            if (!(value_err <= opts.value_tol))
                flag("cond14", app.build_point, value_err);
            // Condition: derivative match at the build point.
            const double deriv_err = std::fabs(app.derivative(app.build_point) - f1);
            ++local_checks;
            if (!(deriv_err <= opts.derivative_tol * std::max(std::fabs(f1), 1e-9)))
                flag("cond15", app.build_point, deriv_err);
            // Condition: global upper bound on the check grid.
            double worst = 0.0;
            double worst_x = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double av = app.value(grid[i]);
                if (std::isinf(av) && av > 0.0)
                    continue;
                const double gap = f_true[i] - av; // > 0 means f_app below f
                if (gap > worst) {
                    worst = gap;
                    worst_x = grid[i];
                }
            }
            ++local_checks;
            if (!(worst <= opts.bound_slack))
                flag("cond16", worst_x, worst);
        }
        std::lock_guard<std::mutex> lock(mu);
        report.checks += local_checks;
        for (auto& v : local)
            report.violations.push_back(std::move(v));
    });
    sort_violations(report);
    return report;
}

VerifyReport verify_tightness(const VerifyOptions& opts)
{
    VerifyReport report;
    std::mutex mu;
    const auto pairs = tightness_pairs();

    parallel_for(static_cast<std::size_t>(opts.instances), [&](std::size_t idx) {
        const VerifyInstance inst = make_verify_instance(opts, static_cast<int>(idx));
        const int k = inst.tone;
        const int n = inst.user;
        const auto grid = bound_grid(inst.channel.mask(k, n), inst.build.at(k, n));

        std::vector<Violation> local;
        long long local_checks = 0;
        for (const auto& [tighter, looser] : pairs) {
            const auto app_a =
                build_approximation(default_spec(tighter), inst.channel, inst.build, k, n);
            const auto app_b =
                build_approximation(default_spec(looser), inst.channel, inst.build, k, n);
            double worst = 0.0;
            double worst_x = 0.0;
            for (double x : grid) {
                const double va = app_a.value(x);
                const double vb = app_b.value(x);
                if (std::isinf(vb) && vb > 0.0)
                    continue;
                const double gap = va - vb; // > 0 violates a <= b
                if (gap > worst) {
                    worst = gap;
                    worst_x = x;
                }
            }
            ++local_checks;
            if (!(worst <= opts.order_slack))
                local.push_back({"order", tighter.name() + "<=" + looser.name(),
                                 static_cast<int>(idx), inst.seed, k, n, worst_x, worst});
        }
        std::lock_guard<std::mutex> lock(mu);
        report.checks += local_checks;
        for (auto& v : local)
            report.violations.push_back(std::move(v));
    });
    sort_violations(report);
    return report;
}

} // namespace spectra
