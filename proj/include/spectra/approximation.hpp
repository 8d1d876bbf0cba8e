// SPDX-License-Identifier: Apache-2.0
//
// spectra: per-user per-tone univariate approximation builders.
//
// Every method decomposes the restricted objective f(x) into f1 + f2 where
// f1 has a rational derivative (solvable stationarity polynomial) and f2 is
// upper-bounded by its tangent at the build point. The emitted surrogate is
// f_app(x) = f1(x) + d*x + e with d = f2'(x~), e = f2(x~) - d*x~, which is
// tight to first order at the build point and an upper bound on f.
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

#include "spectra/objective.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace spectra {

enum class Method
{
    CADSB,
    SCALE,
    IASB1,
    IASB2,
    IASB3,
    IASB4,
    IASB5,
    IASB6,
    IASB7,
    IASB8,
    IASB9,
    IASB10,
    Generalized,
};

/// Method identity plus its generalized term descriptor. The named methods
/// are presets over four term types: 'b' (weight split on the own log, no
/// degree cost), 'l' (concave quadratic, +1 degree), 'r' (one exact
/// reference log, +2 degree), 'a' (one tangent-bound reference log,
/// +1 degree each). The degree budget starts at 1.
struct MethodKind
{
    Method tag = Method::IASB1;
    bool use_beta = false;
    bool use_quad = false;
    bool use_ref_log = false;
    int alpha_refs = 0;     // ignored when alpha_all
    bool alpha_all = false; // alpha term on every other user
    bool convex_quad = false; // IASB2 convex tuning branch

    int declared_degree(int num_users) const;
    bool is_convex_kind() const; // IASB1, convex IASB2, IASB6
    std::string name() const;

    /// Accepts cadsb, scale, iasb1..iasb10, iasb2-convex, and generalized
    /// "ia<d>-<terms>" strings (e.g. ia3-bal, ia2-a, ian-a). Throws
    /// std::invalid_argument for unknown names or inconsistent budgets.
    static MethodKind parse(const std::string& name);

    static MethodKind preset(Method tag);

    bool operator==(const MethodKind&) const = default;
};

/// Which approximation to build for one (tone, user), including reference
/// line configuration. When a configured reference equals the active user
/// it is replaced by the fallback, then by ascending unused user indices.
struct ApproximationSpec
{
    MethodKind kind;
    int ref_q = 0;
    int ref_t = 1;
    int ref_fallback = 2;
    std::optional<double> theta_override; // replaces beta (or L for pure-L kinds)

    bool operator==(const ApproximationSpec&) const = default;
};

/// Resolved reference users for user n (excluding n, deduplicated).
/// Throws std::invalid_argument when `count` refs cannot be provided
/// (single-user channels); degenerates gracefully when 1 <= N-1 < count.
std::vector<int> resolve_references(const ApproximationSpec& spec, int n, int num_users,
                                    int count);

/// alpha_k^m at the build point: s~(m) / rec(m), in [0, 1).
double alpha_param(const Channel& ch, const PowerAllocation& s_build, int k, int m);

/// CA-DSB linear taxation coefficient: sum over m != n of w_m a(m,n)/int_m.
double cadsb_b_param(const Channel& ch, const PowerAllocation& s_build, int k, int n);

/// Constant making the alpha bound tight at the build point:
///   c = -w log(1 + z~) + w alpha log(z~),  z~ = s~/int~.
/// Defined as 0 when s~(m) = 0 (alpha = 0 annihilates the log).
double scale_c_param(const Channel& ch, const PowerAllocation& s_build, int k, int m);

struct ThetaRecord
{
    bool has_beta = false;
    bool has_quad = false;
    double beta = 0.0;
    double quad = 0.0;
};

/// Closed-form tuning parameters (L and/or beta) for the given kind, with
/// the hat-point substitutions (own power at the mask for curvature sums,
/// at zero for the own received-signal factor).
ThetaRecord tuning_param(const MethodKind& kind, const Channel& ch,
                         const PowerAllocation& s_build, int k, int n,
                         const ApproximationSpec& spec);

struct ParamRecord
{
    double b = 0.0;
    double beta = 0.0;
    double quad_L = 0.0;
    std::vector<int> alpha_users;
    std::vector<double> alphas;
    std::vector<double> cs;
    double own_alpha = 0.0; // SCALE only
    double own_c = 0.0;     // SCALE only
    bool high_snr_bootstrap = false; // SCALE built at zero own power
};

/// Stationarity polynomial coefficients, ascending order. Leading entries
/// may be zero; the root solver degenerates gracefully.
struct PolynomialEq
{
    std::vector<double> coeffs;
    int size_degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

class UnivariateApproximation
{
public:
    enum class OwnStyle { Ratio, Rec, Power };

    struct Term
    {
        enum class Style { RefLog, RecLog, AlphaLog };
        Style style;
        double w;     // interferer weight
        double g;     // cross gain a(m, n)
        double s;     // frozen power of the interferer
        double base;  // int_m(x) - g*x
        double coeff; // AlphaLog: w * alpha
        double cnst;  // additive constant carried in f1
    };

    MethodKind kind;
    int tone = 0;
    int user = 0;
    double build_point = 0.0;
    double mask = 0.0;
    double own_weight = 0.0;
    double own_int = 0.0;
    OwnStyle own_style = OwnStyle::Ratio;
    double own_coeff = 0.0; // multiplier of the own log
    double own_const = 0.0;
    std::vector<Term> terms;
    double quad_L = 0.0;
    double lin_d = 0.0;
    double lin_e = 0.0;
    ParamRecord params;
    int declared_degree = 1;
    bool closed_form = true;

    double f1_value(double x) const;
    double f1_derivative(double x) const;
    double value(double x) const { return f1_value(x) + lin_d * x + lin_e; }
    double derivative(double x) const { return f1_derivative(x) + lin_d; }

    /// Structural degree of the stationarity polynomial (pole count plus
    /// one when the quadratic term is active). Never exceeds the declared
    /// Table budget.
    int emitted_degree() const;

    PolynomialEq stationarity(double lambda) const;

    /// f1' as (p1 x^3 + p2 x^2 + p3 x + p4) / (p5 x^3 + p6 x^2 + p7 x + p8).
    /// Only defined while the emitted degree is at most 3.
    std::array<double, 8> rational_p() const;

    /// One fixed-point update: isolate the own-term pole in the stationarity
    /// condition and substitute the current iterate everywhere else.
    double fixed_point_step(double lambda, double x, bool* diverged = nullptr) const;

private:
    struct Pole
    {
        double coef; // coef / (a*x + c)
        double a;
        double c;
    };
    std::vector<Pole> poles_; // own pole first when present
    bool own_pole_present_ = false;
    friend UnivariateApproximation build_approximation(const ApproximationSpec&,
                                                       const Channel&,
                                                       const PowerAllocation&, int, int);
};

/// Builds the surrogate for user n on tone k around the allocation
/// s_build (whose row on tone k is the approximation point).
UnivariateApproximation build_approximation(const ApproximationSpec& spec,
                                            const Channel& ch,
                                            const PowerAllocation& s_build, int k,
                                            int n);

/// Deterministic grid used for upper-bound and curvature checks:
/// 256 uniform interior points plus both endpoints plus the build point.
std::vector<double> bound_grid(double mask, double build_point);

} // namespace spectra
