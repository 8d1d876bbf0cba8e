// SPDX-License-Identifier: Apache-2.0
//
// spectra command-line front end: scenario generation, solver runs with CSV
// artifacts, method comparison batches, oracle searches, and the seeded
// verification suites.
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

#include "spectra/driver.hpp"
#include "spectra/presets.hpp"
#include "spectra/rng.hpp"
#include "spectra/units.hpp"
#include "spectra/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace spectra;

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct CsvWriter
{
    std::ofstream out;
    explicit CsvWriter(const std::filesystem::path& path) : out(path)
    {
        if (!out)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out << (i ? "," : "") << cells[i];
        out << "\n";
    }
};

struct SynthArg
{
    int n = 0;
    int k = 0;
    std::uint64_t seed = 0;
};

SynthArg parse_synth(const std::string& s)
{
    SynthArg a;
    char extra;
    if (std::sscanf(s.c_str(), "%d,%d,%" SCNu64 "%c", &a.n, &a.k, &a.seed, &extra) != 3)
        throw CLI::ValidationError("--synth", "expected N,K,SEED");
    return a;
}

struct ScenarioSource
{
    std::string scenario_path;
    std::string synth;
    double coupling_lo = 12.0, coupling_hi = 45.0;
    double noise_dbm = -140.0, mask_dbm = 20.4, budget_dbm = 20.4, boost_db = 6.0;
    std::string preset;

    void add_options(CLI::App* cmd, bool with_preset)
    {
        cmd->add_option("--scenario", scenario_path, "scenario JSON file");
        cmd->add_option("--synth", synth, "synthetic channel as N,K,SEED");
        cmd->add_option("--coupling-db", [this](const CLI::results_t& res) {
            return std::sscanf(res[0].c_str(), "%lf,%lf", &coupling_lo, &coupling_hi) == 2;
        }, "direct-to-cross coupling ratio range LO,HI in dB");
        cmd->add_option("--noise-dbm", noise_dbm, "noise floor (dBm)");
        cmd->add_option("--mask-dbm", mask_dbm, "spectral mask (dBm)");
        cmd->add_option("--budget-dbm", budget_dbm, "total power budget (dBm)");
        cmd->add_option("--boost-db", boost_db, "extra crosstalk at the top tone (dB)");
        if (with_preset)
            cmd->add_option("--preset", preset, "paper-defaults | escape");
    }

    SynthesisParams synth_params(std::uint64_t seed_override, bool have_override) const
    {
        const SynthArg a = parse_synth(synth);
        SynthesisParams p;
        p.num_users = a.n;
        p.num_tones = a.k;
        p.seed = have_override ? seed_override : a.seed;
        p.coupling_db_min = coupling_lo;
        p.coupling_db_max = coupling_hi;
        p.noise_floor_dbm = noise_dbm;
        p.mask_dbm = mask_dbm;
        p.budget_dbm = budget_dbm;
        p.high_tone_boost_db = boost_db;
        return p;
    }

    Channel load(std::uint64_t seed_override, bool have_override) const
    {
        if (preset == "escape")
            return escape_channel();
        const bool have_file = !scenario_path.empty();
        const bool have_synth = !synth.empty();
        if (have_file == have_synth)
            throw CLI::ValidationError("scenario",
                                       "exactly one of --scenario/--synth is required");
        if (have_file)
            return load_scenario(scenario_path);
        return generate_synthetic(synth_params(seed_override, have_override));
    }
};

SolveMode parse_mode(const std::string& mode)
{
    if (mode == "closed")
        return SolveMode::ClosedForm;
    if (mode == "fixedpoint")
        return SolveMode::FixedPoint;
    throw CLI::ValidationError("--mode", "expected closed or fixedpoint");
}

InitRule parse_init(const std::string& init)
{
    if (init == "zero")
        return InitRule::AllZero;
    if (init == "mask")
        return InitRule::Mask;
    throw CLI::ValidationError("--init", "expected zero or mask");
}

void parse_refs(const std::string& refs, ApproximationSpec& spec)
{
    if (refs.empty())
        return;
    int q, t, fb;
    if (std::sscanf(refs.c_str(), "%d,%d,%d", &q, &t, &fb) != 3)
        throw CLI::ValidationError("--refs", "expected q,t,fallback (0-based)");
    spec.ref_q = q;
    spec.ref_t = t;
    spec.ref_fallback = fb;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

void write_run_artifacts(const Channel& ch, const SolveReport& report,
                         const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        CsvWriter csv(dir / "spectra.csv");
        std::vector<std::string> head{"tone"};
        for (int n = 0; n < ch.users(); ++n)
            head.push_back("user" + std::to_string(n + 1) + "_dbm");
        csv.row(head);
        for (int k = 0; k < ch.tones(); ++k) {
            std::vector<std::string> cells{std::to_string(k)};
            for (int n = 0; n < ch.users(); ++n)
                cells.push_back(fmt(dbm_from_mw(report.powers.at(k, n))));
            csv.row(cells);
        }
    }
    {
        CsvWriter csv(dir / "rates.csv");
        csv.row({"user", "bits_total", "rate_bps"});
        for (int n = 0; n < ch.users(); ++n)
            csv.row({std::to_string(n + 1), fmt(report.user_rates[n].bits_total),
                     fmt(report.user_rates[n].rate_bps)});
    }
    {
        CsvWriter csv(dir / "trace.csv");
        csv.row({"sweep", "user", "inner", "objective", "lambda", "user_power_mw",
                 "accepted"});
        for (const auto& st : report.trace)
            csv.row({std::to_string(st.sweep), std::to_string(st.user),
                     std::to_string(st.inner), fmt(st.objective), fmt(st.lambda),
                     fmt(st.user_power), st.accepted ? "1" : "0"});
    }
    {
        nlohmann::json j;
        j["final_objective"] = report.final_objective;
        j["converged"] = report.converged;
        j["flags"] = report.flags;
        j["sweeps_run"] = report.sweeps_run;
        j["wall_seconds"] = report.wall_seconds;
        j["solves"] = {{"deg1", report.solves_deg1},
                       {"deg2", report.solves_deg2},
                       {"deg3", report.solves_deg3},
                       {"numeric", report.solves_numeric}};
        j["lambda_per_sweep"] = report.lambda_per_sweep;
        nlohmann::json rates_j = nlohmann::json::array();
        for (const auto& r : report.user_rates)
            rates_j.push_back({{"bits_total", r.bits_total}, {"rate_bps", r.rate_bps}});
        j["user_rates"] = std::move(rates_j);
        long long builds = 0, fps = 0;
        for (std::size_t i = 0; i < report.approx_builds.size(); ++i) {
            builds += report.approx_builds[i];
            fps += report.fp_iters[i];
        }
        j["total_approximations"] = builds;
        j["total_fixed_point_iters"] = fps;
        nlohmann::json stages = nlohmann::json::array();
        for (const auto& st : report.trace)
            stages.push_back({{"sweep", st.sweep},
                              {"user", st.user},
                              {"inner", st.inner},
                              {"objective", st.objective},
                              {"lambda", st.lambda},
                              {"user_power_mw", st.user_power},
                              {"accepted", st.accepted},
                              {"wall_ms", st.wall_ms}});
        j["trace"] = std::move(stages);
        std::ofstream out(dir / "report.json");
        out << j.dump(2) << "\n";
    }
}

int cmd_generate(const ScenarioSource& src, std::uint64_t seed, bool have_seed,
                 const std::string& out_file)
{
    Channel ch = src.preset == "escape"
                     ? escape_channel()
                     : generate_synthetic(src.synth_params(seed, have_seed));
    save_scenario(ch, out_file);
    std::cout << "wrote " << out_file << " (" << ch.users() << " users, " << ch.tones()
              << " tones)\n";
    return 0;
}

struct RunArgs
{
    ScenarioSource src;
    std::string method = "iasb1";
    std::string alloc;
    std::string mode = "closed";
    std::string init = "zero";
    std::string refs;
    int outer = 50;
    int inner = 10;
    int fixed_sweeps = 0;
    double tol = 1e-8;
    double inner_tol_db = 0.01;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool have_seed = false;
};

RunConfig make_config(const Channel& ch, const RunArgs& args)
{
    RunConfig cfg;
    ApproximationSpec base;
    const auto methods = split_list(args.method);
    if (methods.size() != 1)
        throw CLI::ValidationError("--method", "run expects exactly one method");
    base.kind = MethodKind::parse(methods[0]);
    parse_refs(args.refs, base);
    cfg.uniform_spec = base;
    if (!args.alloc.empty())
        cfg.assignment = allocate_hybrid(ch, args.alloc, base);
    cfg.mode = parse_mode(args.mode);
    cfg.init = parse_init(args.init);
    cfg.max_outer = args.fixed_sweeps > 0 ? args.fixed_sweeps : args.outer;
    cfg.fixed_outer = args.fixed_sweeps > 0;
    cfg.outer_tol_rel = args.tol;
    cfg.max_inner = args.inner;
    cfg.inner_tol_db = args.inner_tol_db;
    cfg.dual.mode = cfg.mode;
    return cfg;
}

int cmd_run(const RunArgs& args)
{
    const Channel ch = args.src.load(args.seed, args.have_seed);
    const RunConfig cfg = make_config(ch, args);
    const SolveReport report = run(ch, cfg);
    write_run_artifacts(ch, report, args.out_dir);
    std::cout << "objective " << fmt(report.final_objective) << " after "
              << report.sweeps_run << " sweeps; artifacts in " << args.out_dir << "\n";
    if (!report.converged)
        std::cerr << "warning: " << report.flags << "\n";
    return 0;
}

struct CompareArgs
{
    ScenarioSource src;
    std::string batch; // COUNT,N,K,SEED
    std::string methods = "cadsb,scale,iasb1,iasb5,iasb10";
    std::string mode = "both";
    std::string init = "zero";
    std::string refs;
    double grid_dbm = 0.1;
    std::string out_dir;
};

int cmd_compare(const CompareArgs& args)
{
    std::vector<Channel> channels;
    if (!args.batch.empty()) {
        int count, n, k;
        std::uint64_t seed;
        if (std::sscanf(args.batch.c_str(), "%d,%d,%d,%" SCNu64, &count, &n, &k, &seed) != 4)
            throw CLI::ValidationError("--batch", "expected COUNT,N,K,SEED");
        for (int i = 0; i < count; ++i) {
            SynthesisParams p;
            p.num_users = n;
            p.num_tones = k;
            p.coupling_db_min = args.src.coupling_lo;
            p.coupling_db_max = args.src.coupling_hi;
            p.noise_floor_dbm = args.src.noise_dbm;
            p.mask_dbm = args.src.mask_dbm;
            p.budget_dbm = args.src.budget_dbm;
            p.high_tone_boost_db = args.src.boost_db;
            p.seed = split_seed(seed, static_cast<std::uint64_t>(i));
            channels.push_back(generate_synthetic(p));
        }
    } else {
        channels.push_back(args.src.load(0, false));
    }

    const auto method_names = split_list(args.methods);
    std::vector<SolveMode> modes;
    if (args.mode == "both")
        modes = {SolveMode::ClosedForm, SolveMode::FixedPoint};
    else
        modes = {parse_mode(args.mode)};

    oracle::Grid grid;
    grid.granularity_db = args.grid_dbm;

    struct Key
    {
        std::string method;
        SolveMode mode;
        bool operator<(const Key& o) const
        {
            return method != o.method ? method < o.method : mode < o.mode;
        }
    };
    std::map<Key, std::vector<long long>> counts; // per-cell counts, pooled
    // Cross-run comparability: a cell enters the pooled means only when
    // every (method, mode) run converged to the oracle optimum there.
    for (const Channel& ch : channels) {
        std::map<Key, ConvergenceCount> per_run;
        for (const auto& name : method_names) {
            for (SolveMode mode : modes) {
                RunArgs ra;
                ra.method = name;
                ra.mode = mode == SolveMode::ClosedForm ? "closed" : "fixedpoint";
                ra.init = args.init;
                ra.refs = args.refs;
                RunConfig cfg = make_config(ch, ra);
                if (mode == SolveMode::FixedPoint)
                    cfg.dual.fixed_point.tol_db = std::min(0.01, args.grid_dbm / 10.0);
                per_run[{name, mode}] = count_convergence(ch, cfg, grid, args.grid_dbm);
            }
        }
        const std::size_t cells = static_cast<std::size_t>(ch.tones()) * ch.users();
        for (std::size_t cell = 0; cell < cells; ++cell) {
            bool valid = true;
            for (const auto& [key, cc] : per_run)
                valid = valid && cc.approx_needed[cell] >= 0;
            if (!valid)
                continue;
            for (const auto& [key, cc] : per_run)
                counts[key].push_back(key.mode == SolveMode::FixedPoint
                                          ? cc.fp_needed[cell]
                                          : cc.approx_needed[cell]);
        }
    }

    std::filesystem::create_directories(args.out_dir);
    {
        CsvWriter csv(std::filesystem::path(args.out_dir) / "counts_cdf.csv");
        csv.row({"method", "mode", "count", "fraction", "cum_fraction"});
        for (auto& [key, vec] : counts) {
            std::map<long long, long long> hist;
            for (long long c : vec)
                ++hist[c];
            double cum = 0.0;
            for (const auto& [count, freq] : hist) {
                const double frac = static_cast<double>(freq) / vec.size();
                cum += frac;
                csv.row({key.method,
                         key.mode == SolveMode::FixedPoint ? "fixedpoint" : "closed",
                         std::to_string(count), fmt(frac), fmt(cum)});
            }
        }
    }
    {
        CsvWriter csv(std::filesystem::path(args.out_dir) / "summary.csv");
        csv.row({"method", "mode", "mean_count", "cells"});
        for (auto& [key, vec] : counts) {
            double mean = 0.0;
            for (long long c : vec)
                mean += static_cast<double>(c);
            if (!vec.empty())
                mean /= static_cast<double>(vec.size());
            csv.row({key.method,
                     key.mode == SolveMode::FixedPoint ? "fixedpoint" : "closed",
                     fmt(mean), std::to_string(vec.size())});
        }
    }
    std::cout << "compared " << method_names.size() << " methods on " << channels.size()
              << " scenario(s); artifacts in " << args.out_dir << "\n";
    return 0;
}

int cmd_oracle(const ScenarioSource& src, int user, double grid_dbm,
               const std::string& init, const std::string& out_dir)
{
    const Channel ch = src.load(0, false);
    oracle::Grid grid;
    grid.granularity_db = grid_dbm;
    const PowerAllocation state = parse_init(init) == InitRule::Mask
                                      ? PowerAllocation::at_masks(ch)
                                      : PowerAllocation::zeros(ch);
    std::filesystem::create_directories(out_dir);
    CsvWriter csv(std::filesystem::path(out_dir) / "oracle.csv");
    csv.row({"tone", "user", "power_dbm"});
    for (int n = 0; n < ch.users(); ++n) {
        if (user >= 0 && n != user)
            continue;
        const auto powers = oracle::exhaustive_per_user(ch, state, n, ch.budget(n), grid);
        for (int k = 0; k < ch.tones(); ++k)
            csv.row({std::to_string(k), std::to_string(n + 1),
                     fmt(dbm_from_mw(powers[k]))});
    }
    std::cout << "oracle search done; artifacts in " << out_dir << "\n";
    return 0;
}

struct VerifyArgs
{
    int instances = 500;
    int users_min = 2;
    int users_max = 6;
    int tones = 4;
    std::uint64_t seed = 20260811ULL;
    double grid_dbm = 0.1;
    int exactness_cases = 300;
    bool corrupt_d = false;
    std::string out_dir = ".";
};

int cmd_verify(const VerifyArgs& args)
{
    VerifyOptions opts;
    opts.instances = args.instances;
    opts.users_min = args.users_min;
    opts.users_max = args.users_max;
    opts.tones = args.tones;
    opts.seed = args.seed;
    opts.corrupt_d = args.corrupt_d;

    const VerifyReport conditions = verify_conditions(opts);
    const VerifyReport order = verify_tightness(opts);

    // Closed-form vs grid-oracle exactness on the same instance stream.
    long long exact_checks = 0;
    std::vector<Violation> exact_violations;
    oracle::Grid grid;
    grid.granularity_db = args.grid_dbm;
    const auto kinds = all_method_kinds();
    Rng rng(split_seed(args.seed, 0xec7ULL));
    for (int i = 0; i < args.exactness_cases; ++i) {
        const VerifyInstance inst = make_verify_instance(opts, i);
        ApproximationSpec spec;
        spec.kind = kinds[static_cast<std::size_t>(i) % kinds.size()];
        const auto app =
            build_approximation(spec, inst.channel, inst.build, inst.tone, inst.user);
        const double lambda = rng.uniform() < 0.1
                                  ? 0.0
                                  : std::pow(10.0, rng.uniform(-5.0, 1.0));
        const auto closed = solve_closed_form(app, lambda);
        const auto pts = grid.points_mw(app.mask);
        const auto best =
            oracle::grid_min_subproblem([&](double x) { return app.value(x); }, lambda,
                                        pts);
        ++exact_checks;
        const double slack = 1e-9 * (1.0 + std::fabs(best.value));
        if (!(closed.value <= best.value + slack))
            exact_violations.push_back({"exactness", spec.kind.name(), i, inst.seed,
                                        inst.tone, inst.user, closed.s,
                                        closed.value - best.value});
    }

    std::filesystem::create_directories(args.out_dir);
    CsvWriter csv(std::filesystem::path(args.out_dir) / "verify.csv");
    csv.row({"suite", "detail", "instance", "seed", "tone", "user", "x_mw", "magnitude"});
    auto dump = [&](const std::vector<Violation>& violations) {
        for (const auto& v : violations)
            csv.row({v.suite, v.detail, std::to_string(v.instance),
                     std::to_string(v.seed), std::to_string(v.tone),
                     std::to_string(v.user), fmt(v.x), fmt(v.magnitude)});
    };
    dump(conditions.violations);
    dump(order.violations);
    dump(exact_violations);

    const long long total_violations =
        static_cast<long long>(conditions.violations.size() + order.violations.size() +
                               exact_violations.size());
    std::cout << "conditions: " << conditions.checks << " checks, "
              << conditions.violations.size() << " violations\n"
              << "tightness:  " << order.checks << " checks, "
              << order.violations.size() << " violations\n"
              << "exactness:  " << exact_checks << " checks, "
              << exact_violations.size() << " violations\n";
    return total_violations == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"spectra: iterative approximation methods for multi-user "
                 "multi-carrier spectrum optimization"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a scenario file");
    ScenarioSource gen_src;
    gen_src.add_options(gen, true);
    std::string gen_out;
    std::uint64_t gen_seed = 0;
    bool gen_have_seed = false;
    gen->add_option("--out", gen_out, "output scenario file")->required();
    gen->add_option("--seed", gen_seed, "override the synthesis seed")
        ->each([&](const std::string&) { gen_have_seed = true; });

    // run
    auto* run_cmd = app.add_subcommand("run", "solve one scenario and emit artifacts");
    RunArgs run_args;
    run_args.src.add_options(run_cmd, true);
    run_cmd->add_option("--method", run_args.method, "method name");
    run_cmd->add_option("--alloc", run_args.alloc, "allocation rule (selector:method,...)");
    run_cmd->add_option("--mode", run_args.mode, "closed | fixedpoint");
    run_cmd->add_option("--init", run_args.init, "zero | mask");
    run_cmd->add_option("--refs", run_args.refs, "reference lines q,t,fallback (0-based)");
    run_cmd->add_option("--outer", run_args.outer, "outer sweep cap");
    run_cmd->add_option("--inner", run_args.inner, "inner iteration cap");
    run_cmd->add_option("--fixed-sweeps", run_args.fixed_sweeps,
                        "run exactly this many sweeps (disables the stopping rule)");
    run_cmd->add_option("--tol", run_args.tol, "outer objective-change tolerance");
    run_cmd->add_option("--inner-tol-db", run_args.inner_tol_db,
                        "inner power-change stop (dBm)");
    run_cmd->add_option("--out", run_args.out_dir, "output directory")->required();
    run_cmd->add_option("--seed", run_args.seed, "override the synthesis seed")
        ->each([&](const std::string&) { run_args.have_seed = true; });

    // compare
    auto* cmp = app.add_subcommand("compare", "convergence-count comparison batch");
    CompareArgs cmp_args;
    cmp_args.src.add_options(cmp, false);
    cmp->add_option("--batch", cmp_args.batch, "synthetic batch COUNT,N,K,SEED");
    cmp->add_option("--method", cmp_args.methods, "comma-separated method list");
    cmp->add_option("--mode", cmp_args.mode, "closed | fixedpoint | both");
    cmp->add_option("--init", cmp_args.init, "zero | mask");
    cmp->add_option("--refs", cmp_args.refs, "reference lines q,t,fallback");
    cmp->add_option("--grid-dbm", cmp_args.grid_dbm, "oracle granularity (dBm)");
    cmp->add_option("--out", cmp_args.out_dir, "output directory")->required();

    // oracle
    auto* orc = app.add_subcommand("oracle", "per-user exhaustive search");
    ScenarioSource orc_src;
    orc_src.add_options(orc, true);
    int orc_user = -1;
    double orc_grid = 0.1;
    std::string orc_init = "zero";
    std::string orc_out;
    orc->add_option("--user", orc_user, "restrict to one user (0-based; default all)");
    orc->add_option("--grid-dbm", orc_grid, "grid granularity (dBm)");
    orc->add_option("--init", orc_init, "frozen state of the other users: zero | mask");
    orc->add_option("--out", orc_out, "output directory")->required();

    // verify
    auto* ver = app.add_subcommand("verify", "run the seeded invariant suites");
    VerifyArgs ver_args;
    ver->add_option("--instances", ver_args.instances, "batch size");
    ver->add_option("--users-min", ver_args.users_min, "minimum user count");
    ver->add_option("--users-max", ver_args.users_max, "maximum user count");
    ver->add_option("--tones", ver_args.tones, "tones per instance");
    ver->add_option("--seed", ver_args.seed, "batch seed");
    ver->add_option("--grid-dbm", ver_args.grid_dbm, "exactness oracle granularity");
    ver->add_option("--exactness-cases", ver_args.exactness_cases,
                    "closed-form vs grid oracle cases");
    ver->add_flag("--corrupt-d", ver_args.corrupt_d,
                  "negative control: perturb the linearization slope")
        ->group(""); // test hook, hidden from help
    ver->add_option("--out", ver_args.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_generate(gen_src, gen_seed, gen_have_seed, gen_out);
        if (run_cmd->parsed())
            return cmd_run(run_args);
        if (cmp->parsed())
            return cmd_compare(cmp_args);
        if (orc->parsed())
            return cmd_oracle(orc_src, orc_user, orc_grid, orc_init, orc_out);
        if (ver->parsed())
            return cmd_verify(ver_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
