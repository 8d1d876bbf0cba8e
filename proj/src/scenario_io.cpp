// SPDX-License-Identifier: Apache-2.0
//
// Scenario file format: a single self-describing JSON document.
//
// {
//   "version": 1,
//   "num_users": N, "num_tones": K,
//   "weights": [N], "budgets_dbm": [N],
//   "masks_dbm": scalar | [K][N],
//   "noise_dbm": scalar | [K][N],
//   "gains": [ {"k":, "n":, "m":, "value": }, ... ],   // omitted => 0
//   "symbol_rate_hz": 4000.0, "tone_spacing_hz": 4312.5
// }
//
// Indices are 0-based. All dB fields carry the _dbm suffix; everything else
// is linear. Round-trips preserve the mW fields bit-for-bit (dB values are
// serialized with full precision).

#include "spectra/channel.hpp"
#include "spectra/units.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace spectra {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw std::runtime_error(path + ": " + what);
}

double require_number(const json& j, const char* field, const std::string& path)
{
    if (!j.contains(field) || !j[field].is_number())
        fail(path, std::string("missing or non-numeric field '") + field + "'");
    return j[field].get<double>();
}

} // namespace

Channel load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(path, "cannot open file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(path, std::string("JSON parse error: ") + e.what());
    }

    const int version = static_cast<int>(require_number(j, "version", path));
    if (version != 1)
        fail(path, "unsupported version " + std::to_string(version));
    const int N = static_cast<int>(require_number(j, "num_users", path));
    const int K = static_cast<int>(require_number(j, "num_tones", path));
    if (N < 1 || K < 1)
        fail(path, "num_users and num_tones must be >= 1");

    Channel ch(N, K);

    auto load_vec = [&](const char* field, auto&& setter) {
        if (!j.contains(field) || !j[field].is_array() ||
            j[field].size() != static_cast<std::size_t>(N))
            fail(path, std::string("field '") + field + "' must be an array of length " +
                           std::to_string(N));
        for (int n = 0; n < N; ++n) {
            if (!j[field][n].is_number())
                fail(path, std::string("field '") + field + "' entry " + std::to_string(n) +
                               " is not a number");
            setter(n, j[field][n].get<double>());
        }
    };
    load_vec("weights", [&](int n, double v) { ch.set_weight(n, v); });
    load_vec("budgets_dbm", [&](int n, double v) { ch.set_budget(n, mw_from_dbm(v)); });

    auto load_grid = [&](const char* field, auto&& setter) {
        if (!j.contains(field))
            fail(path, std::string("missing field '") + field + "'");
        const json& g = j[field];
        if (g.is_number()) {
            const double mw = mw_from_dbm(g.get<double>());
            for (int k = 0; k < K; ++k)
                for (int n = 0; n < N; ++n)
                    setter(k, n, mw);
            return;
        }
        if (!g.is_array() || g.size() != static_cast<std::size_t>(K))
            fail(path, std::string("field '") + field +
                           "' must be a scalar or a [num_tones][num_users] array");
        for (int k = 0; k < K; ++k) {
            if (!g[k].is_array() || g[k].size() != static_cast<std::size_t>(N))
                fail(path, std::string("field '") + field + "' row " + std::to_string(k) +
                               " must have num_users entries");
            for (int n = 0; n < N; ++n)
                setter(k, n, mw_from_dbm(g[k][n].get<double>()));
        }
    };
    load_grid("masks_dbm", [&](int k, int n, double mw) { ch.set_mask(k, n, mw); });
    load_grid("noise_dbm", [&](int k, int n, double mw) { ch.set_noise(k, n, mw); });

    if (j.contains("gains")) {
        if (!j["gains"].is_array())
            fail(path, "field 'gains' must be an array of {k, n, m, value}");
        std::size_t idx = 0;
        for (const auto& e : j["gains"]) {
            const std::string ctx = "gains entry " + std::to_string(idx++);
            if (!e.is_object() || !e.contains("k") || !e.contains("n") ||
                !e.contains("m") || !e.contains("value"))
                fail(path, ctx + " must have fields k, n, m, value");
            const int k = e["k"].get<int>();
            const int n = e["n"].get<int>();
            const int m = e["m"].get<int>();
            if (k < 0 || k >= K || n < 0 || n >= N || m < 0 || m >= N)
                fail(path, ctx + ": index out of range");
            if (n == m)
                fail(path, ctx + ": direct gains (n == m) are not stored");
            ch.set_gain(k, n, m, e["value"].get<double>());
        }
    }

    if (j.contains("symbol_rate_hz"))
        ch.set_symbol_rate_hz(j["symbol_rate_hz"].get<double>());
    if (j.contains("tone_spacing_hz"))
        ch.set_tone_spacing_hz(j["tone_spacing_hz"].get<double>());

    ch.validate();
    return ch;
}

void save_scenario(const Channel& ch, const std::string& path)
{
    ch.validate();
    json j;
    j["version"] = 1;
    j["num_users"] = ch.users();
    j["num_tones"] = ch.tones();
    j["weights"] = json::array();
    j["budgets_dbm"] = json::array();
    for (int n = 0; n < ch.users(); ++n) {
        j["weights"].push_back(ch.weight(n));
        j["budgets_dbm"].push_back(dbm_exact_for_mw(ch.budget(n)));
    }
    json masks = json::array();
    json noise = json::array();
    for (int k = 0; k < ch.tones(); ++k) {
        json mrow = json::array();
        json zrow = json::array();
        for (int n = 0; n < ch.users(); ++n) {
            mrow.push_back(dbm_exact_for_mw(ch.mask(k, n)));
            zrow.push_back(dbm_exact_for_mw(ch.noise(k, n)));
        }
        masks.push_back(std::move(mrow));
        noise.push_back(std::move(zrow));
    }
    j["masks_dbm"] = std::move(masks);
    j["noise_dbm"] = std::move(noise);

    json gains = json::array();
    for (int k = 0; k < ch.tones(); ++k)
        for (int n = 0; n < ch.users(); ++n)
            for (int m = 0; m < ch.users(); ++m) {
                if (m == n || ch.gain(k, n, m) == 0.0)
                    continue;
                gains.push_back({{"k", k}, {"n", n}, {"m", m}, {"value", ch.gain(k, n, m)}});
            }
    j["gains"] = std::move(gains);
    j["symbol_rate_hz"] = ch.symbol_rate_hz();
    j["tone_spacing_hz"] = ch.tone_spacing_hz();

    std::ofstream out(path);
    if (!out)
        throw std::runtime_error(path + ": cannot open for writing");
    out << j.dump(2) << "\n";
    if (!out)
        throw std::runtime_error(path + ": write failed");
}

} // namespace spectra
