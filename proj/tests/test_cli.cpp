// SPDX-License-Identifier: Apache-2.0
//
// End-to-end command-line checks against the built binary.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

struct TempDir
{
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() /
               ("spectra_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int counter;
};
int TempDir::counter = 0;

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(SPECTRA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("cli: generate then run a single-user scenario emits the artifacts")
{
    TempDir dir;
    const auto scen = dir.path / "solo.json";
    REQUIRE(run_cli("generate --synth 1,6,7 --noise-dbm -30 --mask-dbm 10 "
                    "--budget-dbm 13 --out " +
                    scen.string()) == 0);
    const auto out = dir.path / "run";
    REQUIRE(run_cli("run --scenario " + scen.string() + " --method iasb1 --out " +
                    out.string()) == 0);
    CHECK(fs::exists(out / "spectra.csv"));
    CHECK(fs::exists(out / "rates.csv"));
    CHECK(fs::exists(out / "trace.csv"));
    CHECK(fs::exists(out / "report.json"));
    // rates.csv contains one positive rate row
    const std::string rates = slurp(out / "rates.csv");
    CHECK(rates.find("user,bits_total,rate_bps") == 0);
    std::istringstream lines(rates);
    std::string header, row;
    std::getline(lines, header);
    REQUIRE(static_cast<bool>(std::getline(lines, row)));
    const auto last_comma = row.rfind(',');
    CHECK(std::stod(row.substr(last_comma + 1)) > 0.0);
}

TEST_CASE("cli: identical invocations produce byte-identical CSVs")
{
    TempDir dir;
    const auto a = dir.path / "a";
    const auto b = dir.path / "b";
    const std::string common = "run --synth 3,8,11 --method iasb5 --out ";
    REQUIRE(run_cli(common + a.string()) == 0);
    REQUIRE(run_cli(common + b.string()) == 0);
    for (const char* f : {"spectra.csv", "rates.csv", "trace.csv"})
        CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("cli: escape preset favors iasb3 over iasb1 in weighted rate")
{
    TempDir dir;
    const auto r1 = dir.path / "r1";
    const auto r3 = dir.path / "r3";
    REQUIRE(run_cli("run --preset escape --init mask --method iasb1 --out " +
                    r1.string()) == 0);
    REQUIRE(run_cli("run --preset escape --init mask --method iasb3 --out " +
                    r3.string()) == 0);
    // weights of the escape preset
    const double w[2] = {0.4, 1.2};
    auto weighted_rate = [&](const fs::path& p) {
        std::istringstream lines(slurp(p / "rates.csv"));
        std::string row;
        std::getline(lines, row); // header
        double total = 0.0;
        int user = 0;
        while (std::getline(lines, row)) {
            const auto last = row.rfind(',');
            total += w[user++] * std::stod(row.substr(last + 1));
        }
        return total;
    };
    CHECK(weighted_rate(r3) > weighted_rate(r1) * (1.0 + 1e-6));
}

TEST_CASE("cli: compare on a decoupled batch counts one approximation everywhere")
{
    TempDir dir;
    // couplings 60..80 dB below direct are effectively decoupled
    REQUIRE(run_cli("compare --batch 2,2,4,5 --coupling-db 60,80 --noise-dbm -30 "
                    "--mask-dbm 10 --budget-dbm 16 --method iasb1,iasb6 "
                    "--mode closed --out " +
                    (dir.path / "cmp").string()) == 0);
    const std::string summary = slurp(dir.path / "cmp" / "summary.csv");
    std::istringstream lines(summary);
    std::string row;
    std::getline(lines, row);
    int rows = 0;
    while (std::getline(lines, row)) {
        ++rows;
        // method,mode,mean_count,cells
        const auto first = row.find(',');
        const auto second = row.find(',', first + 1);
        const auto third = row.find(',', second + 1);
        const double mean = std::stod(row.substr(second + 1, third - second - 1));
        CHECK(mean == doctest::Approx(1.0));
    }
    CHECK(rows == 2);
    CHECK(fs::exists(dir.path / "cmp" / "counts_cdf.csv"));
}

TEST_CASE("cli: oracle subcommand writes the per-user search")
{
    TempDir dir;
    REQUIRE(run_cli("oracle --synth 2,4,3 --noise-dbm -30 --mask-dbm 10 "
                    "--budget-dbm 12 --grid-dbm 0.5 --out " +
                    (dir.path / "orc").string()) == 0);
    const std::string csv = slurp(dir.path / "orc" / "oracle.csv");
    CHECK(csv.find("tone,user,power_dbm") == 0);
}

TEST_CASE("cli: verify passes on a small batch and fails the negative control")
{
    TempDir dir;
    CHECK(run_cli("verify --instances 20 --exactness-cases 30 --out " +
                  (dir.path / "v1").string()) == 0);
    CHECK(run_cli("verify --instances 5 --exactness-cases 5 --corrupt-d --out " +
                  (dir.path / "v2").string()) != 0);
    const std::string csv = slurp(dir.path / "v2" / "verify.csv");
    CHECK(csv.find("cond15") != std::string::npos);
}

TEST_CASE("cli: verify still passes at finer oracle granularity")
{
    TempDir dir;
    CHECK(run_cli("verify --instances 10 --exactness-cases 40 --grid-dbm 0.01 --out " +
                  (dir.path / "v").string()) == 0);
}

TEST_CASE("cli: errors exit nonzero with a message")
{
    TempDir dir;
    CHECK(run_cli("run --scenario /nonexistent.json --method iasb1 --out " +
                  (dir.path / "x").string()) != 0);
    CHECK(run_cli("run --synth 2,4,1 --method nosuch --out " +
                  (dir.path / "y").string()) != 0);
    CHECK(run_cli("run --synth 2,4,1 --scenario also.json --method iasb1 --out " +
                  (dir.path / "z").string()) != 0);
}
