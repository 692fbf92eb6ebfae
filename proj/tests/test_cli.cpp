#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hypstrip/cli.hpp"

using namespace hypstrip;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hypstrip");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("hypstrip_cli_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& s) const { return (path / s).string(); }
};

// Exports a built-in case and returns the path of its problem file.
std::string export_case(const TempDir& dir, const std::string& name, const std::string& sub) {
    REQUIRE(cli({"cases", "export", name, "--out", dir / sub}).code == 0);
    return dir / (sub + "/problem.txt");
}

}  // namespace

TEST_CASE("cases list and export") {
    const Run r = cli({"cases", "list"});
    CHECK(r.code == 0);
    for (const char* n : {"counterexample-l1", "transport", "manufactured", "left-coupled"})
        CHECK(r.out.find(n) != std::string::npos);

    TempDir dir;
    const Run e = cli({"cases", "export", "damped", "--out", dir / "damped"});
    CHECK(e.code == 0);
    CHECK(fs::exists(dir / "damped/problem.txt"));
    CHECK(fs::exists(dir / "damped/u_1.csv"));
    CHECK(slurp(dir / "damped/problem.txt").find("# damped: ") == 0);
    const Run u = cli({"cases", "export", "nope", "--out", dir / "x"});
    CHECK(u.code == 1);
    CHECK(u.err.find("unknown case") != std::string::npos);
    CHECK(cli({"cases", "export", "reflection-unstable", "--out", dir / "unstable"}).code == 0);
    CHECK_FALSE(fs::exists(dir / "unstable/u_1.csv"));
}

TEST_CASE("export, solve and verify round trip") {
    TempDir dir;
    const std::string problem = export_case(dir, "transport-pair", "tp");
    CHECK(cli({"verify", problem, dir / "tp"}).code == 0);

    const Run s = cli({"solve", problem, "--out", dir / "sol", "--gnuplot"});
    CHECK(s.code == 0);
    CHECK(s.out.find("converged: true") != std::string::npos);
    CHECK(fs::exists(dir / "sol/u_1.csv"));
    CHECK(fs::exists(dir / "sol/u_2.csv"));
    CHECK(fs::exists(dir / "sol/plot.gp"));
    CHECK(slurp(dir / "sol/report.txt") == s.out);
    const Run v = cli({"verify", problem, "--solution", dir / "sol"});
    CHECK(v.code == 0);
    CHECK(v.out.find("result: pass") != std::string::npos);

    // Corrupt one value in a row inside the window.
    std::string table = slurp(dir / "sol/u_1.csv");
    std::size_t at = 0;
    for (int line = 0; line < 64; ++line) at = table.find('\n', at) + 1;
    table.replace(at, table.find(',', at) - at, "5");
    std::ofstream(dir / "sol/u_1.csv") << table;
    const Run bad = cli({"verify", problem, dir / "sol"});
    CHECK(bad.code == 4);
    CHECK(bad.out.find("result: fail") != std::string::npos);
    CHECK(cli({"verify", problem, dir / "missing"}).code == 1);
}

TEST_CASE("solver modes") {
    TempDir dir;
    const std::string problem = export_case(dir, "reflection-half", "rh");
    for (const char* mode : {"picard", "two-phase", "march"}) {
        INFO(mode);
        const Run r = cli({"solve", problem, "--out", dir / mode, "--mode", mode});
        CHECK(r.code == 0);
        CHECK(r.out.find(std::string("mode: ") + mode) != std::string::npos);
    }
    CHECK(cli({"solve", problem, "--mode", "newton"}).code == 1);
    CHECK(cli({"solve", problem, "--out", dir / "few", "--max-iters", "3"}).code == 2);
}

TEST_CASE("hypothesis gate and divergence") {
    TempDir dir;
    const std::string ce = export_case(dir, "counterexample-l1", "ce");
    const Run gated = cli({"solve", ce, "--out", dir / "ce_out"});
    CHECK(gated.code == 3);
    CHECK(gated.err.find("--skip-checks") != std::string::npos);
    CHECK(fs::exists(dir / "ce_out/report.txt"));
    CHECK(cli({"diagnose", ce}).code == 3);

    const std::string unstable = export_case(dir, "reflection-unstable", "ru");
    CHECK(cli({"solve", unstable, "--out", dir / "ru_out"}).code == 3);
    const Run div = cli({"solve", unstable, "--out", dir / "ru_out", "--skip-checks"});
    CHECK(div.code == 2);
    CHECK(div.err.find("error:") != std::string::npos);

    const Run d = cli({"diagnose", export_case(dir, "damped", "dm"), "--ell", "3"});
    CHECK(d.code == 0);
    CHECK(d.out.find("dissipativity") != std::string::npos);
}

TEST_CASE("input errors") {
    TempDir dir;
    std::ofstream(dir / "bad.txt") << "[system]\nn = 1\nm = 1\n[speeds]\na_1 = 1 +\n";
    const Run r = cli({"solve", dir / "bad.txt", "--out", dir / "o"});
    CHECK(r.code == 1);
    CHECK(r.err.find("line 5 [speeds]") != std::string::npos);
    CHECK(cli({"solve", dir / "absent.txt"}).code == 1);
    CHECK(cli({}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"solve"}).code == 1);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("output does not depend on the thread count") {
    TempDir dir;
    const std::string problem = export_case(dir, "manufactured", "mf");
    std::string reference;
    for (const char* threads : {"1", "2", "4"}) {
        const Run r = cli({"solve", problem, "--out", dir / threads, "--threads", threads});
        REQUIRE(r.code == 0);
        const std::string tables = slurp(dir / (std::string(threads) + "/u_1.csv")) +
                                   slurp(dir / (std::string(threads) + "/u_2.csv"));
        if (reference.empty()) reference = tables;
        CHECK(tables == reference);
    }
}

TEST_CASE("the installed binary reports exit codes") {
    TempDir dir;
    const std::string exe = HYPSTRIP_CLI;
    CHECK(std::system((exe + " cases list > " + (dir / "list.txt")).c_str()) == 0);
    CHECK(slurp(dir / "list.txt").find("left-coupled") != std::string::npos);
    const int code = std::system((exe + " cases export nope --out " + (dir / "x") + " 2> " + (dir / "e.txt")).c_str());
    CHECK(WEXITSTATUS(code) == 1);
}
