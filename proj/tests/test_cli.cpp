#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <sstream>

#include "radpl/cli.hpp"

using namespace radpl;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("solve validates parameters with exit code 1") {
    SolveOptions opt;
    opt.p = 2.5;
    std::ostringstream log;
    CHECK(cmd_solve(opt, log) == exit_usage);
    CHECK(log.str().find("1 < p < 2") != std::string::npos);

    SolveOptions bad_method;
    bad_method.method = "simplex";
    CHECK(cmd_solve(bad_method, log) == exit_usage);
}

TEST_CASE("solve by shooting below the fold records the constant") {
    TempFile out("cli_solve_shoot.json");
    SolveOptions opt;
    opt.q = 3.0;
    opt.method = "shoot";
    opt.grid_n = 128;
    opt.out = out.path;
    std::ostringstream log;
    REQUIRE(cmd_solve(opt, log) == exit_ok);

    const json j = json::parse(read_text_file(out.path));
    CHECK(j.at("schema") == 1);
    CHECK(j.at("provenance") == "shooting");
    for (double v : j.at("values").get<std::vector<double>>())
        CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("solve on the Nehari set writes an accepted variational record") {
    TempFile out("cli_solve_nehari.json");
    SolveOptions opt;
    opt.q = 40.0;
    opt.grid_n = 128;
    opt.out = out.path;
    std::ostringstream log;
    REQUIRE(cmd_solve(opt, log) == exit_ok);
    const json j = json::parse(read_text_file(out.path));
    CHECK(j.at("provenance") == "variational");
    CHECK(j.at("u0").get<double>() < 1.0);
    CHECK(j.at("u0").get<double>() > 0.5);
    CHECK(j.at("grid").at("M") == 128);
}

TEST_CASE("solve by the mountain pass reports non-convergence honestly") {
    // the saddle cannot be separated from the constant at these parameters,
    // so the contract is exit code 2 with the estimate in the log
    SolveOptions opt;
    opt.q = 40.0;
    opt.method = "mp";
    opt.grid_n = 128;
    std::ostringstream log;
    const int rc = cmd_solve(opt, log);
    CHECK(rc == exit_no_convergence);
    CHECK(log.str().find("d_q") != std::string::npos);
}

TEST_CASE("branch sweep writes CSV and SVG, constant-only below the fold") {
    TempFile csv("cli_branch.csv");
    TempFile svg("cli_branch.svg");
    BranchOptions opt;
    opt.q_min = 3.0;
    opt.q_max = 6.0;
    opt.q_steps = 3;
    opt.grid_n = 128;
    opt.out_csv = csv.path;
    opt.out_svg = svg.path;
    std::ostringstream log;
    REQUIRE(cmd_branch(opt, log) == exit_ok);

    const std::string text = read_text_file(csv.path);
    CHECK(text.rfind("q,d,u_end,energy,label\n", 0) == 0);
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.find("constant") != std::string::npos);
    }
    CHECK(rows == 4);
    CHECK(read_text_file(svg.path).rfind("<svg", 0) == 0);

    // determinism: a rerun produces byte-identical output
    TempFile csv2("cli_branch2.csv");
    BranchOptions again = opt;
    again.out_csv = csv2.path;
    again.out_svg.clear();
    REQUIRE(cmd_branch(again, log) == exit_ok);
    CHECK(read_text_file(csv2.path) == text);
}

TEST_CASE("branch flag validation") {
    BranchOptions opt;
    opt.q_min = 1.0;  // must exceed 2
    std::ostringstream log;
    CHECK(cmd_branch(opt, log) == exit_usage);
}

TEST_CASE("verify below the fold exits zero and writes the report") {
    TempFile out("cli_verify.json");
    VerifyOptions opt;
    opt.config.M = 256;
    opt.config.q_list = {3.0};
    opt.out = out.path;
    std::ostringstream log;
    CHECK(cmd_verify(opt, log) == exit_ok);
    const json j = json::parse(read_text_file(out.path));
    CHECK(j.at("all_passed") == true);
}

TEST_CASE("verify above the fold reports the documented failures with exit 2") {
    TempFile out("cli_verify40.json");
    VerifyOptions opt;
    opt.config.M = 256;
    opt.config.q_list = {40.0};
    opt.config.local_min_samples = 40;
    opt.out = out.path;
    std::ostringstream log;
    CHECK(cmd_verify(opt, log) == exit_no_convergence);
    const json j = json::parse(read_text_file(out.path));
    CHECK(j.at("all_passed") == false);
}
