// End-to-end tests of the command-line surface: exit codes, generate/check
// round trips, iterative deepening, bench matrix runs with expectations and
// resume, and trace dump re-validation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace {

const std::string kBin = QBMC_BIN_PATH;
const std::string kDir = "/tmp/qbmc-cli-tests";

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cmd(const std::string& args) {
    std::string cmd = kBin + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void ensure_setup() {
    static const bool done = [] {
        if (std::system(("mkdir -p " + kDir).c_str()) != 0) return false;
        run_cmd("generate fischer -n 2 --delta1 75 --delta2 70 -o " + kDir + "/fu2.model");
        run_cmd("generate fischer -n 2 --delta1 5 --delta2 70 -o " + kDir + "/fs2.model");
        run_cmd("generate example -o " + kDir + "/ex.model");
        return true;
    }();
    (void)done;
}

} // namespace

TEST_CASE("check exit codes follow the contract") {
    ensure_setup();
    CHECK(run_cmd("check " + kDir + "/fs2.model --kmax 4 --encoding qf").exit_code == 0);
    CHECK(run_cmd("check " + kDir + "/fu2.model --kmax 8 --encoding qf").exit_code == 1);
    CHECK(run_cmd("check " + kDir + "/missing.model --kmax 4").exit_code == 3);
    CHECK(run_cmd("check " + kDir + "/fs2.model --kmax 16 --timeout 0.05").exit_code == 2);
    CHECK(run_cmd("frobnicate").exit_code == 3);
}

TEST_CASE("generated models re-parse through the cli and validate") {
    ensure_setup();
    auto v = run_cmd("validate " + kDir + "/fu2.model");
    CHECK(v.exit_code == 0);
    CHECK(v.output.find("valid") != std::string::npos);
    CHECK(v.output.find("rectangular=yes") != std::string::npos);
}

TEST_CASE("iterative deepening stops at the first sat bound") {
    ensure_setup();
    auto r = run_cmd("check " + kDir + "/fu2.model --kmax 12 --deepen --encoding qf");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("SAT k=8") != std::string::npos);  // minimal witness depth
}

TEST_CASE("emitted files feed back into the bundled solver") {
    ensure_setup();
    auto e = run_cmd("emit " + kDir + "/fs2.model --encoding quantified --kmax 4 -o " + kDir +
                     "/fs2.smt2");
    REQUIRE(e.exit_code == 0);
    auto s = run_cmd("solve " + kDir + "/fs2.smt2");
    CHECK(s.exit_code == 0);
    CHECK(s.output.find("unsat") != std::string::npos);
}

TEST_CASE("trace dumps re-validate through the validate subcommand") {
    ensure_setup();
    auto c = run_cmd("check " + kDir + "/fu2.model --kmax 8 --encoding qf --trace-out " + kDir +
                     "/fu2.trace.json");
    REQUIRE(c.exit_code == 1);
    auto v = run_cmd("validate " + kDir + "/fu2.model --trace " + kDir + "/fu2.trace.json");
    CHECK(v.exit_code == 0);
    CHECK(v.output.find("trace valid") != std::string::npos);
}

TEST_CASE("bench runs a matrix with expectations and resumes") {
    ensure_setup();
    const std::string matrix = kDir + "/small.matrix";
    const std::string report = kDir + "/small.report";
    std::remove(report.c_str());
    {
        std::ofstream m(matrix);
        m << "# id model encoding k expected\n";
        m << "fu2-qf " << kDir << "/fu2.model qf 8 SAT\n";
        m << "fu2-q " << kDir << "/fu2.model quantified 8 SAT\n";
        m << "fs2-qf " << kDir << "/fs2.model qf 8 UNSAT\n";
        m << "ex-qf " << kDir << "/ex.model qf 8 UNSAT\n";
    }
    auto first = run_cmd("bench " + matrix + " --report " + report + " --jobs 2");
    CHECK(first.exit_code == 0);
    CHECK(first.output.find("FAIL") == std::string::npos);
    std::string report_before = slurp(report);
    CHECK(report_before.find("fu2-qf") != std::string::npos);

    auto second = run_cmd("bench " + matrix + " --report " + report);
    CHECK(second.exit_code == 0);
    // all four rows come from the report, none re-run
    CHECK(std::count(second.output.begin(), second.output.end(), '\n') >= 4);
    std::size_t cached = 0, pos = 0;
    while ((pos = second.output.find("(cached)", pos)) != std::string::npos) {
        ++cached;
        ++pos;
    }
    CHECK(cached == 4);

    SUBCASE("a wrong expectation is reported and fails the run") {
        std::ofstream m(matrix, std::ios::app);
        m << "fu2-wrong " << kDir << "/fu2.model qf 8 UNSAT\n";
        m.close();
        auto third = run_cmd("bench " + matrix + " --report " + report);
        CHECK(third.exit_code == 1);
        CHECK(third.output.find("FAIL") != std::string::npos);
    }
}

TEST_CASE("a bad initial state is found at kmax 0") {
    ensure_setup();
    const std::string m = kDir + "/init-bad.model";
    {
        std::ofstream out(m);
        out << "qbmc-model 1\nvar x real\nloc a { flow x' in [1, 1] }\n"
               "init a with x = 0\nbad { a }\n";
    }
    CHECK(run_cmd("check " + m + " --kmax 0 --encoding qf").exit_code == 1);
}

TEST_CASE("bench runs oracle cells") {
    ensure_setup();
    const std::string matrix = kDir + "/oracle.matrix";
    {
        std::ofstream out(matrix);
        out << "ex-oracle " << kDir << "/ex.model oracle 4 UNSAT\n";
        out << "fu2-oracle " << kDir << "/fu2.model oracle 8 SAT\n";
        out << "fu2-refused " << kDir << "/fu2.model oracle 40 ORACLE-REFUSED\n";
    }
    auto r = run_cmd("bench " + matrix);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ORACLE-REFUSED") != std::string::npos);
    CHECK(r.output.find("FAIL") == std::string::npos);
}

TEST_CASE("empty matrix yields an empty report and success") {
    ensure_setup();
    const std::string matrix = kDir + "/empty.matrix";
    {
        std::ofstream m(matrix);
        m << "# nothing here\n";
    }
    auto r = run_cmd("bench " + matrix);
    CHECK(r.exit_code == 0);
}

TEST_CASE("kmax stored in the model is the default bound") {
    ensure_setup();
    run_cmd("generate fischer -n 2 --delta1 75 --delta2 70 --kmax 8 -o " + kDir +
            "/fu2k.model");
    auto r = run_cmd("check " + kDir + "/fu2k.model --encoding qf");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("k=8") != std::string::npos);
}

TEST_CASE("json output is machine readable") {
    ensure_setup();
    auto r = run_cmd("check " + kDir + "/fu2.model --kmax 8 --json");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("\"verdict\": \"SAT\"") != std::string::npos);
    CHECK(r.output.find("\"trace_valid\": true") != std::string::npos);
}
