#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qbmc/backend.hpp"
#include "qbmc/encoder.hpp"
#include "qbmc/generators.hpp"
#include "qbmc/model.hpp"
#include "qbmc/trace.hpp"

#include <chrono>

using namespace qbmc;

namespace {

const std::string kSolveCmd = std::string(QBMC_BIN_PATH) + " solve";

HybridAutomaton fischer(std::size_t n, long long d1, long long d2) {
    return build_check_unit(gen_fischer(n, Rational(d1), Rational(d2))).automaton;
}

} // namespace

TEST_CASE("a trivially false assertion is unsat through the external process") {
    Script s;
    s.assertions.push_back(f_false());
    SolverVerdict v = run_solver(s, kSolveCmd, std::chrono::seconds(30));
    CHECK(v.status == Status::Unsat);
    CHECK_FALSE(v.model.has_value());
}

TEST_CASE("fischer unsafe N=2 at k=8 is sat with a decodable model via the subprocess") {
    auto ha = fischer(2, 75, 70);
    Script s = encode_qf_bmc(ha, 8);
    SolverVerdict v = run_solver(s, kSolveCmd, std::chrono::minutes(5));
    REQUIRE(v.status == Status::Sat);
    REQUIRE(v.model.has_value());
    Trace trace = decode_trace(*v.model, ha, 8, "qf");
    CHECK(validate_trace(ha, trace).ok());
    CHECK(trace_hits_bad(ha, trace));
    CHECK(v.wall_time_seconds > 0);
    // linux exposes child peak rss
    CHECK(v.peak_memory_bytes.has_value());
}

TEST_CASE("fischer safe N=2 at k=16 is unsat via the subprocess") {
    auto ha = fischer(2, 5, 70);
    Script s = encode_qf_bmc(ha, 16);
    SolverVerdict v = run_solver(s, kSolveCmd, std::chrono::minutes(10));
    CHECK(v.status == Status::Unsat);
}

TEST_CASE("timeouts kill the child within the grace period") {
    auto ha = fischer(2, 5, 70);
    Script s = encode_qf_bmc(ha, 16);
    auto start = std::chrono::steady_clock::now();
    SolverVerdict v = run_solver(s, kSolveCmd, std::chrono::milliseconds(60));
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(v.status == Status::Timeout);
    CHECK(elapsed < 2.1);
}

TEST_CASE("spawn failures and garbage output are errors with context") {
    Script s;
    s.assertions.push_back(f_true());
    SUBCASE("nonexistent binary") {
        SolverVerdict v = run_solver(s, "/nonexistent/solver/binary", std::chrono::seconds(5));
        CHECK(v.status == Status::Error);
    }
    SUBCASE("no verdict token") {
        SolverVerdict v = run_solver(s, "/bin/cat", std::chrono::seconds(5));
        CHECK(v.status == Status::Error);
        CHECK_FALSE(v.solver_stdout_tail.empty());
    }
}

TEST_CASE("builtin dispatch matches the subprocess verdicts") {
    auto ha = fischer(2, 75, 70);
    for (std::size_t k : {std::size_t{4}, std::size_t{8}}) {
        Script s = encode_qf_bmc(ha, k);
        SolverConfig builtin;       // empty command = builtin
        builtin.timeout = std::chrono::minutes(5);
        SolverConfig external{kSolveCmd, std::chrono::minutes(5)};
        CHECK(run_check(s, builtin).status == run_check(s, external).status);
    }
}

TEST_CASE("QBMC_SOLVER seeds the default configuration") {
    setenv("QBMC_SOLVER", "my-solver --flag", 1);
    CHECK(default_solver_config().command == "my-solver --flag");
    unsetenv("QBMC_SOLVER");
    CHECK(default_solver_config().command.empty());
}
