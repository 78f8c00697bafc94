#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qbmc/backend.hpp"
#include "qbmc/encoder.hpp"
#include "qbmc/generators.hpp"
#include "qbmc/model.hpp"
#include "qbmc/trace.hpp"

#include <algorithm>

using namespace qbmc;

namespace {

HybridAutomaton walkthrough_reaching_loc2() {
    // a=(1,2,3,4) with the reachable question: loc2 with x >= 2.5
    auto doc = gen_example(Rational(1), Rational(2), Rational(3), Rational(4));
    doc.check->bad.clear();
    BadEntry b;
    b.locations = {"loc2"};
    b.guard.conjuncts.push_back(LinearConstraint::single("x", Rel::Ge, Rational::from_int(5, 2)));
    doc.check->bad.push_back(b);
    return build_check_unit(doc).automaton;
}

State mk_state(const std::string& loc, Rational x) {
    State s;
    s.location = loc;
    s.valuation["x"] = std::move(x);
    return s;
}

} // namespace

TEST_CASE("the walkthrough model at k=2 decodes as trajectory then discrete") {
    auto ha = walkthrough_reaching_loc2();
    Script s = encode_qf_bmc(ha, 2);
    SolverVerdict v = solve_builtin(s, std::chrono::minutes(1));
    REQUIRE(v.status == Status::Sat);
    Trace t = decode_trace(*v.model, ha, 2, "qf");
    REQUIRE(t.steps.size() == 2);
    CHECK(t.steps[0].kind == TraceStep::Trajectory);
    CHECK(t.steps[1].kind == TraceStep::Discrete);
    CHECK(validate_trace(ha, t).ok());
    CHECK(trace_hits_bad(ha, t));
}

TEST_CASE("a k=0 sat model yields a zero-step trace with a bad initial state") {
    auto doc = gen_example(Rational(0), Rational(1), Rational(0), Rational(2));
    doc.check->bad.clear();
    BadEntry b;
    b.locations = {"loc1"};  // init location itself
    doc.check->bad.push_back(b);
    auto ha = build_check_unit(doc).automaton;
    Script s = encode_qf_bmc(ha, 0);
    SolverVerdict v = solve_builtin(s, std::chrono::minutes(1));
    REQUIRE(v.status == Status::Sat);
    Trace t = decode_trace(*v.model, ha, 0, "qf");
    CHECK(t.steps.empty());
    CHECK(t.initial.location == "loc1");
    CHECK(validate_trace(ha, t).ok());
    CHECK(trace_hits_bad(ha, t));
}

TEST_CASE("quantified models decode from the outer frames") {
    auto ha = build_check_unit(gen_fischer(2, Rational(75), Rational(70))).automaton;
    Script s = encode_qbmc(ha, 8);
    SolverVerdict v = solve_builtin(s, std::chrono::minutes(5));
    REQUIRE(v.status == Status::Sat);
    Trace t = decode_trace(*v.model, ha, 8, "quantified");
    CHECK(validate_trace(ha, t).ok());
    // the final state has both processes in cs
    CHECK(t.steps.back().post.location == "cs×cs");
}

TEST_CASE("the hand-built walkthrough trace validates; over-dwelling does not") {
    auto ha = walkthrough_reaching_loc2();
    Trace good;
    good.initial = mk_state("loc1", Rational(0));
    TraceStep dwell;
    dwell.kind = TraceStep::Trajectory;
    dwell.dwell = Rational::from_int(5, 2);
    dwell.pre = mk_state("loc1", Rational(0));
    dwell.post = mk_state("loc1", Rational(5));  // rate 2 for 2.5 time units
    TraceStep jump;
    jump.kind = TraceStep::Discrete;
    jump.transition_index = 0;
    jump.pre = dwell.post;
    jump.post = mk_state("loc2", Rational(5));
    good.steps = {dwell, jump};
    CHECK(validate_trace(ha, good).ok());

    SUBCASE("no real time may elapse at x=5 in loc1") {
        Trace bad = good;
        TraceStep extra;
        extra.kind = TraceStep::Trajectory;
        extra.dwell = Rational(1);
        extra.pre = mk_state("loc1", Rational(5));
        extra.post = mk_state("loc1", Rational(5));
        bad.steps = {dwell, extra};  // stay in loc1 and dwell at the boundary
        auto r = validate_trace(ha, bad);
        REQUIRE_FALSE(r.ok());
        bool flow_violation = false;
        for (const auto& v : r.violations)
            flow_violation = flow_violation || v.find("flow inclusion") != std::string::npos;
        CHECK(flow_violation);
    }
    SUBCASE("a violated guard is pinned to its step") {
        Trace bad = good;
        bad.steps[0].post = mk_state("loc1", Rational(2));  // x=2 < 2.5
        bad.steps[0].dwell = Rational(1);
        bad.steps[1].pre = bad.steps[0].post;
        bad.steps[1].post = mk_state("loc2", Rational(2));
        auto r = validate_trace(ha, bad);
        REQUIRE_FALSE(r.ok());
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].find("step 1") != std::string::npos);
        CHECK(r.violations[0].find("guard") != std::string::npos);
    }
    SUBCASE("broken chaining is reported") {
        Trace bad = good;
        bad.steps[1].pre = mk_state("loc1", Rational(4));
        auto r = validate_trace(ha, bad);
        CHECK_FALSE(r.ok());
    }
    SUBCASE("valid traces stay valid under the midpoint-sampling strict mode") {
        ValidateOptions strict;
        strict.midpoint_check = true;
        CHECK(validate_trace(ha, good, strict).ok());
    }
}

TEST_CASE("stutter steps classify and validate") {
    auto ha = walkthrough_reaching_loc2();
    Trace t;
    t.initial = mk_state("loc1", Rational(0));
    TraceStep s;
    s.kind = TraceStep::Stutter;
    s.dwell = Rational(0);
    s.pre = t.initial;
    s.post = t.initial;
    t.steps = {s};
    CHECK(validate_trace(ha, t).ok());
    s.dwell = Rational(1);
    t.steps = {s};
    CHECK_FALSE(validate_trace(ha, t).ok());
}

TEST_CASE("decoding reproduces the assignment's frame values exactly") {
    auto ha = walkthrough_reaching_loc2();
    Script s = encode_qf_bmc(ha, 2);
    SolverVerdict v = solve_builtin(s, std::chrono::minutes(1));
    REQUIRE(v.status == Status::Sat);
    Trace t = decode_trace(*v.model, ha, 2, "qf");
    for (std::size_t i = 0; i <= 2; ++i) {
        const State& st = i == 0 ? t.initial : t.steps[i - 1].post;
        CHECK(st.valuation.at("x") == v.model->at("x_" + std::to_string(i)).rat);
        CHECK(*ha.location_index(st.location) == v.model->at("loc_" + std::to_string(i)).bv);
    }
}

TEST_CASE("decode rejects missing symbols and out-of-range codes") {
    auto ha = walkthrough_reaching_loc2();
    Assignment a;
    a["loc_0"] = Value::of_bv(0, 1);
    // missing x_0
    CHECK_THROWS_AS(decode_trace(a, ha, 0, "qf"), ModelError);
    a["x_0"] = Value::of_rat(Rational(0));
    CHECK_NOTHROW(decode_trace(a, ha, 0, "qf"));
    a["loc_0"] = Value::of_bv(7, 3);
    CHECK_THROWS_AS(decode_trace(a, ha, 0, "qf"), ModelError);
}

TEST_CASE("the pretty printer emits one line per step") {
    auto ha = walkthrough_reaching_loc2();
    Script s = encode_qf_bmc(ha, 2);
    SolverVerdict v = solve_builtin(s, std::chrono::minutes(1));
    REQUIRE(v.status == Status::Sat);
    Trace t = decode_trace(*v.model, ha, 2, "qf");
    std::string text = format_trace(t);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("0: loc1 {x=") != std::string::npos);
    CHECK(text.find("--D[0]-->") != std::string::npos);
}
