#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qbmc/encoder.hpp"
#include "qbmc/generators.hpp"
#include "qbmc/model.hpp"
#include "qbmc/smtlib.hpp"

using namespace qbmc;

TEST_CASE("a single linear atom renders in the documented form") {
    Script s;
    s.declare("x", Sort::real());
    s.assertions.push_back(
        f_linatom({{Rational(1), "x"}}, Rel::Ge, Rational::from_int(5, 2)));
    std::string text = to_smtlib2(s);
    CHECK(text.find("(assert (>= x (/ 5 2)))") != std::string::npos);
    CHECK(text.find("(set-option :produce-models true)") != std::string::npos);
    CHECK(text.find("(set-logic ALL)") != std::string::npos);
    CHECK(text.find("(check-sat)") != std::string::npos);
    CHECK(text.find("(get-model)") != std::string::npos);
}

TEST_CASE("rationals and bit-vectors render canonically") {
    Script s;
    s.declare("x", Sort::real());
    s.declare("b", Sort::bitvec(3));
    s.assertions.push_back(f_eq(f_var("x", Sort::real()), f_rat(Rational::from_int(-5, 2))));
    s.assertions.push_back(f_eq(f_var("b", Sort::bitvec(3)), f_bv(5, 3)));
    std::string text = to_smtlib2(s);
    CHECK(text.find("(- (/ 5 2))") != std::string::npos);
    CHECK(text.find("(_ bv5 3)") != std::string::npos);
}

TEST_CASE("the quantified k=3 script contains exactly one forall over a width-2 selector") {
    auto ha = build_check_unit(gen_example(Rational(1), Rational(2), Rational(3), Rational(4)))
                  .automaton;
    std::string text = to_smtlib2(encode_qbmc(ha, 3));
    std::size_t count = 0, pos = 0;
    while ((pos = text.find("(forall ", pos)) != std::string::npos) {
        ++count;
        ++pos;
    }
    CHECK(count == 1);
    CHECK(text.find("(forall ((t (_ BitVec 2)))") != std::string::npos);
}

TEST_CASE("rendered scripts re-read with the bundled reader, preserving assertions") {
    for (auto doc : {gen_example(Rational(0), Rational(1), Rational(0), Rational(2)),
                     gen_fischer(2, Rational(75), Rational(70))}) {
        auto ha = build_check_unit(doc).automaton;
        for (std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
            for (bool quantified : {false, true}) {
                Script s = quantified ? encode_qbmc(ha, k) : encode_qf_bmc(ha, k);
                std::string text = to_smtlib2(s);
                Script back = read_smtlib2(text);
                CHECK(back.assertions.size() == s.assertions.size());
                CHECK(back.symbols.size() == s.symbols.size());
                CHECK(back.produce_models == s.produce_models);
                CHECK(back.logic == s.logic);
                // the re-read script renders to the same bytes
                CHECK(to_smtlib2(back) == text);
            }
        }
    }
}

TEST_CASE("rendering is deterministic for equal scripts") {
    auto ha = build_check_unit(gen_fischer(2, Rational(5), Rational(70))).automaton;
    CHECK(to_smtlib2(encode_qbmc(ha, 4)) == to_smtlib2(encode_qbmc(ha, 4)));
    CHECK(to_smtlib2(encode_qf_bmc(ha, 4)) == to_smtlib2(encode_qf_bmc(ha, 4)));
}

TEST_CASE("model blocks parse in the common shapes") {
    Script s;
    s.declare("x_0", Sort::real());
    s.declare("delta_0", Sort::real());
    s.declare("loc_0", Sort::bitvec(2));
    s.declare("flag", Sort::boolean());

    SUBCASE("define-fun with plain and fractional values") {
        Assignment a = parse_smt_model(
            "(model (define-fun x_0 () Real 0.0)"
            " (define-fun delta_0 () Real (/ 5 2))"
            " (define-fun loc_0 () (_ BitVec 2) (_ bv3 2))"
            " (define-fun flag () Bool true))",
            s);
        CHECK(a.at("x_0").rat == Rational(0));
        CHECK(a.at("delta_0").rat == Rational::from_int(5, 2));
        CHECK(a.at("loc_0").bv == 3);
        CHECK(a.at("flag").b);
    }
    SUBCASE("negative and nested rational values") {
        Assignment a = parse_smt_model(
            "((define-fun x_0 () Real (- (/ 5 2))) (define-fun delta_0 () Real (- 7)))", s);
        CHECK(a.at("x_0").rat == Rational::from_int(-5, 2));
        CHECK(a.at("delta_0").rat == Rational(-7));
    }
    SUBCASE("bare bindings and hash literals") {
        Assignment a = parse_smt_model("((x_0 5) (loc_0 #b11))", s);
        CHECK(a.at("x_0").rat == Rational(5));
        CHECK(a.at("loc_0").bv == 3);
    }
    SUBCASE("unknown symbols are ignored") {
        Assignment a = parse_smt_model("((define-fun internal!aux () Real 1) (x_0 2))", s);
        CHECK(a.count("internal!aux") == 0);
        CHECK(a.at("x_0").rat == Rational(2));
    }
    SUBCASE("sort mismatches surface as errors") {
        CHECK_THROWS_AS(parse_smt_model("((define-fun x_0 () Bool true))", s), SmtlibError);
        CHECK_THROWS_AS(parse_smt_model("((loc_0 true))", s), SmtlibError);
    }
    SUBCASE("garbage is an error, not a guess") {
        CHECK_THROWS_AS(parse_smt_model("complete nonsense", s), SmtlibError);
    }
}

TEST_CASE("the reader rejects constructs outside the fragment") {
    CHECK_THROWS_AS(read_smtlib2("(declare-fun f (Real) Real)"), SmtlibError);
    CHECK_THROWS_AS(read_smtlib2("(push 1)"), SmtlibError);
    CHECK_THROWS_AS(read_smtlib2("(declare-const x Real) (assert (let ((y x)) (> y 0)))"),
                    SmtlibError);
    CHECK_THROWS_AS(read_smtlib2("(declare-const x Real) (assert (> (* x x) 1))"), SmtlibError);
}

TEST_CASE("the reader normalizes arithmetic into linear atoms") {
    Script s = read_smtlib2(
        "(declare-const x Real) (declare-const y Real)"
        "(assert (<= (+ (* 2 x) (- y) 1) (- y 3)))");
    REQUIRE(s.assertions.size() == 1);
    // 2x - y + 1 <= y - 3  ==>  2x - 2y <= -4
    CHECK(render_formula(s.assertions[0]) == "(<= (+ (* 2 x) (* (- 2) y)) (- 4))");
}

TEST_CASE("sort checking rejects ill-formed terms") {
    Script s;
    s.declare("x", Sort::real());
    s.declare("b", Sort::bitvec(2));
    SUBCASE("equality across sorts") {
        s.assertions.push_back(f_eq(f_var("x", Sort::real()), f_bv(1, 2)));
        CHECK_THROWS_AS(check_well_sorted(s), EncodingError);
    }
    SUBCASE("bit-vector width mismatch") {
        s.assertions.push_back(f_bvcomp(BvOp::Ult, f_var("b", Sort::bitvec(2)), f_bv(1, 3)));
        CHECK_THROWS_AS(check_well_sorted(s), EncodingError);
    }
    SUBCASE("undeclared symbol") {
        s.assertions.push_back(f_var("ghost", Sort::boolean()));
        CHECK_THROWS_AS(check_well_sorted(s), EncodingError);
    }
    SUBCASE("non-real symbol under a linear atom") {
        s.assertions.push_back(f_linatom({{Rational(1), "b"}}, Rel::Le, Rational(1)));
        CHECK_THROWS_AS(check_well_sorted(s), EncodingError);
    }
}
