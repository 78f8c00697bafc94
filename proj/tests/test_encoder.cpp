#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qbmc/encoder.hpp"
#include "qbmc/generators.hpp"
#include "qbmc/model.hpp"
#include "qbmc/smtlib.hpp"
#include "qbmc/solver/smtsolver.hpp"

#include <map>
#include <set>

using namespace qbmc;

namespace {

HybridAutomaton walkthrough() {  // a1=1 b1=2 a2=3 b2=4
    return build_check_unit(gen_example(Rational(1), Rational(2), Rational(3), Rational(4)))
        .automaton;
}

StepFrame frame(const HybridAutomaton& ha, const std::string& tag, bool dwell) {
    return detail::make_frame(ha, tag, dwell);
}

// structural evaluator for ground selector formulas (Eq/BvComp over consts)
bool eval_ground(const Formula& f, std::uint64_t t_value) {
    switch (f->kind) {
        case FNode::BoolConst: return f->bval;
        case FNode::And: {
            for (const auto& a : f->args)
                if (!eval_ground(a, t_value)) return false;
            return true;
        }
        case FNode::Or: {
            for (const auto& a : f->args)
                if (eval_ground(a, t_value)) return true;
            return false;
        }
        case FNode::Eq: {
            auto value = [&](const Formula& x) {
                return x->kind == FNode::Var ? t_value : x->bv;
            };
            return value(f->args[0]) == value(f->args[1]);
        }
        case FNode::BvComp: {
            auto value = [&](const Formula& x) {
                return x->kind == FNode::Var ? t_value : x->bv;
            };
            std::uint64_t a = value(f->args[0]), b = value(f->args[1]);
            switch (f->bvop) {
                case BvOp::Ult: return a < b;
                case BvOp::Ule: return a <= b;
                case BvOp::Ugt: return a > b;
                case BvOp::Uge: return a >= b;
            }
            return false;
        }
        default: return false;
    }
}

} // namespace

TEST_CASE("encode_init renders the walkthrough I0 plus the invariant conjunct") {
    auto ha = walkthrough();
    Formula init = encode_init(ha, frame(ha, "0", false));
    CHECK(render_formula(init) == "(and (= loc_0 (_ bv0 1)) (= x_0 0) (<= x_0 5))");
}

TEST_CASE("encode_init with an empty guard keeps location and invariant") {
    auto ha = walkthrough();
    ha.init_guard.conjuncts.clear();
    Formula init = encode_init(ha, frame(ha, "0", false));
    CHECK(render_formula(init) == "(and (= loc_0 (_ bv0 1)) (<= x_0 5))");
}

TEST_CASE("fischer init pins both clocks, the owner and the product location") {
    auto ha = build_check_unit(gen_fischer(2, Rational(5), Rational(70))).automaton;
    std::string text = render_formula(encode_init(ha, frame(ha, "0", false)));
    CHECK(text.find("(= loc_0 (_ bv0 4))") != std::string::npos);
    CHECK(text.find("(= x_1_0 0)") != std::string::npos);
    CHECK(text.find("(= x_2_0 0)") != std::string::npos);
    CHECK(text.find("(= g_0 (_ bv0 2))") != std::string::npos);
}

TEST_CASE("encode_discrete produces the walkthrough D disjunct") {
    auto ha = walkthrough();
    Formula d = encode_discrete(ha, frame(ha, "0", false), frame(ha, "1", false));
    REQUIRE(d->kind == FNode::Or);
    REQUIRE(d->args.size() == 2);
    CHECK(render_formula(d->args[0]) ==
          "(and (= loc_0 (_ bv0 1)) (= loc_1 (_ bv1 1)) (<= x_0 5) (>= x_0 (/ 5 2)) "
          "(= x_1 x_0) (<= x_1 10))");
    SUBCASE("without the target-invariant conjunct") {
        EncodingOptions opts;
        opts.include_target_invariant_on_discrete = false;
        Formula d2 = encode_discrete(ha, frame(ha, "0", false), frame(ha, "1", false), opts);
        CHECK(render_formula(d2->args[0]) ==
              "(and (= loc_0 (_ bv0 1)) (= loc_1 (_ bv1 1)) (<= x_0 5) (>= x_0 (/ 5 2)) "
              "(= x_1 x_0))");
    }
}

TEST_CASE("an automaton without transitions encodes D as literal false") {
    auto ha = walkthrough();
    ha.transitions.clear();
    Formula d = encode_discrete(ha, frame(ha, "0", false), frame(ha, "1", false));
    CHECK(d->kind == FNode::BoolConst);
    CHECK_FALSE(d->bval);
}

TEST_CASE("fischer N=2 discrete step has 48 disjuncts matching the product") {
    auto ha = build_check_unit(gen_fischer(2, Rational(5), Rational(70))).automaton;
    Formula d = encode_discrete(ha, frame(ha, "0", false), frame(ha, "1", false));
    REQUIRE(d->kind == FNode::Or);
    CHECK(d->args.size() == ha.transitions.size());
    CHECK(d->args.size() == 48);  // 2 processes * 6 post-split * 4 peer locations
}

TEST_CASE("encode_trajectory renders the walkthrough T disjunct with endpoint invariants") {
    auto ha = walkthrough();
    Formula t = encode_trajectory(ha, frame(ha, "0", false), frame(ha, "1", false), "delta_0");
    REQUIRE(t->kind == FNode::And);
    REQUIRE(t->args.size() == 2);
    CHECK(render_formula(t->args[0]) == "(>= delta_0 0)");
    REQUIRE(t->args[1]->kind == FNode::Or);
    CHECK(render_formula(t->args[1]->args[0]) ==
          "(and (= loc_0 (_ bv0 1)) (= loc_1 loc_0) "
          "(>= (+ (* (- 1) delta_0) (* (- 1) x_0) x_1) 0) "
          "(<= (+ (* (- 2) delta_0) (* (- 1) x_0) x_1) 0) (<= x_1 5) (<= x_0 5))");
}

TEST_CASE("trajectory semantics at the encoding level") {
    auto ha = walkthrough();
    SUBCASE("a zero-dwell stutter is always available under the invariant") {
        Script s;
        detail::declare_frame(s, ha, frame(ha, "0", false));
        detail::declare_frame(s, ha, frame(ha, "1", false));
        s.declare("delta_0", Sort::real());
        s.assertions.push_back(encode_init(ha, frame(ha, "0", false)));
        s.assertions.push_back(
            encode_trajectory(ha, frame(ha, "0", false), frame(ha, "1", false), "delta_0"));
        s.assertions.push_back(f_linatom({{Rational(1), "delta_0"}}, Rel::Eq, Rational(0)));
        s.assertions.push_back(f_eq(f_var("x_1", Sort::real()), f_var("x_0", Sort::real())));
        CHECK(smt::solve_script(s).status == smt::SolveStatus::Sat);
    }
    SUBCASE("no positive dwell exists at the invariant boundary") {
        // x_0 = 5 in loc1 with rates [1,2] and invariant x <= 5
        Script s;
        detail::declare_frame(s, ha, frame(ha, "0", false));
        detail::declare_frame(s, ha, frame(ha, "1", false));
        s.declare("delta_0", Sort::real());
        s.assertions.push_back(
            encode_trajectory(ha, frame(ha, "0", false), frame(ha, "1", false), "delta_0"));
        s.assertions.push_back(f_eq(f_var("loc_0", Sort::bitvec(1)), f_bv(0, 1)));
        s.assertions.push_back(f_linatom({{Rational(1), "x_0"}}, Rel::Eq, Rational(5)));
        s.assertions.push_back(f_linatom({{Rational(1), "delta_0"}}, Rel::Gt, Rational(0)));
        CHECK(smt::solve_script(s).status == smt::SolveStatus::Unsat);
    }
}

TEST_CASE("selector cubes reproduce the k=3 cube cover and stay a partition") {
    SUBCASE("k=3 merged cubes per the published instance") {
        // !t1 ; t1 & !t2 ; t1 & t2 over a width-2 selector, MSB first
        CHECK(render_formula(selector_cube(0, 3, "t", 2, SelectorMode::MergedCubes)) ==
              "(bvule t (_ bv1 2))");
        CHECK(render_formula(selector_cube(1, 3, "t", 2, SelectorMode::MergedCubes)) ==
              "(= t (_ bv2 2))");
        CHECK(render_formula(selector_cube(2, 3, "t", 2, SelectorMode::MergedCubes)) ==
              "(= t (_ bv3 2))");
    }
    SUBCASE("k=1 cube is true over the guarded single step") {
        Formula c = selector_cube(0, 1, "t", 1, SelectorMode::MergedCubes);
        CHECK(c->kind == FNode::BoolConst);
        CHECK(c->bval);
    }
    SUBCASE("binary equality enumerates the step literals") {
        CHECK(render_formula(selector_cube(2, 4, "t", 2, SelectorMode::BinaryEquality)) ==
              "(= t (_ bv2 2))");
    }
    SUBCASE("both modes induce a total surjective map onto the steps") {
        for (std::size_t k = 1; k <= 9; ++k) {
            unsigned w = bit_width_for(k);
            for (auto mode : {SelectorMode::BinaryEquality, SelectorMode::MergedCubes}) {
                std::map<std::uint64_t, std::size_t> covers;
                for (std::uint64_t v = 0; v < (std::uint64_t{1} << w); ++v) {
                    // binary mode restricts the domain via the guard t < k
                    if (mode == SelectorMode::BinaryEquality && v >= k) continue;
                    std::size_t hits = 0;
                    for (std::size_t i = 0; i < k; ++i)
                        if (eval_ground(selector_cube(i, k, "t", w, mode), v)) {
                            ++hits;
                            covers[v] = i;
                        }
                    CHECK(hits == 1);  // total and unambiguous
                }
                std::set<std::size_t> image;
                for (const auto& [v, step] : covers) image.insert(step);
                CHECK(image.size() == k);  // surjective
            }
        }
    }
    SUBCASE("out of range throws") {
        CHECK_THROWS_AS(selector_cube(3, 3, "t", 2, SelectorMode::BinaryEquality), EncodingError);
    }
}

TEST_CASE("the QF script has the published top-level shape") {
    auto ha = walkthrough();
    Script s = encode_qf_bmc(ha, 2);
    check_well_sorted(s);
    // I0, (D0 or T0), (D1 or T1), bad disjunction; no range assertions for 2 locations
    REQUIRE(s.assertions.size() == 4);
    auto stats = formula_stats(s);
    CHECK(stats.template_instantiations == 2);
    CHECK(stats.quantifiers == 0);
    // frames 0..2 with dwells 0..1: loc+x per frame, delta per step
    CHECK(s.symbols.size() == 3 * 2 + 2);
}

TEST_CASE("k=0 QF script is just init and bad") {
    auto ha = walkthrough();
    Script s = encode_qf_bmc(ha, 0);
    check_well_sorted(s);
    REQUIRE(s.assertions.size() == 2);
    CHECK(formula_stats(s).template_instantiations == 0);
}

TEST_CASE("the quantified script keeps one template and per-step selector glue") {
    auto ha = walkthrough();
    Script s = encode_qbmc(ha, 3);
    check_well_sorted(s);
    auto stats = formula_stats(s);
    CHECK(stats.template_instantiations == 1);
    CHECK(stats.quantifiers == 2);  // one forall block, one exists block
    CHECK(stats.max_quantifier_depth == 2);
    std::string text = to_smtlib2(s);
    CHECK(text.find("(forall ((t (_ BitVec 2)))") != std::string::npos);
    // per-step dwells are top-level symbols
    CHECK(s.sort_of("delta_0") != nullptr);
    CHECK(s.sort_of("delta_2") != nullptr);
    CHECK(s.sort_of("delta") == nullptr);
}

TEST_CASE("shared delta mode declares a single dwell") {
    auto ha = walkthrough();
    EncodingOptions opts;
    opts.delta_mode = DeltaMode::Shared;
    Script s = encode_qbmc(ha, 3, opts);
    check_well_sorted(s);
    CHECK(s.sort_of("delta") != nullptr);
    CHECK(s.sort_of("delta_0") == nullptr);
    std::string text = to_smtlib2(s);
    // no inner dwell binder in shared mode
    CHECK(text.find("(d Real)") == std::string::npos);
}

TEST_CASE("quantified encoding rejects k=0") {
    auto ha = walkthrough();
    CHECK_THROWS_AS(encode_qbmc(ha, 0), EncodingError);
}

TEST_CASE("template instantiations are 1 vs k across bounds") {
    auto ha = walkthrough();
    auto fis = build_check_unit(gen_fischer(2, Rational(5), Rational(70))).automaton;
    for (std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{8}}) {
        for (const auto* m : {&ha, &fis}) {
            CHECK(formula_stats(encode_qf_bmc(*m, k)).template_instantiations == k);
            CHECK(formula_stats(encode_qbmc(*m, k)).template_instantiations == 1);
        }
    }
}

TEST_CASE("quantified template size is constant in k, total node count linear") {
    auto ha = walkthrough();
    std::map<std::size_t, FormulaStats> stats;
    for (std::size_t k : {std::size_t{4}, std::size_t{8}, std::size_t{16}, std::size_t{32}})
        stats[k] = formula_stats(encode_qbmc(ha, k));
    CHECK(stats[4].template_nodes == stats[8].template_nodes);
    CHECK(stats[8].template_nodes == stats[16].template_nodes);
    CHECK(stats[16].template_nodes == stats[32].template_nodes);
    // total nodes fit nodes(k) = a + b*k exactly (binary selector mode)
    auto d1 = stats[8].nodes - stats[4].nodes;
    auto d2 = stats[16].nodes - stats[8].nodes;
    auto d3 = stats[32].nodes - stats[16].nodes;
    CHECK(d2 == 2 * d1);
    CHECK(d3 == 2 * d2);
    // selector glue grows with k
    CHECK(stats[32].selector_nodes > stats[16].selector_nodes);
}

TEST_CASE("range constraints appear exactly when domains are not powers of two") {
    // 3-location automaton: loc range constraint expected
    HybridAutomaton ha;
    ha.name = "r";
    ha.vars.push_back(VarDecl{"x", VarKind::Real, 0, 0, VarScope::Local});
    for (int i = 0; i < 3; ++i) {
        Location l;
        l.name = "q" + std::to_string(i);
        l.flow["x"] = FlowInterval{Rational(1), Rational(1)};
        ha.locations.push_back(std::move(l));
    }
    ha.init_location = "q0";
    REQUIRE(validate_automaton(ha).ok());
    Script s = encode_qf_bmc(ha, 1);
    std::string text = to_smtlib2(s);
    CHECK(text.find("(bvult loc_0 (_ bv3 2))") != std::string::npos);
    CHECK(text.find("(bvult loc_1 (_ bv3 2))") != std::string::npos);
}

TEST_CASE("every emitted script is well-sorted") {
    for (auto doc : {gen_example(Rational(0), Rational(1), Rational(0), Rational(2)),
                     gen_fischer(2, Rational(75), Rational(70)),
                     gen_lynch_shavit(2, Rational(5), Rational(70))}) {
        auto ha = build_check_unit(doc).automaton;
        for (std::size_t k : {std::size_t{1}, std::size_t{3}}) {
            CHECK_NOTHROW(check_well_sorted(encode_qf_bmc(ha, k)));
            CHECK_NOTHROW(check_well_sorted(encode_qbmc(ha, k)));
            EncodingOptions cubes;
            cubes.selector_mode = SelectorMode::MergedCubes;
            CHECK_NOTHROW(check_well_sorted(encode_qbmc(ha, k, cubes)));
        }
    }
}
