#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qbmc/generators.hpp"
#include "qbmc/ha.hpp"
#include "qbmc/model.hpp"

#include <set>

using namespace qbmc;

namespace {

HybridAutomaton example_automaton() {
    ModelDocument doc = gen_example(Rational(0), Rational(1), Rational(0), Rational(2));
    return build_check_unit(doc).automaton;
}

HybridAutomaton fischer_product(std::size_t n) {
    ModelDocument doc = gen_fischer(n, Rational(5), Rational(70));
    return build_check_unit(doc).automaton;
}

} // namespace

TEST_CASE("the example automaton validates cleanly and is rectangular") {
    auto ha = example_automaton();
    auto rep = validate_automaton(ha);
    CHECK(rep.ok());
    CHECK(rep.is_rectangular);
}

TEST_CASE("a flow interval with lo > hi is reported") {
    auto ha = example_automaton();
    ha.locations[0].flow["x"] = FlowInterval{Rational(2), Rational(1)};
    auto rep = validate_automaton(ha);
    REQUIRE_FALSE(rep.ok());
    bool found = false;
    for (const auto& v : rep.violations) found = found || v.find("flow lo > hi") != std::string::npos;
    CHECK(found);
}

TEST_CASE("structural defects are each reported") {
    auto ha = example_automaton();
    ha.vars.push_back(ha.vars[0]);  // duplicate name
    ha.transitions[0].target = "nowhere";
    ha.locations[1].invariant.conjuncts.push_back(
        LinearConstraint::single("ghost", Rel::Le, Rational(1)));
    auto rep = validate_automaton(ha);
    CHECK(rep.violations.size() >= 3);
}

TEST_CASE("reserved frame-symbol names are rejected") {
    auto ha = example_automaton();
    ha.vars.push_back(VarDecl{"loc", VarKind::Real, 0, 0, VarScope::Local});
    for (auto& l : ha.locations) l.flow["loc"] = FlowInterval{Rational(1), Rational(1)};
    auto rep = validate_automaton(ha);
    REQUIRE_FALSE(rep.ok());
}

TEST_CASE("fischer composition matches the published location counts") {
    CHECK(fischer_product(2).locations.size() == 16);  // 4^2
    CHECK(fischer_product(3).locations.size() == 64);  // 4^3
    CHECK(validate_automaton(fischer_product(2)).ok());
}

TEST_CASE("product transition count follows the interleaving formula") {
    // |trans(product)| = sum_i |trans_i| * prod_{j != i} |Loc_j|
    for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
        ModelDocument doc = gen_fischer(n, Rational(5), Rational(70));
        std::size_t expected = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t others = 1;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) others *= doc.automata[j].locations.size();
            expected += doc.automata[i].transitions.size() * others;
        }
        auto product = build_check_unit(doc).automaton;
        CHECK(product.transitions.size() == expected);
        // 6 transitions per process: 5 protocol arrows with g != i split in two
        std::size_t closed_form = n * 6;
        for (std::size_t j = 1; j < n; ++j) closed_form *= 4;
        CHECK(product.transitions.size() == closed_form);
    }
}

TEST_CASE("single-component composition is the input with suffixed names") {
    ModelDocument doc = gen_fischer(1, Rational(5), Rational(70));
    auto product = build_check_unit(doc).automaton;
    const auto& comp = doc.automata[0];
    REQUIRE(product.locations.size() == comp.locations.size());
    REQUIRE(product.transitions.size() == comp.transitions.size());
    CHECK(product.find_var("x_1") != nullptr);
    CHECK(product.find_var("x") == nullptr);
    for (std::size_t i = 0; i < comp.locations.size(); ++i)
        CHECK(product.locations[i].name == comp.locations[i].name);
}

TEST_CASE("lynch-shavit composes to 9^N locations") {
    ModelDocument doc2 = gen_lynch_shavit(2, Rational(5), Rational(70));
    auto p2 = build_check_unit(doc2).automaton;
    CHECK(p2.locations.size() == 81);
    CHECK(validate_automaton(p2).ok());

    ModelDocument doc4 = gen_lynch_shavit(4, Rational(5), Rational(70));
    std::vector<HybridAutomaton> comps(doc4.automata.begin(), doc4.automata.end());
    auto p4 = product_compose(comps, doc4.network->globals);
    CHECK(p4.locations.size() == 6561);
}

TEST_CASE("composition is associative up to location renaming") {
    // three local-only automata; nested products compared by sizes
    auto mk = [](const std::string& name, int locs, int trans) {
        HybridAutomaton a;
        a.name = name;
        a.vars.push_back(VarDecl{"c", VarKind::Real, 0, 0, VarScope::Local});
        for (int i = 0; i < locs; ++i) {
            Location l;
            l.name = "s" + std::to_string(i);
            l.flow["c"] = FlowInterval{Rational(1), Rational(1)};
            a.locations.push_back(std::move(l));
        }
        for (int i = 0; i < trans; ++i) {
            Transition t;
            t.source = "s" + std::to_string(i % locs);
            t.target = "s" + std::to_string((i + 1) % locs);
            a.transitions.push_back(std::move(t));
        }
        a.init_location = "s0";
        return a;
    };
    HybridAutomaton A = mk("a", 2, 1), B = mk("b", 3, 2), C = mk("c", 2, 2);
    auto left = product_compose({product_compose({A, B}, {}), C}, {});
    auto right = product_compose({A, product_compose({B, C}, {})}, {});
    CHECK(left.locations.size() == right.locations.size());
    CHECK(left.transitions.size() == right.transitions.size());
    auto flat = product_compose({A, B, C}, {});
    CHECK(flat.locations.size() == left.locations.size());
    CHECK(flat.transitions.size() == left.transitions.size());
}

TEST_CASE("composition rejects bad configurations") {
    ModelDocument doc = gen_fischer(2, Rational(5), Rational(70));
    SUBCASE("real-valued global") {
        doc.network->globals[0].kind = VarKind::Real;
        CHECK_THROWS_AS(build_check_unit(doc), ModelError);
    }
    SUBCASE("component writes an unknown global") {
        UpdateAction a;
        a.kind = UpdateAction::AssignConst;
        a.value = Rational(1);
        doc.automata[0].transitions[0].update.actions["phantom"] = a;
        CHECK_THROWS_AS(build_check_unit(doc), ModelError);
    }
    SUBCASE("name collision with a global after renaming") {
        doc.network->globals.push_back(
            VarDecl{"x_1", VarKind::FiniteInt, 0, 1, VarScope::Global});
        CHECK_THROWS_AS(build_check_unit(doc), ModelError);
    }
}

TEST_CASE("bad_mutex covers exactly the multi-critical product locations") {
    SUBCASE("fischer N=2: the single cs pair") {
        auto product = fischer_product(2);
        auto entries = bad_mutex(product, {"cs"});
        REQUIRE(entries.size() == 1);
        REQUIRE(entries[0].locations.size() == 1);
        CHECK(entries[0].locations[0] == "cs×cs");
        CHECK(entries[0].guard.conjuncts.empty());
    }
    SUBCASE("fischer N=3: independent enumeration over 4^3 products") {
        auto product = fischer_product(3);
        auto entries = bad_mutex(product, {"cs"});
        REQUIRE(entries.size() == 1);
        // independent count: tuples over {rem,try,wait,cs}^3 with >= 2 cs
        std::size_t expected = 0;
        const char* names[4] = {"rem", "try", "wait", "cs"};
        std::set<std::string> expected_names;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                    int cs = (a == 3) + (b == 3) + (c == 3);
                    if (cs >= 2) {
                        ++expected;
                        expected_names.insert(std::string(names[a]) + "×" + names[b] +
                                              "×" + names[c]);
                    }
                }
        CHECK(expected == 10);
        CHECK(entries[0].locations.size() == expected);
        std::set<std::string> got(entries[0].locations.begin(), entries[0].locations.end());
        CHECK(got == expected_names);
    }
    SUBCASE("lynch-shavit N=2: both components in cs") {
        ModelDocument doc = gen_lynch_shavit(2, Rational(5), Rational(70));
        std::vector<HybridAutomaton> comps(doc.automata.begin(), doc.automata.end());
        auto product = product_compose(comps, doc.network->globals);
        auto entries = bad_mutex(product, {"cs"});
        REQUIRE(entries.size() == 1);
        std::set<std::string> got(entries[0].locations.begin(), entries[0].locations.end());
        CHECK(got == std::set<std::string>{"cs×cs"});
    }
    SUBCASE("marker matching nothing is an error") {
        auto product = fischer_product(2);
        CHECK_THROWS_AS(bad_mutex(product, {"nonexistent"}), ModelError);
    }
    SUBCASE("N=1 yields an empty bad set") {
        auto doc = gen_fischer(1, Rational(5), Rational(70));
        auto unit = build_check_unit(doc);
        CHECK(unit.automaton.bad.empty());
    }
}

TEST_CASE("guard and constraint evaluation is exact") {
    LinearConstraint c;
    c.terms["x"] = Rational::from_int(1, 3);
    c.terms["y"] = Rational(2);
    c.rel = Rel::Le;
    c.bound = Rational::from_int(7, 3);
    std::map<std::string, Rational> v{{"x", Rational(1)}, {"y", Rational(1)}};
    CHECK(c.holds(v));  // 1/3 + 2 = 7/3 <= 7/3
    c.rel = Rel::Lt;
    CHECK_FALSE(c.holds(v));
}
