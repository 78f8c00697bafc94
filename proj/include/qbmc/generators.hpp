// ============================================================================
// qbmc/generators.hpp — benchmark model generators
// ============================================================================
//
// Three families:
//   gen_example      the two-location rectangular automaton with the
//                    x < 2.5 reachability question,
//   gen_fischer      Fischer's timed mutual exclusion, N processes over a
//                    shared owner variable g,
//   gen_lynch_shavit a two-phase Lynch-Shavit-style protocol layering a
//                    flag lock over the timed owner lock, 9 locations per
//                    process (rem, try, set, wait, testb, setb, recheck,
//                    precs, cs) with globals v (owner) and flags b1, b2.
//
// Inequality guards on the owner (g != i, v != i) are split into < and >
// pairs so that all guards stay conjunctions.
//
// ============================================================================

#ifndef QBMC_GENERATORS_HPP
#define QBMC_GENERATORS_HPP

#include "qbmc/model.hpp"

#include <string>

namespace qbmc {

inline ModelDocument gen_example(const Rational& a1, const Rational& b1, const Rational& a2,
                                 const Rational& b2) {
    if (b1 < a1 || b2 < a2) throw ModelError("flow interval has lo > hi");

    HybridAutomaton ha;
    ha.name = "main";
    ha.vars.push_back(VarDecl{"x", VarKind::Real, 0, 0, VarScope::Local});

    Location loc1;
    loc1.name = "loc1";
    loc1.invariant.conjuncts.push_back(LinearConstraint::single("x", Rel::Le, Rational(5)));
    loc1.flow["x"] = FlowInterval{a1, b1};
    Location loc2;
    loc2.name = "loc2";
    loc2.invariant.conjuncts.push_back(LinearConstraint::single("x", Rel::Le, Rational(10)));
    loc2.flow["x"] = FlowInterval{a2, b2};
    ha.locations = {loc1, loc2};

    Transition up;
    up.source = "loc1";
    up.target = "loc2";
    up.guard.conjuncts.push_back(
        LinearConstraint::single("x", Rel::Ge, Rational::from_int(5, 2)));
    Transition down;
    down.source = "loc2";
    down.target = "loc1";
    down.guard.conjuncts.push_back(LinearConstraint::single("x", Rel::Ge, Rational(10)));
    UpdateAction reset;
    reset.kind = UpdateAction::AssignConst;
    reset.value = Rational(0);
    down.update.actions["x"] = reset;
    ha.transitions = {up, down};

    ha.init_location = "loc1";
    ha.init_guard.conjuncts.push_back(LinearConstraint::single("x", Rel::Eq, Rational(0)));

    ModelDocument doc;
    doc.automata.push_back(std::move(ha));
    doc.check.emplace();
    BadEntry bad;
    bad.locations = {"loc2"};
    bad.guard.conjuncts.push_back(
        LinearConstraint::single("x", Rel::Lt, Rational::from_int(5, 2)));
    doc.check->bad.push_back(std::move(bad));
    return doc;
}

namespace detail {

inline UpdateAction assign_const(Rational v) {
    UpdateAction a;
    a.kind = UpdateAction::AssignConst;
    a.value = std::move(v);
    return a;
}

inline LinearConstraint on_var(const std::string& v, Rel r, Rational b) {
    return LinearConstraint::single(v, r, std::move(b));
}

} // namespace detail

inline ModelDocument gen_fischer(std::size_t n, const Rational& delta1, const Rational& delta2) {
    if (n < 1) throw ModelError("fischer: N must be >= 1");
    if (!(delta1 > Rational(0)) || !(delta2 > Rational(0)))
        throw ModelError("fischer: delta parameters must be positive");

    ModelDocument doc;
    doc.network.emplace();
    doc.network->globals.push_back(
        VarDecl{"g", VarKind::FiniteInt, 0, static_cast<long long>(n), VarScope::Global});

    const FlowInterval clock{Rational(1), Rational(1)};
    for (std::size_t i = 1; i <= n; ++i) {
        HybridAutomaton p;
        p.name = "p" + std::to_string(i);
        p.vars.push_back(VarDecl{"x", VarKind::Real, 0, 0, VarScope::Local});

        for (const char* lname : {"rem", "try", "wait", "cs"}) {
            Location l;
            l.name = lname;
            l.flow["x"] = clock;
            if (l.name == "try")
                l.invariant.conjuncts.push_back(detail::on_var("x", Rel::Le, delta1));
            p.locations.push_back(std::move(l));
        }

        auto reset_clock = detail::assign_const(Rational(0));
        const Rational id(static_cast<long long>(i));

        Transition t1;  // rem -> try when nobody owns the lock
        t1.source = "rem";
        t1.target = "try";
        t1.guard.conjuncts.push_back(detail::on_var("g", Rel::Eq, Rational(0)));
        t1.update.actions["x"] = reset_clock;

        Transition t2;  // try -> wait, claim ownership within delta1
        t2.source = "try";
        t2.target = "wait";
        t2.update.actions["g"] = detail::assign_const(id);
        t2.update.actions["x"] = reset_clock;

        Transition t3a;  // wait -> rem after delta2 if overwritten (g < i)
        t3a.source = "wait";
        t3a.target = "rem";
        t3a.guard.conjuncts.push_back(detail::on_var("g", Rel::Lt, id));
        t3a.guard.conjuncts.push_back(detail::on_var("x", Rel::Ge, delta2));
        t3a.update.actions["x"] = reset_clock;

        Transition t3b = t3a;  // g > i half of the split
        t3b.guard.conjuncts[0] = detail::on_var("g", Rel::Gt, id);

        Transition t4;  // wait -> cs after delta2 while still the owner
        t4.source = "wait";
        t4.target = "cs";
        t4.guard.conjuncts.push_back(detail::on_var("g", Rel::Eq, id));
        t4.guard.conjuncts.push_back(detail::on_var("x", Rel::Ge, delta2));
        t4.update.actions["x"] = reset_clock;

        Transition t5;  // cs -> rem, release
        t5.source = "cs";
        t5.target = "rem";
        t5.update.actions["g"] = detail::assign_const(Rational(0));

        p.transitions = {t1, t2, t3a, t3b, t4, t5};
        p.init_location = "rem";
        p.init_guard.conjuncts.push_back(detail::on_var("x", Rel::Eq, Rational(0)));
        if (i == 1) p.init_guard.conjuncts.push_back(detail::on_var("g", Rel::Eq, Rational(0)));

        doc.network->components.push_back(p.name);
        doc.automata.push_back(std::move(p));
    }

    doc.check.emplace();
    BadEntry marker;
    marker.locations = {"cs"};
    doc.check->bad.push_back(std::move(marker));
    return doc;
}

inline ModelDocument gen_lynch_shavit(std::size_t n, const Rational& delta1,
                                      const Rational& delta2) {
    if (n < 1) throw ModelError("lynch-shavit: N must be >= 1");
    if (!(delta1 > Rational(0)) || !(delta2 > Rational(0)))
        throw ModelError("lynch-shavit: delta parameters must be positive");

    ModelDocument doc;
    doc.network.emplace();
    const long long N = static_cast<long long>(n);
    doc.network->globals.push_back(VarDecl{"v", VarKind::FiniteInt, 0, N, VarScope::Global});
    doc.network->globals.push_back(VarDecl{"b1", VarKind::FiniteInt, 0, 1, VarScope::Global});
    doc.network->globals.push_back(VarDecl{"b2", VarKind::FiniteInt, 0, 1, VarScope::Global});

    const FlowInterval clock{Rational(1), Rational(1)};
    for (std::size_t i = 1; i <= n; ++i) {
        HybridAutomaton p;
        p.name = "p" + std::to_string(i);
        p.vars.push_back(VarDecl{"x", VarKind::Real, 0, 0, VarScope::Local});

        for (const char* lname :
             {"rem", "try", "set", "wait", "testb", "setb", "recheck", "precs", "cs"}) {
            Location l;
            l.name = lname;
            l.flow["x"] = clock;
            if (l.name == "set")
                l.invariant.conjuncts.push_back(detail::on_var("x", Rel::Le, delta1));
            p.locations.push_back(std::move(l));
        }

        auto reset_clock = detail::assign_const(Rational(0));
        const Rational id(static_cast<long long>(i));
        std::vector<Transition> ts;

        auto add = [&](const char* src, const char* tgt, std::vector<LinearConstraint> guard,
                       std::map<std::string, UpdateAction> update) {
            Transition t;
            t.source = src;
            t.target = tgt;
            t.guard.conjuncts = std::move(guard);
            t.update.actions = std::move(update);
            t.update.actions["x"] = reset_clock;
            ts.push_back(std::move(t));
        };

        add("rem", "try", {}, {});
        add("try", "set", {detail::on_var("v", Rel::Eq, Rational(0))}, {});
        add("set", "wait", {}, {{"v", detail::assign_const(id)}});
        add("wait", "try",
            {detail::on_var("v", Rel::Lt, id), detail::on_var("x", Rel::Ge, delta2)}, {});
        add("wait", "try",
            {detail::on_var("v", Rel::Gt, id), detail::on_var("x", Rel::Ge, delta2)}, {});
        add("wait", "testb",
            {detail::on_var("v", Rel::Eq, id), detail::on_var("x", Rel::Ge, delta2)}, {});
        add("testb", "try", {detail::on_var("b1", Rel::Eq, Rational(1))}, {});
        add("testb", "setb", {detail::on_var("b1", Rel::Eq, Rational(0))}, {});
        add("setb", "recheck", {}, {{"b1", detail::assign_const(Rational(1))}});
        add("recheck", "try", {detail::on_var("v", Rel::Lt, id)},
            {{"b1", detail::assign_const(Rational(0))}});
        add("recheck", "try", {detail::on_var("v", Rel::Gt, id)},
            {{"b1", detail::assign_const(Rational(0))}});
        add("recheck", "precs", {detail::on_var("v", Rel::Eq, id)}, {});
        add("precs", "try", {detail::on_var("b2", Rel::Eq, Rational(1))},
            {{"b1", detail::assign_const(Rational(0))}});
        add("precs", "cs", {detail::on_var("b2", Rel::Eq, Rational(0))},
            {{"b2", detail::assign_const(Rational(1))}});
        add("cs", "rem", {},
            {{"v", detail::assign_const(Rational(0))},
             {"b1", detail::assign_const(Rational(0))},
             {"b2", detail::assign_const(Rational(0))}});

        p.transitions = std::move(ts);
        p.init_location = "rem";
        p.init_guard.conjuncts.push_back(detail::on_var("x", Rel::Eq, Rational(0)));
        if (i == 1) {
            p.init_guard.conjuncts.push_back(detail::on_var("v", Rel::Eq, Rational(0)));
            p.init_guard.conjuncts.push_back(detail::on_var("b1", Rel::Eq, Rational(0)));
            p.init_guard.conjuncts.push_back(detail::on_var("b2", Rel::Eq, Rational(0)));
        }

        doc.network->components.push_back(p.name);
        doc.automata.push_back(std::move(p));
    }

    doc.check.emplace();
    BadEntry marker;
    marker.locations = {"cs"};
    doc.check->bad.push_back(std::move(marker));
    return doc;
}

} // namespace qbmc

#endif // QBMC_GENERATORS_HPP
