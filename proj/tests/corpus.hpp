// Shared test corpus: seeded random rectangular automata small enough for
// the exact oracle (<= 3 locations, <= 2 real variables, <= 1 finite
// variable), always structurally valid. Used by the agreement suite and the
// acceptance criteria.

#ifndef QBMC_TESTS_CORPUS_HPP
#define QBMC_TESTS_CORPUS_HPP

#include "qbmc/ha.hpp"

#include <random>
#include <string>
#include <vector>

namespace qbmc_tests {

inline qbmc::Rational small_rat(std::mt19937_64& rng, long long lo, long long hi) {
    std::uniform_int_distribution<long long> num(lo, hi);
    std::uniform_int_distribution<int> den(1, 2);
    return qbmc::Rational(qbmc::BigInt(num(rng)), qbmc::BigInt(den(rng)));
}

inline qbmc::HybridAutomaton random_automaton(std::uint64_t seed) {
    using namespace qbmc;
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    HybridAutomaton ha;
    ha.name = "rand" + std::to_string(seed);

    int num_reals = pick(1, 2);
    for (int i = 0; i < num_reals; ++i)
        ha.vars.push_back(VarDecl{"x" + std::to_string(i), VarKind::Real, 0, 0, VarScope::Local});
    bool has_finite = pick(0, 1) == 1;
    if (has_finite) {
        long long hi = pick(1, 3);
        ha.vars.push_back(VarDecl{"m", VarKind::FiniteInt, 0, hi, VarScope::Local});
    }

    int num_locs = pick(1, 3);
    for (int l = 0; l < num_locs; ++l) {
        Location loc;
        loc.name = "q" + std::to_string(l);
        for (const auto& v : ha.vars) {
            if (v.kind != VarKind::Real) continue;
            Rational a = small_rat(rng, -2, 2);
            Rational b = a + small_rat(rng, 0, 2);
            loc.flow[v.name] = FlowInterval{a, b};
        }
        // occasional upper-bound invariant on one real variable
        if (pick(0, 2) == 0) {
            const auto& v = ha.vars[static_cast<std::size_t>(pick(0, num_reals - 1))];
            loc.invariant.conjuncts.push_back(
                LinearConstraint::single(v.name, Rel::Le, small_rat(rng, 2, 8)));
        }
        ha.locations.push_back(std::move(loc));
    }

    int num_trans = pick(1, 4);
    for (int t = 0; t < num_trans; ++t) {
        Transition tr;
        tr.source = ha.locations[static_cast<std::size_t>(pick(0, num_locs - 1))].name;
        tr.target = ha.locations[static_cast<std::size_t>(pick(0, num_locs - 1))].name;
        if (pick(0, 1) == 0) {
            const auto& v = ha.vars[static_cast<std::size_t>(pick(0, num_reals - 1))];
            Rel rel = pick(0, 1) == 0 ? Rel::Ge : Rel::Le;
            tr.guard.conjuncts.push_back(
                LinearConstraint::single(v.name, rel, small_rat(rng, 0, 6)));
        }
        if (has_finite && pick(0, 2) == 0) {
            const VarDecl* m = ha.find_var("m");
            tr.guard.conjuncts.push_back(LinearConstraint::single(
                "m", Rel::Eq, Rational(static_cast<long long>(pick(0, static_cast<int>(m->hi))))));
        }
        int upd = pick(0, 3);
        if (upd == 0) {
            const auto& v = ha.vars[static_cast<std::size_t>(pick(0, num_reals - 1))];
            UpdateAction a;
            a.kind = UpdateAction::AssignConst;
            a.value = small_rat(rng, 0, 3);
            tr.update.actions[v.name] = a;
        } else if (upd == 1) {
            const auto& v = ha.vars[static_cast<std::size_t>(pick(0, num_reals - 1))];
            UpdateAction a;
            a.kind = UpdateAction::AssignInterval;
            a.lo = small_rat(rng, 0, 2);
            a.hi = a.lo + small_rat(rng, 0, 2);
            tr.update.actions[v.name] = a;
        } else if (upd == 2 && has_finite) {
            const VarDecl* m = ha.find_var("m");
            UpdateAction a;
            a.kind = UpdateAction::AssignConst;
            a.value = Rational(static_cast<long long>(pick(0, static_cast<int>(m->hi))));
            tr.update.actions["m"] = a;
        }
        ha.transitions.push_back(std::move(tr));
    }

    ha.init_location = ha.locations[0].name;
    for (const auto& v : ha.vars) {
        if (v.kind == VarKind::Real)
            ha.init_guard.conjuncts.push_back(
                LinearConstraint::single(v.name, Rel::Eq, small_rat(rng, 0, 2)));
        else if (pick(0, 1) == 0)
            ha.init_guard.conjuncts.push_back(LinearConstraint::single(
                v.name, Rel::Eq, Rational(static_cast<long long>(pick(0, static_cast<int>(v.hi))))));
    }

    BadEntry bad;
    bad.locations = {ha.locations[static_cast<std::size_t>(pick(0, num_locs - 1))].name};
    {
        const auto& v = ha.vars[static_cast<std::size_t>(pick(0, num_reals - 1))];
        Rel rel = pick(0, 1) == 0 ? Rel::Ge : Rel::Gt;
        bad.guard.conjuncts.push_back(LinearConstraint::single(v.name, rel, small_rat(rng, 1, 8)));
    }
    ha.bad.push_back(std::move(bad));
    return ha;
}

// a corpus of validated automata (seeds that fail validation are skipped,
// which does not happen for this generator but keeps the invariant explicit)
inline std::vector<qbmc::HybridAutomaton> corpus(std::size_t count, std::uint64_t base_seed) {
    std::vector<qbmc::HybridAutomaton> out;
    std::uint64_t seed = base_seed;
    while (out.size() < count) {
        qbmc::HybridAutomaton ha = random_automaton(seed++);
        if (qbmc::validate_automaton(ha).ok()) out.push_back(std::move(ha));
    }
    return out;
}

} // namespace qbmc_tests

#endif // QBMC_TESTS_CORPUS_HPP
