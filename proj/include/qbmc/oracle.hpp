// ============================================================================
// qbmc/oracle.hpp — exact brute-force bounded-reachability oracle
// ============================================================================
//
// Independent of the encoders and the solver: enumerates every step-kind /
// transition sequence up to length k (breadth-first, trajectory before
// discrete, transitions in declaration order), resolves finite-domain
// variables by exact constant propagation with exhaustive enumeration of
// undetermined initial values, and decides the remaining real constraint
// system with Fourier-Motzkin elimination (strict inequalities preserved,
// all arithmetic rational). SAT verdicts come with a concrete witness found
// by back-substitution. A path budget guards against blowup; exceeding it is
// an explicit refusal, never a verdict.
//
// ============================================================================

#ifndef QBMC_ORACLE_HPP
#define QBMC_ORACLE_HPP

#include "qbmc/ha.hpp"
#include "qbmc/trace.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qbmc {

class OracleBudgetExceeded : public std::runtime_error {
public:
    explicit OracleBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct PathStep {
    bool is_discrete = false;
    std::size_t transition_index = 0;  // discrete
    std::size_t location_index = 0;    // trajectory (the location dwelled in)
};

struct SymbolicPath {
    std::vector<PathStep> steps;
    std::size_t terminal_location = 0;
};

// Every chaining-consistent path of length <= k from the init location,
// breadth-first; within one node trajectory extensions come first, then
// transitions in declaration order.
inline std::vector<SymbolicPath> enumerate_paths(const HybridAutomaton& ha, std::size_t k,
                                                 std::size_t budget = 1'000'000) {
    auto init = ha.location_index(ha.init_location);
    if (!init) throw ModelError("init location missing");

    std::vector<SymbolicPath> out;
    SymbolicPath root;
    root.terminal_location = *init;
    out.push_back(root);

    std::size_t level_begin = 0;
    for (std::size_t len = 0; len < k; ++len) {
        std::size_t level_end = out.size();
        for (std::size_t p = level_begin; p < level_end; ++p) {
            // trajectory first
            {
                SymbolicPath ext = out[p];
                PathStep s;
                s.is_discrete = false;
                s.location_index = ext.terminal_location;
                ext.steps.push_back(s);
                out.push_back(std::move(ext));
                if (out.size() > budget)
                    throw OracleBudgetExceeded("path budget exceeded at length " +
                                               std::to_string(len + 1));
            }
            for (std::size_t ti = 0; ti < ha.transitions.size(); ++ti) {
                const Transition& t = ha.transitions[ti];
                auto src = ha.location_index(t.source);
                if (!src || *src != out[p].terminal_location) continue;
                auto tgt = ha.location_index(t.target);
                SymbolicPath ext = out[p];
                PathStep s;
                s.is_discrete = true;
                s.transition_index = ti;
                ext.steps.push_back(s);
                ext.terminal_location = *tgt;
                out.push_back(std::move(ext));
                if (out.size() > budget)
                    throw OracleBudgetExceeded("path budget exceeded at length " +
                                               std::to_string(len + 1));
            }
        }
        level_begin = level_end;
    }
    return out;
}

// ── linear systems and Fourier-Motzkin ──────────────────────────────────────

struct SysConstraint {
    std::map<int, Rational> terms;  // variable index -> coefficient
    Rel rel = Rel::Le;
    Rational bound;
};

struct LinearSystem {
    std::size_t num_vars = 0;
    std::vector<std::string> names;  // diagnostic only
    std::vector<SysConstraint> constraints;

    void add(std::map<int, Rational> terms, Rel rel, Rational bound) {
        SysConstraint c;
        for (auto& [v, coeff] : terms)
            if (!coeff.is_zero()) c.terms.emplace(v, std::move(coeff));
        c.rel = rel;
        c.bound = std::move(bound);
        constraints.push_back(std::move(c));
    }
};

namespace detail {

// expr = terms . values + constant
struct AffineExpr {
    std::map<int, Rational> terms;
    Rational constant;

    Rational eval(const std::vector<Rational>& values) const {
        Rational r = constant;
        for (const auto& [v, c] : terms) r += c * values[static_cast<std::size_t>(v)];
        return r;
    }
};

struct FmBound {
    AffineExpr expr;
    bool strict = false;
};

struct Elimination {
    int var = -1;
    bool by_equality = false;
    AffineExpr subst;             // by_equality
    std::vector<FmBound> lowers;  // FM: var >= expr
    std::vector<FmBound> uppers;  // FM: var <= expr
};

} // namespace detail

// Decides feasibility over the reals; when `sample` is given and the system
// is feasible, fills it with one solution (indexed by system variable).
inline bool fm_feasible(const LinearSystem& system, std::vector<Rational>* sample = nullptr) {
    // normal form: terms REL bound with REL in {Le, Lt, Eq}
    struct NC {
        std::map<int, Rational> terms;
        Rational bound;
        bool strict = false;
        bool equality = false;
    };
    std::vector<NC> cs;
    for (const auto& c : system.constraints) {
        NC n;
        n.terms = c.terms;
        n.bound = c.bound;
        switch (c.rel) {
            case Rel::Le: break;
            case Rel::Lt: n.strict = true; break;
            case Rel::Eq: n.equality = true; break;
            case Rel::Ge:
            case Rel::Gt:
                for (auto& [v, coeff] : n.terms) coeff = -coeff;
                n.bound = -n.bound;
                n.strict = c.rel == Rel::Gt;
                break;
        }
        if (n.terms.empty()) {
            bool ok = n.equality ? Rational(0) == n.bound
                                 : (n.strict ? Rational(0) < n.bound : Rational(0) <= n.bound);
            if (!ok) return false;
            continue;
        }
        cs.push_back(std::move(n));
    }

    std::vector<detail::Elimination> trail;

    // substitute out variables pinned by equalities
    while (true) {
        int pick = -1;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < cs.size(); ++i)
            if (cs[i].equality && !cs[i].terms.empty()) {
                pick = cs[i].terms.begin()->first;
                idx = i;
                break;
            }
        if (pick == -1) break;
        NC eq = cs[idx];
        cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(idx));
        Rational a = eq.terms[pick];
        detail::AffineExpr subst;
        subst.constant = eq.bound / a;
        for (const auto& [v, coeff] : eq.terms)
            if (v != pick) subst.terms[v] = -(coeff / a);

        for (auto& c : cs) {
            auto it = c.terms.find(pick);
            if (it == c.terms.end()) continue;
            Rational cx = it->second;
            c.terms.erase(it);
            c.bound -= cx * subst.constant;
            for (const auto& [v, coeff] : subst.terms) {
                auto [jt, fresh] = c.terms.emplace(v, cx * coeff);
                if (!fresh) jt->second += cx * coeff;
                if (jt->second.is_zero()) c.terms.erase(jt);
            }
        }
        detail::Elimination e;
        e.var = pick;
        e.by_equality = true;
        e.subst = std::move(subst);
        trail.push_back(std::move(e));

        // constraints reduced to constants get checked immediately
        for (std::size_t i = cs.size(); i-- > 0;) {
            if (!cs[i].terms.empty()) continue;
            bool ok = cs[i].equality
                          ? Rational(0) == cs[i].bound
                          : (cs[i].strict ? Rational(0) < cs[i].bound : Rational(0) <= cs[i].bound);
            if (!ok) return false;
            cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }

    // remaining equalities are gone; eliminate the rest by Fourier-Motzkin
    while (true) {
        int pick = -1;
        for (const auto& c : cs)
            if (!c.terms.empty()) {
                pick = c.terms.begin()->first;
                break;
            }
        if (pick == -1) break;

        detail::Elimination e;
        e.var = pick;
        std::vector<NC> rest;
        for (auto& c : cs) {
            auto it = c.terms.find(pick);
            if (it == c.terms.end()) {
                rest.push_back(std::move(c));
                continue;
            }
            Rational a = it->second;
            detail::AffineExpr expr;
            expr.constant = c.bound / a;
            for (const auto& [v, coeff] : c.terms)
                if (v != pick) expr.terms[v] = -(coeff / a);
            // a*x + rest <= bound: a > 0 gives upper, a < 0 gives lower
            if (a.sign() > 0) e.uppers.push_back(detail::FmBound{std::move(expr), c.strict});
            else e.lowers.push_back(detail::FmBound{std::move(expr), c.strict});
        }
        // combine lower <= x <= upper: lo.terms - up.terms <= up.c - lo.c
        for (const auto& lo : e.lowers)
            for (const auto& up : e.uppers) {
                NC n;
                n.strict = lo.strict || up.strict;
                n.bound = up.expr.constant - lo.expr.constant;
                n.terms = lo.expr.terms;
                for (const auto& [v, coeff] : up.expr.terms) {
                    auto [jt, fresh] = n.terms.emplace(v, -coeff);
                    if (!fresh) jt->second -= coeff;
                    if (jt->second.is_zero()) n.terms.erase(jt);
                }
                if (n.terms.empty()) {
                    bool ok = n.strict ? Rational(0) < n.bound : Rational(0) <= n.bound;
                    if (!ok) return false;
                    continue;
                }
                rest.push_back(std::move(n));
            }
        cs = std::move(rest);
        trail.push_back(std::move(e));
    }

    if (!sample) return true;

    // back-substitution, reverse elimination order
    sample->assign(system.num_vars, Rational(0));
    for (std::size_t i = trail.size(); i-- > 0;) {
        const detail::Elimination& e = trail[i];
        if (e.by_equality) {
            (*sample)[static_cast<std::size_t>(e.var)] = e.subst.eval(*sample);
            continue;
        }
        std::optional<Rational> lo, hi;
        for (const auto& b : e.lowers) {
            Rational v = b.expr.eval(*sample);
            if (!lo || v > *lo) lo = v;
        }
        for (const auto& b : e.uppers) {
            Rational v = b.expr.eval(*sample);
            if (!hi || v < *hi) hi = v;
        }
        // an equal pair can only be non-strict here (a strict lo == hi pair
        // would have failed the combined constraint), so lo itself works;
        // otherwise the midpoint / one-off choices satisfy any strictness
        Rational value;
        if (lo && hi) value = *lo == *hi ? *lo : (*lo + *hi) / Rational(2);
        else if (lo) value = *lo + Rational(1);
        else if (hi) value = *hi - Rational(1);
        (*sample)[static_cast<std::size_t>(e.var)] = value;
    }
    return true;
}

// ── path lowering ───────────────────────────────────────────────────────────

namespace detail {

struct PathVars {
    std::map<std::string, std::vector<int>> frames;  // real var -> index per frame
    std::vector<int> dwell;                          // per step

    int var_at(const std::string& name, std::size_t frame) const {
        return frames.at(name)[frame];
    }
};

inline PathVars allocate_path_vars(const HybridAutomaton& ha, std::size_t len,
                                   LinearSystem& sys) {
    PathVars pv;
    for (const auto& v : ha.vars) {
        if (v.kind != VarKind::Real) continue;
        auto& idx = pv.frames[v.name];
        for (std::size_t i = 0; i <= len; ++i) {
            idx.push_back(static_cast<int>(sys.num_vars++));
            sys.names.push_back(v.name + "_" + std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < len; ++i) {
        pv.dwell.push_back(static_cast<int>(sys.num_vars++));
        sys.names.push_back("delta_" + std::to_string(i));
    }
    return pv;
}

inline bool constraint_is_real(const HybridAutomaton& ha, const LinearConstraint& c) {
    for (const auto& [name, coeff] : c.terms) {
        (void)coeff;
        const VarDecl* vd = ha.find_var(name);
        if (vd && vd->kind == VarKind::FiniteInt) return false;
    }
    return true;
}

inline void add_guard_real(const HybridAutomaton& ha, const Guard& g, const PathVars& pv,
                           std::size_t frame, LinearSystem& sys) {
    for (const auto& c : g.conjuncts) {
        if (!constraint_is_real(ha, c)) continue;
        std::map<int, Rational> terms;
        for (const auto& [name, coeff] : c.terms) terms[pv.var_at(name, frame)] = coeff;
        sys.add(std::move(terms), c.rel, c.bound);
    }
}

} // namespace detail

// The real-arithmetic constraint system of one path against one bad entry;
// finite-domain conjuncts are handled separately by constant propagation.
inline LinearSystem path_to_system(const HybridAutomaton& ha, const SymbolicPath& path,
                                   const BadEntry& bad) {
    LinearSystem sys;
    const std::size_t len = path.steps.size();
    detail::PathVars pv = detail::allocate_path_vars(ha, len, sys);

    auto init_idx = ha.location_index(ha.init_location);
    detail::add_guard_real(ha, ha.init_guard, pv, 0, sys);
    detail::add_guard_real(ha, ha.locations[*init_idx].invariant, pv, 0, sys);

    std::size_t loc = *init_idx;
    for (std::size_t i = 0; i < len; ++i) {
        const PathStep& step = path.steps[i];
        if (step.is_discrete) {
            const Transition& t = ha.transitions[step.transition_index];
            auto tgt = ha.location_index(t.target);
            detail::add_guard_real(ha, ha.locations[loc].invariant, pv, i, sys);
            detail::add_guard_real(ha, t.guard, pv, i, sys);
            for (const auto& v : ha.vars) {
                if (v.kind != VarKind::Real) continue;
                const UpdateAction* act = t.update.find(v.name);
                int cur = pv.var_at(v.name, i);
                int nxt = pv.var_at(v.name, i + 1);
                if (!act || act->kind == UpdateAction::Identity) {
                    sys.add({{nxt, Rational(1)}, {cur, Rational(-1)}}, Rel::Eq, Rational(0));
                } else if (act->kind == UpdateAction::AssignConst) {
                    sys.add({{nxt, Rational(1)}}, Rel::Eq, act->value);
                } else if (act->kind == UpdateAction::AssignInterval) {
                    sys.add({{nxt, Rational(1)}}, Rel::Ge, act->lo);
                    sys.add({{nxt, Rational(1)}}, Rel::Le, act->hi);
                } else if (act->kind == UpdateAction::AssignVar) {
                    sys.add({{nxt, Rational(1)}, {pv.var_at(act->var, i), Rational(-1)}},
                            Rel::Eq, Rational(0));
                }
            }
            detail::add_guard_real(ha, ha.locations[*tgt].invariant, pv, i + 1, sys);
            loc = *tgt;
        } else {
            const Location& l = ha.locations[step.location_index];
            sys.add({{pv.dwell[i], Rational(1)}}, Rel::Ge, Rational(0));
            for (const auto& v : ha.vars) {
                if (v.kind != VarKind::Real) continue;
                const FlowInterval& f = l.flow.at(v.name);
                int cur = pv.var_at(v.name, i);
                int nxt = pv.var_at(v.name, i + 1);
                sys.add({{nxt, Rational(1)}, {cur, Rational(-1)}, {pv.dwell[i], -f.lo}},
                        Rel::Ge, Rational(0));
                sys.add({{nxt, Rational(1)}, {cur, Rational(-1)}, {pv.dwell[i], -f.hi}},
                        Rel::Le, Rational(0));
            }
            detail::add_guard_real(ha, l.invariant, pv, i, sys);
            detail::add_guard_real(ha, l.invariant, pv, i + 1, sys);
        }
    }
    detail::add_guard_real(ha, bad.guard, pv, len, sys);
    return sys;
}

// ── finite-variable propagation ─────────────────────────────────────────────

namespace detail {

inline bool finite_constraint_holds(const LinearConstraint& c,
                                    const std::map<std::string, Rational>& finite_vals,
                                    bool* relevant) {
    for (const auto& [name, coeff] : c.terms) {
        (void)coeff;
        auto it = finite_vals.find(name);
        if (it == finite_vals.end()) return true;  // real constraint
        *relevant = true;
        Rational lhs = it->second;
        switch (c.rel) {
            case Rel::Lt: return lhs < c.bound;
            case Rel::Le: return lhs <= c.bound;
            case Rel::Eq: return lhs == c.bound;
            case Rel::Ge: return lhs >= c.bound;
            case Rel::Gt: return lhs > c.bound;
        }
    }
    return true;
}

inline bool finite_guard_holds(const Guard& g, const std::map<std::string, Rational>& vals) {
    for (const auto& c : g.conjuncts) {
        bool relevant = false;
        if (!finite_constraint_holds(c, vals, &relevant)) return false;
    }
    return true;
}

// propagates one joint initial valuation down the path; returns per-frame
// values, or nothing if some finite guard fails
inline std::optional<std::vector<std::map<std::string, Rational>>> propagate_finite(
    const HybridAutomaton& ha, const SymbolicPath& path,
    const std::map<std::string, Rational>& initial, const BadEntry& bad) {
    std::vector<std::map<std::string, Rational>> frames;
    frames.push_back(initial);
    std::size_t loc = *ha.location_index(ha.init_location);
    if (!finite_guard_holds(ha.init_guard, frames[0])) return std::nullopt;
    if (!finite_guard_holds(ha.locations[loc].invariant, frames[0])) return std::nullopt;

    for (const auto& step : path.steps) {
        const auto& cur = frames.back();
        if (step.is_discrete) {
            const Transition& t = ha.transitions[step.transition_index];
            if (!finite_guard_holds(ha.locations[loc].invariant, cur)) return std::nullopt;
            if (!finite_guard_holds(t.guard, cur)) return std::nullopt;
            std::map<std::string, Rational> nxt = cur;
            for (const auto& [name, act] : t.update.actions) {
                const VarDecl* vd = ha.find_var(name);
                if (!vd || vd->kind != VarKind::FiniteInt) continue;
                if (act.kind == UpdateAction::AssignConst) nxt[name] = act.value;
                else if (act.kind == UpdateAction::AssignVar) nxt[name] = cur.at(act.var);
            }
            loc = *ha.location_index(t.target);
            if (!finite_guard_holds(ha.locations[loc].invariant, nxt)) return std::nullopt;
            frames.push_back(std::move(nxt));
        } else {
            if (!finite_guard_holds(ha.locations[step.location_index].invariant, cur))
                return std::nullopt;
            frames.push_back(cur);
        }
    }
    if (!finite_guard_holds(bad.guard, frames.back())) return std::nullopt;
    return frames;
}

} // namespace detail

// ── the oracle ──────────────────────────────────────────────────────────────

struct OracleOutcome {
    enum Kind { Sat, Unsat, Refused };
    Kind kind = Unsat;
    std::optional<Trace> witness;
    std::optional<SymbolicPath> witness_path;
    std::string refusal;
    std::size_t paths_explored = 0;
};

inline OracleOutcome oracle_check(const HybridAutomaton& ha, std::size_t k,
                                  std::size_t path_budget = 1'000'000) {
    OracleOutcome outcome;
    std::vector<SymbolicPath> paths;
    try {
        paths = enumerate_paths(ha, k, path_budget);
    } catch (const OracleBudgetExceeded& e) {
        outcome.kind = OracleOutcome::Refused;
        outcome.refusal = e.what();
        return outcome;
    }
    outcome.paths_explored = paths.size();

    // joint domains of finite variables not pinned by the init constraint
    std::vector<const VarDecl*> finite;
    for (const auto& v : ha.vars)
        if (v.kind == VarKind::FiniteInt) finite.push_back(&v);
    std::size_t combinations = 1;
    for (const VarDecl* v : finite) {
        combinations *= static_cast<std::size_t>(v->hi - v->lo + 1);
        if (combinations > 65536) {
            outcome.kind = OracleOutcome::Refused;
            outcome.refusal = "finite-domain enumeration too large";
            return outcome;
        }
    }

    for (const auto& path : paths) {
        for (const auto& bad : ha.bad) {
            bool terminal_bad = false;
            for (const auto& ln : bad.locations)
                terminal_bad =
                    terminal_bad || ln == ha.locations[path.terminal_location].name;
            if (!terminal_bad) continue;

            // try every surviving finite valuation (first in domain order)
            std::optional<std::vector<std::map<std::string, Rational>>> finite_frames;
            for (std::size_t combo = 0; combo < combinations && !finite_frames; ++combo) {
                std::map<std::string, Rational> initial;
                std::size_t rest = combo;
                for (const VarDecl* v : finite) {
                    std::size_t size = static_cast<std::size_t>(v->hi - v->lo + 1);
                    initial[v->name] = Rational(v->lo + static_cast<long long>(rest % size));
                    rest /= size;
                }
                finite_frames = detail::propagate_finite(ha, path, initial, bad);
            }
            if (!finite_frames) continue;

            LinearSystem sys = path_to_system(ha, path, bad);
            std::vector<Rational> sample;
            if (!fm_feasible(sys, &sample)) continue;

            // build the witness trace
            Trace trace;
            trace.encoding = "oracle";
            trace.k = path.steps.size();
            detail::PathVars pv;
            {
                LinearSystem dummy;
                pv = detail::allocate_path_vars(ha, path.steps.size(), dummy);
            }
            auto state_at = [&](std::size_t frame, std::size_t loc_index) {
                State s;
                s.location = ha.locations[loc_index].name;
                for (const auto& v : ha.vars) {
                    if (v.kind == VarKind::Real)
                        s.valuation[v.name] =
                            sample[static_cast<std::size_t>(pv.var_at(v.name, frame))];
                    else
                        s.valuation[v.name] = (*finite_frames)[frame].at(v.name);
                }
                return s;
            };
            std::size_t loc = *ha.location_index(ha.init_location);
            trace.initial = state_at(0, loc);
            for (std::size_t i = 0; i < path.steps.size(); ++i) {
                TraceStep step;
                step.pre = state_at(i, loc);
                if (path.steps[i].is_discrete) {
                    const Transition& t = ha.transitions[path.steps[i].transition_index];
                    loc = *ha.location_index(t.target);
                    step.kind = TraceStep::Discrete;
                    step.transition_index = path.steps[i].transition_index;
                } else {
                    step.kind = TraceStep::Trajectory;
                    step.dwell = sample[static_cast<std::size_t>(pv.dwell[i])];
                }
                step.post = state_at(i + 1, loc);
                if (step.kind == TraceStep::Trajectory && step.dwell.is_zero() &&
                    step.pre == step.post)
                    step.kind = TraceStep::Stutter;
                trace.steps.push_back(std::move(step));
            }
            outcome.kind = OracleOutcome::Sat;
            outcome.witness = std::move(trace);
            outcome.witness_path = path;
            return outcome;
        }
    }
    outcome.kind = OracleOutcome::Unsat;
    return outcome;
}

} // namespace qbmc

#endif // QBMC_ORACLE_HPP
