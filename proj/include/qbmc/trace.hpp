// ============================================================================
// qbmc/trace.hpp — decoding solver models into executions, re-validation
// ============================================================================
//
// decode_trace inverts the frame naming scheme (loc_i, x_i, delta_i) into a
// sequence of states and steps; classification is Discrete-first when a step
// matches both a transition relation and a zero-dwell trajectory.
// validate_trace re-checks every step against the automaton semantics with
// exact arithmetic, independently of any encoder or solver: guards and
// update relations for discrete steps, interval flow inclusions with
// endpoint (optionally midpoint) invariant checks for trajectories.
//
// ============================================================================

#ifndef QBMC_TRACE_HPP
#define QBMC_TRACE_HPP

#include "qbmc/encoder.hpp"
#include "qbmc/ha.hpp"
#include "qbmc/smtlib.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace qbmc {

struct State {
    std::string location;
    std::map<std::string, Rational> valuation;

    friend bool operator==(const State&, const State&) = default;
};

struct TraceStep {
    enum Kind { Discrete, Trajectory, Stutter };
    Kind kind = Trajectory;
    std::size_t transition_index = 0;  // Discrete only
    Rational dwell;                    // Trajectory / Stutter
    State pre;
    State post;
};

struct Trace {
    State initial;
    std::vector<TraceStep> steps;
    std::string encoding;  // "qf" | "quantified"
    std::size_t k = 0;
};

struct TraceValidation {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

namespace detail {

inline Rational value_as_rational(const Value& v, const VarDecl& decl) {
    if (decl.kind == VarKind::Real) {
        if (v.kind != Value::VRat) throw ModelError("expected rational for " + decl.name);
        return v.rat;
    }
    if (v.kind != Value::VBv) throw ModelError("expected bit-vector for " + decl.name);
    return Rational(static_cast<long long>(v.bv) + decl.lo);
}

inline const Value& require(const Assignment& a, const std::string& name) {
    auto it = a.find(name);
    if (it == a.end()) throw ModelError("model misses symbol " + name);
    return it->second;
}

inline bool update_holds(const HybridAutomaton& ha, const Transition& t, const State& pre,
                         const State& post) {
    for (const auto& v : ha.vars) {
        const Rational& before = pre.valuation.at(v.name);
        const Rational& after = post.valuation.at(v.name);
        const UpdateAction* act = t.update.find(v.name);
        if (!act || act->kind == UpdateAction::Identity) {
            if (!(after == before)) return false;
            continue;
        }
        switch (act->kind) {
            case UpdateAction::AssignConst:
                if (!(after == act->value)) return false;
                break;
            case UpdateAction::AssignInterval:
                if (after < act->lo || act->hi < after) return false;
                break;
            case UpdateAction::AssignVar:
                if (!(after == pre.valuation.at(act->var))) return false;
                break;
            case UpdateAction::Identity:
                break;
        }
    }
    return true;
}

} // namespace detail

inline State decode_state(const Assignment& a, const HybridAutomaton& ha, std::size_t i) {
    State s;
    const Value& loc = detail::require(a, "loc_" + std::to_string(i));
    if (loc.kind != Value::VBv) throw ModelError("location symbol has a non-bit-vector value");
    if (loc.bv >= ha.locations.size())
        throw ModelError("location code " + std::to_string(loc.bv) + " out of range");
    s.location = ha.locations[static_cast<std::size_t>(loc.bv)].name;
    for (const auto& v : ha.vars) {
        const Value& val = detail::require(a, v.name + "_" + std::to_string(i));
        s.valuation[v.name] = detail::value_as_rational(val, v);
    }
    return s;
}

inline Trace decode_trace(const Assignment& a, const HybridAutomaton& ha, std::size_t k,
                          const std::string& encoding_kind) {
    Trace trace;
    trace.encoding = encoding_kind;
    trace.k = k;
    std::vector<State> states;
    for (std::size_t i = 0; i <= k; ++i) states.push_back(decode_state(a, ha, i));
    trace.initial = states[0];

    for (std::size_t i = 0; i < k; ++i) {
        TraceStep step;
        step.pre = states[i];
        step.post = states[i + 1];

        bool discrete = false;
        for (std::size_t ti = 0; ti < ha.transitions.size(); ++ti) {
            const Transition& t = ha.transitions[ti];
            if (t.source != step.pre.location || t.target != step.post.location) continue;
            if (!t.guard.holds(step.pre.valuation)) continue;
            if (!detail::update_holds(ha, t, step.pre, step.post)) continue;
            step.kind = TraceStep::Discrete;
            step.transition_index = ti;
            discrete = true;
            break;
        }
        if (!discrete) {
            auto it = a.find("delta_" + std::to_string(i));
            if (it == a.end()) it = a.find("delta");
            if (it == a.end()) throw ModelError("model misses dwell symbol for step " +
                                                std::to_string(i));
            if (it->second.kind != Value::VRat) throw ModelError("dwell has a non-rational value");
            step.dwell = it->second.rat;
            step.kind = (step.dwell.is_zero() && step.pre == step.post) ? TraceStep::Stutter
                                                                        : TraceStep::Trajectory;
        }
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

struct ValidateOptions {
    bool midpoint_check = false;  // sample the trajectory midpoint as well
};

inline TraceValidation validate_trace(const HybridAutomaton& ha, const Trace& trace,
                                      const ValidateOptions& opts = {}) {
    TraceValidation result;
    auto& out = result.violations;

    const State* first = trace.steps.empty() ? &trace.initial : &trace.steps.front().pre;
    if (first->location != ha.init_location)
        out.push_back("initial state is not in the init location");
    else if (!ha.init_guard.holds(first->valuation))
        out.push_back("initial state violates the init constraint");

    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep& s = trace.steps[i];
        const std::string at = "step " + std::to_string(i);
        if (i + 1 < trace.steps.size() && !(s.post == trace.steps[i + 1].pre))
            out.push_back(at + ": post state does not chain to the next pre state");

        if (s.kind == TraceStep::Discrete) {
            if (s.transition_index >= ha.transitions.size()) {
                out.push_back(at + ": transition index out of range");
                continue;
            }
            const Transition& t = ha.transitions[s.transition_index];
            if (t.source != s.pre.location) out.push_back(at + ": source location mismatch");
            if (t.target != s.post.location) out.push_back(at + ": target location mismatch");
            if (!t.guard.holds(s.pre.valuation)) out.push_back(at + ": guard violated");
            if (!detail::update_holds(ha, t, s.pre, s.post))
                out.push_back(at + ": update relation violated");
            const Location* src = ha.find_location(t.source);
            const Location* tgt = ha.find_location(t.target);
            if (src && !src->invariant.holds(s.pre.valuation))
                out.push_back(at + ": source invariant violated");
            if (tgt && !tgt->invariant.holds(s.post.valuation))
                out.push_back(at + ": target invariant violated");
        } else {
            if (s.pre.location != s.post.location)
                out.push_back(at + ": trajectory changes location");
            if (s.dwell.is_negative()) out.push_back(at + ": negative dwell");
            if (s.kind == TraceStep::Stutter &&
                (!s.dwell.is_zero() || !(s.pre == s.post)))
                out.push_back(at + ": stutter with time elapse or state change");
            const Location* loc = ha.find_location(s.pre.location);
            if (!loc) {
                out.push_back(at + ": unknown location");
                continue;
            }
            for (const auto& v : ha.vars) {
                const Rational& before = s.pre.valuation.at(v.name);
                const Rational& after = s.post.valuation.at(v.name);
                if (v.kind == VarKind::FiniteInt) {
                    if (!(before == after))
                        out.push_back(at + ": finite variable " + v.name + " drifts");
                    continue;
                }
                auto it = loc->flow.find(v.name);
                if (it == loc->flow.end()) {
                    out.push_back(at + ": no flow for " + v.name);
                    continue;
                }
                if (after - before < it->second.lo * s.dwell ||
                    it->second.hi * s.dwell < after - before)
                    out.push_back(at + ": flow inclusion violated for " + v.name);
            }
            if (!loc->invariant.holds(s.pre.valuation))
                out.push_back(at + ": invariant violated at trajectory start");
            if (!loc->invariant.holds(s.post.valuation))
                out.push_back(at + ": invariant violated at trajectory end");
            if (opts.midpoint_check) {
                std::map<std::string, Rational> mid;
                Rational half = Rational::from_int(1, 2);
                for (const auto& [name, val] : s.pre.valuation)
                    mid[name] = (val + s.post.valuation.at(name)) * half;
                if (!loc->invariant.holds(mid))
                    out.push_back(at + ": invariant violated at trajectory midpoint");
            }
        }
    }
    return result;
}

// bad-set membership (used to confirm a counterexample actually ends badly)
inline bool state_in_bad(const HybridAutomaton& ha, const State& s) {
    for (const auto& b : ha.bad) {
        bool loc_match = false;
        for (const auto& ln : b.locations) loc_match = loc_match || ln == s.location;
        if (loc_match && b.guard.holds(s.valuation)) return true;
    }
    return false;
}

inline bool trace_hits_bad(const HybridAutomaton& ha, const Trace& trace) {
    if (state_in_bad(ha, trace.initial)) return true;
    for (const auto& s : trace.steps)
        if (state_in_bad(ha, s.post)) return true;
    return false;
}

// ── printing ────────────────────────────────────────────────────────────────

inline std::string format_state(const State& s) {
    std::string out = s.location + " {";
    bool first = true;
    for (const auto& [name, val] : s.valuation) {
        if (!first) out += ", ";
        out += name + "=" + val.to_string();
        first = false;
    }
    return out + "}";
}

inline std::string format_trace(const Trace& trace) {
    std::ostringstream os;
    if (trace.steps.empty()) {
        os << "0: " << format_state(trace.initial) << " (no steps)\n";
        return os.str();
    }
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const TraceStep& s = trace.steps[i];
        os << i << ": " << format_state(s.pre);
        switch (s.kind) {
            case TraceStep::Discrete: os << " --D[" << s.transition_index << "]--> "; break;
            case TraceStep::Trajectory: os << " --T[" << s.dwell.to_string() << "]--> "; break;
            case TraceStep::Stutter: os << " --stutter--> "; break;
        }
        os << format_state(s.post) << "\n";
    }
    return os.str();
}

} // namespace qbmc

#endif // QBMC_TRACE_HPP
