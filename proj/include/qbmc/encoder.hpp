// ============================================================================
// qbmc/encoder.hpp — BMC encodings for rectangular hybrid automata
// ============================================================================
//
// Two encodings of bounded reachability for a composed automaton:
//
//   encode_qf_bmc   classic unrolling  I(V0) /\ AND_i (D_i \/ T_i) /\ OR_i P(V_i)
//                   with k instantiations of the transition relation,
//   encode_qbmc     quantified form with a single transition-relation copy
//                   multiplexed over steps by a universally quantified
//                   bit-vector selector, the per-step frames bound to the
//                   shared copy through selector-guarded frame equalities.
//
// Locations and finite-domain variables are unsigned bit-vectors (offset
// encoding, range-constrained when the domain is not a power of two); real
// variables and dwell times are Real symbols named x_i / delta_i per step.
//
// ============================================================================

#ifndef QBMC_ENCODER_HPP
#define QBMC_ENCODER_HPP

#include "qbmc/formula.hpp"
#include "qbmc/ha.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qbmc {

// smallest w >= 1 with 2^w >= n
inline unsigned bit_width_for(std::size_t n) {
    unsigned w = 1;
    while ((std::uint64_t{1} << w) < n) ++w;
    return w;
}

enum class DeltaMode { PerStep, Shared };
enum class SelectorMode { BinaryEquality, MergedCubes };

struct EncodingOptions {
    DeltaMode delta_mode = DeltaMode::PerStep;
    SelectorMode selector_mode = SelectorMode::BinaryEquality;
    bool include_target_invariant_on_discrete = true;
    bool out_of_range_guard = true;
};

// Renamed variable set V_i for one BMC step: the location selector, one
// symbol per declared variable and the step's dwell time.
struct StepFrame {
    std::string loc;
    std::map<std::string, std::string> vars;  // declared name -> symbol
    std::string dwell;                        // empty for the final frame

    const std::string& symbol(const std::string& var) const {
        auto it = vars.find(var);
        if (it == vars.end()) throw EncodingError("frame has no symbol for " + var);
        return it->second;
    }
};

namespace detail {

inline unsigned loc_width(const HybridAutomaton& ha) { return bit_width_for(ha.locations.size()); }

inline unsigned finite_width(const VarDecl& v) {
    return bit_width_for(static_cast<std::size_t>(v.hi - v.lo + 1));
}

inline StepFrame make_frame(const HybridAutomaton& ha, const std::string& tag, bool with_dwell) {
    StepFrame f;
    f.loc = "loc_" + tag;
    for (const auto& v : ha.vars) f.vars[v.name] = v.name + "_" + tag;
    if (with_dwell) f.dwell = "delta_" + tag;
    return f;
}

inline void declare_frame(Script& s, const HybridAutomaton& ha, const StepFrame& f) {
    s.declare(f.loc, Sort::bitvec(loc_width(ha)));
    for (const auto& v : ha.vars) {
        Sort sort = v.kind == VarKind::Real ? Sort::real() : Sort::bitvec(finite_width(v));
        s.declare(f.symbol(v.name), sort);
    }
}

inline Formula loc_is(const HybridAutomaton& ha, const StepFrame& f, std::size_t code) {
    return f_eq(f_var(f.loc, Sort::bitvec(loc_width(ha))), f_bv(code, loc_width(ha)));
}

inline Formula finite_var(const VarDecl& v, const StepFrame& f) {
    return f_var(f.symbol(v.name), Sort::bitvec(finite_width(v)));
}

// A single linear constraint over a frame. Real constraints become linear
// atoms; finite-variable constraints (single-variable by validation) become
// bit-vector comparisons against the offset-adjusted literal, folding to a
// constant when the literal falls outside the representable range.
inline Formula constraint_formula(const HybridAutomaton& ha, const LinearConstraint& c,
                                  const StepFrame& f) {
    const VarDecl* finite = nullptr;
    for (const auto& [name, coeff] : c.terms) {
        (void)coeff;
        const VarDecl* vd = ha.find_var(name);
        if (vd && vd->kind == VarKind::FiniteInt) finite = vd;
    }
    if (!finite) {
        std::vector<LinTerm> terms;
        for (const auto& [name, coeff] : c.terms) terms.push_back(LinTerm{coeff, f.symbol(name)});
        return f_linatom(terms, c.rel, c.bound);
    }
    // v REL bound  <=>  (v - lo) REL (bound - lo) over the unsigned encoding
    unsigned w = finite_width(*finite);
    if (!c.bound.is_integer()) throw EncodingError("finite variable compared to non-integer");
    BigInt shifted = c.bound.num() - BigInt(finite->lo);
    BigInt top = BigInt((std::int64_t{1} << w) - 1);
    if (shifted < BigInt(0)) {
        switch (c.rel) {
            case Rel::Ge: case Rel::Gt: return f_true();
            default: return f_false();
        }
    }
    if (shifted > top) {
        switch (c.rel) {
            case Rel::Lt: case Rel::Le: return f_true();
            default: return f_false();
        }
    }
    Formula lhs = finite_var(*finite, f);
    Formula rhs = f_bv(static_cast<std::uint64_t>(shifted.to_int64()), w);
    switch (c.rel) {
        case Rel::Lt: return f_bvcomp(BvOp::Ult, lhs, rhs);
        case Rel::Le: return f_bvcomp(BvOp::Ule, lhs, rhs);
        case Rel::Eq: return f_eq(lhs, rhs);
        case Rel::Ge: return f_bvcomp(BvOp::Uge, lhs, rhs);
        case Rel::Gt: return f_bvcomp(BvOp::Ugt, lhs, rhs);
    }
    throw EncodingError("unknown relation");
}

inline void append_guard(const HybridAutomaton& ha, const Guard& g, const StepFrame& f,
                         std::vector<Formula>& out) {
    for (const auto& c : g.conjuncts) out.push_back(constraint_formula(ha, c, f));
}

// range constraints for a frame when |Loc| or a finite domain is not a power
// of two; empty when every value is representable
inline std::vector<Formula> frame_range_constraints(const HybridAutomaton& ha, const StepFrame& f) {
    std::vector<Formula> out;
    unsigned lw = loc_width(ha);
    if ((std::uint64_t{1} << lw) > ha.locations.size())
        out.push_back(f_bvcomp(BvOp::Ult, f_var(f.loc, Sort::bitvec(lw)),
                               f_bv(ha.locations.size(), lw)));
    for (const auto& v : ha.vars) {
        if (v.kind != VarKind::FiniteInt) continue;
        unsigned w = finite_width(v);
        std::uint64_t size = static_cast<std::uint64_t>(v.hi - v.lo + 1);
        if ((std::uint64_t{1} << w) > size)
            out.push_back(f_bvcomp(BvOp::Ule, finite_var(v, f), f_bv(size - 1, w)));
    }
    return out;
}

inline Formula var_symbol(const VarDecl& v, const StepFrame& f) {
    if (v.kind == VarKind::Real) return f_var(f.symbol(v.name), Sort::real());
    return finite_var(v, f);
}

inline void append_update(const HybridAutomaton& ha, const UpdateMap& u, const StepFrame& cur,
                          const StepFrame& nxt, std::vector<Formula>& out) {
    for (const auto& v : ha.vars) {
        const UpdateAction* act = u.find(v.name);
        Formula next = var_symbol(v, nxt);
        if (!act || act->kind == UpdateAction::Identity) {
            out.push_back(f_eq(next, var_symbol(v, cur)));
            continue;
        }
        switch (act->kind) {
            case UpdateAction::AssignConst:
                if (v.kind == VarKind::Real) {
                    out.push_back(f_eq(next, f_rat(act->value)));
                } else {
                    BigInt shifted = act->value.num() - BigInt(v.lo);
                    out.push_back(f_eq(next, f_bv(static_cast<std::uint64_t>(shifted.to_int64()),
                                                  finite_width(v))));
                }
                break;
            case UpdateAction::AssignInterval:
                out.push_back(f_linatom({{Rational(1), nxt.symbol(v.name)}}, Rel::Ge, act->lo));
                out.push_back(f_linatom({{Rational(1), nxt.symbol(v.name)}}, Rel::Le, act->hi));
                break;
            case UpdateAction::AssignVar: {
                const VarDecl* src = ha.find_var(act->var);
                if (!src) throw EncodingError("update reads undeclared variable " + act->var);
                out.push_back(f_eq(next, var_symbol(*src, cur)));
                break;
            }
            case UpdateAction::Identity:
                break;
        }
    }
}

} // namespace detail

// I(V0): initial location code, initial guard and the initial location's
// invariant over frame 0.
inline Formula encode_init(const HybridAutomaton& ha, const StepFrame& frame0) {
    auto idx = ha.location_index(ha.init_location);
    if (!idx) throw EncodingError("init location missing");
    std::vector<Formula> conj;
    conj.push_back(detail::loc_is(ha, frame0, *idx));
    detail::append_guard(ha, ha.init_guard, frame0, conj);
    detail::append_guard(ha, ha.locations[*idx].invariant, frame0, conj);
    return f_and(std::move(conj));
}

// D(cur, nxt): disjunction over transitions. Returns literal false for an
// automaton without transitions.
inline Formula encode_discrete(const HybridAutomaton& ha, const StepFrame& cur,
                               const StepFrame& nxt, const EncodingOptions& opts = {}) {
    std::vector<Formula> disjuncts;
    for (const auto& t : ha.transitions) {
        auto src = ha.location_index(t.source);
        auto tgt = ha.location_index(t.target);
        if (!src || !tgt) throw EncodingError("transition references unknown location");
        std::vector<Formula> conj;
        conj.push_back(detail::loc_is(ha, cur, *src));
        conj.push_back(detail::loc_is(ha, nxt, *tgt));
        detail::append_guard(ha, ha.locations[*src].invariant, cur, conj);
        detail::append_guard(ha, t.guard, cur, conj);
        detail::append_update(ha, t.update, cur, nxt, conj);
        if (opts.include_target_invariant_on_discrete)
            detail::append_guard(ha, ha.locations[*tgt].invariant, nxt, conj);
        disjuncts.push_back(f_and(std::move(conj)));
    }
    if (disjuncts.empty()) return f_false();
    return f_or(std::move(disjuncts));
}

// T(cur, nxt, dwell): dwell >= 0 and a disjunction over locations; flows are
// interval inclusions, the invariant is checked at both endpoints (complete
// for rectangular inclusions with linear invariants by convexity).
inline Formula encode_trajectory(const HybridAutomaton& ha, const StepFrame& cur,
                                 const StepFrame& nxt, const std::string& dwell) {
    std::vector<Formula> disjuncts;
    for (std::size_t li = 0; li < ha.locations.size(); ++li) {
        const Location& loc = ha.locations[li];
        std::vector<Formula> conj;
        conj.push_back(detail::loc_is(ha, cur, li));
        unsigned lw = detail::loc_width(ha);
        conj.push_back(f_eq(f_var(nxt.loc, Sort::bitvec(lw)), f_var(cur.loc, Sort::bitvec(lw))));
        for (const auto& v : ha.vars) {
            if (v.kind == VarKind::Real) {
                auto it = loc.flow.find(v.name);
                if (it == loc.flow.end())
                    throw EncodingError("missing flow for " + v.name + " in " + loc.name);
                // cur + lo*dwell <= nxt <= cur + hi*dwell
                conj.push_back(f_linatom({{Rational(1), nxt.symbol(v.name)},
                                          {Rational(-1), cur.symbol(v.name)},
                                          {-it->second.lo, dwell}},
                                         Rel::Ge, Rational(0)));
                conj.push_back(f_linatom({{Rational(1), nxt.symbol(v.name)},
                                          {Rational(-1), cur.symbol(v.name)},
                                          {-it->second.hi, dwell}},
                                         Rel::Le, Rational(0)));
            } else {
                conj.push_back(f_eq(detail::finite_var(v, nxt), detail::finite_var(v, cur)));
            }
        }
        detail::append_guard(ha, loc.invariant, nxt, conj);
        detail::append_guard(ha, loc.invariant, cur, conj);
        disjuncts.push_back(f_and(std::move(conj)));
    }
    std::vector<Formula> top;
    top.push_back(f_linatom({{Rational(1), dwell}}, Rel::Ge, Rational(0)));
    top.push_back(f_or(std::move(disjuncts)));
    return f_and(std::move(top));
}

// P(V_i): disjunction over bad entries, each a location-set membership
// conjoined with the entry guard.
inline Formula encode_bad(const HybridAutomaton& ha, const StepFrame& f) {
    std::vector<Formula> entries;
    for (const auto& b : ha.bad) {
        std::vector<Formula> locs;
        for (const auto& ln : b.locations) {
            auto idx = ha.location_index(ln);
            if (!idx) throw EncodingError("bad set references unknown location " + ln);
            locs.push_back(detail::loc_is(ha, f, *idx));
        }
        std::vector<Formula> conj;
        conj.push_back(locs.size() == 1 ? locs[0] : f_or(std::move(locs)));
        detail::append_guard(ha, b.guard, f, conj);
        entries.push_back(conj.size() == 1 ? conj[0] : f_and(std::move(conj)));
    }
    if (entries.empty()) return f_false();
    if (entries.size() == 1) return entries[0];
    return f_or(std::move(entries));
}

// Phi(k): quantifier-free unrolling with k transition-relation instantiations
// and a fresh dwell per step.
inline Script encode_qf_bmc(const HybridAutomaton& ha, std::size_t k,
                            const EncodingOptions& opts = {}) {
    Script s;
    std::vector<StepFrame> frames;
    for (std::size_t i = 0; i <= k; ++i) {
        frames.push_back(detail::make_frame(ha, std::to_string(i), i < k));
        detail::declare_frame(s, ha, frames[i]);
        if (i < k) s.declare(frames[i].dwell, Sort::real());
    }

    s.assertions.push_back(encode_init(ha, frames[0]));
    for (std::size_t i = 0; i < k; ++i) {
        Formula d = encode_discrete(ha, frames[i], frames[i + 1], opts);
        Formula t = encode_trajectory(ha, frames[i], frames[i + 1], frames[i].dwell);
        s.assertions.push_back(f_template(f_or({std::move(d), std::move(t)})));
    }
    std::vector<Formula> bad;
    for (std::size_t i = 0; i <= k; ++i) bad.push_back(encode_bad(ha, frames[i]));
    s.assertions.push_back(f_or(std::move(bad)));

    for (std::size_t i = 0; i <= k; ++i) {
        auto ranges = detail::frame_range_constraints(ha, frames[i]);
        if (!ranges.empty())
            s.assertions.push_back(ranges.size() == 1 ? ranges[0] : f_and(std::move(ranges)));
    }
    return s;
}

// t^k(i): the selector condition activating step i. Binary mode compares the
// selector with the step literal; merged-cube mode reproduces the dyadic cube
// cover (for k=3: !t1; t1 & !t2; t1 & t2, most significant bit first), each
// cube rendered as an unsigned interval constraint on the selector.
inline Formula selector_cube(std::size_t i, std::size_t k, const std::string& sel, unsigned width,
                             SelectorMode mode) {
    if (i >= k) throw EncodingError("selector index out of range");
    Formula t = f_var(sel, Sort::bitvec(width));
    if (mode == SelectorMode::BinaryEquality) return f_eq(t, f_bv(i, width));

    // merged cubes: recursively split [0, 2^w) into k dyadic intervals,
    // floor(m/2) cubes to the lower half
    std::uint64_t lo = 0, hi = std::uint64_t{1} << width;
    std::size_t want = i, m = k;
    while (m > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        std::size_t left = m / 2;
        if (want < left) {
            hi = mid;
            m = left;
        } else {
            want -= left;
            lo = mid;
            m -= left;
        }
    }
    std::vector<Formula> conj;
    if (lo + 1 == hi) return f_eq(t, f_bv(lo, width));
    if (lo > 0) conj.push_back(f_bvcomp(BvOp::Uge, t, f_bv(lo, width)));
    if (hi < (std::uint64_t{1} << width)) conj.push_back(f_bvcomp(BvOp::Ule, t, f_bv(hi - 1, width)));
    if (conj.empty()) return f_true();
    if (conj.size() == 1) return conj[0];
    return f_and(std::move(conj));
}

// Omega(k): single transition-relation copy under a universally quantified
// selector. Outer frames (and dwells) are emitted as top-level symbols so a
// model exposes V_0..V_k; the forall/exists block is one assertion.
inline Script encode_qbmc(const HybridAutomaton& ha, std::size_t k,
                          const EncodingOptions& opts = {}) {
    if (k == 0) throw EncodingError("quantified encoding needs k >= 1 (use the QF encoding)");
    Script s;
    std::vector<StepFrame> frames;
    for (std::size_t i = 0; i <= k; ++i) {
        frames.push_back(detail::make_frame(ha, std::to_string(i), false));
        detail::declare_frame(s, ha, frames[i]);
    }
    const bool per_step = opts.delta_mode == DeltaMode::PerStep;
    std::vector<std::string> dwells;
    if (per_step) {
        for (std::size_t i = 0; i < k; ++i) {
            dwells.push_back("delta_" + std::to_string(i));
            s.declare(dwells.back(), Sort::real());
        }
    } else {
        dwells.assign(k, "delta");
        s.declare("delta", Sort::real());
    }

    const unsigned w = bit_width_for(k);  // max(1, ceil(log2 k))
    StepFrame cur = detail::make_frame(ha, "cur", false);
    StepFrame nxt = detail::make_frame(ha, "nxt", false);
    const std::string inner_dwell = per_step ? "d" : "delta";

    std::vector<std::pair<std::string, Sort>> inner_binders;
    auto push_frame_binders = [&](const StepFrame& f) {
        inner_binders.emplace_back(f.loc, Sort::bitvec(detail::loc_width(ha)));
        for (const auto& v : ha.vars) {
            Sort sort = v.kind == VarKind::Real ? Sort::real() : Sort::bitvec(detail::finite_width(v));
            inner_binders.emplace_back(f.symbol(v.name), sort);
        }
    };
    push_frame_binders(cur);
    push_frame_binders(nxt);
    if (per_step) inner_binders.emplace_back(inner_dwell, Sort::real());

    std::vector<Formula> body;
    body.push_back(encode_init(ha, frames[0]));
    {
        Formula d = encode_discrete(ha, cur, nxt, opts);
        Formula t = encode_trajectory(ha, cur, nxt, inner_dwell);
        body.push_back(f_template(f_or({std::move(d), std::move(t)})));
    }
    unsigned lw = detail::loc_width(ha);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<Formula> eqs;
        auto frame_eq = [&](const StepFrame& a, const StepFrame& b) {
            eqs.push_back(f_eq(f_var(a.loc, Sort::bitvec(lw)), f_var(b.loc, Sort::bitvec(lw))));
            for (const auto& v : ha.vars)
                eqs.push_back(f_eq(detail::var_symbol(v, a), detail::var_symbol(v, b)));
        };
        frame_eq(cur, frames[i]);
        frame_eq(nxt, frames[i + 1]);
        if (per_step)
            eqs.push_back(f_eq(f_var(inner_dwell, Sort::real()), f_var(dwells[i], Sort::real())));
        body.push_back(f_selector_tag(
            f_implies(selector_cube(i, k, "t", w, opts.selector_mode), f_and(std::move(eqs)))));
    }

    Formula inner = f_and(std::move(body));
    const bool guard_needed = opts.out_of_range_guard &&
                              opts.selector_mode == SelectorMode::BinaryEquality &&
                              (std::uint64_t{1} << w) > k;
    if (guard_needed)
        inner = f_implies(f_bvcomp(BvOp::Ult, f_var("t", Sort::bitvec(w)), f_bv(k, w)),
                          std::move(inner));
    Formula quantified =
        f_quant(true, {{"t", Sort::bitvec(w)}}, f_quant(false, inner_binders, std::move(inner)));
    s.assertions.push_back(std::move(quantified));

    std::vector<Formula> bad;
    for (std::size_t i = 0; i <= k; ++i) bad.push_back(encode_bad(ha, frames[i]));
    s.assertions.push_back(f_or(std::move(bad)));

    for (std::size_t i = 0; i <= k; ++i) {
        auto ranges = detail::frame_range_constraints(ha, frames[i]);
        if (!ranges.empty())
            s.assertions.push_back(ranges.size() == 1 ? ranges[0] : f_and(std::move(ranges)));
    }
    return s;
}

// ── formula statistics ──────────────────────────────────────────────────────

struct FormulaStats {
    std::size_t assertions = 0;
    std::size_t symbols = 0;
    std::size_t nodes = 0;            // marker nodes excluded
    std::size_t quantifiers = 0;      // binder blocks
    std::size_t max_quantifier_depth = 0;
    std::size_t template_instantiations = 0;
    std::size_t template_nodes = 0;   // nodes inside Template markers
    std::size_t selector_nodes = 0;   // nodes inside SelectorTag markers
};

namespace detail {

inline void walk_stats(const Formula& f, FormulaStats& st, std::size_t qdepth, bool in_template,
                       bool in_selector) {
    switch (f->kind) {
        case FNode::Template:
            ++st.template_instantiations;
            walk_stats(f->args[0], st, qdepth, true, in_selector);
            return;
        case FNode::SelectorTag:
            walk_stats(f->args[0], st, qdepth, in_template, true);
            return;
        case FNode::Quant:
            ++st.quantifiers;
            ++st.nodes;
            if (in_template) ++st.template_nodes;
            if (in_selector) ++st.selector_nodes;
            st.max_quantifier_depth = std::max(st.max_quantifier_depth, qdepth + 1);
            walk_stats(f->args[0], st, qdepth + 1, in_template, in_selector);
            return;
        default:
            ++st.nodes;
            if (in_template) ++st.template_nodes;
            if (in_selector) ++st.selector_nodes;
            for (const auto& a : f->args) walk_stats(a, st, qdepth, in_template, in_selector);
    }
}

} // namespace detail

inline FormulaStats formula_stats(const Script& s) {
    FormulaStats st;
    st.assertions = s.assertions.size();
    st.symbols = s.symbols.size();
    for (const auto& a : s.assertions) detail::walk_stats(a, st, 0, false, false);
    return st;
}

} // namespace qbmc

#endif // QBMC_ENCODER_HPP
