// ============================================================================
// qbmc/ha.hpp — rectangular hybrid automata: types, validation, composition
// ============================================================================
//
// An automaton is the tuple <Loc, Var, Inv, Flow, Trans, Init> together with
// a bad-state set. Guards and invariants are conjunctions of linear
// constraints over constants; continuous dynamics are per-location interval
// inclusions x' in [a, b]. Networks compose by asynchronous interleaving of
// discrete transitions with a shared global time base; finite-domain globals
// are the only shared state.
//
// ============================================================================

#ifndef QBMC_HA_HPP
#define QBMC_HA_HPP

#include "qbmc/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbmc {

class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

enum class VarKind { Real, FiniteInt };
enum class VarScope { Local, Global };

struct VarDecl {
    std::string name;
    VarKind kind = VarKind::Real;
    long long lo = 0, hi = 0;  // FiniteInt domain bounds, inclusive
    VarScope scope = VarScope::Local;

    friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

enum class Rel { Lt, Le, Eq, Ge, Gt };

inline const char* rel_text(Rel r) {
    switch (r) {
        case Rel::Lt: return "<";
        case Rel::Le: return "<=";
        case Rel::Eq: return "=";
        case Rel::Ge: return ">=";
        case Rel::Gt: return ">";
    }
    return "?";
}

// sum(coeff_i * var_i) REL bound
struct LinearConstraint {
    std::map<std::string, Rational> terms;
    Rel rel = Rel::Le;
    Rational bound;

    static LinearConstraint single(const std::string& var, Rel rel, Rational bound) {
        LinearConstraint c;
        c.terms.emplace(var, Rational(1));
        c.rel = rel;
        c.bound = std::move(bound);
        return c;
    }

    bool holds(const std::map<std::string, Rational>& valuation) const {
        Rational sum;
        for (const auto& [v, coeff] : terms) {
            auto it = valuation.find(v);
            if (it == valuation.end()) throw ModelError("constraint references unbound variable " + v);
            sum += coeff * it->second;
        }
        switch (rel) {
            case Rel::Lt: return sum < bound;
            case Rel::Le: return sum <= bound;
            case Rel::Eq: return sum == bound;
            case Rel::Ge: return sum >= bound;
            case Rel::Gt: return sum > bound;
        }
        return false;
    }

    friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

// conjunction; empty list is "true"
struct Guard {
    std::vector<LinearConstraint> conjuncts;

    bool holds(const std::map<std::string, Rational>& valuation) const {
        for (const auto& c : conjuncts)
            if (!c.holds(valuation)) return false;
        return true;
    }

    friend bool operator==(const Guard&, const Guard&) = default;
};

struct UpdateAction {
    enum Kind { Identity, AssignConst, AssignInterval, AssignVar };
    Kind kind = Identity;
    Rational value;       // AssignConst
    Rational lo, hi;      // AssignInterval
    std::string var;      // AssignVar

    friend bool operator==(const UpdateAction&, const UpdateAction&) = default;
};

// Sparse: variables without an entry are Identity.
struct UpdateMap {
    std::map<std::string, UpdateAction> actions;

    const UpdateAction* find(const std::string& var) const {
        auto it = actions.find(var);
        return it == actions.end() ? nullptr : &it->second;
    }

    friend bool operator==(const UpdateMap&, const UpdateMap&) = default;
};

struct FlowInterval {
    Rational lo, hi;
    friend bool operator==(const FlowInterval&, const FlowInterval&) = default;
};

struct Location {
    std::string name;
    Guard invariant;
    std::map<std::string, FlowInterval> flow;  // Real variables only

    friend bool operator==(const Location&, const Location&) = default;
};

struct Transition {
    std::string source;
    std::string target;
    Guard guard;
    UpdateMap update;
    std::string label;  // optional, unused by the encoders

    friend bool operator==(const Transition&, const Transition&) = default;
};

// (S, phi): the states { <l, v> : l in S and v |= phi }
struct BadEntry {
    std::vector<std::string> locations;
    Guard guard;

    friend bool operator==(const BadEntry&, const BadEntry&) = default;
};

struct ComponentInfo {
    std::string name;
    std::vector<std::string> locations;  // component-local names, declaration order
};

struct HybridAutomaton {
    std::string name;
    std::vector<VarDecl> vars;
    std::vector<Location> locations;
    std::vector<Transition> transitions;
    std::string init_location;
    Guard init_guard;
    std::vector<BadEntry> bad;
    std::vector<ComponentInfo> components;  // nonempty iff this is a composed product

    const VarDecl* find_var(const std::string& n) const {
        for (const auto& v : vars)
            if (v.name == n) return &v;
        return nullptr;
    }
    const Location* find_location(const std::string& n) const {
        for (const auto& l : locations)
            if (l.name == n) return &l;
        return nullptr;
    }
    std::optional<std::size_t> location_index(const std::string& n) const {
        for (std::size_t i = 0; i < locations.size(); ++i)
            if (locations[i].name == n) return i;
        return std::nullopt;
    }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool is_rectangular = false;

    bool ok() const { return violations.empty(); }
};

namespace detail {

// Frame-symbol names are loc_i / delta_i and the quantified selector is t;
// user variables with these names would collide in the emitted scripts.
inline bool reserved_var_name(const std::string& n) {
    return n == "loc" || n == "delta" || n == "t";
}

inline void check_constraint(const HybridAutomaton& ha, const LinearConstraint& c,
                             const std::string& where, std::vector<std::string>& out,
                             bool& rectangular) {
    std::size_t nonzero = 0;
    bool has_real = false, has_finite = false;
    for (const auto& [name, coeff] : c.terms) {
        const VarDecl* vd = ha.find_var(name);
        if (!vd) {
            out.push_back(where + ": undeclared variable " + name);
            continue;
        }
        if (!coeff.is_zero()) ++nonzero;
        if (vd->kind == VarKind::Real) has_real = true;
        if (vd->kind == VarKind::FiniteInt) {
            has_finite = true;
            if (!(coeff == Rational(1)))
                out.push_back(where + ": finite variable " + name + " needs unit coefficient");
            if (!c.bound.is_integer())
                out.push_back(where + ": finite variable " + name + " compared to non-integer bound");
        }
    }
    if (has_real && has_finite)
        out.push_back(where + ": constraint mixes real and finite variables");
    if (has_finite && c.terms.size() > 1)
        out.push_back(where + ": finite variable in multi-variable constraint");
    if (nonzero > 1) rectangular = false;
}

inline void check_guard(const HybridAutomaton& ha, const Guard& g, const std::string& where,
                        std::vector<std::string>& out, bool& rectangular) {
    for (const auto& c : g.conjuncts) check_constraint(ha, c, where, out, rectangular);
}

inline void check_update(const HybridAutomaton& ha, const UpdateMap& u, const std::string& where,
                         std::vector<std::string>& out) {
    for (const auto& [name, act] : u.actions) {
        const VarDecl* vd = ha.find_var(name);
        if (!vd) {
            out.push_back(where + ": update of undeclared variable " + name);
            continue;
        }
        switch (act.kind) {
            case UpdateAction::Identity:
                break;
            case UpdateAction::AssignConst:
                if (vd->kind == VarKind::FiniteInt) {
                    if (!act.value.is_integer())
                        out.push_back(where + ": non-integer constant assigned to finite " + name);
                    else {
                        auto v = act.value.num();
                        if (v < BigInt(vd->lo) || v > BigInt(vd->hi))
                            out.push_back(where + ": constant outside domain of " + name);
                    }
                }
                break;
            case UpdateAction::AssignInterval:
                if (vd->kind != VarKind::Real)
                    out.push_back(where + ": interval assignment to finite variable " + name);
                if (act.hi < act.lo)
                    out.push_back(where + ": interval assignment with lo > hi on " + name);
                break;
            case UpdateAction::AssignVar: {
                const VarDecl* src = ha.find_var(act.var);
                if (!src) {
                    out.push_back(where + ": update reads undeclared variable " + act.var);
                } else if (src->kind != vd->kind) {
                    out.push_back(where + ": update " + name + " := " + act.var + " mixes kinds");
                } else if (vd->kind == VarKind::FiniteInt &&
                           (src->lo != vd->lo || src->hi != vd->hi)) {
                    out.push_back(where + ": domains of " + name + " and " + act.var + " differ");
                }
                break;
            }
        }
    }
}

} // namespace detail

// Structural well-formedness. Report lists every violation; empty report iff
// the automaton is well-formed. is_rectangular is advisory (all constraints
// single-variable).
inline ValidationReport validate_automaton(const HybridAutomaton& ha) {
    ValidationReport rep;
    rep.is_rectangular = true;
    auto& out = rep.violations;

    std::set<std::string> var_names;
    for (const auto& v : ha.vars) {
        if (!var_names.insert(v.name).second) out.push_back("duplicate variable " + v.name);
        if (detail::reserved_var_name(v.name)) out.push_back("reserved variable name " + v.name);
        if (v.kind == VarKind::FiniteInt && v.lo > v.hi)
            out.push_back("finite variable " + v.name + " has lo > hi");
    }

    std::set<std::string> loc_names;
    for (const auto& l : ha.locations) {
        if (!loc_names.insert(l.name).second) out.push_back("duplicate location " + l.name);
        detail::check_guard(ha, l.invariant, "invariant of " + l.name, out, rep.is_rectangular);
        for (const auto& [var, iv] : l.flow) {
            const VarDecl* vd = ha.find_var(var);
            if (!vd) out.push_back("flow for undeclared variable " + var + " in " + l.name);
            else if (vd->kind != VarKind::Real)
                out.push_back("flow on finite variable " + var + " in " + l.name);
            if (iv.hi < iv.lo) out.push_back("flow lo > hi for " + var + " in " + l.name);
        }
        for (const auto& v : ha.vars)
            if (v.kind == VarKind::Real && v.scope == VarScope::Local && !l.flow.count(v.name))
                out.push_back("missing flow for " + v.name + " in " + l.name);
    }

    if (ha.locations.empty()) out.push_back("automaton has no locations");

    for (std::size_t i = 0; i < ha.transitions.size(); ++i) {
        const auto& t = ha.transitions[i];
        std::string where = "transition " + t.source + "->" + t.target;
        if (!ha.find_location(t.source)) out.push_back(where + ": unknown source");
        if (!ha.find_location(t.target)) out.push_back(where + ": unknown target");
        detail::check_guard(ha, t.guard, where + " guard", out, rep.is_rectangular);
        detail::check_update(ha, t.update, where, out);
    }

    if (!ha.find_location(ha.init_location))
        out.push_back("init location " + ha.init_location + " does not exist");
    detail::check_guard(ha, ha.init_guard, "init", out, rep.is_rectangular);

    for (const auto& b : ha.bad) {
        for (const auto& ln : b.locations)
            if (!ha.find_location(ln)) out.push_back("bad set references unknown location " + ln);
        detail::check_guard(ha, b.guard, "bad", out, rep.is_rectangular);
    }

    return rep;
}

namespace detail {

inline std::string renamed(const std::string& name, const std::set<std::string>& locals,
                           std::size_t index1) {
    if (locals.count(name)) return name + "_" + std::to_string(index1);
    return name;
}

inline LinearConstraint rename_constraint(const LinearConstraint& c,
                                          const std::set<std::string>& locals, std::size_t i1) {
    LinearConstraint r;
    r.rel = c.rel;
    r.bound = c.bound;
    for (const auto& [name, coeff] : c.terms) r.terms.emplace(renamed(name, locals, i1), coeff);
    return r;
}

inline Guard rename_guard(const Guard& g, const std::set<std::string>& locals, std::size_t i1) {
    Guard r;
    for (const auto& c : g.conjuncts) r.conjuncts.push_back(rename_constraint(c, locals, i1));
    return r;
}

inline UpdateMap rename_update(const UpdateMap& u, const std::set<std::string>& locals,
                               std::size_t i1) {
    UpdateMap r;
    for (const auto& [name, act] : u.actions) {
        UpdateAction a = act;
        if (a.kind == UpdateAction::AssignVar) a.var = renamed(a.var, locals, i1);
        r.actions.emplace(renamed(name, locals, i1), a);
    }
    return r;
}

} // namespace detail

// Asynchronous interleaving product. Component locals are renamed with the
// 1-based component index suffix; globals are shared by name and must be
// finite-domain (a shared continuous variable has no well-defined flow in
// the interleaving product). Product location names join component location
// names with the times sign.
inline HybridAutomaton product_compose(const std::vector<HybridAutomaton>& network,
                                       const std::vector<VarDecl>& globals) {
    if (network.empty()) throw ModelError("empty network");

    for (const auto& g : globals)
        if (g.kind != VarKind::FiniteInt)
            throw ModelError("global variable " + g.name + " must be finite-domain");

    std::set<std::string> global_names;
    for (const auto& g : globals)
        if (!global_names.insert(g.name).second)
            throw ModelError("duplicate global variable " + g.name);

    HybridAutomaton product;
    product.name = "product";
    for (const auto& g : globals) {
        VarDecl vd = g;
        vd.scope = VarScope::Global;
        product.vars.push_back(vd);
    }

    // rename and collect locals
    std::vector<std::set<std::string>> locals_of(network.size());
    std::set<std::string> seen = global_names;
    for (std::size_t i = 0; i < network.size(); ++i) {
        const auto& comp = network[i];
        for (const auto& v : comp.vars) {
            if (v.scope == VarScope::Global)
                throw ModelError("component " + comp.name + " re-declares global " + v.name);
            locals_of[i].insert(v.name);
        }
        for (const auto& v : comp.vars) {
            VarDecl vd = v;
            vd.name = detail::renamed(v.name, locals_of[i], i + 1);
            if (!seen.insert(vd.name).second)
                throw ModelError("variable name collision after renaming: " + vd.name);
            product.vars.push_back(vd);
        }
        // a component may write globals, but only declared ones
        for (const auto& t : comp.transitions)
            for (const auto& [name, act] : t.update.actions) {
                (void)act;
                if (!locals_of[i].count(name) && !global_names.count(name))
                    throw ModelError("component " + comp.name + " writes unknown global " + name);
            }
    }

    // product locations in mixed-radix order, component 0 most significant
    std::vector<std::size_t> radix(network.size());
    std::size_t total = 1;
    for (std::size_t i = 0; i < network.size(); ++i) {
        radix[i] = network[i].locations.size();
        if (radix[i] == 0) throw ModelError("component " + network[i].name + " has no locations");
        total *= radix[i];
    }

    auto digits_of = [&](std::size_t idx) {
        std::vector<std::size_t> d(network.size());
        for (std::size_t i = network.size(); i-- > 0;) {
            d[i] = idx % radix[i];
            idx /= radix[i];
        }
        return d;
    };
    auto name_of = [&](const std::vector<std::size_t>& d) {
        std::string n;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (i) n += "×";
            n += network[i].locations[d[i]].name;
        }
        return n;
    };

    for (std::size_t idx = 0; idx < total; ++idx) {
        auto d = digits_of(idx);
        Location loc;
        loc.name = name_of(d);
        for (std::size_t i = 0; i < network.size(); ++i) {
            const Location& cl = network[i].locations[d[i]];
            Guard inv = detail::rename_guard(cl.invariant, locals_of[i], i + 1);
            for (auto& c : inv.conjuncts) loc.invariant.conjuncts.push_back(std::move(c));
            for (const auto& [var, iv] : cl.flow)
                loc.flow.emplace(detail::renamed(var, locals_of[i], i + 1), iv);
        }
        product.locations.push_back(std::move(loc));
    }

    // interleaved transitions: component i moves, the rest stay put
    for (std::size_t i = 0; i < network.size(); ++i) {
        for (const auto& t : network[i].transitions) {
            auto src_ci = network[i].location_index(t.source);
            auto tgt_ci = network[i].location_index(t.target);
            if (!src_ci || !tgt_ci)
                throw ModelError("component " + network[i].name + " transition references unknown location");
            for (std::size_t idx = 0; idx < total; ++idx) {
                auto d = digits_of(idx);
                if (d[i] != *src_ci) continue;
                Transition pt;
                pt.source = name_of(d);
                auto d2 = d;
                d2[i] = *tgt_ci;
                pt.target = name_of(d2);
                pt.guard = detail::rename_guard(t.guard, locals_of[i], i + 1);
                pt.update = detail::rename_update(t.update, locals_of[i], i + 1);
                pt.label = t.label.empty() ? "" : t.label + "_" + std::to_string(i + 1);
                product.transitions.push_back(std::move(pt));
            }
        }
    }

    // init: product of component inits
    {
        std::vector<std::size_t> d(network.size());
        for (std::size_t i = 0; i < network.size(); ++i) {
            auto ci = network[i].location_index(network[i].init_location);
            if (!ci) throw ModelError("component " + network[i].name + " has no init location");
            d[i] = *ci;
            Guard ig = detail::rename_guard(network[i].init_guard, locals_of[i], i + 1);
            for (auto& c : ig.conjuncts) product.init_guard.conjuncts.push_back(std::move(c));
        }
        product.init_location = name_of(d);
    }

    // lift component-level bad entries over the product
    for (std::size_t i = 0; i < network.size(); ++i) {
        for (const auto& b : network[i].bad) {
            BadEntry lifted;
            lifted.guard = detail::rename_guard(b.guard, locals_of[i], i + 1);
            std::set<std::size_t> member;
            for (const auto& ln : b.locations) {
                auto ci = network[i].location_index(ln);
                if (!ci) throw ModelError("bad set of " + network[i].name + " references unknown location " + ln);
                member.insert(*ci);
            }
            for (std::size_t idx = 0; idx < total; ++idx) {
                auto d = digits_of(idx);
                if (member.count(d[i])) lifted.locations.push_back(name_of(d));
            }
            product.bad.push_back(std::move(lifted));
        }
    }

    for (std::size_t i = 0; i < network.size(); ++i) {
        ComponentInfo ci;
        ci.name = network[i].name;
        for (const auto& l : network[i].locations) ci.locations.push_back(l.name);
        product.components.push_back(std::move(ci));
    }
    return product;
}

// Mutual-exclusion bad set over a composed product: all product locations
// where at least two components sit in a marked (critical-section) location,
// with guard true. cs_marker holds component-location names; a component
// location is marked iff its name is in the set.
inline std::vector<BadEntry> bad_mutex(const HybridAutomaton& product,
                                       const std::set<std::string>& cs_marker) {
    if (product.components.empty())
        throw ModelError("bad_mutex requires a composed product with component structure");

    std::vector<std::vector<bool>> marked(product.components.size());
    for (std::size_t i = 0; i < product.components.size(); ++i) {
        const auto& locs = product.components[i].locations;
        marked[i].resize(locs.size(), false);
        bool any = false;
        for (std::size_t j = 0; j < locs.size(); ++j)
            if (cs_marker.count(locs[j])) { marked[i][j] = any = true; }
        if (!any)
            throw ModelError("cs marker matches no location in component " + product.components[i].name);
    }

    std::vector<std::size_t> radix;
    std::size_t total = 1;
    for (const auto& c : product.components) {
        radix.push_back(c.locations.size());
        total *= c.locations.size();
    }

    BadEntry entry;  // guard true
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        std::size_t count = 0;
        std::vector<std::size_t> d(radix.size());
        for (std::size_t i = radix.size(); i-- > 0;) {
            d[i] = rest % radix[i];
            rest /= radix[i];
            if (marked[i][d[i]]) ++count;
        }
        if (count >= 2) entry.locations.push_back(product.locations[idx].name);
    }
    return entry.locations.empty() ? std::vector<BadEntry>{} : std::vector<BadEntry>{entry};
}

} // namespace qbmc

#endif // QBMC_HA_HPP
