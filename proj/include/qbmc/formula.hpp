// ============================================================================
// qbmc/formula.hpp — sorted term AST and solver scripts
// ============================================================================
//
// Terms are immutable, shared subtrees. The AST carries exactly the fragment
// the encoders emit: boolean structure, linear-real atoms, fixed-width
// bit-vector equalities/comparisons and quantifiers over declared binders.
// Template / SelectorTag nodes are transparent structural markers used by
// formula_stats to count transition-relation instantiations and selector
// glue; they render as their body.
//
// ============================================================================

#ifndef QBMC_FORMULA_HPP
#define QBMC_FORMULA_HPP

#include "qbmc/ha.hpp"
#include "qbmc/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace qbmc {

class EncodingError : public std::runtime_error {
public:
    explicit EncodingError(const std::string& what) : std::runtime_error(what) {}
};

// ── Sort ────────────────────────────────────────────────────────────────────

enum class SortKind { Bool, Real, BitVec };

struct Sort {
    SortKind kind = SortKind::Bool;
    unsigned width = 0;  // BitVec only, >= 1

    static Sort boolean() { return {SortKind::Bool, 0}; }
    static Sort real() { return {SortKind::Real, 0}; }
    static Sort bitvec(unsigned w) {
        if (w == 0) throw EncodingError("bit-vector width must be >= 1");
        return {SortKind::BitVec, w};
    }

    friend bool operator==(const Sort&, const Sort&) = default;
};

inline std::string sort_text(const Sort& s) {
    switch (s.kind) {
        case SortKind::Bool: return "Bool";
        case SortKind::Real: return "Real";
        case SortKind::BitVec: return "(_ BitVec " + std::to_string(s.width) + ")";
    }
    return "?";
}

// ── Terms ───────────────────────────────────────────────────────────────────

struct FNode;
using Formula = std::shared_ptr<const FNode>;

struct LinTerm {
    Rational coeff;
    std::string var;
};

enum class BvOp { Ult, Ule, Ugt, Uge };

struct FNode {
    enum Kind {
        BoolConst,
        RatConst,
        BvConst,
        Var,
        Not,
        And,
        Or,
        Implies,
        Eq,
        BvComp,
        LinAtom,   // sum(terms) rel bound, over Real symbols
        Quant,
        Template,     // transparent marker: one transition-relation instantiation
        SelectorTag,  // transparent marker: selector glue for one step
    };

    Kind kind;
    bool bval = false;                 // BoolConst
    Rational rat;                      // RatConst value / LinAtom bound
    std::uint64_t bv = 0;              // BvConst value
    unsigned width = 0;                // BvConst width
    std::string name;                  // Var
    Sort sort;                         // Var
    std::vector<Formula> args;         // children; Quant/markers keep body in args[0]
    std::vector<LinTerm> terms;        // LinAtom
    Rel rel = Rel::Le;                 // LinAtom
    BvOp bvop = BvOp::Ult;             // BvComp
    bool is_forall = false;            // Quant
    std::vector<std::pair<std::string, Sort>> binders;  // Quant
};

inline Formula f_bool(bool v) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::BoolConst;
    n->bval = v;
    return n;
}
inline Formula f_true() { return f_bool(true); }
inline Formula f_false() { return f_bool(false); }

inline Formula f_rat(Rational v) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::RatConst;
    n->rat = std::move(v);
    return n;
}

inline Formula f_bv(std::uint64_t value, unsigned width) {
    if (width == 0 || width > 63) throw EncodingError("unsupported bit-vector width");
    if (width < 63 && value >> width) throw EncodingError("bit-vector literal out of range");
    auto n = std::make_shared<FNode>();
    n->kind = FNode::BvConst;
    n->bv = value;
    n->width = width;
    return n;
}

inline Formula f_var(std::string name, Sort sort) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::Var;
    n->name = std::move(name);
    n->sort = sort;
    return n;
}

inline Formula f_not(Formula a) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::Not;
    n->args.push_back(std::move(a));
    return n;
}

inline Formula f_and(std::vector<Formula> args) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::And;
    n->args = std::move(args);
    return n;
}

inline Formula f_or(std::vector<Formula> args) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::Or;
    n->args = std::move(args);
    return n;
}

inline Formula f_implies(Formula a, Formula b) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::Implies;
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return n;
}

inline Formula f_eq(Formula a, Formula b) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::Eq;
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return n;
}

inline Formula f_bvcomp(BvOp op, Formula a, Formula b) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::BvComp;
    n->bvop = op;
    n->args.push_back(std::move(a));
    n->args.push_back(std::move(b));
    return n;
}

// Canonicalizes: merges duplicate variables, drops zero coefficients, sorts
// terms by name. Folds to a boolean constant when no variable remains.
inline Formula f_linatom(const std::vector<LinTerm>& raw, Rel rel, Rational bound) {
    std::map<std::string, Rational> merged;
    for (const auto& t : raw) {
        auto [it, fresh] = merged.emplace(t.var, t.coeff);
        if (!fresh) it->second += t.coeff;
    }
    std::vector<LinTerm> terms;
    for (auto& [var, coeff] : merged)
        if (!coeff.is_zero()) terms.push_back(LinTerm{coeff, var});
    if (terms.empty()) {
        Rational zero;
        bool v = false;
        switch (rel) {
            case Rel::Lt: v = zero < bound; break;
            case Rel::Le: v = zero <= bound; break;
            case Rel::Eq: v = zero == bound; break;
            case Rel::Ge: v = zero >= bound; break;
            case Rel::Gt: v = zero > bound; break;
        }
        return f_bool(v);
    }
    auto n = std::make_shared<FNode>();
    n->kind = FNode::LinAtom;
    n->terms = std::move(terms);
    n->rel = rel;
    n->rat = std::move(bound);
    return n;
}

inline Formula f_quant(bool forall, std::vector<std::pair<std::string, Sort>> binders, Formula body) {
    if (binders.empty()) return body;
    auto n = std::make_shared<FNode>();
    n->kind = FNode::Quant;
    n->is_forall = forall;
    n->binders = std::move(binders);
    n->args.push_back(std::move(body));
    return n;
}

inline Formula f_template(Formula body) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::Template;
    n->args.push_back(std::move(body));
    return n;
}

inline Formula f_selector_tag(Formula body) {
    auto n = std::make_shared<FNode>();
    n->kind = FNode::SelectorTag;
    n->args.push_back(std::move(body));
    return n;
}

// ── Script ──────────────────────────────────────────────────────────────────

struct Script {
    std::vector<std::pair<std::string, Sort>> symbols;  // declaration order
    std::vector<Formula> assertions;
    std::string logic = "ALL";
    bool emit_logic = true;
    bool produce_models = true;

    void declare(const std::string& name, Sort sort) {
        for (const auto& [n, s] : symbols)
            if (n == name) {
                if (s == sort) return;
                throw EncodingError("symbol " + name + " redeclared with a different sort");
            }
        symbols.emplace_back(name, sort);
    }

    const Sort* sort_of(const std::string& name) const {
        for (const auto& [n, s] : symbols)
            if (n == name) return &s;
        return nullptr;
    }
};

// ── Sort checking ───────────────────────────────────────────────────────────

namespace detail {

struct SortEnv {
    const Script* script;
    std::vector<std::pair<std::string, Sort>> bound;

    const Sort* lookup(const std::string& name) const {
        for (auto it = bound.rbegin(); it != bound.rend(); ++it)
            if (it->first == name) return &it->second;
        return script->sort_of(name);
    }
};

inline Sort check_sorts(const Formula& f, SortEnv& env) {
    switch (f->kind) {
        case FNode::BoolConst: return Sort::boolean();
        case FNode::RatConst: return Sort::real();
        case FNode::BvConst: return Sort::bitvec(f->width);
        case FNode::Var: {
            const Sort* s = env.lookup(f->name);
            if (!s) throw EncodingError("undeclared symbol " + f->name);
            if (!(*s == f->sort)) throw EncodingError("sort mismatch for symbol " + f->name);
            return f->sort;
        }
        case FNode::Not:
            if (!(check_sorts(f->args[0], env) == Sort::boolean()))
                throw EncodingError("not: operand is not Bool");
            return Sort::boolean();
        case FNode::And:
        case FNode::Or:
            for (const auto& a : f->args)
                if (!(check_sorts(a, env) == Sort::boolean()))
                    throw EncodingError("connective operand is not Bool");
            return Sort::boolean();
        case FNode::Implies: {
            if (!(check_sorts(f->args[0], env) == Sort::boolean()) ||
                !(check_sorts(f->args[1], env) == Sort::boolean()))
                throw EncodingError("implies: operand is not Bool");
            return Sort::boolean();
        }
        case FNode::Eq: {
            Sort a = check_sorts(f->args[0], env);
            Sort b = check_sorts(f->args[1], env);
            if (!(a == b)) throw EncodingError("equality over distinct sorts");
            return Sort::boolean();
        }
        case FNode::BvComp: {
            Sort a = check_sorts(f->args[0], env);
            Sort b = check_sorts(f->args[1], env);
            if (a.kind != SortKind::BitVec || !(a == b))
                throw EncodingError("bit-vector comparison over non-matching sorts");
            return Sort::boolean();
        }
        case FNode::LinAtom:
            for (const auto& t : f->terms) {
                const Sort* s = env.lookup(t.var);
                if (!s) throw EncodingError("undeclared symbol " + t.var);
                if (s->kind != SortKind::Real)
                    throw EncodingError("linear atom over non-Real symbol " + t.var);
            }
            return Sort::boolean();
        case FNode::Quant: {
            for (const auto& b : f->binders) env.bound.push_back(b);
            Sort s = check_sorts(f->args[0], env);
            env.bound.resize(env.bound.size() - f->binders.size());
            if (!(s == Sort::boolean())) throw EncodingError("quantified body is not Bool");
            return Sort::boolean();
        }
        case FNode::Template:
        case FNode::SelectorTag:
            return check_sorts(f->args[0], env);
    }
    throw EncodingError("unknown node kind");
}

} // namespace detail

// Throws EncodingError on any ill-sorted assertion or undeclared symbol.
inline void check_well_sorted(const Script& script) {
    detail::SortEnv env{&script, {}};
    for (const auto& a : script.assertions)
        if (!(detail::check_sorts(a, env) == Sort::boolean()))
            throw EncodingError("assertion is not Bool");
}

} // namespace qbmc

#endif // QBMC_FORMULA_HPP
