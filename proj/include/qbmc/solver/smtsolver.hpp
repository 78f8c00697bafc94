// ============================================================================
// qbmc/solver/smtsolver.hpp — built-in solver for the LRABV fragment
// ============================================================================
//
// Decides the scripts our encoders emit: boolean structure over linear-real
// atoms and fixed-width bit-vector comparisons, with quantifiers over finite
// sorts. Pipeline:
//
//   1. NNF (negations pushed into atoms, quantifiers dualized),
//   2. quantifier elimination by finite expansion: positive foralls over
//      Bool/BitVec binders expand to conjunctions, positive exists binders
//      are skolemized per instance,
//   3. polarity-aware Tseitin encoding into the CDCL core; bit-vector atoms
//      bit-blast, linear atoms become Simplex bounds asserted when their
//      literal turns true,
//   4. model extraction with exact rationals (strict bounds resolved by a
//      concrete epsilon).
//
// Constructs outside the fragment (Real quantifiers, uninterpreted
// functions) yield Unknown, never a wrong verdict.
//
// ============================================================================

#ifndef QBMC_SOLVER_SMTSOLVER_HPP
#define QBMC_SOLVER_SMTSOLVER_HPP

#include "qbmc/formula.hpp"
#include "qbmc/smtlib.hpp"
#include "qbmc/solver/sat.hpp"
#include "qbmc/solver/simplex.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qbmc::smt {

enum class SolveStatus { Sat, Unsat, Unknown, Timeout };

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    Assignment model;     // declared symbols, filled on Sat
    std::string comment;  // reason for Unknown
};

struct SolveLimits {
    std::chrono::milliseconds timeout{0};  // 0 = none
    long long max_conflicts = -1;
    std::size_t max_expansion_nodes = 40'000'000;
};

class Unsupported : public std::runtime_error {
public:
    explicit Unsupported(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline Sort term_sort(const Formula& f) {
    switch (f->kind) {
        case FNode::Var: return f->sort;
        case FNode::RatConst: return Sort::real();
        case FNode::BvConst: return Sort::bitvec(f->width);
        default: return Sort::boolean();
    }
}

// Eq over Real operands as a linear atom (operands are Var or RatConst).
inline Formula real_pair_atom(const Formula& a, const Formula& b, Rel rel) {
    std::vector<LinTerm> terms;
    Rational bound;
    auto side = [&](const Formula& f, const Rational& sgn) {
        if (f->kind == FNode::Var) terms.push_back(LinTerm{sgn, f->name});
        else if (f->kind == FNode::RatConst) bound -= sgn * f->rat;
        else throw Unsupported("real equality over a compound term");
    };
    side(a, Rational(1));
    side(b, Rational(-1));
    return f_linatom(terms, rel, bound);
}

inline Rel negate_rel(Rel r) {
    switch (r) {
        case Rel::Lt: return Rel::Ge;
        case Rel::Le: return Rel::Gt;
        case Rel::Ge: return Rel::Lt;
        case Rel::Gt: return Rel::Le;
        case Rel::Eq: break;
    }
    throw Unsupported("cannot negate equality in place");
}

inline BvOp negate_bvop(BvOp op) {
    switch (op) {
        case BvOp::Ult: return BvOp::Uge;
        case BvOp::Ule: return BvOp::Ugt;
        case BvOp::Ugt: return BvOp::Ule;
        case BvOp::Uge: return BvOp::Ult;
    }
    throw Unsupported("bad bv op");
}

// negation normal form; when positive == false the node is being negated
inline Formula nnf(const Formula& f, bool positive) {
    switch (f->kind) {
        case FNode::BoolConst:
            return f_bool(positive ? f->bval : !f->bval);
        case FNode::Var:
            return positive ? f : f_not(f);
        case FNode::Not:
            return nnf(f->args[0], !positive);
        case FNode::And:
        case FNode::Or: {
            std::vector<Formula> args;
            for (const auto& a : f->args) args.push_back(nnf(a, positive));
            bool keep_and = (f->kind == FNode::And) == positive;
            return keep_and ? f_and(std::move(args)) : f_or(std::move(args));
        }
        case FNode::Implies: {
            if (positive) return f_or({nnf(f->args[0], false), nnf(f->args[1], true)});
            return f_and({nnf(f->args[0], true), nnf(f->args[1], false)});  // !(a -> b)
        }
        case FNode::LinAtom: {
            if (positive) return f;
            if (f->rel != Rel::Eq)
                return f_linatom(f->terms, negate_rel(f->rel), f->rat);
            return f_or({f_linatom(f->terms, Rel::Lt, f->rat),
                         f_linatom(f->terms, Rel::Gt, f->rat)});
        }
        case FNode::BvComp:
            if (positive) return f;
            return f_bvcomp(negate_bvop(f->bvop), f->args[0], f->args[1]);
        case FNode::Eq: {
            Sort s = term_sort(f->args[0]);
            if (s.kind == SortKind::Real)
                return nnf(real_pair_atom(f->args[0], f->args[1], Rel::Eq), positive);
            if (s.kind == SortKind::BitVec) {
                if (positive) return f;
                return f_or({f_bvcomp(BvOp::Ult, f->args[0], f->args[1]),
                             f_bvcomp(BvOp::Ugt, f->args[0], f->args[1])});
            }
            // booleans: a = b
            const Formula& a = f->args[0];
            const Formula& b = f->args[1];
            if (positive)
                return f_and({f_or({nnf(a, false), nnf(b, true)}),
                              f_or({nnf(b, false), nnf(a, true)})});
            return f_or({f_and({nnf(a, true), nnf(b, false)}),
                         f_and({nnf(b, true), nnf(a, false)})});
        }
        case FNode::Quant: {
            Formula body = nnf(f->args[0], positive);
            bool forall = positive ? f->is_forall : !f->is_forall;
            return f_quant(forall, f->binders, std::move(body));
        }
        case FNode::Template:
        case FNode::SelectorTag:
            return nnf(f->args[0], positive);
        case FNode::RatConst:
        case FNode::BvConst:
            break;
    }
    throw Unsupported("unexpected term in boolean position");
}

// ── constant folding (applied while substituting quantifier instances) ─────

inline std::optional<bool> const_bool(const Formula& f) {
    if (f->kind == FNode::BoolConst) return f->bval;
    return std::nullopt;
}

inline Formula fold_and(std::vector<Formula> args) {
    std::vector<Formula> kept;
    for (auto& a : args) {
        auto c = const_bool(a);
        if (c && *c) continue;
        if (c && !*c) return f_false();
        kept.push_back(std::move(a));
    }
    if (kept.empty()) return f_true();
    if (kept.size() == 1) return kept[0];
    return f_and(std::move(kept));
}

inline Formula fold_or(std::vector<Formula> args) {
    std::vector<Formula> kept;
    for (auto& a : args) {
        auto c = const_bool(a);
        if (c && !*c) continue;
        if (c && *c) return f_true();
        kept.push_back(std::move(a));
    }
    if (kept.empty()) return f_false();
    if (kept.size() == 1) return kept[0];
    return f_or(std::move(kept));
}

inline Formula fold_bvcomp(BvOp op, const Formula& a, const Formula& b) {
    if (a->kind == FNode::BvConst && b->kind == FNode::BvConst) {
        switch (op) {
            case BvOp::Ult: return f_bool(a->bv < b->bv);
            case BvOp::Ule: return f_bool(a->bv <= b->bv);
            case BvOp::Ugt: return f_bool(a->bv > b->bv);
            case BvOp::Uge: return f_bool(a->bv >= b->bv);
        }
    }
    return f_bvcomp(op, a, b);
}

inline Formula fold_eq(const Formula& a, const Formula& b) {
    if (a->kind == FNode::BvConst && b->kind == FNode::BvConst) return f_bool(a->bv == b->bv);
    if (a->kind == FNode::BoolConst && b->kind == FNode::BoolConst)
        return f_bool(a->bval == b->bval);
    if (a->kind == FNode::RatConst && b->kind == FNode::RatConst)
        return f_bool(a->rat == b->rat);
    return f_eq(a, b);
}

} // namespace detail

// ── the solver context ──────────────────────────────────────────────────────

class SmtSolver : private sat::TheoryHook {
public:
    explicit SmtSolver(const Script& script) : script_(script), sat_(this) {
        true_lit_ = sat::mk_lit(sat_.new_var(), false);
        sat_.add_clause({true_lit_});
    }

    SolveResult solve(const SolveLimits& limits = {}) {
        SolveResult result;
        try {
            prepare(limits);
        } catch (const Unsupported& e) {
            result.status = SolveStatus::Unknown;
            result.comment = e.what();
            return result;
        }

        auto deadline = std::chrono::steady_clock::time_point::max();
        if (limits.timeout.count() > 0)
            deadline = std::chrono::steady_clock::now() + limits.timeout;
        auto interrupt = [deadline]() { return std::chrono::steady_clock::now() >= deadline; };

        sat::Solver::Result r = sat_.solve(limits.max_conflicts, interrupt);
        switch (r) {
            case sat::Solver::Result::Unsat:
                result.status = SolveStatus::Unsat;
                return result;
            case sat::Solver::Result::Aborted:
                result.status = limits.timeout.count() > 0 &&
                                        std::chrono::steady_clock::now() >= deadline
                                    ? SolveStatus::Timeout
                                    : SolveStatus::Unknown;
                result.comment = "budget exhausted";
                return result;
            case sat::Solver::Result::Sat:
                break;
        }
        result.status = SolveStatus::Sat;
        extract_model(result.model);
        return result;
    }

private:
    const Script& script_;
    sat::Solver sat_;
    lra::Simplex simplex_;
    sat::Lit true_lit_;

    std::map<std::string, Sort> symbols_;           // script symbols + skolems
    std::map<std::string, sat::Lit> bool_vars_;
    std::map<std::string, std::vector<sat::Lit>> bv_bits_;
    std::map<std::string, lra::Simplex::VarId> real_vars_;
    std::map<std::string, sat::Lit> atom_cache_;    // canonical atom -> lit
    std::map<std::string, lra::Simplex::VarId> expr_slack_;

    struct BoundOp {
        lra::Simplex::VarId var;
        bool is_upper;
        lra::DeltaRat bound;
    };
    std::map<sat::Var, std::vector<BoundOp>> theory_ops_;

    std::vector<std::size_t> theory_marks_;  // simplex undo mark per on_assert call
    std::size_t skolem_counter_ = 0;
    std::size_t expansion_nodes_ = 0;
    std::size_t expansion_limit_ = 0;

    // ── TheoryHook ───────────────────────────────────────────────────────

    bool on_assert(sat::Lit l, std::vector<sat::Lit>& conflict) override {
        theory_marks_.push_back(simplex_.mark());
        if (sat::sign_of(l)) return true;  // atoms occur positively only
        auto it = theory_ops_.find(sat::var_of(l));
        if (it == theory_ops_.end()) return true;
        std::vector<int> reasons;
        for (const auto& op : it->second) {
            bool ok = op.is_upper ? simplex_.assert_upper(op.var, op.bound, l, reasons)
                                  : simplex_.assert_lower(op.var, op.bound, l, reasons);
            if (!ok) {
                conflict.assign(reasons.begin(), reasons.end());
                return false;
            }
        }
        return true;
    }

    bool on_batch_end(std::vector<sat::Lit>& conflict) override {
        std::vector<int> reasons;
        if (simplex_.check(reasons)) return true;
        conflict.assign(reasons.begin(), reasons.end());
        return false;
    }

    void on_backjump(std::size_t n) override {
        if (theory_marks_.size() <= n) return;
        simplex_.undo_to(theory_marks_[n]);
        theory_marks_.resize(n);
    }

    bool final_check(std::vector<sat::Lit>& conflict) override {
        return on_batch_end(conflict);
    }

    // ── preparation ──────────────────────────────────────────────────────

    void prepare(const SolveLimits& limits) {
        expansion_limit_ = limits.max_expansion_nodes;
        for (const auto& [name, sort] : script_.symbols) symbols_[name] = sort;
        for (const auto& a : script_.assertions) {
            Formula n = detail::nnf(a, true);
            std::map<std::string, Formula> subst;
            Formula e = expand(n, subst);
            assert_top(e);
        }
    }

    [[noreturn]] void too_large() { throw Unsupported("quantifier expansion exceeds budget"); }

    void count_node() {
        if (++expansion_nodes_ > expansion_limit_) too_large();
    }

    // quantifier expansion + substitution + folding, NNF input
    Formula expand(const Formula& f, std::map<std::string, Formula>& subst) {
        count_node();
        switch (f->kind) {
            case FNode::BoolConst:
            case FNode::RatConst:
            case FNode::BvConst:
                return f;
            case FNode::Var: {
                auto it = subst.find(f->name);
                return it == subst.end() ? f : it->second;
            }
            case FNode::Not: {
                Formula inner = expand(f->args[0], subst);
                if (auto c = detail::const_bool(inner)) return f_bool(!*c);
                return f_not(inner);
            }
            case FNode::And: {
                std::vector<Formula> args;
                for (const auto& a : f->args) args.push_back(expand(a, subst));
                return detail::fold_and(std::move(args));
            }
            case FNode::Or: {
                std::vector<Formula> args;
                for (const auto& a : f->args) args.push_back(expand(a, subst));
                return detail::fold_or(std::move(args));
            }
            case FNode::Implies:
                throw Unsupported("implication after NNF");
            case FNode::Eq:
                return detail::fold_eq(expand(f->args[0], subst), expand(f->args[1], subst));
            case FNode::BvComp:
                return detail::fold_bvcomp(f->bvop, expand(f->args[0], subst),
                                           expand(f->args[1], subst));
            case FNode::LinAtom: {
                // rename skolemized variables inside terms
                bool dirty = false;
                for (const auto& t : f->terms) {
                    auto it = subst.find(t.var);
                    if (it != subst.end()) { dirty = true; break; }
                }
                if (!dirty) return f;
                std::vector<LinTerm> terms;
                Rational bound = f->rat;
                for (const auto& t : f->terms) {
                    auto it = subst.find(t.var);
                    if (it == subst.end()) {
                        terms.push_back(t);
                    } else if (it->second->kind == FNode::Var) {
                        terms.push_back(LinTerm{t.coeff, it->second->name});
                    } else if (it->second->kind == FNode::RatConst) {
                        bound -= t.coeff * it->second->rat;
                    } else {
                        throw Unsupported("non-real substitution into a linear atom");
                    }
                }
                return f_linatom(terms, f->rel, bound);
            }
            case FNode::Quant:
                return expand_quant(f, subst);
            case FNode::Template:
            case FNode::SelectorTag:
                return expand(f->args[0], subst);
        }
        throw Unsupported("unexpected node");
    }

    Formula expand_quant(const Formula& f, std::map<std::string, Formula>& subst) {
        if (!f->is_forall) {
            // skolemize: binders become fresh symbols
            std::map<std::string, Formula> inner = subst;
            for (const auto& [name, sort] : f->binders) {
                std::string fresh = name + "!" + std::to_string(skolem_counter_++);
                symbols_[fresh] = sort;
                inner[name] = f_var(fresh, sort);
            }
            return expand(f->args[0], inner);
        }
        // finite expansion over Bool / BitVec binders
        for (const auto& [name, sort] : f->binders) {
            (void)name;
            if (sort.kind == SortKind::Real)
                throw Unsupported("universal quantification over Real");
            if (sort.kind == SortKind::BitVec && sort.width > 20)
                throw Unsupported("universal bit-vector binder too wide");
        }
        std::vector<Formula> instances;
        std::vector<std::uint64_t> tuple(f->binders.size(), 0);
        while (true) {
            std::map<std::string, Formula> inner = subst;
            for (std::size_t i = 0; i < f->binders.size(); ++i) {
                const auto& [name, sort] = f->binders[i];
                inner[name] = sort.kind == SortKind::Bool ? f_bool(tuple[i] != 0)
                                                          : f_bv(tuple[i], sort.width);
            }
            instances.push_back(expand(f->args[0], inner));
            // advance the tuple
            std::size_t pos = 0;
            for (; pos < tuple.size(); ++pos) {
                const Sort& s = f->binders[pos].second;
                std::uint64_t limit = s.kind == SortKind::Bool
                                          ? 2
                                          : (std::uint64_t{1} << s.width);
                if (++tuple[pos] < limit) break;
                tuple[pos] = 0;
            }
            if (pos == tuple.size()) break;
        }
        return detail::fold_and(std::move(instances));
    }

    // ── encoding ─────────────────────────────────────────────────────────

    void assert_top(const Formula& f) {
        if (f->kind == FNode::And) {
            for (const auto& a : f->args) assert_top(a);
            return;
        }
        if (f->kind == FNode::BoolConst) {
            if (!f->bval) sat_.add_clause({sat::neg(true_lit_)});
            return;
        }
        if (f->kind == FNode::Or) {
            std::vector<sat::Lit> clause;
            for (const auto& a : f->args) clause.push_back(encode(a));
            sat_.add_clause(std::move(clause));
            return;
        }
        sat_.add_clause({encode(f)});
    }

    sat::Lit fresh_lit() { return sat::mk_lit(sat_.new_var(), false); }

    sat::Lit bool_var_lit(const std::string& name) {
        auto it = bool_vars_.find(name);
        if (it != bool_vars_.end()) return it->second;
        sat::Lit l = fresh_lit();
        bool_vars_[name] = l;
        return l;
    }

    const std::vector<sat::Lit>& bv_var_bits(const std::string& name, unsigned width) {
        auto it = bv_bits_.find(name);
        if (it != bv_bits_.end()) return it->second;
        std::vector<sat::Lit> bits;
        for (unsigned i = 0; i < width; ++i) bits.push_back(fresh_lit());
        return bv_bits_.emplace(name, std::move(bits)).first->second;
    }

    std::vector<sat::Lit> operand_bits(const Formula& f) {
        if (f->kind == FNode::Var) return bv_var_bits(f->name, f->sort.width);
        if (f->kind == FNode::BvConst) {
            std::vector<sat::Lit> bits;
            for (unsigned i = 0; i < f->width; ++i)
                bits.push_back((f->bv >> i) & 1 ? true_lit_ : sat::neg(true_lit_));
            return bits;
        }
        throw Unsupported("compound bit-vector term");
    }

    static std::string operand_key(const Formula& f) {
        if (f->kind == FNode::Var) return "v" + f->name;
        return "c" + std::to_string(f->bv) + "w" + std::to_string(f->width);
    }

    lra::Simplex::VarId real_var(const std::string& name) {
        auto it = real_vars_.find(name);
        if (it != real_vars_.end()) return it->second;
        auto id = simplex_.new_var();
        real_vars_[name] = id;
        return id;
    }

    // one-sided (positive polarity) encodings throughout

    sat::Lit encode(const Formula& f) {
        switch (f->kind) {
            case FNode::BoolConst:
                return f->bval ? true_lit_ : sat::neg(true_lit_);
            case FNode::Var:
                if (f->sort.kind != SortKind::Bool)
                    throw Unsupported("non-boolean variable in boolean position");
                return bool_var_lit(f->name);
            case FNode::Not:
                return sat::neg(encode(f->args[0]));
            case FNode::And: {
                sat::Lit g = fresh_lit();
                for (const auto& a : f->args) sat_.add_clause({sat::neg(g), encode(a)});
                return g;
            }
            case FNode::Or: {
                sat::Lit g = fresh_lit();
                std::vector<sat::Lit> clause{sat::neg(g)};
                for (const auto& a : f->args) clause.push_back(encode(a));
                sat_.add_clause(std::move(clause));
                return g;
            }
            case FNode::LinAtom:
                return linatom_lit(f);
            case FNode::Eq: {
                Sort s = detail::term_sort(f->args[0]);
                if (s.kind == SortKind::Real)
                    return linatom_lit(detail::real_pair_atom(f->args[0], f->args[1], Rel::Eq));
                if (s.kind == SortKind::BitVec) return bv_atom_lit(f);
                // boolean equality: g -> (a <-> b)
                sat::Lit g = fresh_lit();
                sat::Lit a = encode(f->args[0]);
                sat::Lit b = encode(f->args[1]);
                sat_.add_clause({sat::neg(g), sat::neg(a), b});
                sat_.add_clause({sat::neg(g), sat::neg(b), a});
                return g;
            }
            case FNode::BvComp:
                return bv_atom_lit(f);
            case FNode::Quant:
                throw Unsupported("quantifier out of the finite fragment");
            case FNode::Template:
            case FNode::SelectorTag:
                return encode(f->args[0]);
            case FNode::Implies:
                throw Unsupported("implication after NNF");
            case FNode::RatConst:
            case FNode::BvConst:
                break;
        }
        throw Unsupported("term in boolean position");
    }

    // linear atoms: canonicalized on the leading coefficient so that scaled
    // copies share one slack and one literal
    sat::Lit linatom_lit(const Formula& f) {
        if (f->kind == FNode::BoolConst) return f->bval ? true_lit_ : sat::neg(true_lit_);
        Rational lead = f->terms[0].coeff;
        Rational scale = Rational(1) / lead;
        Rel rel = f->rel;
        if (lead.is_negative()) {
            switch (rel) {
                case Rel::Lt: rel = Rel::Gt; break;
                case Rel::Le: rel = Rel::Ge; break;
                case Rel::Ge: rel = Rel::Le; break;
                case Rel::Gt: rel = Rel::Lt; break;
                case Rel::Eq: break;
            }
        }
        Rational bound = f->rat * scale;
        std::string expr_key;
        for (const auto& t : f->terms)
            expr_key += (t.coeff * scale).to_string() + "*" + t.var + "|";
        std::string key = expr_key + rel_text(rel) + bound.to_string();
        auto hit = atom_cache_.find(key);
        if (hit != atom_cache_.end()) return hit->second;

        lra::Simplex::VarId target;
        if (f->terms.size() == 1) {
            target = real_var(f->terms[0].var);
        } else {
            auto it = expr_slack_.find(expr_key);
            if (it != expr_slack_.end()) {
                target = it->second;
            } else {
                std::vector<std::pair<Rational, lra::Simplex::VarId>> expr;
                for (const auto& t : f->terms)
                    expr.emplace_back(t.coeff * scale, real_var(t.var));
                target = simplex_.slack_for(expr);
                expr_slack_[expr_key] = target;
            }
        }

        sat::Lit lit = fresh_lit();
        auto& ops = theory_ops_[sat::var_of(lit)];
        switch (rel) {
            case Rel::Lt:
                ops.push_back({target, true, lra::DeltaRat{bound, Rational(-1)}});
                break;
            case Rel::Le:
                ops.push_back({target, true, lra::DeltaRat::of(bound)});
                break;
            case Rel::Ge:
                ops.push_back({target, false, lra::DeltaRat::of(bound)});
                break;
            case Rel::Gt:
                ops.push_back({target, false, lra::DeltaRat{bound, Rational(1)}});
                break;
            case Rel::Eq:
                ops.push_back({target, true, lra::DeltaRat::of(bound)});
                ops.push_back({target, false, lra::DeltaRat::of(bound)});
                break;
        }
        atom_cache_[key] = lit;
        return lit;
    }

    sat::Lit bv_atom_lit(const Formula& f) {
        const Formula& a = f->args[0];
        const Formula& b = f->args[1];
        std::string key;
        if (f->kind == FNode::Eq) key = "=" + operand_key(a) + operand_key(b);
        else key = std::to_string(static_cast<int>(f->bvop)) + operand_key(a) + operand_key(b);
        auto hit = atom_cache_.find(key);
        if (hit != atom_cache_.end()) return hit->second;

        std::vector<sat::Lit> av = operand_bits(a);
        std::vector<sat::Lit> bv = operand_bits(b);
        if (av.size() != bv.size()) throw Unsupported("bit-vector width mismatch");
        sat::Lit g;
        if (f->kind == FNode::Eq) g = blast_eq(av, bv);
        else {
            switch (f->bvop) {
                case BvOp::Ult: g = blast_ult(av, bv, false); break;
                case BvOp::Ule: g = blast_ult(av, bv, true); break;
                case BvOp::Ugt: g = blast_ult(bv, av, false); break;
                case BvOp::Uge: g = blast_ult(bv, av, true); break;
                default: throw Unsupported("bad bv op");
            }
        }
        atom_cache_[key] = g;
        return g;
    }

    // g -> AND_i (a_i <-> b_i)
    sat::Lit blast_eq(const std::vector<sat::Lit>& a, const std::vector<sat::Lit>& b) {
        sat::Lit g = fresh_lit();
        for (std::size_t i = 0; i < a.size(); ++i) {
            sat_.add_clause({sat::neg(g), sat::neg(a[i]), b[i]});
            sat_.add_clause({sat::neg(g), sat::neg(b[i]), a[i]});
        }
        return g;
    }

    // unsigned a < b (or <= with or_equal): g -> OR over positions i of
    // (higher bits equal, !a_i, b_i), plus the all-equal cube for <=
    sat::Lit blast_ult(const std::vector<sat::Lit>& a, const std::vector<sat::Lit>& b,
                       bool or_equal) {
        const std::size_t w = a.size();
        sat::Lit g = fresh_lit();
        std::vector<sat::Lit> disjuncts;
        for (std::size_t i = w; i-- > 0;) {
            sat::Lit c = fresh_lit();
            sat_.add_clause({sat::neg(c), sat::neg(a[i])});
            sat_.add_clause({sat::neg(c), b[i]});
            for (std::size_t j = i + 1; j < w; ++j) {
                sat_.add_clause({sat::neg(c), sat::neg(a[j]), b[j]});
                sat_.add_clause({sat::neg(c), sat::neg(b[j]), a[j]});
            }
            disjuncts.push_back(c);
        }
        if (or_equal) {
            sat::Lit c = fresh_lit();
            for (std::size_t j = 0; j < w; ++j) {
                sat_.add_clause({sat::neg(c), sat::neg(a[j]), b[j]});
                sat_.add_clause({sat::neg(c), sat::neg(b[j]), a[j]});
            }
            disjuncts.push_back(c);
        }
        std::vector<sat::Lit> clause{sat::neg(g)};
        for (sat::Lit d : disjuncts) clause.push_back(d);
        sat_.add_clause(std::move(clause));
        return g;
    }

    // ── model extraction ─────────────────────────────────────────────────

    void extract_model(Assignment& out) {
        std::vector<Rational> reals = simplex_.concrete_model();
        for (const auto& [name, sort] : script_.symbols) {
            switch (sort.kind) {
                case SortKind::Bool: {
                    auto it = bool_vars_.find(name);
                    bool v = it != bool_vars_.end() &&
                             sat_.model_value(sat::var_of(it->second)) != sat::sign_of(it->second);
                    out[name] = Value::of_bool(v);
                    break;
                }
                case SortKind::BitVec: {
                    std::uint64_t v = 0;
                    auto it = bv_bits_.find(name);
                    if (it != bv_bits_.end())
                        for (std::size_t i = 0; i < it->second.size(); ++i) {
                            sat::Lit l = it->second[i];
                            bool bit = sat_.model_value(sat::var_of(l)) != sat::sign_of(l);
                            if (bit) v |= std::uint64_t{1} << i;
                        }
                    out[name] = Value::of_bv(v, sort.width);
                    break;
                }
                case SortKind::Real: {
                    auto it = real_vars_.find(name);
                    out[name] = Value::of_rat(it == real_vars_.end()
                                                  ? Rational(0)
                                                  : reals[static_cast<std::size_t>(it->second)]);
                    break;
                }
            }
        }
    }
};

inline SolveResult solve_script(const Script& script, const SolveLimits& limits = {}) {
    SmtSolver solver(script);
    return solver.solve(limits);
}

} // namespace qbmc::smt

#endif // QBMC_SOLVER_SMTSOLVER_HPP
