// ============================================================================
// qbmc/solver/simplex.hpp — incremental Simplex for linear real arithmetic
// ============================================================================
//
// General-form dual Simplex over exact rationals in the style of
// Dutertre/de Moura: atoms are bounds on problem or slack variables, strict
// bounds are handled with delta-rationals (value + inf*eps), assertions are
// cheap and undoable, Check() pivots to feasibility or produces an
// irreducible explanation from the conflicting row. Bland's rule keeps
// pivoting terminating.
//
// ============================================================================

#ifndef QBMC_SOLVER_SIMPLEX_HPP
#define QBMC_SOLVER_SIMPLEX_HPP

#include "qbmc/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace qbmc::lra {

// value + inf * epsilon, epsilon infinitesimal positive
struct DeltaRat {
    Rational real;
    Rational inf;

    DeltaRat() = default;
    DeltaRat(Rational r, Rational i) : real(std::move(r)), inf(std::move(i)) {}
    static DeltaRat of(Rational r) { return DeltaRat{std::move(r), Rational(0)}; }

    friend bool operator==(const DeltaRat& a, const DeltaRat& b) {
        return a.real == b.real && a.inf == b.inf;
    }
    friend bool operator<(const DeltaRat& a, const DeltaRat& b) {
        if (a.real != b.real) return a.real < b.real;
        return a.inf < b.inf;
    }
    friend bool operator<=(const DeltaRat& a, const DeltaRat& b) { return a < b || a == b; }

    DeltaRat operator+(const DeltaRat& o) const { return {real + o.real, inf + o.inf}; }
    DeltaRat operator-(const DeltaRat& o) const { return {real - o.real, inf - o.inf}; }
    DeltaRat scaled(const Rational& c) const { return {real * c, inf * c}; }
};

class Simplex {
public:
    using VarId = int;

    VarId new_var() {
        VarId v = static_cast<VarId>(beta_.size());
        beta_.emplace_back();
        lower_.emplace_back();
        upper_.emplace_back();
        rows_.emplace_back();
        occ_.emplace_back();
        return v;
    }

    // introduces a slack variable s with defining row s = expr; every
    // variable in expr must currently be nonbasic (call before any Check)
    VarId slack_for(const std::vector<std::pair<Rational, VarId>>& expr) {
        VarId s = new_var();
        Row row;
        DeltaRat val;
        for (const auto& [coeff, v] : expr) {
            if (coeff.is_zero()) continue;
            auto [it, fresh] = row.emplace(v, coeff);
            if (!fresh) it->second += coeff;
            if (it->second.is_zero()) row.erase(it);
        }
        for (const auto& [v, coeff] : row) {
            occ_[v].insert(s);
            val = val + beta_[v].scaled(coeff);
        }
        beta_[s] = val;
        rows_[s] = std::move(row);
        return s;
    }

    std::size_t mark() const { return undo_.size(); }

    void undo_to(std::size_t m) {
        while (undo_.size() > m) {
            UndoRec rec = std::move(undo_.back());
            undo_.pop_back();
            (rec.is_upper ? upper_ : lower_)[rec.var] = std::move(rec.old_bound);
        }
    }

    bool assert_upper(VarId x, DeltaRat c, int reason, std::vector<int>& conflict) {
        if (upper_[x] && upper_[x]->value <= c) return true;
        if (lower_[x] && c < lower_[x]->value) {
            conflict = {lower_[x]->reason, reason};
            return false;
        }
        undo_.push_back(UndoRec{x, true, upper_[x]});
        upper_[x] = Bound{c, reason};
        if (is_basic(x)) touch(x);
        else if (c < beta_[x]) update(x, c);
        return true;
    }

    bool assert_lower(VarId x, DeltaRat c, int reason, std::vector<int>& conflict) {
        if (lower_[x] && c <= lower_[x]->value) return true;
        if (upper_[x] && upper_[x]->value < c) {
            conflict = {upper_[x]->reason, reason};
            return false;
        }
        undo_.push_back(UndoRec{x, false, lower_[x]});
        lower_[x] = Bound{c, reason};
        if (is_basic(x)) touch(x);
        else if (beta_[x] < c) update(x, c);
        return true;
    }

    // pivots until every basic variable is within its bounds, or reports the
    // reasons of an unsatisfiable row. Any violated basic variable sits in
    // the dirty worklist; Bland's rule (smallest indices) prevents cycling.
    bool check(std::vector<int>& conflict) {
        while (!dirty_.empty()) {
            VarId b = *dirty_.begin();
            if (!is_basic(b)) {
                dirty_.erase(dirty_.begin());
                continue;
            }
            bool below = lower_[b] && beta_[b] < lower_[b]->value;
            bool above = !below && upper_[b] && upper_[b]->value < beta_[b];
            if (!below && !above) {
                dirty_.erase(dirty_.begin());
                continue;
            }

            const Row& row = *rows_[b];
            VarId pivot_var = -1;
            for (const auto& [x, a] : row) {
                bool can_grow = !upper_[x] || beta_[x] < upper_[x]->value;
                bool can_shrink = !lower_[x] || lower_[x]->value < beta_[x];
                bool ok = below ? ((a.sign() > 0 && can_grow) || (a.sign() < 0 && can_shrink))
                                : ((a.sign() > 0 && can_shrink) || (a.sign() < 0 && can_grow));
                if (ok) {
                    pivot_var = x;
                    break;  // Bland: smallest index (map iterates in order)
                }
            }
            if (pivot_var == -1) {
                conflict.clear();
                conflict.push_back(below ? lower_[b]->reason : upper_[b]->reason);
                for (const auto& [x, a] : row) {
                    bool need_upper = below ? a.sign() > 0 : a.sign() < 0;
                    conflict.push_back(need_upper ? upper_[x]->reason : lower_[x]->reason);
                }
                return false;
            }
            pivot_and_update(b, pivot_var, below ? lower_[b]->value : upper_[b]->value);
        }
        return true;
    }

    // concrete rational values; valid right after a successful check()
    std::vector<Rational> concrete_model() const {
        // pick eps small enough to satisfy every bound with an inf gap
        Rational eps(1);
        auto tighten = [&eps](const Rational& num, const Rational& den) {
            // require eps <= num/den, num > 0, den > 0
            Rational cand = num / den;
            if (cand < eps) eps = cand;
        };
        for (VarId v = 0; v < static_cast<VarId>(beta_.size()); ++v) {
            if (lower_[v]) {
                const DeltaRat& lo = lower_[v]->value;
                Rational dr = beta_[v].real - lo.real;
                Rational di = beta_[v].inf - lo.inf;
                if (di.is_negative()) tighten(dr, -di);
            }
            if (upper_[v]) {
                const DeltaRat& up = upper_[v]->value;
                Rational dr = up.real - beta_[v].real;
                Rational di = up.inf - beta_[v].inf;
                if (di.is_negative()) tighten(dr, -di);
            }
        }
        eps = eps / Rational(2);
        std::vector<Rational> out;
        out.reserve(beta_.size());
        for (const auto& b : beta_) out.push_back(b.real + b.inf * eps);
        return out;
    }

private:
    using Row = std::map<VarId, Rational>;

    struct Bound {
        DeltaRat value;
        int reason = -1;
    };

    struct UndoRec {
        VarId var;
        bool is_upper;
        std::optional<Bound> old_bound;
    };

    std::vector<DeltaRat> beta_;
    std::vector<std::optional<Bound>> lower_, upper_;
    std::vector<std::optional<Row>> rows_;  // set iff basic
    std::vector<std::set<VarId>> occ_;      // nonbasic var -> basic rows using it
    std::vector<UndoRec> undo_;
    std::set<VarId> dirty_;  // superset of the violated basic variables

    bool is_basic(VarId v) const { return rows_[v].has_value(); }

    void touch(VarId v) { dirty_.insert(v); }

    // sets nonbasic x to v, adjusting dependent basics
    void update(VarId x, const DeltaRat& v) {
        DeltaRat diff = v - beta_[x];
        for (VarId b : occ_[x]) {
            beta_[b] = beta_[b] + diff.scaled((*rows_[b])[x]);
            touch(b);
        }
        beta_[x] = v;
    }

    void pivot_and_update(VarId b, VarId x, const DeltaRat& v) {
        Rational a = (*rows_[b])[x];
        DeltaRat theta = (v - beta_[b]).scaled(Rational(1) / a);
        beta_[b] = v;
        beta_[x] = beta_[x] + theta;
        for (VarId other : occ_[x])
            if (other != b) {
                beta_[other] = beta_[other] + theta.scaled((*rows_[other])[x]);
                touch(other);
            }
        pivot(b, x);
        touch(x);
    }

    // swaps basic b with nonbasic x
    void pivot(VarId b, VarId x) {
        Row brow = std::move(*rows_[b]);
        rows_[b].reset();
        Rational a = brow[x];
        brow.erase(x);
        for (const auto& [y, c] : brow) {
            (void)c;
            occ_[y].erase(b);
        }
        occ_[x].erase(b);

        // x = (1/a) b - sum (c/a) y
        Row xrow;
        Rational inv_a = Rational(1) / a;
        xrow[b] = inv_a;
        occ_[b].insert(x);
        for (const auto& [y, c] : brow) {
            xrow[y] = -(c * inv_a);
            occ_[y].insert(x);
        }

        // substitute x into every other row that mentions it
        std::set<VarId> users = occ_[x];
        for (VarId u : users) {
            Row& urow = *rows_[u];
            auto it = urow.find(x);
            if (it == urow.end()) continue;
            Rational cx = it->second;
            urow.erase(it);
            occ_[x].erase(u);
            for (const auto& [y, cy] : xrow) {
                auto [jt, fresh] = urow.emplace(y, cx * cy);
                if (!fresh) jt->second += cx * cy;
                if (jt->second.is_zero()) {
                    urow.erase(jt);
                    occ_[y].erase(u);
                } else {
                    occ_[y].insert(u);
                }
            }
        }
        rows_[x] = std::move(xrow);
    }
};

} // namespace qbmc::lra

#endif // QBMC_SOLVER_SIMPLEX_HPP
