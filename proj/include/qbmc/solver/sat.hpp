// ============================================================================
// qbmc/solver/sat.hpp — CDCL SAT core with a theory hook
// ============================================================================
//
// Two-watched-literal propagation, 1UIP conflict analysis, VSIDS decisions,
// phase saving, Luby restarts and activity-based learned-clause reduction.
// A TheoryHook observes the trail in assignment order and may report
// conflicts as sets of currently-true literals; the solver turns them into
// learned clauses. Literals are MiniSat-encoded: lit = 2*var + sign.
//
// ============================================================================

#ifndef QBMC_SOLVER_SAT_HPP
#define QBMC_SOLVER_SAT_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace qbmc::sat {

using Var = int;
using Lit = int;  // 2*var + (negated ? 1 : 0)

inline Lit mk_lit(Var v, bool neg = false) { return 2 * v + (neg ? 1 : 0); }
inline Lit neg(Lit l) { return l ^ 1; }
inline Var var_of(Lit l) { return l >> 1; }
inline bool sign_of(Lit l) { return l & 1; }

enum class LBool : std::uint8_t { Undef, True, False };

inline LBool lbool_of(bool b) { return b ? LBool::True : LBool::False; }

struct TheoryHook {
    virtual ~TheoryHook() = default;
    // literal became true (called in trail order); on theory conflict return
    // false and fill `conflict` with true literals whose conjunction is
    // inconsistent (empty means inconsistent regardless of assignment)
    virtual bool on_assert(Lit l, std::vector<Lit>& conflict) = 0;
    // called once per BCP fixpoint after a batch of on_assert calls
    virtual bool on_batch_end(std::vector<Lit>& conflict) = 0;
    // literals with trail position >= n were unassigned
    virtual void on_backjump(std::size_t n) = 0;
    // full consistency check once the assignment is total
    virtual bool final_check(std::vector<Lit>& conflict) = 0;
};

class Solver {
public:
    enum class Result { Sat, Unsat, Aborted };

    explicit Solver(TheoryHook* theory = nullptr) : theory_(theory) {}

    Var new_var() {
        Var v = static_cast<Var>(assign_.size());
        assign_.push_back(LBool::Undef);
        level_.push_back(0);
        reason_.push_back(kNoReason);
        activity_.push_back(0.0);
        phase_.push_back(false);
        seen_.push_back(0);
        watches_.emplace_back();
        watches_.emplace_back();
        heap_insert(v);
        return v;
    }

    std::size_t num_vars() const { return assign_.size(); }

    LBool value(Lit l) const {
        LBool v = assign_[var_of(l)];
        if (v == LBool::Undef) return v;
        return (v == LBool::True) != sign_of(l) ? LBool::True : LBool::False;
    }

    bool add_clause(std::vector<Lit> lits) {
        if (failed_) return false;
        // level-0 simplification
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        std::vector<Lit> kept;
        for (std::size_t i = 0; i < lits.size(); ++i) {
            if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) return true;  // tautology
            LBool v = value(lits[i]);
            if (v == LBool::True && level_[var_of(lits[i])] == 0) return true;
            if (v == LBool::False && level_[var_of(lits[i])] == 0) continue;
            kept.push_back(lits[i]);
        }
        if (kept.empty()) { failed_ = true; return false; }
        if (kept.size() == 1) {
            if (decision_level() != 0) { /* only used before solving; enqueue at 0 */ }
            if (!enqueue(kept[0], kNoReason)) { failed_ = true; return false; }
            return true;
        }
        attach(std::move(kept), false);
        return true;
    }

    // Solves under the current clause database. `conflict_budget` < 0 means
    // no limit; Aborted is returned when the budget runs out or `interrupt`
    // returns true (polled every few hundred conflicts/decisions).
    Result solve(long long conflict_budget = -1, const std::function<bool()>& interrupt = {}) {
        if (failed_) return Result::Unsat;
        long long conflicts_total = 0;
        std::size_t restart_idx = 0;
        std::uint64_t poll = 0;

        while (true) {
            long long restart_limit = 100 * luby(restart_idx++);
            long long conflicts_here = 0;
            while (true) {
                if (interrupt && (++poll & 255) == 0 && interrupt()) return Result::Aborted;
                std::vector<Lit> confl;
                bool theory_conflict = false;
                int confl_ref = propagate();
                if (confl_ref == kNoConflict && theory_) {
                    // feed new trail entries to the theory at BCP fixpoint
                    bool fed = false;
                    while (theory_head_ < trail_.size()) {
                        fed = true;
                        if (!theory_->on_assert(trail_[theory_head_], confl)) {
                            theory_conflict = true;
                            ++theory_head_;
                            break;
                        }
                        ++theory_head_;
                    }
                    if (!theory_conflict && fed && !theory_->on_batch_end(confl))
                        theory_conflict = true;
                }
                if (confl_ref != kNoConflict || theory_conflict) {
                    ++conflicts_total;
                    ++conflicts_here;
                    if (conflict_budget >= 0 && conflicts_total > conflict_budget)
                        return Result::Aborted;
                    std::vector<Lit> clause;
                    if (confl_ref != kNoConflict) {
                        clause.assign(clauses_[confl_ref].lits.begin(),
                                      clauses_[confl_ref].lits.end());
                    } else {
                        for (Lit l : confl) clause.push_back(neg(l));
                    }
                    if (!resolve_conflict(clause)) return Result::Unsat;
                    continue;
                }
                if (conflicts_here >= restart_limit) {
                    backjump(0);
                    break;  // restart
                }
                if (learned_count_ > reduce_limit_) reduce_db();

                Lit next = pick_branch();
                if (next == kLitUndef) {
                    if (theory_) {
                        std::vector<Lit> tc;
                        if (!theory_->final_check(tc)) {
                            ++conflicts_total;
                            std::vector<Lit> clause;
                            for (Lit l : tc) clause.push_back(neg(l));
                            if (!resolve_conflict(clause)) return Result::Unsat;
                            continue;
                        }
                    }
                    return Result::Sat;
                }
                ++decisions_;
                trail_lim_.push_back(trail_.size());
                enqueue(next, kNoReason);
            }
        }
    }

    bool model_value(Var v) const { return assign_[v] == LBool::True; }

    std::uint64_t decisions() const { return decisions_; }

private:
    static constexpr int kNoReason = -1;
    static constexpr int kNoConflict = -1;
    static constexpr Lit kLitUndef = -1;

    struct Clause {
        std::vector<Lit> lits;
        bool learned = false;
        bool deleted = false;
        double activity = 0.0;
    };

    TheoryHook* theory_;
    std::vector<Clause> clauses_;
    std::vector<std::vector<int>> watches_;  // indexed by lit
    std::vector<LBool> assign_;
    std::vector<int> level_;
    std::vector<int> reason_;
    std::vector<double> activity_;
    std::vector<bool> phase_;
    std::vector<std::uint8_t> seen_;
    std::vector<Lit> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;
    std::size_t theory_head_ = 0;
    bool failed_ = false;
    double var_inc_ = 1.0;
    std::size_t learned_count_ = 0;
    std::size_t reduce_limit_ = 20000;
    std::uint64_t decisions_ = 0;

    // binary max-heap on activity
    std::vector<Var> heap_;
    std::vector<int> heap_pos_;

    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    // learns from a conflict clause (all literals false); false means UNSAT
    bool resolve_conflict(std::vector<Lit>& clause) {
        if (clause.empty()) return false;
        int maxlvl = 0;
        for (Lit l : clause) maxlvl = std::max(maxlvl, level_[var_of(l)]);
        if (maxlvl == 0) return false;
        // theory conflicts may live entirely below the current level
        if (maxlvl < decision_level()) backjump(maxlvl);
        std::vector<Lit> learned;
        int bt = analyze(clause, learned);
        backjump(bt);
        bool ok;
        if (learned.size() == 1) {
            ok = enqueue(learned[0], kNoReason);
        } else {
            int ref = attach(std::move(learned), true);
            ok = enqueue(clauses_[ref].lits[0], ref);
        }
        decay_activities();
        return ok;
    }

    static long long luby(std::size_t i) {
        // Luby restart sequence 1,1,2,1,1,2,4,... (0-based index)
        std::size_t size = 1, seq = 0;
        while (size < i + 1) {
            ++seq;
            size = 2 * size + 1;
        }
        while (size - 1 != i) {
            size = (size - 1) >> 1;
            --seq;
            i = i % size;
        }
        return 1LL << seq;
    }

    // ── heap ────────────────────────────────────────────────────────────

    void heap_insert(Var v) {
        heap_pos_.resize(std::max<std::size_t>(heap_pos_.size(), v + 1), -1);
        if (heap_pos_[v] != -1) return;
        heap_pos_[v] = static_cast<int>(heap_.size());
        heap_.push_back(v);
        heap_up(heap_pos_[v]);
    }

    void heap_up(int i) {
        Var v = heap_[i];
        while (i > 0) {
            int p = (i - 1) / 2;
            if (activity_[heap_[p]] >= activity_[v]) break;
            heap_[i] = heap_[p];
            heap_pos_[heap_[i]] = i;
            i = p;
        }
        heap_[i] = v;
        heap_pos_[v] = i;
    }

    void heap_down(int i) {
        Var v = heap_[i];
        int n = static_cast<int>(heap_.size());
        while (true) {
            int c = 2 * i + 1;
            if (c >= n) break;
            if (c + 1 < n && activity_[heap_[c + 1]] > activity_[heap_[c]]) ++c;
            if (activity_[heap_[c]] <= activity_[v]) break;
            heap_[i] = heap_[c];
            heap_pos_[heap_[i]] = i;
            i = c;
        }
        heap_[i] = v;
        heap_pos_[v] = i;
    }

    Var heap_pop() {
        Var v = heap_[0];
        heap_pos_[v] = -1;
        heap_[0] = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            heap_pos_[heap_[0]] = 0;
            heap_down(0);
        }
        return v;
    }

    // ── clauses / propagation ───────────────────────────────────────────

    int attach(std::vector<Lit> lits, bool learned) {
        int ref = static_cast<int>(clauses_.size());
        // watch the first two; for learned clauses analyze() puts the
        // asserting literal first and a max-level literal second
        watches_[neg(lits[0])].push_back(ref);
        watches_[neg(lits[1])].push_back(ref);
        clauses_.push_back(Clause{std::move(lits), learned, false, var_inc_});
        if (learned) ++learned_count_;
        return ref;
    }

    bool enqueue(Lit l, int reason) {
        LBool v = value(l);
        if (v == LBool::False) return false;
        if (v == LBool::True) return true;
        Var x = var_of(l);
        assign_[x] = sign_of(l) ? LBool::False : LBool::True;
        level_[x] = decision_level();
        reason_[x] = reason;
        trail_.push_back(l);
        return true;
    }

    int propagate() {
        while (qhead_ < trail_.size()) {
            Lit p = trail_[qhead_++];
            auto& ws = watches_[p];
            std::size_t keep = 0;
            for (std::size_t wi = 0; wi < ws.size(); ++wi) {
                int ref = ws[wi];
                Clause& c = clauses_[ref];
                if (c.deleted) continue;
                auto& ls = c.lits;
                // make sure the false literal is ls[1]
                Lit false_lit = neg(p);
                if (ls[0] == false_lit) std::swap(ls[0], ls[1]);
                if (value(ls[0]) == LBool::True) {
                    ws[keep++] = ref;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < ls.size(); ++k) {
                    if (value(ls[k]) != LBool::False) {
                        std::swap(ls[1], ls[k]);
                        watches_[neg(ls[1])].push_back(ref);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                // unit or conflict
                ws[keep++] = ref;
                if (value(ls[0]) == LBool::False) {
                    for (std::size_t rest = wi + 1; rest < ws.size(); ++rest) ws[keep++] = ws[rest];
                    ws.resize(keep);
                    return ref;
                }
                enqueue(ls[0], ref);
            }
            ws.resize(keep);
        }
        return kNoConflict;
    }

    void bump(Var v) {
        activity_[v] += var_inc_;
        if (activity_[v] > 1e100) {
            for (auto& a : activity_) a *= 1e-100;
            var_inc_ *= 1e-100;
        }
        if (heap_pos_[v] != -1) heap_up(heap_pos_[v]);
    }

    void decay_activities() { var_inc_ /= 0.95; }

    // 1UIP analysis; returns the backjump level and fills `learned` with the
    // asserting literal first
    int analyze(const std::vector<Lit>& conflict, std::vector<Lit>& learned) {
        int counter = 0;
        Lit asserting = kLitUndef;
        learned.clear();
        learned.push_back(kLitUndef);  // slot for the asserting literal
        std::size_t index = trail_.size();
        std::vector<Lit> reason_lits = conflict;
        std::vector<Var> to_clear;

        while (true) {
            for (Lit q : reason_lits) {
                Var v = var_of(q);
                if (seen_[v] || level_[v] == 0) continue;
                seen_[v] = 1;
                to_clear.push_back(v);
                bump(v);
                if (level_[v] >= decision_level()) ++counter;
                else learned.push_back(q);
            }
            // pick the next trail literal to resolve on
            while (index > 0 && !seen_[var_of(trail_[index - 1])]) --index;
            --index;
            Lit p = trail_[index];
            Var pv = var_of(p);
            seen_[pv] = 0;
            --counter;
            if (counter == 0) {
                asserting = neg(p);
                break;
            }
            reason_lits.clear();
            int r = reason_[pv];
            if (r != kNoReason)
                for (Lit q : clauses_[r].lits)
                    if (var_of(q) != pv) reason_lits.push_back(q);
        }
        learned[0] = asserting;

        // clause minimization: drop literals implied by the rest
        std::vector<Lit> minimized;
        minimized.push_back(learned[0]);
        for (std::size_t i = 1; i < learned.size(); ++i) {
            Var v = var_of(learned[i]);
            int r = reason_[v];
            bool redundant = false;
            if (r != kNoReason) {
                redundant = true;
                for (Lit q : clauses_[r].lits)
                    if (var_of(q) != v && !seen_[var_of(q)] && level_[var_of(q)] != 0) {
                        redundant = false;
                        break;
                    }
            }
            if (!redundant) minimized.push_back(learned[i]);
        }
        learned = std::move(minimized);
        for (Var v : to_clear) seen_[v] = 0;

        if (learned.size() == 1) return 0;
        // second watch: highest level among the rest
        std::size_t best = 1;
        for (std::size_t i = 2; i < learned.size(); ++i)
            if (level_[var_of(learned[i])] > level_[var_of(learned[best])]) best = i;
        std::swap(learned[1], learned[best]);
        return level_[var_of(learned[1])];
    }

    void backjump(int lvl) {
        if (decision_level() <= lvl) return;
        std::size_t bound = trail_lim_[lvl];
        for (std::size_t i = trail_.size(); i-- > bound;) {
            Var v = var_of(trail_[i]);
            phase_[v] = assign_[v] == LBool::True;
            assign_[v] = LBool::Undef;
            reason_[v] = kNoReason;
            if (heap_pos_[v] == -1) heap_insert(v);
        }
        trail_.resize(bound);
        trail_lim_.resize(lvl);
        qhead_ = trail_.size();
        if (theory_head_ > trail_.size()) {
            theory_head_ = trail_.size();
            if (theory_) theory_->on_backjump(trail_.size());
        }
    }

    Lit pick_branch() {
        while (!heap_.empty()) {
            Var v = heap_[0];
            if (assign_[v] == LBool::Undef) {
                heap_pop();
                return mk_lit(v, !phase_[v]);
            }
            heap_pop();
        }
        return kLitUndef;
    }

    void reduce_db() {
        // drop the less active half of the learned clauses; locked clauses
        // (reasons on the trail) survive
        std::vector<std::pair<double, int>> cands;
        for (int i = 0; i < static_cast<int>(clauses_.size()); ++i) {
            Clause& c = clauses_[i];
            if (!c.learned || c.deleted || c.lits.size() <= 2) continue;
            bool locked = false;
            LBool v0 = value(c.lits[0]);
            if (v0 == LBool::True && reason_[var_of(c.lits[0])] == i) locked = true;
            if (!locked) cands.emplace_back(c.activity, i);
        }
        std::sort(cands.begin(), cands.end());
        for (std::size_t i = 0; i < cands.size() / 2; ++i) {
            clauses_[cands[i].second].deleted = true;
            --learned_count_;
        }
        reduce_limit_ = reduce_limit_ + reduce_limit_ / 2;
    }
};

} // namespace qbmc::sat

#endif // QBMC_SOLVER_SAT_HPP
