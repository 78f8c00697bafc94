// ============================================================================
// qbmc/smtlib.hpp — SMT-LIB2 text: rendering, reading, model parsing
// ============================================================================
//
// to_smtlib2 renders a Script deterministically (byte-identical for equal
// scripts). The bundled reader understands the fragment our emitter produces
// plus enough slack to consume hand-written scripts of the same shape; it
// powers the `solve` subcommand and the render/re-read self check. The model
// parser accepts the common solver model-block shapes and returns exact
// values.
//
// ============================================================================

#ifndef QBMC_SMTLIB_HPP
#define QBMC_SMTLIB_HPP

#include "qbmc/formula.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qbmc {

class SmtlibError : public std::runtime_error {
public:
    explicit SmtlibError(const std::string& what) : std::runtime_error(what) {}
};

// ── values and assignments ──────────────────────────────────────────────────

struct Value {
    enum Kind { VBool, VRat, VBv };
    Kind kind = VBool;
    bool b = false;
    Rational rat;
    std::uint64_t bv = 0;
    unsigned width = 0;

    static Value of_bool(bool v) {
        Value x;
        x.kind = VBool;
        x.b = v;
        return x;
    }
    static Value of_rat(Rational r) {
        Value x;
        x.kind = VRat;
        x.rat = std::move(r);
        return x;
    }
    static Value of_bv(std::uint64_t v, unsigned w) {
        Value x;
        x.kind = VBv;
        x.bv = v;
        x.width = w;
        return x;
    }

    friend bool operator==(const Value&, const Value&) = default;
};

using Assignment = std::map<std::string, Value>;

// ── rendering ───────────────────────────────────────────────────────────────

namespace detail {

inline void render_rational(std::ostringstream& os, const Rational& r) {
    const bool neg = r.is_negative();
    Rational a = neg ? -r : r;
    if (neg) os << "(- ";
    if (a.is_integer()) os << a.num().to_string();
    else os << "(/ " << a.num().to_string() << " " << a.den().to_string() << ")";
    if (neg) os << ")";
}

inline void render_term(std::ostringstream& os, const Formula& f) {
    switch (f->kind) {
        case FNode::BoolConst:
            os << (f->bval ? "true" : "false");
            return;
        case FNode::RatConst:
            render_rational(os, f->rat);
            return;
        case FNode::BvConst:
            os << "(_ bv" << f->bv << " " << f->width << ")";
            return;
        case FNode::Var:
            os << f->name;
            return;
        case FNode::Not:
            os << "(not ";
            render_term(os, f->args[0]);
            os << ")";
            return;
        case FNode::And:
        case FNode::Or: {
            if (f->args.empty()) {
                os << (f->kind == FNode::And ? "true" : "false");
                return;
            }
            if (f->args.size() == 1) {
                render_term(os, f->args[0]);
                return;
            }
            os << (f->kind == FNode::And ? "(and" : "(or");
            for (const auto& a : f->args) {
                os << " ";
                render_term(os, a);
            }
            os << ")";
            return;
        }
        case FNode::Implies:
            os << "(=> ";
            render_term(os, f->args[0]);
            os << " ";
            render_term(os, f->args[1]);
            os << ")";
            return;
        case FNode::Eq:
            os << "(= ";
            render_term(os, f->args[0]);
            os << " ";
            render_term(os, f->args[1]);
            os << ")";
            return;
        case FNode::BvComp: {
            const char* op = "bvult";
            switch (f->bvop) {
                case BvOp::Ult: op = "bvult"; break;
                case BvOp::Ule: op = "bvule"; break;
                case BvOp::Ugt: op = "bvugt"; break;
                case BvOp::Uge: op = "bvuge"; break;
            }
            os << "(" << op << " ";
            render_term(os, f->args[0]);
            os << " ";
            render_term(os, f->args[1]);
            os << ")";
            return;
        }
        case FNode::LinAtom: {
            const char* op = "<=";
            switch (f->rel) {
                case Rel::Lt: op = "<"; break;
                case Rel::Le: op = "<="; break;
                case Rel::Eq: op = "="; break;
                case Rel::Ge: op = ">="; break;
                case Rel::Gt: op = ">"; break;
            }
            os << "(" << op << " ";
            auto render_one = [&os](const LinTerm& t) {
                if (t.coeff == Rational(1)) {
                    os << t.var;
                } else {
                    os << "(* ";
                    render_rational(os, t.coeff);
                    os << " " << t.var << ")";
                }
            };
            if (f->terms.size() == 1) {
                render_one(f->terms[0]);
            } else {
                os << "(+";
                for (const auto& t : f->terms) {
                    os << " ";
                    render_one(t);
                }
                os << ")";
            }
            os << " ";
            render_rational(os, f->rat);
            os << ")";
            return;
        }
        case FNode::Quant: {
            os << (f->is_forall ? "(forall (" : "(exists (");
            for (std::size_t i = 0; i < f->binders.size(); ++i) {
                if (i) os << " ";
                os << "(" << f->binders[i].first << " " << sort_text(f->binders[i].second) << ")";
            }
            os << ") ";
            render_term(os, f->args[0]);
            os << ")";
            return;
        }
        case FNode::Template:
        case FNode::SelectorTag:
            render_term(os, f->args[0]);
            return;
    }
}

} // namespace detail

inline std::string render_formula(const Formula& f) {
    std::ostringstream os;
    detail::render_term(os, f);
    return os.str();
}

inline std::string to_smtlib2(const Script& script) {
    check_well_sorted(script);
    std::ostringstream os;
    if (script.produce_models) os << "(set-option :produce-models true)\n";
    if (script.emit_logic && !script.logic.empty()) os << "(set-logic " << script.logic << ")\n";
    for (const auto& [name, sort] : script.symbols)
        os << "(declare-const " << name << " " << sort_text(sort) << ")\n";
    for (const auto& a : script.assertions) {
        os << "(assert ";
        detail::render_term(os, a);
        os << ")\n";
    }
    os << "(check-sat)\n";
    if (script.produce_models) os << "(get-model)\n";
    return os.str();
}

// ── s-expressions ───────────────────────────────────────────────────────────

namespace detail {

struct Sexp {
    bool atom = false;
    std::string text;         // atom payload
    std::vector<Sexp> items;  // list payload
};

class SexpReader {
public:
    explicit SexpReader(std::string_view src) : src_(src) {}

    std::optional<Sexp> next() {
        skip_ws();
        if (pos_ >= src_.size()) return std::nullopt;
        return read();
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ';') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    Sexp read() {
        skip_ws();
        if (pos_ >= src_.size()) throw SmtlibError("unexpected end of input");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Sexp s;
            while (true) {
                skip_ws();
                if (pos_ >= src_.size()) throw SmtlibError("unbalanced parenthesis");
                if (src_[pos_] == ')') {
                    ++pos_;
                    return s;
                }
                s.items.push_back(read());
            }
        }
        if (c == ')') throw SmtlibError("unexpected ')'");
        Sexp s;
        s.atom = true;
        if (c == '|') {
            ++pos_;
            while (pos_ < src_.size() && src_[pos_] != '|') s.text.push_back(src_[pos_++]);
            if (pos_ >= src_.size()) throw SmtlibError("unterminated quoted symbol");
            ++pos_;
            return s;
        }
        if (c == '"') {
            ++pos_;
            while (pos_ < src_.size() && src_[pos_] != '"') s.text.push_back(src_[pos_++]);
            if (pos_ >= src_.size()) throw SmtlibError("unterminated string");
            ++pos_;
            return s;
        }
        while (pos_ < src_.size()) {
            char d = src_[pos_];
            if (d == '(' || d == ')' || d == ' ' || d == '\t' || d == '\n' || d == '\r' || d == ';')
                break;
            s.text.push_back(d);
            ++pos_;
        }
        return s;
    }
};

inline bool is_number_atom(const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = 0;
    if (t[0] == '-') i = 1;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t[i])) && t[i] != '.') return false;
    return true;
}

inline Sort parse_sort_sexp(const Sexp& s) {
    if (s.atom) {
        if (s.text == "Bool") return Sort::boolean();
        if (s.text == "Real") return Sort::real();
        throw SmtlibError("unsupported sort " + s.text);
    }
    if (s.items.size() == 3 && s.items[0].atom && s.items[0].text == "_" && s.items[1].atom &&
        s.items[1].text == "BitVec" && s.items[2].atom)
        return Sort::bitvec(static_cast<unsigned>(std::stoul(s.items[2].text)));
    throw SmtlibError("unsupported sort expression");
}

// bit-vector literal forms: (_ bvN w), #b…, #x…
inline std::optional<std::pair<std::uint64_t, unsigned>> bv_literal_sexp(const Sexp& s) {
    if (s.atom) {
        if (s.text.starts_with("#b")) {
            std::uint64_t v = 0;
            unsigned w = 0;
            for (std::size_t i = 2; i < s.text.size(); ++i) {
                v = (v << 1) | static_cast<std::uint64_t>(s.text[i] == '1');
                ++w;
            }
            return std::make_pair(v, w);
        }
        if (s.text.starts_with("#x")) {
            std::uint64_t v = 0;
            unsigned w = 0;
            for (std::size_t i = 2; i < s.text.size(); ++i) {
                char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s.text[i])));
                unsigned d = c <= '9' ? static_cast<unsigned>(c - '0')
                                      : static_cast<unsigned>(c - 'a' + 10);
                v = (v << 4) | d;
                w += 4;
            }
            return std::make_pair(v, w);
        }
        return std::nullopt;
    }
    if (s.items.size() == 3 && s.items[0].atom && s.items[0].text == "_" && s.items[1].atom &&
        s.items[1].text.starts_with("bv") && s.items[2].atom) {
        std::uint64_t v = std::stoull(s.items[1].text.substr(2));
        unsigned w = static_cast<unsigned>(std::stoul(s.items[2].text));
        return std::make_pair(v, w);
    }
    return std::nullopt;
}

} // namespace detail

// ── reading scripts ─────────────────────────────────────────────────────────

namespace detail {

struct LinExpr {
    std::map<std::string, Rational> coeffs;
    Rational constant;
};

class ScriptReader {
public:
    Script read(std::string_view text) {
        SexpReader rd(text);
        while (auto s = rd.next()) handle_command(*s);
        return std::move(script_);
    }

private:
    Script script_;
    std::vector<std::pair<std::string, Sort>> bound_;

    static const std::string& head(const Sexp& s) {
        if (s.atom || s.items.empty() || !s.items[0].atom)
            throw SmtlibError("expected a command");
        return s.items[0].text;
    }

    void handle_command(const Sexp& s) {
        const std::string& h = head(s);
        if (h == "set-option") {
            if (s.items.size() == 3 && s.items[1].atom && s.items[1].text == ":produce-models")
                script_.produce_models = s.items[2].atom && s.items[2].text == "true";
            return;
        }
        if (h == "set-logic") {
            if (s.items.size() == 2 && s.items[1].atom) script_.logic = s.items[1].text;
            return;
        }
        if (h == "set-info" || h == "check-sat" || h == "get-model" || h == "exit") return;
        if (h == "declare-const") {
            if (s.items.size() != 3 || !s.items[1].atom) throw SmtlibError("bad declare-const");
            script_.declare(s.items[1].text, parse_sort(s.items[2]));
            return;
        }
        if (h == "declare-fun") {
            if (s.items.size() != 4 || !s.items[1].atom) throw SmtlibError("bad declare-fun");
            if (!s.items[2].items.empty())
                throw SmtlibError("uninterpreted functions are not supported");
            script_.declare(s.items[1].text, parse_sort(s.items[3]));
            return;
        }
        if (h == "assert") {
            if (s.items.size() != 2) throw SmtlibError("bad assert");
            script_.assertions.push_back(parse_term(s.items[1]));
            return;
        }
        throw SmtlibError("unsupported command " + h);
    }

    static Sort parse_sort(const Sexp& s) { return parse_sort_sexp(s); }

    const Sort* lookup(const std::string& name) const {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
            if (it->first == name) return &it->second;
        return script_.sort_of(name);
    }

    static std::optional<std::pair<std::uint64_t, unsigned>> bv_literal(const Sexp& s) {
        return bv_literal_sexp(s);
    }

    Sort sort_of_term(const Formula& f) {
        switch (f->kind) {
            case FNode::RatConst: return Sort::real();
            case FNode::BvConst: return Sort::bitvec(f->width);
            case FNode::Var: return f->sort;
            default: return Sort::boolean();
        }
    }

    Formula parse_term(const Sexp& s) {
        if (s.atom) {
            if (s.text == "true") return f_true();
            if (s.text == "false") return f_false();
            if (auto bv = bv_literal(s)) return f_bv(bv->first, bv->second);
            if (is_number_atom(s.text)) return f_rat(Rational::from_string(s.text));
            const Sort* sort = lookup(s.text);
            if (!sort) throw SmtlibError("undeclared symbol " + s.text);
            return f_var(s.text, *sort);
        }
        if (auto bv = bv_literal(s)) return f_bv(bv->first, bv->second);
        if (s.items.empty() || !s.items[0].atom) throw SmtlibError("bad term");
        const std::string& h = s.items[0].text;

        auto args_from = [&](std::size_t start) {
            std::vector<Formula> out;
            for (std::size_t i = start; i < s.items.size(); ++i)
                out.push_back(parse_term(s.items[i]));
            return out;
        };

        if (h == "and") return f_and(args_from(1));
        if (h == "or") return f_or(args_from(1));
        if (h == "not") {
            auto a = args_from(1);
            if (a.size() != 1) throw SmtlibError("not expects one operand");
            return f_not(a[0]);
        }
        if (h == "=>") {
            auto a = args_from(1);
            if (a.size() < 2) throw SmtlibError("=> expects two operands");
            Formula r = a.back();
            for (std::size_t i = a.size() - 1; i-- > 0;) r = f_implies(a[i], r);
            return r;
        }
        if (h == "=" || h == "<" || h == "<=" || h == ">=" || h == ">") return parse_relation(s);
        if (h == "bvult" || h == "bvule" || h == "bvugt" || h == "bvuge") {
            auto a = args_from(1);
            if (a.size() != 2) throw SmtlibError(h + " expects two operands");
            BvOp op = h == "bvult"   ? BvOp::Ult
                      : h == "bvule" ? BvOp::Ule
                      : h == "bvugt" ? BvOp::Ugt
                                     : BvOp::Uge;
            return f_bvcomp(op, a[0], a[1]);
        }
        if (h == "forall" || h == "exists") {
            if (s.items.size() != 3 || s.items[1].atom) throw SmtlibError("bad quantifier");
            std::vector<std::pair<std::string, Sort>> binders;
            for (const auto& b : s.items[1].items) {
                if (b.atom || b.items.size() != 2 || !b.items[0].atom)
                    throw SmtlibError("bad binder");
                binders.emplace_back(b.items[0].text, parse_sort(b.items[1]));
            }
            for (const auto& b : binders) bound_.push_back(b);
            Formula body = parse_term(s.items[2]);
            bound_.resize(bound_.size() - binders.size());
            return f_quant(h == "forall", std::move(binders), std::move(body));
        }
        throw SmtlibError("unsupported operator " + h);
    }

    // arithmetic relations; (= a b) may also compare booleans or bit-vectors
    Formula parse_relation(const Sexp& s) {
        const std::string& h = s.items[0].text;
        if (s.items.size() != 3) throw SmtlibError(h + " expects two operands");
        if (h == "=") {
            // symbol/literal equalities stay plain equalities (round-trip
            // faithful); compound arithmetic becomes a linear atom
            auto simple = [](const Sexp& x) { return x.atom || bv_literal_sexp(x).has_value(); };
            if (!simple(s.items[1]) || !simple(s.items[2])) {
                if (auto le = try_linexpr(s.items[1])) {
                    if (auto re = try_linexpr(s.items[2])) {
                        bool pure_const = le->coeffs.empty() && re->coeffs.empty();
                        if (!pure_const) return relation_atom(*le, *re, Rel::Eq);
                    }
                }
            }
            Formula a = parse_term(s.items[1]);
            Formula b = parse_term(s.items[2]);
            return f_eq(a, b);
        }
        auto le = try_linexpr(s.items[1]);
        auto re = try_linexpr(s.items[2]);
        if (!le || !re) throw SmtlibError("non-linear arithmetic is not supported");
        Rel rel = h == "<" ? Rel::Lt : h == "<=" ? Rel::Le : h == ">=" ? Rel::Ge : Rel::Gt;
        return relation_atom(*le, *re, rel);
    }

    Formula relation_atom(const LinExpr& l, const LinExpr& r, Rel rel) {
        std::vector<LinTerm> terms;
        std::map<std::string, Rational> merged = l.coeffs;
        for (const auto& [v, c] : r.coeffs) {
            auto [it, fresh] = merged.emplace(v, -c);
            if (!fresh) it->second -= c;
        }
        for (const auto& [v, c] : merged) terms.push_back(LinTerm{c, v});
        return f_linatom(terms, rel, r.constant - l.constant);
    }

    std::optional<LinExpr> try_linexpr(const Sexp& s) {
        LinExpr e;
        if (!accumulate(s, Rational(1), e)) return std::nullopt;
        return e;
    }

    bool accumulate(const Sexp& s, const Rational& scale, LinExpr& e) {
        if (s.atom) {
            if (is_number_atom(s.text)) {
                e.constant += scale * Rational::from_string(s.text);
                return true;
            }
            const Sort* sort = lookup(s.text);
            if (!sort || sort->kind != SortKind::Real) return false;
            auto [it, fresh] = e.coeffs.emplace(s.text, scale);
            if (!fresh) it->second += scale;
            return true;
        }
        if (s.items.empty() || !s.items[0].atom) return false;
        const std::string& h = s.items[0].text;
        if (h == "+") {
            for (std::size_t i = 1; i < s.items.size(); ++i)
                if (!accumulate(s.items[i], scale, e)) return false;
            return true;
        }
        if (h == "-") {
            if (s.items.size() == 2) return accumulate(s.items[1], -scale, e);
            if (!accumulate(s.items[1], scale, e)) return false;
            for (std::size_t i = 2; i < s.items.size(); ++i)
                if (!accumulate(s.items[i], -scale, e)) return false;
            return true;
        }
        if (h == "*") {
            // one side must be constant
            if (s.items.size() != 3) return false;
            if (auto c = try_const(s.items[1])) return accumulate(s.items[2], scale * *c, e);
            if (auto c = try_const(s.items[2])) return accumulate(s.items[1], scale * *c, e);
            return false;
        }
        if (h == "/") {
            if (s.items.size() != 3) return false;
            auto n = try_const(s.items[1]);
            auto d = try_const(s.items[2]);
            if (!n || !d || d->is_zero()) return false;
            e.constant += scale * (*n / *d);
            return true;
        }
        return false;
    }

    std::optional<Rational> try_const(const Sexp& s) {
        if (s.atom && is_number_atom(s.text)) return Rational::from_string(s.text);
        if (!s.atom && !s.items.empty() && s.items[0].atom) {
            const std::string& h = s.items[0].text;
            if (h == "-" && s.items.size() == 2) {
                auto v = try_const(s.items[1]);
                if (v) return -*v;
            }
            if (h == "/" && s.items.size() == 3) {
                auto n = try_const(s.items[1]);
                auto d = try_const(s.items[2]);
                if (n && d && !d->is_zero()) return *n / *d;
            }
        }
        return std::nullopt;
    }
};

} // namespace detail

// Re-reads SMT-LIB2 text into a Script (declare-const/assert fragment).
inline Script read_smtlib2(std::string_view text) { return detail::ScriptReader().read(text); }

// ── model blocks ────────────────────────────────────────────────────────────

namespace detail {

inline std::optional<Rational> rational_value_sexp(const Sexp& x) {
    if (x.atom && is_number_atom(x.text)) return Rational::from_string(x.text);
    if (!x.atom && !x.items.empty() && x.items[0].atom) {
        const std::string& h = x.items[0].text;
        if (h == "-" && x.items.size() == 2) {
            auto v = rational_value_sexp(x.items[1]);
            if (v) return -*v;
        }
        if (h == "/" && x.items.size() == 3) {
            auto n = rational_value_sexp(x.items[1]);
            auto d = rational_value_sexp(x.items[2]);
            if (n && d && !d->is_zero()) return *n / *d;
        }
    }
    return std::nullopt;
}

inline Value parse_value(const Sexp& s, const Sort& sort) {
    if (sort.kind == SortKind::Bool) {
        if (s.atom && (s.text == "true" || s.text == "false"))
            return Value::of_bool(s.text == "true");
        throw SmtlibError("expected boolean value");
    }
    if (sort.kind == SortKind::BitVec) {
        if (auto bv = bv_literal_sexp(s)) return Value::of_bv(bv->first, sort.width);
        throw SmtlibError("expected bit-vector value");
    }
    auto v = rational_value_sexp(s);
    if (!v) throw SmtlibError("expected rational value");
    return Value::of_rat(*v);
}

} // namespace detail

// Parses a solver's model block against the script's symbol table. Handles
// `(model (define-fun …))`, `((define-fun …))` and bare `((sym val)…)`
// shapes; symbols not in the table are ignored.
inline Assignment parse_smt_model(std::string_view text, const Script& script) {
    detail::SexpReader rd(text);
    auto top = rd.next();
    if (!top) throw SmtlibError("empty model text");
    if (top->atom) throw SmtlibError("malformed model block");
    std::size_t start = 0;
    if (!top->items.empty() && top->items[0].atom && top->items[0].text == "model") start = 1;

    Assignment out;
    for (std::size_t idx = start; idx < top->items.size(); ++idx) {
        const detail::Sexp& entry = top->items[idx];
        if (entry.atom) throw SmtlibError("malformed model entry");
        if (!entry.items.empty() && entry.items[0].atom && entry.items[0].text == "define-fun") {
            if (entry.items.size() != 5 || !entry.items[1].atom)
                throw SmtlibError("malformed define-fun");
            const std::string& name = entry.items[1].text;
            const Sort* sort = script.sort_of(name);
            if (!sort) continue;  // internal solver symbol
            Sort declared = detail::parse_sort_sexp(entry.items[3]);
            if (!(declared == *sort)) throw SmtlibError("model sort mismatch for " + name);
            out[name] = detail::parse_value(entry.items[4], *sort);
            continue;
        }
        if (entry.items.size() == 2 && entry.items[0].atom) {
            const std::string& name = entry.items[0].text;
            const Sort* sort = script.sort_of(name);
            if (!sort) continue;
            out[name] = detail::parse_value(entry.items[1], *sort);
            continue;
        }
        throw SmtlibError("unrecognized model entry shape");
    }
    return out;
}

} // namespace qbmc

#endif // QBMC_SMTLIB_HPP
