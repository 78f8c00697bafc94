// ============================================================================
// qbmc/model.hpp — textual model format: parse and serialize
// ============================================================================
//
// Line-oriented structured text, version header "qbmc-model 1". Flat
// documents describe a single automaton with top-level declarations; network
// documents wrap per-component declarations in automaton blocks, declare
// shared variables with the `global` suffix and pick components with
// `network { p1, p2 }`. In a network document the `bad` entry names
// per-component marker locations (critical sections); the mutex bad set over
// the product is built at compose time.
//
// Grammar (comments start with '#', decimals are exact, flow names may carry
// a derivative prime):
//
//   model      := header decl*
//   header     := "qbmc-model 1"
//   decl       := vardecl | location | transition | init | bad
//               | automaton | network | kmax
//   vardecl    := "var" NAME ("real" | "int" INT ".." INT) ("global")?
//   location   := "loc" NAME "{" ("inv" constraint)* ("flow" NAME "'"? "in" "[" rat "," rat "]")* "}"
//   transition := "trans" NAME "->" NAME "{" ("guard" constraint)* ("update" NAME ":=" (rat | NAME | "[" rat "," rat "]"))* "}"
//   init       := "init" NAME ("with" constraint)*
//   bad        := "bad" "{" NAME ("," NAME)* "}" ("with" constraint)*
//   automaton  := "automaton" NAME "{" (vardecl | location | transition | init)* "}"
//   network    := "network" "{" NAME ("," NAME)* "}"
//   kmax       := "kmax" INT
//   constraint := linexpr ("<"|"<="|"="|">="|">") rat
//   linexpr    := term (("+"|"-") term)*      term := (rat "*")? NAME
//   rat        := ("-")? DIGITS ("." DIGITS | "/" DIGITS)?
//
// ============================================================================

#ifndef QBMC_MODEL_HPP
#define QBMC_MODEL_HPP

#include "qbmc/ha.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qbmc {

struct NetworkSection {
    std::vector<std::string> components;
    std::vector<VarDecl> globals;
    friend bool operator==(const NetworkSection&, const NetworkSection&) = default;
};

struct CheckSection {
    std::vector<BadEntry> bad;
    std::optional<long long> default_kmax;
    friend bool operator==(const CheckSection&, const CheckSection&) = default;
};

struct ModelDocument {
    std::string format_version = "1";
    std::vector<HybridAutomaton> automata;
    std::optional<NetworkSection> network;
    std::optional<CheckSection> check;
};

inline bool operator==(const ComponentInfo& a, const ComponentInfo& b) {
    return a.name == b.name && a.locations == b.locations;
}
inline bool operator==(const HybridAutomaton& a, const HybridAutomaton& b) {
    return a.name == b.name && a.vars == b.vars && a.locations == b.locations &&
           a.transitions == b.transitions && a.init_location == b.init_location &&
           a.init_guard == b.init_guard && a.bad == b.bad && a.components == b.components;
}
inline bool operator==(const ModelDocument& a, const ModelDocument& b) {
    return a.format_version == b.format_version && a.automata == b.automata &&
           a.network == b.network && a.check == b.check;
}

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t col, const std::string& what)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + what),
          line_(line), col_(col) {}
    std::size_t line() const { return line_; }
    std::size_t col() const { return col_; }

private:
    std::size_t line_, col_;
};

namespace detail {

enum class Tok { Name, Number, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }

    Token take() {
        Token t = cur_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(cur_.line, cur_.col, msg);
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;
    Token cur_;

    void bump() {
        if (src_[pos_] == '\n') { ++line_; col_ = 1; } else ++col_;
        ++pos_;
    }

    void advance() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else break;
        }
        cur_.line = line_;
        cur_.col = col_;
        if (pos_ >= src_.size()) { cur_.kind = Tok::End; cur_.text.clear(); return; }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                bump();
            cur_.kind = Tok::Name;
            cur_.text = std::string(src_.substr(start, pos_ - start));
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
            // fraction or exact decimal, but leave ".." to the range syntax
            if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
                std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
                bump();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
            } else if (pos_ + 1 < src_.size() && src_[pos_] == '/' &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
                bump();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
            }
            cur_.kind = Tok::Number;
            cur_.text = std::string(src_.substr(start, pos_ - start));
            return;
        }
        // multi-char symbols first
        static const char* two[] = {"->", ":=", "<=", ">=", ".."};
        for (const char* s : two) {
            if (src_.substr(pos_).starts_with(s)) {
                cur_.kind = Tok::Sym;
                cur_.text = s;
                bump();
                bump();
                return;
            }
        }
        cur_.kind = Tok::Sym;
        cur_.text = std::string(1, c);
        bump();
    }
};

class ModelParser {
public:
    explicit ModelParser(std::string_view src) : lex_(src) {}

    ModelDocument parse() {
        // header "qbmc-model 1" (the lexer splits the hyphen)
        if (!at_name("qbmc")) fail("expected 'qbmc-model' header");
        lex_.take();
        expect_sym("-");
        expect_name("model");
        if (lex_.peek().kind != Tok::Number || lex_.peek().text != "1")
            lex_.fail("expected format version 1");
        lex_.take();
        doc_.format_version = "1";

        while (lex_.peek().kind != Tok::End) parse_decl();

        finish_flat();
        resolve_scopes();
        return std::move(doc_);
    }

private:
    Lexer lex_;
    ModelDocument doc_;
    // parts of the flat (top-level) automaton
    HybridAutomaton flat_;
    bool flat_used_ = false;
    std::vector<VarDecl> top_globals_;

    [[noreturn]] void fail(const std::string& msg) { lex_.fail(msg); }

    bool at_sym(const char* s) { return lex_.peek().kind == Tok::Sym && lex_.peek().text == s; }
    bool at_name(const char* s) { return lex_.peek().kind == Tok::Name && lex_.peek().text == s; }

    void expect_sym(const char* s) {
        if (!at_sym(s)) fail(std::string("expected '") + s + "'");
        lex_.take();
    }
    void expect_name(const char* s) {
        if (!at_name(s)) fail(std::string("expected '") + s + "'");
        lex_.take();
    }
    std::string take_ident() {
        if (lex_.peek().kind != Tok::Name) fail("expected identifier");
        return lex_.take().text;
    }

    Rational take_rational() {
        bool neg = false;
        if (at_sym("-")) { lex_.take(); neg = true; }
        if (lex_.peek().kind != Tok::Number) fail("expected number");
        Token t = lex_.take();
        Rational r;
        try {
            r = Rational::from_string(t.text);
        } catch (const ArithmeticError& e) {
            throw ParseError(t.line, t.col, std::string("bad rational: ") + e.what());
        }
        return neg ? -r : r;
    }

    long long take_int() {
        bool neg = false;
        if (at_sym("-")) { lex_.take(); neg = true; }
        if (lex_.peek().kind != Tok::Number) fail("expected integer");
        Token t = lex_.take();
        if (t.text.find('.') != std::string::npos || t.text.find('/') != std::string::npos)
            throw ParseError(t.line, t.col, "expected integer");
        long long v = 0;
        try {
            v = std::stoll(t.text);
        } catch (...) {
            throw ParseError(t.line, t.col, "integer out of range");
        }
        return neg ? -v : v;
    }

    void parse_decl() {
        if (at_name("var")) {
            parse_vardecl(/*in_block=*/false, flat_);
        } else if (at_name("loc")) {
            flat_used_ = true;
            parse_location(flat_);
        } else if (at_name("trans")) {
            flat_used_ = true;
            parse_transition(flat_);
        } else if (at_name("init")) {
            flat_used_ = true;
            parse_init(flat_);
        } else if (at_name("bad")) {
            parse_bad();
        } else if (at_name("automaton")) {
            parse_automaton();
        } else if (at_name("network")) {
            parse_network();
        } else if (at_name("kmax")) {
            lex_.take();
            long long k = take_int();
            if (k < 0) fail("kmax must be nonnegative");
            if (!doc_.check) doc_.check.emplace();
            doc_.check->default_kmax = k;
        } else {
            fail("expected declaration (var, loc, trans, init, bad, automaton, network, kmax)");
        }
    }

    void parse_vardecl(bool in_block, HybridAutomaton& target) {
        lex_.take();  // var
        VarDecl v;
        v.name = take_ident();
        if (at_name("real")) {
            lex_.take();
            v.kind = VarKind::Real;
        } else if (at_name("int")) {
            lex_.take();
            v.kind = VarKind::FiniteInt;
            v.lo = take_int();
            expect_sym("..");
            v.hi = take_int();
            if (v.lo > v.hi) fail("int domain has lo > hi");
        } else {
            fail("expected 'real' or 'int'");
        }
        if (at_name("global")) {
            lex_.take();
            if (in_block) fail("global variables must be declared at top level");
            v.scope = VarScope::Global;
            top_globals_.push_back(v);
            return;
        }
        target.vars.push_back(std::move(v));
    }

    void parse_location(HybridAutomaton& target) {
        lex_.take();  // loc
        Location loc;
        loc.name = take_ident();
        expect_sym("{");
        while (!at_sym("}")) {
            if (at_name("inv")) {
                lex_.take();
                loc.invariant.conjuncts.push_back(parse_constraint());
            } else if (at_name("flow")) {
                lex_.take();
                std::string var = take_ident();
                if (at_sym("'")) lex_.take();  // derivative marker
                expect_name("in");
                expect_sym("[");
                Rational lo = take_rational();
                expect_sym(",");
                Rational hi = take_rational();
                expect_sym("]");
                loc.flow[var] = FlowInterval{std::move(lo), std::move(hi)};
            } else {
                fail("expected 'inv' or 'flow'");
            }
        }
        lex_.take();  // }
        target.locations.push_back(std::move(loc));
    }

    void parse_transition(HybridAutomaton& target) {
        lex_.take();  // trans
        Transition t;
        t.source = take_ident();
        expect_sym("->");
        t.target = take_ident();
        expect_sym("{");
        while (!at_sym("}")) {
            if (at_name("guard")) {
                lex_.take();
                t.guard.conjuncts.push_back(parse_constraint());
            } else if (at_name("update")) {
                lex_.take();
                std::string var = take_ident();
                expect_sym(":=");
                UpdateAction act;
                if (at_sym("[")) {
                    lex_.take();
                    act.kind = UpdateAction::AssignInterval;
                    act.lo = take_rational();
                    expect_sym(",");
                    act.hi = take_rational();
                    expect_sym("]");
                } else if (lex_.peek().kind == Tok::Name) {
                    act.kind = UpdateAction::AssignVar;
                    act.var = take_ident();
                } else {
                    act.kind = UpdateAction::AssignConst;
                    act.value = take_rational();
                }
                t.update.actions[var] = std::move(act);
            } else {
                fail("expected 'guard' or 'update'");
            }
        }
        lex_.take();  // }
        target.transitions.push_back(std::move(t));
    }

    void parse_init(HybridAutomaton& target) {
        lex_.take();  // init
        if (!target.init_location.empty()) fail("duplicate init declaration");
        target.init_location = take_ident();
        while (at_name("with")) {
            lex_.take();
            target.init_guard.conjuncts.push_back(parse_constraint());
        }
    }

    void parse_bad() {
        lex_.take();  // bad
        BadEntry entry;
        expect_sym("{");
        entry.locations.push_back(take_ident());
        while (at_sym(",")) {
            lex_.take();
            entry.locations.push_back(take_ident());
        }
        expect_sym("}");
        while (at_name("with")) {
            lex_.take();
            entry.guard.conjuncts.push_back(parse_constraint());
        }
        if (!doc_.check) doc_.check.emplace();
        doc_.check->bad.push_back(std::move(entry));
    }

    void parse_automaton() {
        lex_.take();  // automaton
        HybridAutomaton a;
        a.name = take_ident();
        expect_sym("{");
        while (!at_sym("}")) {
            if (at_name("var")) parse_vardecl(/*in_block=*/true, a);
            else if (at_name("loc")) parse_location(a);
            else if (at_name("trans")) parse_transition(a);
            else if (at_name("init")) parse_init(a);
            else fail("expected 'var', 'loc', 'trans' or 'init'");
        }
        lex_.take();  // }
        doc_.automata.push_back(std::move(a));
    }

    void parse_network() {
        lex_.take();  // network
        if (doc_.network) fail("duplicate network declaration");
        NetworkSection net;
        expect_sym("{");
        net.components.push_back(take_ident());
        while (at_sym(",")) {
            lex_.take();
            net.components.push_back(take_ident());
        }
        expect_sym("}");
        doc_.network = std::move(net);
    }

    LinearConstraint parse_constraint() {
        LinearConstraint c;
        bool first = true;
        while (true) {
            Rational sign(1);
            if (first) {
                if (at_sym("-")) { lex_.take(); sign = Rational(-1); }
            } else if (at_sym("+")) {
                lex_.take();
            } else if (at_sym("-")) {
                lex_.take();
                sign = Rational(-1);
            } else {
                break;
            }
            Rational coeff(1);
            if (lex_.peek().kind == Tok::Number) {
                coeff = take_rational();
                expect_sym("*");
            }
            std::string var = take_ident();
            Rational add = sign * coeff;
            auto [it, inserted] = c.terms.emplace(var, add);
            if (!inserted) it->second += add;
            first = false;
        }
        if (first) fail("expected linear expression");
        if (at_sym("<=")) c.rel = Rel::Le;
        else if (at_sym(">=")) c.rel = Rel::Ge;
        else if (at_sym("<")) c.rel = Rel::Lt;
        else if (at_sym(">")) c.rel = Rel::Gt;
        else if (at_sym("=")) c.rel = Rel::Eq;
        else fail("expected relation (<, <=, =, >=, >)");
        lex_.take();
        c.bound = take_rational();
        return c;
    }

    void finish_flat() {
        if (!doc_.automata.empty() && flat_used_)
            fail("top-level locations/transitions cannot be mixed with automaton blocks");
        if (flat_used_) {
            if (!top_globals_.empty()) fail("global variables require a network document");
            flat_.name = "main";
            doc_.automata.insert(doc_.automata.begin(), std::move(flat_));
        } else if (!flat_.vars.empty()) {
            fail("top-level non-global variables require top-level locations");
        }
        if (doc_.network) {
            doc_.network->globals = top_globals_;
            for (const auto& cname : doc_.network->components) {
                bool found = false;
                for (const auto& a : doc_.automata) found = found || a.name == cname;
                if (!found) fail("network references unknown automaton " + cname);
            }
        } else if (!top_globals_.empty()) {
            fail("global variables require a network declaration");
        }
        if (doc_.automata.empty()) fail("document defines no automaton");
    }

    // undeclared-variable references are semantic errors at parse time
    void resolve_scopes() {
        auto declared = [&](const HybridAutomaton& a, const std::string& n) {
            if (a.find_var(n)) return true;
            for (const auto& g : top_globals_)
                if (g.name == n) return true;
            return false;
        };
        auto check_constraint_vars = [&](const HybridAutomaton& a, const LinearConstraint& c) {
            for (const auto& [n, coeff] : c.terms) {
                (void)coeff;
                if (!declared(a, n)) fail("undeclared variable " + n);
            }
        };
        for (const auto& a : doc_.automata) {
            for (const auto& l : a.locations) {
                for (const auto& c : l.invariant.conjuncts) check_constraint_vars(a, c);
                for (const auto& [n, iv] : l.flow) {
                    (void)iv;
                    if (!declared(a, n)) fail("flow for undeclared variable " + n);
                }
            }
            for (const auto& t : a.transitions) {
                for (const auto& c : t.guard.conjuncts) check_constraint_vars(a, c);
                for (const auto& [n, act] : t.update.actions) {
                    if (!declared(a, n)) fail("update of undeclared variable " + n);
                    if (act.kind == UpdateAction::AssignVar && !declared(a, act.var))
                        fail("update reads undeclared variable " + act.var);
                }
            }
            for (const auto& c : a.init_guard.conjuncts) check_constraint_vars(a, c);
        }
    }
};

// ── canonical serialization ─────────────────────────────────────────────────

inline std::string serialize_constraint(const LinearConstraint& c) {
    std::string out;
    bool first = true;
    for (const auto& [var, coeff] : c.terms) {
        if (first) {
            if (coeff == Rational(1)) out += var;
            else out += coeff.to_string() + "*" + var;
        } else {
            Rational a = coeff;
            out += a.is_negative() ? " - " : " + ";
            if (a.is_negative()) a = -a;
            if (a == Rational(1)) out += var;
            else out += a.to_string() + "*" + var;
        }
        first = false;
    }
    if (first) out += "0*_";  // unreachable for validated docs
    out += " ";
    out += rel_text(c.rel);
    out += " " + c.bound.to_string();
    return out;
}

inline void serialize_automaton_body(std::ostringstream& os, const HybridAutomaton& a,
                                     const std::string& indent) {
    for (const auto& v : a.vars) {
        if (v.scope == VarScope::Global) continue;
        os << indent << "var " << v.name;
        if (v.kind == VarKind::Real) os << " real";
        else os << " int " << v.lo << ".." << v.hi;
        os << "\n";
    }
    for (const auto& l : a.locations) {
        os << indent << "loc " << l.name << " {\n";
        for (const auto& c : l.invariant.conjuncts)
            os << indent << "  inv " << serialize_constraint(c) << "\n";
        for (const auto& [var, iv] : l.flow)
            os << indent << "  flow " << var << "' in [" << iv.lo.to_string() << ", "
               << iv.hi.to_string() << "]\n";
        os << indent << "}\n";
    }
    for (const auto& t : a.transitions) {
        os << indent << "trans " << t.source << " -> " << t.target << " {\n";
        for (const auto& c : t.guard.conjuncts)
            os << indent << "  guard " << serialize_constraint(c) << "\n";
        for (const auto& [var, act] : t.update.actions) {
            os << indent << "  update " << var << " := ";
            switch (act.kind) {
                case UpdateAction::Identity: os << var; break;
                case UpdateAction::AssignConst: os << act.value.to_string(); break;
                case UpdateAction::AssignVar: os << act.var; break;
                case UpdateAction::AssignInterval:
                    os << "[" << act.lo.to_string() << ", " << act.hi.to_string() << "]";
                    break;
            }
            os << "\n";
        }
        os << indent << "}\n";
    }
    os << indent << "init " << a.init_location;
    for (const auto& c : a.init_guard.conjuncts) os << " with " << serialize_constraint(c);
    os << "\n";
}

} // namespace detail

inline ModelDocument parse_model(std::string_view text) {
    return detail::ModelParser(text).parse();
}

// Canonical, deterministic text: maps (flows, updates, linear terms) are
// emitted sorted by variable name, rationals in lowest terms, fixed spacing.
inline std::string serialize_model(const ModelDocument& doc) {
    std::ostringstream os;
    os << "qbmc-model " << doc.format_version << "\n";

    const bool networked = doc.network.has_value();
    if (networked)
        for (const auto& g : doc.network->globals) {
            os << "var " << g.name;
            if (g.kind == VarKind::Real) os << " real";
            else os << " int " << g.lo << ".." << g.hi;
            os << " global\n";
        }

    if (!networked && doc.automata.size() == 1 && doc.automata[0].name == "main") {
        detail::serialize_automaton_body(os, doc.automata[0], "");
    } else {
        for (const auto& a : doc.automata) {
            os << "automaton " << a.name << " {\n";
            detail::serialize_automaton_body(os, a, "  ");
            os << "}\n";
        }
    }

    if (networked) {
        os << "network { ";
        for (std::size_t i = 0; i < doc.network->components.size(); ++i) {
            if (i) os << ", ";
            os << doc.network->components[i];
        }
        os << " }\n";
    }

    if (doc.check) {
        for (const auto& b : doc.check->bad) {
            os << "bad { ";
            for (std::size_t i = 0; i < b.locations.size(); ++i) {
                if (i) os << ", ";
                os << b.locations[i];
            }
            os << " }";
            for (const auto& c : b.guard.conjuncts)
                os << " with " << detail::serialize_constraint(c);
            os << "\n";
        }
        if (doc.check->default_kmax) os << "kmax " << *doc.check->default_kmax << "\n";
    }
    return os.str();
}

// ── check unit ──────────────────────────────────────────────────────────────
// A document lowered to the single automaton the encoders and the oracle
// consume: flat documents pass through with their bad entries attached;
// network documents compose and interpret bad entries as mutex markers.

struct CheckUnit {
    HybridAutomaton automaton;
    std::optional<long long> default_kmax;
};

inline CheckUnit build_check_unit(const ModelDocument& doc) {
    CheckUnit unit;
    if (doc.network) {
        std::vector<HybridAutomaton> comps;
        for (const auto& cname : doc.network->components) {
            const HybridAutomaton* found = nullptr;
            for (const auto& a : doc.automata)
                if (a.name == cname) found = &a;
            if (!found) throw ModelError("network references unknown automaton " + cname);
            comps.push_back(*found);
        }
        unit.automaton = product_compose(comps, doc.network->globals);
        if (doc.check) {
            for (const auto& marker : doc.check->bad) {
                std::set<std::string> names(marker.locations.begin(), marker.locations.end());
                auto entries = bad_mutex(unit.automaton, names);
                for (auto& e : entries) {
                    e.guard = marker.guard;
                    unit.automaton.bad.push_back(std::move(e));
                }
            }
        }
    } else {
        if (doc.automata.size() != 1)
            throw ModelError("document defines several automata but no network");
        unit.automaton = doc.automata.at(0);
        if (doc.check)
            for (const auto& b : doc.check->bad) unit.automaton.bad.push_back(b);
    }
    if (doc.check) unit.default_kmax = doc.check->default_kmax;

    auto rep = validate_automaton(unit.automaton);
    if (!rep.ok()) {
        std::string msg = "model does not validate:";
        for (const auto& v : rep.violations) msg += "\n  " + v;
        throw ModelError(msg);
    }
    return unit;
}

} // namespace qbmc

#endif // QBMC_MODEL_HPP
