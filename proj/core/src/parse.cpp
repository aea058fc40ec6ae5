#include "jto/syntax.hpp"

#include <cctype>
#include <sstream>

namespace jto {

namespace {

enum class Tok { Ident, Num, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
}

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    static const char* syms[] = {"<->", "->", "/\\", "\\/", "(", ")", "[", "]", "<", ">", "_",
                                 "~",   "!",  "#",   "+",   "*", "="};
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            advance(1);
            continue;
        }
        int l0 = line, c0 = col;
        if (std::isalpha(c)) {
            std::size_t j = i + 1;
            if ((c == 'O' || c == 'P') && j < s.size() && s[j] == '_') {
                out.push_back({Tok::Ident, std::string(1, char(c)), l0, c0});
                advance(1);
                continue;
            }
            if (c == 'P' && j < s.size() && s[j] == '-' && !(j + 1 < s.size() && s[j + 1] == '>')) {
                out.push_back({Tok::Sym, "P-", l0, c0});
                advance(2);
                continue;
            }
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), l0, c0});
            advance(j - i);
            continue;
        }
        if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Tok::Num, s.substr(i, j - i), l0, c0});
            advance(j - i);
            continue;
        }
        bool matched = false;
        for (const char* sym : syms) {
            std::size_t n = std::char_traits<char>::length(sym);
            if (s.compare(i, n, sym) == 0) {
                out.push_back({Tok::Sym, sym, l0, c0});
                advance(n);
                matched = true;
                break;
            }
        }
        if (!matched) throw SyntaxError(l0, c0, {"token"}, "character '" + std::string(1, char(c)) + "'");
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

bool is_upper_ident(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

class Parser {
public:
    Parser(const std::string& text, AgentTable* agents) : toks_(lex(text)), agents_(agents) {}

    Formula formula_eof() {
        Formula f = iff();
        expect_end();
        return f;
    }

    Term term_eof() {
        Term t = sum();
        expect_end();
        return t;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    AgentTable* agents_;

    const Token& peek() const { return toks_[pos_]; }
    bool is_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
    bool is_kw(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        throw SyntaxError(peek().line, peek().col, std::move(expected), describe(peek()));
    }

    void expect_sym(const char* s) {
        if (!is_sym(s)) fail({std::string("'") + s + "'"});
        ++pos_;
    }

    void expect_end() {
        if (peek().kind != Tok::End) fail({"end of input", "'->'", "'<->'", "'\\/'", "'/\\'", "'U'", "'S'", "'W'"});
    }

    Formula iff() {
        Formula f = imp_();
        while (is_sym("<->")) {
            ++pos_;
            f = jto::iff(f, imp_());
        }
        return f;
    }

    Formula imp_() {
        Formula f = or_();
        if (is_sym("->")) {
            ++pos_;
            return imp(f, imp_());
        }
        return f;
    }

    Formula or_() {
        Formula f = and_();
        while (is_sym("\\/")) {
            ++pos_;
            f = disj(f, and_());
        }
        return f;
    }

    Formula and_() {
        Formula f = binary();
        while (is_sym("/\\")) {
            ++pos_;
            f = conj(f, binary());
        }
        return f;
    }

    Formula binary() {
        Formula f = unary();
        if (is_kw("U")) {
            ++pos_;
            return until(f, binary());
        }
        if (is_kw("S")) {
            ++pos_;
            return since(f, binary());
        }
        if (is_kw("W")) {
            ++pos_;
            return wuntil(f, binary());
        }
        return f;
    }

    Agent agent() {
        expect_sym("_");
        const Token& t = peek();
        if (t.kind != Tok::Ident && t.kind != Tok::Num) fail({"agent name", "agent index"});
        ++pos_;
        try {
            if (agents_ && !agents_->empty()) return agents_->resolve(t.text);
            if (agents_) return agents_->resolve_or_declare(t.text);
            return scratch_.resolve_or_declare(t.text);
        } catch (const Error&) {
            throw SyntaxError(t.line, t.col, {"declared agent"}, "'" + t.text + "'");
        }
    }
    AgentTable scratch_;

    Term bracket_term(const char* open, const char* close) {
        expect_sym(open);
        Term t = sum();
        expect_sym(close);
        return t;
    }

    Formula unary() {
        const Token& t = peek();
        if (t.kind == Tok::Sym) {
            if (t.text == "~") {
                ++pos_;
                return neg(unary());
            }
            if (t.text == "P-") {
                ++pos_;
                return once(unary());
            }
            if (t.text == "[") {
                Term term = bracket_term("[", "]");
                Agent i = agent();
                return jbox(i, term, unary());
            }
            if (t.text == "<") {
                Term term = bracket_term("<", ">");
                Agent i = agent();
                return jdia(i, term, unary());
            }
            if (t.text == "(") {
                ++pos_;
                Formula f = iff();
                expect_sym(")");
                return f;
            }
        }
        if (t.kind == Tok::Ident) {
            const std::string& w = t.text;
            if (w == "X") { ++pos_; return next(unary()); }
            if (w == "Yw") { ++pos_; return wprev(unary()); }
            if (w == "Ys") { ++pos_; return sprev(unary()); }
            if (w == "F") { ++pos_; return eventually(unary()); }
            if (w == "G") { ++pos_; return always(unary()); }
            if (w == "H") { ++pos_; return sofar(unary()); }
            if (w == "A") { ++pos_; return boxdot(unary()); }
            if (w == "O" || w == "P") {
                bool deontic_box = w == "O";
                ++pos_;
                Term term;
                if (is_sym("_")) {
                    term = t_wild();
                } else if (is_sym("[")) {
                    term = bracket_term("[", "]");
                } else {
                    fail({"'['", "'_'"});
                }
                Agent i = agent();
                return deontic_box ? obox(i, term, unary()) : operm(i, term, unary());
            }
            if (w == "bot") { ++pos_; return bot(); }
            if (w == "top") { ++pos_; return top(); }
            if (w == "time") {
                ++pos_;
                expect_sym("=");
                if (peek().kind != Tok::Num) fail({"natural number"});
                std::uint32_t m = std::uint32_t(std::stoul(peek().text));
                ++pos_;
                return time_literal(m);
            }
            if (!is_upper_ident(w)) {
                ++pos_;
                return atom(w);
            }
        }
        fail({"atom", "'('", "'~'", "'['", "'<'", "'O'", "'P'", "'X'", "'Yw'", "'Ys'", "'F'", "'G'", "'P-'", "'H'",
              "'A'", "'bot'", "'top'", "'time'"});
    }

    Term sum() {
        Term t = prod();
        while (is_sym("+")) {
            ++pos_;
            t = t_sum(t, prod());
        }
        return t;
    }

    Term prod() {
        Term t = prefix();
        while (is_sym("*")) {
            ++pos_;
            t = t_prod(t, prefix());
        }
        return t;
    }

    Term prefix() {
        if (is_sym("!")) {
            ++pos_;
            return t_bang(prefix());
        }
        if (is_sym("#")) {
            ++pos_;
            return t_dagger(prefix());
        }
        if (is_sym("(")) {
            ++pos_;
            Term t = sum();
            expect_sym(")");
            return t;
        }
        if (peek().kind == Tok::Ident) {
            std::string w = peek().text;
            ++pos_;
            return is_upper_ident(w) ? t_const(w) : t_var(w);
        }
        fail({"term variable", "term constant", "'!'", "'#'", "'('"});
    }
};

// Binding strength used by the printer; higher binds tighter.
int prec(Op op) {
    switch (op) {
        case Op::Iff: return 1;
        case Op::Imp: return 2;
        case Op::Or: return 3;
        case Op::And: return 4;
        case Op::Until:
        case Op::Since:
        case Op::WUntil: return 5;
        default: return 6;
    }
}

int term_prec(TermKind k) {
    switch (k) {
        case TermKind::Sum: return 1;
        case TermKind::Prod: return 2;
        case TermKind::Bang:
        case TermKind::Dagger: return 3;
        default: return 4;
    }
}

void print_term(Term t, int min_prec, std::string& out) {
    bool paren = term_prec(t->kind) < min_prec;
    if (paren) out += "(";
    switch (t->kind) {
        case TermKind::Const:
        case TermKind::Var:
        case TermKind::Wild: out += t->name; break;
        case TermKind::Bang: out += "!"; print_term(t->l, 3, out); break;
        case TermKind::Dagger: out += "#"; print_term(t->l, 3, out); break;
        case TermKind::Sum:
            print_term(t->l, 1, out);
            out += "+";
            print_term(t->r, 2, out);
            break;
        case TermKind::Prod:
            print_term(t->l, 2, out);
            out += "*";
            print_term(t->r, 3, out);
            break;
    }
    if (paren) out += ")";
}

std::string agent_text(Agent a, const AgentTable* agents) { return agents ? agents->name(a) : std::to_string(a); }

void print(Formula f, int min_prec, const AgentTable* agents, std::string& out) {
    int p = prec(f->op);
    bool paren = p < min_prec;
    if (paren) out += "(";
    auto binop = [&](const char* sym, int lp, int rp) {
        print(f->a, lp, agents, out);
        out += sym;
        print(f->b, rp, agents, out);
    };
    auto prefix = [&](const char* sym) {
        out += sym;
        print(f->a, 6, agents, out);
    };
    auto modal = [&](const char* head, const char* open, const char* close) {
        out += head;
        if (f->term->kind == TermKind::Wild) {
            out += "_" + agent_text(f->agent, agents) + " ";
        } else {
            out += open;
            print_term(f->term, 1, out);
            out += close;
            out += "_" + agent_text(f->agent, agents) + " ";
        }
        print(f->a, 6, agents, out);
    };
    switch (f->op) {
        case Op::Atom: out += f->name; break;
        case Op::Bot: out += "bot"; break;
        case Op::Top: out += "top"; break;
        case Op::Time: out += "time=" + std::to_string(f->num); break;
        case Op::Iff: binop(" <-> ", 1, 2); break;
        case Op::Imp: binop(" -> ", 3, 2); break;
        case Op::Or: binop(" \\/ ", 3, 4); break;
        case Op::And: binop(" /\\ ", 4, 5); break;
        case Op::Until: binop(" U ", 6, 5); break;
        case Op::Since: binop(" S ", 6, 5); break;
        case Op::WUntil: binop(" W ", 6, 5); break;
        case Op::Not: prefix("~"); break;
        case Op::Next: prefix("X "); break;
        case Op::WPrev: prefix("Yw "); break;
        case Op::SPrev: prefix("Ys "); break;
        case Op::Ev: prefix("F "); break;
        case Op::Alw: prefix("G "); break;
        case Op::Once: prefix("P- "); break;
        case Op::Sofar: prefix("H "); break;
        case Op::Boxdot: prefix("A "); break;
        case Op::JBox: modal("", "[", "]"); break;
        case Op::OBox: modal("O", "[", "]"); break;
        case Op::JDia: modal("", "<", ">"); break;
        case Op::OPerm: modal("P", "[", "]"); break;
    }
    if (paren) out += ")";
}

void ast_rec(Formula f, const AgentTable* agents, std::string& out) {
    out += op_name(f->op);
    out += "(";
    switch (f->op) {
        case Op::Atom: out += f->name; break;
        case Op::Time: out += std::to_string(f->num); break;
        case Op::Bot:
        case Op::Top: break;
        case Op::JBox:
        case Op::OBox:
        case Op::JDia:
        case Op::OPerm:
            out += agent_text(f->agent, agents) + ", " + pretty(f->term) + ", ";
            ast_rec(f->a, agents, out);
            break;
        default:
            ast_rec(f->a, agents, out);
            if (f->b) {
                out += ", ";
                ast_rec(f->b, agents, out);
            }
    }
    out += ")";
}

}  // namespace

Formula parse_formula(const std::string& text, AgentTable* agents) { return Parser(text, agents).formula_eof(); }

Term parse_term(const std::string& text) { return Parser(text, nullptr).term_eof(); }

std::string pretty(Formula f, const AgentTable* agents) {
    std::string out;
    print(f, 0, agents, out);
    return out;
}

std::string pretty(Term t) {
    std::string out;
    print_term(t, 0, out);
    return out;
}

std::string op_name(Op op) {
    switch (op) {
        case Op::Atom: return "Atom";
        case Op::Bot: return "Bottom";
        case Op::Imp: return "Implies";
        case Op::Next: return "Next";
        case Op::WPrev: return "WeakPrev";
        case Op::Until: return "Until";
        case Op::Since: return "Since";
        case Op::JBox: return "JBox";
        case Op::OBox: return "OBox";
        case Op::Not: return "Not";
        case Op::Top: return "Top";
        case Op::And: return "And";
        case Op::Or: return "Or";
        case Op::Iff: return "Iff";
        case Op::SPrev: return "StrongPrev";
        case Op::Ev: return "Eventually";
        case Op::Alw: return "Always";
        case Op::Once: return "Once";
        case Op::Sofar: return "Sofar";
        case Op::Boxdot: return "AlwaysBoxdot";
        case Op::WUntil: return "WeakUntil";
        case Op::JDia: return "JDiamond";
        case Op::OPerm: return "OPermit";
        case Op::Time: return "Time";
    }
    return "?";
}

std::string ast_string(Formula f, const AgentTable* agents) {
    std::string out;
    ast_rec(f, agents, out);
    return out;
}

}  // namespace jto
