#include "jto/syntax.hpp"

#include <cctype>
#include <deque>
#include <functional>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace jto {

namespace {

inline std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

struct TermHash {
    std::size_t operator()(const TermNode* n) const { return n->hash; }
};
struct TermEq {
    bool operator()(const TermNode* x, const TermNode* y) const {
        return x->kind == y->kind && x->l == y->l && x->r == y->r && x->name == y->name;
    }
};
struct FHash {
    std::size_t operator()(const FNode* n) const { return n->hash; }
};
struct FEq {
    bool operator()(const FNode* x, const FNode* y) const {
        return x->op == y->op && x->agent == y->agent && x->num == y->num && x->term == y->term &&
               x->a == y->a && x->b == y->b && x->name == y->name;
    }
};

struct Interner {
    std::mutex mu;
    std::deque<TermNode> term_store;
    std::unordered_set<const TermNode*, TermHash, TermEq> terms;
    std::deque<FNode> formula_store;
    std::unordered_set<const FNode*, FHash, FEq> formulas;
};

Interner& interner() {
    static Interner in;
    return in;
}

Term intern(TermNode n) {
    n.hash = mix(mix(mix(std::hash<int>()(int(n.kind)), std::hash<std::string>()(n.name)),
                     std::hash<const void*>()(n.l)),
                 std::hash<const void*>()(n.r));
    auto& in = interner();
    std::lock_guard<std::mutex> lock(in.mu);
    auto it = in.terms.find(&n);
    if (it != in.terms.end()) return *it;
    n.id = std::uint32_t(in.term_store.size());
    in.term_store.push_back(std::move(n));
    const TermNode* p = &in.term_store.back();
    in.terms.insert(p);
    return p;
}

Formula intern(FNode n) {
    std::size_t h = std::hash<int>()(int(n.op));
    h = mix(h, n.agent);
    h = mix(h, n.num);
    h = mix(h, std::hash<std::string>()(n.name));
    h = mix(h, std::hash<const void*>()(n.term));
    h = mix(h, std::hash<const void*>()(n.a));
    h = mix(h, std::hash<const void*>()(n.b));
    n.hash = h;
    n.size = 1 + (n.a ? n.a->size : 0) + (n.b ? n.b->size : 0);
    auto& in = interner();
    std::lock_guard<std::mutex> lock(in.mu);
    auto it = in.formulas.find(&n);
    if (it != in.formulas.end()) return *it;
    n.id = std::uint32_t(in.formula_store.size());
    in.formula_store.push_back(std::move(n));
    const FNode* p = &in.formula_store.back();
    in.formulas.insert(p);
    return p;
}

Formula mk(Op op, Formula a = nullptr, Formula b = nullptr) {
    FNode n;
    n.op = op;
    n.a = a;
    n.b = b;
    return intern(std::move(n));
}

Formula mk_modal(Op op, Agent i, Term t, Formula a) {
    FNode n;
    n.op = op;
    n.agent = i;
    n.term = t;
    n.a = a;
    return intern(std::move(n));
}

}  // namespace

SyntaxError::SyntaxError(int line_, int column_, std::vector<std::string> expected_, const std::string& found)
    : Error("SyntaxError",
            [&] {
                std::string m = "line " + std::to_string(line_) + ", column " + std::to_string(column_) +
                                ": unexpected " + found + "; expected one of:";
                for (auto& e : expected_) m += " " + e;
                return m;
            }()),
      line(line_),
      column(column_),
      expected(std::move(expected_)),
      found(found) {}

// ---------------------------------------------------------------------------
// Agents

static bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

Agent AgentTable::resolve(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return Agent(i);
    if (all_digits(name)) {
        Agent a = Agent(std::stoul(name));
        if (!names_.empty() && a >= names_.size())
            throw Error("UnknownAgent", "agent index " + name + " out of range");
        return a;
    }
    throw Error("UnknownAgent", "agent '" + name + "' is not declared");
}

Agent AgentTable::resolve_or_declare(const std::string& name) {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return Agent(i);
    if (all_digits(name)) return Agent(std::stoul(name));
    names_.push_back(name);
    return Agent(names_.size() - 1);
}

std::string AgentTable::name(Agent a) const {
    if (a < names_.size()) return names_[a];
    return std::to_string(a);
}

// ---------------------------------------------------------------------------
// Terms

Term t_const(const std::string& name) { return intern(TermNode{TermKind::Const, name}); }
Term t_var(const std::string& name) { return intern(TermNode{TermKind::Var, name}); }
Term t_bang(Term t) { return intern(TermNode{TermKind::Bang, "", t, nullptr}); }
Term t_sum(Term a, Term b) { return intern(TermNode{TermKind::Sum, "", a, b}); }
Term t_prod(Term a, Term b) { return intern(TermNode{TermKind::Prod, "", a, b}); }
Term t_dagger(Term t) { return intern(TermNode{TermKind::Dagger, "", t, nullptr}); }
Term t_wild() { return intern(TermNode{TermKind::Wild, "_"}); }

Sort term_sort(Term t) {
    auto epi_ok = [](Sort s) { return s == Sort::Either || s == Sort::Epistemic; };
    auto deo_ok = [](Sort s) { return s == Sort::Either || s == Sort::Deontic; };
    switch (t->kind) {
        case TermKind::Const:
        case TermKind::Var: return Sort::Either;
        case TermKind::Wild: return Sort::Deontic;
        case TermKind::Bang: return epi_ok(term_sort(t->l)) ? Sort::Epistemic : Sort::Invalid;
        case TermKind::Sum:
            return epi_ok(term_sort(t->l)) && epi_ok(term_sort(t->r)) ? Sort::Epistemic : Sort::Invalid;
        case TermKind::Dagger: return deo_ok(term_sort(t->l)) ? Sort::Deontic : Sort::Invalid;
        case TermKind::Prod: {
            Sort a = term_sort(t->l), b = term_sort(t->r);
            if (a == Sort::Invalid || b == Sort::Invalid) return Sort::Invalid;
            if (a == Sort::Either) return b;
            if (b == Sort::Either || a == b) return a;
            return Sort::Invalid;
        }
    }
    return Sort::Invalid;
}

bool is_atomic_term(Term t) { return t->kind == TermKind::Const || t->kind == TermKind::Var; }

// ---------------------------------------------------------------------------
// Formula constructors

Formula atom(const std::string& name) {
    FNode n;
    n.op = Op::Atom;
    n.name = name;
    return intern(std::move(n));
}
Formula bot() { return mk(Op::Bot); }
Formula top() { return mk(Op::Top); }
Formula imp(Formula a, Formula b) { return mk(Op::Imp, a, b); }
Formula neg(Formula a) { return mk(Op::Not, a); }
Formula conj(Formula a, Formula b) { return mk(Op::And, a, b); }
Formula disj(Formula a, Formula b) { return mk(Op::Or, a, b); }
Formula iff(Formula a, Formula b) { return mk(Op::Iff, a, b); }
Formula next(Formula a) { return mk(Op::Next, a); }
Formula wprev(Formula a) { return mk(Op::WPrev, a); }
Formula sprev(Formula a) { return mk(Op::SPrev, a); }
Formula until(Formula a, Formula b) { return mk(Op::Until, a, b); }
Formula since(Formula a, Formula b) { return mk(Op::Since, a, b); }
Formula wuntil(Formula a, Formula b) { return mk(Op::WUntil, a, b); }
Formula eventually(Formula a) { return mk(Op::Ev, a); }
Formula always(Formula a) { return mk(Op::Alw, a); }
Formula once(Formula a) { return mk(Op::Once, a); }
Formula sofar(Formula a) { return mk(Op::Sofar, a); }
Formula boxdot(Formula a) { return mk(Op::Boxdot, a); }

static void check_sort(bool epistemic, Term t) {
    Sort s = term_sort(t);
    if (s == Sort::Invalid) throw SortError("ill-sorted term " + pretty(t));
    if (epistemic && (s == Sort::Deontic))
        throw SortError("term " + pretty(t) + " is deontic but used under an epistemic modality");
    if (!epistemic && s == Sort::Epistemic)
        throw SortError("term " + pretty(t) + " is epistemic but used under a deontic modality");
}

Formula jbox(Agent i, Term t, Formula a) {
    check_sort(true, t);
    return mk_modal(Op::JBox, i, t, a);
}
Formula obox(Agent i, Term t, Formula a) {
    check_sort(false, t);
    return mk_modal(Op::OBox, i, t, a);
}
Formula jdia(Agent i, Term t, Formula a) {
    check_sort(true, t);
    return mk_modal(Op::JDia, i, t, a);
}
Formula operm(Agent i, Term t, Formula a) {
    check_sort(false, t);
    return mk_modal(Op::OPerm, i, t, a);
}

Formula time_literal(std::uint32_t m) {
    FNode n;
    n.op = Op::Time;
    n.num = m;
    return intern(std::move(n));
}

Formula true_at(std::uint32_t m, Formula f) { return boxdot(imp(time_literal(m), f)); }

Formula conj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return top();
    Formula r = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) r = conj(r, fs[i]);
    return r;
}

Formula disj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return bot();
    Formula r = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) r = disj(r, fs[i]);
    return r;
}

bool is_core_op(Op op) { return op <= Op::OBox; }

bool is_core(Formula f) {
    if (!is_core_op(f->op)) return false;
    return (!f->a || is_core(f->a)) && (!f->b || is_core(f->b));
}

bool is_binary(Op op) {
    switch (op) {
        case Op::Imp: case Op::Until: case Op::Since: case Op::And: case Op::Or: case Op::Iff:
        case Op::WUntil: return true;
        default: return false;
    }
}

bool is_modal(Op op) { return op == Op::JBox || op == Op::OBox || op == Op::JDia || op == Op::OPerm; }

// ---------------------------------------------------------------------------
// Desugaring

namespace {

struct Memo {
    std::mutex mu;
    std::unordered_map<Formula, Formula> map;
};

Memo& desugar_memo() {
    static Memo m;
    return m;
}

Formula cneg(Formula a) { return imp(a, bot()); }
Formula ctop() { return imp(bot(), bot()); }
Formula cor(Formula a, Formula b) { return imp(cneg(a), b); }
Formula cand(Formula a, Formula b) { return cneg(cor(cneg(a), cneg(b))); }
Formula calw(Formula a) { return cneg(until(ctop(), cneg(a))); }
Formula csofar(Formula a) { return cneg(since(ctop(), cneg(a))); }

Formula desugar_rec(Formula f) {
    {
        auto& m = desugar_memo();
        std::lock_guard<std::mutex> lock(m.mu);
        auto it = m.map.find(f);
        if (it != m.map.end()) return it->second;
    }
    Formula r = nullptr;
    switch (f->op) {
        case Op::Atom:
        case Op::Bot: r = f; break;
        case Op::Imp: r = imp(desugar_rec(f->a), desugar_rec(f->b)); break;
        case Op::Next: r = next(desugar_rec(f->a)); break;
        case Op::WPrev: r = wprev(desugar_rec(f->a)); break;
        case Op::Until: r = until(desugar_rec(f->a), desugar_rec(f->b)); break;
        case Op::Since: r = since(desugar_rec(f->a), desugar_rec(f->b)); break;
        case Op::JBox: r = mk_modal(Op::JBox, f->agent, f->term, desugar_rec(f->a)); break;
        case Op::OBox: r = mk_modal(Op::OBox, f->agent, f->term, desugar_rec(f->a)); break;
        case Op::Not: r = cneg(desugar_rec(f->a)); break;
        case Op::Top: r = ctop(); break;
        case Op::And: r = cand(desugar_rec(f->a), desugar_rec(f->b)); break;
        case Op::Or: r = cor(desugar_rec(f->a), desugar_rec(f->b)); break;
        case Op::Iff: {
            Formula a = desugar_rec(f->a), b = desugar_rec(f->b);
            r = cand(imp(a, b), imp(b, a));
            break;
        }
        case Op::SPrev: r = cneg(wprev(cneg(desugar_rec(f->a)))); break;
        case Op::Ev: r = until(ctop(), desugar_rec(f->a)); break;
        case Op::Alw: r = calw(desugar_rec(f->a)); break;
        case Op::Once: r = since(ctop(), desugar_rec(f->a)); break;
        case Op::Sofar: r = csofar(desugar_rec(f->a)); break;
        case Op::Boxdot: {
            Formula a = desugar_rec(f->a);
            r = cand(csofar(a), calw(a));
            break;
        }
        case Op::WUntil: {
            Formula a = desugar_rec(f->a), b = desugar_rec(f->b);
            r = cor(until(a, b), calw(a));
            break;
        }
        case Op::JDia: r = cneg(mk_modal(Op::JBox, f->agent, f->term, cneg(desugar_rec(f->a)))); break;
        case Op::OPerm: r = cneg(mk_modal(Op::OBox, f->agent, f->term, cneg(desugar_rec(f->a)))); break;
        case Op::Time: {
            Formula t = wprev(bot());
            for (std::uint32_t k = 0; k < f->num; ++k) t = cneg(wprev(cneg(t)));
            r = t;
            break;
        }
    }
    auto& m = desugar_memo();
    std::lock_guard<std::mutex> lock(m.mu);
    m.map.emplace(f, r);
    return r;
}

void subf_rec(Formula f, FormulaSet& out) {
    if (!out.insert(f).second) return;
    if (f->a) subf_rec(f->a, out);
    if (f->b) subf_rec(f->b, out);
}

}  // namespace

Formula desugar(Formula f) { return desugar_rec(f); }

FormulaSet subf(Formula f) {
    FormulaSet out;
    subf_rec(desugar(f), out);
    return out;
}

FormulaClosure subf_plus(Formula chi) {
    FormulaClosure c;
    c.base = desugar(chi);
    subf_rec(c.base, c.positive_part);
    subf_rec(since(ctop(), wprev(bot())), c.positive_part);
    for (Formula f : c.positive_part) c.negations.insert(cneg(f));
    c.members = c.positive_part;
    c.members.insert(c.negations.begin(), c.negations.end());
    return c;
}

// ---------------------------------------------------------------------------
// Sugar builders

Formula interval_operator(IntervalKind kind, std::uint32_t m, std::uint32_t n, Formula f) {
    auto need_order = [&] {
        if (m >= n)
            throw BadInterval("interval endpoints must satisfy m < n (got m=" + std::to_string(m) +
                              ", n=" + std::to_string(n) + ")");
    };
    switch (kind) {
        case IntervalKind::BoxNowOpen: return until(f, time_literal(m));
        case IntervalKind::BoxNowClosed: return until(f, time_literal(m + 1));
        case IntervalKind::BoxSinceOpen: return since(f, time_literal(m));
        case IntervalKind::BoxSinceClosed:
            if (m == 0) throw BadInterval("[m,now] needs m >= 1 (time=m-1 must exist)");
            return since(f, time_literal(m - 1));
        case IntervalKind::BoxClosedClosed: need_order(); return true_at(m, until(f, time_literal(n + 1)));
        case IntervalKind::BoxClosedOpen: need_order(); return true_at(m, until(f, time_literal(n)));
        case IntervalKind::BoxOpenClosed: need_order(); return true_at(n, since(f, time_literal(m)));
        case IntervalKind::BoxOpenOpen: need_order(); return true_at(n - 1, since(f, time_literal(m)));
        case IntervalKind::DiamondClosedClosed: {
            need_order();
            std::vector<Formula> times;
            for (std::uint32_t k = m; k <= n; ++k) times.push_back(time_literal(k));
            Formula body = conj(f, disj_all(times));
            return disj(eventually(body), once(body));
        }
    }
    throw BadInterval("unknown interval kind");
}

Formula forgetful_projection(Formula f) {
    switch (f->op) {
        case Op::Atom:
        case Op::Bot:
        case Op::Top:
        case Op::Time: return f;
        case Op::OBox: return mk_modal(Op::OBox, f->agent, t_wild(), forgetful_projection(f->a));
        case Op::OPerm: return mk_modal(Op::OPerm, f->agent, t_wild(), forgetful_projection(f->a));
        case Op::JBox:
        case Op::JDia: return mk_modal(f->op, f->agent, f->term, forgetful_projection(f->a));
        default:
            return mk(f->op, f->a ? forgetful_projection(f->a) : nullptr, f->b ? forgetful_projection(f->b) : nullptr);
    }
}

int temporal_depth(Formula f) {
    Formula d = desugar(f);
    std::function<int(Formula)> rec = [&](Formula g) -> int {
        int a = g->a ? rec(g->a) : 0;
        int b = g->b ? rec(g->b) : 0;
        int here = (g->op == Op::Next || g->op == Op::WPrev || g->op == Op::Until || g->op == Op::Since) ? 1 : 0;
        return here + std::max(a, b);
    };
    return rec(d);
}

int past_depth(Formula f) {
    Formula d = desugar(f);
    std::function<int(Formula)> rec = [&](Formula g) -> int {
        int a = g->a ? rec(g->a) : 0;
        int b = g->b ? rec(g->b) : 0;
        int here = (g->op == Op::WPrev || g->op == Op::Since) ? 1 : 0;
        return here + std::max(a, b);
    };
    return rec(d);
}

Formula substitute(Formula f, const std::map<std::string, Formula>& sub) {
    if (f->op == Op::Atom) {
        auto it = sub.find(f->name);
        return it == sub.end() ? f : it->second;
    }
    if (!f->a) return f;
    Formula a = substitute(f->a, sub);
    Formula b = f->b ? substitute(f->b, sub) : nullptr;
    if (a == f->a && b == f->b) return f;
    if (is_modal(f->op)) return mk_modal(f->op, f->agent, f->term, a);
    return mk(f->op, a, b);
}

}  // namespace jto
