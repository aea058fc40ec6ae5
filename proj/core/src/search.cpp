#include "jto/search.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>
#include <unordered_map>

namespace jto {

namespace {

Formula cneg(Formula a) { return imp(a, bot()); }
Formula ctop() { return imp(bot(), bot()); }

bool is_neg(Formula f) { return f->op == Op::Imp && f->b->op == Op::Bot; }

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
    std::string out;
    for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? sep : "") + xs[k];
    return out;
}

class Abstractor {
public:
    explicit Abstractor(Abstraction& a) : a_(a) {}

    Formula abs(Formula f) {
        auto it = memo_.find(f);
        if (it != memo_.end()) return it->second;
        Formula r = nullptr;
        switch (f->op) {
            case Op::Atom:
            case Op::Bot: r = f; break;
            case Op::Imp: r = imp(abs(f->a), abs(f->b)); break;
            case Op::Next: r = next(abs(f->a)); break;
            case Op::WPrev: r = wprev(abs(f->a)); break;
            case Op::Until: r = until(abs(f->a), abs(f->b)); break;
            case Op::Since: r = since(abs(f->a), abs(f->b)); break;
            case Op::JBox:
            case Op::OBox: r = atom_for(f); break;
            default: throw Error("InternalError", "abstraction expects desugared input");
        }
        memo_.emplace(f, r);
        return r;
    }

    Formula atom_for(Formula f) {
        auto it = index_.find(f);
        if (it != index_.end()) return a_.atom_map[it->second].second;
        Formula at = atom("@" + std::to_string(a_.atom_map.size() + 1));
        index_.emplace(f, a_.atom_map.size());
        a_.atom_map.emplace_back(f, at);
        return at;
    }

private:
    Abstraction& a_;
    std::unordered_map<Formula, Formula> memo_;
    std::unordered_map<Formula, std::size_t> index_;
};

void collect_assertions(Formula f, std::vector<Formula>& out, FormulaSet& seen) {
    if (f->op == Op::JBox || f->op == Op::OBox) {
        if (seen.insert(f).second) out.push_back(f);
        return;
    }
    if (f->a) collect_assertions(f->a, out, seen);
    if (f->b) collect_assertions(f->b, out, seen);
}

Formula box(Op op, Agent i, Term t, Formula body) {
    return op == Op::JBox ? jbox(i, t, body) : obox(i, t, body);
}

}  // namespace

std::optional<Formula> Abstraction::atom_of(Formula assertion) const {
    for (const auto& [f, at] : atom_map)
        if (f == assertion) return at;
    return std::nullopt;
}

std::optional<Formula> Abstraction::assertion_of(Formula at) const {
    for (const auto& [f, a] : atom_map)
        if (a == at) return f;
    return std::nullopt;
}

Formula Abstraction::concretize(Formula f) const {
    switch (f->op) {
        case Op::Atom: {
            auto m = assertion_of(f);
            return m ? *m : f;
        }
        case Op::Bot: return f;
        case Op::Imp: return imp(concretize(f->a), concretize(f->b));
        case Op::Next: return next(concretize(f->a));
        case Op::WPrev: return wprev(concretize(f->a));
        case Op::Until: return until(concretize(f->a), concretize(f->b));
        case Op::Since: return since(concretize(f->a), concretize(f->b));
        default: return f;
    }
}

Abstraction abstract(const std::vector<Formula>& fs) {
    Abstraction a;
    Abstractor ab(a);
    std::vector<Formula> assertions;
    FormulaSet seen;
    for (Formula f : fs) {
        Formula d = desugar(f);
        a.inputs.push_back(d);
        a.abstracted.push_back(ab.abs(d));
        collect_assertions(d, assertions, seen);
    }
    auto occurs = [&](Formula f) { return seen.count(f) > 0; };
    auto add = [&](const char* kind, Formula c) {
        a.side_constraints.push_back(c);
        a.constraint_kinds.emplace_back(kind);
    };
    for (Formula m : assertions) {
        Formula am = ab.atom_for(m);
        Op op = m->op;
        Agent i = m->agent;
        Term t = m->term;
        Formula body = m->a;
        if (op == Op::JBox) {
            add("factivity", imp(am, ab.abs(body)));
            Formula pi = jbox(i, t_bang(t), m);
            if (occurs(pi)) add("positive-introspection", imp(am, ab.atom_for(pi)));
        }
        for (Formula m2 : assertions) {
            if (m2->op != op || m2->agent != i) continue;
            if (m2->a == body && m2->term->kind == TermKind::Sum && (m2->term->l == t || m2->term->r == t) &&
                op == Op::JBox)
                add("sum", imp(am, ab.atom_for(m2)));
            if (body->op == Op::Imp && m2->a == body->a) {
                Term prod = t->kind == TermKind::Wild && m2->term->kind == TermKind::Wild
                                ? t
                                : t_prod(t, m2->term);
                Formula target = box(op, i, prod, body->b);
                if (occurs(target))
                    add(op == Op::JBox ? "application" : "application-O",
                        imp(am, imp(ab.atom_for(m2), ab.atom_for(target))));
            }
        }
        if (op == Op::OBox) {
            Formula opposite = obox(i, t, cneg(body));
            if (occurs(opposite)) add("no-conflicts", imp(am, cneg(ab.atom_for(opposite))));
            if (t->kind == TermKind::Dagger && body->op == Op::Imp && body->a->op == Op::OBox &&
                body->a->agent == i && body->a->term == t->l && body->a->a == body->b)
                add("obligated-factivity", am);
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Label engine

namespace {

using Values = std::vector<std::uint8_t>;

struct Engine {
    std::vector<Formula> closure;              // children before parents
    std::unordered_map<Formula, std::size_t> index;
    std::vector<std::size_t> elementary;       // closure indices
    std::vector<std::size_t> free;             // atoms, Next, Until
    std::vector<std::size_t> untils;
    std::vector<std::size_t> atoms;            // reporting order
    std::size_t goal = 0;
    std::vector<std::size_t> side;
    std::uint64_t budget = 0, explored = 0;

    void add(Formula f) {
        if (index.count(f)) return;
        if (f->a) add(f->a);
        if (f->b) add(f->b);
        index.emplace(f, closure.size());
        closure.push_back(f);
    }

    std::size_t at(Formula f) const { return index.at(f); }

    std::uint64_t label(const Values& v) const {
        std::uint64_t l = 0;
        for (std::size_t k = 0; k < elementary.size(); ++k)
            if (v[elementary[k]]) l |= std::uint64_t{1} << k;
        return l;
    }

    // Values of a position whose free elementaries are `bits`, after `prev`
    // (none at position 0); false when the step breaks a Next or Until.
    bool step(const Values* prev, std::uint64_t bits, Values& v) const {
        v.assign(closure.size(), 0);
        std::size_t fk = 0;
        for (std::size_t k = 0; k < closure.size(); ++k) {
            Formula f = closure[k];
            switch (f->op) {
                case Op::Atom:
                case Op::Next:
                case Op::Until: v[k] = (bits >> fk++) & 1U; break;
                case Op::Bot: v[k] = 0; break;
                case Op::Imp: v[k] = !v[at(f->a)] || v[at(f->b)]; break;
                case Op::WPrev: v[k] = prev ? (*prev)[at(f->a)] : 1; break;
                case Op::Since: v[k] = v[at(f->b)] || (v[at(f->a)] && prev && (*prev)[k]); break;
                default: break;
            }
        }
        if (!prev) return true;
        for (std::size_t k = 0; k < closure.size(); ++k) {
            Formula f = closure[k];
            if (f->op == Op::Next && (*prev)[k] != v[at(f->a)]) return false;
            if (f->op == Op::Until &&
                (*prev)[k] != ((*prev)[at(f->b)] || ((*prev)[at(f->a)] && v[k])))
                return false;
        }
        return true;
    }

    bool side_ok(const Values& v) const {
        for (std::size_t k : side)
            if (!v[k]) return false;
        return true;
    }

    std::uint64_t free_bits(const Values& v) const {
        std::uint64_t b = 0;
        for (std::size_t k = 0; k < free.size(); ++k)
            if (v[free[k]]) b |= std::uint64_t{1} << k;
        return b;
    }

    // Side-constraint-respecting successors of `prev`.
    std::vector<Values> successors(const Values* prev) {
        std::vector<Values> out;
        std::uint64_t n = std::uint64_t{1} << free.size();
        explored += n;
        if (explored > budget)
            throw BoundsTooLarge("label budget of " + std::to_string(budget) + " exhausted");
        Values v;
        for (std::uint64_t bits = 0; bits < n; ++bits)
            if (step(prev, bits, v) && side_ok(v)) out.push_back(v);
        return out;
    }

    bool closes(const Values& cur, const Values& first) const {
        Values v;
        return step(&cur, free_bits(first), v) && v == first;
    }

    std::uint64_t pending(const Values& v) const {
        std::uint64_t m = 0;
        for (std::size_t k = 0; k < untils.size(); ++k)
            if (v[untils[k]]) m |= std::uint64_t{1} << k;
        return m;
    }

    std::uint64_t fulfilled(const Values& v) const {
        std::uint64_t m = 0;
        for (std::size_t k = 0; k < untils.size(); ++k)
            if (v[at(closure[untils[k]]->b)]) m |= std::uint64_t{1} << k;
        return m;
    }
};

struct Prepared {
    Abstraction abs;
    Engine engine;
    std::vector<Formula> requirements;   // abstracted goal conjuncts
};

Prepared prepare(const std::vector<Formula>& fs, std::optional<std::uint32_t> at, const SearchBounds& b) {
    Prepared p;
    std::vector<Formula> all = fs;
    if (at) all.push_back(time_literal(*at));
    p.abs = abstract(all);
    Engine& e = p.engine;
    e.budget = b.budget;
    Formula goal = desugar(conj_all(p.abs.abstracted));
    p.requirements = p.abs.abstracted;
    // Atoms first in reporting order: abstraction atoms, then the rest.
    for (const auto& [m, a] : p.abs.atom_map) e.add(a);
    e.add(goal);
    for (Formula c : p.abs.side_constraints) e.add(c);
    e.goal = e.at(goal);
    for (Formula c : p.abs.side_constraints) e.side.push_back(e.at(c));
    for (std::size_t k = 0; k < e.closure.size(); ++k) {
        Op op = e.closure[k]->op;
        if (op == Op::Atom || op == Op::Next || op == Op::Until || op == Op::WPrev || op == Op::Since)
            e.elementary.push_back(k);
        if (op == Op::Atom || op == Op::Next || op == Op::Until) e.free.push_back(k);
        if (op == Op::Until) e.untils.push_back(k);
        if (op == Op::Atom) e.atoms.push_back(k);
    }
    if (e.elementary.size() > 64)
        throw BoundsTooLarge(std::to_string(e.elementary.size()) + " elementary formulas exceed 64");
    if (e.free.size() > 24)
        throw BoundsTooLarge(std::to_string(e.free.size()) + " free elementary formulas exceed 24");
    return p;
}

struct Node {
    Values v;
    std::uint64_t pred = 0;
    bool pred_seen = false;
};
using Key = std::pair<std::uint64_t, bool>;   // label, goal seen
using Layer = std::map<Key, Node>;

struct LoopKey {
    std::uint64_t label;
    bool seen;
    std::uint64_t pending, fulfilled;
    auto operator<=>(const LoopKey&) const = default;
};

struct LoopNode {
    Values v;
    LoopKey pred{};
};

std::vector<std::string> true_atoms(const Engine& e, const Values& v) {
    std::vector<std::string> out;
    for (std::size_t k : e.atoms)
        if (v[k]) out.push_back(e.closure[k]->name);
    return out;
}

}  // namespace

std::string Verdict::text() const {
    if (!sat)
        return "UNSAT max_stem=" + std::to_string(bounds.max_stem) + " max_loop=" + std::to_string(bounds.max_loop);
    auto seq = [](const std::vector<std::vector<std::string>>& xs) {
        std::vector<std::string> parts;
        for (const auto& x : xs) parts.push_back("{" + join(x, ",") + "}");
        return "[" + join(parts, ",") + "]";
    };
    std::vector<std::string> ls;
    for (const auto& [a, f] : labels) ls.push_back(a + "=" + f);
    return "SAT stem=" + seq(stem) + " loop=" + seq(loop) + " labels={" + join(ls, "; ") + "}";
}

Verdict bounded_sat(const std::vector<Formula>& fs, std::optional<std::uint32_t> at, const SearchBounds& b,
                    const AgentTable* agents) {
    if (b.max_loop == 0) throw BoundsTooLarge("max_loop must be at least 1");
    Prepared p = prepare(fs, at, b);
    Engine& e = p.engine;
    Verdict out;
    out.bounds = b;
    for (const auto& [m, a] : p.abs.atom_map) out.labels.emplace_back(a->name, pretty(m, agents));

    auto goal_here = [&](std::uint32_t n, const Values& v) { return (!at || n == *at) && v[e.goal]; };
    auto alive = [&](std::uint32_t n, bool seen) { return !at || n < *at || seen; };

    std::vector<Layer> layers;
    {
        Layer l0;
        for (Values& v : e.successors(nullptr)) {
            bool seen = goal_here(0, v);
            if (!alive(0, seen)) continue;
            Key k{e.label(v), seen};
            l0.emplace(k, Node{std::move(v)});
        }
        layers.push_back(std::move(l0));
    }
    for (std::uint32_t n = 1; n <= b.max_stem; ++n) {
        Layer next;
        for (const auto& [key, node] : layers.back()) {
            for (Values& v : e.successors(&node.v)) {
                bool seen = key.second || goal_here(n, v);
                if (!alive(n, seen)) continue;
                Key k{e.label(v), seen};
                if (!next.count(k)) next.emplace(k, Node{std::move(v), key.first, key.second});
            }
        }
        layers.push_back(std::move(next));
    }

    struct Shape { std::uint32_t p, q; };
    std::vector<Shape> shapes;
    for (std::uint32_t p = 0; p <= b.max_stem; ++p)
        for (std::uint32_t q = 1; q <= b.max_loop; ++q) shapes.push_back({p, q});
    std::stable_sort(shapes.begin(), shapes.end(), [](const Shape& x, const Shape& y) {
        return x.p + x.q != y.p + y.q ? x.p + x.q < y.p + y.q : x.q < y.q;
    });

    for (const Shape& sh : shapes) {
        // Goal offset inside the loop, when the goal position falls there.
        auto loop_goal = [&](std::uint32_t j, const Values& v) {
            if (!at) return bool(v[e.goal]);
            return *at >= sh.p && (*at - sh.p) % sh.q == j && v[e.goal];
        };
        for (const auto& [xkey, xnode] : layers[sh.p]) {
            const Values& x = xnode.v;
            std::map<LoopKey, LoopNode> cur;
            LoopKey start{xkey.first, xkey.second || loop_goal(0, x), e.pending(x), e.fulfilled(x)};
            cur.emplace(start, LoopNode{x, {}});
            std::vector<std::map<LoopKey, LoopNode>> trail{cur};
            for (std::uint32_t j = 1; j < sh.q; ++j) {
                std::map<LoopKey, LoopNode> nxt;
                for (const auto& [k, node] : cur) {
                    for (Values& v : e.successors(&node.v)) {
                        LoopKey nk{e.label(v), k.seen || loop_goal(j, v), k.pending | e.pending(v),
                                   k.fulfilled | e.fulfilled(v)};
                        if (!nxt.count(nk)) nxt.emplace(nk, LoopNode{std::move(v), k});
                    }
                }
                cur = std::move(nxt);
                trail.push_back(cur);
            }
            for (const auto& [k, node] : cur) {
                if (!k.seen || (k.pending & ~k.fulfilled) || !e.closes(node.v, x)) continue;
                out.sat = true;
                std::vector<std::vector<std::string>> loop;
                std::vector<std::uint32_t> goal_at;
                LoopKey walk = k;
                for (std::uint32_t j = sh.q; j-- > 0;) {
                    const LoopNode& ln = trail[j].at(walk);
                    loop.push_back(true_atoms(e, ln.v));
                    if (ln.v[e.goal]) goal_at.push_back(sh.p + j);
                    walk = ln.pred;
                }
                std::reverse(loop.begin(), loop.end());
                std::vector<std::vector<std::string>> stem;
                Key sk{xnode.pred, xnode.pred_seen};
                for (std::uint32_t n = sh.p; n-- > 0;) {
                    const Node& sn = layers[n].at(sk);
                    stem.push_back(true_atoms(e, sn.v));
                    if (sn.v[e.goal]) goal_at.push_back(n);
                    sk = Key{sn.pred, sn.pred_seen};
                }
                std::reverse(stem.begin(), stem.end());
                out.stem = std::move(stem);
                out.loop = std::move(loop);
                out.position = at ? *at : *std::min_element(goal_at.begin(), goal_at.end());
                out.explored = e.explored;
                return out;
            }
        }
    }
    out.explored = e.explored;
    return out;
}

// ---------------------------------------------------------------------------
// Explanation

namespace {

bool all_of_cands(const Engine& e, const std::vector<Values>& cs, Formula f, bool value) {
    std::size_t k = e.at(f);
    for (const Values& v : cs)
        if (bool(v[k]) != value) return false;
    return true;
}

// Splits a requirement into the parts that constrain the current position.
void unfold(const Engine& e, const std::vector<Values>& cs, Formula f, std::vector<Formula>& out) {
    if (is_neg(f) && f->a->op == Op::Imp && is_neg(f->a->b)) {
        Formula l = f->a->a;
        if (is_neg(l) && is_neg(l->a)) l = l->a->a;
        unfold(e, cs, l, out);
        unfold(e, cs, f->a->b->a, out);
        return;
    }
    if (is_neg(f) && is_neg(f->a)) {
        unfold(e, cs, f->a->a, out);
        return;
    }
    if (is_neg(f) && (f->a->op == Op::Until || f->a->op == Op::Since) && f->a->a == ctop() && is_neg(f->a->b)) {
        unfold(e, cs, f->a->b->a, out);
        return;
    }
    if (f->op == Op::Imp && !is_neg(f)) {
        if (all_of_cands(e, cs, f->a, true)) {
            unfold(e, cs, f->b, out);
            return;
        }
        if (all_of_cands(e, cs, f->a, false)) return;
    }
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
}

}  // namespace

std::string UnsatReport::text() const {
    if (atom.empty())
        return "UNSAT at position " + std::to_string(position) + ": no single-position clash; no lasso closes";
    return "clash on " + atom + " at position " + std::to_string(position) + ": {" + join(forcing_true, "; ") +
           "} forces " + atom + ", {" + join(forcing_false, "; ") + "} forces ~" + atom;
}

UnsatReport explain_unsat(const std::vector<Formula>& fs, std::optional<std::uint32_t> at, const SearchBounds& b,
                          const AgentTable* agents) {
    if (bounded_sat(fs, at, b, agents).sat) throw NotUnsat("the formula set is satisfiable within the bounds");
    Prepared p = prepare(fs, at, b);
    Engine& e = p.engine;

    std::vector<std::vector<Values>> layers;
    layers.push_back(e.successors(nullptr));
    std::uint32_t last = at ? std::max(*at, b.max_stem) : b.max_stem;
    for (std::uint32_t n = 1; n <= last; ++n) {
        std::map<std::uint64_t, Values> next;
        for (const Values& v : layers.back())
            for (Values& w : e.successors(&v)) {
                std::uint64_t l = e.label(w);
                next.emplace(l, std::move(w));
            }
        std::vector<Values> layer;
        for (auto& [l, v] : next) layer.push_back(std::move(v));
        layers.push_back(std::move(layer));
    }

    auto render = [&](Formula f) { return pretty(p.abs.concretize(f), agents); };
    UnsatReport r;
    r.position = at ? *at : 0;
    for (std::uint32_t n = at ? *at : 0; n <= (at ? *at : last); ++n) {
        const std::vector<Values>& cs = layers[n];
        if (cs.empty()) continue;
        std::vector<Formula> req;
        for (Formula f : p.requirements) unfold(e, cs, f, req);
        if (req.size() > 16) req.resize(16);
        std::size_t na = e.atoms.size();
        std::vector<std::optional<std::uint32_t>> by_true(na), by_false(na);
        std::vector<std::uint32_t> masks;
        for (std::uint32_t m = 1; m < (1U << req.size()); ++m) masks.push_back(m);
        std::stable_sort(masks.begin(), masks.end(),
                         [](std::uint32_t x, std::uint32_t y) { return std::popcount(x) < std::popcount(y); });
        for (std::uint32_t m : masks) {
            std::vector<const Values*> sat;
            for (const Values& v : cs) {
                bool ok = true;
                for (std::size_t k = 0; k < req.size() && ok; ++k)
                    if ((m >> k) & 1U) ok = v[e.at(req[k])];
                if (ok) sat.push_back(&v);
            }
            if (sat.empty()) continue;
            for (std::size_t a = 0; a < na; ++a) {
                std::size_t idx = e.atoms[a];
                bool all_t = true, all_f = true;
                for (const Values* v : sat) ((*v)[idx] ? all_f : all_t) = false;
                if (all_t && !by_true[a]) by_true[a] = m;
                if (all_f && !by_false[a]) by_false[a] = m;
            }
        }
        for (std::size_t a = 0; a < na; ++a) {
            if (!by_true[a] || !by_false[a]) continue;
            r.position = n;
            r.atom = render(e.closure[e.atoms[a]]);
            for (std::size_t k = 0; k < req.size(); ++k) {
                if ((*by_true[a] >> k) & 1U) r.forcing_true.push_back(render(req[k]));
                if ((*by_false[a] >> k) & 1U) r.forcing_false.push_back(render(req[k]));
            }
            return r;
        }
    }
    return r;
}

}  // namespace jto
