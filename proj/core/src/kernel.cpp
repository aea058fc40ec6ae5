#include "jto/kernel.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace jto {

// ---------------------------------------------------------------------------
// Axiom schemas

namespace {

struct Schema {
    std::string name;
    Formula pattern;   // desugared; atoms, term variables and the agent are metavariables
};

const std::vector<Schema>& schemas() {
    static const std::vector<Schema> all = [] {
        const std::vector<std::pair<std::string, std::string>> text = {
            {"NextK", "X(phi -> psi) -> (X phi -> X psi)"},
            {"AlwaysK", "G(phi -> psi) -> (G phi -> G psi)"},
            {"Fun", "X ~phi <-> ~X phi"},
            {"Ind", "G(phi -> X phi) -> (phi -> G phi)"},
            {"Until1", "phi U psi -> F psi"},
            {"Until2", "phi U psi <-> psi \\/ (phi /\\ X(phi U psi))"},
            {"SofarK", "H(phi -> psi) -> (H phi -> H psi)"},
            {"WPrevK", "Yw(phi -> psi) -> (Yw phi -> Yw psi)"},
            {"SW", "Ys phi -> Yw phi"},
            {"Initial", "P- Yw bot"},
            {"SofarInd", "H(phi -> Yw phi) -> (phi -> H phi)"},
            {"Since1", "phi S psi -> P- psi"},
            {"Since2", "phi S psi <-> psi \\/ (phi /\\ Ys(phi S psi))"},
            {"FP", "phi -> X Ys phi"},
            {"PF", "phi -> Yw X phi"},
            {"Application", "[t]_i(phi -> psi) -> ([s]_i phi -> [t*s]_i psi)"},
            {"Sum", "[t]_i phi -> [t+s]_i phi"},
            {"Sum", "[s]_i phi -> [t+s]_i phi"},
            {"Factivity", "[t]_i phi -> phi"},
            {"PositiveIntrospection", "[t]_i phi -> [!t]_i [t]_i phi"},
            {"ApplicationO", "O[t]_i(phi -> psi) -> (O[s]_i phi -> O[t*s]_i psi)"},
            {"NoConflicts", "O[t]_i phi -> P[t]_i phi"},
            {"ObligatedFactivity", "O[#t]_i (O[t]_i phi -> phi)"},
        };
        std::vector<Schema> out;
        for (auto& [name, src] : text) out.push_back({name, desugar(parse_formula(src))});
        return out;
    }();
    return all;
}

struct Binding {
    std::map<std::string, Formula> formulas;
    std::map<std::string, Term> terms;
    std::optional<Agent> agent;
};

bool match_term(Term p, Term t, Binding& b) {
    if (p->kind == TermKind::Var) {
        auto it = b.terms.find(p->name);
        if (it != b.terms.end()) return it->second == t;
        b.terms.emplace(p->name, t);
        return true;
    }
    if (p->kind != t->kind) return false;
    if (p->kind == TermKind::Const || p->kind == TermKind::Wild) return p->name == t->name;
    if (!match_term(p->l, t->l, b)) return false;
    return !p->r || match_term(p->r, t->r, b);
}

bool match(Formula p, Formula f, Binding& b) {
    if (p->op == Op::Atom) {
        auto it = b.formulas.find(p->name);
        if (it != b.formulas.end()) return it->second == f;
        b.formulas.emplace(p->name, f);
        return true;
    }
    if (p->op != f->op) return false;
    if (p->op == Op::JBox || p->op == Op::OBox) {
        if (b.agent && *b.agent != f->agent) return false;
        b.agent = f->agent;
        if (!match_term(p->term, f->term, b)) return false;
    }
    if (p->a && !match(p->a, f->a, b)) return false;
    if (p->b && !match(p->b, f->b, b)) return false;
    return true;
}

// Sequent search for classical implicational logic with ⊥; non-{⊥,→} nodes are atoms.
bool is_prop_atom(Formula f) { return f->op != Op::Imp && f->op != Op::Bot; }

struct Sequent {
    std::vector<Formula> left, right;
    std::unordered_set<Formula> latoms, ratoms;
};

bool prove(Sequent q) {
    while (true) {
        if (!q.right.empty()) {
            Formula f = q.right.back();
            q.right.pop_back();
            if (f->op == Op::Imp) {
                q.left.push_back(f->a);
                q.right.push_back(f->b);
            } else if (f->op != Op::Bot) {
                if (q.latoms.count(f)) return true;
                q.ratoms.insert(f);
            }
            continue;
        }
        bool reduced = false;
        for (std::size_t k = 0; k < q.left.size(); ++k) {
            Formula f = q.left[k];
            if (f->op == Op::Bot) return true;
            if (is_prop_atom(f)) {
                if (q.ratoms.count(f)) return true;
                q.latoms.insert(f);
                q.left.erase(q.left.begin() + long(k));
                reduced = true;
                break;
            }
            bool ante_known = q.latoms.count(f->a) != 0;
            bool cons_wanted = q.ratoms.count(f->b) != 0 || f->b->op == Op::Bot;
            if (f->a == f->b) {
                q.left.erase(q.left.begin() + long(k));
                reduced = true;
                break;
            }
            if (ante_known) {
                q.left[k] = f->b;
                reduced = true;
                break;
            }
            if (cons_wanted) {
                q.left.erase(q.left.begin() + long(k));
                q.right.push_back(f->a);
                reduced = true;
                break;
            }
        }
        if (!reduced) break;
    }
    if (q.left.empty()) return false;
    Formula f = q.left.back();
    q.left.pop_back();
    Sequent first = q;
    first.right.push_back(f->a);
    if (!prove(std::move(first))) return false;
    q.left.push_back(f->b);
    return prove(std::move(q));
}

void collect_prop_atoms(Formula f, std::unordered_set<Formula>& out) {
    if (f->op == Op::Bot) return;
    if (f->op == Op::Imp) {
        collect_prop_atoms(f->a, out);
        collect_prop_atoms(f->b, out);
        return;
    }
    out.insert(f);
}

}  // namespace

const std::vector<std::string>& axiom_names() {
    static const std::vector<std::string> names = {
        "Taut", "NextK", "AlwaysK", "Fun", "Ind", "Until1", "Until2", "SofarK", "WPrevK", "SW", "Initial",
        "SofarInd", "Since1", "Since2", "FP", "PF", "Application", "Sum", "Factivity", "PositiveIntrospection",
        "ApplicationO", "NoConflicts", "ObligatedFactivity"};
    return names;
}

bool is_axiom_name(const std::string& name) {
    const auto& n = axiom_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

int taut_atom_count(Formula f) {
    std::unordered_set<Formula> atoms;
    collect_prop_atoms(desugar(f), atoms);
    return int(atoms.size());
}

bool taut_check(Formula f) {
    Formula d = desugar(f);
    thread_local std::unordered_map<Formula, bool> memo;
    if (auto it = memo.find(d); it != memo.end()) return it->second;
    std::unordered_set<Formula> atoms;
    collect_prop_atoms(d, atoms);
    if (int(atoms.size()) > kTautAtomCap)
        throw TooManyAtoms(std::to_string(atoms.size()) + " abstracted atoms exceed the cap of " +
                           std::to_string(kTautAtomCap) + "; split the step");
    Sequent q;
    q.right.push_back(d);
    bool ok = prove(std::move(q));
    if (memo.size() > 100000) memo.clear();
    memo.emplace(d, ok);
    return ok;
}

bool is_instance_of(const std::string& name, Formula f) {
    if (name == "Taut") {
        try {
            return taut_check(f);
        } catch (const TooManyAtoms&) {
            return false;
        }
    }
    Formula d = desugar(f);
    for (const Schema& s : schemas()) {
        if (s.name != name) continue;
        Binding b;
        if (match(s.pattern, d, b)) return true;
    }
    return false;
}

namespace {

Term instantiate_term(Term p, Term t, Term s) {
    switch (p->kind) {
        case TermKind::Var: return p->name == "t" ? t : s;
        case TermKind::Bang: return t_bang(instantiate_term(p->l, t, s));
        case TermKind::Dagger: return t_dagger(instantiate_term(p->l, t, s));
        case TermKind::Sum: return t_sum(instantiate_term(p->l, t, s), instantiate_term(p->r, t, s));
        case TermKind::Prod: return t_prod(instantiate_term(p->l, t, s), instantiate_term(p->r, t, s));
        default: return p;
    }
}

Formula instantiate(Formula p, Formula phi, Formula psi, Term t, Term s, Agent i) {
    switch (p->op) {
        case Op::Atom: return p->name == "phi" ? phi : psi;
        case Op::Bot: return p;
        case Op::Imp: return imp(instantiate(p->a, phi, psi, t, s, i), instantiate(p->b, phi, psi, t, s, i));
        case Op::Next: return next(instantiate(p->a, phi, psi, t, s, i));
        case Op::WPrev: return wprev(instantiate(p->a, phi, psi, t, s, i));
        case Op::Until: return until(instantiate(p->a, phi, psi, t, s, i), instantiate(p->b, phi, psi, t, s, i));
        case Op::Since: return since(instantiate(p->a, phi, psi, t, s, i), instantiate(p->b, phi, psi, t, s, i));
        case Op::JBox: return jbox(i, instantiate_term(p->term, t, s), instantiate(p->a, phi, psi, t, s, i));
        case Op::OBox: return obox(i, instantiate_term(p->term, t, s), instantiate(p->a, phi, psi, t, s, i));
        default: throw Error("InternalError", "schema patterns are desugared");
    }
}

}  // namespace

Formula axiom_instance(const std::string& name, Formula phi, Formula psi, Term t, Term s, Agent i) {
    phi = desugar(phi);
    psi = desugar(psi);
    if (name == "Taut") return desugar(imp(imp(imp(phi, psi), phi), phi));
    for (const Schema& sc : schemas())
        if (sc.name == name) return desugar(instantiate(sc.pattern, phi, psi, t, s, i));
    throw Error("UnknownAxiom", name);
}

std::vector<std::string> match_axiom(Formula f) {
    std::vector<std::string> out;
    if (is_instance_of("Taut", f)) out.push_back("Taut");
    Formula d = desugar(f);
    for (const Schema& s : schemas()) {
        Binding b;
        if (match(s.pattern, d, b) && std::find(out.begin(), out.end(), s.name) == out.end()) out.push_back(s.name);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Constant specifications

bool ConstantSpecification::contains(Formula f) const {
    Formula d = desugar(f);
    for (Formula e : entries)
        if (desugar(e) == d) return true;
    return false;
}

std::vector<Formula> ConstantSpecification::epistemic_part() const {
    std::vector<Formula> out;
    for (Formula e : entries)
        if (e->op == Op::JBox) out.push_back(e);
    return out;
}

std::vector<Formula> ConstantSpecification::deontic_part() const {
    std::vector<Formula> out;
    for (Formula e : entries)
        if (e->op == Op::OBox) out.push_back(e);
    return out;
}

ValidationReport check_cs(const ConstantSpecification& cs, const AgentTable* agents) {
    ValidationReport r;
    for (Formula e : cs.entries) {
        std::string shown = pretty(e, agents);
        Formula d = desugar(e);
        if (d->op != Op::JBox && d->op != Op::OBox) {
            r.violations.push_back("shape: " + shown + " is not a box prefix over an axiom instance");
            continue;
        }
        Op kind = d->op;
        int depth = 0;
        Formula inner = d;
        bool bad_term = false;
        while (inner->op == kind) {
            if (inner->term->kind != TermKind::Const) bad_term = true;
            ++depth;
            inner = inner->a;
        }
        if (bad_term) r.violations.push_back("shape: " + shown + " has a prefix term that is not a constant");
        if ((inner->op == Op::JBox || inner->op == Op::OBox) && inner->term->kind == TermKind::Const &&
            match_axiom(inner).empty())
            r.violations.push_back("mixed-prefix: " + shown +
                                   " mixes epistemic and deontic constant boxes (only homogeneous prefixes are accepted)");
        else if (match_axiom(inner).empty())
            r.violations.push_back("inner-formula-not-an-axiom: " + shown);
        if (depth > 1 && !cs.contains(d->a))
            r.violations.push_back("downward-closure: " + shown + " is present but " + pretty(d->a, agents) +
                                   " is missing");
    }
    return r;
}

// ---------------------------------------------------------------------------
// Checking

FormulaSet ProofScript::goal_hypotheses() const {
    FormulaSet out;
    for (int k : goal_hyps)
        if (k >= 1 && k <= int(pool.size())) out.insert(desugar(pool[std::size_t(k - 1)]));
    return out;
}

const Goal* Registry::find(const std::string& name) const {
    auto it = goals_.find(name);
    return it == goals_.end() ? nullptr : &it->second;
}

std::string CheckReport::summary() const {
    std::ostringstream os;
    os << script << ": " << (accepted ? "ACCEPT" : "REJECT");
    for (const auto& d : diagnostics) os << "\n  line " << d.line << ": " << d.kind << ": " << d.detail;
    return os.str();
}

namespace {

bool subset(const FormulaSet& a, const FormulaSet& b) {
    for (Formula f : a)
        if (!b.count(f)) return false;
    return true;
}

const char* nec_name(JKind k) {
    switch (k) {
        case JKind::NecX: return "nec-X";
        case JKind::NecYw: return "nec-Yw";
        case JKind::NecG: return "nec-G";
        case JKind::NecH: return "nec-H";
        default: return "nec";
    }
}

Formula nec_apply(JKind k, Formula f) {
    switch (k) {
        case JKind::NecX: return next(f);
        case JKind::NecYw: return wprev(f);
        case JKind::NecG: return always(f);
        default: return sofar(f);
    }
}

struct Checker {
    const ProofScript& s;
    const ConstantSpecification& cs;
    const Registry& reg;
    CheckReport report;
    std::vector<Formula> forms;       // desugared formula per line (1-based via index-1)
    std::vector<FormulaSet> declared; // desugared declared hypotheses per line

    void diag(int line, const std::string& kind, const std::string& detail) {
        report.diagnostics.push_back({line, kind, detail});
    }

    bool ref_ok(int line, int r) {
        if (r < 1 || r >= line) {
            diag(line, "Malformed", "reference " + std::to_string(r) + " does not point to an earlier line");
            return false;
        }
        return true;
    }

    void run() {
        report.script = s.name;
        int n = int(s.lines.size());
        forms.resize(std::size_t(n));
        declared.resize(std::size_t(n));
        for (int k = 0; k < n; ++k) {
            const ProofLine& L = s.lines[std::size_t(k)];
            int line = k + 1;
            if (L.index != line) diag(line, "Malformed", "line numbered " + std::to_string(L.index));
            forms[std::size_t(k)] = desugar(L.formula);
            bool hyps_ok = true;
            for (int h : L.hyps) {
                if (h < 1 || h > int(s.pool.size())) {
                    diag(line, "Malformed", "hypothesis index " + std::to_string(h) + " not in pool");
                    hyps_ok = false;
                } else {
                    declared[std::size_t(k)].insert(desugar(s.pool[std::size_t(h - 1)]));
                }
            }
            if (!hyps_ok) continue;
            check_line(line, L);
        }
        if (n == 0) {
            diag(0, "GoalMismatch", "script has no lines");
        } else {
            Formula last = forms.back();
            if (!s.goal || last != desugar(s.goal))
                diag(n, "GoalMismatch", "last line does not state the goal formula");
            if (!subset(declared.back(), s.goal_hypotheses()))
                diag(n, "GoalMismatch", "last line depends on hypotheses outside the goal");
        }
        report.accepted = report.diagnostics.empty();
    }

    void require_hyps(int line, const FormulaSet& computed) {
        if (!subset(computed, declared[std::size_t(line - 1)]))
            diag(line, "SideConditionFailed", "declared hypotheses omit some the justification depends on");
    }

    void check_line(int line, const ProofLine& L) {
        const Justification& j = L.just;
        Formula cur = forms[std::size_t(line - 1)];
        auto F = [&](int r) { return forms[std::size_t(r - 1)]; };
        auto D = [&](int r) -> const FormulaSet& { return declared[std::size_t(r - 1)]; };
        auto need_refs = [&](std::size_t count) {
            if (j.refs.size() != count) {
                diag(line, "Malformed", "expected " + std::to_string(count) + " references");
                return false;
            }
            for (int r : j.refs)
                if (!ref_ok(line, r)) return false;
            return true;
        };
        switch (j.kind) {
            case JKind::Hyp:
                if (!declared[std::size_t(line - 1)].count(cur))
                    diag(line, "SideConditionFailed", "formula is not among the line's hypotheses");
                return;
            case JKind::Axiom: {
                if (!is_axiom_name(j.name)) {
                    diag(line, "UnknownJustification", "no axiom schema named '" + j.name + "'");
                    return;
                }
                bool ok = false;
                try {
                    ok = j.name == "Taut" ? taut_check(cur) : is_instance_of(j.name, cur);
                } catch (const TooManyAtoms& e) {
                    diag(line, "SideConditionFailed", e.what());
                    return;
                }
                if (!ok) diag(line, "SideConditionFailed", "formula is not an instance of " + j.name);
                return;
            }
            case JKind::IaxNec:
                if (!cs.contains(cur)) diag(line, "SideConditionFailed", "formula is not in the constant specification");
                return;
            case JKind::MP: {
                if (!need_refs(2)) return;
                int a = j.refs[0], b = j.refs[1];
                bool ok = F(b) == imp(F(a), cur) || F(a) == imp(F(b), cur);
                if (!ok) {
                    diag(line, "SideConditionFailed", "cited lines do not have the shape φ and φ → current");
                    return;
                }
                FormulaSet h = D(a);
                h.insert(D(b).begin(), D(b).end());
                require_hyps(line, h);
                return;
            }
            case JKind::NecX:
            case JKind::NecYw:
            case JKind::NecG:
            case JKind::NecH: {
                if (!need_refs(1)) return;
                int a = j.refs[0];
                if (!D(a).empty()) {
                    diag(line, "HypothesisLeak", std::string(nec_name(j.kind)) + " applied to a line with hypotheses");
                    return;
                }
                if (desugar(nec_apply(j.kind, F(a))) != cur)
                    diag(line, "SideConditionFailed", "formula is not the necessitation of the cited line");
                return;
            }
            case JKind::BoxdotLift: {
                if (!need_refs(1)) return;
                int a = j.refs[0];
                if (desugar(boxdot(F(a))) != cur) {
                    diag(line, "SideConditionFailed", "formula is not ⊡ of the cited line");
                    return;
                }
                FormulaSet h;
                for (Formula x : D(a)) h.insert(desugar(boxdot(x)));
                require_hyps(line, h);
                return;
            }
            case JKind::WPrevRM:
            case JKind::OnceRM: {
                if (!need_refs(1)) return;
                int a = j.refs[0];
                if (!D(a).empty()) {
                    diag(line, "HypothesisLeak", "monotonicity rule applied to a line with hypotheses");
                    return;
                }
                Formula p = F(a);
                if (p->op != Op::Imp) {
                    diag(line, "SideConditionFailed", "cited line is not an implication");
                    return;
                }
                Formula want = j.kind == JKind::WPrevRM ? imp(wprev(p->a), wprev(p->b))
                                                        : imp(once(p->a), once(p->b));
                if (desugar(want) != cur) diag(line, "SideConditionFailed", "formula does not follow by the rule");
                return;
            }
            case JKind::Weaken: {
                if (!need_refs(1)) return;
                int a = j.refs[0];
                if (F(a) != cur) {
                    diag(line, "SideConditionFailed", "weakening must repeat the cited formula");
                    return;
                }
                require_hyps(line, D(a));
                return;
            }
            case JKind::Lemma: {
                const Goal* g = reg.find(j.name);
                if (!g) {
                    diag(line, "UnknownJustification", "no accepted script named '" + j.name + "'");
                    return;
                }
                if (g->formula != cur) {
                    diag(line, "SideConditionFailed", "formula differs from the goal of " + j.name);
                    return;
                }
                require_hyps(line, g->hyps);
                return;
            }
            case JKind::Taut: {
                for (int r : j.refs)
                    if (!ref_ok(line, r)) return;
                std::vector<Formula> premises;
                FormulaSet h;
                for (int r : j.refs) {
                    premises.push_back(F(r));
                    h.insert(D(r).begin(), D(r).end());
                }
                for (const std::string& name : j.lemmas) {
                    const Goal* g = reg.find(name);
                    if (!g) {
                        diag(line, "UnknownJustification", "no accepted script named '" + name + "'");
                        return;
                    }
                    premises.push_back(g->formula);
                    h.insert(g->hyps.begin(), g->hyps.end());
                }
                Formula target = cur;
                for (auto it = premises.rbegin(); it != premises.rend(); ++it) target = imp(*it, target);
                bool ok = false;
                try {
                    ok = taut_check(target);
                } catch (const TooManyAtoms& e) {
                    diag(line, "SideConditionFailed", e.what());
                    return;
                }
                if (!ok) {
                    diag(line, "SideConditionFailed", "formula is not a tautological consequence of the cited facts");
                    return;
                }
                require_hyps(line, h);
                return;
            }
            case JKind::Deduction: {
                if (j.refs.size() != 2) {
                    diag(line, "Malformed", "deduction takes a line and a pool index");
                    return;
                }
                int a = j.refs[0], k = j.refs[1];
                if (!ref_ok(line, a)) return;
                if (k < 1 || k > int(s.pool.size())) {
                    diag(line, "Malformed", "pool index " + std::to_string(k) + " out of range");
                    return;
                }
                Formula h = desugar(s.pool[std::size_t(k - 1)]);
                if (cur != imp(h, F(a))) {
                    diag(line, "SideConditionFailed", "formula is not (discharged hypothesis) → (cited line)");
                    return;
                }
                FormulaSet rest = D(a);
                rest.erase(h);
                require_hyps(line, rest);
                return;
            }
        }
        diag(line, "UnknownJustification", "unrecognised justification");
    }
};

}  // namespace

CheckReport check_proof(const ProofScript& s, const ConstantSpecification& cs, Registry& registry) {
    Checker c{s, cs, registry, {}, {}, {}};
    c.run();
    if (c.report.accepted) registry.add(s.name, Goal{s.goal_hypotheses(), desugar(s.goal)});
    return c.report;
}

CheckReport check_proof(const ProofScript& s, const ConstantSpecification& cs) {
    Registry r;
    return check_proof(s, cs, r);
}

CheckReport check_bundle(const ProofBundle& b, const ConstantSpecification& cs, Registry& registry) {
    CheckReport last;
    for (const ProofScript& s : b.parts) {
        if (&s != &b.parts.back() && registry.contains(s.name)) continue;
        last = check_proof(s, cs, registry);
        if (!last.accepted) return last;
    }
    return last;
}

CheckReport check_bundle(const ProofBundle& b, const ConstantSpecification& cs) {
    Registry r;
    return check_bundle(b, cs, r);
}

// ---------------------------------------------------------------------------
// Deduction transform

ProofScript deduction_transform(const ProofScript& s, int pool_index, const Registry& registry) {
    if (pool_index < 1 || pool_index > int(s.pool.size())) throw OutOfRange("pool index out of range");
    Formula h = s.pool[std::size_t(pool_index - 1)];
    Formula hd = desugar(h);
    ProofScript out;
    out.name = s.name + "-discharged";
    out.cs_ref = s.cs_ref;
    out.pool = s.pool;

    auto depends = [&](const ProofLine& L) {
        for (int k : L.hyps)
            if (desugar(s.pool[std::size_t(k - 1)]) == hd) return true;
        return false;
    };
    auto without_h = [&](const std::vector<int>& hs) {
        std::vector<int> r;
        for (int k : hs)
            if (desugar(s.pool[std::size_t(k - 1)]) != hd) r.push_back(k);
        return r;
    };

    std::vector<int> plain(s.lines.size() + 1, 0);   // new index of the copied original line
    std::vector<int> arrow(s.lines.size() + 1, 0);   // new index of the h → φ line, if any
    auto emit = [&](std::vector<int> hyps, Formula f, Justification j) {
        ProofLine L;
        L.index = int(out.lines.size()) + 1;
        L.hyps = std::move(hyps);
        L.formula = f;
        L.just = std::move(j);
        out.lines.push_back(L);
        return L.index;
    };
    auto remap = [&](const Justification& j) {
        Justification r = j;
        if (j.kind == JKind::Deduction) {
            r.refs[0] = plain[std::size_t(j.refs[0])];
        } else {
            for (int& x : r.refs) x = plain[std::size_t(x)];
        }
        return r;
    };

    for (std::size_t k = 0; k < s.lines.size(); ++k) {
        const ProofLine& L = s.lines[k];
        int idx = int(k) + 1;
        plain[std::size_t(idx)] = emit(L.hyps, L.formula, remap(L.just));
        if (!depends(L)) continue;
        Formula target = imp(h, L.formula);
        const Justification& j = L.just;
        std::vector<int> hyps = without_h(L.hyps);
        Justification nj;
        bool rewritten = true;
        switch (j.kind) {
            case JKind::Hyp:
                if (desugar(L.formula) == hd) {
                    nj.kind = JKind::Axiom;
                    nj.name = "Taut";
                } else {
                    nj.kind = JKind::Taut;
                    nj.refs = {plain[std::size_t(idx)]};
                }
                break;
            case JKind::MP:
            case JKind::Taut:
            case JKind::Weaken: {
                nj.kind = JKind::Taut;
                nj.lemmas = j.lemmas;
                for (int r : j.refs) {
                    int a = arrow[std::size_t(r)];
                    nj.refs.push_back(a ? a : plain[std::size_t(r)]);
                }
                if (j.kind == JKind::Taut) {
                    for (const std::string& name : j.lemmas) {
                        const Goal* g = registry.find(name);
                        if (g && g->hyps.count(hd)) rewritten = false;
                    }
                }
                break;
            }
            default: rewritten = false;
        }
        if (!rewritten) {
            nj = Justification{};
            nj.kind = JKind::Deduction;
            nj.refs = {plain[std::size_t(idx)], pool_index};
        }
        arrow[std::size_t(idx)] = emit(hyps, target, nj);
    }
    const ProofLine& last = s.lines.back();
    int lastidx = int(s.lines.size());
    if (!arrow[std::size_t(lastidx)]) {
        Justification j;
        j.kind = JKind::Taut;
        j.refs = {plain[std::size_t(lastidx)]};
        arrow[std::size_t(lastidx)] = emit(last.hyps, imp(h, last.formula), j);
    }
    for (int g : s.goal_hyps)
        if (desugar(s.pool[std::size_t(g - 1)]) != hd) out.goal_hyps.push_back(g);
    out.goal = imp(h, s.goal);
    return out;
}

// ---------------------------------------------------------------------------
// Builder

ScriptBuilder::ScriptBuilder(std::string name) { script_.name = std::move(name); }

int ScriptBuilder::pool_index(Formula f) {
    Formula d = desugar(f);
    for (std::size_t k = 0; k < script_.pool.size(); ++k)
        if (desugar(script_.pool[k]) == d) return int(k) + 1;
    script_.pool.push_back(f);
    return int(script_.pool.size());
}

const FormulaSet& ScriptBuilder::hyps_of(int line) const { return line_hyps_.at(std::size_t(line - 1)); }

Formula ScriptBuilder::formula(int line) const { return script_.lines.at(std::size_t(line - 1)).formula; }

int ScriptBuilder::push(Formula f, Justification j, const FormulaSet& hyps) {
    ProofLine L;
    L.index = int(script_.lines.size()) + 1;
    L.formula = f;
    L.just = std::move(j);
    FormulaSet sorted;
    for (Formula h : hyps) L.hyps.push_back(pool_index(h));
    std::sort(L.hyps.begin(), L.hyps.end());
    script_.lines.push_back(L);
    FormulaSet d;
    for (Formula h : hyps) d.insert(desugar(h));
    line_hyps_.push_back(d);
    return L.index;
}

int ScriptBuilder::hyp(Formula f) {
    Justification j;
    j.kind = JKind::Hyp;
    pool_index(f);
    return push(f, j, FormulaSet{f});
}

int ScriptBuilder::axiom(const std::string& schema, Formula f) {
    Justification j;
    j.kind = JKind::Axiom;
    j.name = schema;
    return push(f, j, {});
}

int ScriptBuilder::iax(Formula f) {
    Justification j;
    j.kind = JKind::IaxNec;
    return push(f, j, {});
}

int ScriptBuilder::taut(Formula f, std::vector<int> from, std::vector<std::string> lemmas) {
    FormulaSet h;
    for (int r : from) h.insert(hyps_of(r).begin(), hyps_of(r).end());
    for (const std::string& n : lemmas) {
        auto it = dep_goals_.find(n);
        if (it == dep_goals_.end()) throw Error("BuilderError", "lemma " + n + " was not cited");
        h.insert(it->second.hyps.begin(), it->second.hyps.end());
    }
    Justification j;
    j.kind = JKind::Taut;
    j.refs = std::move(from);
    j.lemmas = std::move(lemmas);
    return push(f, j, h);
}

int ScriptBuilder::mp(int i, int j) {
    Formula fj = formula(j);
    Formula result;
    if (fj->op == Op::Imp) {
        result = fj->b;
    } else {
        Formula d = desugar(fj);
        if (d->op != Op::Imp) throw Error("BuilderError", "mp: second premise is not an implication");
        result = d->b;
    }
    FormulaSet h = hyps_of(i);
    h.insert(hyps_of(j).begin(), hyps_of(j).end());
    Justification jj;
    jj.kind = JKind::MP;
    jj.refs = {i, j};
    return push(result, jj, h);
}

int ScriptBuilder::nec(Op op, int i) {
    Justification j;
    j.refs = {i};
    switch (op) {
        case Op::Next: j.kind = JKind::NecX; break;
        case Op::WPrev: j.kind = JKind::NecYw; break;
        case Op::Alw: j.kind = JKind::NecG; break;
        case Op::Sofar: j.kind = JKind::NecH; break;
        default: throw Error("BuilderError", "nec: unsupported operator");
    }
    return push(nec_apply(j.kind, formula(i)), j, {});
}

int ScriptBuilder::boxdot_lift(int i) {
    Justification j;
    j.kind = JKind::BoxdotLift;
    j.refs = {i};
    FormulaSet h;
    for (int k : script_.lines[std::size_t(i - 1)].hyps) h.insert(boxdot(script_.pool[std::size_t(k - 1)]));
    return push(boxdot(formula(i)), j, h);
}

static std::pair<Formula, Formula> split_imp(Formula f) {
    if (f->op == Op::Imp) return {f->a, f->b};
    Formula d = desugar(f);
    if (d->op != Op::Imp) throw Error("BuilderError", "expected an implication");
    return {d->a, d->b};
}

int ScriptBuilder::wprev_rm(int i) {
    auto [a, c] = split_imp(formula(i));
    Justification j;
    j.kind = JKind::WPrevRM;
    j.refs = {i};
    return push(imp(wprev(a), wprev(c)), j, {});
}

int ScriptBuilder::once_rm(int i) {
    auto [a, c] = split_imp(formula(i));
    Justification j;
    j.kind = JKind::OnceRM;
    j.refs = {i};
    return push(imp(once(a), once(c)), j, {});
}

int ScriptBuilder::weaken(int i, const std::vector<Formula>& extra) {
    FormulaSet h;
    for (int k : script_.lines[std::size_t(i - 1)].hyps) h.insert(script_.pool[std::size_t(k - 1)]);
    for (Formula f : extra) h.insert(f);
    Justification j;
    j.kind = JKind::Weaken;
    j.refs = {i};
    return push(formula(i), j, h);
}

int ScriptBuilder::lemma(const std::string& name) {
    auto it = dep_goals_.find(name);
    if (it == dep_goals_.end()) throw Error("BuilderError", "lemma " + name + " was not cited");
    Justification j;
    j.kind = JKind::Lemma;
    j.name = name;
    Formula shown = it->second.formula;
    for (const ProofScript& d : deps_)
        if (d.name == name) shown = d.goal;
    return push(shown, j, it->second.hyps);
}

int ScriptBuilder::deduction(int i, Formula h) {
    int k = pool_index(h);
    FormulaSet rest;
    Formula hd = desugar(h);
    for (int x : script_.lines[std::size_t(i - 1)].hyps) {
        Formula f = script_.pool[std::size_t(x - 1)];
        if (desugar(f) != hd) rest.insert(f);
    }
    Justification j;
    j.kind = JKind::Deduction;
    j.refs = {i, k};
    return push(imp(h, formula(i)), j, rest);
}

std::string ScriptBuilder::cite(const ProofBundle& dep) {
    for (const ProofScript& p : dep.parts) {
        if (dep_goals_.count(p.name)) continue;
        deps_.push_back(p);
        FormulaSet hs;
        for (int k : p.goal_hyps) hs.insert(p.pool[std::size_t(k - 1)]);
        dep_goals_[p.name] = Goal{hs, p.goal};
    }
    return dep.main().name;
}

void ScriptBuilder::note(int line, std::string text) { script_.lines[std::size_t(line - 1)].note = std::move(text); }

ProofBundle ScriptBuilder::finish() {
    const ProofLine& L = script_.lines.back();
    std::vector<Formula> hs;
    for (int k : L.hyps) hs.push_back(script_.pool[std::size_t(k - 1)]);
    return finish(hs, L.formula);
}

ProofBundle ScriptBuilder::finish(const std::vector<Formula>& goal_hyps, Formula goal) {
    script_.goal = goal;
    script_.goal_hyps.clear();
    for (Formula h : goal_hyps) script_.goal_hyps.push_back(pool_index(h));
    std::sort(script_.goal_hyps.begin(), script_.goal_hyps.end());
    ProofBundle b;
    b.parts = deps_;
    b.parts.push_back(script_);
    return b;
}

// ---------------------------------------------------------------------------
// Derived rules

static Formula k_axiom_formula(Op op, Formula a, Formula c) {
    auto box = [&](Formula f) {
        switch (op) {
            case Op::Next: return next(f);
            case Op::WPrev: return wprev(f);
            case Op::Alw: return always(f);
            default: return sofar(f);
        }
    };
    return imp(box(imp(a, c)), imp(box(a), box(c)));
}

static const char* k_axiom_name(Op op) {
    switch (op) {
        case Op::Next: return "NextK";
        case Op::WPrev: return "WPrevK";
        case Op::Alw: return "AlwaysK";
        default: return "SofarK";
    }
}

int k_lift(ScriptBuilder& b, Op op, int line) {
    auto [a, c] = split_imp(b.formula(line));
    int n = b.nec(op, line);
    int k = b.axiom(k_axiom_name(op), k_axiom_formula(op, a, c));
    return b.mp(n, k);
}

int k_lift2(ScriptBuilder& b, Op op, int line) {
    auto [a, rest] = split_imp(b.formula(line));
    auto [c, d] = split_imp(rest);
    int first = k_lift(b, op, line);   // op a → op(c → d)
    int k2 = b.axiom(k_axiom_name(op), k_axiom_formula(op, c, d));
    Formula opa = split_imp(b.formula(first)).first;
    Formula goal = imp(opa, split_imp(b.formula(k2)).second);
    return b.taut(goal, {first, k2});
}

int boxdot_rm(ScriptBuilder& b, int line) {
    auto [a, c] = split_imp(b.formula(line));
    int g = k_lift(b, Op::Alw, line);
    int h = k_lift(b, Op::Sofar, line);
    return b.taut(imp(boxdot(a), boxdot(c)), {g, h});
}

int boxdot_rm2(ScriptBuilder& b, int line) {
    auto [a, rest] = split_imp(b.formula(line));
    auto [c, d] = split_imp(rest);
    int g = k_lift2(b, Op::Alw, line);
    int h = k_lift2(b, Op::Sofar, line);
    return b.taut(imp(boxdot(a), imp(boxdot(c), boxdot(d))), {g, h});
}

std::string formula_tag(Formula f) {
    std::string s = pretty(desugar(f));
    std::uint32_t h = 2166136261u;
    for (unsigned char c : s) {
        h ^= c;
        h *= 16777619u;
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", h);
    return buf;
}

// ---------------------------------------------------------------------------
// .jtopf

std::string justification_text(const Justification& j) {
    std::ostringstream os;
    auto refs = [&] {
        for (int r : j.refs) os << " " << r;
    };
    switch (j.kind) {
        case JKind::Hyp: os << "hyp"; break;
        case JKind::Axiom: os << "axiom " << j.name; break;
        case JKind::IaxNec: os << "iax"; break;
        case JKind::Taut:
            os << "taut";
            refs();
            for (const auto& l : j.lemmas) os << " @" << l;
            break;
        case JKind::MP: os << "mp"; refs(); break;
        case JKind::NecX: os << "nec-X"; refs(); break;
        case JKind::NecYw: os << "nec-Yw"; refs(); break;
        case JKind::NecG: os << "nec-G"; refs(); break;
        case JKind::NecH: os << "nec-H"; refs(); break;
        case JKind::BoxdotLift: os << "boxdot-lift"; refs(); break;
        case JKind::WPrevRM: os << "wprev-rm"; refs(); break;
        case JKind::OnceRM: os << "once-rm"; refs(); break;
        case JKind::Weaken: os << "weaken"; refs(); break;
        case JKind::Lemma: os << "lemma " << j.name; break;
        case JKind::Deduction: os << "deduction"; refs(); break;
    }
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

std::vector<int> parse_index_set(const std::string& text, int lineno) {
    std::string t = trim(text);
    if (t.size() < 2 || t.front() != '{' || t.back() != '}')
        throw Error("Malformed", "line " + std::to_string(lineno) + ": expected {…} hypothesis set");
    std::vector<int> out;
    std::string inner = t.substr(1, t.size() - 2);
    std::replace(inner.begin(), inner.end(), ',', ' ');
    for (const auto& w : words(inner)) {
        try {
            out.push_back(std::stoi(w));
        } catch (...) {
            throw Error("Malformed", "line " + std::to_string(lineno) + ": bad hypothesis index '" + w + "'");
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Justification parse_justification(const std::string& text, int lineno) {
    auto w = words(text);
    if (w.empty()) throw Error("Malformed", "line " + std::to_string(lineno) + ": empty justification");
    Justification j;
    const std::string& head = w[0];
    auto ints = [&](std::size_t from) {
        for (std::size_t k = from; k < w.size(); ++k) {
            if (!w[k].empty() && w[k][0] == '@') {
                j.lemmas.push_back(w[k].substr(1));
                continue;
            }
            try {
                j.refs.push_back(std::stoi(w[k]));
            } catch (...) {
                throw Error("Malformed", "line " + std::to_string(lineno) + ": bad reference '" + w[k] + "'");
            }
        }
    };
    static const std::map<std::string, JKind> simple = {
        {"mp", JKind::MP},          {"nec-X", JKind::NecX},       {"nec-Yw", JKind::NecYw},
        {"nec-G", JKind::NecG},     {"nec-H", JKind::NecH},       {"boxdot-lift", JKind::BoxdotLift},
        {"wprev-rm", JKind::WPrevRM}, {"once-rm", JKind::OnceRM}, {"weaken", JKind::Weaken},
        {"deduction", JKind::Deduction}, {"taut", JKind::Taut}};
    if (head == "hyp") {
        j.kind = JKind::Hyp;
    } else if (head == "iax") {
        j.kind = JKind::IaxNec;
    } else if (head == "axiom") {
        if (w.size() != 2) throw Error("Malformed", "line " + std::to_string(lineno) + ": axiom needs a name");
        j.kind = JKind::Axiom;
        j.name = w[1];
    } else if (head == "lemma") {
        if (w.size() != 2) throw Error("Malformed", "line " + std::to_string(lineno) + ": lemma needs a name");
        j.kind = JKind::Lemma;
        j.name = w[1];
    } else if (simple.count(head)) {
        j.kind = simple.at(head);
        ints(1);
        if (j.kind != JKind::Taut && !j.lemmas.empty())
            throw Error("Malformed", "line " + std::to_string(lineno) + ": only taut may cite lemmas");
    } else {
        j.kind = JKind::Hyp;
        j.name = head;
        throw Error("UnknownJustification", "line " + std::to_string(lineno) + ": '" + head + "'");
    }
    return j;
}

}  // namespace

ProofFile read_proof_file(const std::string& text) {
    ProofFile pf;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    ProofScript* cur = nullptr;
    bool header_seen = false;
    auto parse_f = [&](const std::string& src, int ln) {
        try {
            return parse_formula(src, &pf.agents);
        } catch (const SyntaxError& e) {
            throw SyntaxError(ln, e.column, e.expected, e.found);
        }
    };
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "jtopf 1") throw Error("Malformed", "line 1: expected header 'jtopf 1'");
            header_seen = true;
            continue;
        }
        auto w = words(line);
        if (w[0] == "agents" && !cur) {
            if (!pf.agents.empty()) throw Error("Malformed", "line " + std::to_string(lineno) + ": agents redeclared");
            pf.agents = AgentTable(std::vector<std::string>(w.begin() + 1, w.end()));
            continue;
        }
        if (w[0] == "script") {
            if (cur) throw Error("Malformed", "line " + std::to_string(lineno) + ": missing 'end' before new script");
            if (w.size() != 2) throw Error("Malformed", "line " + std::to_string(lineno) + ": script needs a name");
            pf.scripts.emplace_back();
            cur = &pf.scripts.back();
            cur->name = w[1];
            continue;
        }
        if (!cur) throw Error("Malformed", "line " + std::to_string(lineno) + ": content outside a script block");
        if (w[0] == "end") {
            if (!cur->goal) throw Error("Malformed", "line " + std::to_string(lineno) + ": script without goal");
            cur = nullptr;
            continue;
        }
        if (w[0] == "cs") {
            cur->cs_ref = w.size() > 1 ? w[1] : "";
            continue;
        }
        if (w[0] == "hyp" && line.find(':') != std::string::npos && line.find('|') == std::string::npos) {
            std::size_t colon = line.find(':');
            int k = 0;
            try {
                k = std::stoi(trim(line.substr(3, colon - 3)));
            } catch (...) {
                throw Error("Malformed", "line " + std::to_string(lineno) + ": bad hypothesis number");
            }
            if (k != int(cur->pool.size()) + 1)
                throw Error("Malformed", "line " + std::to_string(lineno) + ": hypotheses must be numbered 1, 2, …");
            cur->pool.push_back(parse_f(line.substr(colon + 1), lineno));
            continue;
        }
        if (line.rfind("goal:", 0) == 0) {
            std::string rest = line.substr(5);
            std::size_t turn = rest.find("|-");
            if (turn == std::string::npos) throw Error("Malformed", "line " + std::to_string(lineno) + ": goal needs '|-'");
            cur->goal_hyps = parse_index_set(rest.substr(0, turn), lineno);
            cur->goal = parse_f(rest.substr(turn + 2), lineno);
            continue;
        }
        // n | {hyps} | formula | justification
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t k = 0; k <= line.size(); ++k) {
            if (k == line.size() || line[k] == '|') {
                fields.push_back(trim(line.substr(start, k - start)));
                start = k + 1;
            }
        }
        if (fields.size() != 4)
            throw Error("Malformed", "line " + std::to_string(lineno) + ": expected 'n | {hyps} | formula | justification'");
        ProofLine L;
        try {
            L.index = std::stoi(fields[0]);
        } catch (...) {
            throw Error("Malformed", "line " + std::to_string(lineno) + ": bad line number");
        }
        L.hyps = parse_index_set(fields[1], lineno);
        L.formula = parse_f(fields[2], lineno);
        L.just = parse_justification(fields[3], lineno);
        cur->lines.push_back(L);
    }
    if (!header_seen) throw Error("Malformed", "empty proof file");
    if (cur) throw Error("Malformed", "unterminated script " + cur->name);
    return pf;
}

ProofFile read_proof_path(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw Error("IoError", "cannot open " + path);
    std::string text;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
    std::fclose(f);
    return read_proof_file(text);
}

std::string write_proof_file(const std::vector<ProofScript>& scripts, const AgentTable* agents) {
    std::ostringstream os;
    os << "jtopf 1\n";
    if (agents && !agents->empty()) {
        os << "agents";
        for (const auto& n : agents->names()) os << " " << n;
        os << "\n";
    }
    for (const ProofScript& s : scripts) {
        os << "\nscript " << s.name << "\n";
        if (!s.cs_ref.empty()) os << "cs " << s.cs_ref << "\n";
        for (std::size_t k = 0; k < s.pool.size(); ++k) os << "hyp " << k + 1 << ": " << pretty(s.pool[k], agents) << "\n";
        os << "goal: {";
        for (std::size_t k = 0; k < s.goal_hyps.size(); ++k) os << (k ? "," : "") << s.goal_hyps[k];
        os << "} |- " << pretty(s.goal, agents) << "\n";
        for (const ProofLine& L : s.lines) {
            if (!L.note.empty()) os << "# " << L.note << "\n";
            os << L.index << " | {";
            for (std::size_t k = 0; k < L.hyps.size(); ++k) os << (k ? "," : "") << L.hyps[k];
            os << "} | " << pretty(L.formula, agents) << " | " << justification_text(L.just) << "\n";
        }
        os << "end\n";
    }
    return os.str();
}

ConstantSpecification read_cs_file(const std::string& text, AgentTable* agents) {
    ConstantSpecification cs;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto w = words(line);
        if (w[0] == "cs") {
            cs.name = w.size() > 1 ? w[1] : "";
            continue;
        }
        try {
            cs.entries.push_back(parse_formula(line, agents));
        } catch (const SyntaxError& e) {
            throw SyntaxError(lineno, e.column, e.expected, e.found);
        }
    }
    return cs;
}

}  // namespace jto
