#include "jto/semantics.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace jto {

// ---------------------------------------------------------------------------
// Runs and patterns

StateId LassoRun::state_at(std::uint64_t n) const {
    if (n < stem.size()) return stem[n];
    return loop[(n - stem.size()) % loop.size()];
}

bool TermPattern::matches(Term t) const {
    switch (kind) {
        case TermPatternKind::Exact: return t == term;
        case TermPatternKind::AnyVar: return t->kind == TermKind::Var;
        case TermPatternKind::AnyConst: return t->kind == TermKind::Const;
        case TermPatternKind::AnyTerm: return true;
        case TermPatternKind::AnyTermExcept: return std::find(except.begin(), except.end(), t) == except.end();
    }
    return false;
}

std::string TermPattern::text() const {
    switch (kind) {
        case TermPatternKind::Exact: return pretty(term);
        case TermPatternKind::AnyVar: return "@var";
        case TermPatternKind::AnyConst: return "@const";
        case TermPatternKind::AnyTerm: return "@any";
        case TermPatternKind::AnyTermExcept: {
            std::string out = "@except:";
            for (std::size_t k = 0; k < except.size(); ++k) out += (k ? "," : "") + pretty(except[k]);
            return out;
        }
    }
    return "";
}

TermPattern TermPattern::parse(const std::string& text) {
    TermPattern p;
    if (text == "@var") {
        p.kind = TermPatternKind::AnyVar;
    } else if (text == "@const") {
        p.kind = TermPatternKind::AnyConst;
    } else if (text == "@any") {
        p.kind = TermPatternKind::AnyTerm;
    } else if (text.rfind("@except:", 0) == 0) {
        p.kind = TermPatternKind::AnyTermExcept;
        std::istringstream is(text.substr(8));
        std::string item;
        while (std::getline(is, item, ','))
            if (!item.empty()) p.except.push_back(parse_term(item));
    } else if (!text.empty() && text[0] == '@') {
        throw Error("Malformed", "unknown term pattern " + text);
    } else {
        p.kind = TermPatternKind::Exact;
        p.term = parse_term(text);
    }
    return p;
}

namespace {

bool is_obligated_factivity(Formula f) {
    return f->op == Op::Imp && f->a->op == Op::OBox && f->a->a == f->b;
}

}  // namespace

bool FormulaPattern::matches(Formula f) const {
    switch (kind) {
        case FormulaPatternKind::Exact: return f == formula;
        case FormulaPatternKind::Any: return true;
        case FormulaPatternKind::ObligatedFactivity: return is_obligated_factivity(f);
    }
    return false;
}

std::string FormulaPattern::text(const AgentTable* agents) const {
    switch (kind) {
        case FormulaPatternKind::Exact: return pretty(formula, agents);
        case FormulaPatternKind::Any: return "@any";
        case FormulaPatternKind::ObligatedFactivity: return "@obligated-factivity";
    }
    return "";
}

FormulaPattern FormulaPattern::parse(const std::string& text, AgentTable* agents) {
    FormulaPattern p;
    if (text == "@any") {
        p.kind = FormulaPatternKind::Any;
    } else if (text == "@obligated-factivity") {
        p.kind = FormulaPatternKind::ObligatedFactivity;
    } else {
        p.kind = FormulaPatternKind::Exact;
        p.formula = desugar(parse_formula(text, agents));
    }
    return p;
}

bool EvidenceTable::contains(Agent i, StateId s, Term t, Formula f) const {
    for (const EvidenceRule& r : rules) {
        if (r.agent && *r.agent != i) continue;
        if (!has_state(r.states, s) || !r.term.matches(t) || !r.formula.matches(f)) continue;
        return r.member;
    }
    return false;
}

const std::vector<StateSet>& NeighborhoodTable::family(Agent i, StateId s, Term t) const {
    static const std::vector<StateSet> empty;
    for (const NeighborhoodRule& r : rules) {
        if (r.agent && *r.agent != i) continue;
        if (has_state(r.states, s) && r.term.matches(t)) return r.family;
    }
    return empty;
}

bool NeighborhoodTable::contains(Agent i, StateId s, Term t, StateSet x) const {
    const auto& fam = family(i, s, t);
    return std::find(fam.begin(), fam.end(), x) != fam.end();
}

// ---------------------------------------------------------------------------
// Models

StateId ModelBase::state(const std::string& n) const {
    auto s = find_state(n);
    if (!s) throw Error("UnknownState", "state '" + n + "' is not declared in " + name);
    return *s;
}

std::optional<StateId> ModelBase::find_state(const std::string& n) const {
    for (std::size_t k = 0; k < states.size(); ++k)
        if (states[k] == n) return StateId(k);
    return std::nullopt;
}

StateSet ModelBase::all_states() const {
    return states.size() >= kMaxStates ? ~StateSet{0} : (state_bit(StateId(states.size())) - 1);
}

StateSet ModelBase::image() const {
    StateSet out = 0;
    for (const LassoRun& r : runs) {
        for (StateId s : r.stem) out |= state_bit(s);
        for (StateId s : r.loop) out |= state_bit(s);
    }
    return out;
}

std::size_t ModelBase::run_index(const std::string& n) const {
    for (std::size_t k = 0; k < runs.size(); ++k)
        if (runs[k].name == n) return k;
    if (!n.empty() && std::all_of(n.begin(), n.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        std::size_t k = std::stoul(n);
        if (k < runs.size()) return k;
    }
    throw Error("UnknownRun", "run '" + n + "' is not declared in " + name);
}

const ModelBase& AnyModel::base() const {
    if (kind == ModelKind::Fitting) return fitting;
    return neighborhood;
}

std::string state_set_text(const ModelBase& m, StateSet x) {
    std::string out = "{";
    bool first = true;
    for (StateId s = 0; s < m.states.size(); ++s) {
        if (!has_state(x, s)) continue;
        out += (first ? "" : " ") + m.states[s];
        first = false;
    }
    return out + "}";
}

// ---------------------------------------------------------------------------
// Model checking

struct ModelChecker::Trace {
    std::vector<std::vector<char>> runs;
};

ModelChecker::ModelChecker(const ModelBase& m) : base_(m) {
    if (m.states.size() > kMaxStates) throw Error("TooManyStates", m.name + " has more than 64 states");
    if (m.runs.empty()) throw Error("Malformed", m.name + " has no runs");
    for (const LassoRun& r : m.runs)
        if (r.loop.empty()) throw Error("Malformed", "run " + r.name + " has an empty loop");
}

ModelChecker::~ModelChecker() = default;

bool ModelChecker::value(const Trace& t, std::size_t run, std::uint64_t n) const {
    const auto& v = t.runs[run];
    std::uint64_t L = v.size(), q = base_.runs[run].q();
    if (n >= L) n = L - q + (n - (L - q)) % q;
    return v[n] != 0;
}

const ModelChecker::Trace& ModelChecker::trace(Formula f) {
    auto it = traces_.find(f);
    if (it != traces_.end()) return *it->second;

    const Trace* ta = nullptr;
    const Trace* tb = nullptr;
    bool modal_node = f->op == Op::JBox || f->op == Op::OBox;
    if (!modal_node) {
        if (f->a) ta = &trace(f->a);
        if (f->b) tb = &trace(f->b);
    }
    int depth = temporal_depth(f);
    auto out = std::make_unique<Trace>();
    out->runs.resize(base_.runs.size());
    for (std::size_t r = 0; r < base_.runs.size(); ++r) {
        const LassoRun& run = base_.runs[r];
        std::uint64_t L = run.horizon(depth), q = run.q();
        auto& v = out->runs[r];
        v.assign(L, 0);
        auto A = [&](std::uint64_t n) { return value(*ta, r, n); };
        auto B = [&](std::uint64_t n) { return value(*tb, r, n); };
        switch (f->op) {
            case Op::Atom: {
                for (std::uint64_t n = 0; n < L; ++n) v[n] = base_.atoms[run.state_at(n)].count(f->name) != 0;
                break;
            }
            case Op::Bot: break;
            case Op::Imp:
                for (std::uint64_t n = 0; n < L; ++n) v[n] = !A(n) || B(n);
                break;
            case Op::Next:
                for (std::uint64_t n = 0; n < L; ++n) v[n] = A(n + 1);
                break;
            case Op::WPrev:
                for (std::uint64_t n = 0; n < L; ++n) v[n] = n == 0 || A(n - 1);
                break;
            case Op::Since:
                for (std::uint64_t n = 0; n < L; ++n) v[n] = B(n) || (A(n) && n > 0 && v[n - 1]);
                break;
            case Op::Until: {
                // Least fixpoint on the last period, then backwards through the prefix.
                bool carry = false;
                for (int pass = 0; pass < 2; ++pass) {
                    for (std::uint64_t n = L; n-- > L - q;) {
                        bool nxt = n + 1 == L ? carry : v[n + 1] != 0;
                        v[n] = B(n) || (A(n) && nxt);
                    }
                    carry = v[L - q] != 0;
                }
                for (std::uint64_t n = L - q; n-- > 0;) v[n] = B(n) || (A(n) && v[n + 1]);
                break;
            }
            case Op::JBox:
            case Op::OBox: {
                auto& cache = modal_cache_[f];
                if (cache.empty()) cache.assign(base_.states.size(), -1);
                for (std::uint64_t n = 0; n < L; ++n) {
                    StateId s = run.state_at(n);
                    if (cache[s] < 0) cache[s] = modal(f, s) ? 1 : 0;
                    v[n] = cache[s];
                }
                break;
            }
            default:
                throw Error("NotCore", "model checking expects desugared formulas: " + op_name(f->op));
        }
    }
    return *traces_.emplace(f, std::move(out)).first->second;
}

bool ModelChecker::holds(std::size_t run, std::uint64_t n, Formula f) {
    f = desugar(f);
    if (run >= base_.runs.size()) throw Error("UnknownRun", "run index " + std::to_string(run) + " out of range");
    int depth = temporal_depth(f);
    std::uint64_t cap = base_.runs[run].horizon_cap(depth);
    if (n > cap)
        throw HorizonExceeded("position " + std::to_string(n) + " exceeds horizon " + std::to_string(cap) +
                              " of run " + base_.runs[run].name);
    return value(trace(f), run, n);
}

bool ModelChecker::valid(Formula f) {
    f = desugar(f);
    const Trace& t = trace(f);
    for (const auto& v : t.runs)
        for (char c : v)
            if (!c) return false;
    return true;
}

StateTruth ModelChecker::occurrences(Formula f) {
    f = desugar(f);
    auto it = occ_.find(f);
    if (it != occ_.end()) return it->second;
    const Trace& t = trace(f);
    StateTruth out;
    StateSet any_false = 0;
    for (std::size_t r = 0; r < base_.runs.size(); ++r) {
        const auto& v = t.runs[r];
        for (std::uint64_t n = 0; n < v.size(); ++n) {
            StateSet bit = state_bit(base_.runs[r].state_at(n));
            out.seen |= bit;
            if (v[n]) out.any_true |= bit;
            else any_false |= bit;
        }
    }
    out.all_true = out.seen & ~any_false;
    occ_.emplace(f, out);
    return out;
}

namespace {

[[noreturn]] void position_dependence(const ModelBase& m, StateSet diff, Formula f) {
    StateId s = StateId(std::countr_zero(diff));
    throw PositionDependence(m.states[s], f, pretty(f, &m.agents));
}

void check_agent(const ModelBase& m, Agent i, std::size_t tables) {
    if (i >= tables)
        throw Error("UnknownAgent", "agent " + std::to_string(i) + " is not declared in " + m.name);
}

}  // namespace

StateSet FittingChecker::state_truth(Formula f) {
    StateTruth t = occurrences(f);
    if (t.any_true != t.all_true) position_dependence(m_, t.any_true & ~t.all_true, desugar(f));
    return t.all_true;
}

bool FittingChecker::modal(Formula f, StateId s) {
    bool deontic = f->op == Op::OBox;
    const auto& rel = deontic ? m_.RO : m_.R;
    check_agent(m_, f->agent, rel.size());
    const EvidenceTable& table = deontic ? m_.nevidence : m_.evidence;
    if (!table.contains(f->agent, s, f->term, f->a)) return false;
    StateSet succ = rel[f->agent][s] & m_.image();
    return (succ & ~occurrences(f->a).all_true) == 0;
}

StateSet NeighborhoodChecker::truth_set(Formula f) {
    f = desugar(f);
    auto it = sets_.find(f);
    if (it != sets_.end()) return it->second;
    StateTruth t = occurrences(f);
    if (t.any_true != t.all_true) position_dependence(m_, t.any_true & ~t.all_true, f);
    StateSet out = t.all_true;
    StateSet image = m_.image();
    for (StateId s = 0; s < m_.states.size(); ++s) {
        if (has_state(image, s) || s >= m_.formulas.size()) continue;
        for (const FormulaPattern& p : m_.formulas[s])
            if (p.matches(f)) {
                out |= state_bit(s);
                break;
            }
    }
    sets_.emplace(f, out);
    return out;
}

bool NeighborhoodChecker::modal(Formula f, StateId s) {
    const NeighborhoodTable& table = f->op == Op::OBox ? m_.NO : m_.N;
    check_agent(m_, f->agent, m_.agents.empty() ? f->agent + 1 : m_.agents.size());
    return table.contains(f->agent, s, f->term, truth_set(f->a));
}

bool mc_fitting(const FittingModel& m, std::size_t run, std::uint64_t n, Formula f) {
    FittingChecker c(m);
    return c.holds(run, n, f);
}

bool mc_neighborhood(const NeighborhoodModel& m, std::size_t run, std::uint64_t n, Formula f) {
    NeighborhoodChecker c(m);
    return c.holds(run, n, f);
}

bool mc(const AnyModel& m, std::size_t run, std::uint64_t n, Formula f) {
    if (m.kind == ModelKind::Fitting) return mc_fitting(m.fitting, run, n, f);
    return mc_neighborhood(m.neighborhood, run, n, f);
}

StateSet truth_set(const NeighborhoodModel& m, Formula f) {
    NeighborhoodChecker c(m);
    return c.truth_set(f);
}

// ---------------------------------------------------------------------------
// Universes

namespace {

void collect_terms(Term t, std::vector<Term>& out) {
    if (std::find(out.begin(), out.end(), t) != out.end()) return;
    if (t->l) collect_terms(t->l, out);
    if (t->r) collect_terms(t->r, out);
    out.push_back(t);
}

bool epistemic_term(Term t) {
    Sort s = term_sort(t);
    return t->kind != TermKind::Wild && (s == Sort::Either || s == Sort::Epistemic);
}

bool deontic_term(Term t) {
    Sort s = term_sort(t);
    return t->kind != TermKind::Wild && (s == Sort::Either || s == Sort::Deontic);
}

}  // namespace

Universe make_universe(const std::vector<Formula>& fs, const std::vector<Term>& extra_terms) {
    Universe u;
    for (Formula f : fs)
        for (Formula g : subf(desugar(f))) u.formulas.insert(g);
    for (Formula g : u.formulas)
        if (g->op == Op::JBox || g->op == Op::OBox) collect_terms(g->term, u.terms);
    for (Term t : extra_terms) collect_terms(t, u.terms);
    return u;
}

std::string Universe::describe() const {
    std::string out = std::to_string(formulas.size()) + " formulas, terms {";
    for (std::size_t k = 0; k < terms.size(); ++k) out += (k ? " " : "") + pretty(terms[k]);
    out += "}";
    if (cs) out += ", CS " + cs->name;
    return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Violations {
public:
    Violations(const ModelBase& m, ValidationReport& r) : m_(m), r_(r) {}
    void add(const std::string& condition, Agent i, const std::string& where, const std::string& what) {
        r_.violations.push_back(condition + ": agent " + m_.agents.name(i) + (where.empty() ? "" : " at " + where) +
                                ": " + what);
    }
    std::string f(Formula g) const { return pretty(g, &m_.agents); }
    std::string st(StateId s) const { return m_.states[s]; }

private:
    const ModelBase& m_;
    ValidationReport& r_;
};

std::vector<StateId> members(StateSet x, std::size_t n) {
    std::vector<StateId> out;
    for (StateId s = 0; s < n; ++s)
        if (has_state(x, s)) out.push_back(s);
    return out;
}

std::size_t agent_count(const ModelBase& m) { return std::max<std::size_t>(m.agents.size(), 1); }

}  // namespace

ValidationReport validate_fitting(const FittingModel& m, const Universe& u) {
    ValidationReport report;
    Violations v(m, report);
    std::size_t n = m.states.size();
    std::size_t agents = agent_count(m);
    if (m.R.size() < agents || m.RO.size() < agents) {
        report.violations.push_back("frame: relations are not given for every agent");
        return report;
    }
    std::vector<Term> te, to;
    for (Term t : u.terms) {
        if (epistemic_term(t)) te.push_back(t);
        if (deontic_term(t)) to.push_back(t);
    }
    std::vector<StateId> image = members(m.image(), n);

    for (Agent i = 0; i < agents; ++i) {
        for (StateId a = 0; a < n; ++a) {
            StateSet ra = m.R[i][a];
            if (!has_state(ra, a)) v.add("reflexivity", i, v.st(a), "R does not relate the state to itself");
            for (StateId b : members(ra, n))
                for (StateId c : members(m.R[i][b], n))
                    if (!has_state(ra, c))
                        v.add("transitivity", i, v.st(a), v.st(a) + " R " + v.st(b) + " R " + v.st(c) + " but not " +
                                                              v.st(a) + " R " + v.st(c));
            for (StateId b : members(m.RO[i][a], n))
                if (!has_state(m.RO[i][b], b))
                    v.add("shift-reflexivity", i, v.st(a), v.st(a) + " RO " + v.st(b) + " but not " + v.st(b) +
                                                               " RO " + v.st(b));
        }
    }

    std::vector<Formula> fs(u.formulas.begin(), u.formulas.end());
    std::vector<Formula> imps(fs.size() * fs.size(), nullptr);
    auto imp_of = [&](std::size_t a, std::size_t b) {
        Formula& slot = imps[a * fs.size() + b];
        if (!slot) slot = imp(fs[a], fs[b]);
        return slot;
    };
    auto E = [&](Agent i, StateId w, Term t, Formula f) { return m.evidence.contains(i, w, t, f); };
    auto EO = [&](Agent i, StateId w, Term t, Formula f) { return m.nevidence.contains(i, w, t, f); };

    for (Agent i = 0; i < agents; ++i) {
        for (StateId w : image) {
            for (StateId x : members(m.R[i][w] & m.image(), n))
                for (Term t : te)
                    for (Formula f : u.formulas)
                        if (E(i, w, t, f) && !E(i, x, t, f))
                            v.add("monotonicity", i, v.st(w),
                                  v.f(f) + " in E(" + v.st(w) + "," + pretty(t) + ") but not in E(" + v.st(x) + ")");
            if (u.cs) {
                for (Formula c : u.cs->entries) {
                    Formula d = desugar(c);
                    if (d->agent != i) continue;
                    if (d->op == Op::JBox && !E(i, w, d->term, d->a))
                        v.add("constant-specification", i, v.st(w), v.f(c) + " is in CS but not in the evidence");
                    if (d->op == Op::OBox && !EO(i, w, d->term, d->a))
                        v.add("constant-specification-O", i, v.st(w), v.f(c) + " is in CS but not in the evidence");
                }
            }
            for (Term t : te) {
                for (Formula f : u.formulas) {
                    if (!E(i, w, t, f)) continue;
                    for (Term s : te)
                        if (!E(i, w, t_sum(t, s), f) || !E(i, w, t_sum(s, t), f))
                            v.add("sum", i, v.st(w), v.f(f) + " in E(" + pretty(t) + ") but not in E(" +
                                                         pretty(t_sum(t, s)) + ") and E(" + pretty(t_sum(s, t)) + ")");
                    if (!E(i, w, t_bang(t), jbox(i, t, f)))
                        v.add("positive-introspection", i, v.st(w),
                              v.f(f) + " in E(" + pretty(t) + ") but " + v.f(jbox(i, t, f)) + " not in E(" +
                                  pretty(t_bang(t)) + ")");
                }
            }
            for (Term t : te)
                for (Term s : te)
                    for (std::size_t a = 0; a < fs.size(); ++a) {
                        Formula g = fs[a];
                        if (!E(i, w, s, g)) continue;
                        for (std::size_t b = 0; b < fs.size(); ++b)
                            if (Formula h = fs[b]; E(i, w, t, imp_of(a, b)) && !E(i, w, t_prod(t, s), h))
                                v.add("application", i, v.st(w),
                                      v.f(imp(g, h)) + " in E(" + pretty(t) + "), " + v.f(g) + " in E(" + pretty(s) +
                                          "), " + v.f(h) + " not in E(" + pretty(t_prod(t, s)) + ")");
                    }
            for (Term t : to) {
                for (Formula f : u.formulas) {
                    Formula of = imp(obox(i, t, f), f);
                    if (!EO(i, w, t_dagger(t), of))
                        v.add("obligated-factivity", i, v.st(w), v.f(of) + " not in EO(" + pretty(t_dagger(t)) + ")");
                    if (!EO(i, w, t, f)) continue;
                    if (EO(i, w, t, imp(f, bot())))
                        v.add("consistency", i, v.st(w), "both " + v.f(f) + " and its negation in EO(" + pretty(t) + ")");
                }
            }
            for (Term t : to)
                for (Term s : to)
                    for (std::size_t a = 0; a < fs.size(); ++a) {
                        Formula g = fs[a];
                        if (!EO(i, w, s, g)) continue;
                        for (std::size_t b = 0; b < fs.size(); ++b)
                            if (Formula h = fs[b]; EO(i, w, t, imp_of(a, b)) && !EO(i, w, t_prod(t, s), h))
                                v.add("application-O", i, v.st(w),
                                      v.f(imp(g, h)) + " in EO(" + pretty(t) + "), " + v.f(g) + " in EO(" +
                                          pretty(s) + "), " + v.f(h) + " not in EO(" + pretty(t_prod(t, s)) + ")");
                    }
        }
    }
    return report;
}

ValidationReport validate_neighborhood(const NeighborhoodModel& m, const Universe& u) {
    ValidationReport report;
    Violations v(m, report);
    NeighborhoodChecker c(m);
    std::size_t n = m.states.size();
    std::size_t agents = agent_count(m);
    StateSet image = m.image();
    for (StateId s = 0; s < n; ++s)
        if (has_state(image, s) && s < m.formulas.size() && !m.formulas[s].empty())
            report.violations.push_back("valuation: state " + m.states[s] + " is on a run but has a formula valuation");

    std::vector<Term> te, to;
    for (Term t : u.terms) {
        if (epistemic_term(t)) te.push_back(t);
        if (deontic_term(t)) to.push_back(t);
    }
    std::vector<Formula> fs(u.formulas.begin(), u.formulas.end());
    std::vector<StateSet> ts(fs.size());
    for (std::size_t k = 0; k < fs.size(); ++k) ts[k] = c.truth_set(fs[k]);
    auto set_text = [&](StateSet x) { return state_set_text(m, x); };

    struct Pair {
        std::size_t a, b;
        StateSet imp_set;
    };
    std::vector<Pair> pairs;
    pairs.reserve(fs.size() * fs.size());
    for (std::size_t a = 0; a < fs.size(); ++a)
        for (std::size_t b = 0; b < fs.size(); ++b) pairs.push_back({a, b, c.truth_set(imp(fs[a], fs[b]))});

    auto in = [](const std::vector<StateSet>& fam, StateSet x) {
        return std::find(fam.begin(), fam.end(), x) != fam.end();
    };

    for (Agent i = 0; i < agents; ++i) {
        for (StateId w : members(image, n)) {
            if (u.cs) {
                for (Formula cf : u.cs->entries) {
                    Formula d = desugar(cf);
                    if (d->agent != i || (d->op != Op::JBox && d->op != Op::OBox)) continue;
                    const NeighborhoodTable& tab = d->op == Op::JBox ? m.N : m.NO;
                    if (!tab.contains(i, w, d->term, c.truth_set(d->a)))
                        v.add(d->op == Op::JBox ? "constant-specification-N" : "constant-specification-NO", i, v.st(w),
                              v.f(cf) + " is in CS but the truth set of its body is not a neighborhood");
                }
            }
            for (Term t : te) {
                const auto& ft = m.N.family(i, w, t);
                if (ft.empty()) continue;
                for (std::size_t k = 0; k < fs.size(); ++k) {
                    if (!in(ft, ts[k])) continue;
                    if (!has_state(ts[k], w))
                        v.add("reflexivity-N", i, v.st(w), "[[" + v.f(fs[k]) + "]] = " + set_text(ts[k]) +
                                                               " in N(" + pretty(t) + ") does not contain the state");
                    Formula pi = jbox(i, t, fs[k]);
                    if (!m.N.contains(i, w, t_bang(t), c.truth_set(pi)))
                        v.add("positive-introspection-N", i, v.st(w),
                              "[[" + v.f(pi) + "]] not in N(" + pretty(t_bang(t)) + ")");
                    for (Term s : te)
                        if (!m.N.contains(i, w, t_sum(t, s), ts[k]) || !m.N.contains(i, w, t_sum(s, t), ts[k]))
                            v.add("sum-N", i, v.st(w), "[[" + v.f(fs[k]) + "]] in N(" + pretty(t) + ") but not in N(" +
                                                           pretty(t_sum(t, s)) + ") and N(" + pretty(t_sum(s, t)) + ")");
                }
                for (Term s : te) {
                    const auto& fs_ = m.N.family(i, w, s);
                    if (fs_.empty()) continue;
                    const auto& fts = m.N.family(i, w, t_prod(t, s));
                    for (const Pair& p : pairs)
                        if (in(ft, p.imp_set) && in(fs_, ts[p.a]) && !in(fts, ts[p.b]))
                            v.add("application-N", i, v.st(w),
                                  "[[" + v.f(imp(fs[p.a], fs[p.b])) + "]] in N(" + pretty(t) + "), [[" +
                                      v.f(fs[p.a]) + "]] in N(" + pretty(s) + "), [[" + v.f(fs[p.b]) +
                                      "]] not in N(" + pretty(t_prod(t, s)) + ")");
                }
            }
            for (Term t : to) {
                const auto& ft = m.NO.family(i, w, t);
                const auto& fd = m.NO.family(i, w, t_dagger(t));
                for (std::size_t k = 0; k < fs.size(); ++k) {
                    Formula of = imp(obox(i, t, fs[k]), fs[k]);
                    if (!in(fd, c.truth_set(of)))
                        v.add("obligated-factivity-NO", i, v.st(w),
                              "[[" + v.f(of) + "]] = " + set_text(c.truth_set(of)) + " not in NO(" +
                                  pretty(t_dagger(t)) + ")");
                    if (!in(ft, ts[k])) continue;
                    if (in(ft, c.truth_set(imp(fs[k], bot()))))
                        v.add("noc-NO", i, v.st(w), "[[" + v.f(fs[k]) + "]] and [[" + v.f(imp(fs[k], bot())) +
                                                        "]] both in NO(" + pretty(t) + ")");
                }
                if (ft.empty()) continue;
                for (Term s : to) {
                    const auto& fs_ = m.NO.family(i, w, s);
                    if (fs_.empty()) continue;
                    const auto& fts = m.NO.family(i, w, t_prod(t, s));
                    for (const Pair& p : pairs)
                        if (in(ft, p.imp_set) && in(fs_, ts[p.a]) && !in(fts, ts[p.b]))
                            v.add("application-NO", i, v.st(w),
                                  "[[" + v.f(imp(fs[p.a], fs[p.b])) + "]] in NO(" + pretty(t) + "), [[" +
                                      v.f(fs[p.a]) + "]] in NO(" + pretty(s) + "), [[" + v.f(fs[p.b]) +
                                      "]] not in NO(" + pretty(t_prod(t, s)) + ")");
                }
            }
        }
    }
    return report;
}

ValidationReport validate(const AnyModel& m, const Universe& u) {
    if (m.kind == ModelKind::Fitting) return validate_fitting(m.fitting, u);
    return validate_neighborhood(m.neighborhood, u);
}

// ---------------------------------------------------------------------------
// Fitting to neighborhood

NeighborhoodModel fitting_to_neighborhood(const FittingModel& m, const FormulaSet& universe, TransformMode mode) {
    FormulaSet u;
    for (Formula f : universe) u.insert(desugar(f));
    FormulaSet bodies;
    for (Formula f : u) {
        if (f->op != Op::JBox && f->op != Op::OBox) continue;
        if (!u.count(f->a))
            throw UniverseTooSmall(pretty(f, &m.agents) + " is in the universe but its body is not");
        bodies.insert(f->a);
    }

    NeighborhoodModel out;
    out.name = m.name + "-neighborhood";
    out.agents = m.agents;
    StateSet image = m.image();
    std::vector<StateId> remap(m.states.size(), StateId(-1));
    for (StateId s = 0; s < m.states.size(); ++s) {
        if (!has_state(image, s)) continue;
        remap[s] = StateId(out.states.size());
        out.states.push_back(m.states[s]);
        out.atoms.push_back(m.atoms[s]);
    }
    std::size_t normal = out.states.size();
    std::unordered_map<Formula, StateSet> witness;
    if (mode == TransformMode::Witnessed) {
        for (Formula b : bodies) {
            StateId w = StateId(out.states.size());
            out.states.push_back("~" + std::to_string(w - normal));
            out.atoms.emplace_back();
            witness[b] = state_bit(w);
        }
    }
    if (out.states.size() > kMaxStates)
        throw Error("TooManyStates", "transform needs " + std::to_string(out.states.size()) + " states");
    out.formulas.resize(out.states.size());
    for (auto& [b, bit] : witness) {
        FormulaPattern p;
        p.kind = FormulaPatternKind::Exact;
        p.formula = b;
        out.formulas[std::size_t(std::countr_zero(bit))].push_back(p);
    }
    for (const LassoRun& r : m.runs) {
        LassoRun nr{r.name, {}, {}};
        for (StateId s : r.stem) nr.stem.push_back(remap[s]);
        for (StateId s : r.loop) nr.loop.push_back(remap[s]);
        out.runs.push_back(nr);
    }

    FittingChecker fc(m);
    auto to_new = [&](StateSet x) {
        StateSet y = 0;
        for (StateId s = 0; s < m.states.size(); ++s)
            if (has_state(x, s) && remap[s] != StateId(-1)) y |= state_bit(remap[s]);
        return y;
    };
    const FormulaSet& candidates = mode == TransformMode::Witnessed ? bodies : u;
    std::vector<std::pair<Formula, StateSet>> sets;
    for (Formula f : candidates) sets.emplace_back(f, fc.state_truth(f));

    std::vector<Term> eterms, oterms;
    for (Formula f : u) {
        auto& dst = f->op == Op::JBox ? eterms : oterms;
        if ((f->op == Op::JBox || f->op == Op::OBox) && std::find(dst.begin(), dst.end(), f->term) == dst.end())
            dst.push_back(f->term);
    }
    std::size_t agents = agent_count(m);
    for (int deontic = 0; deontic < 2; ++deontic) {
        const auto& rel = deontic ? m.RO : m.R;
        const EvidenceTable& ev = deontic ? m.nevidence : m.evidence;
        NeighborhoodTable& table = deontic ? out.NO : out.N;
        for (Agent i = 0; i < agents && i < rel.size(); ++i) {
            for (StateId s : members(image, m.states.size())) {
                StateSet succ = rel[i][s] & image;
                for (Term t : deontic ? oterms : eterms) {
                    NeighborhoodRule rule;
                    rule.agent = i;
                    rule.states = state_bit(remap[s]);
                    rule.term.kind = TermPatternKind::Exact;
                    rule.term.term = t;
                    for (auto& [f, set] : sets) {
                        if (!ev.contains(i, s, t, f) || (succ & ~set) != 0) continue;
                        StateSet x = to_new(set);
                        auto w = witness.find(f);
                        if (w != witness.end()) x |= w->second;
                        if (std::find(rule.family.begin(), rule.family.end(), x) == rule.family.end())
                            rule.family.push_back(x);
                    }
                    if (!rule.family.empty()) table.rules.push_back(std::move(rule));
                }
            }
        }
    }
    return out;
}

}  // namespace jto
