#include "properties.hpp"

#include "jto/search.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace jto::testing {

namespace {

int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
bool coin(Rng& rng) { return std::bernoulli_distribution(0.5)(rng); }

template <class T>
const T& choose(Rng& rng, const std::vector<T>& xs) {
    return xs[std::size_t(pick(rng, int(xs.size())))];
}

const std::vector<std::string>& corpus_stems() {
    static const std::vector<std::string> stems = {"i1",  "i2",          "i3",          "i3-fitting",
                                                   "i4",  "jre",         "consistency", "strong-no-conflicts"};
    return stems;
}

bool deontic_schema(const std::string& name) {
    return name == "ApplicationO" || name == "NoConflicts" || name == "ObligatedFactivity";
}

bool epistemic_schema(const std::string& name) {
    return name == "Application" || name == "Sum" || name == "Factivity" || name == "PositiveIntrospection";
}

std::vector<Term> terms_of_sort(const std::vector<Term>& terms, Sort forbidden) {
    std::vector<Term> out;
    for (Term t : terms) {
        Sort s = term_sort(t);
        if (s != forbidden && s != Sort::Invalid) out.push_back(t);
    }
    return out;
}

std::vector<Formula> strict_subformulas(Formula f) {
    std::vector<Formula> out;
    for (Formula g : subf(f))
        if (g != f) out.push_back(g);
    return out;
}

Formula wrap_temporal(Rng& rng, Formula f) {
    switch (pick(rng, 6)) {
        case 0: return next(f);
        case 1: return eventually(f);
        case 2: return always(f);
        case 3: return once(f);
        case 4: return wprev(f);
        default: return f;
    }
}

// Temporal-free formulas, so every truth value is fixed by the state.
std::vector<Formula> random_state_formulas(Rng& rng, int count, int agents) {
    FormulaShape shape;
    shape.temporal = false;
    shape.depth = 3;
    shape.agents = agents;
    shape.atoms = {"p", "q"};
    std::vector<Formula> fs;
    for (int k = 0; k < count; ++k) fs.push_back(random_formula(rng, shape));
    return fs;
}

}  // namespace

void Outcome::fail(std::string what) {
    if (failures.size() < 20) failures.push_back(std::move(what));
    else if (failures.size() == 20) failures.push_back("...");
}

std::string Outcome::summary() const {
    std::ostringstream o;
    o << checks << " checks, " << failures.size() << " failures";
    if (redraws) o << ", " << redraws << " redraws";
    for (const std::string& f : failures) o << "\n  " << f;
    return o.str();
}

Outcome round_trip(std::uint64_t seed, int count) {
    Rng rng(seed);
    AgentTable agents(std::vector<std::string>{"i", "j"});
    Outcome out;
    for (int k = 0; k < count; ++k) {
        FormulaShape shape;
        shape.depth = 1 + pick(rng, 6);
        shape.sugar = pick(rng, 4) != 0;
        Formula f = random_formula(rng, shape);
        std::string text = pretty(f, &agents);
        ++out.checks;
        try {
            AgentTable a = agents;
            Formula g = parse_formula(text, &a);
            if (g != f) out.fail("reparse differs: " + text + " gave " + pretty(g, &agents));
        } catch (const Error& e) {
            out.fail(text + ": " + e.what());
        }
    }
    return out;
}

Outcome desugar_idempotence(std::uint64_t seed, int count) {
    Rng rng(seed);
    Outcome out;
    for (int k = 0; k < count; ++k) {
        FormulaShape shape;
        shape.depth = 1 + pick(rng, 6);
        Formula f = random_formula(rng, shape);
        Formula d = desugar(f);
        ++out.checks;
        if (desugar(d) != d) out.fail("not idempotent: " + pretty(f));
        if (!is_core(d)) out.fail("not core: " + pretty(f));
    }
    return out;
}

Outcome duality_desugaring(std::uint64_t seed, int count) {
    Rng rng(seed);
    Outcome out;
    FormulaShape shape;
    shape.depth = 3;
    for (int k = 0; k < count; ++k) {
        Formula f = random_formula(rng, shape);
        Agent i = Agent(pick(rng, 2));
        Term t = random_term(rng, 2);
        out.checks += 2;
        if (term_sort(t) != Sort::Deontic && desugar(jdia(i, t, f)) != desugar(neg(jbox(i, t, neg(f)))))
            out.fail("<t> duality: " + pretty(f));
        if (term_sort(t) != Sort::Epistemic && desugar(operm(i, t, f)) != desugar(neg(obox(i, t, neg(f)))))
            out.fail("P duality: " + pretty(f));
    }
    return out;
}

Outcome duality_semantic(std::uint64_t seed, int per_model) {
    Rng rng(seed);
    Outcome out;
    for (const std::string& stem : corpus_stems()) {
        CaseModel cm = corpus_model(stem);
        Universe u = make_universe(cm.universe.list(), cm.universe.terms);
        std::vector<Formula> bodies(u.formulas.begin(), u.formulas.end());
        std::vector<Term> eterms = terms_of_sort(u.terms, Sort::Deontic);
        std::vector<Term> dterms = terms_of_sort(u.terms, Sort::Epistemic);
        std::vector<AnyModel> views{cm.model};
        if (cm.model.kind == ModelKind::Fitting) {
            AnyModel n;
            n.kind = ModelKind::Neighborhood;
            n.neighborhood = fitting_to_neighborhood(cm.model.fitting, u.formulas);
            views.push_back(n);
        }
        const ModelBase& b = cm.model.base();
        for (int k = 0; k < per_model; ++k) {
            Formula f = choose(rng, bodies);
            Agent i = Agent(pick(rng, int(b.agents.size())));
            bool deontic = coin(rng);
            const std::vector<Term>& pool = deontic ? dterms : eterms;
            if (pool.empty()) continue;
            Term t = choose(rng, pool);
            Formula dual = deontic ? operm(i, t, f) : jdia(i, t, f);
            Formula box = deontic ? obox(i, t, neg(f)) : jbox(i, t, neg(f));
            for (AnyModel& view : views) {
                try {
                    for (const Point& pt : points(view.base(), temporal_depth(desugar(dual)))) {
                        ++out.checks;
                        if (mc(view, pt.run, pt.n, dual) == mc(view, pt.run, pt.n, box))
                            out.fail(stem + ": duality at r" + std::to_string(pt.run) + "(" + std::to_string(pt.n) +
                                     ") for " + pretty(dual, &b.agents));
                    }
                } catch (const PositionDependence&) {
                    ++out.redraws;
                }
            }
        }
    }
    return out;
}

Outcome cs_downward_closure(std::uint64_t seed, int count) {
    Rng rng(seed);
    AgentTable agents(std::vector<std::string>{"i", "j"});
    const std::vector<std::string> names = {"Taut",   "NextK",       "Fun",         "Until1",
                                            "SW",     "Application", "Sum",         "Factivity",
                                            "Since1", "NoConflicts", "ApplicationO"};
    Outcome out;
    for (int k = 0; k < count; ++k) {
        ConstantSpecification cs;
        cs.name = "random";
        int chains = 1 + pick(rng, 3);
        std::vector<std::pair<Formula, Formula>> removable;  // entry, the entry it needs
        for (int c = 0; c < chains; ++c) {
            Agent i = Agent(pick(rng, 2));
            bool deontic = coin(rng);
            Formula f = axiom_instance(choose(rng, names), atom(coin(rng) ? "p" : "q"), atom("r"), t_var("x"),
                                       t_var("y"), i);
            int depth = 1 + pick(rng, 3);
            Formula prev = nullptr;
            for (int d = 0; d < depth; ++d) {
                Term cst = t_const("C" + std::to_string(c) + std::to_string(d));
                Agent a = Agent(pick(rng, 2));
                f = deontic ? obox(a, cst, f) : jbox(a, cst, f);
                cs.entries.push_back(f);
                if (prev) removable.push_back({prev, f});
                prev = f;
            }
        }
        ++out.checks;
        ValidationReport full = check_cs(cs, &agents);
        if (!full.ok()) {
            out.fail("closed specification rejected: " + full.violations.front());
            continue;
        }
        if (removable.empty()) continue;
        auto [gone, needs] = choose(rng, removable);
        cs.entries.erase(std::find(cs.entries.begin(), cs.entries.end(), gone));
        ++out.checks;
        ValidationReport r = check_cs(cs, &agents);
        bool found = false;
        for (const std::string& v : r.violations)
            if (v.rfind("downward-closure:", 0) == 0 && v.find(pretty(gone, &agents)) != std::string::npos)
                found = true;
        if (!found) out.fail("missing " + pretty(gone, &agents) + " not reported");
    }
    return out;
}

Outcome closure_property(std::uint64_t seed, int count) {
    Rng rng(seed);
    Outcome out;
    for (int k = 0; k < count; ++k) {
        FormulaShape shape;
        shape.depth = 1 + pick(rng, 6);
        Formula f = random_formula(rng, shape);
        FormulaClosure c = subf_plus(f);
        ++out.checks;
        for (Formula m : c.positive_part)
            for (Formula g : strict_subformulas(m))
                if (!c.positive_part.count(g)) {
                    out.fail("closure of " + pretty(f) + " misses " + pretty(g));
                    break;
                }
    }
    return out;
}

Outcome lasso_periodicity(std::uint64_t seed, int models, int formulas_per_model) {
    Rng rng(seed);
    Outcome out;
    FormulaShape shape;
    shape.depth = 4;
    shape.atoms = {"p", "q"};
    for (int k = 0; k < models; ++k) {
        FittingModel m = random_fitting_model(rng, 4, 2, 2);
        FittingChecker fc(m);
        for (int j = 0; j < formulas_per_model; ++j) {
            Formula f = desugar(random_formula(rng, shape));
            int d = temporal_depth(f);
            for (std::size_t r = 0; r < m.runs.size(); ++r) {
                const LassoRun& run = m.runs[r];
                for (std::uint64_t i = run.q() * std::uint64_t(d); run.p() + i + run.q() <= run.horizon_cap(d); ++i) {
                    ++out.checks;
                    if (fc.holds(r, run.p() + i, f) != fc.holds(r, run.p() + i + run.q(), f))
                        out.fail("period breaks at " + std::to_string(run.p() + i) + " for " + pretty(f));
                }
            }
        }
    }
    return out;
}

AxiomValidity axiom_validity(std::uint64_t seed, int per_schema) {
    Rng rng(seed);
    AxiomValidity res;
    Outcome& out = res.outcome;
    for (const std::string& stem : corpus_stems()) {
        CaseModel cm = corpus_model(stem);
        Universe u = make_universe(cm.universe.list(), cm.universe.terms);
        std::vector<Formula> pool(u.formulas.begin(), u.formulas.end());
        std::vector<Term> eterms = terms_of_sort(u.terms, Sort::Deontic);
        std::vector<Term> dterms = terms_of_sort(u.terms, Sort::Epistemic);
        const ModelBase& b = cm.model.base();
        bool fitting = cm.model.kind == ModelKind::Fitting;
        std::optional<FittingChecker> fc;
        std::optional<NeighborhoodChecker> nc;
        if (fitting) fc.emplace(cm.model.fitting);
        else nc.emplace(cm.model.neighborhood);
        for (const std::string& name : axiom_names()) {
            const std::vector<Term>& terms = deontic_schema(name) ? dterms : eterms;
            bool needs_terms = deontic_schema(name) || epistemic_schema(name);
            int good = 0, tries = 0, redraws = 0;
            while (good < per_schema && tries < per_schema * 40) {
                ++tries;
                Formula phi = choose(rng, pool), psi = choose(rng, pool);
                Term t = needs_terms ? choose(rng, terms) : t_var("x");
                Term s = needs_terms ? choose(rng, terms) : t_var("y");
                Agent i = Agent(pick(rng, int(b.agents.size())));
                Formula inst = axiom_instance(name, phi, psi, t, s, i);
                try {
                    std::vector<std::string> bad;
                    if (fitting) {
                        if (!fc->valid(inst)) bad.push_back("fitting");
                        std::vector<Formula> fs = cm.universe.list();
                        fs.push_back(inst);
                        NeighborhoodModel n =
                            fitting_to_neighborhood(cm.model.fitting, make_universe(fs, cm.universe.terms).formulas);
                        NeighborhoodChecker tc(n);
                        if (!tc.valid(inst)) bad.push_back("transformed");
                    } else if (!nc->valid(inst)) {
                        bad.push_back("neighborhood");
                    }
                    ++good;
                    ++out.checks;
                    for (const std::string& sem : bad)
                        out.fail(b.name + " " + name + " (" + sem + "): " + pretty(inst, &b.agents));
                } catch (const PositionDependence&) {
                    ++redraws;
                    ++out.redraws;
                }
            }
            std::ostringstream line;
            line << b.name << ' ' << name << ' ' << good << '/' << per_schema;
            if (redraws) line << " (" << redraws << " redrawn)";
            res.lines.push_back(line.str());
            if (good < per_schema) out.fail(b.name + " " + name + ": only " + std::to_string(good) + " instances");
        }
    }
    return res;
}

Outcome transform_equivalence(std::uint64_t seed, int models, std::size_t max_states, std::size_t max_runs) {
    Rng rng(seed);
    Outcome out;
    for (int k = 0; k < models; ++k) {
        FittingModel m = random_fitting_model(rng, max_states, max_runs, 2);
        std::vector<Formula> fs = random_state_formulas(rng, 6, 2);
        std::vector<Formula> wrapped;
        for (Formula f : fs) wrapped.push_back(wrap_temporal(rng, f));
        Universe u = make_universe(wrapped);
        ValidationReport vr = validate_fitting(m, u);
        if (!vr.ok()) {
            out.fail("random model " + std::to_string(k) + " invalid: " + vr.violations.front());
            continue;
        }
        NeighborhoodModel n = fitting_to_neighborhood(m, u.formulas);
        FittingChecker fc(m);
        NeighborhoodChecker nc(n);
        for (Formula f : u.formulas)
            for (const Point& pt : points(m, temporal_depth(f))) {
                ++out.checks;
                if (fc.holds(pt.run, pt.n, f) != nc.holds(pt.run, pt.n, f))
                    out.fail("model " + std::to_string(k) + " r" + std::to_string(pt.run) + "(" +
                             std::to_string(pt.n) + "): " + pretty(f));
            }
    }
    return out;
}

Outcome search_overapproximation(std::uint64_t seed, int count) {
    Rng rng(seed);
    Outcome out;
    AgentTable agents(std::vector<std::string>{"i", "j"});
    FormulaShape shape;
    shape.depth = 3;
    shape.atoms = {"p", "q"};
    int attempts = 0;
    while (int(out.checks) < count && attempts < count * 20) {
        ++attempts;
        FittingModel m = random_fitting_model(rng, 3, 1, 2);
        std::vector<Formula> fs{random_formula(rng, shape), random_formula(rng, shape)};
        if (!validate_fitting(m, make_universe(fs)).ok()) {
            ++out.redraws;
            continue;
        }
        FittingChecker fc(m);
        Formula goal = conj_all(fs);
        std::optional<std::uint64_t> at;
        for (const Point& pt : points(m, temporal_depth(desugar(goal))))
            if (fc.holds(pt.run, pt.n, goal)) {
                at = pt.n;
                break;
            }
        if (!at) {
            ++out.redraws;
            continue;
        }
        try {
            Verdict v = bounded_sat(fs, std::nullopt, SearchBounds{8, 2}, &agents);
            ++out.checks;
            if (!v.sat) out.fail("UNSAT although true at position " + std::to_string(*at) + ": " + pretty(goal, &agents));
        } catch (const BoundsTooLarge&) {
            ++out.redraws;
        }
    }
    return out;
}

}  // namespace jto::testing
