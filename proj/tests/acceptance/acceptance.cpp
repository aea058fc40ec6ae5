// Prints one PASS/FAIL line per acceptance criterion and exits non-zero on any FAIL.
#include "jto/corpus_proofs.hpp"
#include "jto/search.hpp"
#include "properties.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace jto;
using namespace jto::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Result {
    bool pass = true;
    std::string detail;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
};

// ---------------------------------------------------------------------------
// Criterion 1

Formula rebuild(Formula f, Formula a, Formula b) {
    switch (f->op) {
        case Op::Imp: return imp(a, b);
        case Op::Next: return next(a);
        case Op::WPrev: return wprev(a);
        case Op::Until: return until(a, b);
        case Op::Since: return since(a, b);
        case Op::JBox: return jbox(f->agent, f->term, a);
        case Op::OBox: return obox(f->agent, f->term, a);
        default: return f;
    }
}

// Local rewrites of one core node; empty when none applies.
std::vector<Formula> local_mutants(Formula f, std::size_t agents) {
    std::vector<Formula> out;
    switch (f->op) {
        case Op::Atom:
            out.push_back(atom(f->name == "zz" ? "yy" : "zz"));
            out.push_back(bot());
            break;
        case Op::Bot: out.push_back(atom("zz")); break;
        case Op::Imp:
            out.push_back(imp(f->b, f->a));
            out.push_back(f->b);
            break;
        case Op::Next:
            out.push_back(wprev(f->a));
            out.push_back(f->a);
            break;
        case Op::WPrev:
            out.push_back(next(f->a));
            out.push_back(f->a);
            break;
        case Op::Until:
            out.push_back(since(f->a, f->b));
            out.push_back(until(f->b, f->a));
            break;
        case Op::Since:
            out.push_back(until(f->a, f->b));
            out.push_back(since(f->b, f->a));
            break;
        case Op::JBox:
        case Op::OBox: {
            out.push_back(rebuild(f, imp(f->a, bot()), nullptr));
            Term z = t_var("zz");
            out.push_back(f->op == Op::JBox ? jbox(f->agent, z, f->a) : obox(f->agent, z, f->a));
            if (agents > 1) {
                Agent other = Agent((f->agent + 1) % agents);
                out.push_back(f->op == Op::JBox ? jbox(other, f->term, f->a) : obox(other, f->term, f->a));
            }
            break;
        }
        default: break;
    }
    return out;
}

// Every formula obtained by one local rewrite at one node.
void all_mutants(Formula f, std::size_t agents, const std::function<void(Formula)>& emit) {
    for (Formula m : local_mutants(f, agents)) emit(m);
    if (f->a) all_mutants(f->a, agents, [&](Formula m) { emit(rebuild(f, m, f->b)); });
    if (f->b) all_mutants(f->b, agents, [&](Formula m) { emit(rebuild(f, f->a, m)); });
}

// Truth-table tautology test over the boolean skeleton (Imp and Bot; every
// other node is an opaque letter).
void letters(Formula f, std::vector<Formula>& out) {
    if (f->op == Op::Imp) {
        letters(f->a, out);
        letters(f->b, out);
    } else if (f->op != Op::Bot && std::find(out.begin(), out.end(), f) == out.end()) {
        out.push_back(f);
    }
}

bool eval(Formula f, const std::vector<Formula>& ls, std::uint32_t v) {
    if (f->op == Op::Bot) return false;
    if (f->op == Op::Imp) return !eval(f->a, ls, v) || eval(f->b, ls, v);
    auto k = std::size_t(std::find(ls.begin(), ls.end(), f) - ls.begin());
    return (v >> k) & 1;
}

bool truth_table_tautology(Formula f) {
    std::vector<Formula> ls;
    letters(f, ls);
    if (ls.size() > 20) return false;
    for (std::uint32_t v = 0; v < (1u << ls.size()); ++v)
        if (!eval(f, ls, v)) return false;
    return true;
}

// A line whose formula is a hypothesis-free tautology and which is cited only
// by taut steps can be replaced by any other tautology without breaking the proof.
bool tautology_slot(const ProofScript& s, std::size_t line) {
    const ProofLine& l = s.lines[line];
    if (!l.hyps.empty() || !truth_table_tautology(desugar(l.formula))) return false;
    for (const ProofLine& other : s.lines)
        if (std::find(other.just.refs.begin(), other.just.refs.end(), int(line + 1)) != other.just.refs.end() &&
            other.just.kind != JKind::Taut)
            return false;
    return s.goal != l.formula && desugar(s.goal) != desugar(l.formula);
}

struct FuzzStats {
    std::size_t mutants = 0, rejected = 0, equivalent = 0;
    std::vector<std::string> survivors;
};

void fuzz_script(const ProofBundle& bundle, FuzzStats& st) {
    Registry base;
    for (std::size_t k = 0; k + 1 < bundle.parts.size(); ++k) check_proof(bundle.parts[k], {}, base);
    const ProofScript& main = bundle.main();
    for (std::size_t line = 0; line < main.lines.size(); ++line) {
        Formula orig = desugar(main.lines[line].formula);
        bool slot = tautology_slot(main, line);
        std::set<Formula> seen;
        all_mutants(orig, corpus_agents().size(), [&](Formula m) {
            if (m == orig || !seen.insert(m).second) return;
            ProofScript s = main;
            s.lines[line].formula = m;
            Registry reg = base;
            bool accepted;
            try {
                accepted = check_proof(s, {}, reg).accepted;
            } catch (const Error&) {
                accepted = false;
            }
            ++st.mutants;
            if (slot && truth_table_tautology(m)) {
                ++st.equivalent;
                return;
            }
            if (!accepted) ++st.rejected;
            else if (st.survivors.size() < 5)
                st.survivors.push_back(main.name + " line " + std::to_string(line + 1) + ": " +
                                       pretty(m, &corpus_agents()));
        });
    }
}

Result criterion1() {
    Result r;
    struct Main {
        std::string name;
        ProofBundle bundle;
        std::size_t lines;
    };
    std::vector<Main> mains = {{"protagoras", protagoras_script(), 7},
                               {"euathlus", euathlus_script(), 7},
                               {"protagoras-refined", protagoras_refined_script(), 7},
                               {"euathlus-refined", euathlus_refined_script(), 11},
                               {"no-win-first", no_win_first_script(), 13},
                               {"permitted-to-sue", permitted_to_sue_script(), 24},
                               {"judge-first", judge_first_script(), 17}};
    int accepted = 0;
    for (const Main& m : mains) {
        CheckReport rep = check_bundle(m.bundle, {});
        r.require(rep.accepted, m.name + " rejected: " + rep.summary());
        r.require(m.bundle.main().lines.size() == m.lines, m.name + " has " +
                                                                std::to_string(m.bundle.main().lines.size()) + " lines");
        accepted += rep.accepted;
    }
    FuzzStats st;
    for (const Main& m : mains) fuzz_script(m.bundle, st);
    std::size_t relevant = st.mutants - st.equivalent;
    double rate = relevant ? double(st.rejected) / double(relevant) : 0.0;
    double raw = st.mutants ? double(st.rejected) / double(st.mutants) : 0.0;
    r.require(raw >= 0.99, "mutation reject rate below 99%");
    for (const std::string& s : st.survivors) r.notes.push_back("accepted mutant " + s);
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "%d/7 scripts ACCEPT, %zu/%zu one-line mutants REJECT (%.2f%%); "
                  "%zu/%zu (%.2f%%) after setting aside %zu tautology-for-tautology mutants",
                  accepted, st.rejected, st.mutants, 100.0 * raw, st.rejected, relevant, 100.0 * rate, st.equivalent);
    r.detail = buf;
    return r;
}

// ---------------------------------------------------------------------------
// Criteria 2 to 4

struct ModelClaim {
    std::string stem;
    std::uint64_t position;
    std::function<Formula(const AgentTable&)> formula;
    bool expected;
};

Formula named(const std::string& name) { return assumption(name); }

Formula local(const AgentTable& agents, const std::string& text) {
    AgentTable a = agents;
    return parse_formula(text, &a);
}

Result criterion2() {
    Result r;
    int valid = 0, exact = 0;
    for (const std::string& stem :
         {"i1", "i2", "i3", "i3-fitting", "i4", "jre", "consistency", "strong-no-conflicts"}) {
        CaseModel cm = corpus_model(stem);
        ValidationReport vr = validate(cm.model, make_universe(cm.universe.list(), cm.universe.terms));
        r.require(vr.ok(), stem + ": " + (vr.ok() ? "" : vr.violations.front()));
        valid += vr.ok();
    }
    const std::vector<ModelClaim> claims = {
        {"i1", 10, [](const AgentTable&) { return conj_all({named("contract"), named("court"), time_literal(10)}); },
         true},
        {"i2", 0, [](const AgentTable&) { return conj(named("contract'"), neg(eventually(atom("winfirst_e")))); },
         true},
        {"i3", 10,
         [](const AgentTable&) { return conj_all({named("contract'"), named("court'"), time_literal(10)}); }, true},
        {"i4", 10,
         [](const AgentTable&) {
             return conj_all({named("contract'"), named("court'"), time_literal(10), true_at(10, neg(atom("pay")))});
         },
         true},
        {"jre", 0, [](const AgentTable& a) { return local(a, "[x]_i p <-> [x]_i (p /\\ p)"); }, false},
        {"consistency", 0, [](const AgentTable& a) { return local(a, "~O[x]_i bot"); }, false},
        {"strong-no-conflicts", 0, [](const AgentTable& a) { return local(a, "O[x]_i p /\\ O[y]_i ~p"); }, true},
    };
    for (const ModelClaim& c : claims) {
        CaseModel cm = corpus_model(c.stem);
        Formula f = c.formula(cm.model.base().agents);
        bool got = mc(cm.model, 0, c.position, f);
        r.require(got == c.expected, c.stem + " r(" + std::to_string(c.position) + ") " +
                                         pretty(f, &cm.model.base().agents) + " is " + (got ? "true" : "false"));
        exact += got == c.expected;
    }
    r.detail = std::to_string(valid) + "/8 models validate, " + std::to_string(exact) + "/7 exact checks";
    return r;
}

Result criterion3() {
    Result r;
    auto model = [](const std::string& stem) { return corpus_model(stem); };
    CaseModel jre = model("jre"), con = model("consistency"), snc = model("strong-no-conflicts");
    auto f = [](const CaseModel& cm, const std::string& text) {
        AgentTable a = cm.model.base().agents;
        return parse_formula(text, &a);
    };
    NeighborhoodChecker jc(jre.model.neighborhood);
    bool context = jc.valid(f(jre, "p <-> p /\\ p"));
    bool jre_fails = !mc_neighborhood(jre.model.neighborhood, 0, 0, f(jre, "[x]_i p <-> [x]_i (p /\\ p)"));
    bool cons_fails = !mc_neighborhood(con.model.neighborhood, 0, 0, f(con, "~O[x]_i bot"));
    bool conflict = mc_neighborhood(snc.model.neighborhood, 0, 0, f(snc, "O[x]_i p /\\ O[y]_i ~p"));
    r.require(context, "p <-> p /\\ p is not valid in the JRE model");
    r.require(jre_fails, "JRE conclusion holds");
    r.require(cons_fails, "~O[x]_i bot holds");
    r.require(conflict, "O[x]_i p /\\ O[y]_i ~p fails");
    r.require(jre.model.kind == ModelKind::Neighborhood && con.model.kind == ModelKind::Neighborhood &&
                  snc.model.kind == ModelKind::Neighborhood,
              "a countermodel is not a neighborhood model");
    r.require(!make_universe(con.universe.list()).cs, "consistency universe carries a constant specification");
    r.detail = std::to_string(int(context) + int(jre_fails) + int(cons_fails) + int(conflict)) +
               "/4 certified by mc_neighborhood";
    return r;
}

Result criterion4() {
    Result r;
    std::vector<Formula> projected{assumption("contract0"), assumption("court0"), time_literal(10)};
    Verdict v = bounded_sat(projected, std::nullopt, SearchBounds{12, 2}, &corpus_agents());
    r.require(!v.sat, "projected assumptions are SAT: " + v.text());
    CaseModel i1 = corpus_model("i1");
    r.require(validate(i1.model, make_universe(i1.universe.list(), i1.universe.terms)).ok(), "I1 does not validate");
    Formula gamma = conj_all({assumption("contract"), assumption("court"), time_literal(10)});
    bool certified = mc(i1.model, 0, 10, gamma);
    r.require(certified, "I1 does not satisfy the justified assumptions at r(10)");
    r.detail = v.text() + " (" + std::to_string(v.explored) + " labels), I1 r(10) " + (certified ? "TRUE" : "FALSE");
    return r;
}

// ---------------------------------------------------------------------------
// Criteria 5 to 8

Result from(const Outcome& o, const std::string& what) {
    Result r;
    r.pass = o.ok();
    r.detail = what + ": " + std::to_string(o.checks) + " checks, " + std::to_string(o.failures.size()) + " failures";
    if (o.redraws) r.detail += ", " + std::to_string(o.redraws) + " redraws";
    r.notes = o.failures;
    return r;
}

Result criterion5() {
    AxiomValidity a = axiom_validity(5, 25);
    return from(a.outcome, "23 schemas x 25 instances x 8 models");
}

Result criterion6() { return from(transform_equivalence(6, 20, 4, 2), "20 random models, pointwise"); }

Result criterion7() {
    Result r;
    Rng rng(7);
    FormulaShape shape;
    shape.depth = 3;
    shape.atoms = {"p", "q"};
    int lemma2 = 0, ttp = 0, total2 = 0, total_ttp = 0;
    auto accepts = [&](const ProofBundle& b, const std::string& what) {
        CheckReport rep = check_bundle(b, {});
        r.require(rep.accepted, what + ": " + rep.summary());
        return rep.accepted;
    };
    for (int body = 0; body < 5; ++body) {
        Formula phi = random_formula(rng, shape), psi = random_formula(rng, shape);
        for (int item = 1; item <= 7; ++item) {
            ++total2;
            lemma2 += accepts(derive_lemma2(item, phi, psi), "temporal lemma item " + std::to_string(item));
        }
        ScriptBuilder pb("premise-" + formula_tag(imp(phi, disj(phi, psi))));
        pb.taut(imp(phi, disj(phi, psi)));
        ProofBundle premise = pb.finish();
        for (std::uint32_t m = 0; m <= 5; ++m)
            for (int item = 1; item <= 9; ++item) {
                ++total_ttp;
                ttp += accepts(check_ttp_lemma(item, m, phi, item == 9 ? &premise : nullptr),
                               "truth predicate item " + std::to_string(item) + " m=" + std::to_string(m));
            }
    }
    r.detail = "temporal lemma " + std::to_string(lemma2) + "/" + std::to_string(total2) + ", truth predicate " +
               std::to_string(ttp) + "/" + std::to_string(total_ttp) + " ACCEPT";
    return r;
}

Result criterion8() {
    Result r;
    std::vector<std::pair<std::string, Outcome>> parts = {
        {"round-trip", round_trip(81, 1000)},
        {"idempotence", desugar_idempotence(82, 1000)},
        {"duality", duality_desugaring(83, 500)},
        {"duality-models", duality_semantic(84, 20)},
        {"cs-downward-closure", cs_downward_closure(85, 200)},
    };
    std::ostringstream d;
    for (auto& [name, o] : parts) {
        if (d.tellp() > 0) d << ", ";
        d << name << ' ' << o.checks - o.failures.size() << '/' << o.checks;
        r.require(o.ok(), name);
        for (const std::string& f : o.failures) r.notes.push_back(name + ": " + f);
    }
    r.detail = d.str();
    return r;
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        std::string name;
        std::function<Result()> run;
        double limit;   // seconds, 0 when unbounded
    };
    std::vector<Criterion> criteria = {
        {1, "proof reproduction", criterion1, 5.0},   {2, "model reproduction", criterion2, 2.0},
        {3, "non-validity suite", criterion3, 0.0},   {4, "contrast theorem", criterion4, 10.0},
        {5, "axiom validity", criterion5, 0.0},       {6, "transform equivalence", criterion6, 0.0},
        {7, "lemma bundles", criterion7, 0.0},        {8, "infrastructure properties", criterion8, 0.0},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        auto start = Clock::now();
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        if (c.limit > 0 && secs >= c.limit) {
            r.pass = false;
            r.notes.push_back("runtime over " + std::to_string(c.limit) + " s");
        }
        char head[96];
        std::snprintf(head, sizeof head, "%s %d %s (%.2f s%s)", r.pass ? "PASS" : "FAIL", c.number, c.name.c_str(),
                      secs, c.limit > 0 ? (" < " + std::to_string(int(c.limit)) + " s").c_str() : "");
        std::cout << head << ": " << r.detail << '\n';
        for (const std::string& n : r.notes) std::cout << "    " << n << '\n';
        failed += !r.pass;
    }
    std::cout << (8 - failed) << "/8 criteria pass\n";
    return failed ? 1 : 0;
}
