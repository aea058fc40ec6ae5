#include "jto/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace jto {

const std::string& corpus_asset(const std::string& file) {
    for (const auto& [name, text] : corpus_assets())
        if (name == file) return text;
    throw Error("MissingAsset", "no embedded corpus file " + file);
}

std::string check_kind_name(CheckKind k) {
    switch (k) {
        case CheckKind::Proof: return "proof";
        case CheckKind::Validate: return "validate";
        case CheckKind::ModelCheck: return "model-check";
        case CheckKind::Search: return "search";
    }
    return "?";
}

const CaseModel& CorpusCase::model(const std::string& n) const {
    for (const CaseModel& m : models)
        if (m.name == n) return m;
    throw Error("MissingModel", "case " + name + " has no model " + n);
}

namespace {

CaseModel load_model(const std::string& name, const std::string& stem) {
    CaseModel cm;
    cm.name = name;
    cm.file = stem + ".jtom";
    cm.model = read_model(corpus_asset(cm.file));
    cm.universe = read_formula_file(corpus_asset(stem + ".jto"), &cm.model.base().agents);
    return cm;
}

class CaseBuilder {
public:
    CaseBuilder(std::string name, std::string summary) {
        c_.name = std::move(name);
        c_.summary = std::move(summary);
    }

    CaseBuilder& assume(const std::string& name) {
        c_.assumptions.emplace_back(name, assumption(name));
        return *this;
    }

    CaseBuilder& script(const std::string& name) {
        for (NamedBundle& nb : scripts())
            if (nb.name == name) c_.scripts.push_back(nb);
        Expectation e;
        e.kind = CheckKind::Proof;
        e.target = name;
        e.expected = "ACCEPT";
        e.script = name;
        c_.expectations.push_back(e);
        return *this;
    }

    CaseBuilder& model(const std::string& name, const std::string& stem) {
        c_.models.push_back(load_model(name, stem));
        Expectation e;
        e.kind = CheckKind::Validate;
        e.target = name + " over " + stem + ".jto";
        e.expected = "VALID";
        e.model = name;
        c_.expectations.push_back(e);
        return *this;
    }

    CaseBuilder& holds(const std::string& model, std::uint64_t n, Formula f, bool expected,
                       const std::string& label = "") {
        const CaseModel& m = c_.model(model);
        Expectation e;
        e.kind = CheckKind::ModelCheck;
        e.model = model;
        e.position = n;
        e.formula = f;
        e.expected = expected ? "TRUE" : "FALSE";
        e.target = model + " " + m.model.base().runs[0].name + "(" + std::to_string(n) + ") " +
                   (label.empty() ? pretty(f, &m.model.base().agents) : label);
        c_.expectations.push_back(e);
        return *this;
    }

    CaseBuilder& holds(const std::string& model, std::uint64_t n, const std::string& text, bool expected) {
        AgentTable agents = c_.model(model).model.base().agents;
        return holds(model, n, parse_formula(text, &agents), expected);
    }

    CaseBuilder& search(const std::string& label, std::vector<Formula> fs, bool sat) {
        Expectation e;
        e.kind = CheckKind::Search;
        e.target = label;
        e.set = std::move(fs);
        e.expected = sat ? "SAT" : "UNSAT";
        e.bounds = SearchBounds{12, 2};
        c_.expectations.push_back(e);
        return *this;
    }

    CaseBuilder& note(std::string text) {
        c_.notes.push_back(std::move(text));
        return *this;
    }

    const NamedBundle& bundle(const std::string& name) const {
        for (const NamedBundle& nb : c_.scripts)
            if (nb.name == name) return nb;
        throw Error("MissingScript", name);
    }

    CorpusCase build() { return std::move(c_); }

private:
    static std::vector<NamedBundle>& scripts() {
        static std::vector<NamedBundle> all = corpus_scripts();
        return all;
    }

    CorpusCase c_;
};

Formula A(const std::string& name) { return assumption(name); }

std::vector<CorpusCase> build_corpus() {
    std::vector<CorpusCase> out;
    Formula t10 = time_literal(10);

    {
        CaseBuilder b("arguments-v1", "contract and court; both arguments; consistency via I1");
        b.assume("contract").assume("court").script("protagoras").script("euathlus").model("I1", "i1");
        b.holds("I1", 10, conj_all({A("contract"), A("court"), t10}), true, "contract /\\ court /\\ time=10");
        b.holds("I1", 10, b.bundle("protagoras").bundle.main().goal, true, "goal of protagoras");
        b.holds("I1", 10, b.bundle("euathlus").bundle.main().goal, true, "goal of euathlus");
        out.push_back(b.build());
    }
    {
        CaseBuilder b("sdl-projection", "forgetful projection of contract and court; derivation of bot");
        b.assume("contract0").assume("court0").script("sdl-contradiction");
        b.search("contract0, court0, time=10", {A("contract0"), A("court0"), t10}, false);
        b.search("contract, court, time=10", {A("contract"), A("court"), t10}, true);
        out.push_back(b.build());
    }
    {
        CaseBuilder b("refined-v2", "refined contract' and court'; paradox 1 not derivable; consistency via I3, I4");
        b.assume("contract'").assume("court'").script("protagoras-refined").script("euathlus-refined");
        b.model("I2", "i2").model("I3", "i3").model("I3-fitting", "i3-fitting").model("I4", "i4");
        b.holds("I2", 0, A("contract'"), true, "contract'");
        b.holds("I2", 0, "F winfirst_e", false);
        Formula delta = conj_all({A("contract'"), A("court'"), t10});
        b.holds("I3", 10, delta, true, "contract' /\\ court' /\\ time=10");
        b.holds("I3-fitting", 10, delta, true, "contract' /\\ court' /\\ time=10");
        b.holds("I4", 10, conj(delta, true_at(10, neg(atom("pay")))), true,
                "contract' /\\ court' /\\ time=10 /\\ true_10(~pay)");
        b.note("contract'' is the common-knowledge iteration of contract'; only its first two levels "
               "[a]_p contract' and [a]_e contract' are listed, informative and not checked");
        out.push_back(b.build());
    }
    {
        CaseBuilder b("permission-to-sue", "PsueE; no-win-first lemmas; the 9-line and 24-line derivations");
        b.assume("PsueE").assume("No-win-first").assume("contract");
        b.script("no-win-first").script("no-obligation-sofar").script("permitted-to-sue");
        out.push_back(b.build());
    }
    {
        CaseBuilder b("judge", "past-looking judgement; verdicts in the first and second case");
        b.assume("contract").assume("court").assume("No-win-first").assume("No-win-first'");
        b.assume("Past-looking").assume("PsueE").assume("Second-case");
        b.script("judge-first").script("permitted-to-sue").script("second-verdict");
        out.push_back(b.build());
    }
    {
        CaseBuilder b("non-validity", "countermodels for JRE, consistency and strong no-conflicts");
        b.model("JRE", "jre").model("consistency", "consistency").model("strong-no-conflicts", "strong-no-conflicts");
        b.holds("JRE", 0, "p <-> p /\\ p", true);
        b.holds("JRE", 0, "[x]_i p <-> [x]_i (p /\\ p)", false);
        b.holds("consistency", 0, "~O[x]_i bot", false);
        b.holds("strong-no-conflicts", 0, "O[x]_i p /\\ O[y]_i ~p", true);
        b.holds("strong-no-conflicts", 0, "O[x]_i p -> P[y]_i p", false);
        out.push_back(b.build());
    }
    return out;
}

CheckResult run_expectation(const CorpusCase& c, const Expectation& e) {
    CheckResult r;
    r.kind = e.kind;
    r.target = e.target;
    r.expected = e.expected;
    try {
        switch (e.kind) {
            case CheckKind::Proof: {
                r.engine = "check_proof";
                for (const NamedBundle& nb : c.scripts) {
                    if (nb.name != e.script) continue;
                    CheckReport rep = check_bundle(nb.bundle, ConstantSpecification{});
                    r.verdict = rep.accepted ? "ACCEPT" : "REJECT";
                    r.detail = std::to_string(nb.bundle.main().lines.size()) + " lines";
                    if (!rep.accepted) r.detail = rep.summary();
                }
                break;
            }
            case CheckKind::Validate: {
                const CaseModel& m = c.model(e.model);
                r.engine = m.model.kind == ModelKind::Fitting ? "validate_fitting" : "validate_neighborhood";
                Universe u = make_universe(m.universe.list(), m.universe.terms);
                ValidationReport rep = validate(m.model, u);
                r.verdict = rep.ok() ? "VALID" : "INVALID";
                r.detail = u.describe();
                if (!rep.ok())
                    r.detail += "; " + std::to_string(rep.violations.size()) + " violations, first: " +
                                rep.violations.front();
                break;
            }
            case CheckKind::ModelCheck: {
                const CaseModel& m = c.model(e.model);
                r.engine = m.model.kind == ModelKind::Fitting ? "mc_fitting" : "mc_neighborhood";
                r.verdict = mc(m.model, e.run, e.position, e.formula) ? "TRUE" : "FALSE";
                break;
            }
            case CheckKind::Search: {
                r.engine = "bounded_sat";
                Verdict v = bounded_sat(e.set, e.at, e.bounds, &corpus_agents());
                r.verdict = v.sat ? "SAT" : "UNSAT";
                r.detail = v.text();
                if (!v.sat) r.detail += "; " + explain_unsat(e.set, e.at, e.bounds, &corpus_agents()).text();
                break;
            }
        }
    } catch (const Error& err) {
        r.verdict = "ERROR";
        r.detail = err.what();
    }
    r.pass = r.verdict == r.expected;
    return r;
}

}  // namespace

const std::vector<CorpusCase>& load_corpus() {
    static const std::vector<CorpusCase> corpus = build_corpus();
    return corpus;
}

const CorpusCase& find_case(const std::string& name) {
    for (const CorpusCase& c : load_corpus())
        if (c.name == name) return c;
    throw UnknownCase(name);
}

std::size_t CaseReport::passed() const {
    std::size_t n = 0;
    for (const CheckResult& r : results) n += r.pass;
    return n;
}

std::string CaseReport::text() const {
    std::ostringstream os;
    os << "case " << name << "\n";
    for (const CheckResult& r : results) {
        os << "  " << (r.pass ? "PASS" : "FAIL") << "  " << check_kind_name(r.kind) << "  " << r.target << ": "
           << r.verdict << " (" << r.engine;
        if (!r.pass) os << ", expected " << r.expected;
        os << ")\n";
        if (!r.detail.empty()) os << "        " << r.detail << "\n";
    }
    os << passed() << "/" << results.size() << " expectations pass\n";
    return os.str();
}

std::string CaseReport::machine() const {
    std::ostringstream os;
    for (const CheckResult& r : results) os << check_kind_name(r.kind) << "\t" << r.target << "\t" << r.verdict << "\n";
    os << "case\t" << name << "\t" << passed() << "/" << results.size() << "\n";
    return os.str();
}

CaseReport run_case(const CorpusCase& c) {
    CaseReport rep;
    rep.name = c.name;
    for (const Expectation& e : c.expectations) rep.results.push_back(run_expectation(c, e));
    return rep;
}

CaseReport run_case(const std::string& name) { return run_case(find_case(name)); }

std::vector<std::string> export_corpus(const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<std::string> written;
    auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream os(fs::path(dir) / name, std::ios::binary);
        if (!os) throw Error("IOError", "cannot write " + (fs::path(dir) / name).string());
        os << text;
        written.push_back(name);
    };
    for (const auto& [name, text] : corpus_assets()) put(name, text);
    for (const NamedBundle& nb : corpus_scripts()) put(nb.name + ".jtopf", write_proof_file(nb.bundle.parts, &corpus_agents()));
    for (const CorpusCase& c : load_corpus()) {
        std::ostringstream os;
        os << "# " << c.summary << "\n";
        for (const auto& [name, f] : c.assumptions) os << "assumption\t" << name << "\t" << pretty(f, &corpus_agents()) << "\n";
        for (const std::string& n : c.notes) os << "note\t" << n << "\n";
        for (const Expectation& e : c.expectations)
            os << check_kind_name(e.kind) << "\t" << e.target << "\t" << e.expected << "\n";
        put(c.name + ".case", os.str());
    }
    return written;
}

}  // namespace jto
