#include "jto/corpus.hpp"
#include "jto/kernel.hpp"
#include "jto/search.hpp"
#include "jto/semantics.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace jto;

namespace {

enum Exit { kOk = 0, kRejected = 1, kUsage = 2, kBudget = 3 };

bool machine = false;

void emit(const std::string& kind, const std::string& target, const std::string& verdict, const std::string& text) {
    if (machine)
        std::cout << kind << "\t" << target << "\t" << verdict << "\n";
    else
        std::cout << text << "\n";
}

ConstantSpecification load_cs(const std::string& path, AgentTable* agents) {
    if (path.empty()) return ConstantSpecification{};
    return read_cs_file(read_text_file(path), agents);
}

std::size_t resolve_run(const ModelBase& m, const std::string& run) {
    if (!run.empty() && std::all_of(run.begin(), run.end(), ::isdigit)) return std::stoul(run);
    return m.run_index(run);
}

int cmd_parse(const std::string& text, const std::string& agent_list) {
    AgentTable agents;
    for (const std::string& a : CLI::detail::split(agent_list, ','))
        if (!a.empty()) agents.resolve_or_declare(a);
    Formula f = parse_formula(text, &agents);
    Formula d = desugar(f);
    if (machine) {
        emit("parse", pretty(f, &agents), "OK", "");
        emit("core", pretty(d, &agents), "OK", "");
        return kOk;
    }
    std::cout << "formula: " << pretty(f, &agents) << "\n";
    std::cout << "ast:     " << ast_string(f, &agents) << "\n";
    std::cout << "core:    " << pretty(d, &agents) << "\n";
    std::cout << "depth:   " << temporal_depth(d) << "\n";
    return kOk;
}

int cmd_check_proof(const std::string& path, const std::string& cs_path) {
    ProofFile pf = read_proof_path(path);
    ConstantSpecification cs = load_cs(cs_path, &pf.agents);
    Registry registry;
    bool all = true;
    for (const ProofScript& s : pf.scripts) {
        CheckReport r = check_proof(s, cs, registry);
        all = all && r.accepted;
        std::string verdict = r.accepted ? "ACCEPT" : "REJECT";
        emit("proof", s.name, verdict, r.accepted ? "ACCEPT " + s.name : r.summary());
    }
    return all ? kOk : kRejected;
}

int cmd_validate(const std::string& path, const std::string& universe_path, const std::string& cs_path) {
    AnyModel m = read_model_path(path);
    AgentTable agents = m.base().agents;
    FormulaFile uf = read_formula_path(universe_path, &agents);
    ConstantSpecification cs = load_cs(cs_path, &agents);
    Universe u = make_universe(uf.list(), uf.terms);
    if (!cs_path.empty()) u.cs = &cs;
    ValidationReport r = validate(m, u);
    std::string verdict = r.ok() ? "VALID" : "INVALID";
    if (machine) {
        emit("validate", m.base().name, verdict, "");
        for (const std::string& v : r.violations) emit("violation", m.base().name, v, "");
    } else {
        std::cout << m.base().name << ": " << verdict << " over " << u.describe() << "\n";
        for (const std::string& v : r.violations) std::cout << "  " << v << "\n";
    }
    return r.ok() ? kOk : kRejected;
}

int cmd_model_check(const std::string& path, const std::string& text, const std::string& run, std::uint64_t pos,
                    const std::string& semantics) {
    AnyModel m = read_model_path(path);
    AgentTable agents = m.base().agents;
    Formula f = parse_formula(text, &agents);
    std::size_t r = resolve_run(m.base(), run);
    bool value = false;
    std::string engine;
    if (semantics.empty() || (semantics == "fitting") == (m.kind == ModelKind::Fitting)) {
        value = mc(m, r, pos, f);
        engine = m.kind == ModelKind::Fitting ? "fitting" : "neighborhood";
    } else if (semantics == "neighborhood") {
        NeighborhoodModel n = fitting_to_neighborhood(m.fitting, make_universe({f}).formulas);
        value = mc_neighborhood(n, r, pos, f);
        engine = "neighborhood (transformed)";
    } else {
        std::cerr << "error: a neighborhood model has no fitting reading\n";
        return kUsage;
    }
    std::string verdict = value ? "true" : "false";
    std::string target = m.base().name + " " + m.base().runs[r].name + "(" + std::to_string(pos) + ") " +
                         pretty(f, &agents);
    emit("model-check", target, verdict, verdict + "  [" + engine + "] " + target);
    return value ? kOk : kRejected;
}

int cmd_search(const std::string& path, std::optional<std::uint32_t> at, std::uint32_t stem, std::uint32_t loop,
               bool explain) {
    FormulaFile ff = read_formula_path(path);
    if (!at) at = ff.at;
    SearchBounds b;
    b.max_stem = stem;
    b.max_loop = loop;
    Verdict v = bounded_sat(ff.list(), at, b, &ff.agents);
    emit("search", path, v.sat ? "SAT" : "UNSAT", v.text());
    if (!v.sat && explain) {
        UnsatReport r = explain_unsat(ff.list(), at, b, &ff.agents);
        emit("explain", path, r.atom.empty() ? "none" : r.atom, r.text());
    }
    return v.sat ? kOk : kRejected;
}

int cmd_corpus_run(const std::string& name) {
    std::vector<const CorpusCase*> cases;
    if (name.empty())
        for (const CorpusCase& c : load_corpus()) cases.push_back(&c);
    else
        cases.push_back(&find_case(name));
    bool all = true;
    for (const CorpusCase* c : cases) {
        CaseReport r = run_case(*c);
        all = all && r.ok();
        std::cout << (machine ? r.machine() : r.text());
    }
    return all ? kOk : kRejected;
}

int cmd_corpus_list() {
    for (const CorpusCase& c : load_corpus())
        emit("case", c.name, std::to_string(c.expectations.size()),
             c.name + "  (" + std::to_string(c.expectations.size()) + " expectations)  " + c.summary);
    return kOk;
}

int cmd_corpus_export(const std::string& dir) {
    for (const std::string& f : export_corpus(dir)) emit("export", f, "OK", "wrote " + dir + "/" + f);
    return kOk;
}

bool is_budget(const Error& e) {
    return e.kind() == "BoundsTooLarge" || e.kind() == "TooManyAtoms" || e.kind() == "TooManyStates";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jto: temporal epistemic-deontic justification logic toolkit"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "machine"}));

    std::string expr, agents, file, cs, universe, run = "0", semantics, name, dir;
    std::uint64_t pos = 0;
    std::optional<std::uint32_t> at;
    std::uint32_t max_stem = 12, max_loop = 2;
    bool explain = false;

    auto* parse = app.add_subcommand("parse", "Parse a formula and print its AST and core form");
    parse->add_option("-e,--expr", expr, "Formula")->required();
    parse->add_option("--agents", agents, "Comma-separated agent names");

    auto* check = app.add_subcommand("check-proof", "Check the scripts of a .jtopf file");
    check->add_option("file", file, "Proof file")->required();
    check->add_option("--cs", cs, "Constant specification file");

    auto* validate_cmd = app.add_subcommand("validate-model", "Validate a .jtom model over a universe");
    validate_cmd->add_option("file", file, "Model file")->required();
    validate_cmd->add_option("--universe", universe, "Universe .jto file")->required();
    validate_cmd->add_option("--cs", cs, "Constant specification file");

    auto* mcheck = app.add_subcommand("model-check", "Evaluate a formula at a point of a model");
    mcheck->add_option("file", file, "Model file")->required();
    mcheck->add_option("-e,--expr", expr, "Formula")->required();
    mcheck->add_option("--run", run, "Run index or name");
    mcheck->add_option("--pos", pos, "Position");
    mcheck->add_option("--semantics", semantics, "fitting or neighborhood")
        ->check(CLI::IsMember({"fitting", "neighborhood"}));

    auto* search = app.add_subcommand("search", "Bounded satisfiability of a formula set");
    search->add_option("-f,--file", file, "Formula file (.jto)")->required();
    search->add_option("--at", at, "Position anchor (adds time=n)");
    search->add_option("--max-stem", max_stem, "Largest stem length");
    search->add_option("--max-loop", max_loop, "Largest loop length")->check(CLI::PositiveNumber);
    search->add_flag("--explain", explain, "Explain an UNSAT verdict");

    auto* corpus = app.add_subcommand("corpus", "Run, list or export the built-in case study");
    corpus->require_subcommand(1);
    auto* crun = corpus->add_subcommand("run", "Run one case or all cases");
    crun->add_option("name", name, "Case name");
    auto* clist = corpus->add_subcommand("list", "List cases");
    auto* cexport = corpus->add_subcommand("export", "Write corpus files to a directory");
    cexport->add_option("dir", dir, "Target directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    machine = format == "machine";

    try {
        if (*parse) return cmd_parse(expr, agents);
        if (*check) return cmd_check_proof(file, cs);
        if (*validate_cmd) return cmd_validate(file, universe, cs);
        if (*mcheck) return cmd_model_check(file, expr, run, pos, semantics);
        if (*search) return cmd_search(file, at, max_stem, max_loop, explain);
        if (*crun) return cmd_corpus_run(name);
        if (*clist) return cmd_corpus_list();
        if (*cexport) return cmd_corpus_export(dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_budget(e) ? kBudget : kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
