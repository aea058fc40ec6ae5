#include "jto/semantics.hpp"

#include <cstdio>
#include <sstream>

namespace jto {

std::string read_text_file(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw Error("IoError", "cannot open " + path);
    std::string text;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
    std::fclose(f);
    return text;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

[[noreturn]] void malformed(int line, const std::string& msg) {
    throw Error("Malformed", "line " + std::to_string(line) + ": " + msg);
}

// `w0..w16` expands to w0 w1 ... w16.
std::vector<std::string> expand_range(const std::string& tok) {
    std::size_t dots = tok.find("..");
    if (dots == std::string::npos) return {tok};
    std::string lo = tok.substr(0, dots), hi = tok.substr(dots + 2);
    auto split = [](const std::string& s) {
        std::size_t k = s.size();
        while (k > 0 && s[k - 1] >= '0' && s[k - 1] <= '9') --k;
        return std::make_pair(s.substr(0, k), s.substr(k));
    };
    auto [p1, n1] = split(lo);
    auto [p2, n2] = split(hi);
    if (n1.empty() || n2.empty() || (!p2.empty() && p2 != p1)) return {tok};
    std::vector<std::string> out;
    for (unsigned long k = std::stoul(n1); k <= std::stoul(n2); ++k) out.push_back(p1 + std::to_string(k));
    return out;
}

struct ModelReader {
    AnyModel model;
    int line_no = 0;
    bool has_relations = false, has_evidence = false, has_neighborhoods = false;

    ModelBase& base() {
        return model.kind == ModelKind::Fitting ? static_cast<ModelBase&>(model.fitting)
                                                : static_cast<ModelBase&>(model.neighborhood);
    }

    std::vector<StateId> state_list(const std::vector<std::string>& toks, std::size_t from, std::size_t to) {
        std::vector<StateId> out;
        for (std::size_t k = from; k < to; ++k)
            for (const std::string& n : expand_range(toks[k])) {
                auto s = base().find_state(n);
                if (!s) malformed(line_no, "unknown state " + n);
                out.push_back(*s);
            }
        return out;
    }

    StateSet state_pattern(const std::string& tok) {
        if (tok == "*") return ~StateSet{0};
        StateSet out = 0;
        std::istringstream is(tok);
        std::string item;
        while (std::getline(is, item, ','))
            for (StateId s : state_list({item}, 0, 1)) out |= state_bit(s);
        return out;
    }

    std::optional<Agent> agent_pattern(const std::string& tok) {
        if (tok == "*") return std::nullopt;
        try {
            return base().agents.resolve(tok);
        } catch (const Error&) {
            malformed(line_no, "unknown agent " + tok);
        }
    }

    std::vector<StateSet> family(const std::string& text) {
        std::vector<StateSet> out;
        std::size_t k = 0;
        while (true) {
            k = text.find_first_not_of(" \t", k);
            if (k == std::string::npos) break;
            if (text[k] != '{') malformed(line_no, "expected '{' in family");
            std::size_t e = text.find('}', k);
            if (e == std::string::npos) malformed(line_no, "unclosed '{' in family");
            auto toks = words(text.substr(k + 1, e - k - 1));
            StateSet x = 0;
            for (const std::string& t : toks) {
                if (t == "ALL") x |= base().all_states();
                else
                    for (StateId s : state_list({t}, 0, 1)) x |= state_bit(s);
            }
            out.push_back(x);
            k = e + 1;
        }
        return out;
    }

    void finish_header() {
        ModelBase& b = base();
        b.atoms.assign(b.states.size(), {});
        if (model.kind == ModelKind::Fitting) {
            std::size_t n = std::max<std::size_t>(b.agents.size(), 1);
            model.fitting.R.assign(n, std::vector<StateSet>(b.states.size(), 0));
            model.fitting.RO.assign(n, std::vector<StateSet>(b.states.size(), 0));
        } else {
            model.neighborhood.formulas.assign(b.states.size(), {});
        }
    }

    void relation(const std::vector<std::string>& toks) {
        // R|RO <agent|*> = identity | universal | a>b ...
        if (model.kind != ModelKind::Fitting) malformed(line_no, "relations only belong to Fitting models");
        if (toks.size() < 4 || toks[2] != "=" || (toks[0] != "R" && toks[0] != "RO"))
            malformed(line_no, "expected 'R|RO <agent> = ...'");
        auto& rel = toks[0] == "R" ? model.fitting.R : model.fitting.RO;
        auto agent = agent_pattern(toks[1]);
        std::size_t n = base().states.size();
        for (Agent i = 0; i < rel.size(); ++i) {
            if (agent && *agent != i) continue;
            for (std::size_t k = 3; k < toks.size(); ++k) {
                const std::string& t = toks[k];
                if (t == "identity") {
                    for (StateId s = 0; s < n; ++s) rel[i][s] |= state_bit(s);
                } else if (t == "universal") {
                    for (StateId s = 0; s < n; ++s) rel[i][s] = base().all_states();
                } else {
                    std::size_t gt = t.find('>');
                    if (gt == std::string::npos) malformed(line_no, "expected a pair a>b, got " + t);
                    StateSet from = state_pattern(t.substr(0, gt)), to = state_pattern(t.substr(gt + 1));
                    for (StateId s = 0; s < n; ++s)
                        if (has_state(from, s)) rel[i][s] |= to & base().all_states();
                }
            }
        }
    }

    void evidence(const std::string& line) {
        // E|EO <agent|*> <states|*> <term pattern> yes|no : <formula pattern>
        if (model.kind != ModelKind::Fitting) malformed(line_no, "evidence only belongs to Fitting models");
        std::size_t colon = line.find(" : ");
        if (colon == std::string::npos) malformed(line_no, "expected ' : ' before the formula pattern");
        auto toks = words(line.substr(0, colon));
        if (toks.size() != 5 || (toks[0] != "E" && toks[0] != "EO") || (toks[4] != "yes" && toks[4] != "no"))
            malformed(line_no, "expected 'E|EO <agent> <states> <term> yes|no : <formula>'");
        EvidenceRule r;
        r.agent = agent_pattern(toks[1]);
        r.states = state_pattern(toks[2]);
        r.term = TermPattern::parse(toks[3]);
        r.member = toks[4] == "yes";
        r.formula = FormulaPattern::parse(trim(line.substr(colon + 3)), &base().agents);
        (toks[0] == "E" ? model.fitting.evidence : model.fitting.nevidence).rules.push_back(r);
    }

    void neighborhood(const std::string& line) {
        // N|NO <agent|*> <states|*> <term pattern> = {..} {..}
        if (model.kind != ModelKind::Neighborhood) malformed(line_no, "neighborhoods only belong to neighborhood models");
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) malformed(line_no, "expected '='");
        auto toks = words(line.substr(0, eq));
        if (toks.size() != 4 || (toks[0] != "N" && toks[0] != "NO"))
            malformed(line_no, "expected 'N|NO <agent> <states> <term> = families'");
        NeighborhoodRule r;
        r.agent = agent_pattern(toks[1]);
        r.states = state_pattern(toks[2]);
        r.term = TermPattern::parse(toks[3]);
        r.family = family(line.substr(eq + 1));
        (toks[0] == "N" ? model.neighborhood.N : model.neighborhood.NO).rules.push_back(r);
    }

    void valuation(const std::string& line) {
        std::size_t formula_eq = line.find(":=");
        if (formula_eq != std::string::npos) {
            if (model.kind != ModelKind::Neighborhood) malformed(line_no, "formula valuations need a neighborhood model");
            auto toks = words(line.substr(0, formula_eq));
            std::string rest = line.substr(formula_eq + 2);
            std::vector<FormulaPattern> pats;
            std::istringstream is(rest);
            std::string item;
            while (std::getline(is, item, ';')) {
                item = trim(item);
                if (item.empty()) continue;
                try {
                    pats.push_back(FormulaPattern::parse(item, &base().agents));
                } catch (const SyntaxError& e) {
                    malformed(line_no, std::string("formula: ") + e.what());
                }
            }
            for (StateId s : state_list(toks, 0, toks.size()))
                for (const auto& p : pats) model.neighborhood.formulas[s].push_back(p);
            return;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) malformed(line_no, "expected 'states = atoms' or 'state := formulas'");
        auto lhs = words(line.substr(0, eq));
        auto atoms = words(line.substr(eq + 1));
        for (StateId s : state_list(lhs, 0, lhs.size()))
            for (const std::string& a : atoms) base().atoms[s].insert(a);
    }

    void run(const std::string& line) {
        // name = stem a b c loop d e
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) malformed(line_no, "expected 'name = stem ... loop ...'");
        LassoRun r;
        r.name = trim(line.substr(0, eq));
        auto toks = words(line.substr(eq + 1));
        std::size_t loop = toks.size();
        for (std::size_t k = 0; k < toks.size(); ++k)
            if (toks[k] == "loop") loop = k;
        if (loop == toks.size()) malformed(line_no, "run has no loop");
        std::size_t from = !toks.empty() && toks[0] == "stem" ? 1 : 0;
        r.stem = state_list(toks, from, loop);
        r.loop = state_list(toks, loop + 1, toks.size());
        if (r.loop.empty()) malformed(line_no, "run loop is empty");
        base().runs.push_back(r);
    }

    AnyModel read(const std::string& text) {
        std::istringstream is(text);
        std::string raw, section;
        bool header = false, kind_seen = false, started = false;
        while (std::getline(is, raw)) {
            ++line_no;
            std::string line = trim(raw);
            if (line.empty() || line[0] == '#') continue;
            bool indented = raw[0] == ' ' || raw[0] == '\t';
            if (!header) {
                if (line != "jtom 1") malformed(line_no, "expected header 'jtom 1'");
                header = true;
                continue;
            }
            if (!indented) {
                auto toks = words(line);
                if (toks[0] == "model") {
                    if (toks.size() != 3) malformed(line_no, "expected 'model <name> fitting|neighborhood'");
                    if (toks[2] == "fitting") model.kind = ModelKind::Fitting;
                    else if (toks[2] == "neighborhood") model.kind = ModelKind::Neighborhood;
                    else malformed(line_no, "unknown model kind " + toks[2]);
                    base().name = toks[1];
                    kind_seen = true;
                    continue;
                }
                if (!kind_seen) malformed(line_no, "expected 'model' line first");
                static const std::set<std::string> known = {"states", "agents", "runs", "relations", "evidence",
                                                            "nevidence", "neighborhoods", "valuation"};
                if (toks.size() != 1 || !known.count(toks[0])) malformed(line_no, "unknown section " + line);
                section = toks[0];
                if (section != "states" && section != "agents" && !started) {
                    finish_header();
                    started = true;
                }
                if ((section == "states" || section == "agents") && started)
                    malformed(line_no, section + " must come before the other sections");
                continue;
            }
            if (section.empty()) malformed(line_no, "entry outside a section");
            if (section == "states") {
                for (const std::string& t : words(line))
                    for (const std::string& n : expand_range(t)) {
                        if (base().find_state(n)) malformed(line_no, "duplicate state " + n);
                        base().states.push_back(n);
                    }
            } else if (section == "agents") {
                for (const std::string& t : words(line)) base().agents.resolve_or_declare(t);
            } else if (section == "runs") {
                run(line);
            } else if (section == "relations") {
                relation(words(line));
            } else if (section == "evidence" || section == "nevidence") {
                evidence(line);
            } else if (section == "neighborhoods") {
                neighborhood(line);
            } else if (section == "valuation") {
                valuation(line);
            }
        }
        if (!header) malformed(line_no, "empty model file");
        if (!started) finish_header();
        if (base().states.empty()) malformed(line_no, "model declares no states");
        if (base().states.size() > kMaxStates) malformed(line_no, "more than 64 states");
        if (base().runs.empty()) malformed(line_no, "model declares no runs");
        return model;
    }
};

std::string agent_text(const std::optional<Agent>& a, const AgentTable& agents) {
    return a ? agents.name(*a) : "*";
}

std::string states_text(const ModelBase& m, StateSet x) {
    if ((x & m.all_states()) == m.all_states()) return "*";
    std::string out;
    for (StateId s = 0; s < m.states.size(); ++s)
        if (has_state(x, s)) out += (out.empty() ? "" : ",") + m.states[s];
    return out;
}

std::string family_text(const ModelBase& m, const std::vector<StateSet>& fam) {
    std::string out;
    for (StateSet x : fam) {
        if (x == m.all_states()) {
            out += " {ALL}";
            continue;
        }
        std::string inner = state_set_text(m, x);
        out += " " + inner;
    }
    return out;
}

}  // namespace

AnyModel read_model(const std::string& text) {
    ModelReader r;
    return r.read(text);
}

AnyModel read_model_path(const std::string& path) { return read_model(read_text_file(path)); }

std::string write_model(const AnyModel& am) {
    const ModelBase& m = am.base();
    std::ostringstream os;
    os << "jtom 1\n";
    os << "model " << m.name << (am.kind == ModelKind::Fitting ? " fitting" : " neighborhood") << "\n";
    os << "states\n ";
    for (const std::string& s : m.states) os << " " << s;
    os << "\nagents\n ";
    for (const std::string& a : m.agents.names()) os << " " << a;
    os << "\nruns\n";
    for (const LassoRun& r : m.runs) {
        os << "  " << r.name << " =";
        if (!r.stem.empty()) {
            os << " stem";
            for (StateId s : r.stem) os << " " << m.states[s];
        }
        os << " loop";
        for (StateId s : r.loop) os << " " << m.states[s];
        os << "\n";
    }
    if (am.kind == ModelKind::Fitting) {
        const FittingModel& f = am.fitting;
        os << "relations\n";
        for (int deontic = 0; deontic < 2; ++deontic) {
            const auto& rel = deontic ? f.RO : f.R;
            for (Agent i = 0; i < rel.size(); ++i) {
                os << "  " << (deontic ? "RO " : "R ") << m.agents.name(i) << " =";
                for (StateId a = 0; a < m.states.size(); ++a)
                    for (StateId b = 0; b < m.states.size(); ++b)
                        if (has_state(rel[i][a], b)) os << " " << m.states[a] << ">" << m.states[b];
                os << "\n";
            }
        }
        for (int deontic = 0; deontic < 2; ++deontic) {
            os << (deontic ? "nevidence\n" : "evidence\n");
            for (const EvidenceRule& r : (deontic ? f.nevidence : f.evidence).rules)
                os << "  " << (deontic ? "EO " : "E ") << agent_text(r.agent, m.agents) << " "
                   << states_text(m, r.states) << " " << r.term.text() << " " << (r.member ? "yes" : "no") << " : "
                   << r.formula.text(&m.agents) << "\n";
        }
    } else {
        const NeighborhoodModel& n = am.neighborhood;
        os << "neighborhoods\n";
        for (int deontic = 0; deontic < 2; ++deontic)
            for (const NeighborhoodRule& r : (deontic ? n.NO : n.N).rules)
                os << "  " << (deontic ? "NO " : "N ") << agent_text(r.agent, m.agents) << " "
                   << states_text(m, r.states) << " " << r.term.text() << " =" << family_text(m, r.family) << "\n";
    }
    os << "valuation\n";
    StateSet image = m.image();
    for (StateId s = 0; s < m.states.size(); ++s) {
        if (am.kind == ModelKind::Neighborhood && !has_state(image, s)) {
            const auto& pats = am.neighborhood.formulas[s];
            os << "  " << m.states[s] << " :=";
            for (std::size_t k = 0; k < pats.size(); ++k)
                os << (k ? " ; " : " ") << pats[k].text(&m.agents);
            os << "\n";
            continue;
        }
        os << "  " << m.states[s] << " =";
        for (const std::string& a : m.atoms[s]) os << " " << a;
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Formula files

std::vector<Formula> FormulaFile::list() const {
    std::vector<Formula> out;
    for (const auto& [name, f] : formulas) out.push_back(f);
    return out;
}

FormulaFile read_formula_file(const std::string& text, const AgentTable* agents) {
    FormulaFile out;
    if (agents) out.agents = *agents;
    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    bool header = false;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "jto 1") malformed(line_no, "expected header 'jto 1'");
            header = true;
            continue;
        }
        auto toks = words(line);
        if (toks[0] == "agents") {
            for (std::size_t k = 1; k < toks.size(); ++k) out.agents.resolve_or_declare(toks[k]);
            continue;
        }
        if (toks[0] == "terms") {
            for (std::size_t k = 1; k < toks.size(); ++k) out.terms.push_back(parse_term(toks[k]));
            continue;
        }
        if (toks[0] == "at") {
            if (toks.size() != 2) malformed(line_no, "expected 'at <n>'");
            out.at = std::uint32_t(std::stoul(toks[1]));
            continue;
        }
        std::string name, body = line;
        std::size_t colon = line.find(':');
        if (colon != std::string::npos) {
            std::string head = trim(line.substr(0, colon));
            bool ident = !head.empty() && head.find(' ') == std::string::npos;
            if (ident) {
                name = head;
                body = line.substr(colon + 1);
            }
        }
        if (name.empty()) name = "f" + std::to_string(out.formulas.size() + 1);
        Formula f = parse_formula(body, &out.agents);
        out.formulas.emplace_back(name, f);
    }
    if (!header) malformed(line_no, "empty formula file");
    return out;
}

FormulaFile read_formula_path(const std::string& path, const AgentTable* agents) {
    return read_formula_file(read_text_file(path), agents);
}

std::string write_formula_file(const FormulaFile& f) {
    std::ostringstream os;
    os << "jto 1\n";
    if (!f.agents.empty()) {
        os << "agents";
        for (const std::string& a : f.agents.names()) os << " " << a;
        os << "\n";
    }
    if (!f.terms.empty()) {
        os << "terms";
        for (Term t : f.terms) os << " " << pretty(t);
        os << "\n";
    }
    if (f.at) os << "at " << *f.at << "\n";
    for (const auto& [name, g] : f.formulas) os << name << ": " << pretty(g, &f.agents) << "\n";
    return os.str();
}

}  // namespace jto
