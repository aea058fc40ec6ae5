#include "doctest.h"
#include "jto/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace jto;

TEST_CASE("the corpus has the six cases") {
    std::vector<std::string> names;
    for (const CorpusCase& c : load_corpus()) names.push_back(c.name);
    CHECK(names == std::vector<std::string>{"arguments-v1", "sdl-projection", "refined-v2", "permission-to-sue", "judge",
                                            "non-validity"});
}

TEST_CASE("every expectation passes") {
    for (const CorpusCase& c : load_corpus()) {
        CAPTURE(c.name);
        CaseReport r = run_case(c);
        for (const CheckResult& res : r.results) {
            CAPTURE(res.target);
            CAPTURE(res.detail);
            CHECK(res.pass);
        }
    }
}

TEST_CASE("arguments-v1 reports six of six") {
    CaseReport r = run_case("arguments-v1");
    CHECK(r.results.size() == 6);
    CHECK(r.text().find("6/6 expectations pass") != std::string::npos);
}

TEST_CASE("unknown cases are reported") { CHECK_THROWS_AS(run_case("nosuchcase"), UnknownCase); }

TEST_CASE("I1 has win-first only at w10") {
    const CaseModel& m = find_case("arguments-v1").model("I1");
    const ModelBase& b = m.model.base();
    for (StateId s = 0; s < b.states.size(); ++s)
        CHECK((b.atoms[s].count("winfirst_e") == 1) == (b.states[s] == "w10"));
}

TEST_CASE("I2 is a one-state constant run with empty valuation") {
    const CaseModel& m = find_case("refined-v2").model("I2");
    const ModelBase& b = m.model.base();
    CHECK(b.states.size() == 1);
    CHECK(b.runs.size() == 1);
    CHECK(b.atoms[0].empty());
}

TEST_CASE("every expectation names a single engine") {
    for (const CorpusCase& c : load_corpus())
        for (const Expectation& e : c.expectations) {
            CAPTURE(e.target);
            CHECK(!e.expected.empty());
            CHECK(e.target.find('\t') == std::string::npos);
        }
}

TEST_CASE("machine output is stable") {
    std::ostringstream all;
    for (const CorpusCase& c : load_corpus()) all << run_case(c).machine();
    std::ifstream golden(JTO_GOLDEN_DIR "/corpus_machine.txt");
    REQUIRE(golden);
    std::stringstream want;
    want << golden.rdbuf();
    CHECK(all.str() == want.str());
}

TEST_CASE("export writes readable files") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "jto-corpus-export-test";
    fs::remove_all(dir);
    std::vector<std::string> files = export_corpus(dir.string());
    CHECK(files.size() == corpus_assets().size() + corpus_scripts().size() + load_corpus().size());
    for (const std::string& f : files) {
        CAPTURE(f);
        std::string path = (dir / f).string();
        if (f.ends_with(".jtom")) CHECK_NOTHROW(read_model_path(path));
        if (f.ends_with(".jtopf")) {
            ProofFile pf = read_proof_path(path);
            Registry reg;
            for (const ProofScript& s : pf.scripts) CHECK(check_proof(s, ConstantSpecification{}, reg).accepted);
        }
    }
    fs::remove_all(dir);
}
