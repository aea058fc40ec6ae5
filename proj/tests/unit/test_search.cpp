#include "doctest.h"
#include "generators.hpp"
#include "jto/corpus_proofs.hpp"
#include "jto/search.hpp"

using namespace jto;
using namespace jto::testing;

namespace {

Formula F(const std::string& text) { return corpus_formula(text); }

std::vector<Formula> gamma_projected() { return {assumption("contract0"), assumption("court0"), time_literal(10)}; }

}  // namespace

TEST_CASE("abstraction shares one atom per assertion") {
    Abstraction a = abstract({F("O[a]_e pay"), F("~O[a]_e pay")});
    REQUIRE(a.atom_map.size() == 1);
    CHECK(a.abstracted[0] == a.atom_map[0].second);
    CHECK(a.side_constraints.empty());
}

TEST_CASE("projected obligations map to one atom per agent and body") {
    Abstraction a = abstract({assumption("contract0"), assumption("court0")});
    REQUIRE(a.atom_map.size() == 1);
    CHECK(a.atom_map[0].first == desugar(F("O_e pay")));
}

TEST_CASE("side constraints come from occurring assertions") {
    Abstraction a = abstract({F("O[a]_e pay /\\ O[a]_e ~pay"), F("[x]_e q"), F("O[#a]_e (O[a]_e pay -> pay)")});
    auto count = [&](const std::string& kind) {
        return std::count(a.constraint_kinds.begin(), a.constraint_kinds.end(), kind);
    };
    CHECK(count("no-conflicts") == 1);
    CHECK(count("factivity") == 1);
    CHECK(count("obligated-factivity") == 1);
    Abstraction b = abstract({F("[x]_e (p -> q)"), F("[y]_e p"), F("[x*y]_e q"), F("[x+y]_e p"), F("[!y]_e [y]_e p")});
    CHECK(std::count(b.constraint_kinds.begin(), b.constraint_kinds.end(), "application") == 1);
    CHECK(std::count(b.constraint_kinds.begin(), b.constraint_kinds.end(), "sum") == 1);
    CHECK(std::count(b.constraint_kinds.begin(), b.constraint_kinds.end(), "positive-introspection") == 1);
}

TEST_CASE("abstraction round trips through concretize") {
    Rng rng(5);
    FormulaShape shape;
    shape.agents = 3;
    for (int k = 0; k < 100; ++k) {
        std::vector<Formula> fs{random_formula(rng, shape), random_formula(rng, shape)};
        Abstraction a = abstract(fs);
        for (std::size_t j = 0; j < fs.size(); ++j) CHECK(a.concretize(a.abstracted[j]) == desugar(fs[j]));
    }
}

TEST_CASE("propositional clash is UNSAT") {
    for (std::uint32_t stem : {0u, 3u})
        for (std::uint32_t loop : {1u, 2u})
            CHECK_FALSE(bounded_sat({F("p"), F("~p")}, std::nullopt, SearchBounds{stem, loop}).sat);
    UnsatReport r = explain_unsat({F("p /\\ ~p")}, std::nullopt, SearchBounds{2, 1});
    CHECK(r.position == 0);
    CHECK(r.atom == "p");
}

TEST_CASE("eventually q has a witness with q in the loop") {
    Verdict v = bounded_sat({F("F q")}, std::nullopt, SearchBounds{2, 2});
    REQUIRE(v.sat);
    CHECK(v.text().rfind("SAT stem=[] loop=[{q}]", 0) == 0);
}

TEST_CASE("justification-free witnesses lift to models") {
    Rng rng(9);
    FormulaShape shape;
    shape.modal = false;
    shape.depth = 3;
    shape.atoms = {"p", "q"};
    int lifted = 0;
    for (int k = 0; k < 60; ++k) {
        Formula f = random_formula(rng, shape);
        Verdict v = bounded_sat({f}, std::nullopt, SearchBounds{3, 2});
        if (!v.sat) continue;
        std::string text = "jtom 1\nmodel w fitting\nstates\n";
        std::size_t n = v.stem.size() + v.loop.size();
        for (std::size_t s = 0; s < n; ++s) text += "  s" + std::to_string(s) + "\n";
        text += "agents\n  i\nruns\n  r =";
        if (!v.stem.empty()) {
            text += " stem";
            for (std::size_t s = 0; s < v.stem.size(); ++s) text += " s" + std::to_string(s);
        }
        text += " loop";
        for (std::size_t s = v.stem.size(); s < n; ++s) text += " s" + std::to_string(s);
        text += "\nrelations\n  R * = identity\n  RO * = identity\nvaluation\n";
        for (std::size_t s = 0; s < n; ++s) {
            const auto& atoms = s < v.stem.size() ? v.stem[s] : v.loop[s - v.stem.size()];
            text += "  s" + std::to_string(s) + " =";
            for (const std::string& a : atoms) text += " " + a;
            text += "\n";
        }
        AnyModel m = read_model(text);
        CHECK(mc_fitting(m.fitting, 0, v.position, f));
        ++lifted;
    }
    CHECK(lifted > 10);
}

TEST_CASE("the projected assumptions clash at time 10") {
    Verdict v = bounded_sat(gamma_projected(), std::nullopt, SearchBounds{12, 2}, &corpus_agents());
    CHECK_FALSE(v.sat);
    CHECK(v.text() == "UNSAT max_stem=12 max_loop=2");
    UnsatReport r = explain_unsat(gamma_projected(), std::nullopt, SearchBounds{12, 2}, &corpus_agents());
    CHECK(r.position == 10);
    CHECK(r.atom == "O_e pay");
    CHECK_FALSE(bounded_sat(gamma_projected(), 10, SearchBounds{12, 2}, &corpus_agents()).sat);
}

TEST_CASE("the justified assumptions are satisfiable at time 10") {
    std::vector<Formula> g{assumption("contract"), assumption("court"), time_literal(10)};
    Verdict v = bounded_sat(g, std::nullopt, SearchBounds{12, 2}, &corpus_agents());
    REQUIRE(v.sat);
    CHECK(v.position == 10);
    CHECK_THROWS_AS(explain_unsat(g, std::nullopt, SearchBounds{12, 2}), NotUnsat);
}

TEST_CASE("time anchors need a long enough stem") {
    CHECK_FALSE(bounded_sat({F("time=5")}, std::nullopt, SearchBounds{4, 2}).sat);
    CHECK(bounded_sat({F("time=5")}, std::nullopt, SearchBounds{6, 1}).sat);
    CHECK(bounded_sat({F("p")}, 3, SearchBounds{4, 1}).sat);
}

TEST_CASE("search is deterministic") {
    std::vector<Formula> fs{F("G F p"), F("F ~p"), F("q U p")};
    Verdict a = bounded_sat(fs, std::nullopt, SearchBounds{3, 2});
    Verdict b = bounded_sat(fs, std::nullopt, SearchBounds{3, 2});
    CHECK(a.text() == b.text());
}

TEST_CASE("eventualities must be fulfilled in the loop") {
    CHECK_FALSE(bounded_sat({F("G ~q"), F("F q")}, std::nullopt, SearchBounds{4, 2}).sat);
    CHECK_FALSE(bounded_sat({F("G F q"), F("F G ~q")}, std::nullopt, SearchBounds{4, 2}).sat);
    CHECK(bounded_sat({F("G F q"), F("G F ~q")}, std::nullopt, SearchBounds{0, 2}).sat);
}

TEST_CASE("budget errors") {
    SearchBounds tiny{12, 2, 100};
    CHECK_THROWS_AS(bounded_sat(gamma_projected(), std::nullopt, tiny), BoundsTooLarge);
    CHECK_THROWS_AS(bounded_sat({F("p")}, std::nullopt, SearchBounds{1, 0}), BoundsTooLarge);
}
