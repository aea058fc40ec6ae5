#include "doctest.h"
#include "generators.hpp"
#include "jto/semantics.hpp"

using namespace jto;
using namespace jto::testing;

namespace {

const char* kTimeline = R"(jtom 1
model timeline neighborhood
states
  w0..w4
agents
  i
runs
  r = stem w0 w1 w2 loop w3 w4
neighborhoods
valuation
  w3 = p
)";

Formula F(const std::string& text, const ModelBase& m) {
    AgentTable a = m.agents;
    return parse_formula(text, &a);
}

bool at(const AnyModel& m, std::uint64_t n, const std::string& text) { return mc(m, 0, n, F(text, m.base())); }

StateSet states(const ModelBase& m, std::initializer_list<const char*> names) {
    StateSet x = 0;
    for (const char* n : names) x |= state_bit(m.state(n));
    return x;
}

}  // namespace

TEST_CASE("lasso positions wrap into the loop") {
    AnyModel m = read_model(kTimeline);
    const LassoRun& r = m.base().runs[0];
    CHECK(r.state_at(0) == m.base().state("w0"));
    CHECK(r.state_at(3) == m.base().state("w3"));
    CHECK(r.state_at(4) == m.base().state("w4"));
    CHECK(r.state_at(5) == m.base().state("w3"));
    CHECK(r.state_at(8) == m.base().state("w4"));
}

TEST_CASE("temporal clauses on a single run") {
    AnyModel m = read_model(kTimeline);
    CHECK(at(m, 0, "F p"));
    CHECK_FALSE(at(m, 3, "H p"));
    CHECK(at(m, 3, "P- p"));
    CHECK_FALSE(at(m, 2, "P- p"));
    CHECK(at(m, 0, "Yw bot"));
    CHECK_FALSE(at(m, 0, "Ys top"));
    CHECK(at(m, 2, "time=2"));
    CHECK_FALSE(at(m, 3, "time=2"));
    CHECK(at(m, 0, "G F p"));
    CHECK_FALSE(at(m, 0, "F G p"));
    CHECK(at(m, 4, "X p"));
    CHECK(at(m, 0, "~p U p"));
    CHECK(at(m, 4, "Ys p"));
    CHECK(at(m, 5, "p S p"));
    CHECK_FALSE(at(m, 6, "p S p"));
    CHECK(at(m, 0, "~p W p"));
}

TEST_CASE("positions past the horizon are refused") {
    AnyModel m = read_model(kTimeline);
    Formula f = F("X X p", m.base());
    CHECK_NOTHROW(mc(m, 0, 3 + 2 * 4, f));
    CHECK_THROWS_AS(mc(m, 0, 3 + 2 * 4 + 1, f), HorizonExceeded);
}

TEST_CASE("lasso periodicity on sampled formulas") {
    AnyModel m = read_model(kTimeline);
    Rng rng(7);
    FormulaShape shape;
    shape.modal = false;
    shape.agents = 1;
    shape.depth = 3;
    shape.atoms = {"p"};
    for (int k = 0; k < 200; ++k) {
        Formula f = desugar(random_formula(rng, shape));
        int d = temporal_depth(f);
        const LassoRun& r = m.base().runs[0];
        for (std::uint64_t j = r.q() * std::uint64_t(d); r.p() + j + r.q() <= r.horizon_cap(d); ++j)
            CHECK(mc(m, 0, r.p() + j, f) == mc(m, 0, r.p() + j + r.q(), f));
    }
}

TEST_CASE("truth sets in the JRE countermodel") {
    CaseModel cm = corpus_model("jre");
    const NeighborhoodModel& m = cm.model.neighborhood;
    CHECK(truth_set(m, F("p", m)) == states(m, {"w"}));
    CHECK(truth_set(m, F("p /\\ p", m)) == states(m, {"w", "v"}));
    CHECK(truth_set(m, bot()) == 0);
    CHECK(mc(cm.model, 0, 0, F("[x]_i p", m)));
    CHECK_FALSE(mc(cm.model, 0, 0, F("[x]_i (p /\\ p)", m)));
}

TEST_CASE("time=10 picks out w10 in I1") {
    CaseModel cm = corpus_model("i1");
    CHECK(truth_set(cm.model.neighborhood, time_literal(10)) == states(cm.model.base(), {"w10"}));
}

TEST_CASE("lemma checks on the corpus models") {
    CaseModel i1 = corpus_model("i1"), i3 = corpus_model("i3"), i4 = corpus_model("i4");
    CaseModel i3f = corpus_model("i3-fitting"), i2 = corpus_model("i2");
    CHECK(at(i1.model, 10, "A(winfirst_e <-> O[a]_e pay) /\\ time=10"));
    CHECK(at(i3.model, 10, "time=10 /\\ ~win_p"));
    CHECK(at(i3f.model, 10, "time=10 /\\ ~win_p /\\ G ~O[verdict_e]_e pay"));
    CHECK(at(i4.model, 10, "A(time=10 -> ~pay)"));
    CHECK_FALSE(at(i2.model, 0, "F winfirst_e"));
}

TEST_CASE("truth sets raise on position-dependent formulas") {
    AnyModel m = read_model(R"(jtom 1
model loop neighborhood
states
  w
agents
  i
runs
  r = stem w loop w
valuation
)");
    CHECK_THROWS_AS(truth_set(m.neighborhood, time_literal(0)), PositionDependence);
    CHECK(truth_set(m.neighborhood, atom("p")) == 0);
}

TEST_CASE("every corpus model validates over its universe") {
    for (const char* stem : {"i1", "i2", "i3", "i3-fitting", "i4", "jre", "consistency", "strong-no-conflicts"}) {
        CAPTURE(stem);
        CaseModel cm = corpus_model(stem);
        ValidationReport r = validate(cm.model, make_universe(cm.universe.list(), cm.universe.terms));
        CHECK(r.violations.empty());
        if (!r.ok()) MESSAGE(r.violations.front());
    }
}

TEST_CASE("Fitting frame violations") {
    AnyModel m = read_model(R"(jtom 1
model frames fitting
states
  a b
agents
  i
runs
  r = loop a b
relations
  R i = a>b
  RO i = a>b
valuation
)");
    ValidationReport r = validate(m, make_universe({atom("p")}));
    auto has = [&](const std::string& kind) {
        for (const std::string& v : r.violations)
            if (v.rfind(kind + ":", 0) == 0) return true;
        return false;
    };
    CHECK(has("reflexivity"));
    CHECK(has("shift-reflexivity"));
    CHECK_FALSE(has("transitivity"));
}

TEST_CASE("Fitting evidence violations") {
    AnyModel m = read_model(R"(jtom 1
model evidence fitting
states
  w
agents
  i
runs
  r = loop w
relations
  R * = identity
  RO * = identity
evidence
  E * * @any yes : @any
nevidence
  EO * * x yes : p
  EO * * x yes : ~p
  EO * * @any no : @any
valuation
  w = p
)");
    Formula p = atom("p");
    ValidationReport r = validate(m, make_universe({obox(0, t_var("x"), p), obox(0, t_var("x"), neg(p))}));
    auto has = [&](const std::string& kind) {
        for (const std::string& v : r.violations)
            if (v.rfind(kind + ":", 0) == 0) return true;
        return false;
    };
    CHECK(has("consistency"));
    CHECK(has("obligated-factivity"));
    CHECK_FALSE(has("application"));
}

TEST_CASE("neighborhood violations") {
    AnyModel m = read_model(R"(jtom 1
model bad neighborhood
states
  w v
agents
  i
runs
  r = loop w
neighborhoods
  N * * @any = {v}
  NO * * x = {w} {v}
  NO * * @any = {w v}
valuation
  w = p
  v := ~p
)");
    Formula p = atom("p");
    ValidationReport r = validate(m, make_universe({jbox(0, t_var("x"), p), obox(0, t_var("x"), p)}));
    auto has = [&](const std::string& kind) {
        for (const std::string& v : r.violations)
            if (v.rfind(kind + ":", 0) == 0) return true;
        return false;
    };
    CHECK(has("noc-NO"));
    CHECK_FALSE(has("reflexivity-N"));

    AnyModel m2 = read_model(R"(jtom 1
model bad2 neighborhood
states
  w v
agents
  i
runs
  r = loop w
neighborhoods
  N * * @any = {v}
valuation
  w = p
  v := ~p
)");
    ValidationReport r2 = validate(m2, make_universe({jbox(0, t_var("x"), neg(p))}));
    bool refl = false;
    for (const std::string& v : r2.violations) refl = refl || v.rfind("reflexivity-N:", 0) == 0;
    CHECK(refl);
}

TEST_CASE("model files round trip") {
    for (const char* stem : {"i1", "i2", "i3", "i3-fitting", "i4", "jre", "consistency", "strong-no-conflicts"}) {
        CAPTURE(stem);
        CaseModel cm = corpus_model(stem);
        std::string once = write_model(cm.model);
        AnyModel again = read_model(once);
        CHECK(write_model(again) == once);
        for (Formula f : cm.universe.list())
            for (std::uint64_t n : {0, 1, 10})
                if (n <= again.base().runs[0].horizon(temporal_depth(desugar(f))))
                    CHECK(mc(again, 0, n, f) == mc(cm.model, 0, n, f));
    }
}

TEST_CASE("formula files round trip") {
    CaseModel cm = corpus_model("i3");
    std::string text = write_formula_file(cm.universe);
    FormulaFile again = read_formula_file(text);
    REQUIRE(again.formulas.size() == cm.universe.formulas.size());
    for (std::size_t k = 0; k < again.formulas.size(); ++k) {
        CHECK(again.formulas[k].first == cm.universe.formulas[k].first);
        CHECK(desugar(again.formulas[k].second) == desugar(cm.universe.formulas[k].second));
    }
}

TEST_CASE("factivity holds in random validated Fitting models") {
    Rng rng(11);
    FormulaShape shape;
    shape.temporal = false;
    shape.depth = 3;
    shape.atoms = {"p", "q"};
    int checked = 0;
    for (int k = 0; k < 50; ++k) {
        FittingModel m = random_fitting_model(rng, 4, 2, 2);
        std::vector<Formula> bodies;
        for (int j = 0; j < 6; ++j) bodies.push_back(random_formula(rng, shape));
        std::vector<Formula> boxes;
        for (Formula b : bodies) boxes.push_back(jbox(Agent(k % 2), random_plain_term(rng, 2), b));
        REQUIRE(validate_fitting(m, make_universe(boxes)).ok());
        for (std::size_t j = 0; j < boxes.size(); ++j)
            for (const Point& pt : points(m, 0))
                if (mc_fitting(m, pt.run, pt.n, boxes[j])) {
                    CHECK(mc_fitting(m, pt.run, pt.n, bodies[j]));
                    ++checked;
                }
    }
    CHECK(checked > 0);
}

TEST_CASE("transform of the Fitting demo agrees pointwise") {
    CaseModel cm = corpus_model("i3-fitting");
    Universe u = make_universe(cm.universe.list(), cm.universe.terms);
    NeighborhoodModel n = fitting_to_neighborhood(cm.model.fitting, u.formulas);
    int depth = 0;
    for (Formula f : u.formulas) depth = std::max(depth, temporal_depth(f));
    for (Formula f : u.formulas)
        for (const Point& pt : points(cm.model.base(), temporal_depth(f)))
            CHECK(mc_fitting(cm.model.fitting, pt.run, pt.n, f) == mc_neighborhood(n, pt.run, pt.n, f));
}

TEST_CASE("transform with empty evidence gives empty families") {
    AnyModel m = read_model(R"(jtom 1
model empty fitting
states
  w
agents
  i
runs
  r = loop w
relations
  R * = identity
  RO * = identity
valuation
  w = p
)");
    Formula box = jbox(0, t_var("x"), atom("p"));
    NeighborhoodModel n = fitting_to_neighborhood(m.fitting, make_universe({box}).formulas);
    CHECK(n.N.family(0, 0, t_var("x")).empty());
    CHECK_FALSE(mc_neighborhood(n, 0, 0, box));
}

TEST_CASE("transform needs bodies in the universe") {
    CaseModel cm = corpus_model("i3-fitting");
    FormulaSet u{desugar(jbox(0, t_var("a"), atom("pay")))};
    CHECK_THROWS_AS(fitting_to_neighborhood(cm.model.fitting, u), UniverseTooSmall);
}

TEST_CASE("the image-only transform conflates equivalent bodies") {
    AnyModel m = read_model(R"(jtom 1
model conflate fitting
states
  w
agents
  i
runs
  r = loop w
relations
  R * = identity
  RO * = identity
evidence
  E * * @any yes : p
valuation
  w = p
)");
    Formula p = atom("p"), pp = conj(p, p);
    Formula good = jbox(0, t_var("x"), p), bad = jbox(0, t_var("x"), pp);
    FormulaSet u = make_universe({good, bad}).formulas;
    CHECK(mc_fitting(m.fitting, 0, 0, good));
    CHECK_FALSE(mc_fitting(m.fitting, 0, 0, bad));
    NeighborhoodModel image = fitting_to_neighborhood(m.fitting, u, TransformMode::ImageOnly);
    CHECK(mc_neighborhood(image, 0, 0, bad));
    NeighborhoodModel witnessed = fitting_to_neighborhood(m.fitting, u);
    CHECK_FALSE(mc_neighborhood(witnessed, 0, 0, bad));
    CHECK(mc_neighborhood(witnessed, 0, 0, good));
}

TEST_CASE("model files report malformed input") {
    CHECK_THROWS_AS(read_model("jtom 2\n"), Error);
    CHECK_THROWS_AS(read_model("jtom 1\nmodel x neighborhood\nstates\n  w\nruns\n  r = stem w\n"), Error);
    CHECK_THROWS_AS(read_model("jtom 1\nmodel x neighborhood\nstates\n  w\nruns\n  r = loop u\n"), Error);
}
