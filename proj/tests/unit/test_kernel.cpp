#include "doctest.h"
#include "jto/kernel.hpp"

using namespace jto;

namespace {

bool accepts(const ProofBundle& b) {
    CheckReport r = check_bundle(b, ConstantSpecification{});
    if (!r.accepted) MESSAGE(r.summary());
    return r.accepted;
}

}  // namespace

TEST_CASE("temporal lemma items are derivable") {
    Formula p = atom("p"), q = atom("q");
    for (int item = 1; item <= 7; ++item) {
        CAPTURE(item);
        CHECK(accepts(derive_lemma2(item, p, q)));
    }
}

TEST_CASE("truth predicate items are derivable") {
    Formula p = atom("p");
    for (std::uint32_t m : {0u, 1u, 3u}) {
        for (int item = 1; item <= 8; ++item) {
            CAPTURE(item);
            CAPTURE(m);
            CHECK(accepts(check_ttp_lemma(item, m, p)));
        }
    }
}

TEST_CASE("necessitation under hypotheses is a leak") {
    ScriptBuilder b("leak");
    int h = b.hyp(atom("p"));
    b.nec(Op::Alw, h);
    CheckReport r = check_bundle(b.finish(), ConstantSpecification{});
    REQUIRE_FALSE(r.accepted);
    CHECK(r.diagnostics.front().kind == "HypothesisLeak");
}

TEST_CASE("non-tautologies and wrong axiom instances are rejected") {
    ScriptBuilder b("bad");
    b.taut(parse_formula("p -> X p"));
    CHECK_FALSE(check_bundle(b.finish(), ConstantSpecification{}).accepted);
    ScriptBuilder c("bad-axiom");
    c.axiom("Fun", parse_formula("X ~p <-> ~X q"));
    CHECK_FALSE(check_bundle(c.finish(), ConstantSpecification{}).accepted);
    CHECK(taut_check(parse_formula("(p -> q) -> (~q -> ~p)")));
    CHECK_FALSE(taut_check(parse_formula("(p -> q) -> (q -> p)")));
}
