#include "doctest.h"
#include "properties.hpp"

using namespace jto::testing;

namespace {

void require(const Outcome& o) {
    INFO(o.summary());
    CHECK(o.ok());
}

}  // namespace

TEST_CASE("parse and pretty round trip on 1000 random ASTs") { require(round_trip(101, 1000)); }

TEST_CASE("desugar is idempotent and reaches the core") { require(desugar_idempotence(102, 1000)); }

TEST_CASE("duality is a desugaring identity") { require(duality_desugaring(103, 500)); }

TEST_CASE("duality holds pointwise in the corpus models") { require(duality_semantic(104, 20)); }

TEST_CASE("seeded downward-closure violations are detected") { require(cs_downward_closure(105, 200)); }

TEST_CASE("subformula closure is closed") { require(closure_property(106, 300)); }

TEST_CASE("truth on lassos is periodic past q times the depth") { require(lasso_periodicity(107, 30, 10)); }

TEST_CASE("axiom instances over the corpus universes are valid") {
    AxiomValidity a = axiom_validity(108, 25);
    require(a.outcome);
}

TEST_CASE("the transform agrees with its source on random models") { require(transform_equivalence(109, 20, 4, 2)); }

TEST_CASE("satisfiable inputs are never UNSAT") { require(search_overapproximation(110, 40)); }
