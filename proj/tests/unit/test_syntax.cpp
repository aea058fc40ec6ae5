#include "doctest.h"
#include "jto/syntax.hpp"

using namespace jto;

TEST_CASE("parse and pretty round trip on a small formula") {
    Formula f = parse_formula("[x]_1 p -> O[#c]_2 (q U r)");
    CHECK(parse_formula(pretty(f)) == f);
}
