#include "doctest.h"
#include "jto/corpus_proofs.hpp"

using namespace jto;

TEST_CASE("every corpus script is accepted") {
    for (const auto& nb : corpus_scripts()) {
        CAPTURE(nb.name);
        CheckReport r = check_bundle(nb.bundle, ConstantSpecification{});
        if (!r.accepted) MESSAGE(r.summary());
        CHECK(r.accepted);
    }
}

TEST_CASE("main script line counts") {
    CHECK(protagoras_script().main().lines.size() == 7);
    CHECK(euathlus_script().main().lines.size() == 7);
    CHECK(protagoras_refined_script().main().lines.size() == 7);
    CHECK(euathlus_refined_script().main().lines.size() == 11);
    CHECK(no_win_first_script().main().lines.size() == 13);
    CHECK(permitted_to_sue_script().main().lines.size() == 24);
    CHECK(second_verdict_script().main().lines.size() == 22);
    CHECK(judge_first_script().main().lines.size() == 17);
    CHECK(sdl_contradiction_script().main().lines.size() == 6);
}
