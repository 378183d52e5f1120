#include <catch2/catch_amalgamated.hpp>

#include "properties_impl.hpp"

static const std::string kSourceDir = TGK_SOURCE_DIR;

TEST_CASE("random extension DAGs stay acyclic") {
    props::Result r = props::acyclicity();
    INFO(r.summary());
    CHECK(r.failures == 0);
    CHECK(r.cases >= 1000);
}

TEST_CASE("appending declarations keeps the base a literal prefix") {
    props::Result r = props::prefix_stability();
    INFO(r.summary());
    CHECK(r.failures == 0);
    CHECK(r.cases >= 1000);
}

TEST_CASE("translation along a view commutes with substitution") {
    props::Result r = props::translate_homomorphism(kSourceDir);
    INFO(r.summary());
    CHECK(r.failures == 0);
    CHECK(r.cases >= 1000);
}

TEST_CASE("composition of views is associative and has identities") {
    props::Result r = props::composition_laws(kSourceDir);
    INFO(r.summary());
    CHECK(r.failures == 0);
    CHECK(r.cases >= 1000);
}

TEST_CASE("every pillar subset of a valid realm validates") {
    props::Result r = props::pillar_subsets(kSourceDir);
    INFO(r.summary());
    CHECK(r.failures == 0);
    CHECK(r.cases >= 1000);
}
