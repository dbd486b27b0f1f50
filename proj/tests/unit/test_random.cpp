#include <set>

#include "doctest.h"
#include "ctrw/random.hpp"

using namespace ctrw;

TEST_CASE("derived seeds are distinct across streams and indices") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 6; ++s)
        for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(42, s, k));
    CHECK(seen.size() == 6000);
    CHECK(derive_seed(1, 1, 0) != derive_seed(2, 1, 0));
}

TEST_CASE("same seed gives the same stream") {
    RandomSource a(9), b(9);
    for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("uniform stays inside the open unit interval") {
    RandomSource rng(3);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}
