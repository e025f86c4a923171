#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "doctest.h"
#include "sctsa/rng.hpp"

using namespace sctsa;

TEST_CASE("same seed gives the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("derive_seed is order-free and spreads streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 50; ++s) seen.insert(derive_seed(7, s));
    CHECK(seen.size() == 50);
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("below is in range and roughly uniform") {
    Rng rng(1);
    std::vector<int> histo(10, 0);
    for (int i = 0; i < 10000; ++i) {
        const auto v = rng.below(10);
        REQUIRE(v < 10);
        ++histo[static_cast<std::size_t>(v)];
    }
    for (const int h : histo) {
        CHECK(h > 800);
        CHECK(h < 1200);
    }
}

TEST_CASE("normal has sane first two moments") {
    Rng rng(3);
    double sum = 0, sq = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sq / n - 1.0) < 0.1);
}

TEST_CASE("sample_without_replacement yields distinct in-range indices") {
    Rng rng(9);
    const auto s = rng.sample_without_replacement(20, 12);
    REQUIRE(s.size() == 12);
    std::set<std::uint32_t> uniq(s.begin(), s.end());
    CHECK(uniq.size() == 12);
    for (const auto v : s) CHECK(v < 20);
}

TEST_CASE("full sample is a permutation") {
    Rng rng(11);
    const auto s = rng.sample_without_replacement(8, 8);
    std::set<std::uint32_t> uniq(s.begin(), s.end());
    CHECK(uniq.size() == 8);
}
