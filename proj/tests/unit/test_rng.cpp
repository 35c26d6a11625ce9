#include "doctest.h"

#include <set>
#include <vector>

#include "levylt/parallel.hpp"
#include "levylt/rng.hpp"

using namespace levylt;

// Known-answer vectors of the Random123 reference implementation.
TEST_CASE("philox4x32-10 known answers") {
    const auto zero = Philox(0, 0).generate(0);
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    const auto ones = Philox(~std::uint64_t{0}, ~std::uint64_t{0}).generate(~std::uint64_t{0});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("streams are reproducible and distinct") {
    auto a = make_stream(42, StreamKind::Path, 7);
    auto b = make_stream(42, StreamKind::Path, 7);
    auto c = make_stream(42, StreamKind::Path, 8);
    auto d = make_stream(42, StreamKind::Walk, 7);
    std::set<std::uint32_t> firsts;
    for (int i = 0; i < 100; ++i) {
        const auto va = a();
        CHECK(va == b());
        firsts.insert(va);
    }
    CHECK(c() != make_stream(42, StreamKind::Path, 7)());
    CHECK(d() != make_stream(42, StreamKind::Path, 7)());
    CHECK(firsts.size() == 100);
}

TEST_CASE("uniform_open stays inside (0, 1)") {
    auto r = make_stream(1, StreamKind::Misc, 0);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform_open();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
    for (unsigned threads : {1u, 3u, 8u}) {
        std::vector<int> hits(1001, 0);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
        for (int h : hits) CHECK(h == 1);
    }
    CHECK_THROWS(parallel_for(10, 4, [](std::size_t i) {
        if (i == 5) throw std::runtime_error("boom");
    }));
}
