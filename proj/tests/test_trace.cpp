#include <doctest.h>

#include "oracle.hpp"
#include "soclens/errors.hpp"
#include "soclens/trace.hpp"

using namespace soclens;

TEST_CASE("implied forms of a small trace") {
    BinTrace f{0, 1, 1, 0, 1};
    CHECK(oracle::to_vector(implied(f, ImpliedKind::Level)) ==
          std::vector<int>{0, 1, 1, 0, 1});
    CHECK(oracle::to_vector(implied(f, ImpliedKind::Rise)) ==
          std::vector<int>{0, 1, 0, 0, 1});
    CHECK(oracle::to_vector(implied(f, ImpliedKind::Fall)) ==
          std::vector<int>{0, 0, 0, 1, 0});
    CHECK(oracle::to_vector(implied(f, ImpliedKind::Reflect)) ==
          std::vector<int>{1, 0, 0, 1, 0});
}

TEST_CASE("shifted_sample convention") {
    BinTrace f{0, 1, 0};
    CHECK(shifted_sample(f, 0, 1) == 1);
    CHECK(shifted_sample(f, 2, 1) == 0); // past the end reads 0
    CHECK(shifted_sample(f, 1, 0) == 1);
    CHECK(shifted_sample(f, 0, -1) == 0); // before the start reads 0
}

TEST_CASE("packed implied matches the naive route on random traces") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        size_t n = 1 + static_cast<size_t>(seed * 37 % 300);
        auto bits = oracle::random_trace(n, 0.3 + 0.05 * (seed % 9), seed);
        BinTrace trace = oracle::to_bintrace(bits);
        for (ImpliedKind kind : kAllKinds)
            CHECK(oracle::to_vector(implied(trace, kind)) ==
                  oracle::implied(bits, kind));
    }
}

TEST_CASE("rise and fall never coincide, edge counts balance") {
    for (uint64_t seed = 100; seed < 140; ++seed) {
        auto bits = oracle::random_trace(257, 0.5, seed);
        BinTrace trace = oracle::to_bintrace(bits);
        BinTrace rise = implied(trace, ImpliedKind::Rise);
        BinTrace fall = implied(trace, ImpliedKind::Fall);
        for (size_t t = 0; t < trace.size(); ++t)
            CHECK(rise.bit(t) + fall.bit(t) <= 1);
        auto diff = static_cast<long long>(rise.count()) -
                    static_cast<long long>(fall.count());
        CHECK(std::abs(diff) <= 1);
    }
}

TEST_CASE("reflection is an involution and exchanges rise with fall") {
    auto bits = oracle::random_trace(130, 0.4, 7);
    BinTrace trace = oracle::to_bintrace(bits);
    BinTrace reflected = implied(trace, ImpliedKind::Reflect);
    CHECK(implied(reflected, ImpliedKind::Reflect) == trace);
    CHECK(implied(trace, ImpliedKind::Rise) ==
          implied(reflected, ImpliedKind::Fall));
}

TEST_CASE("zero shift equals direct indexing") {
    auto bits = oracle::random_trace(90, 0.5, 11);
    BinTrace trace = oracle::to_bintrace(bits);
    for (size_t t = 0; t < trace.size(); ++t)
        CHECK(shifted_sample(trace, t, 0) == (trace.bit(t) ? 1 : 0));
}

TEST_CASE("window64 and extract_slice agree with bitwise reads") {
    auto bits = oracle::random_trace(200, 0.5, 13);
    BinTrace trace = oracle::to_bintrace(bits);
    for (int64_t start : {-70, -1, 0, 5, 63, 64, 130, 199, 250}) {
        auto slice = extract_slice(trace, start, 100);
        for (size_t k = 0; k < 100; ++k) {
            int expected = oracle::sample(bits, start + static_cast<int64_t>(k));
            int got = (slice[k / 64] >> (k % 64)) & 1;
            CHECK(got == expected);
        }
    }
}

TEST_CASE("trace set enforces unique names and equal lengths") {
    TraceSet set;
    set.add("a", BinTrace{0, 1, 0});
    CHECK_THROWS_AS(set.add("a", BinTrace{1, 1, 1}), ConfigError);
    CHECK_THROWS_AS(set.add("b", BinTrace{1, 1}), ConfigError);
    CHECK_THROWS_AS(set.add("", BinTrace{1, 1, 1}), ConfigError);
    set.add("b", BinTrace{1, 1, 0});
    CHECK(set.size() == 2);
    CHECK(set.find("b") == 1);
    CHECK(!set.find("c"));
}
