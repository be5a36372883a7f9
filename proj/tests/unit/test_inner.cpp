#include <doctest.h>

#include <set>
#include <sstream>

#include "ids/inner.hpp"
#include "ids/scheme.hpp"
#include "oracles.hpp"

using namespace ids;

TEST_SUITE_BEGIN("inner");

TEST_CASE("levenshtein_indel basics") {
    SymbolVec a{0, 0, 0, 0}, b{0, 0, 2, 2};
    CHECK(levenshtein_indel(a, a) == 0);
    CHECK(levenshtein_indel(a, b) == 4);
    SymbolVec c{0, 0}, d{1, 1};
    CHECK(levenshtein_indel(c, d) == 4);
}

TEST_CASE("levenshtein_indel equals the cost-DP oracle and is a metric") {
    Rng rng(21);
    for (int t = 0; t < 200; ++t) {
        SymbolVec a(rng.below(7)), b(rng.below(7)), c(rng.below(7));
        for (auto& s : a) s = static_cast<Symbol>(rng.symbol(4));
        for (auto& s : b) s = static_cast<Symbol>(rng.symbol(4));
        for (auto& s : c) s = static_cast<Symbol>(rng.symbol(4));
        const int dab = levenshtein_indel(a, b);
        CHECK(dab == oracle::indel_distance_dp(a, b));
        CHECK(dab == levenshtein_indel(b, a));
        CHECK((dab == 0) == (a == b));
        CHECK(dab <= levenshtein_indel(a, c) + levenshtein_indel(c, b));
    }
}

TEST_CASE("dm_construct") {
    const auto cb = dm_construct(4, 1, 2);
    REQUIRE(cb.words.size() == 2);
    CHECK(cb.words[0] == SymbolVec{0, 0, 0, 0});
    CHECK(cb.words[1] == SymbolVec{0, 0, 0, 1});

    const auto big = dm_construct(8, 4, 4);
    CHECK(big.words.size() == 16);
    for (const auto& w : big.words) {
        int weight = 0;
        for (Symbol s : w) weight += s != 0;
        CHECK(weight <= 2);
    }
    for (int k = 0; k <= 4; ++k) CHECK(dm_construct(4, k, 4).words.size() == (1u << k));
    CHECK_THROWS(dm_construct(2, 5, 2));
}

TEST_CASE("verify_codebook on the designed TVC books") {
    const auto& books = designed_tvc_codebooks();
    REQUIRE(books.size() == 4);
    std::set<SymbolVec> all;
    for (const auto& cb : books) {
        const auto v = verify_codebook(cb, 4);
        CHECK(v.ok);
        CHECK(v.min_distance == 4);
        for (const auto& w : cb.words) all.insert(w);
    }
    CHECK(all.size() == 56);

    Codebook bad{2, 1, 2, {{0, 1}, {0, 1}}};
    CHECK(!verify_codebook(bad, 1).ok);
}

TEST_CASE("clique_design finds the full graph when everything is adjacent") {
    const auto res = clique_design(2, 2, 2, 4, 1);
    REQUIRE(res.ok);
    REQUIRE(res.codebooks.size() == 1);
    std::set<SymbolVec> words(res.codebooks[0].words.begin(), res.codebooks[0].words.end());
    CHECK(words == std::set<SymbolVec>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("clique_design on single-symbol binary words") {
    const auto res = clique_design(1, 2, 2, 2, 1);
    REQUIRE(res.ok);
    std::set<SymbolVec> words(res.codebooks[0].words.begin(), res.codebooks[0].words.end());
    CHECK(words == std::set<SymbolVec>{{0}, {1}});
}

TEST_CASE("clique_design reaches the designed TVC parameters") {
    const auto res = clique_design(4, 4, 4, 16, 4);
    REQUIRE(res.ok);
    REQUIRE(res.codebooks.size() == 4);
    for (const auto& cb : res.codebooks) {
        CHECK(cb.words.size() == 16);
        CHECK(verify_codebook(cb, 4).ok);
    }
}

TEST_CASE("clique_design failure carries the largest clique") {
    // length-1 quaternary words are pairwise at distance 2; no 3-word set
    // reaches distance 4
    const auto res = clique_design(1, 4, 4, 3, 1);
    CHECK(!res.ok);
    CHECK(res.largest_clique.size() < 3);
}

TEST_CASE("tvc_schedule") {
    const auto rr = tvc_schedule(ScheduleKind::round_robin, 4, 8, 0);
    CHECK(rr == std::vector<int>{0, 1, 2, 3, 0, 1, 2, 3});
    const auto r1 = tvc_schedule(ScheduleKind::random_no_repeat, 4, 500, 42);
    const auto r2 = tvc_schedule(ScheduleKind::random_no_repeat, 4, 500, 42);
    CHECK(r1 == r2);
    for (std::size_t i = 1; i < r1.size(); ++i) {
        CHECK(r1[i] != r1[i - 1]);
        CHECK(r1[i] >= 0);
        CHECK(r1[i] < 4);
    }
    CHECK(tvc_schedule(ScheduleKind::random_no_repeat, 4, 500, 43) != r1);
}

TEST_CASE("offset sequences are deterministic and self-inverting") {
    const auto o1 = OffsetSequence::make(7, 64, 4);
    const auto o2 = OffsetSequence::make(7, 64, 4);
    CHECK(o1.symbols == o2.symbols);
    const auto code = InnerCode::block(dm_construct(4, 4, 4));
    std::vector<int> w{3, 14, 0, 7};
    const auto plain = code.encode(w, nullptr);
    auto shifted = code.encode(w, &o1);
    CHECK(shifted != plain);
    for (std::size_t i = 0; i < shifted.size(); ++i)
        shifted[i] = static_cast<Symbol>((shifted[i] + 4 - o1.symbols[i]) % 4);
    CHECK(shifted == plain);
}

TEST_CASE("grouped convolutional sections match the base encoder") {
    const auto base = InnerCode::convolutional(1);
    Rng rng(22);
    for (int group : {1, 2, 4}) {
        const auto code = InnerCode::convolutional(group);
        CHECK(code.n() == group);
        CHECK(code.k() == group);
        CHECK(code.nu() == 2);
        const std::size_t n_sym = 12;  // symbols of the grouped code
        std::vector<int> w(n_sym);
        std::vector<int> bits;
        for (auto& wi : w) {
            wi = static_cast<int>(rng.below(1u << group));
            for (int j = group - 1; j >= 0; --j) bits.push_back((wi >> j) & 1);
        }
        const auto grouped = code.encode(w, nullptr);
        const auto flat = base.encode(bits, nullptr);
        // compare the pre-termination prefix
        const std::size_t prefix = n_sym * static_cast<std::size_t>(group);
        for (std::size_t i = 0; i < prefix; ++i) CHECK(grouped[i] == flat[i]);
    }
}

TEST_CASE("convolutional all-zero input stays zero and terminates at state 0") {
    const auto code = InnerCode::convolutional(2);
    std::vector<int> w(10, 0);
    const auto x = code.encode(w, nullptr);
    for (Symbol s : x) CHECK(s == 0);
    int st = 0;
    for (int wi : w) st = code.next_state(st, wi);
    CHECK(code.next_state(st, 0) == 0);
}

TEST_CASE("encode_inner is injective for fixed schedule and offset") {
    const auto& books = designed_tvc_codebooks();
    const auto sched = tvc_schedule(ScheduleKind::round_robin, 4, 3, 0);
    const auto code = InnerCode::tvc(books, sched);
    const auto offset = OffsetSequence::make(3, 12, 4);
    std::set<SymbolVec> seen;
    std::vector<int> w(3);
    for (w[0] = 0; w[0] < 16; ++w[0])
        for (w[1] = 0; w[1] < 16; ++w[1])
            for (w[2] = 0; w[2] < 16; ++w[2]) seen.insert(code.encode(w, &offset));
    CHECK(seen.size() == 16u * 16u * 16u);
}

TEST_CASE("tvc round robin uses CB1..CB4 in order") {
    const auto& books = designed_tvc_codebooks();
    const auto sched = tvc_schedule(ScheduleKind::round_robin, 4, 8, 0);
    const auto code = InnerCode::tvc(books, sched);
    std::vector<int> w{5, 5, 5, 5, 5, 5, 5, 5};
    const auto x = code.encode(w, nullptr);
    for (int i = 0; i < 8; ++i) {
        const auto& expect = books[static_cast<std::size_t>(i % 4)].words[5];
        for (int j = 0; j < 4; ++j) CHECK(x[static_cast<std::size_t>(4 * i + j)] == expect[static_cast<std::size_t>(j)]);
    }
}

TEST_CASE("codebook file round trip") {
    std::stringstream ss;
    save_codebooks(ss, designed_tvc_codebooks(), 4);
    int d_min = 0;
    const auto loaded = load_codebooks(ss, &d_min);
    CHECK(d_min == 4);
    REQUIRE(loaded.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(loaded[i].words == designed_tvc_codebooks()[i].words);
}

TEST_CASE("identity code") {
    const auto code = InnerCode::identity(4);
    CHECK(code.n() == 1);
    CHECK(code.k() == 2);
    std::vector<int> w{0, 1, 2, 3};
    CHECK(code.encode(w, nullptr) == SymbolVec{0, 1, 2, 3});
    CHECK_THROWS(InnerCode::identity(3));
}

TEST_SUITE_END();
