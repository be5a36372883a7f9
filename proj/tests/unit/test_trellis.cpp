#include <doctest.h>

#include <cmath>

#include "ids/scheme.hpp"
#include "ids/trellis.hpp"
#include "oracles.hpp"

using namespace ids;

TEST_SUITE_BEGIN("trellis");

namespace {

// brute-force Bayes marginalization over all inputs and event traces
AppMatrix bayes_apps(std::span<const Symbol> y, const InnerCode& code,
                     const OffsetSequence* offset, std::size_t n_outer,
                     const ChannelParams& params) {
    const int q_o = code.num_inputs();
    AppMatrix app(code.sections_for(n_outer), q_o);
    std::vector<int> w(n_outer, 0);
    double total = 0;
    const std::size_t count = static_cast<std::size_t>(std::pow(q_o, n_outer));
    for (std::size_t v = 0; v < count; ++v) {
        std::size_t rest = v;
        for (std::size_t i = 0; i < n_outer; ++i) {
            w[i] = static_cast<int>(rest % static_cast<std::size_t>(q_o));
            rest /= static_cast<std::size_t>(q_o);
        }
        const auto x = code.encode(w, offset);
        const double p = oracle::enum_py(x, y, params);
        total += p;
        for (std::size_t i = 0; i < n_outer; ++i) app.at(i, w[i]) += p;
        app.at(n_outer, 0) += p;  // termination rows, if any
    }
    REQUIRE(total > 0);
    app.normalize_rows();
    return app;
}

InnerCode tiny_code() {  // q = 2, n = 2, k = 1
    Codebook cb{2, 1, 2, {{0, 0}, {1, 1}}};
    return InnerCode::block(cb);
}

// bounds wide enough that no event trace of y is truncated; required when
// comparing against unrestricted trace enumeration
DriftBounds open_bounds(std::size_t n_channel, std::size_t y_len) {
    const int span = static_cast<int>(n_channel + y_len) + 1;
    return DriftBounds{-span, span, static_cast<int>(y_len) + 1};
}

}  // namespace

TEST_CASE("lattice edge cases") {
    ChannelParams p{0.1, 0.2, 0.05, 4};
    SymbolVec x{1, 2, 3};
    CHECK(lattice_forward(x, {}, p) == doctest::Approx(std::pow(0.2, 3)).epsilon(1e-12));
    SymbolVec x1{0}, y1{0};
    const double expect = p.p_del * p.p_ins / 4 + p.p_trans() * (1 - p.p_sub);
    CHECK(lattice_forward(x1, y1, p) == doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS(lattice_forward(x1, SymbolVec(4, 0), p));  // mu > n (I_max + 1)
}

TEST_CASE("lattice matches trace enumeration on random small blocks") {
    Rng rng(31);
    for (int t = 0; t < 60; ++t) {
        const int q = rng.bernoulli(0.5) ? 2 : 4;
        const int n = 1 + static_cast<int>(rng.below(3));
        const int mu = static_cast<int>(rng.below(std::min(6, 3 * n + 1)));
        SymbolVec x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(mu));
        for (auto& s : x) s = static_cast<Symbol>(rng.symbol(q));
        for (auto& s : y) s = static_cast<Symbol>(rng.symbol(q));
        ChannelParams p{0.05 + 0.2 * rng.real(), 0.05 + 0.2 * rng.real(), 0.3 * rng.real(), q};
        const double got = lattice_forward(x, y, p);
        const double want = oracle::enum_py(x, y, p);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("noiseless decoding is certain") {
    const auto scheme = scheme_by_id("TVC-2");
    const auto fc = make_frame_code(scheme, 12, 99);
    Rng rng(32);
    std::vector<int> w(12);
    for (auto& wi : w) wi = rng.symbol(16);
    const auto x = fc.code.encode(w, fc.offset_ptr());
    ChannelParams p{0, 0, 0, 4};
    const auto r = decode_single(x, fc.code, fc.offset_ptr(), AppMatrix::uniform(12, 16), p,
                                 DriftBounds{0, 0, 2});
    REQUIRE(!r.erasure);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(r.app.at(i, w[i]) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rows sum to one and forward/backward p(y) agree") {
    const auto scheme = scheme_by_id("WM");
    const auto fc = make_frame_code(scheme, 8, 5);
    ChannelParams p{0.06, 0.06, 0.01, 4};
    Rng rng(33);
    std::vector<int> w(8);
    for (auto& wi : w) wi = rng.symbol(16);
    const auto x = fc.code.encode(w, fc.offset_ptr());
    const auto y = transmit(x, p, rng);
    const auto bounds = DriftBounds::dynamic(x.size(), p, 5.0, 2);
    const auto r = decode_single(y, fc.code, fc.offset_ptr(), AppMatrix::uniform(8, 16), p, bounds);
    REQUIRE(!r.erasure);
    for (std::size_t i = 0; i < r.app.rows(); ++i) {
        double s = 0;
        for (int a = 0; a < 16; ++a) s += r.app.at(i, a);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(r.log_py == doctest::Approx(r.log_py_backward).epsilon(1e-9));
}

TEST_CASE("tiny instances match brute-force Bayes") {
    const auto code = tiny_code();
    Rng rng(34);
    int checked = 0;
    for (int t = 0; t < 12; ++t) {
        ChannelParams p{0.1, 0.1, 0.05, 2};
        std::vector<int> w{rng.symbol(2), rng.symbol(2)};
        const auto x = code.encode(w, nullptr);
        const auto y = transmit(x, p, rng);
        const auto bounds = open_bounds(x.size(), y.size());
        const auto r = decode_single(y, code, nullptr, AppMatrix::uniform(2, 2), p, bounds);
        REQUIRE(!r.erasure);
        const auto want = bayes_apps(y, code, nullptr, 2, p);
        for (std::size_t i = 0; i < 2; ++i)
            for (int a = 0; a < 2; ++a)
                CHECK(r.app.at(i, a) == doctest::Approx(want.at(i, a)).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked >= 6);
}

TEST_CASE("APPs are invariant to prior scaling") {
    const auto code = tiny_code();
    ChannelParams p{0.1, 0.1, 0, 2};
    Rng rng(35);
    std::vector<int> w{1, 0};
    const auto x = code.encode(w, nullptr);
    const auto y = transmit(x, p, rng);
    const DriftBounds bounds{-4, 4, 2};
    AppMatrix pri(2, 2);
    pri.at(0, 0) = 0.3;
    pri.at(0, 1) = 0.7;
    pri.at(1, 0) = 0.6;
    pri.at(1, 1) = 0.4;
    AppMatrix scaled(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a) scaled.at(i, a) = 1000.0 * pri.at(i, a);
    const auto r1 = decode_single(y, code, nullptr, pri, p, bounds);
    const auto r2 = decode_single(y, code, nullptr, scaled, p, bounds);
    REQUIRE(!r1.erasure);
    for (std::size_t i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a)
            CHECK(r1.app.at(i, a) == doctest::Approx(r2.app.at(i, a)).epsilon(1e-12));
}

TEST_CASE("raising I_max never decreases p(y)") {
    const auto code = tiny_code();
    ChannelParams p{0.15, 0.1, 0, 2};
    Rng rng(36);
    for (int t = 0; t < 10; ++t) {
        std::vector<int> w{rng.symbol(2), rng.symbol(2)};
        const auto x = code.encode(w, nullptr);
        const auto y = transmit(x, p, rng);
        const long d = static_cast<long>(y.size()) - static_cast<long>(x.size());
        if (d < -4 || d > 4) continue;
        const auto r2 = decode_single(y, code, nullptr, AppMatrix::uniform(2, 2), p,
                                      DriftBounds{-4, 4, 2});
        const auto r3 = decode_single(y, code, nullptr, AppMatrix::uniform(2, 2), p,
                                      DriftBounds{-4, 4, 3});
        if (r2.erasure || r3.erasure) continue;
        CHECK(r3.log_py >= r2.log_py - 1e-12);
    }
}

TEST_CASE("edge counter matches the closed form for a block code") {
    const auto scheme = scheme_by_id("TVC-2");
    const std::size_t n_outer = 10;
    const auto fc = make_frame_code(scheme, n_outer, 1);
    ChannelParams p{0.05, 0.05, 0, 4};
    Rng rng(37);
    std::vector<int> w(n_outer);
    for (auto& wi : w) wi = rng.symbol(16);
    const auto x = fc.code.encode(w, fc.offset_ptr());
    const auto y = transmit(x, p, rng);
    const DriftBounds bounds{-6, 6, 2};
    if (!bounds.contains(static_cast<long>(y.size()) - static_cast<long>(x.size()))) return;
    const auto r = decode_single(y, fc.code, fc.offset_ptr(), AppMatrix::uniform(n_outer, 16), p,
                                 bounds);
    // (N/n) 2^k Delta delta with nu = 0
    const std::uint64_t want = n_outer * 16ull * 13ull * 13ull;
    CHECK(r.edges_enumerated == want);
    CHECK(r.edges_active <= r.edges_enumerated);
}

TEST_CASE("extrinsic identities") {
    const auto code = tiny_code();
    ChannelParams p{0.1, 0.1, 0, 2};
    Rng rng(38);
    std::vector<int> w{0, 1};
    const auto x = code.encode(w, nullptr);
    const auto y = transmit(x, p, rng);
    const DriftBounds bounds{-4, 4, 2};
    AppMatrix uni = AppMatrix::uniform(2, 2);
    const auto app = decode_single(y, code, nullptr, uni, p, bounds);
    const auto ext = decode_single_extrinsic(y, code, nullptr, uni, p, bounds);
    REQUIRE(!app.erasure);
    // uniform priors: extrinsic equals the APP
    for (std::size_t i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a)
            CHECK(ext.app.at(i, a) == doctest::Approx(app.app.at(i, a)).epsilon(1e-12));
    // nonuniform priors: extrinsic times priors recovers the APP
    AppMatrix pri(2, 2);
    pri.at(0, 0) = 0.2;
    pri.at(0, 1) = 0.8;
    pri.at(1, 0) = 0.9;
    pri.at(1, 1) = 0.1;
    const auto app2 = decode_single(y, code, nullptr, pri, p, bounds);
    const auto ext2 = decode_single_extrinsic(y, code, nullptr, pri, p, bounds);
    for (std::size_t i = 0; i < 2; ++i) {
        double prod[2], s = 0;
        for (int a = 0; a < 2; ++a) {
            prod[a] = ext2.app.at(i, a) * pri.at(i, a);
            s += prod[a];
        }
        for (int a = 0; a < 2; ++a)
            CHECK(prod[a] / s == doctest::Approx(app2.app.at(i, a)).epsilon(1e-9));
    }
    // purity
    const auto again = decode_single_extrinsic(y, code, nullptr, pri, p, bounds);
    for (std::size_t i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a) CHECK(again.app.at(i, a) == ext2.app.at(i, a));
}

TEST_CASE("final drift outside the bounds is an erasure") {
    const auto code = tiny_code();
    ChannelParams p{0.1, 0.1, 0, 2};
    SymbolVec y(40, 0);  // far longer than N = 4 allows within the bounds
    const auto r = decode_single(y, code, nullptr, AppMatrix::uniform(2, 2), p,
                                 DriftBounds{-3, 3, 2});
    CHECK(r.erasure);
    for (std::size_t i = 0; i < r.app.rows(); ++i)
        CHECK(r.app.at(i, 0) == doctest::Approx(0.5));
}

TEST_CASE("clamped forward recursion is consistent") {
    const auto code = tiny_code();
    ChannelParams p{0.12, 0.08, 0.02, 2};
    Rng rng(39);
    for (int t = 0; t < 8; ++t) {
        std::vector<int> w{rng.symbol(2), rng.symbol(2)};
        const auto x = code.encode(w, nullptr);
        const auto y = transmit(x, p, rng);
        const auto bounds = open_bounds(x.size(), y.size());
        const auto lp = forward_log_probs(y, code, nullptr, w, p, bounds);
        REQUIRE(lp.ok);
        // p(w, y) = p(w) p(y | w), p(w) = 2^-2
        const double want_pwy = 0.25 * oracle::enum_py(x, y, p);
        CHECK(lp.log_pwy == doctest::Approx(std::log(want_pwy)).epsilon(1e-9));
        // p(y) from total enumeration
        double want_py = 0;
        for (int v = 0; v < 4; ++v) {
            std::vector<int> wv{v & 1, v >> 1};
            want_py += 0.25 * oracle::enum_py(code.encode(wv, nullptr), y, p);
        }
        CHECK(lp.log_py == doctest::Approx(std::log(want_py)).epsilon(1e-9));
        CHECK(lp.log_pwy <= lp.log_py + 1e-12);
    }
}

TEST_SUITE_END();
