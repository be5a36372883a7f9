// Acceptance suite: one pass/fail line per criterion. Run with --slow to
// replace the reduced-budget threshold ordering check (criterion 8) with the
// full designed-code threshold estimate.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ids/air.hpp"
#include "ids/ldpc.hpp"
#include "ids/multiseq.hpp"
#include "ids/polar.hpp"
#include "ids/scheme.hpp"
#include "ids/sim.hpp"
#include "ids/trellis.hpp"

#ifndef IDS_DATA_DIR
#define IDS_DATA_DIR "data"
#endif

using namespace ids;

namespace {

bool g_slow = false;

// --- the trace-enumeration oracle (kept independent of the lattice path) ---

struct TraceEnum {
    std::span<const Symbol> x, y;
    ChannelParams p;
    double total = 0;
    std::vector<int> trace;

    double replay() const {
        double prob = 1;
        std::size_t r = 0, l = 0;
        for (int ev : trace) {
            if (ev == 0) {
                prob *= p.p_ins / p.q;
                ++l;
            } else if (ev == 1) {
                prob *= p.p_del;
                ++r;
            } else {
                prob *= y[l] == x[r] ? p.p_trans() * (1 - p.p_sub)
                                     : p.p_trans() * p.p_sub / (p.q - 1);
                ++r;
                ++l;
            }
        }
        return prob;
    }
    void walk(std::size_t r, std::size_t l) {
        if (r == x.size()) {
            if (l == y.size()) total += replay();
            return;
        }
        if (l < y.size()) {
            trace.push_back(0);
            walk(r, l + 1);
            trace.pop_back();
        }
        trace.push_back(1);
        walk(r + 1, l);
        trace.pop_back();
        if (l < y.size()) {
            trace.push_back(2);
            walk(r + 1, l + 1);
            trace.pop_back();
        }
    }
};

double enum_py(std::span<const Symbol> x, std::span<const Symbol> y, const ChannelParams& p) {
    TraceEnum e{x, y, p, 0.0, {}};
    e.walk(0, 0);
    return e.total;
}

DriftBounds open_bounds(std::size_t n_channel, std::size_t y_len) {
    const int span = static_cast<int>(n_channel + y_len) + 1;
    return DriftBounds{-span, span, static_cast<int>(y_len) + 1};
}

InnerCode tiny_code() {  // q = 2, n = 2, k = 1
    Codebook cb{2, 1, 2, {{0, 0}, {1, 1}}};
    return InnerCode::block(cb);
}

AppMatrix bayes_apps(const std::vector<SymbolVec>& reads, const InnerCode& code,
                     std::size_t n_outer, const ChannelParams& params) {
    const int q_o = code.num_inputs();
    AppMatrix app(code.sections_for(n_outer), q_o);
    std::vector<int> w(n_outer, 0);
    const std::size_t count = static_cast<std::size_t>(std::pow(q_o, n_outer));
    for (std::size_t v = 0; v < count; ++v) {
        std::size_t rest = v;
        for (std::size_t i = 0; i < n_outer; ++i) {
            w[i] = static_cast<int>(rest % static_cast<std::size_t>(q_o));
            rest /= static_cast<std::size_t>(q_o);
        }
        const auto x = code.encode(w, nullptr);
        double p = 1;
        for (const auto& y : reads) p *= enum_py(x, y, params);
        for (std::size_t i = 0; i < n_outer; ++i) app.at(i, w[i]) += p;
        app.at(n_outer, 0) += p;
    }
    app.normalize_rows();
    return app;
}

double max_rel_err(double got, double want) {
    if (want == 0.0) return got == 0.0 ? 0.0 : 1.0;
    return std::abs(got - want) / std::abs(want);
}

std::string data_path(const char* name) { return std::string(IDS_DATA_DIR) + "/" + name; }

// one-sided 95% paired comparison: is the "better" arm not worse?
bool paired_not_worse(std::uint64_t better_only_fails, std::uint64_t worse_only_fails) {
    const double b = static_cast<double>(better_only_fails);
    const double c = static_cast<double>(worse_only_fails);
    return b <= c + 1.645 * std::sqrt(std::max(b + c, 1.0));
}

// one-sided 95% paired comparison: is the "better" arm strictly better?
bool paired_strictly_better(std::uint64_t better_only_fails, std::uint64_t worse_only_fails) {
    const double b = static_cast<double>(better_only_fails);
    const double c = static_cast<double>(worse_only_fails);
    return c - b > 1.645 * std::sqrt(std::max(b + c, 1.0));
}

// ---------------------------------------------------------------------------

bool criterion1_lattice(std::ostream& os) {
    Rng rng(101);
    double worst = 0;
    for (int t = 0; t < 500; ++t) {
        const int q = rng.bernoulli(0.5) ? 2 : 4;
        const int n = 1 + static_cast<int>(rng.below(3));
        const int mu = static_cast<int>(rng.below(6));
        SymbolVec x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(mu));
        for (auto& s : x) s = static_cast<Symbol>(rng.symbol(q));
        for (auto& s : y) s = static_cast<Symbol>(rng.symbol(q));
        const ChannelParams p{0.02 + 0.25 * rng.real(), 0.02 + 0.25 * rng.real(),
                              0.4 * rng.real(), q};
        const double got = lattice_forward(x, y, p, mu + 1);
        const double want = enum_py(x, y, p);
        worst = std::max(worst, max_rel_err(got, want));
    }
    os << "max rel err " << worst << " over 500 instances";
    return worst < 1e-12;
}

bool criterion2_single(std::ostream& os) {
    const auto code = tiny_code();
    Rng rng(102);
    double worst = 0;
    int done = 0;
    while (done < 100) {
        const ChannelParams p{0.05 + 0.15 * rng.real(), 0.05 + 0.15 * rng.real(),
                              0.2 * rng.real(), 2};
        std::vector<int> w{rng.symbol(2), rng.symbol(2)};
        const auto x = code.encode(w, nullptr);
        const auto y = transmit(x, p, rng);
        const auto bounds = open_bounds(x.size(), y.size());
        const auto r = decode_single(y, code, nullptr, AppMatrix::uniform(2, 2), p, bounds);
        if (r.erasure) continue;
        const auto want = bayes_apps({y}, code, 2, p);
        for (std::size_t i = 0; i < 2; ++i)
            for (int a = 0; a < 2; ++a)
                worst = std::max(worst, std::abs(r.app.at(i, a) - want.at(i, a)));
        ++done;
    }
    os << "max APP deviation " << worst << " over 100 instances";
    return worst < 1e-9;
}

bool criterion3_joint(std::ostream& os) {
    const auto code = tiny_code();
    Rng rng(103);
    double worst_joint = 0, worst_reduction = 0;
    int done = 0;
    while (done < 100) {
        const ChannelParams p{0.05 + 0.15 * rng.real(), 0.05 + 0.15 * rng.real(),
                              0.2 * rng.real(), 2};
        std::vector<int> w{rng.symbol(2), rng.symbol(2)};
        const auto x = code.encode(w, nullptr);
        std::vector<SymbolVec> reads{transmit(x, p, rng), transmit(x, p, rng)};
        const auto bounds = open_bounds(x.size(), std::max(reads[0].size(), reads[1].size()));
        const AppMatrix uni = AppMatrix::uniform(2, 2);
        const auto joint = decode_joint(reads, code, nullptr, uni, p, bounds, 1e9);
        if (joint.erasure) continue;
        const auto want = bayes_apps(reads, code, 2, p);
        for (std::size_t i = 0; i < 2; ++i)
            for (int a = 0; a < 2; ++a)
                worst_joint = std::max(worst_joint, std::abs(joint.app.at(i, a) - want.at(i, a)));

        std::vector<SymbolVec> one{reads[0]};
        const auto b1 = open_bounds(x.size(), reads[0].size());
        const auto red = decode_joint(one, code, nullptr, uni, p, b1, 1e9);
        const auto single = decode_single(reads[0], code, nullptr, uni, p, b1);
        if (!red.erasure && !single.erasure) {
            for (std::size_t i = 0; i < 2; ++i)
                for (int a = 0; a < 2; ++a)
                    worst_reduction = std::max(worst_reduction,
                                               std::abs(red.app.at(i, a) - single.app.at(i, a)));
        }
        ++done;
    }
    os << "joint vs Bayes " << worst_joint << ", M=1 reduction " << worst_reduction;
    return worst_joint < 1e-9 && worst_reduction < 1e-12;
}

bool criterion4_memoryless(std::ostream& os) {
    const auto scheme = scheme_by_id("TVC-2");
    double worst = 0;
    Rng rng(104);
    for (double psub : {0.05, 0.2}) {
        const ChannelParams p{0, 0, psub, 4};
        for (int t = 0; t < 50; ++t) {
            const std::size_t n_outer = 8 + rng.below(25);  // up to 32
            const auto fc = make_frame_code(scheme, n_outer, rng.next_u64());
            std::vector<int> w(n_outer);
            for (auto& wi : w) wi = rng.symbol(16);
            const auto x = fc.code.encode(w, fc.offset_ptr());
            std::vector<SymbolVec> reads{transmit(x, p, rng), transmit(x, p, rng)};
            const DriftBounds bounds{0, 0, 2};
            const AppMatrix uni = AppMatrix::uniform(n_outer, 16);
            std::vector<AppMatrix> singles;
            for (const auto& y : reads) {
                auto r = decode_single(y, fc.code, fc.offset_ptr(), uni, p, bounds);
                if (r.erasure) return false;
                AppMatrix info(n_outer, 16);
                for (std::size_t i = 0; i < n_outer; ++i)
                    for (int a = 0; a < 16; ++a) info.at(i, a) = r.app.at(i, a);
                singles.push_back(std::move(info));
            }
            const auto combined = combine_separate(singles, uni);
            const auto joint = decode_joint(reads, fc.code, fc.offset_ptr(), uni, p, bounds);
            if (joint.erasure) return false;
            for (std::size_t i = 0; i < n_outer; ++i)
                for (int a = 0; a < 16; ++a)
                    worst = std::max(worst, std::abs(combined.at(i, a) - joint.app.at(i, a)));
        }
    }
    os << "max deviation " << worst << " over 100 frames";
    return worst < 1e-9;
}

bool criterion5_tvc_fixture(std::ostream& os) {
    std::ifstream is(data_path("tvc_designed.txt"));
    if (!is) {
        os << "fixture missing";
        return false;
    }
    int d_min = 0;
    const auto books = load_codebooks(is, &d_min);
    if (books.size() != 4 || d_min != 4) {
        os << "bad fixture header";
        return false;
    }
    std::set<SymbolVec> unique;
    bool ok = true;
    for (const auto& cb : books) {
        const auto v = verify_codebook(cb, 4);
        ok = ok && v.ok;
        for (const auto& w : cb.words) unique.insert(w);
    }
    // the fixture is the same table the schemes use
    const auto& embedded = designed_tvc_codebooks();
    for (std::size_t i = 0; i < 4; ++i) ok = ok && books[i].words == embedded[i].words;
    os << "4 codebooks d_min=4, union " << unique.size();
    return ok && unique.size() == 56;
}

bool criterion6_complexity(std::ostream& os) {
    // block inner code, nu=0, k=4, N=960, Delta=21, delta=13
    const auto scheme = scheme_by_id("TVC-2");
    const std::size_t n_outer = 240;
    const auto fc = make_frame_code(scheme, n_outer, 7);
    const ChannelParams p{0.05, 0.05, 0, 4};
    Rng rng(106);
    std::vector<int> w(n_outer);
    for (auto& wi : w) wi = rng.symbol(16);
    const auto x = fc.code.encode(w, fc.offset_ptr());
    const auto y = transmit(x, p, rng);
    const DriftBounds bounds{-10, 10, 2};
    if (!bounds.contains(static_cast<long>(y.size()) - static_cast<long>(x.size()))) {
        os << "unlucky draw";
        return false;
    }
    const auto r =
        decode_single(y, fc.code, fc.offset_ptr(), AppMatrix::uniform(n_outer, 16), p, bounds);
    const auto formula = complexity_of(x.size(), 4, 0, 4, bounds, 1);
    const bool single_ok =
        r.edges_enumerated == formula.edges_single && formula.edges_single == 1048320ull;

    // tiny joint config, M = 2; scan seeds for reads inside the small bounds
    const auto code = tiny_code();
    std::vector<int> w2{0, 1};
    const auto x2 = code.encode(w2, nullptr);
    const ChannelParams p2{0.1, 0.1, 0, 2};
    const DriftBounds b2{-2, 2, 2};
    bool joint_ok = false;
    std::uint64_t counted = 0, predicted = 0;
    for (std::uint64_t seed = 107; seed < 137 && !joint_ok; ++seed) {
        Rng rng2(seed);
        std::vector<SymbolVec> reads{transmit(x2, p2, rng2), transmit(x2, p2, rng2)};
        bool in = true;
        for (const auto& yy : reads)
            in = in && b2.contains(static_cast<long>(yy.size()) - static_cast<long>(x2.size()));
        if (!in) continue;
        const auto rj = decode_joint(reads, code, nullptr, AppMatrix::uniform(2, 2), p2, b2);
        const auto fj = complexity_of(x2.size(), 2, 0, 1, b2, 2);
        counted = rj.edges_enumerated;
        predicted = fj.edges_joint;
        joint_ok = counted == predicted;
    }
    os << "C_single " << r.edges_enumerated << " == " << formula.edges_single << ", C_joint "
       << counted << " == " << predicted;
    return single_ok && joint_ok;
}

bool criterion7_kernel(std::ostream& os) {
    const auto scheme = scheme_by_id("CC-2");
    const ChannelParams params{0.04, 0.04, 0, 4};
    const std::size_t samples = 200000;  // > 1e5 to shrink the pool noise
    const auto pool =
        sim::build_app_pool(scheme, params, 1, sim::DecodeMode::single, 240, samples, 1007);
    Rng rng(107);
    const auto scores = polar::optimize_kernel(pool, gf::Field::of(4), samples, rng);
    double f1 = 0, f3 = 0, se1 = 0, se3 = 0;
    std::size_t rank1 = 0, rank3 = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i].alpha == 1) {
            f1 = scores[i].failure;
            se1 = scores[i].std_error;
            rank1 = i;
        }
        if (scores[i].alpha == 3) {
            f3 = scores[i].failure;
            se3 = scores[i].std_error;
            rank3 = i;
        }
    }
    os << "ratio1 " << f1 << " (ref 0.005475, 3se " << 3 * se1 << "), ratio3 " << f3
       << " (ref 0.001463, 3se " << 3 * se3 << ")";
    const bool values_ok =
        std::abs(f1 - 0.005475) <= 3 * se1 && std::abs(f3 - 0.001463) <= 3 * se3;
    return values_ok && rank3 < rank1;
}

bool criterion8_threshold(std::ostream& os) {
    const auto scheme = scheme_by_id("TVC-2");
    const auto& field = gf::Field::of(4);
    std::ifstream is(data_path("proto_designed.txt"));
    const auto designed = ldpc::load_protograph(is);
    auto sampler =
        sim::make_de_pool_sampler(scheme, 1, sim::DecodeMode::single, 240, 4, 0.0, 881);
    if (g_slow) {
        ldpc::DeBudget budget;  // full-scale estimate
        budget.population = 2000;
        budget.iterations = 100;
        budget.bisect_steps = 8;
        budget.pool_rows = 48000;
        budget.p_lo = 0.05;
        budget.p_hi = 0.25;
        Rng rng(108);
        const auto est = ldpc::estimate_threshold(designed, field, sampler, budget, rng);
        os << "designed p_th " << est.p_point << " in [" << est.p_lo << ", " << est.p_hi
           << "], target 0.142 +- 0.01";
        return est.stable && std::abs(est.p_point - 0.142) <= 0.01;
    }
    // reduced-budget fallback: ordering against the degree-regular baseline
    std::ifstream is2(data_path("proto_reg36.txt"));
    const auto regular = ldpc::load_protograph(is2);
    ldpc::DeBudget budget;
    budget.population = 600;
    budget.iterations = 60;
    budget.bisect_steps = 6;
    budget.pool_rows = 12000;
    budget.p_lo = 0.05;
    budget.p_hi = 0.25;
    Rng r1(108), r2(108);
    const auto e_designed = ldpc::estimate_threshold(designed, field, sampler, budget, r1);
    const auto e_regular = ldpc::estimate_threshold(regular, field, sampler, budget, r2);
    os << "designed p_th " << e_designed.p_point << " vs (3,6)-regular " << e_regular.p_point
       << " at matched budget";
    return e_designed.stable && e_regular.stable && e_designed.p_point > e_regular.p_point;
}

bool criterion9_fer_trends(std::ostream& os) {
    // short-sequence config: CC-1 inner, [64,32]_4 outer polar
    const auto scheme = scheme_by_id("CC-1");
    const auto& field = gf::Field::of(2);
    std::ifstream is(data_path("polar_frozen_n64_gf4_cc1.txt"));
    if (!is) {
        os << "frozen fixture missing";
        return false;
    }
    int qf = 0;
    auto spec = polar::load_frozen(is, &qf);
    spec.list_size = 32;
    const std::size_t n_outer = spec.n_outer;

    sim::ExperimentConfig cfg;  // bound-escalation knobs for decode_inner
    cfg.q_channel = 4;

    struct Arms {
        bool m1, m2sep, m2joint, m3, m5;
    };
    auto run_arm_frame = [&](double p, std::uint64_t fseed, int m_max) {
        Rng rng(fseed);
        const ChannelParams params{p, p, 0, 4};
        std::vector<int> info(spec.k_info);
        for (auto& u : info) u = rng.symbol(4);
        const auto w = polar::encode_polar(info, spec, field);
        const auto fc = make_frame_code(scheme, n_outer, fseed);
        const auto x = fc.code.encode(w, fc.offset_ptr());
        const auto rs = transmit_multi(x, params, m_max, rng);
        auto decode_arm = [&](std::size_t m, sim::DecodeMode mode) {
            std::vector<SymbolVec> reads(rs.reads.begin(),
                                         rs.reads.begin() + static_cast<long>(m));
            const auto id = sim::decode_inner(reads, fc, n_outer, AppMatrix::uniform(n_outer, 4),
                                              params, mode, cfg, x.size());
            if (id.erasure) return true;
            return polar::decode_scl(id.app, spec, field).info != info;
        };
        Arms a{};
        a.m1 = decode_arm(1, sim::DecodeMode::single);
        if (m_max >= 5) {
            a.m2sep = decode_arm(2, sim::DecodeMode::separate);
            a.m2joint = decode_arm(2, sim::DecodeMode::joint);
            a.m3 = decode_arm(3, sim::DecodeMode::separate);
            a.m5 = decode_arm(5, sim::DecodeMode::separate);
        }
        return a;
    };

    // scan for a p with mid-range FER(M=1)
    double p_star = 0;
    double fer_probe = 0;
    for (double p : {0.11, 0.12, 0.10, 0.13, 0.09}) {
        std::uint64_t errs = 0;
        const std::uint64_t probe = 60;
        for (std::uint64_t f = 0; f < probe; ++f)
            errs += run_arm_frame(p, derive_seed(991, f), 1).m1;
        fer_probe = static_cast<double>(errs) / static_cast<double>(probe);
        if (fer_probe >= 0.15 && fer_probe <= 0.8) {
            p_star = p;
            break;
        }
    }
    if (p_star == 0) {
        os << "no grid point with mid-range FER(M=1), last probe " << fer_probe;
        return false;
    }

    // paired frames until the M=1 arm has 100 errors
    std::uint64_t frames = 0, e1 = 0, e2s = 0, e2j = 0, e3 = 0, e5 = 0;
    std::uint64_t b_21 = 0, c_21 = 0;  // M=2 sep fails & M=1 ok vs the reverse
    std::uint64_t b_j2 = 0, c_j2 = 0;  // joint vs separate
    std::uint64_t b_32 = 0, c_32 = 0, b_53 = 0, c_53 = 0;
    std::vector<Arms> batch(16);
    while (e1 < 100 && frames < 4000) {
        const std::size_t bs = batch.size();
        sim::parallel_for_indexed(bs, [&](std::size_t b) {
            batch[b] = run_arm_frame(p_star, derive_seed(992, frames + b), 5);
        });
        for (const auto& a : batch) {
            ++frames;
            e1 += a.m1;
            e2s += a.m2sep;
            e2j += a.m2joint;
            e3 += a.m3;
            e5 += a.m5;
            if (a.m2sep && !a.m1) ++b_21;
            if (!a.m2sep && a.m1) ++c_21;
            if (a.m2joint && !a.m2sep) ++b_j2;
            if (!a.m2joint && a.m2sep) ++c_j2;
            if (a.m3 && !a.m2sep) ++b_32;
            if (!a.m3 && a.m2sep) ++c_32;
            if (a.m5 && !a.m3) ++b_53;
            if (!a.m5 && a.m3) ++c_53;
        }
    }
    const double fer1 = static_cast<double>(e1) / static_cast<double>(frames);
    os << "p*=" << p_star << " frames=" << frames << " FER: M1 " << fer1 << " M2sep "
       << static_cast<double>(e2s) / static_cast<double>(frames) << " M2joint "
       << static_cast<double>(e2j) / static_cast<double>(frames) << " M3 "
       << static_cast<double>(e3) / static_cast<double>(frames) << " M5 "
       << static_cast<double>(e5) / static_cast<double>(frames);
    bool ok = e1 >= 100 && fer1 >= 0.1 && fer1 <= 0.9;
    ok = ok && paired_strictly_better(b_21, c_21);  // M=2 separate < M=1
    ok = ok && paired_not_worse(b_j2, c_j2);        // joint <= separate
    ok = ok && paired_not_worse(b_32, c_32);        // monotone 2 -> 3
    ok = ok && paired_not_worse(b_53, c_53);        // monotone 3 -> 5
    return ok;
}

bool criterion10_air(std::ostream& os) {
    const auto scheme = scheme_by_id("TVC-2");
    const ChannelParams p0{0, 0, 0, 4};
    const auto bo0 = air::bcjr_once_rate(scheme, p0, 1, 240, air::CombineMode::separate, 4, 110);
    const auto mi0 = air::mutual_info_rate(scheme, p0, 1, 240, 4, 110);
    bool ok =
        std::abs(bo0.bits_per_use - 1.0) <= 0.001 && std::abs(mi0.bits_per_use - 1.0) <= 0.001;
    os << "p=0: bcjr " << bo0.bits_per_use << " mi " << mi0.bits_per_use;

    const double grid[] = {0.05, 0.10, 0.15, 0.20};
    double prev_bo = 2, prev_mi = 2, prev_bo_se = 0, prev_mi_se = 0;
    for (double p : grid) {
        const ChannelParams params{p, p, 0, 4};
        const auto bo =
            air::bcjr_once_rate(scheme, params, 1, 240, air::CombineMode::separate, 12, 111);
        const auto mi = air::mutual_info_rate(scheme, params, 1, 240, 12, 111);
        os << " | p=" << p << " bcjr " << bo.bits_per_use << " mi " << mi.bits_per_use;
        ok = ok && mi.bits_per_use >= bo.bits_per_use - 2 * (bo.std_error + mi.std_error);
        ok = ok && bo.bits_per_use <= prev_bo + 3 * (bo.std_error + prev_bo_se);
        ok = ok && mi.bits_per_use <= prev_mi + 3 * (mi.std_error + prev_mi_se);
        prev_bo = bo.bits_per_use;
        prev_mi = mi.bits_per_use;
        prev_bo_se = bo.std_error;
        prev_mi_se = mi.std_error;
    }
    return ok;
}

bool criterion11_determinism(std::ostream& os) {
#ifndef IDS_CLI_PATH
    os << "CLI path not wired";
    return false;
#else
    auto slurp = [](const char* path) {
        std::ifstream is(path);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    auto run = [&](const std::string& args, const char* out, const char* workers) {
        setenv("IDSC_WORKERS", workers, 1);
        const std::string cmd = std::string(IDS_CLI_PATH) + " " + args + " --out " + out;
        return std::system(cmd.c_str()) == 0;
    };
    const std::string fer_args =
        "fer --scheme TVC-2 --p 0.05,0.08 --M 2 --mode separate --n-outer 24 --frames 24 "
        "--seed 77";
    const std::string air_args =
        "air --scheme TVC-1 --p 0.05 --estimator mi --n-outer 32 --frames 4 --seed 78";
    bool ok = run(fer_args, "/tmp/idsc_fer_a.csv", "1") &&
              run(fer_args, "/tmp/idsc_fer_b.csv", "4") &&
              run(air_args, "/tmp/idsc_air_a.csv", "1") &&
              run(air_args, "/tmp/idsc_air_b.csv", "3");
    setenv("IDSC_WORKERS", "1", 1);
    if (!ok) {
        os << "CLI runs failed";
        return false;
    }
    const std::string fa = slurp("/tmp/idsc_fer_a.csv"), fb = slurp("/tmp/idsc_fer_b.csv");
    const std::string aa = slurp("/tmp/idsc_air_a.csv"), ab = slurp("/tmp/idsc_air_b.csv");
    os << "fer " << fa.size() << " bytes, air " << aa.size() << " bytes, serial == parallel";
    return !fa.empty() && fa == fb && !aa.empty() && aa == ab;
#endif
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--slow") g_slow = true;

    struct Criterion {
        int id;
        const char* name;
        std::function<bool(std::ostream&)> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "lattice oracle equivalence", criterion1_lattice},
        {2, "single-read APP oracle equivalence", criterion2_single},
        {3, "joint decoding oracle equivalence", criterion3_joint},
        {4, "memoryless separate/joint equality", criterion4_memoryless},
        {5, "designed TVC fixtures", criterion5_tvc_fixture},
        {6, "complexity instrumentation", criterion6_complexity},
        {7, "kernel failure-rate reproduction", criterion7_kernel},
        {8, "LDPC decoding threshold", criterion8_threshold},
        {9, "multi-read FER trends", criterion9_fer_trends},
        {10, "information-rate sanity", criterion10_air},
        {11, "deterministic CSV output", criterion11_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::ostringstream detail;
        bool pass = false;
        try {
            pass = c.run(detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << " ["
                  << detail.str() << "] (" << dt << " s)" << std::endl;
        if (!pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
