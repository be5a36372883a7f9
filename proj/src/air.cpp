#include "ids/air.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ids/multiseq.hpp"

#include "trellis_detail.hpp"
#include "ids/trellis.hpp"

namespace ids::air {

namespace {

constexpr double kLog2e = 1.4426950408889634;

struct Welford {
    std::size_t n = 0;
    double mean = 0, m2 = 0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double std_error() const {
        if (n < 2) return 0.0;
        return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
};

struct FramePrep {
    FrameCode fc;
    std::vector<int> w;
    ReadSet rs;
    DriftBounds bounds;
};

// per-frame transmit with 5/10 sigma escalation; nullopt on erasure
std::optional<FramePrep> frame_reads(const Scheme& scheme, const ChannelParams& params,
                                     int m_reads, std::size_t n_outer, const AirOptions& opt,
                                     Rng& rng, std::uint64_t frame_seed) {
    const int q_o = scheme.q_outer();
    std::vector<int> w(n_outer);
    for (auto& wi : w) wi = rng.symbol(q_o);
    FramePrep prep{make_frame_code(scheme, n_outer, frame_seed), std::move(w), {}, {}};
    const SymbolVec x = prep.fc.code.encode(prep.w, prep.fc.offset_ptr());
    prep.rs = transmit_multi(x, params, m_reads, rng);

    prep.bounds = DriftBounds::dynamic(x.size(), params, opt.sigma_mult, opt.i_max);
    auto all_in = [&](const DriftBounds& b) {
        for (const auto& y : prep.rs.reads) {
            const long d = static_cast<long>(y.size()) - static_cast<long>(x.size());
            if (!b.contains(d)) return false;
        }
        return true;
    };
    if (!all_in(prep.bounds)) {
        prep.bounds = DriftBounds::dynamic(x.size(), params, opt.sigma_escalated, opt.i_max);
        if (!all_in(prep.bounds)) return std::nullopt;
    }
    return prep;
}

}  // namespace

RateEstimate bcjr_once_rate(const Scheme& scheme, const ChannelParams& params, int m_reads,
                            std::size_t n_outer, CombineMode mode, std::size_t frames,
                            std::uint64_t seed, const AirOptions& opt) {
    RateEstimate est;
    est.estimator = mode == CombineMode::separate ? "bcjr-once" : "bcjr-once-joint";
    const int q_o = scheme.q_outer();
    Welford acc;

    for (std::size_t f = 0; f < frames; ++f) {
        const std::uint64_t fseed = derive_seed(seed, f);
        Rng rng(fseed);
        auto prep = frame_reads(scheme, params, m_reads, n_outer, opt, rng, fseed);
        if (!prep) {
            ++est.erasures;
            continue;
        }
        const auto& fc = prep->fc;
        const auto& w = prep->w;
        const auto& rs = prep->rs;
        const auto& bounds = prep->bounds;
        const std::size_t sections = fc.code.sections_for(n_outer);
        const AppMatrix priors = AppMatrix::uniform(n_outer, q_o);

        // mismatched log-likelihood ratios per section
        std::vector<double> llr(sections * static_cast<std::size_t>(q_o), 0.0);
        bool erased = false;
        if (mode == CombineMode::separate) {
            for (const auto& y : rs.reads) {
                const auto r = decode_single(y, fc.code, fc.offset_ptr(), priors, params, bounds);
                if (r.erasure) {
                    erased = true;
                    break;
                }
                for (std::size_t i = 0; i < sections; ++i) {
                    const double l0 = std::log(std::max(r.app.at(i, 0), 1e-300));
                    for (int a = 0; a < q_o; ++a)
                        llr[i * static_cast<std::size_t>(q_o) + a] +=
                            std::log(std::max(r.app.at(i, a), 1e-300)) - l0;
                }
            }
        } else {
            const auto r = decode_joint(rs.reads, fc.code, fc.offset_ptr(), priors, params,
                                        bounds, opt.joint_budget);
            if (r.erasure) erased = true;
            if (!erased) {
                for (std::size_t i = 0; i < sections; ++i) {
                    const double l0 = std::log(std::max(r.app.at(i, 0), 1e-300));
                    for (int a = 0; a < q_o; ++a)
                        llr[i * static_cast<std::size_t>(q_o) + a] =
                            std::log(std::max(r.app.at(i, a), 1e-300)) - l0;
                }
            }
        }
        if (erased) {
            ++est.erasures;
            continue;
        }

        double corr = 0;  // sum_i log2 softmax(L_i)(w_i)
        for (std::size_t i = 0; i < sections; ++i) {
            const double* li = llr.data() + i * static_cast<std::size_t>(q_o);
            const int wi = i < n_outer ? w[i] : 0;
            double lmax = li[0];
            for (int a = 1; a < q_o; ++a) lmax = std::max(lmax, li[a]);
            double z = 0;
            for (int a = 0; a < q_o; ++a) z += std::exp(li[a] - lmax);
            corr += (li[wi] - lmax - std::log(z)) * kLog2e;
        }
        const std::size_t uses = sections * static_cast<std::size_t>(fc.code.n());
        est.channel_uses = uses;
        acc.add((static_cast<double>(sections) * std::log2(q_o) + corr) /
                static_cast<double>(uses));
    }
    est.frames = acc.n;
    est.bits_per_use = acc.mean;
    est.std_error = acc.std_error();
    return est;
}

RateEstimate mutual_info_rate(const Scheme& scheme, const ChannelParams& params, int m_reads,
                              std::size_t n_outer, std::size_t frames, std::uint64_t seed,
                              const AirOptions& opt) {
    RateEstimate est;
    est.estimator = "mi";
    const int q_o = scheme.q_outer();
    Welford acc;

    for (std::size_t f = 0; f < frames; ++f) {
        const std::uint64_t fseed = derive_seed(seed, f);
        Rng rng(fseed);
        auto prep = frame_reads(scheme, params, m_reads, n_outer, opt, rng, fseed);
        if (!prep) {
            ++est.erasures;
            continue;
        }
        const auto& fc = prep->fc;
        const auto& w = prep->w;
        const auto& rs = prep->rs;
        const auto& bounds = prep->bounds;
        ForwardLogProbs lp;
        if (m_reads == 1) {
            lp = forward_log_probs(rs.reads[0], fc.code, fc.offset_ptr(), w, params, bounds);
        } else {
            lp = joint_forward_log_probs(rs.reads, fc.code, fc.offset_ptr(), w, params, bounds,
                                         opt.joint_budget);
        }
        if (!lp.ok) {
            ++est.erasures;
            continue;
        }
        const std::size_t sections = fc.code.sections_for(n_outer);
        const std::size_t uses = sections * static_cast<std::size_t>(fc.code.n());
        est.channel_uses = uses;
        acc.add((static_cast<double>(sections) * std::log2(q_o) +
                 (lp.log_pwy - lp.log_py) * kLog2e) /
                static_cast<double>(uses));
    }
    est.frames = acc.n;
    est.bits_per_use = acc.mean;
    est.std_error = acc.std_error();
    return est;
}

// ---------------------------------------------------------------------------
// uncoded estimators on the full lattice

double full_lattice_log2(std::span<const Symbol> x, std::span<const Symbol> y,
                         const ChannelParams& p) {
    const std::size_t n = x.size(), np = y.size();
    const double ins_w = p.p_ins / p.q;
    std::vector<double> prev(np + 1, 0.0), cur(np + 1, 0.0);
    double log2_scale = 0;
    prev[0] = 1.0;
    for (std::size_t l = 1; l <= np; ++l) prev[l] = ins_w * prev[l - 1];
    for (std::size_t r = 1; r <= n; ++r) {
        const bool last = r == n;
        cur[0] = p.p_del * prev[0];
        for (std::size_t l = 1; l <= np; ++l) {
            double v = p.p_del * prev[l] + detail::q_metric(y[l - 1], x[r - 1], p) * prev[l - 1];
            if (!last) v += ins_w * cur[l - 1];
            cur[l] = v;
        }
        double mx = 0;
        for (double v : cur) mx = std::max(mx, v);
        if (mx <= 0) return -std::numeric_limits<double>::infinity();
        for (auto& v : cur) v /= mx;
        log2_scale += std::log2(mx);
        std::swap(prev, cur);
    }
    return prev[np] > 0 ? log2_scale + std::log2(prev[np])
                        : -std::numeric_limits<double>::infinity();
}

double averaged_lattice_log2(std::size_t n, std::span<const Symbol> y, const ChannelParams& p) {
    const std::size_t np = y.size();
    const double ins_w = p.p_ins / p.q;
    const double diag = p.p_trans() / p.q;  // E_x Q(y, x), independent of y
    std::vector<double> prev(np + 1, 0.0), cur(np + 1, 0.0);
    double log2_scale = 0;
    prev[0] = 1.0;
    for (std::size_t l = 1; l <= np; ++l) prev[l] = ins_w * prev[l - 1];
    for (std::size_t r = 1; r <= n; ++r) {
        const bool last = r == n;
        cur[0] = p.p_del * prev[0];
        for (std::size_t l = 1; l <= np; ++l) {
            double v = p.p_del * prev[l] + diag * prev[l - 1];
            if (!last) v += ins_w * cur[l - 1];
            cur[l] = v;
        }
        double mx = 0;
        for (double v : cur) mx = std::max(mx, v);
        if (mx <= 0) return -std::numeric_limits<double>::infinity();
        for (auto& v : cur) v /= mx;
        log2_scale += std::log2(mx);
        std::swap(prev, cur);
    }
    return prev[np] > 0 ? log2_scale + std::log2(prev[np])
                        : -std::numeric_limits<double>::infinity();
}

double averaged_lattice2_log2(std::size_t n, std::span<const Symbol> y1,
                              std::span<const Symbol> y2, const ChannelParams& p) {
    const std::size_t n1 = y1.size(), n2 = y2.size();
    if ((n + 1) * (n1 + 1) * (n2 + 1) > 50'000'000)
        throw std::invalid_argument("averaged_lattice2: instance too large");
    const double ins_w = p.p_ins / p.q;
    const int q = p.q;

    auto avg_tt = [&](Symbol a, Symbol b) {  // E_x Q(y1,x) Q(y2,x)
        double s = 0;
        for (int x = 0; x < q; ++x)
            s += detail::q_metric(a, static_cast<Symbol>(x), p) * detail::q_metric(b, static_cast<Symbol>(x), p);
        return s / q;
    };
    const double avg_t = p.p_trans() / q;

    const std::size_t w = n2 + 1;
    std::vector<double> cur((n1 + 1) * w, 0.0), next((n1 + 1) * w, 0.0);
    cur[0] = 1.0;
    double log2_scale = 0;
    for (std::size_t r = 0; r < n; ++r) {
        // insertion stages: geometric accumulation along each read
        for (std::size_t l1 = 1; l1 <= n1; ++l1)
            for (std::size_t l2 = 0; l2 <= n2; ++l2) cur[l1 * w + l2] += ins_w * cur[(l1 - 1) * w + l2];
        for (std::size_t l1 = 0; l1 <= n1; ++l1)
            for (std::size_t l2 = 1; l2 <= n2; ++l2) cur[l1 * w + l2] += ins_w * cur[l1 * w + l2 - 1];
        // advance: each read deletes or consumes one symbol, averaged over x
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t l1 = 0; l1 <= n1; ++l1) {
            for (std::size_t l2 = 0; l2 <= n2; ++l2) {
                const double v = cur[l1 * w + l2];
                if (v == 0.0) continue;
                next[l1 * w + l2] += v * p.p_del * p.p_del;
                if (l1 < n1) next[(l1 + 1) * w + l2] += v * p.p_del * avg_t;
                if (l2 < n2) next[l1 * w + l2 + 1] += v * p.p_del * avg_t;
                if (l1 < n1 && l2 < n2)
                    next[(l1 + 1) * w + l2 + 1] += v * avg_tt(y1[l1], y2[l2]);
            }
        }
        double mx = 0;
        for (double v : next) mx = std::max(mx, v);
        if (mx <= 0) return -std::numeric_limits<double>::infinity();
        for (auto& v : next) v /= mx;
        log2_scale += std::log2(mx);
        std::swap(cur, next);
    }
    const double v = cur[n1 * w + n2];
    return v > 0 ? log2_scale + std::log2(v) : -std::numeric_limits<double>::infinity();
}

RateEstimate uncoded_mi_rate(const ChannelParams& params, int m_reads, std::size_t n_channel,
                             std::size_t frames, std::uint64_t seed) {
    params.validate();
    if (m_reads < 1 || m_reads > 2)
        throw std::invalid_argument("uncoded_mi_rate: exact evaluation supports M <= 2");
    RateEstimate est;
    est.estimator = "uncoded-mi";
    est.channel_uses = n_channel;
    const double lq = std::log2(params.q);
    Welford acc;
    for (std::size_t f = 0; f < frames; ++f) {
        Rng rng(derive_seed(seed, f));
        SymbolVec x(n_channel);
        for (auto& s : x) s = static_cast<Symbol>(rng.symbol(params.q));
        const ReadSet rs = transmit_multi(x, params, m_reads, rng);

        double log2_pxy = -static_cast<double>(n_channel) * lq;
        for (const auto& y : rs.reads) log2_pxy += full_lattice_log2(x, y, params);
        const double log2_py =
            m_reads == 1 ? averaged_lattice_log2(n_channel, rs.reads[0], params)
                         : averaged_lattice2_log2(n_channel, rs.reads[0], rs.reads[1], params);
        acc.add((static_cast<double>(n_channel) * lq + log2_pxy - log2_py) /
                static_cast<double>(n_channel));
    }
    est.frames = acc.n;
    est.bits_per_use = acc.mean;
    est.std_error = acc.std_error();
    return est;
}

}  // namespace ids::air
