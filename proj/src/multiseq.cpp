#include "ids/multiseq.hpp"

#include <algorithm>
#include <cmath>

#include "trellis_detail.hpp"

namespace ids {

namespace {

using detail::LatticeCache;
using detail::SectionBlocks;

std::uint64_t upow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

struct JointEngine {
    const InnerCode& code;
    const OffsetSequence* offset;
    const ChannelParams& params;
    DriftBounds bounds;
    std::span<const SymbolVec> reads;
    std::size_t n_outer;

    std::size_t sections;
    int n, ns, ni, D, mu_max, m;
    std::size_t drift_states;  // D^M
    std::size_t states;        // ns * D^M
    std::vector<long> d_final;
    std::vector<double> priors;

    SectionBlocks blocks;
    std::vector<LatticeCache> caches;  // one per read

    JointEngine(std::span<const SymbolVec> rds, const InnerCode& c, const OffsetSequence* off,
                const AppMatrix& pri, const ChannelParams& p, const DriftBounds& b,
                double state_budget)
        : code(c), offset(off), params(p), bounds(b), reads(rds), n_outer(pri.rows()) {
        if (reads.empty()) throw std::invalid_argument("decode_joint: no reads");
        m = static_cast<int>(reads.size());
        sections = code.sections_for(n_outer);
        n = code.n();
        ns = code.num_states();
        ni = code.num_inputs();
        D = bounds.delta();
        mu_max = bounds.transitions(n) - 1;
        const double per_read = static_cast<double>(D) * bounds.transitions(n);
        if (std::pow(per_read, m) > state_budget)
            throw CapacityError("decode_joint: (Delta*delta)^M exceeds the state budget");
        drift_states = upow(static_cast<std::uint64_t>(D), m);
        states = static_cast<std::size_t>(ns) * drift_states;
        for (const auto& y : reads)
            d_final.push_back(static_cast<long>(y.size()) -
                              static_cast<long>(sections) * n);
        if (pri.q() != ni) throw std::invalid_argument("decode_joint: priors shape mismatch");
        priors.assign(n_outer * static_cast<std::size_t>(ni), 0.0);
        for (std::size_t i = 0; i < n_outer; ++i) {
            double s = 0;
            for (int a = 0; a < ni; ++a) s += pri.at(i, a);
            if (s <= 0) throw std::invalid_argument("decode_joint: prior row sums to zero");
            for (int a = 0; a < ni; ++a) priors[i * ni + a] = pri.at(i, a) / s;
        }
        caches.resize(static_cast<std::size_t>(m));
    }

    bool final_in_bounds() const {
        for (long d : d_final)
            if (!bounds.contains(d)) return false;
        return bounds.contains(0);
    }

    int num_inputs_at(std::size_t section) const { return section <= n_outer ? ni : 1; }
    double prior_at(std::size_t section, int w) const {
        return section <= n_outer ? priors[(section - 1) * ni + w] : (w == 0 ? 1.0 : 0.0);
    }

    std::size_t zero_drift_index() const {
        std::size_t idx = 0;
        for (int j = 0; j < m; ++j)
            idx = idx * static_cast<std::size_t>(D) + static_cast<std::size_t>(-bounds.d_min);
        return idx;
    }
    std::size_t final_drift_index() const {
        std::size_t idx = 0;
        for (int j = 0; j < m; ++j)
            idx = idx * static_cast<std::size_t>(D) +
                  static_cast<std::size_t>(d_final[static_cast<std::size_t>(j)] - bounds.d_min);
        return idx;
    }

    void setup_section(std::size_t i) {
        blocks.build(code, offset, i - 1);
        const long y_base = static_cast<long>(i - 1) * n;
        for (int j = 0; j < m; ++j) {
            const auto& y = reads[static_cast<std::size_t>(j)];
            caches[static_cast<std::size_t>(j)].reset(&blocks, y.data(), y.size(), y_base, mu_max,
                                                      bounds.d_min, bounds.d_max, &params);
        }
    }

    // candidate mu range for entry drift d
    void mu_range(int d, int& lo, int& hi) const {
        lo = std::max(0, bounds.d_min - d + n);
        hi = std::min(mu_max, bounds.d_max - d + n);
    }

    // Spreads prob * prod_j row_j[mu_j] over all destination drift vectors.
    // dest points at the first destination cell for the drifts decided so far.
    void scatter(int j, const std::vector<const double*>& rows, const int* dvec, double prob,
                 double* dest, std::size_t stride) {
        int lo, hi;
        mu_range(dvec[j], lo, hi);
        const double* row = rows[static_cast<std::size_t>(j)];
        const std::size_t sub_stride = stride / static_cast<std::size_t>(D);
        double* base = dest + static_cast<std::size_t>(dvec[j] - n + lo - bounds.d_min) * stride;
        if (j == m - 1) {
            for (int mu = lo; mu <= hi; ++mu) base[static_cast<std::size_t>(mu - lo) * stride] += prob * row[mu];
            return;
        }
        for (int mu = lo; mu <= hi; ++mu) {
            if (row[mu] != 0.0)
                scatter(j + 1, rows, dvec, prob * row[mu],
                        base + static_cast<std::size_t>(mu - lo) * stride, sub_stride);
        }
    }

    // sum over destinations of prod_j row_j[mu_j] * beta[dest]
    double gather(int j, const std::vector<const double*>& rows, const int* dvec,
                  const double* beta, std::size_t stride) const {
        int lo, hi;
        mu_range(dvec[j], lo, hi);
        const double* row = rows[static_cast<std::size_t>(j)];
        const std::size_t sub_stride = stride / static_cast<std::size_t>(D);
        const double* base = beta + static_cast<std::size_t>(dvec[j] - n + lo - bounds.d_min) * stride;
        double acc = 0;
        if (j == m - 1) {
            for (int mu = lo; mu <= hi; ++mu) acc += row[mu] * base[static_cast<std::size_t>(mu - lo) * stride];
            return acc;
        }
        for (int mu = lo; mu <= hi; ++mu) {
            if (row[mu] != 0.0)
                acc += row[mu] * gather(j + 1, rows, dvec, base + static_cast<std::size_t>(mu - lo) * stride,
                                        sub_stride);
        }
        return acc;
    }

    bool next_dvec(int* dvec) const {  // odometer over [d_min, d_max]^M
        for (int j = m - 1; j >= 0; --j) {
            if (dvec[j] < bounds.d_max) {
                ++dvec[j];
                for (int l = j + 1; l < m; ++l) dvec[l] = bounds.d_min;
                return true;
            }
        }
        return false;
    }
};

struct JointForwardPass {
    std::vector<double> alpha;
    std::vector<double> log_scale;
    bool dead = false;
    std::uint64_t edges_enumerated = 0;
    std::uint64_t edges_active = 0;
};

template <typename AllowedFn>
void run_joint_forward(JointEngine& e, JointForwardPass& fp, AllowedFn&& allowed) {
    fp.alpha.assign((e.sections + 1) * e.states, 0.0);
    fp.log_scale.assign(e.sections + 1, 0.0);
    fp.alpha[e.zero_drift_index()] = 1.0;

    const std::uint64_t delta_per =
        upow(static_cast<std::uint64_t>(e.bounds.transitions(e.n)), e.m);
    std::vector<const double*> rows(static_cast<std::size_t>(e.m));
    std::vector<int> dvec(static_cast<std::size_t>(e.m));
    const std::size_t top_stride = e.drift_states / static_cast<std::size_t>(e.D);

    for (std::size_t i = 1; i <= e.sections && !fp.dead; ++i) {
        e.setup_section(i);
        const long y_base = static_cast<long>(i - 1) * e.n;
        double* a_prev = fp.alpha.data() + (i - 1) * e.states;
        double* a_cur = fp.alpha.data() + i * e.states;

        const int wn = e.num_inputs_at(i);
        fp.edges_enumerated += static_cast<std::uint64_t>(e.ns) *
                               static_cast<std::uint64_t>(e.drift_states) *
                               static_cast<std::uint64_t>(wn) * delta_per;
        // active candidates factor over reads
        std::uint64_t active = 1;
        for (int j = 0; j < e.m; ++j) {
            std::uint64_t sj = 0;
            for (int d = e.bounds.d_min; d <= e.bounds.d_max; ++d) {
                int lo, hi;
                e.mu_range(d, lo, hi);
                const long start = y_base + d;
                if (start < 0) continue;
                const int av = static_cast<int>(std::min<long>(
                    hi, static_cast<long>(e.reads[static_cast<std::size_t>(j)].size()) - start));
                if (av >= lo) sj += static_cast<std::uint64_t>(av - lo + 1);
            }
            active *= sj;
        }
        fp.edges_active += active * static_cast<std::uint64_t>(e.ns) * static_cast<std::uint64_t>(wn);

        std::fill(dvec.begin(), dvec.end(), e.bounds.d_min);
        std::size_t jd = 0;
        do {
            for (int s = 0; s < e.ns; ++s) {
                const double a = a_prev[static_cast<std::size_t>(s) * e.drift_states + jd];
                if (a == 0.0) continue;
                for (int w = 0; w < wn; ++w) {
                    if (!allowed(i, w)) continue;
                    const double pw = e.prior_at(i, w) * a;
                    if (pw == 0.0) continue;
                    bool ok = true;
                    const int bid = e.blocks.block_of[static_cast<std::size_t>(s) * e.ni + w];
                    for (int j = 0; j < e.m && ok; ++j) {
                        rows[static_cast<std::size_t>(j)] =
                            e.caches[static_cast<std::size_t>(j)].row(bid, dvec[static_cast<std::size_t>(j)]);
                        ok = rows[static_cast<std::size_t>(j)] != nullptr;
                    }
                    if (!ok) continue;
                    double* dest = a_cur + static_cast<std::size_t>(e.code.next_state(s, w)) *
                                               e.drift_states;
                    e.scatter(0, rows, dvec.data(), pw, dest, top_stride);
                }
            }
            ++jd;
        } while (e.next_dvec(dvec.data()));

        double sum = 0;
        for (std::size_t x = 0; x < e.states; ++x) sum += a_cur[x];
        if (sum <= 0.0 || !std::isfinite(sum)) {
            fp.dead = true;
            return;
        }
        for (std::size_t x = 0; x < e.states; ++x) a_cur[x] /= sum;
        fp.log_scale[i] = fp.log_scale[i - 1] + std::log(sum);
    }
}

DecodeResult joint_erasure(std::size_t sections, int q) {
    DecodeResult r;
    r.app = AppMatrix::uniform(sections, q);
    r.erasure = true;
    return r;
}

}  // namespace

DecodeResult decode_joint(std::span<const SymbolVec> reads, const InnerCode& code,
                          const OffsetSequence* offset, const AppMatrix& priors,
                          const ChannelParams& params, const DriftBounds& bounds,
                          double state_budget) {
    params.validate();
    JointEngine e(reads, code, offset, priors, params, bounds, state_budget);
    if (!e.final_in_bounds()) return joint_erasure(e.sections, e.ni);

    JointForwardPass fp;
    run_joint_forward(e, fp, [](std::size_t, int) { return true; });
    DecodeResult res;
    res.edges_enumerated = fp.edges_enumerated;
    res.edges_active = fp.edges_active;
    const std::size_t final_idx = e.final_drift_index();
    const double a_fin = fp.dead ? 0.0 : fp.alpha[e.sections * e.states + final_idx];
    if (a_fin <= 0.0) {
        DecodeResult r = joint_erasure(e.sections, e.ni);
        r.edges_enumerated = res.edges_enumerated;
        r.edges_active = res.edges_active;
        return r;
    }
    res.log_py = std::log(a_fin) + fp.log_scale[e.sections];

    res.app = AppMatrix(e.sections, e.ni);
    std::vector<double> beta(e.states, 0.0), beta_prev(e.states);
    beta[final_idx] = 1.0;
    double log_scale_b = 0.0;
    std::vector<const double*> rows(static_cast<std::size_t>(e.m));
    std::vector<int> dvec(static_cast<std::size_t>(e.m));
    const std::size_t top_stride = e.drift_states / static_cast<std::size_t>(e.D);

    for (std::size_t i = e.sections; i >= 1; --i) {
        e.setup_section(i);
        const double* a_prev = fp.alpha.data() + (i - 1) * e.states;
        double* app_row = res.app.row(i - 1);
        std::fill(beta_prev.begin(), beta_prev.end(), 0.0);

        const int wn = e.num_inputs_at(i);
        std::fill(dvec.begin(), dvec.end(), e.bounds.d_min);
        std::size_t jd = 0;
        do {
            for (int s = 0; s < e.ns; ++s) {
                const std::size_t si = static_cast<std::size_t>(s) * e.drift_states + jd;
                for (int w = 0; w < wn; ++w) {
                    const double pw = e.prior_at(i, w);
                    if (pw == 0.0) continue;
                    bool ok = true;
                    const int bid = e.blocks.block_of[static_cast<std::size_t>(s) * e.ni + w];
                    for (int j = 0; j < e.m && ok; ++j) {
                        rows[static_cast<std::size_t>(j)] =
                            e.caches[static_cast<std::size_t>(j)].row(bid, dvec[static_cast<std::size_t>(j)]);
                        ok = rows[static_cast<std::size_t>(j)] != nullptr;
                    }
                    if (!ok) continue;
                    const double* b_next = beta.data() + static_cast<std::size_t>(e.code.next_state(s, w)) *
                                                             e.drift_states;
                    const double acc = e.gather(0, rows, dvec.data(), b_next, top_stride);
                    beta_prev[si] += pw * acc;
                    const double a = a_prev[si];
                    if (a != 0.0) app_row[w] += a * pw * acc;
                }
            }
            ++jd;
        } while (e.next_dvec(dvec.data()));

        double s_app = 0;
        for (int w = 0; w < e.ni; ++w) s_app += app_row[w];
        if (s_app > 0)
            for (int w = 0; w < e.ni; ++w) app_row[w] /= s_app;
        else
            for (int w = 0; w < e.ni; ++w) app_row[w] = 1.0 / e.ni;

        double s_b = 0;
        for (std::size_t x = 0; x < e.states; ++x) s_b += beta_prev[x];
        if (s_b <= 0.0) {
            DecodeResult r = joint_erasure(e.sections, e.ni);
            r.edges_enumerated = res.edges_enumerated;
            r.edges_active = res.edges_active;
            return r;
        }
        for (std::size_t x = 0; x < e.states; ++x) beta_prev[x] /= s_b;
        log_scale_b += std::log(s_b);
        std::swap(beta, beta_prev);
    }
    if (beta[e.zero_drift_index()] > 0.0)
        res.log_py_backward = std::log(beta[e.zero_drift_index()]) + log_scale_b;
    return res;
}

ForwardLogProbs joint_forward_log_probs(std::span<const SymbolVec> reads, const InnerCode& code,
                                        const OffsetSequence* offset, std::span<const int> w_true,
                                        const ChannelParams& params, const DriftBounds& bounds,
                                        double state_budget) {
    params.validate();
    ForwardLogProbs out;
    const AppMatrix uni = AppMatrix::uniform(w_true.size(), code.num_inputs());
    JointEngine e(reads, code, offset, uni, params, bounds, state_budget);
    if (!e.final_in_bounds()) return out;
    const std::size_t final_idx = e.final_drift_index();

    JointForwardPass fp;
    run_joint_forward(e, fp, [](std::size_t, int) { return true; });
    if (fp.dead || fp.alpha[e.sections * e.states + final_idx] <= 0.0) return out;
    out.log_py = std::log(fp.alpha[e.sections * e.states + final_idx]) + fp.log_scale[e.sections];

    JointForwardPass fc;
    run_joint_forward(e, fc, [&](std::size_t i, int w) {
        return i > w_true.size() || w == w_true[i - 1];
    });
    if (fc.dead || fc.alpha[e.sections * e.states + final_idx] <= 0.0) return out;
    out.log_pwy = std::log(fc.alpha[e.sections * e.states + final_idx]) + fc.log_scale[e.sections];
    out.ok = true;
    return out;
}

AppMatrix combine_separate(std::span<const AppMatrix> apps, const AppMatrix& priors,
                           std::size_t* collapsed_rows) {
    if (apps.empty()) throw std::invalid_argument("combine_separate: no matrices");
    const std::size_t rows = apps[0].rows();
    const int q = apps[0].q();
    for (const auto& a : apps)
        if (a.rows() != rows || a.q() != q)
            throw std::invalid_argument("combine_separate: shape mismatch");
    if (priors.rows() < rows && priors.rows() != rows)
        throw std::invalid_argument("combine_separate: priors shape mismatch");
    const std::size_t m = apps.size();
    if (collapsed_rows) *collapsed_rows = 0;

    AppMatrix out(rows, q);
    for (std::size_t i = 0; i < rows; ++i) {
        double sum = 0;
        for (int a = 0; a < q; ++a) {
            const double prior = priors.at(i, a);
            if (prior <= 0.0) throw std::invalid_argument("combine_separate: nonpositive prior");
            double v = 1.0;
            for (const auto& app : apps) v *= app.at(i, a);
            for (std::size_t j = 0; j + 1 < m; ++j) v /= prior;
            out.at(i, a) = v;
            sum += v;
        }
        if (sum > 0) {
            for (int a = 0; a < q; ++a) out.at(i, a) /= sum;
        } else {
            for (int a = 0; a < q; ++a) out.at(i, a) = 1.0 / q;
            if (collapsed_rows) ++*collapsed_rows;
        }
    }
    return out;
}

ComplexityReport complexity_of(std::size_t n_channel, int n, int nu, int k,
                               const DriftBounds& bounds, int m_reads) {
    ComplexityReport r;
    r.sections = n_channel / static_cast<std::size_t>(n);
    r.delta = bounds.delta();
    r.transitions = bounds.transitions(n);
    r.nu = nu;
    r.k = k;
    r.m_reads = m_reads;
    const std::uint64_t per_section = 1ull << (nu + k);
    r.edges_single = r.sections * per_section * static_cast<std::uint64_t>(r.delta) *
                     static_cast<std::uint64_t>(r.transitions);
    r.edges_separate = static_cast<std::uint64_t>(m_reads) * r.edges_single;
    r.edges_joint = r.sections * per_section *
                    upow(static_cast<std::uint64_t>(r.delta) * static_cast<std::uint64_t>(r.transitions),
                         m_reads);
    return r;
}

}  // namespace ids
