#include "ids/trellis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trellis_detail.hpp"

namespace ids {

namespace detail {

void lattice_last_row(const Symbol* x, int n, const Symbol* ys, int avail_mu, int mu_max,
                      const ChannelParams& p, double* out) {
    const int hi = std::min(mu_max, avail_mu);
    std::fill(out, out + mu_max + 1, 0.0);
    if (hi < 0) return;

    const double ins_w = p.p_ins / static_cast<double>(p.q);
    const double del_w = p.p_del;

    std::vector<double> prev(static_cast<std::size_t>(hi) + 1), cur(static_cast<std::size_t>(hi) + 1);
    prev[0] = 1.0;
    for (int l = 1; l <= hi; ++l) prev[static_cast<std::size_t>(l)] = ins_w * prev[static_cast<std::size_t>(l - 1)];
    for (int r = 1; r < n; ++r) {
        cur[0] = del_w * prev[0];
        for (int l = 1; l <= hi; ++l) {
            cur[static_cast<std::size_t>(l)] = ins_w * cur[static_cast<std::size_t>(l - 1)] +
                                               del_w * prev[static_cast<std::size_t>(l)] +
                                               q_metric(ys[l - 1], x[r - 1], p) * prev[static_cast<std::size_t>(l - 1)];
        }
        std::swap(prev, cur);
    }
    // last row: the HMM allows no insertions after the final block symbol
    out[0] = del_w * prev[0];
    for (int l = 1; l <= hi; ++l)
        out[l] = del_w * prev[static_cast<std::size_t>(l)] +
                 q_metric(ys[l - 1], x[n - 1], p) * prev[static_cast<std::size_t>(l - 1)];
}

void SectionBlocks::build(const InnerCode& code, const OffsetSequence* offset,
                          std::size_t section) {
    n = code.n();
    const int ns = code.num_states(), ni = code.num_inputs();
    block_of.assign(static_cast<std::size_t>(ns) * ni, -1);
    symbols.clear();
    seen_.clear();
    num_blocks = 0;
    Symbol buf[16];
    for (int s = 0; s < ns; ++s) {
        for (int w = 0; w < ni; ++w) {
            code.emit(s, w, section, buf);
            if (offset) {
                const Symbol* off = offset->symbols.data() + section * static_cast<std::size_t>(n);
                for (int i = 0; i < n; ++i)
                    buf[i] = static_cast<Symbol>((buf[i] + off[i]) % code.q());
            }
            std::uint64_t key = 0;
            for (int i = 0; i < n; ++i) key = key << 8 | buf[i];
            auto [it, inserted] = seen_.try_emplace(key, num_blocks);
            if (inserted) {
                symbols.insert(symbols.end(), buf, buf + n);
                ++num_blocks;
            }
            block_of[static_cast<std::size_t>(s) * ni + w] = it->second;
        }
    }
}

void LatticeCache::reset(const SectionBlocks* blocks, const Symbol* y, std::size_t y_len,
                         long y_base, int mu_max, int d_min, int d_max,
                         const ChannelParams* params) {
    blocks_ = blocks;
    y_ = y;
    y_len_ = y_len;
    y_base_ = y_base;
    mu_max_ = mu_max;
    d_min_ = d_min;
    d_max_ = d_max;
    params_ = params;
    const std::size_t cells = static_cast<std::size_t>(blocks->num_blocks) *
                              static_cast<std::size_t>(d_max - d_min + 1);
    rows_.assign(cells * static_cast<std::size_t>(mu_max + 1), 0.0);
    state_.assign(cells, 0);
}

const double* LatticeCache::row(int block, int d) {
    const std::size_t cell = static_cast<std::size_t>(block) *
                                 static_cast<std::size_t>(d_max_ - d_min_ + 1) +
                             static_cast<std::size_t>(d - d_min_);
    double* out = rows_.data() + cell * static_cast<std::size_t>(mu_max_ + 1);
    if (state_[cell] == 1) return out;
    if (state_[cell] == 2) return nullptr;
    const long start = y_base_ + d;
    if (start < 0) {
        state_[cell] = 2;
        return nullptr;
    }
    const int avail = static_cast<int>(std::min<long>(mu_max_, static_cast<long>(y_len_) - start));
    lattice_last_row(blocks_->symbols.data() + static_cast<std::size_t>(block) * blocks_->n,
                     blocks_->n, y_ + start, avail, mu_max_, *params_, out);
    state_[cell] = 1;
    return out;
}

}  // namespace detail

DriftBounds DriftBounds::dynamic(std::size_t n_channel, const ChannelParams& params,
                                 double sigma_mult, int i_max) {
    DriftBounds b;
    b.i_max = i_max;
    const double var = static_cast<double>(n_channel) * params.p_del / (1.0 - params.p_del);
    b.d_max = static_cast<int>(std::ceil(sigma_mult * std::sqrt(var)));
    b.d_min = -b.d_max;
    return b;
}

double lattice_forward(std::span<const Symbol> x_block, std::span<const Symbol> y_segment,
                       const ChannelParams& params, int i_max) {
    params.validate();
    const int n = static_cast<int>(x_block.size());
    const int mu = static_cast<int>(y_segment.size());
    if (n < 1) throw std::invalid_argument("lattice_forward: empty block");
    if (mu > n * (i_max + 1)) throw std::invalid_argument("lattice_forward: mu out of range");
    std::vector<double> out(static_cast<std::size_t>(mu) + 1);
    detail::lattice_last_row(x_block.data(), n, y_segment.data(), mu, mu, params, out.data());
    return out[static_cast<std::size_t>(mu)];
}

namespace {

using detail::LatticeCache;
using detail::SectionBlocks;

struct SingleEngine {
    const InnerCode& code;
    const OffsetSequence* offset;
    const ChannelParams& params;
    DriftBounds bounds;
    std::span<const Symbol> y;
    std::size_t n_outer;

    std::size_t sections;
    int n, ns, ni, D, mu_max;
    long d_final;
    std::size_t states;

    // normalized priors per info section; termination sections are implicit
    std::vector<double> priors;

    SingleEngine(std::span<const Symbol> yy, const InnerCode& c, const OffsetSequence* off,
                 const AppMatrix& pri, const ChannelParams& p, const DriftBounds& b,
                 std::size_t n_out)
        : code(c), offset(off), params(p), bounds(b), y(yy), n_outer(n_out) {
        sections = code.sections_for(n_outer);
        n = code.n();
        ns = code.num_states();
        ni = code.num_inputs();
        D = bounds.delta();
        mu_max = bounds.transitions(n) - 1;  // n (i_max + 1)
        d_final = static_cast<long>(y.size()) - static_cast<long>(sections) * n;
        states = static_cast<std::size_t>(ns) * static_cast<std::size_t>(D);
        if (pri.rows() < n_outer || pri.q() != ni)
            throw std::invalid_argument("decode: priors shape mismatch");
        priors.assign(n_outer * static_cast<std::size_t>(ni), 0.0);
        for (std::size_t i = 0; i < n_outer; ++i) {
            double s = 0;
            for (int a = 0; a < ni; ++a) s += pri.at(i, a);
            if (s <= 0) throw std::invalid_argument("decode: prior row sums to zero");
            for (int a = 0; a < ni; ++a) priors[i * ni + a] = pri.at(i, a) / s;
        }
        if (offset && offset->symbols.size() < sections * static_cast<std::size_t>(n))
            throw std::invalid_argument("decode: offset shorter than codeword");
    }

    std::size_t sidx(int s, int d) const {
        return static_cast<std::size_t>(s) * D + static_cast<std::size_t>(d - bounds.d_min);
    }

    int num_inputs_at(std::size_t section /*1-based*/) const {
        return section <= n_outer ? ni : 1;
    }
    double prior_at(std::size_t section, int w) const {
        return section <= n_outer ? priors[(section - 1) * ni + w] : (w == 0 ? 1.0 : 0.0);
    }

    // candidate mu range at entry drift d that stays inside the drift bounds
    void mu_range(int d, int& lo, int& hi) const {
        lo = std::max(0, bounds.d_min - d + n);
        hi = std::min(mu_max, bounds.d_max - d + n);
    }
};

struct ForwardPass {
    std::vector<double> alpha;       // (sections + 1) x states
    std::vector<double> log_scale;   // per section
    bool dead = false;
    std::uint64_t edges_enumerated = 0;
    std::uint64_t edges_active = 0;
};

// allowed(section, w) filters branch inputs; used to clamp the recursion to a
// known input sequence.
template <typename AllowedFn>
void run_forward(SingleEngine& e, ForwardPass& fp, AllowedFn&& allowed) {
    fp.alpha.assign((e.sections + 1) * e.states, 0.0);
    fp.log_scale.assign(e.sections + 1, 0.0);
    if (!e.bounds.contains(0)) {
        fp.dead = true;
        return;
    }
    fp.alpha[e.sidx(0, 0)] = 1.0;

    SectionBlocks blocks;
    LatticeCache cache;
    const std::uint64_t delta_per = static_cast<std::uint64_t>(e.bounds.transitions(e.n));

    for (std::size_t i = 1; i <= e.sections && !fp.dead; ++i) {
        blocks.build(e.code, e.offset, i - 1);
        const long y_base = static_cast<long>(i - 1) * e.n;
        cache.reset(&blocks, e.y.data(), e.y.size(), y_base, e.mu_max, e.bounds.d_min,
                    e.bounds.d_max, &e.params);
        double* a_prev = fp.alpha.data() + (i - 1) * e.states;
        double* a_cur = fp.alpha.data() + i * e.states;

        const int wn = e.num_inputs_at(i);
        fp.edges_enumerated += static_cast<std::uint64_t>(e.ns) * static_cast<std::uint64_t>(e.D) *
                               static_cast<std::uint64_t>(wn) * delta_per;
        for (int d = e.bounds.d_min; d <= e.bounds.d_max; ++d) {
            int lo, hi;
            e.mu_range(d, lo, hi);
            const long start = y_base + d;
            if (start >= 0) {
                const int av = static_cast<int>(
                    std::min<long>(hi, static_cast<long>(e.y.size()) - start));
                if (av >= lo)
                    fp.edges_active += static_cast<std::uint64_t>(av - lo + 1) *
                                       static_cast<std::uint64_t>(e.ns) *
                                       static_cast<std::uint64_t>(wn);
            }
            for (int s = 0; s < e.ns; ++s) {
                const double a = a_prev[e.sidx(s, d)];
                if (a == 0.0) continue;
                for (int w = 0; w < wn; ++w) {
                    if (!allowed(i, w)) continue;
                    const double pw = e.prior_at(i, w) * a;
                    if (pw == 0.0) continue;
                    const double* row = cache.row(blocks.block_of[static_cast<std::size_t>(s) * e.ni + w], d);
                    if (!row) continue;
                    const std::size_t base = e.sidx(e.code.next_state(s, w), d - e.n + lo);
                    for (int mu = lo; mu <= hi; ++mu)
                        a_cur[base + static_cast<std::size_t>(mu - lo)] += pw * row[mu];
                }
            }
        }
        double sum = 0;
        for (std::size_t j = 0; j < e.states; ++j) sum += a_cur[j];
        if (sum <= 0.0 || !std::isfinite(sum)) {
            fp.dead = true;
            return;
        }
        for (std::size_t j = 0; j < e.states; ++j) a_cur[j] /= sum;
        fp.log_scale[i] = fp.log_scale[i - 1] + std::log(sum);
    }
}

DecodeResult erasure_result(std::size_t sections, int q) {
    DecodeResult r;
    r.app = AppMatrix::uniform(sections, q);
    r.erasure = true;
    return r;
}

}  // namespace

DecodeResult decode_single(std::span<const Symbol> y, const InnerCode& code,
                           const OffsetSequence* offset, const AppMatrix& priors,
                           const ChannelParams& params, const DriftBounds& bounds) {
    params.validate();
    SingleEngine e(y, code, offset, priors, params, bounds, priors.rows());
    DecodeResult res;

    if (!e.bounds.contains(e.d_final)) {
        res = erasure_result(e.sections, e.ni);
        return res;
    }

    ForwardPass fp;
    run_forward(e, fp, [](std::size_t, int) { return true; });
    res.edges_enumerated = fp.edges_enumerated;
    res.edges_active = fp.edges_active;
    const std::size_t final_idx = e.sidx(0, static_cast<int>(e.d_final));
    if (fp.dead || fp.alpha[e.sections * e.states + final_idx] <= 0.0) {
        DecodeResult r = erasure_result(e.sections, e.ni);
        r.edges_enumerated = res.edges_enumerated;
        r.edges_active = res.edges_active;
        return r;
    }
    res.log_py = std::log(fp.alpha[e.sections * e.states + final_idx]) + fp.log_scale[e.sections];

    // backward recursion with APP accumulation per section
    res.app = AppMatrix(e.sections, e.ni);
    std::vector<double> beta(e.states, 0.0), beta_prev(e.states);
    beta[final_idx] = 1.0;
    double log_scale_b = 0.0;

    SectionBlocks blocks;
    LatticeCache cache;
    for (std::size_t i = e.sections; i >= 1; --i) {
        blocks.build(e.code, e.offset, i - 1);
        const long y_base = static_cast<long>(i - 1) * e.n;
        cache.reset(&blocks, e.y.data(), e.y.size(), y_base, e.mu_max, e.bounds.d_min,
                    e.bounds.d_max, &e.params);
        const double* a_prev = fp.alpha.data() + (i - 1) * e.states;
        double* app_row = res.app.row(i - 1);
        std::fill(beta_prev.begin(), beta_prev.end(), 0.0);

        const int wn = e.num_inputs_at(i);
        for (int d = e.bounds.d_min; d <= e.bounds.d_max; ++d) {
            int lo, hi;
            e.mu_range(d, lo, hi);
            for (int s = 0; s < e.ns; ++s) {
                const double a = a_prev[e.sidx(s, d)];
                for (int w = 0; w < wn; ++w) {
                    const double pw = e.prior_at(i, w);
                    if (pw == 0.0) continue;
                    const double* row = cache.row(blocks.block_of[static_cast<std::size_t>(s) * e.ni + w], d);
                    if (!row) continue;
                    const std::size_t base = e.sidx(e.code.next_state(s, w), d - e.n + lo);
                    double acc = 0;
                    for (int mu = lo; mu <= hi; ++mu)
                        acc += row[mu] * beta[base + static_cast<std::size_t>(mu - lo)];
                    beta_prev[e.sidx(s, d)] += pw * acc;
                    if (a != 0.0) app_row[w] += a * pw * acc;
                }
            }
        }
        double s_app = 0;
        for (int w = 0; w < e.ni; ++w) s_app += app_row[w];
        if (s_app > 0)
            for (int w = 0; w < e.ni; ++w) app_row[w] /= s_app;
        else
            for (int w = 0; w < e.ni; ++w) app_row[w] = 1.0 / e.ni;

        double s_b = 0;
        for (std::size_t j = 0; j < e.states; ++j) s_b += beta_prev[j];
        if (s_b <= 0.0) {
            DecodeResult r = erasure_result(e.sections, e.ni);
            r.edges_enumerated = res.edges_enumerated;
            r.edges_active = res.edges_active;
            return r;
        }
        for (std::size_t j = 0; j < e.states; ++j) beta_prev[j] /= s_b;
        log_scale_b += std::log(s_b);
        std::swap(beta, beta_prev);
    }
    if (beta[e.sidx(0, 0)] > 0.0)
        res.log_py_backward = std::log(beta[e.sidx(0, 0)]) + log_scale_b;
    return res;
}

AppMatrix extrinsic_from(const AppMatrix& app, const AppMatrix& priors) {
    AppMatrix ext(app.rows(), app.q());
    for (std::size_t i = 0; i < app.rows(); ++i) {
        double ps = 0;
        for (int a = 0; a < app.q(); ++a) ps += priors.at(i, a);
        for (int a = 0; a < app.q(); ++a) {
            const double p = i < priors.rows() ? priors.at(i, a) / ps : (a == 0 ? 1.0 : 0.0);
            ext.at(i, a) = p > 0 ? app.at(i, a) / p : 0.0;
        }
    }
    ext.normalize_rows();
    return ext;
}

DecodeResult decode_single_extrinsic(std::span<const Symbol> y, const InnerCode& code,
                                     const OffsetSequence* offset, const AppMatrix& priors,
                                     const ChannelParams& params, const DriftBounds& bounds) {
    DecodeResult r = decode_single(y, code, offset, priors, params, bounds);
    if (r.erasure) return r;
    // termination rows keep their certainty; only info rows carry priors
    AppMatrix pri_full(r.app.rows(), r.app.q());
    for (std::size_t i = 0; i < r.app.rows(); ++i)
        for (int a = 0; a < r.app.q(); ++a)
            pri_full.at(i, a) = i < priors.rows() ? priors.at(i, a) : (a == 0 ? 1.0 : 0.0);
    r.app = extrinsic_from(r.app, pri_full);
    return r;
}

ForwardLogProbs forward_log_probs(std::span<const Symbol> y, const InnerCode& code,
                                  const OffsetSequence* offset, std::span<const int> w_true,
                                  const ChannelParams& params, const DriftBounds& bounds) {
    params.validate();
    ForwardLogProbs out;
    const AppMatrix uni = AppMatrix::uniform(w_true.size(), code.num_inputs());
    SingleEngine e(y, code, offset, uni, params, bounds, w_true.size());
    if (!e.bounds.contains(e.d_final)) return out;
    const std::size_t final_idx = e.sidx(0, static_cast<int>(e.d_final));

    ForwardPass fp;
    run_forward(e, fp, [](std::size_t, int) { return true; });
    if (fp.dead || fp.alpha[e.sections * e.states + final_idx] <= 0.0) return out;
    out.log_py = std::log(fp.alpha[e.sections * e.states + final_idx]) + fp.log_scale[e.sections];

    ForwardPass fc;
    run_forward(e, fc, [&](std::size_t i, int w) {
        return i > w_true.size() || w == w_true[i - 1];
    });
    if (fc.dead || fc.alpha[e.sections * e.states + final_idx] <= 0.0) return out;
    out.log_pwy = std::log(fc.alpha[e.sections * e.states + final_idx]) + fc.log_scale[e.sections];
    out.ok = true;
    return out;
}

}  // namespace ids
