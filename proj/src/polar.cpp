#include "ids/polar.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ids::polar {

std::uint8_t crc8(std::span<const std::uint8_t> bits) {
    std::uint8_t crc = 0;
    for (std::uint8_t b : bits) {
        crc = static_cast<std::uint8_t>(crc ^ (b << 7));
        crc = static_cast<std::uint8_t>((crc & 0x80) ? (crc << 1) ^ 0x07 : crc << 1);
    }
    return crc;
}

std::vector<std::uint8_t> symbols_to_bits(std::span<const int> symbols, int k) {
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * static_cast<std::size_t>(k));
    for (int s : symbols)
        for (int j = k - 1; j >= 0; --j) bits.push_back(static_cast<std::uint8_t>((s >> j) & 1));
    return bits;
}

std::vector<int> bits_to_symbols(std::span<const std::uint8_t> bits, int k) {
    std::vector<int> out;
    for (std::size_t i = 0; i < bits.size(); i += static_cast<std::size_t>(k)) {
        int s = 0;
        for (int j = 0; j < k; ++j) {
            s <<= 1;
            if (i + static_cast<std::size_t>(j) < bits.size()) s |= bits[i + static_cast<std::size_t>(j)];
        }
        out.push_back(s);
    }
    return out;
}

void PolarSpec::validate(const gf::Field& field) const {
    if (n_outer == 0 || (n_outer & (n_outer - 1)) != 0)
        throw std::invalid_argument("polar: N_o must be a power of two");
    if (beta == 0) throw std::invalid_argument("polar: beta must be nonzero");
    if (alpha < 0 || alpha >= field.q() || beta >= field.q())
        throw std::invalid_argument("polar: kernel entries out of field");
    const std::size_t want = n_outer - k_info - crc_symbols(field.k());
    if (frozen.size() != want) throw std::invalid_argument("polar: frozen set size mismatch");
    for (std::size_t i = 0; i < frozen.size(); ++i) {
        if (frozen[i] >= n_outer) throw std::invalid_argument("polar: frozen index out of range");
        if (i > 0 && frozen[i] <= frozen[i - 1])
            throw std::invalid_argument("polar: frozen indices must be strictly increasing");
    }
    if (list_size < 1) throw std::invalid_argument("polar: list size must be >= 1");
}

namespace {

void transform_rec(int* u, std::size_t len, const gf::Field& f, int alpha, int beta) {
    if (len == 1) return;
    const std::size_t h = len / 2;
    transform_rec(u, h, f, alpha, beta);
    transform_rec(u + h, h, f, alpha, beta);
    for (std::size_t j = 0; j < h; ++j) {
        const int a = u[j], b = u[h + j];
        u[j] = f.add(a, f.mul(alpha, b));
        u[h + j] = f.mul(beta, b);
    }
}

void transform_inv_rec(int* w, std::size_t len, const gf::Field& f, int alpha, int beta) {
    if (len == 1) return;
    const std::size_t h = len / 2;
    const int beta_inv = f.inv(beta);
    for (std::size_t j = 0; j < h; ++j) {
        const int b = f.mul(beta_inv, w[h + j]);
        w[h + j] = b;
        w[j] = f.add(w[j], f.mul(alpha, b));
    }
    transform_inv_rec(w, h, f, alpha, beta);
    transform_inv_rec(w + h, h, f, alpha, beta);
}

}  // namespace

std::vector<int> polar_transform(std::span<const int> u, const gf::Field& field, int alpha,
                                 int beta) {
    std::vector<int> w(u.begin(), u.end());
    if (w.empty() || (w.size() & (w.size() - 1)) != 0)
        throw std::invalid_argument("polar_transform: length must be a power of two");
    transform_rec(w.data(), w.size(), field, alpha, beta);
    return w;
}

std::vector<int> polar_transform_inv(std::span<const int> w, const gf::Field& field, int alpha,
                                     int beta) {
    std::vector<int> u(w.begin(), w.end());
    if (u.empty() || (u.size() & (u.size() - 1)) != 0)
        throw std::invalid_argument("polar_transform_inv: length must be a power of two");
    transform_inv_rec(u.data(), u.size(), field, alpha, beta);
    return u;
}

namespace {

// u vector from info symbols: frozen positions 0, info then CRC symbols on
// the non-frozen positions in index order
std::vector<int> assemble_u(std::span<const int> info, const PolarSpec& spec,
                            const gf::Field& field) {
    if (info.size() != spec.k_info) throw std::invalid_argument("polar: info length mismatch");
    auto bits = symbols_to_bits(info, field.k());
    const std::uint8_t crc = crc8(bits);
    std::vector<std::uint8_t> crc_bits;
    for (int j = spec.crc_bits - 1; j >= 0; --j)
        crc_bits.push_back(static_cast<std::uint8_t>((crc >> j) & 1));
    const auto crc_syms = bits_to_symbols(crc_bits, field.k());

    std::vector<int> u(spec.n_outer, 0);
    std::vector<bool> is_frozen(spec.n_outer, false);
    for (auto fidx : spec.frozen) is_frozen[fidx] = true;
    std::size_t pos = 0;
    std::vector<int> payload(info.begin(), info.end());
    payload.insert(payload.end(), crc_syms.begin(), crc_syms.end());
    for (std::size_t i = 0; i < spec.n_outer && pos < payload.size(); ++i) {
        if (is_frozen[i]) continue;
        u[i] = payload[pos++];
    }
    if (pos != payload.size()) throw std::invalid_argument("polar: payload exceeds open positions");
    return u;
}

bool check_crc(std::span<const int> payload, std::size_t k_info, int crc_bits,
               const gf::Field& field) {
    std::vector<int> info(payload.begin(), payload.begin() + static_cast<long>(k_info));
    const auto bits = symbols_to_bits(info, field.k());
    const std::uint8_t crc = crc8(bits);
    std::vector<std::uint8_t> want;
    for (int j = crc_bits - 1; j >= 0; --j) want.push_back(static_cast<std::uint8_t>((crc >> j) & 1));
    const auto want_syms = bits_to_symbols(want, field.k());
    for (std::size_t i = 0; i < want_syms.size(); ++i)
        if (payload[k_info + i] != want_syms[i]) return false;
    return true;
}

}  // namespace

std::vector<int> encode_polar(std::span<const int> info, const PolarSpec& spec,
                              const gf::Field& field) {
    spec.validate(field);
    const auto u = assemble_u(info, spec, field);
    return polar_transform(u, field, spec.alpha, spec.beta);
}

// ---------------------------------------------------------------------------
// successive cancellation

namespace {

// Posterior over u[target] of the sub-block given channel beliefs and the
// decided prefix. probs is len rows of q values.
std::vector<double> sc_marginal(const double* probs, std::size_t len, std::span<const int> prefix,
                                std::size_t target, const gf::Field& f, int alpha, int beta) {
    const std::size_t q = static_cast<std::size_t>(f.q());
    if (len == 1) {
        std::vector<double> post(probs, probs + q);
        double s = std::accumulate(post.begin(), post.end(), 0.0);
        if (s > 0)
            for (auto& v : post) v /= s;
        else
            std::fill(post.begin(), post.end(), 1.0 / static_cast<double>(q));
        return post;
    }
    const std::size_t h = len / 2;
    std::vector<double> next(h * q);
    if (target < h) {
        // upper channel: marginalize the undecided second half
        for (std::size_t j = 0; j < h; ++j) {
            const double* p1 = probs + j * q;
            const double* p2 = probs + (h + j) * q;
            double* out = next.data() + j * q;
            for (std::size_t va = 0; va < q; ++va) {
                double acc = 0;
                for (std::size_t vb = 0; vb < q; ++vb) {
                    acc += p1[f.add(static_cast<int>(va), f.mul(alpha, static_cast<int>(vb)))] *
                           p2[f.mul(beta, static_cast<int>(vb))];
                }
                out[va] = acc;
            }
        }
        return sc_marginal(next.data(), h, prefix, target, f, alpha, beta);
    }
    // lower channel: the first half is decided; re-encode it
    std::vector<int> left(prefix.begin(), prefix.begin() + static_cast<long>(h));
    transform_rec(left.data(), h, f, alpha, beta);
    for (std::size_t j = 0; j < h; ++j) {
        const double* p1 = probs + j * q;
        const double* p2 = probs + (h + j) * q;
        double* out = next.data() + j * q;
        for (std::size_t vb = 0; vb < q; ++vb) {
            out[vb] = p1[f.add(left[j], f.mul(alpha, static_cast<int>(vb)))] *
                      p2[f.mul(beta, static_cast<int>(vb))];
        }
    }
    return sc_marginal(next.data(), h, prefix.subspan(h), target - h, f, alpha, beta);
}

double penalty_of(double p) {
    return -std::log(std::max(p, 1e-300));
}

struct Path {
    std::vector<int> u;
    double penalty = 0.0;
};

}  // namespace

SclResult decode_scl(const AppMatrix& apps, const PolarSpec& spec, const gf::Field& field) {
    spec.validate(field);
    const std::size_t n = spec.n_outer;
    const int q = field.q();
    if (apps.rows() < n || apps.q() != q) throw std::invalid_argument("decode_scl: shape mismatch");

    std::vector<double> probs(n * static_cast<std::size_t>(q));
    for (std::size_t i = 0; i < n; ++i)
        for (int a = 0; a < q; ++a) probs[i * static_cast<std::size_t>(q) + a] = apps.at(i, a);

    std::vector<bool> is_frozen(n, false);
    for (auto fidx : spec.frozen) is_frozen[fidx] = true;

    std::vector<Path> paths(1);
    paths[0].u.reserve(n);

    struct Cand {
        std::size_t path;
        int value;
        double penalty;
    };
    std::vector<Cand> cands;

    for (std::size_t i = 0; i < n; ++i) {
        cands.clear();
        for (std::size_t pi = 0; pi < paths.size(); ++pi) {
            const auto post =
                sc_marginal(probs.data(), n, paths[pi].u, i, field, spec.alpha, spec.beta);
            if (is_frozen[i]) {
                cands.push_back({pi, 0, paths[pi].penalty + penalty_of(post[0])});
            } else {
                for (int v = 0; v < q; ++v)
                    cands.push_back({pi, v, paths[pi].penalty + penalty_of(post[static_cast<std::size_t>(v)])});
            }
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            return a.penalty < b.penalty;
        });
        const std::size_t keep = std::min<std::size_t>(cands.size(),
                                                       static_cast<std::size_t>(spec.list_size));
        std::vector<Path> next;
        next.reserve(keep);
        for (std::size_t c = 0; c < keep; ++c) {
            Path p = paths[cands[c].path];
            p.u.push_back(cands[c].value);
            p.penalty = cands[c].penalty;
            next.push_back(std::move(p));
        }
        paths = std::move(next);
    }

    // paths are penalty-sorted by construction of the final pruning
    const std::size_t n_payload = spec.k_info + spec.crc_symbols(field.k());
    SclResult res;
    const Path* winner = nullptr;
    for (const auto& p : paths) {
        std::vector<int> payload;
        payload.reserve(n_payload);
        for (std::size_t i = 0; i < n; ++i)
            if (!is_frozen[i]) payload.push_back(p.u[i]);
        if (check_crc(payload, spec.k_info, spec.crc_bits, field)) {
            winner = &p;
            res.crc_ok = true;
            break;
        }
    }
    if (!winner) winner = &paths.front();
    res.u_best = winner->u;
    res.penalty = winner->penalty;
    for (std::size_t i = 0; i < n && res.info.size() < spec.k_info; ++i)
        if (!is_frozen[i]) res.info.push_back(winner->u[i]);
    return res;
}

// ---------------------------------------------------------------------------
// design

void AppPool::Frame::index(int q) {
    positions_by_value.assign(static_cast<std::size_t>(q), {});
    for (std::size_t i = 0; i < w.size(); ++i)
        positions_by_value[static_cast<std::size_t>(w[i])].push_back(static_cast<std::uint32_t>(i));
}

void AppPool::add(AppMatrix app, std::vector<int> w) {
    Frame f{std::move(app), std::move(w), {}};
    f.index(q);
    frames.push_back(std::move(f));
}

bool AppPool::usable() const {
    if (frames.empty()) return false;
    std::vector<bool> seen(static_cast<std::size_t>(q), false);
    for (const auto& f : frames)
        for (int v = 0; v < q; ++v)
            if (!f.positions_by_value[static_cast<std::size_t>(v)].empty())
                seen[static_cast<std::size_t>(v)] = true;
    for (bool s : seen)
        if (!s) return false;
    return true;
}

std::vector<KernelScore> optimize_kernel(const AppPool& pool, const gf::Field& field,
                                         std::size_t trials, Rng& rng) {
    if (!pool.usable()) throw std::invalid_argument("optimize_kernel: pool misses symbol values");
    const int q = field.q();
    std::vector<KernelScore> scores;
    std::vector<double> post(static_cast<std::size_t>(q));
    std::vector<double> frame_sum(pool.frames.size());
    std::vector<std::size_t> frame_n(pool.frames.size());
    for (int alpha = 1; alpha < q; ++alpha) {
        double sum = 0;
        std::fill(frame_sum.begin(), frame_sum.end(), 0.0);
        std::fill(frame_n.begin(), frame_n.end(), 0);
        std::size_t done = 0, attempts = 0;
        while (done < trials) {
            if (++attempts > 64 * trials)
                throw std::runtime_error("optimize_kernel: pool too thin for the trial budget");
            const int u2 = rng.symbol(q);
            const int w1 = field.mul(alpha, u2);
            const int w2 = u2;  // beta = 1
            const std::size_t fi = rng.below(pool.frames.size());
            const auto& frame = pool.frames[fi];
            const auto& b1 = frame.positions_by_value[static_cast<std::size_t>(w1)];
            const auto& b2 = frame.positions_by_value[static_cast<std::size_t>(w2)];
            if (b1.empty() || b2.empty()) continue;
            const double* r1 = frame.app.row(b1[rng.below(b1.size())]);
            const double* r2 = frame.app.row(b2[rng.below(b2.size())]);
            double s = 0;
            for (int v = 0; v < q; ++v) {
                post[static_cast<std::size_t>(v)] =
                    r1[static_cast<std::size_t>(field.mul(alpha, v))] * r2[static_cast<std::size_t>(v)];
                s += post[static_cast<std::size_t>(v)];
            }
            const double x = s > 0 ? 1.0 - post[static_cast<std::size_t>(u2)] / s
                                   : 1.0 - 1.0 / static_cast<double>(q);
            sum += x;
            frame_sum[fi] += x;
            frame_n[fi] += 1;
            ++done;
        }
        const double mean = sum / static_cast<double>(trials);
        // delete-one-frame jackknife: trials drawn from one frame are
        // correlated, so a plain i.i.d. error bar would be too small
        double jack = 0;
        std::size_t used = 0;
        for (std::size_t f = 0; f < pool.frames.size(); ++f) {
            if (frame_n[f] == 0) continue;
            const double theta =
                (sum - frame_sum[f]) / static_cast<double>(trials - frame_n[f]);
            jack += (theta - mean) * (theta - mean);
            ++used;
        }
        const double se =
            used > 1 ? std::sqrt(jack * static_cast<double>(used - 1) / static_cast<double>(used))
                     : 0.0;
        scores.push_back({alpha, mean, se, trials});
    }
    std::stable_sort(scores.begin(), scores.end(),
                     [](const KernelScore& a, const KernelScore& b) { return a.failure < b.failure; });
    return scores;
}

std::vector<std::uint64_t> genie_error_counts(const FrameProvider& provider, std::size_t n_outer,
                                              const gf::Field& field, int alpha, int beta,
                                              std::size_t frames, Rng& rng) {
    std::vector<std::uint64_t> errors(n_outer, 0);
    std::vector<double> probs(n_outer * static_cast<std::size_t>(field.q()));
    for (std::size_t f = 0; f < frames; ++f) {
        auto [apps, w_true] = provider(rng);
        if (apps.rows() < n_outer || w_true.size() < n_outer)
            throw std::invalid_argument("select_frozen: frame shorter than N_o");
        for (std::size_t i = 0; i < n_outer; ++i)
            for (int a = 0; a < field.q(); ++a)
                probs[i * static_cast<std::size_t>(field.q()) + a] = apps.at(i, a);
        std::vector<int> w(w_true.begin(), w_true.begin() + static_cast<long>(n_outer));
        const auto u_true = polar_transform_inv(w, field, alpha, beta);
        // genie-aided: decide each position from the true prefix
        for (std::size_t i = 0; i < n_outer; ++i) {
            const auto post = sc_marginal(probs.data(), n_outer,
                                          std::span<const int>(u_true.data(), i), i, field, alpha,
                                          beta);
            int best = 0;
            for (int v = 1; v < field.q(); ++v)
                if (post[static_cast<std::size_t>(v)] > post[static_cast<std::size_t>(best)]) best = v;
            if (best != u_true[i]) ++errors[i];
        }
    }
    return errors;
}

std::vector<std::uint32_t> select_frozen(const FrameProvider& provider, std::size_t n_outer,
                                         std::size_t n_freeze, const gf::Field& field, int alpha,
                                         int beta, std::size_t frames, Rng& rng) {
    if (n_freeze > n_outer) throw std::invalid_argument("select_frozen: n_freeze > N_o");
    const auto errors = genie_error_counts(provider, n_outer, field, alpha, beta, frames, rng);
    std::vector<std::uint32_t> idx(n_outer);
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (errors[a] != errors[b]) return errors[a] > errors[b];
        return a < b;
    });
    std::vector<std::uint32_t> frozen(idx.begin(), idx.begin() + static_cast<long>(n_freeze));
    std::sort(frozen.begin(), frozen.end());
    return frozen;
}

void save_frozen(std::ostream& os, const PolarSpec& spec, const gf::Field& field) {
    os << spec.n_outer << ' ' << spec.k_info << ' ' << field.q() << ' ' << spec.alpha << ' '
       << spec.beta << ' ' << spec.crc_bits << '\n';
    for (auto f : spec.frozen) os << f << '\n';
}

PolarSpec load_frozen(std::istream& is, int* q_out) {
    PolarSpec spec;
    int q = 0;
    if (!(is >> spec.n_outer >> spec.k_info >> q >> spec.alpha >> spec.beta >> spec.crc_bits))
        throw std::runtime_error("frozen file: bad header");
    if (q_out) *q_out = q;
    std::uint32_t v;
    while (is >> v) spec.frozen.push_back(v);
    std::sort(spec.frozen.begin(), spec.frozen.end());
    return spec;
}

}  // namespace ids::polar
