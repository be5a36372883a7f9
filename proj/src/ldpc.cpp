#include "ids/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ids::ldpc {

int Protograph::max_entry() const {
    int m = 0;
    for (int v : b) m = std::max(m, v);
    return m;
}

Protograph load_protograph(std::istream& is) {
    Protograph p;
    if (!(is >> p.rows >> p.cols)) throw std::runtime_error("protograph: bad header");
    p.b.resize(p.rows * p.cols);
    for (auto& v : p.b)
        if (!(is >> v) || v < 0) throw std::runtime_error("protograph: bad entry");
    return p;
}

void save_protograph(std::ostream& os, const Protograph& p) {
    os << p.rows << ' ' << p.cols << '\n';
    for (std::size_t r = 0; r < p.rows; ++r) {
        for (std::size_t c = 0; c < p.cols; ++c) os << (c ? " " : "") << p.at(r, c);
        os << '\n';
    }
}

void NbParityCheck::rebuild_adjacency() {
    row_edges.assign(rows, {});
    col_edges.assign(cols, {});
    for (std::size_t e = 0; e < num_edges(); ++e) {
        row_edges[edge_row[e]].push_back(static_cast<std::uint32_t>(e));
        col_edges[edge_col[e]].push_back(static_cast<std::uint32_t>(e));
    }
}

namespace {

// breadth-first distance from a VN to a CN in the bipartite graph, in edges
int bfs_distance(const NbParityCheck& h, std::uint32_t vn_start, std::uint32_t cn_target) {
    std::vector<int> dist_v(h.cols, -1), dist_c(h.rows, -1);
    std::deque<std::pair<std::uint32_t, bool>> queue;  // (index, is_check)
    dist_v[vn_start] = 0;
    queue.emplace_back(vn_start, false);
    while (!queue.empty()) {
        auto [idx, is_check] = queue.front();
        queue.pop_front();
        if (is_check) {
            for (std::uint32_t e : h.row_edges[idx]) {
                const std::uint32_t v = h.edge_col[e];
                if (dist_v[v] < 0) {
                    dist_v[v] = dist_c[idx] + 1;
                    queue.emplace_back(v, false);
                }
            }
        } else {
            for (std::uint32_t e : h.col_edges[idx]) {
                const std::uint32_t c = h.edge_row[e];
                if (c == cn_target) return dist_v[idx] + 1;
                if (dist_c[c] < 0) {
                    dist_c[c] = dist_v[idx] + 1;
                    queue.emplace_back(c, true);
                }
            }
        }
    }
    return -1;  // unreachable
}

struct BaseEdge {
    std::size_t i, j;
    int copies;
};

}  // namespace

int tanner_girth(const NbParityCheck& h) {
    // BFS from every VN, tracking the arriving edge; the first revisit closes
    // the shortest cycle through that vertex
    int girth = std::numeric_limits<int>::max();
    const std::size_t nv = h.cols + h.rows;  // VNs then CNs
    std::vector<int> dist(nv);
    std::vector<std::uint32_t> via(nv);
    for (std::size_t start = 0; start < h.cols; ++start) {
        std::fill(dist.begin(), dist.end(), -1);
        std::deque<std::size_t> queue;
        dist[start] = 0;
        via[start] = std::numeric_limits<std::uint32_t>::max();
        queue.push_back(start);
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            const bool is_check = u >= h.cols;
            const auto& edges = is_check ? h.row_edges[u - h.cols] : h.col_edges[u];
            for (std::uint32_t e : edges) {
                if (e == via[u]) continue;
                const std::size_t v = is_check ? h.edge_col[e] : h.cols + h.edge_row[e];
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    via[v] = e;
                    queue.push_back(v);
                } else if (dist[v] >= dist[u]) {
                    girth = std::min(girth, dist[u] + dist[v] + 1);
                }
            }
        }
    }
    return girth == std::numeric_limits<int>::max() ? 0 : girth;
}

NbParityCheck lift(const Protograph& proto, std::size_t q_lift, const gf::Field& field, Rng& rng,
                   int attempts) {
    if (q_lift < 1) throw std::invalid_argument("lift: Q must be positive");
    if (proto.max_entry() > static_cast<int>(q_lift))
        throw std::invalid_argument("lift: base entry exceeds Q");

    std::vector<BaseEdge> base;
    for (std::size_t i = 0; i < proto.rows; ++i)
        for (std::size_t j = 0; j < proto.cols; ++j)
            if (proto.at(i, j) > 0) base.push_back({i, j, proto.at(i, j)});

    NbParityCheck best;
    int best_girth = -1;
    for (int attempt = 0; attempt < std::max(1, attempts); ++attempt) {
        NbParityCheck h;
        h.rows = proto.rows * q_lift;
        h.cols = proto.cols * q_lift;
        h.q = field.q();
        h.row_edges.assign(h.rows, {});
        h.col_edges.assign(h.cols, {});

        std::vector<std::size_t> order(base.size());
        std::iota(order.begin(), order.end(), 0);
        // keep the natural order on the first attempt, shuffle afterwards
        if (attempt > 0) {
            for (std::size_t x = order.size(); x > 1; --x)
                std::swap(order[x - 1], order[rng.below(x)]);
        }

        for (std::size_t bi : order) {
            const BaseEdge& be = base[bi];
            std::vector<bool> used(q_lift, false);
            for (int g = 0; g < be.copies; ++g) {
                // all circulants are shift-invariant, so evaluating the cycle
                // through the (VN j*Q, CN i*Q + o) representative is enough
                int best_o = -1, best_d = -2;
                for (std::size_t o = 0; o < q_lift; ++o) {
                    if (used[o]) continue;
                    const std::uint32_t vn = static_cast<std::uint32_t>(be.j * q_lift);
                    const std::uint32_t cn = static_cast<std::uint32_t>(be.i * q_lift + o);
                    int d = bfs_distance(h, vn, cn);
                    if (d < 0) d = std::numeric_limits<int>::max();
                    if (d > best_d) {
                        best_d = d;
                        best_o = static_cast<int>(o);
                    }
                }
                used[static_cast<std::size_t>(best_o)] = true;
                for (std::size_t v = 0; v < q_lift; ++v) {
                    const std::uint32_t vn = static_cast<std::uint32_t>(be.j * q_lift + v);
                    const std::uint32_t cn = static_cast<std::uint32_t>(
                        be.i * q_lift + (v + static_cast<std::size_t>(best_o)) % q_lift);
                    h.edge_row.push_back(cn);
                    h.edge_col.push_back(vn);
                    h.row_edges[cn].push_back(static_cast<std::uint32_t>(h.edge_row.size() - 1));
                    h.col_edges[vn].push_back(static_cast<std::uint32_t>(h.edge_col.size() - 1));
                }
            }
        }
        const int g = tanner_girth(h);
        if (g == 0 ? best_girth < 0 : g > best_girth) {
            best_girth = g == 0 ? 0 : g;
            h.girth = g;
            best = std::move(h);
        }
    }
    best.weight.assign(best.num_edges(), 1);
    refresh_weights(best, field, rng);
    return best;
}

void refresh_weights(NbParityCheck& h, const gf::Field& field, Rng& rng) {
    h.weight.resize(h.num_edges());
    for (auto& w : h.weight) w = 1 + rng.symbol(field.q() - 1);
}

void save_parity_check(std::ostream& os, const NbParityCheck& h) {
    os << h.rows << ' ' << h.cols << ' ' << h.q << '\n';
    for (std::size_t e = 0; e < h.num_edges(); ++e)
        os << h.edge_row[e] << ' ' << h.edge_col[e] << ' ' << h.weight[e] << '\n';
}

NbParityCheck load_parity_check(std::istream& is) {
    NbParityCheck h;
    if (!(is >> h.rows >> h.cols >> h.q)) throw std::runtime_error("parity check: bad header");
    std::uint32_t r, c;
    int w;
    while (is >> r >> c >> w) {
        if (r >= h.rows || c >= h.cols || w <= 0 || w >= h.q)
            throw std::runtime_error("parity check: bad triplet");
        h.edge_row.push_back(r);
        h.edge_col.push_back(c);
        h.weight.push_back(w);
    }
    h.rebuild_adjacency();
    h.girth = tanner_girth(h);
    return h;
}

// ---------------------------------------------------------------------------

Encoder::Encoder(const NbParityCheck& h, const gf::Field& field) : field_(field), cols_(h.cols) {
    // dense Gaussian elimination to reduced row echelon form
    std::vector<std::vector<int>> a(h.rows, std::vector<int>(h.cols, 0));
    for (std::size_t e = 0; e < h.num_edges(); ++e)
        a[h.edge_row[e]][h.edge_col[e]] =
            field.add(a[h.edge_row[e]][h.edge_col[e]], h.weight[e]);

    std::vector<bool> is_pivot(h.cols, false);
    std::size_t rank = 0;
    for (std::size_t c = 0; c < h.cols && rank < h.rows; ++c) {
        std::size_t pr = rank;
        while (pr < h.rows && a[pr][c] == 0) ++pr;
        if (pr == h.rows) continue;
        std::swap(a[rank], a[pr]);
        const int inv = field.inv(a[rank][c]);
        for (std::size_t x = 0; x < h.cols; ++x) a[rank][x] = field.mul(a[rank][x], inv);
        for (std::size_t r = 0; r < h.rows; ++r) {
            if (r == rank || a[r][c] == 0) continue;
            const int f = a[r][c];
            for (std::size_t x = 0; x < h.cols; ++x)
                a[r][x] = field.add(a[r][x], field.mul(f, a[rank][x]));
        }
        is_pivot[c] = true;
        pivot_cols_.push_back(static_cast<std::uint32_t>(c));
        ++rank;
    }
    reduced_.assign(a.begin(), a.begin() + static_cast<long>(rank));
    for (std::size_t c = 0; c < h.cols; ++c)
        if (!is_pivot[c]) info_cols_.push_back(static_cast<std::uint32_t>(c));
}

std::vector<int> Encoder::encode(std::span<const int> info) const {
    if (info.size() != info_cols_.size()) throw std::invalid_argument("encode_ldpc: info length");
    std::vector<int> c(cols_, 0);
    for (std::size_t i = 0; i < info.size(); ++i) c[info_cols_[i]] = info[i];
    for (std::size_t r = 0; r < reduced_.size(); ++r) {
        int acc = 0;
        for (std::uint32_t ic : info_cols_)
            acc = field_.add(acc, field_.mul(reduced_[r][ic], c[ic]));
        c[pivot_cols_[r]] = acc;  // -acc == acc in characteristic 2
    }
    return c;
}

bool syndrome_zero(const NbParityCheck& h, const gf::Field& field, std::span<const int> word) {
    std::vector<int> syn(h.rows, 0);
    for (std::size_t e = 0; e < h.num_edges(); ++e)
        syn[h.edge_row[e]] =
            field.add(syn[h.edge_row[e]], field.mul(h.weight[e], word[h.edge_col[e]]));
    for (int s : syn)
        if (s) return false;
    return true;
}

// ---------------------------------------------------------------------------
// belief propagation

namespace {

void xor_convolve(const double* f, const double* g, int q, double* out) {
    std::fill(out, out + q, 0.0);
    for (int a = 0; a < q; ++a) {
        if (f[a] == 0.0) continue;
        for (int b = 0; b < q; ++b) out[a ^ b] += f[a] * g[b];
    }
}

void normalize(double* v, int q) {
    double s = 0;
    for (int a = 0; a < q; ++a) s += v[a];
    if (s > 0)
        for (int a = 0; a < q; ++a) v[a] /= s;
    else
        for (int a = 0; a < q; ++a) v[a] = 1.0 / q;
}

}  // namespace

BpResult decode_bp(const AppMatrix& apps, const NbParityCheck& h, const gf::Field& field,
                   int max_iter) {
    const int q = field.q();
    if (apps.rows() != h.cols || apps.q() != q)
        throw std::invalid_argument("decode_bp: shape mismatch");
    const std::size_t ne = h.num_edges();

    AppMatrix channel = apps;
    channel.normalize_rows();

    std::vector<double> v2c(ne * static_cast<std::size_t>(q));
    std::vector<double> c2v(ne * static_cast<std::size_t>(q), 1.0 / q);
    for (std::size_t e = 0; e < ne; ++e)
        std::copy(channel.row(h.edge_col[e]), channel.row(h.edge_col[e]) + q,
                  v2c.begin() + static_cast<long>(e * static_cast<std::size_t>(q)));

    BpResult res;
    res.posterior = AppMatrix(h.cols, q);
    res.hard.assign(h.cols, 0);

    std::vector<double> scratch_f, scratch_b, tmp(static_cast<std::size_t>(q));
    std::vector<double> permuted;

    for (int iter = 1; iter <= max_iter; ++iter) {
        // check-node update: XOR convolution of weight-permuted messages
        for (std::size_t r = 0; r < h.rows; ++r) {
            const auto& edges = h.row_edges[r];
            const std::size_t dc = edges.size();
            if (dc == 0) continue;
            permuted.assign(dc * static_cast<std::size_t>(q), 0.0);
            for (std::size_t x = 0; x < dc; ++x) {
                const std::uint32_t e = edges[x];
                const double* m = v2c.data() + static_cast<std::size_t>(e) * q;
                double* pm = permuted.data() + x * static_cast<std::size_t>(q);
                for (int c = 0; c < q; ++c) pm[field.mul(h.weight[e], c)] = m[c];
            }
            if (dc == 1) {
                double* out = c2v.data() + static_cast<std::size_t>(edges[0]) * q;
                std::fill(out, out + q, 0.0);
                out[0] = 1.0;  // single-edge check forces the symbol to zero
                continue;
            }
            scratch_f.assign(dc * static_cast<std::size_t>(q), 0.0);
            scratch_b.assign(dc * static_cast<std::size_t>(q), 0.0);
            std::copy(permuted.begin(), permuted.begin() + q, scratch_f.begin());
            std::copy(permuted.end() - q, permuted.end(), scratch_b.end() - q);
            for (std::size_t x = 1; x < dc; ++x) {
                xor_convolve(scratch_f.data() + (x - 1) * static_cast<std::size_t>(q),
                             permuted.data() + x * static_cast<std::size_t>(q), q,
                             scratch_f.data() + x * static_cast<std::size_t>(q));
                const std::size_t y = dc - 1 - x;
                xor_convolve(scratch_b.data() + (y + 1) * static_cast<std::size_t>(q),
                             permuted.data() + y * static_cast<std::size_t>(q), q,
                             scratch_b.data() + y * static_cast<std::size_t>(q));
            }
            for (std::size_t x = 0; x < dc; ++x) {
                const std::uint32_t e = edges[x];
                const double* conv;
                if (x == 0)
                    conv = scratch_b.data() + static_cast<std::size_t>(q);
                else if (x == dc - 1)
                    conv = scratch_f.data() + (dc - 2) * static_cast<std::size_t>(q);
                else {
                    xor_convolve(scratch_f.data() + (x - 1) * static_cast<std::size_t>(q),
                                 scratch_b.data() + (x + 1) * static_cast<std::size_t>(q), q,
                                 tmp.data());
                    conv = tmp.data();
                }
                double* out = c2v.data() + static_cast<std::size_t>(e) * q;
                for (int c = 0; c < q; ++c) out[c] = conv[field.mul(h.weight[e], c)];
                normalize(out, q);
            }
        }

        // variable-node update and posterior
        for (std::size_t col = 0; col < h.cols; ++col) {
            const auto& edges = h.col_edges[col];
            const std::size_t dv = edges.size();
            double* post = res.posterior.row(col);
            std::copy(channel.row(col), channel.row(col) + q, post);
            if (dv > 0) {
                scratch_f.assign((dv + 1) * static_cast<std::size_t>(q), 0.0);
                scratch_b.assign((dv + 1) * static_cast<std::size_t>(q), 0.0);
                // forward products starting from the channel term
                std::copy(channel.row(col), channel.row(col) + q, scratch_f.begin());
                std::fill(scratch_b.end() - q, scratch_b.end(), 1.0);
                for (std::size_t x = 0; x < dv; ++x) {
                    const double* m = c2v.data() + static_cast<std::size_t>(edges[x]) * q;
                    double* f = scratch_f.data() + (x + 1) * static_cast<std::size_t>(q);
                    const double* fp = scratch_f.data() + x * static_cast<std::size_t>(q);
                    for (int c = 0; c < q; ++c) f[c] = fp[c] * m[c];
                    normalize(f, q);
                    const std::size_t y = dv - 1 - x;
                    const double* mb = c2v.data() + static_cast<std::size_t>(edges[y]) * q;
                    double* bwd = scratch_b.data() + y * static_cast<std::size_t>(q);
                    const double* bn = scratch_b.data() + (y + 1) * static_cast<std::size_t>(q);
                    for (int c = 0; c < q; ++c) bwd[c] = bn[c] * mb[c];
                    normalize(bwd, q);
                }
                std::copy(scratch_f.data() + dv * static_cast<std::size_t>(q),
                          scratch_f.data() + (dv + 1) * static_cast<std::size_t>(q), post);
                for (std::size_t x = 0; x < dv; ++x) {
                    double* out = v2c.data() + static_cast<std::size_t>(edges[x]) * q;
                    const double* f = scratch_f.data() + x * static_cast<std::size_t>(q);
                    const double* bwd = scratch_b.data() + (x + 1) * static_cast<std::size_t>(q);
                    for (int c = 0; c < q; ++c) out[c] = f[c] * bwd[c];
                    normalize(out, q);
                }
            }
            normalize(post, q);
            res.hard[col] = res.posterior.argmax_row(col);
        }

        res.iterations = iter;
        if (syndrome_zero(h, field, res.hard)) {
            res.converged = true;
            break;
        }
    }

    // extrinsic: posterior with the channel term divided out
    res.extrinsic = AppMatrix(h.cols, q);
    for (std::size_t col = 0; col < h.cols; ++col) {
        for (int c = 0; c < q; ++c) {
            const double ch = channel.at(col, c);
            res.extrinsic.at(col, c) = ch > 0 ? res.posterior.at(col, c) / ch : 0.0;
        }
    }
    res.extrinsic.normalize_rows();
    return res;
}

// ---------------------------------------------------------------------------
// Monte-Carlo density evolution (error-referenced: true symbol is 0)

namespace {

struct EdgeClass {
    std::size_t row, col;
};

std::vector<EdgeClass> proto_edges(const Protograph& p) {
    std::vector<EdgeClass> e;
    for (std::size_t i = 0; i < p.rows; ++i)
        for (std::size_t j = 0; j < p.cols; ++j)
            for (int g = 0; g < p.at(i, j); ++g) e.push_back({i, j});
    return e;
}

}  // namespace

std::vector<double> de_ser_trace(const Protograph& proto, const gf::Field& field,
                                 const std::vector<std::vector<double>>& pool,
                                 std::size_t population, int iterations, Rng& rng) {
    const int q = field.q();
    if (pool.empty()) throw std::invalid_argument("de_ser_trace: empty channel pool");
    const auto edges = proto_edges(proto);
    const std::size_t ne = edges.size();

    std::vector<std::vector<std::uint32_t>> row_members(proto.rows), col_members(proto.cols);
    for (std::size_t e = 0; e < ne; ++e) {
        row_members[edges[e].row].push_back(static_cast<std::uint32_t>(e));
        col_members[edges[e].col].push_back(static_cast<std::uint32_t>(e));
    }

    auto draw_channel = [&](double* out) {
        const auto& r = pool[rng.below(pool.size())];
        std::copy(r.begin(), r.end(), out);
    };

    const std::size_t vec = static_cast<std::size_t>(q);
    std::vector<double> v2c(ne * population * vec), c2v(ne * population * vec, 1.0 / q);
    for (std::size_t e = 0; e < ne; ++e)
        for (std::size_t s = 0; s < population; ++s)
            draw_channel(v2c.data() + (e * population + s) * vec);

    std::vector<double> acc(vec), conv(vec), perm(vec), post(vec);
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(iterations));

    for (int it = 0; it < iterations; ++it) {
        // CN step: z_target = w_t^-1 sum of w_e z_e over partner edges
        for (std::size_t e = 0; e < ne; ++e) {
            const auto& partners = row_members[edges[e].row];
            for (std::size_t s = 0; s < population; ++s) {
                bool first = true;
                for (std::uint32_t pe : partners) {
                    if (pe == e) continue;
                    const double* m =
                        v2c.data() + (static_cast<std::size_t>(pe) * population + rng.below(population)) * vec;
                    const int w = 1 + rng.symbol(q - 1);
                    for (int c = 0; c < q; ++c) perm[static_cast<std::size_t>(field.mul(w, c))] = m[c];
                    if (first) {
                        std::copy(perm.begin(), perm.end(), acc.begin());
                        first = false;
                    } else {
                        xor_convolve(acc.data(), perm.data(), q, conv.data());
                        std::swap(acc, conv);
                    }
                }
                double* out = c2v.data() + (e * population + s) * vec;
                if (first) {
                    std::fill(out, out + q, 0.0);
                    out[0] = 1.0;
                } else {
                    const int wt = 1 + rng.symbol(q - 1);
                    for (int c = 0; c < q; ++c) out[c] = acc[static_cast<std::size_t>(field.mul(wt, c))];
                    normalize(out, q);
                }
            }
        }
        // VN step
        for (std::size_t e = 0; e < ne; ++e) {
            const auto& siblings = col_members[edges[e].col];
            for (std::size_t s = 0; s < population; ++s) {
                double* out = v2c.data() + (e * population + s) * vec;
                draw_channel(out);
                for (std::uint32_t se : siblings) {
                    if (se == e) continue;
                    const double* m =
                        c2v.data() + (static_cast<std::size_t>(se) * population + rng.below(population)) * vec;
                    for (int c = 0; c < q; ++c) out[c] *= m[c];
                }
                normalize(out, q);
            }
        }
        // posterior symbol error rate across VN types
        std::size_t errors = 0, total = 0;
        const std::size_t probes = std::max<std::size_t>(population, 1);
        for (std::size_t j = 0; j < proto.cols; ++j) {
            for (std::size_t s = 0; s < probes; ++s) {
                draw_channel(post.data());
                for (std::uint32_t se : col_members[j]) {
                    const double* m =
                        c2v.data() + (static_cast<std::size_t>(se) * population + rng.below(population)) * vec;
                    for (int c = 0; c < q; ++c) post[static_cast<std::size_t>(c)] *= m[c];
                }
                int best = 0;
                for (int c = 1; c < q; ++c)
                    if (post[static_cast<std::size_t>(c)] > post[static_cast<std::size_t>(best)]) best = c;
                if (best != 0) ++errors;
                ++total;
            }
        }
        trace.push_back(static_cast<double>(errors) / static_cast<double>(total));
    }
    return trace;
}

bool de_converged(const std::vector<double>& trace, double target_ser) {
    if (trace.empty()) return false;
    const double last = trace.back();
    if (last == 0.0) return true;
    if (last >= target_ser) return false;
    const std::size_t span = std::min<std::size_t>(10, trace.size() - 1);
    for (std::size_t i = trace.size() - span; i < trace.size(); ++i) {
        if (!(trace[i] < trace[i - 1])) return false;
    }
    return true;
}

ThresholdEstimate estimate_threshold(const Protograph& proto, const gf::Field& field,
                                     const PoolSampler& sampler, const DeBudget& budget,
                                     Rng& rng) {
    ThresholdEstimate est;
    auto probe = [&](double p) {
        const auto pool = sampler(p, budget.pool_rows, rng);
        const auto trace =
            de_ser_trace(proto, field, pool, budget.population, budget.iterations, rng);
        est.ser_trace_at_point = trace;
        return de_converged(trace, budget.target_ser);
    };

    double lo = budget.p_lo, hi = budget.p_hi;
    const bool lo_ok = probe(lo);
    const bool hi_ok = probe(hi);
    if (!lo_ok || hi_ok) {
        est.p_lo = lo;
        est.p_hi = hi;
        est.p_point = hi_ok ? hi : lo;
        est.stable = false;
        return est;
    }
    for (int step = 0; step < budget.bisect_steps; ++step) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid))
            lo = mid;
        else
            hi = mid;
    }
    est.p_lo = lo;
    est.p_hi = hi;
    est.p_point = 0.5 * (lo + hi);
    est.stable = true;
    return est;
}

}  // namespace ids::ldpc
