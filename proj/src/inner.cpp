#include "ids/inner.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ids {

int levenshtein_indel(std::span<const Symbol> a, std::span<const Symbol> b) {
    const std::size_t m = a.size(), n = b.size();
    std::vector<int> prev(n + 1, 0), cur(n + 1, 0);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            cur[j] = std::max({prev[j], cur[j - 1], prev[j - 1] + (a[i - 1] == b[j - 1] ? 1 : 0)});
        }
        std::swap(prev, cur);
    }
    const int lcs = prev[n];
    return static_cast<int>(m + n) - 2 * lcs;
}

namespace {

void word_from_index(std::uint32_t v, int n, int q, Symbol* out) {
    // most significant symbol first
    for (int i = n - 1; i >= 0; --i) {
        out[i] = static_cast<Symbol>(v % static_cast<std::uint32_t>(q));
        v /= static_cast<std::uint32_t>(q);
    }
}

int word_weight(std::uint32_t v, int q) {
    int w = 0;
    while (v) {
        if (v % static_cast<std::uint32_t>(q)) ++w;
        v /= static_cast<std::uint32_t>(q);
    }
    return w;
}

std::uint64_t ipow(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

Codebook dm_construct(int n, int k, int q) {
    if (n < 1 || k < 0 || q < 2) throw std::invalid_argument("dm_construct: bad parameters");
    const std::uint64_t space = ipow(static_cast<std::uint64_t>(q), n);
    const std::uint64_t size = 1ull << k;
    if (size > space) throw std::invalid_argument("dm_construct: 2^k exceeds q^n");
    if (space > (1ull << 20)) throw std::invalid_argument("dm_construct: q^n too large to enumerate");

    Codebook cb{n, k, q, {}};
    cb.words.reserve(size);
    // ascending integer value within each weight class
    for (int w = 0; w <= n && cb.words.size() < size; ++w) {
        for (std::uint32_t v = 0; v < space && cb.words.size() < size; ++v) {
            if (word_weight(v, q) != w) continue;
            SymbolVec word(static_cast<std::size_t>(n));
            word_from_index(v, n, q, word.data());
            cb.words.push_back(std::move(word));
        }
    }
    return cb;
}

VerifyResult verify_codebook(const Codebook& cb, int d_min) {
    VerifyResult r;
    r.min_distance = 2 * cb.n + 1;
    for (std::size_t i = 0; i < cb.words.size(); ++i) {
        for (std::size_t j = i + 1; j < cb.words.size(); ++j) {
            const int d = levenshtein_indel(cb.words[i], cb.words[j]);
            if (d < r.min_distance) {
                r.min_distance = d;
                r.worst_pair = {i, j};
            }
        }
    }
    if (cb.words.size() < 2) r.min_distance = 2 * cb.n;
    r.ok = r.min_distance >= d_min;
    return r;
}

// ---------------------------------------------------------------------------
// clique search

namespace {

struct CliqueSearch {
    int target = 0;
    std::size_t n_vertices = 0;
    std::size_t n_blocks = 0;
    const std::vector<std::uint64_t>* adj = nullptr;  // bitset rows
    std::uint64_t node_budget = 0;
    std::size_t clique_budget = 0;

    std::uint64_t nodes = 0;
    std::vector<int> current;
    std::vector<int> best;
    std::vector<std::vector<int>> found;

    bool exhausted() const { return nodes >= node_budget || found.size() >= clique_budget; }

    void expand(std::vector<int>& cand) {
        if (exhausted()) return;
        ++nodes;
        if (static_cast<int>(current.size()) == target) {
            found.push_back(current);
            return;
        }
        if (current.size() > best.size()) best = current;
        // bound: not enough candidates left to reach the target
        while (!cand.empty() &&
               static_cast<int>(current.size() + cand.size()) >= target) {
            const int v = cand.back();
            cand.pop_back();
            current.push_back(v);
            std::vector<int> next;
            next.reserve(cand.size());
            const std::uint64_t* row = adj->data() + static_cast<std::size_t>(v) * n_blocks;
            for (int u : cand) {
                if (row[static_cast<std::size_t>(u) >> 6] & (1ull << (u & 63))) next.push_back(u);
            }
            expand(next);
            current.pop_back();
            if (exhausted()) return;
        }
        if (current.size() > best.size()) best = current;
    }
};

}  // namespace

CliqueDesignResult clique_design(int n, int q, int d_min, int target_size, int t,
                                 std::uint64_t node_budget, std::size_t clique_budget) {
    if (t < 1 || target_size < 1) throw std::invalid_argument("clique_design: bad parameters");
    const std::uint64_t space = ipow(static_cast<std::uint64_t>(q), n);
    if (space > (1ull << 20)) throw std::invalid_argument("clique_design: q^n exceeds 2^20");
    if (space > (1ull << 13))
        throw std::invalid_argument("clique_design: q^n too large for the adjacency matrix");

    const std::size_t v_count = static_cast<std::size_t>(space);
    std::vector<SymbolVec> words(v_count, SymbolVec(static_cast<std::size_t>(n)));
    for (std::size_t v = 0; v < v_count; ++v)
        word_from_index(static_cast<std::uint32_t>(v), n, q, words[v].data());

    const std::size_t blocks = (v_count + 63) / 64;
    std::vector<std::uint64_t> adj(v_count * blocks, 0);
    std::vector<int> degree(v_count, 0);
    for (std::size_t i = 0; i < v_count; ++i) {
        for (std::size_t j = i + 1; j < v_count; ++j) {
            if (levenshtein_indel(words[i], words[j]) >= d_min) {
                adj[i * blocks + (j >> 6)] |= 1ull << (j & 63);
                adj[j * blocks + (i >> 6)] |= 1ull << (i & 63);
                ++degree[i];
                ++degree[j];
            }
        }
    }

    // greedy vertex ordering: candidates are consumed from the back, so put
    // high-degree vertices last
    std::vector<int> order(v_count);
    for (std::size_t i = 0; i < v_count; ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return degree[a] < degree[b]; });

    CliqueSearch search;
    search.target = target_size;
    search.n_vertices = v_count;
    search.n_blocks = blocks;
    search.adj = &adj;
    search.node_budget = node_budget;
    search.clique_budget = clique_budget;
    search.expand(order);

    CliqueDesignResult res;
    res.cliques_found = search.found.size();
    res.nodes_expanded = search.nodes;
    if (search.found.size() < static_cast<std::size_t>(t)) {
        const auto& b = search.found.empty() ? search.best : search.found.front();
        for (int v : b) res.largest_clique.push_back(words[static_cast<std::size_t>(v)]);
        return res;
    }

    // greedy minimal-overlap selection
    std::vector<std::size_t> chosen{0};
    std::vector<bool> in_union(v_count, false);
    for (int v : search.found[0]) in_union[static_cast<std::size_t>(v)] = true;
    while (chosen.size() < static_cast<std::size_t>(t)) {
        std::size_t best_i = 0;
        int best_overlap = target_size + 1;
        for (std::size_t i = 0; i < search.found.size(); ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            int ov = 0;
            for (int v : search.found[i])
                if (in_union[static_cast<std::size_t>(v)]) ++ov;
            if (ov < best_overlap) {
                best_overlap = ov;
                best_i = i;
            }
        }
        chosen.push_back(best_i);
        for (int v : search.found[best_i]) in_union[static_cast<std::size_t>(v)] = true;
    }

    int kk = 0;
    while ((1 << kk) < target_size) ++kk;
    for (std::size_t ci : chosen) {
        Codebook cb{n, kk, q, {}};
        for (int v : search.found[ci]) cb.words.push_back(words[static_cast<std::size_t>(v)]);
        std::sort(cb.words.begin(), cb.words.end());
        res.codebooks.push_back(std::move(cb));
    }
    res.ok = true;
    return res;
}

// ---------------------------------------------------------------------------

std::vector<int> tvc_schedule(ScheduleKind kind, int t, std::size_t sections, std::uint64_t seed) {
    std::vector<int> sched(sections);
    if (kind == ScheduleKind::round_robin) {
        for (std::size_t i = 0; i < sections; ++i) sched[i] = static_cast<int>(i % t);
        return sched;
    }
    if (t < 2) throw std::invalid_argument("tvc_schedule: random_no_repeat needs t >= 2");
    Rng rng(derive_seed(seed, 0x7c5u));
    int prev = -1;
    for (std::size_t i = 0; i < sections; ++i) {
        int c = rng.symbol(i == 0 ? t : t - 1);
        if (i > 0 && c >= prev) ++c;  // skip the previous index
        sched[i] = c;
        prev = c;
    }
    return sched;
}

OffsetSequence OffsetSequence::make(std::uint64_t seed, std::size_t length, int q) {
    OffsetSequence o;
    o.seed = seed;
    o.symbols.resize(length);
    Rng rng(derive_seed(seed, 0x0ffu));
    for (auto& s : o.symbols) s = static_cast<Symbol>(rng.symbol(q));
    return o;
}

// ---------------------------------------------------------------------------
// InnerCode

InnerCode InnerCode::block(Codebook cb) {
    InnerCode c;
    c.kind_ = Kind::block;
    c.n_ = cb.n;
    c.k_ = cb.k;
    c.q_ = cb.q;
    if (cb.words.size() != (1u << cb.k)) throw std::invalid_argument("block: codebook size != 2^k");
    c.books_.push_back(std::move(cb));
    return c;
}

InnerCode InnerCode::tvc(std::vector<Codebook> cbs, std::vector<int> schedule) {
    if (cbs.empty()) throw std::invalid_argument("tvc: no codebooks");
    InnerCode c;
    c.kind_ = Kind::tvc;
    c.n_ = cbs[0].n;
    c.k_ = cbs[0].k;
    c.q_ = cbs[0].q;
    for (const auto& cb : cbs) {
        if (cb.n != c.n_ || cb.k != c.k_ || cb.q != c.q_ || cb.words.size() != (1u << c.k_))
            throw std::invalid_argument("tvc: inconsistent codebooks");
    }
    for (int s : schedule)
        if (s < 0 || s >= static_cast<int>(cbs.size()))
            throw std::invalid_argument("tvc: schedule index out of range");
    c.books_ = std::move(cbs);
    c.schedule_ = std::move(schedule);
    return c;
}

InnerCode InnerCode::convolutional(int group) {
    if (group != 1 && group != 2 && group != 4)
        throw std::invalid_argument("convolutional: group must be 1, 2 or 4");
    InnerCode c;
    c.kind_ = Kind::convolutional;
    c.n_ = group;
    c.k_ = group;
    c.q_ = 4;
    c.nu_ = 2;
    c.term_sections_ = (2 + group - 1) / group;  // zero-input sections to flush
    const int ns = 4, ni = 1 << group;
    c.next_.resize(static_cast<std::size_t>(ns) * ni);
    c.out_.resize(static_cast<std::size_t>(ns) * ni * group);
    for (int s = 0; s < ns; ++s) {
        for (int w = 0; w < ni; ++w) {
            int st = s;
            for (int j = 0; j < group; ++j) {
                const int u = (w >> (group - 1 - j)) & 1;  // MSB-first input bits
                const int c1 = u ^ ((st >> 1) & 1);        // g = 5 (101)
                const int c2 = u ^ (st & 1) ^ ((st >> 1) & 1);  // g = 7 (111)
                c.out_[(c.idx(s, w)) * group + static_cast<std::size_t>(j)] =
                    static_cast<Symbol>(2 * c1 + c2);  // first generator is MSB
                st = ((st << 1) & 2) | u;
            }
            c.next_[c.idx(s, w)] = st;
        }
    }
    return c;
}

InnerCode InnerCode::identity(int q) {
    int k = 0;
    while ((1 << k) < q) ++k;
    if ((1 << k) != q) throw std::invalid_argument("identity: q must be a power of two");
    Codebook cb{1, k, q, {}};
    for (int s = 0; s < q; ++s) cb.words.push_back(SymbolVec{static_cast<Symbol>(s)});
    return block(std::move(cb));
}

void InnerCode::emit(int s, int w, std::size_t section, Symbol* out) const {
    switch (kind_) {
        case Kind::convolutional: {
            const Symbol* src = out_.data() + idx(s, w) * static_cast<std::size_t>(n_);
            std::copy(src, src + n_, out);
            return;
        }
        case Kind::block: {
            const auto& word = books_[0].words[static_cast<std::size_t>(w)];
            std::copy(word.begin(), word.end(), out);
            return;
        }
        case Kind::tvc: {
            const int cb = schedule_.empty()
                               ? 0
                               : schedule_[section % schedule_.size()];
            const auto& word = books_[static_cast<std::size_t>(cb)].words[static_cast<std::size_t>(w)];
            std::copy(word.begin(), word.end(), out);
            return;
        }
    }
}

SymbolVec InnerCode::encode(std::span<const int> w, const OffsetSequence* offset) const {
    const std::size_t sections = sections_for(w.size());
    SymbolVec x(sections * static_cast<std::size_t>(n_));
    int s = 0;
    for (std::size_t i = 0; i < sections; ++i) {
        const int wi = i < w.size() ? w[i] : 0;
        if (wi < 0 || wi >= num_inputs()) throw std::invalid_argument("encode: symbol out of range");
        emit(s, wi, i, x.data() + i * static_cast<std::size_t>(n_));
        s = next_state(s, wi);
    }
    if (offset) {
        if (offset->symbols.size() < x.size())
            throw std::invalid_argument("encode: offset shorter than codeword");
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = static_cast<Symbol>((x[i] + offset->symbols[i]) % q_);
    }
    return x;
}

SymbolVec encode_inner(std::span<const int> w, const InnerCode& code, const OffsetSequence* offset) {
    return code.encode(w, offset);
}

// ---------------------------------------------------------------------------
// codebook files

void save_codebooks(std::ostream& os, const std::vector<Codebook>& cbs, int d_min) {
    if (cbs.empty()) throw std::invalid_argument("save_codebooks: empty");
    const auto& c0 = cbs[0];
    os << c0.n << ' ' << c0.k << ' ' << c0.q << ' ' << cbs.size() << ' ' << d_min << '\n';
    for (const auto& cb : cbs) {
        for (const auto& word : cb.words) {
            for (std::size_t i = 0; i < word.size(); ++i)
                os << (i ? " " : "") << static_cast<int>(word[i]);
            os << '\n';
        }
    }
}

std::vector<Codebook> load_codebooks(std::istream& is, int* d_min_out) {
    int n = 0, k = 0, q = 0, t = 0, d_min = 0;
    if (!(is >> n >> k >> q >> t >> d_min)) throw std::runtime_error("codebook file: bad header");
    if (d_min_out) *d_min_out = d_min;
    std::vector<Codebook> cbs;
    for (int c = 0; c < t; ++c) {
        Codebook cb{n, k, q, {}};
        for (int w = 0; w < (1 << k); ++w) {
            SymbolVec word(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                int v = 0;
                if (!(is >> v)) throw std::runtime_error("codebook file: truncated");
                if (v < 0 || v >= q) throw std::runtime_error("codebook file: symbol out of range");
                word[static_cast<std::size_t>(i)] = static_cast<Symbol>(v);
            }
            cb.words.push_back(std::move(word));
        }
        cbs.push_back(std::move(cb));
    }
    return cbs;
}

}  // namespace ids
