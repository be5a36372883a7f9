#include "ids/channel.hpp"

#include <stdexcept>

namespace ids {

void ChannelParams::validate() const {
    if (p_ins < 0 || p_del < 0 || p_sub < 0 || p_ins > 1 || p_del > 1 || p_sub > 1)
        throw std::invalid_argument("channel: probabilities must be in [0, 1]");
    if (p_ins + p_del > 1.0) throw std::invalid_argument("channel: p_ins + p_del > 1");
    if (p_ins >= 1.0) throw std::invalid_argument("channel: p_ins must be < 1");
    if (q < 2) throw std::invalid_argument("channel: q must be >= 2");
}

namespace {

Symbol substitute(Symbol x, int q, double p_sub, Rng& rng, bool* subbed) {
    *subbed = p_sub > 0.0 && rng.bernoulli(p_sub);
    if (!*subbed) return x;
    // uniform among the q-1 other symbols
    const int off = 1 + rng.symbol(q - 1);
    return static_cast<Symbol>((x + off) % q);
}

}  // namespace

SymbolVec transmit(std::span<const Symbol> x, const ChannelParams& params, Rng& rng,
                   std::vector<ChannelEvent>* trace, ChannelCounters* counters) {
    params.validate();
    SymbolVec y;
    y.reserve(x.size() + x.size() / 4 + 4);
    const double p_leave = 1.0 - params.p_ins;
    // conditional deletion probability given the symbol leaves the queue
    const double p_del_given_leave = p_leave > 0.0 ? params.p_del / p_leave : 0.0;

    for (Symbol xi : x) {
        if (counters) ++counters->inputs;
        const int ins = rng.geometric(params.p_ins);
        for (int j = 0; j < ins; ++j) {
            const Symbol a = static_cast<Symbol>(rng.symbol(params.q));
            y.push_back(a);
            if (trace) trace->push_back({ChannelEvent::insert, a, false});
            if (counters) ++counters->insertions;
        }
        if (rng.bernoulli(p_del_given_leave)) {
            if (trace) trace->push_back({ChannelEvent::erase, 0, false});
            if (counters) ++counters->deletions;
        } else {
            bool subbed = false;
            const Symbol out = substitute(xi, params.q, params.p_sub, rng, &subbed);
            y.push_back(out);
            if (trace) trace->push_back({ChannelEvent::transmit, out, subbed});
            if (counters) {
                ++counters->transmissions;
                if (subbed) ++counters->substitutions;
            }
        }
    }
    return y;
}

SymbolVec transmit_bernoulli(std::span<const Symbol> x, const ChannelParams& params, Rng& rng) {
    params.validate();
    SymbolVec y;
    for (Symbol xi : x) {
        while (true) {
            const double u = rng.real();
            if (u < params.p_ins) {
                y.push_back(static_cast<Symbol>(rng.symbol(params.q)));
            } else if (u < params.p_ins + params.p_del) {
                break;  // deleted
            } else {
                bool subbed = false;
                y.push_back(substitute(xi, params.q, params.p_sub, rng, &subbed));
                break;
            }
        }
    }
    return y;
}

ReadSet transmit_multi(std::span<const Symbol> x, const ChannelParams& params, int m, Rng& rng) {
    if (m < 1) throw std::invalid_argument("channel: M must be >= 1");
    ReadSet rs;
    rs.source_length = x.size();
    rs.reads.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) rs.reads.push_back(transmit(x, params, rng));
    return rs;
}

}  // namespace ids
