#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ids/rng.hpp"

namespace ids {

using Symbol = std::uint8_t;
using SymbolVec = std::vector<Symbol>;

struct ChannelParams {
    double p_ins = 0.0;
    double p_del = 0.0;
    double p_sub = 0.0;
    int q = 4;

    double p_trans() const { return 1.0 - p_ins - p_del; }
    void validate() const;
};

// One channel event per entry, in emission order. Insertions and
// transmissions carry the emitted symbol; deletions carry none.
struct ChannelEvent {
    enum Kind : std::uint8_t { insert, erase, transmit } kind;
    Symbol emitted;      // valid for insert/transmit
    bool substituted;    // valid for transmit
};

struct ChannelCounters {
    std::uint64_t inputs = 0;
    std::uint64_t insertions = 0;
    std::uint64_t deletions = 0;
    std::uint64_t transmissions = 0;
    std::uint64_t substitutions = 0;
};

struct ReadSet {
    std::vector<SymbolVec> reads;
    std::size_t source_length = 0;
};

// Sample the state-based IDS channel: while a symbol is queued, a geometric
// number of uniform insertions is emitted, then the symbol is deleted or
// transmitted (substituted uniformly among the q-1 other symbols). The
// process ends when the last input symbol leaves the queue, so there are no
// trailing insertions.
SymbolVec transmit(std::span<const Symbol> x, const ChannelParams& params, Rng& rng,
                   std::vector<ChannelEvent>* trace = nullptr,
                   ChannelCounters* counters = nullptr);

// Same distribution as transmit(), insertions sampled by a Bernoulli loop.
// Kept for the distribution-equivalence test of the geometric sampler.
SymbolVec transmit_bernoulli(std::span<const Symbol> x, const ChannelParams& params, Rng& rng);

ReadSet transmit_multi(std::span<const Symbol> x, const ChannelParams& params, int m, Rng& rng);

}  // namespace ids
