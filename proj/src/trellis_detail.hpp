#pragma once

// Shared internals of the drift-trellis decoders: per-section block tables
// and cached lattice rows. Not installed.

#include <unordered_map>
#include <vector>

#include "ids/channel.hpp"
#include "ids/inner.hpp"
#include "ids/trellis.hpp"

namespace ids::detail {

inline double q_metric(Symbol y, Symbol x, const ChannelParams& p) {
    return y == x ? p.p_trans() * (1.0 - p.p_sub)
                  : p.p_trans() * p.p_sub / static_cast<double>(p.q - 1);
}

// Last lattice row F[n][mu] for mu in 0..mu_max. avail_mu limits the usable
// y symbols; entries beyond it stay 0.
void lattice_last_row(const Symbol* x, int n, const Symbol* ys, int avail_mu, int mu_max,
                      const ChannelParams& p, double* out);

// Distinct output blocks of one trellis section, offset applied.
struct SectionBlocks {
    int n = 0;
    int num_blocks = 0;
    std::vector<int> block_of;     // [s * ni + w] -> block id
    std::vector<Symbol> symbols;   // [id * n]

    void build(const InnerCode& code, const OffsetSequence* offset, std::size_t section);

private:
    std::unordered_map<std::uint64_t, int> seen_;
};

// Lazily computed lattice rows for one section: one row of mu values per
// (block, drift at section entry).
class LatticeCache {
public:
    void reset(const SectionBlocks* blocks, const Symbol* y, std::size_t y_len, long y_base,
               int mu_max, int d_min, int d_max, const ChannelParams* params);

    // nullptr when the section start lies before the first received symbol
    const double* row(int block, int d);

    int mu_max() const { return mu_max_; }

private:
    const SectionBlocks* blocks_ = nullptr;
    const Symbol* y_ = nullptr;
    std::size_t y_len_ = 0;
    long y_base_ = 0;
    int mu_max_ = 0;
    int d_min_ = 0, d_max_ = 0;
    const ChannelParams* params_ = nullptr;
    std::vector<double> rows_;
    std::vector<char> state_;  // 0 = not computed, 1 = valid, 2 = invalid
};

}  // namespace ids::detail
