#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ids/trellis.hpp"

namespace ids {

// Joint decoding refuses configurations whose per-section state space would
// exceed the budget; it grows as (Delta * delta)^M.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kJointStateBudget = 1e7;

// Exact symbolwise APPs given all M reads, via BCJR over the joint
// (code state, drift vector) trellis. The branch metric is the product of
// per-read lattice values times the prior.
DecodeResult decode_joint(std::span<const SymbolVec> reads, const InnerCode& code,
                          const OffsetSequence* offset, const AppMatrix& priors,
                          const ChannelParams& params, const DriftBounds& bounds,
                          double state_budget = kJointStateBudget);

inline DecodeResult decode_joint(const ReadSet& rs, const InnerCode& code,
                                 const OffsetSequence* offset, const AppMatrix& priors,
                                 const ChannelParams& params, const DriftBounds& bounds,
                                 double state_budget = kJointStateBudget) {
    return decode_joint(std::span<const SymbolVec>(rs.reads), code, offset, priors, params,
                        bounds, state_budget);
}

// p(w_i | y_1..y_M) ~ prod_j p(w_i | y_j) / p(w_i)^(M-1), renormalized per
// row. Exact for memoryless channels. Rows collapsing to zero fall back to
// uniform and are flagged.
AppMatrix combine_separate(std::span<const AppMatrix> apps, const AppMatrix& priors,
                           std::size_t* collapsed_rows = nullptr);

// log p(y_1..y_M) and log p(w, y_1..y_M) over the joint trellis.
ForwardLogProbs joint_forward_log_probs(std::span<const SymbolVec> reads, const InnerCode& code,
                                        const OffsetSequence* offset, std::span<const int> w_true,
                                        const ChannelParams& params, const DriftBounds& bounds,
                                        double state_budget = kJointStateBudget);

struct ComplexityReport {
    std::uint64_t edges_single = 0;
    std::uint64_t edges_separate = 0;
    std::uint64_t edges_joint = 0;
    std::uint64_t sections = 0;  // N / n
    int delta = 0;               // drift states
    int transitions = 0;         // delta = n (I_max + 1) + 1
    int nu = 0;
    int k = 0;
    int m_reads = 1;
};

// Closed-form edge counts: C_single = (N/n) 2^(nu+k) Delta delta,
// C_sep = M C_single, C_joint = (N/n) 2^(nu+k) (Delta delta)^M.
ComplexityReport complexity_of(std::size_t n_channel, int n, int nu, int k,
                               const DriftBounds& bounds, int m_reads);

}  // namespace ids
