#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "ids/app.hpp"
#include "ids/channel.hpp"
#include "ids/inner.hpp"

namespace ids {

struct DriftBounds {
    int d_min = 0;
    int d_max = 0;
    int i_max = 2;

    int delta() const { return d_max - d_min + 1; }
    int transitions(int n) const { return n * (i_max + 1) + 1; }
    bool contains(long d) const { return d >= d_min && d <= d_max; }

    // d_max = -d_min = ceil(sigma_mult * sqrt(N p_D / (1 - p_D)))
    static DriftBounds dynamic(std::size_t n_channel, const ChannelParams& params,
                               double sigma_mult = 5.0, int i_max = 2);
};

// Block-level branch metric p(y_segment, d' | d, block) by the lattice
// recursion: horizontal = insertion (p_I / q), vertical = deletion (p_D),
// diagonal = transmission; no insertions in the last row.
double lattice_forward(std::span<const Symbol> x_block, std::span<const Symbol> y_segment,
                       const ChannelParams& params, int i_max = 2);

struct DecodeResult {
    AppMatrix app;  // one row per section, rows sum to 1
    double log_py = -std::numeric_limits<double>::infinity();  // natural log
    double log_py_backward = -std::numeric_limits<double>::infinity();
    bool erasure = false;
    std::uint64_t edges_enumerated = 0;  // drift-transition candidates (Delta*delta count)
    std::uint64_t edges_active = 0;      // candidates surviving bounds and y-window
};

// Symbolwise APPs of one read via forward/backward recursions over the
// (code state, drift) trellis. priors has sections_for(n_outer) rows over
// 2^k; termination sections are forced to symbol 0 internally.
DecodeResult decode_single(std::span<const Symbol> y, const InnerCode& code,
                           const OffsetSequence* offset, const AppMatrix& priors,
                           const ChannelParams& params, const DriftBounds& bounds);

// APPs divided elementwise by the priors, renormalized: the quantity fed
// back during inner-outer iterations.
DecodeResult decode_single_extrinsic(std::span<const Symbol> y, const InnerCode& code,
                                     const OffsetSequence* offset, const AppMatrix& priors,
                                     const ChannelParams& params, const DriftBounds& bounds);

struct ForwardLogProbs {
    double log_py = -std::numeric_limits<double>::infinity();
    double log_pwy = -std::numeric_limits<double>::infinity();
    bool ok = false;
};

// log p(y) and log p(w, y) from the forward recursion and its input-clamped
// variant, with uniform input priors. Used by the information-rate
// estimators.
ForwardLogProbs forward_log_probs(std::span<const Symbol> y, const InnerCode& code,
                                  const OffsetSequence* offset, std::span<const int> w_true,
                                  const ChannelParams& params, const DriftBounds& bounds);

AppMatrix extrinsic_from(const AppMatrix& app, const AppMatrix& priors);

}  // namespace ids
