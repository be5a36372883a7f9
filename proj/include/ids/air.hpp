#pragma once

#include <cstdint>
#include <string>

#include "ids/channel.hpp"
#include "ids/scheme.hpp"

namespace ids::air {

struct RateEstimate {
    double bits_per_use = 0.0;
    double std_error = 0.0;
    std::size_t frames = 0;
    std::size_t erasures = 0;
    std::size_t channel_uses = 0;  // per read, n * (N_o + m)
    std::string estimator;
};

enum class CombineMode { separate, joint };

struct AirOptions {
    int i_max = 2;
    double sigma_mult = 5.0;
    double sigma_escalated = 10.0;
    double joint_budget = 1e7;
};

// Achievable rate of a decoder that consumes the symbolwise APPs once:
// ((N_o+m) log2 q_o + sum_i log2 softmax(L_i)(w_i)) / channel uses, with the
// mismatched log-likelihood ratios taken at the true transmitted symbols.
RateEstimate bcjr_once_rate(const Scheme& scheme, const ChannelParams& params, int m_reads,
                            std::size_t n_outer, CombineMode mode, std::size_t frames,
                            std::uint64_t seed, const AirOptions& opt = {});

// ((N_o+m) log2 q_o + log2 p(w,y) - log2 p(y)) / channel uses from the
// forward recursion and its input-clamped variant.
RateEstimate mutual_info_rate(const Scheme& scheme, const ChannelParams& params, int m_reads,
                              std::size_t n_outer, std::size_t frames, std::uint64_t seed,
                              const AirOptions& opt = {});

// Identity inner code evaluated on the full lattice over the whole sequence
// (no drift truncation). Exact joint evaluation is supported for M <= 2.
RateEstimate uncoded_mi_rate(const ChannelParams& params, int m_reads, std::size_t n_channel,
                             std::size_t frames, std::uint64_t seed);

// log2 of the whole-sequence lattice value p(y | x), row-scaled.
double full_lattice_log2(std::span<const Symbol> x, std::span<const Symbol> y,
                         const ChannelParams& params);

// log2 p(y) for a uniform i.i.d. input sequence of length n (input-averaged
// full lattice).
double averaged_lattice_log2(std::size_t n, std::span<const Symbol> y,
                             const ChannelParams& params);

// log2 p(y1, y2) for uniform i.i.d. input, exact 3-D lattice.
double averaged_lattice2_log2(std::size_t n, std::span<const Symbol> y1,
                              std::span<const Symbol> y2, const ChannelParams& params);

}  // namespace ids::air
