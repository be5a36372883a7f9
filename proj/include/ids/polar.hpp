#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "ids/app.hpp"
#include "ids/gf.hpp"
#include "ids/rng.hpp"

namespace ids::polar {

// CRC-8 with polynomial 0x07, init 0, no reflection.
std::uint8_t crc8(std::span<const std::uint8_t> bits);

// MSB-first packing between GF(2^k) symbols and bits.
std::vector<std::uint8_t> symbols_to_bits(std::span<const int> symbols, int k);
std::vector<int> bits_to_symbols(std::span<const std::uint8_t> bits, int k);

struct PolarSpec {
    std::size_t n_outer = 0;  // block length in symbols, power of two
    std::size_t k_info = 0;   // information symbols
    int alpha = 1;
    int beta = 1;  // kernel (1 0; alpha beta), beta != 0
    int crc_bits = 8;
    int list_size = 32;
    std::vector<std::uint32_t> frozen;  // sorted indices, value 0

    std::size_t crc_symbols(int field_k) const {
        return (static_cast<std::size_t>(crc_bits) + static_cast<std::size_t>(field_k) - 1) /
               static_cast<std::size_t>(field_k);
    }
    void validate(const gf::Field& field) const;
};

// w = u K^kron; natural index order, no bit reversal.
std::vector<int> polar_transform(std::span<const int> u, const gf::Field& field, int alpha,
                                 int beta);
std::vector<int> polar_transform_inv(std::span<const int> w, const gf::Field& field, int alpha,
                                     int beta);

// Assembles u from info + CRC on the non-frozen positions and transforms.
std::vector<int> encode_polar(std::span<const int> info, const PolarSpec& spec,
                              const gf::Field& field);

struct SclResult {
    std::vector<int> info;
    bool crc_ok = false;
    std::vector<int> u_best;
    double penalty = 0.0;  // accumulated -log posterior of the winning path
};

// CRC-aided successive cancellation list decoding over GF(q). apps rows are
// the (possibly mismatched) symbol likelihoods of the codeword positions.
SclResult decode_scl(const AppMatrix& apps, const PolarSpec& spec, const gf::Field& field);

// ---------------------------------------------------------------------------
// Monte-Carlo design

// Auxiliary-channel APP samples, one entry per decoded frame so that both
// samples of a trial can be drawn from the same received sequence.
struct AppPool {
    struct Frame {
        AppMatrix app;
        std::vector<int> w;
        std::vector<std::vector<std::uint32_t>> positions_by_value;

        void index(int q);
    };
    int q = 0;
    std::vector<Frame> frames;

    void add(AppMatrix app, std::vector<int> w);
    bool usable() const;
};

struct KernelScore {
    int alpha = 1;
    double failure = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

// Single-level polarization failure E(1 - p(u2 | u1=0, y)) per ratio
// alpha/beta with beta = 1; both APP samples of a trial come from one frame
// (they condition on the same y), drawn with replacement among the positions
// carrying the required symbol values. Sorted ascending by failure rate.
std::vector<KernelScore> optimize_kernel(const AppPool& pool, const gf::Field& field,
                                         std::size_t trials, Rng& rng);

// Draws one auxiliary-channel frame: codeword-position APPs and the true w.
using FrameProvider = std::function<std::pair<AppMatrix, std::vector<int>>(Rng&)>;

// Genie-aided rate-one SC: per-position hard-decision error counts over the
// given number of frames.
std::vector<std::uint64_t> genie_error_counts(const FrameProvider& provider, std::size_t n_outer,
                                              const gf::Field& field, int alpha, int beta,
                                              std::size_t frames, Rng& rng);

// The n_freeze positions with the highest genie error frequency are frozen
// (ties to the lower index).
std::vector<std::uint32_t> select_frozen(const FrameProvider& provider, std::size_t n_outer,
                                         std::size_t n_freeze, const gf::Field& field, int alpha,
                                         int beta, std::size_t frames, Rng& rng);

// Frozen-set file: header "N_o K q_o alpha beta crc_bits", then one index per
// line.
void save_frozen(std::ostream& os, const PolarSpec& spec, const gf::Field& field);
PolarSpec load_frozen(std::istream& is, int* q_out = nullptr);

}  // namespace ids::polar
