#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ids/app.hpp"
#include "ids/gf.hpp"
#include "ids/rng.hpp"

namespace ids::ldpc {

struct Protograph {
    std::size_t rows = 0;  // check-node types
    std::size_t cols = 0;  // variable-node types
    std::vector<int> b;    // row-major edge multiplicities

    int& at(std::size_t r, std::size_t c) { return b[r * cols + c]; }
    int at(std::size_t r, std::size_t c) const { return b[r * cols + c]; }
    double design_rate() const {
        return static_cast<double>(cols - rows) / static_cast<double>(cols);
    }
    int max_entry() const;
};

// Base-matrix file: header "rows cols", then dense integer entries.
Protograph load_protograph(std::istream& is);
void save_protograph(std::ostream& os, const Protograph& p);

// Lifted nonbinary parity check: the Tanner-graph structure plus per-edge
// GF(q) weights.
struct NbParityCheck {
    std::size_t rows = 0, cols = 0;
    int q = 0;
    std::vector<std::uint32_t> edge_row, edge_col;
    std::vector<int> weight;                    // per edge, nonzero
    std::vector<std::vector<std::uint32_t>> row_edges, col_edges;
    int girth = 0;

    std::size_t num_edges() const { return edge_row.size(); }
    void rebuild_adjacency();
};

// Replace each base entry b_ij by b_ij distinct circulant shifts of size Q,
// offsets chosen greedily to maximize the girth (progressive edge growth
// style); several seeded attempts, best girth wins. Nonzero weights are
// drawn uniformly from GF(q) \ {0}.
NbParityCheck lift(const Protograph& proto, std::size_t q_lift, const gf::Field& field, Rng& rng,
                   int attempts = 12);

void refresh_weights(NbParityCheck& h, const gf::Field& field, Rng& rng);

int tanner_girth(const NbParityCheck& h);

// Sparse triplet exchange format: header "rows cols q_o", then one
// "row col gf_weight" line per edge.
void save_parity_check(std::ostream& os, const NbParityCheck& h);
NbParityCheck load_parity_check(std::istream& is);

// Systematic-style encoder for one weight assignment (Gaussian elimination
// over GF(q)). dimension() = cols - rank; info symbols land on the non-pivot
// positions.
class Encoder {
public:
    Encoder(const NbParityCheck& h, const gf::Field& field);
    std::size_t dimension() const { return info_cols_.size(); }
    const std::vector<std::uint32_t>& info_positions() const { return info_cols_; }
    std::vector<int> encode(std::span<const int> info) const;

private:
    const gf::Field& field_;
    std::size_t cols_;
    std::vector<std::uint32_t> info_cols_;
    std::vector<std::uint32_t> pivot_cols_;
    std::vector<std::vector<int>> reduced_;  // [pivot row] x cols, reduced row echelon
};

bool syndrome_zero(const NbParityCheck& h, const gf::Field& field, std::span<const int> word);

struct BpResult {
    std::vector<int> hard;
    bool converged = false;
    int iterations = 0;
    AppMatrix posterior;
    AppMatrix extrinsic;  // posterior with the channel term divided out
};

// Flooding sum-product over GF(q) with per-edge weight permutations; stops
// early on a zero syndrome.
BpResult decode_bp(const AppMatrix& apps, const NbParityCheck& h, const gf::Field& field,
                   int max_iter = 100);

// ---------------------------------------------------------------------------
// Monte-Carlo density evolution

// Draws error-referenced channel APP rows (true symbol relabeled to 0) for a
// given p = p_ins = p_del. Provided by the simulation layer.
using PoolSampler =
    std::function<std::vector<std::vector<double>>(double p, std::size_t min_rows, Rng& rng)>;

struct DeBudget {
    std::size_t population = 1000;   // samples per protograph edge
    int iterations = 100;            // DE iterations per probe
    int bisect_steps = 8;
    std::size_t pool_rows = 48000;   // channel samples per probe (>= 200 frames' worth)
    double p_lo = 0.0;
    double p_hi = 0.25;
    double target_ser = 1e-3;
};

struct ThresholdEstimate {
    double p_point = 0.0;
    double p_lo = 0.0;
    double p_hi = 0.0;
    bool stable = false;  // false when the bracket never separated
    std::vector<double> ser_trace_at_point;
};

// Bisection over p of a sampled density-evolution convergence check: SER
// below target and strictly decreasing over the last 10 iterations.
ThresholdEstimate estimate_threshold(const Protograph& proto, const gf::Field& field,
                                     const PoolSampler& sampler, const DeBudget& budget,
                                     Rng& rng);

// One DE run at a fixed channel pool; returns the per-iteration SER trace.
std::vector<double> de_ser_trace(const Protograph& proto, const gf::Field& field,
                                 const std::vector<std::vector<double>>& pool,
                                 std::size_t population, int iterations, Rng& rng);

bool de_converged(const std::vector<double>& trace, double target_ser);

}  // namespace ids::ldpc
