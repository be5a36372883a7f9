#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ids/channel.hpp"
#include "ids/rng.hpp"

namespace ids {

struct Codebook {
    int n = 0;  // word length in channel symbols
    int k = 0;  // input bits, 2^k words
    int q = 0;  // channel alphabet size
    std::vector<SymbolVec> words;
};

// Indel-only Levenshtein distance: |a| + |b| - 2 LCS(a, b).
int levenshtein_indel(std::span<const Symbol> a, std::span<const Symbol> b);

// The 2^k lowest-Hamming-weight words of Sigma_q^n, ties broken by ascending
// base-q integer value (most significant symbol first).
Codebook dm_construct(int n, int k, int q);

struct VerifyResult {
    bool ok = false;
    int min_distance = 0;
    std::pair<std::size_t, std::size_t> worst_pair{0, 0};
};
VerifyResult verify_codebook(const Codebook& cb, int d_min);

struct CliqueDesignResult {
    bool ok = false;
    std::vector<Codebook> codebooks;       // t codebooks on success
    std::vector<SymbolVec> largest_clique; // best clique found on failure
    std::size_t cliques_found = 0;
    std::uint64_t nodes_expanded = 0;
};

// Vertices are all words of Sigma_q^n, edges where levenshtein_indel >= d_min.
// Branch-and-bound collects cliques of the target size, then t of them are
// chosen greedily to minimize overlap with the union of those already chosen.
CliqueDesignResult clique_design(int n, int q, int d_min, int target_size, int t,
                                 std::uint64_t node_budget = 4'000'000,
                                 std::size_t clique_budget = 512);

enum class ScheduleKind { round_robin, random_no_repeat };

// Deterministic codebook index per section. random_no_repeat never yields the
// same index twice in a row.
std::vector<int> tvc_schedule(ScheduleKind kind, int t, std::size_t sections, std::uint64_t seed);

struct OffsetSequence {
    std::uint64_t seed = 0;
    SymbolVec symbols;
    static OffsetSequence make(std::uint64_t seed, std::size_t length, int q);
};

// Trellis-sectioned inner encoder: block codes and TVCs (memory zero) and the
// grouped [5,7]_oct convolutional code. One section consumes one input symbol
// of k bits and emits n channel symbols.
class InnerCode {
public:
    enum class Kind { block, tvc, convolutional };

    static InnerCode block(Codebook cb);
    static InnerCode tvc(std::vector<Codebook> cbs, std::vector<int> schedule);
    // grouped sections of g = [5,7]_oct; group in {1, 2, 4}: k = group bits in,
    // n = group quaternary symbols out (output bit pairs mapped MSB-first)
    static InnerCode convolutional(int group);
    static InnerCode identity(int q);  // n = 1 passthrough, q a power of two

    Kind kind() const { return kind_; }
    int n() const { return n_; }
    int k() const { return k_; }
    int q() const { return q_; }
    int nu() const { return nu_; }  // binary memory elements
    int term_sections() const { return term_sections_; }
    int num_states() const { return 1 << nu_; }
    int num_inputs() const { return 1 << k_; }
    std::size_t sections_for(std::size_t n_outer) const { return n_outer + term_sections_; }

    int next_state(int s, int w) const { return next_.empty() ? 0 : next_[idx(s, w)]; }
    // n output symbols of section (0-based), before offset
    void emit(int s, int w, std::size_t section, Symbol* out) const;

    // terminated encoding of the outer symbols, offset added mod q if present
    SymbolVec encode(std::span<const int> w, const OffsetSequence* offset = nullptr) const;

private:
    InnerCode() = default;
    std::size_t idx(int s, int w) const {
        return static_cast<std::size_t>(s) * static_cast<std::size_t>(num_inputs()) +
               static_cast<std::size_t>(w);
    }

    Kind kind_ = Kind::block;
    int n_ = 0, k_ = 0, q_ = 0, nu_ = 0, term_sections_ = 0;
    std::vector<int> next_;        // [state][input]
    std::vector<Symbol> out_;      // [state][input] -> n symbols (conv/block)
    std::vector<Codebook> books_;  // tvc
    std::vector<int> schedule_;    // tvc: section -> codebook index
};

SymbolVec encode_inner(std::span<const int> w, const InnerCode& code,
                       const OffsetSequence* offset = nullptr);

// Codebook file format: header "n k q t d_min", then t*2^k words, one per
// line as space-separated symbols.
void save_codebooks(std::ostream& os, const std::vector<Codebook>& cbs, int d_min);
std::vector<Codebook> load_codebooks(std::istream& is, int* d_min = nullptr);

}  // namespace ids
