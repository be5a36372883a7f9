#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ids/air.hpp"
#include "ids/channel.hpp"
#include "ids/ldpc.hpp"
#include "ids/multiseq.hpp"
#include "ids/polar.hpp"
#include "ids/scheme.hpp"

namespace ids::sim {

enum class DecodeMode { single, separate, joint };
enum class OuterKind { none, ldpc, polar };

std::string to_string(DecodeMode m);
DecodeMode decode_mode_from(const std::string& s);

struct ExperimentConfig {
    std::vector<double> p_grid;
    double p_sub = 0.0;
    int q_channel = 4;
    std::string scheme_id = "TVC-2";
    OuterKind outer = OuterKind::none;
    std::string outer_file;   // ldpc: protograph file; polar: frozen-set file
    std::size_t lift = 60;    // ldpc lift size
    std::size_t n_outer = 240;
    int m_reads = 1;
    DecodeMode mode = DecodeMode::separate;
    int turbo_iters = 0;
    bool turbo_extrinsic = true;  // false: feed back full APPs instead
    int bp_iters = 100;
    int list_size = 32;
    std::uint64_t frames_target = 1000;
    std::uint64_t error_target = 100;
    std::size_t air_frames = 0;  // 0: pick from n_outer
    std::vector<std::string> estimators = {"bcjr-once", "mi"};
    std::uint64_t seed = 1;
    int i_max = 2;
    double sigma_mult = 5.0;
    double sigma_escalated = 10.0;
    double joint_budget = kJointStateBudget;

    std::string canonical() const;
    std::string hash_hex() const;
};

struct FerRow {
    double p = 0;
    int m = 1;
    std::string mode;
    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    double fer = 0;
    double wallclock = 0;  // seconds; emitted as 0 unless timing was requested
    bool capacity_error = false;
};

struct AirRow {
    double p = 0;
    int m = 1;
    std::string estimator;
    double bits_per_use = 0;
    double std_error = 0;
    std::uint64_t frames = 0;
};

// ---------------------------------------------------------------------------
// one-frame pipeline

struct FrameVerdict {
    bool error = false;
    bool erasure = false;
};

// Inner decode of one frame's reads under the chosen mode, with the 5/10
// sigma bound escalation. Returns the combined info-section APPs.
struct InnerDecode {
    AppMatrix app;  // n_outer rows over q_o
    bool erasure = false;
    std::vector<AppMatrix> per_read;  // separate mode only
};

InnerDecode decode_inner(const std::vector<SymbolVec>& reads, const FrameCode& fc,
                         std::size_t n_outer, const AppMatrix& priors,
                         const ChannelParams& params, DecodeMode mode,
                         const ExperimentConfig& cfg, std::size_t n_channel);

// Prebuilt outer code plus the per-frame pipeline.
class Pipeline {
public:
    explicit Pipeline(const ExperimentConfig& cfg);

    FrameVerdict run_frame(double p, std::uint64_t frame_seed) const;
    std::size_t n_outer() const { return n_outer_; }
    const Scheme& scheme() const { return scheme_; }

private:
    ExperimentConfig cfg_;
    Scheme scheme_;
    std::size_t n_outer_;
    std::optional<ldpc::NbParityCheck> ldpc_;
    std::optional<polar::PolarSpec> polar_;
};

std::vector<FerRow> run_fer(const ExperimentConfig& cfg);
std::vector<AirRow> run_air(const ExperimentConfig& cfg);

// CSV emission; fixed column order, config hash appended to every row.
// Wallclock is emitted as 0 unless with_timing.
void write_fer_csv(std::ostream& os, const ExperimentConfig& cfg,
                   const std::vector<FerRow>& rows, bool with_timing = false);
void write_air_csv(std::ostream& os, const ExperimentConfig& cfg,
                   const std::vector<AirRow>& rows);

// ---------------------------------------------------------------------------
// auxiliary-channel sample sources for the design procedures

struct InnerSample {
    AppMatrix app;  // info rows over q_o
    std::vector<int> w;
    bool erasure = false;
};

InnerSample sample_inner_frame(const Scheme& scheme, const ChannelParams& params, int m_reads,
                               DecodeMode mode, std::size_t n_outer, std::uint64_t frame_seed,
                               const ExperimentConfig& cfg);

// APP rows bucketed by the transmitted symbol (kernel optimization).
polar::AppPool build_app_pool(const Scheme& scheme, const ChannelParams& params, int m_reads,
                              DecodeMode mode, std::size_t n_outer, std::size_t min_samples,
                              std::uint64_t seed);

// Error-referenced rows (true symbol relabeled to 0) for density evolution.
ldpc::PoolSampler make_de_pool_sampler(const Scheme& scheme, int m_reads, DecodeMode mode,
                                       std::size_t n_outer, int q_channel, double p_sub,
                                       std::uint64_t seed);

polar::FrameProvider make_polar_frame_provider(const Scheme& scheme, const ChannelParams& params,
                                               int m_reads, DecodeMode mode, std::size_t n_outer);

// deterministic worker pool: results are aggregated in index order, so the
// outcome is identical for any worker count (IDSC_WORKERS)
int worker_count();
void parallel_for_indexed(std::size_t count, const std::function<void(std::size_t)>& fn,
                          int workers = 0);

}  // namespace ids::sim
