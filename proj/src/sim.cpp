#include "ids/sim.hpp"

#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ids::sim {

std::string to_string(DecodeMode m) {
    switch (m) {
        case DecodeMode::single: return "single";
        case DecodeMode::separate: return "separate";
        case DecodeMode::joint: return "joint";
    }
    return "?";
}

DecodeMode decode_mode_from(const std::string& s) {
    if (s == "single") return DecodeMode::single;
    if (s == "separate") return DecodeMode::separate;
    if (s == "joint") return DecodeMode::joint;
    throw std::invalid_argument("unknown decode mode: " + s);
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

const char* outer_name(OuterKind k) {
    switch (k) {
        case OuterKind::none: return "none";
        case OuterKind::ldpc: return "ldpc";
        case OuterKind::polar: return "polar";
    }
    return "?";
}

}  // namespace

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os << "scheme=" << scheme_id << ";outer=" << outer_name(outer) << ";outer_file=" << outer_file
       << ";lift=" << lift << ";n_outer=" << n_outer << ";M=" << m_reads
       << ";mode=" << to_string(mode) << ";turbo=" << turbo_iters
       << ";turbo_ext=" << (turbo_extrinsic ? 1 : 0) << ";bp=" << bp_iters
       << ";list=" << list_size << ";frames=" << frames_target << ";errors=" << error_target
       << ";air_frames=" << air_frames << ";seed=" << seed << ";imax=" << i_max
       << ";sigma=" << fmt("%g", sigma_mult) << ";sigma_esc=" << fmt("%g", sigma_escalated)
       << ";psub=" << fmt("%g", p_sub) << ";q=" << q_channel << ";p=";
    for (std::size_t i = 0; i < p_grid.size(); ++i) os << (i ? "," : "") << fmt("%g", p_grid[i]);
    os << ";est=";
    for (std::size_t i = 0; i < estimators.size(); ++i) os << (i ? "," : "") << estimators[i];
    return os.str();
}

std::string ExperimentConfig::hash_hex() const {
    // FNV-1a 64
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : canonical()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

// ---------------------------------------------------------------------------

int worker_count() {
    if (const char* env = std::getenv("IDSC_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    return 1;
}

void parallel_for_indexed(std::size_t count, const std::function<void(std::size_t)>& fn,
                          int workers) {
    if (workers <= 0) workers = worker_count();
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min<int>(workers, static_cast<int>(count));
    pool.reserve(static_cast<std::size_t>(nw));
    for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// inner decode with bound escalation

InnerDecode decode_inner(const std::vector<SymbolVec>& reads, const FrameCode& fc,
                         std::size_t n_outer, const AppMatrix& priors,
                         const ChannelParams& params, DecodeMode mode,
                         const ExperimentConfig& cfg, std::size_t n_channel) {
    InnerDecode out;
    const DriftBounds base = DriftBounds::dynamic(n_channel, params, cfg.sigma_mult, cfg.i_max);
    const DriftBounds esc =
        DriftBounds::dynamic(n_channel, params, cfg.sigma_escalated, cfg.i_max);

    auto drift_of = [&](const SymbolVec& y) {
        return static_cast<long>(y.size()) - static_cast<long>(n_channel);
    };

    if (mode == DecodeMode::joint) {
        DriftBounds b = base;
        bool ok = true;
        for (const auto& y : reads) ok = ok && base.contains(drift_of(y));
        if (!ok) {
            b = esc;
            ok = true;
            for (const auto& y : reads) ok = ok && esc.contains(drift_of(y));
        }
        if (!ok) {
            out.erasure = true;
            out.app = AppMatrix::uniform(n_outer, priors.q());
            return out;
        }
        auto r = decode_joint(reads, fc.code, fc.offset_ptr(), priors, params, b,
                              cfg.joint_budget);
        out.erasure = r.erasure;
        out.app = AppMatrix(n_outer, priors.q());
        for (std::size_t i = 0; i < n_outer; ++i)
            for (int a = 0; a < priors.q(); ++a) out.app.at(i, a) = r.app.at(i, a);
        return out;
    }

    const std::size_t use_reads = mode == DecodeMode::single ? 1 : reads.size();
    for (std::size_t j = 0; j < use_reads; ++j) {
        const auto& y = reads[j];
        const DriftBounds* b = nullptr;
        if (base.contains(drift_of(y)))
            b = &base;
        else if (esc.contains(drift_of(y)))
            b = &esc;
        else
            continue;
        auto r = decode_single(y, fc.code, fc.offset_ptr(), priors, params, *b);
        if (r.erasure) continue;
        AppMatrix info(n_outer, priors.q());
        for (std::size_t i = 0; i < n_outer; ++i)
            for (int a = 0; a < priors.q(); ++a) info.at(i, a) = r.app.at(i, a);
        out.per_read.push_back(std::move(info));
    }
    if (out.per_read.empty()) {
        out.erasure = true;
        out.app = AppMatrix::uniform(n_outer, priors.q());
        return out;
    }
    if (out.per_read.size() == 1) {
        out.app = out.per_read[0];
        return out;
    }
    AppMatrix pri_pos = priors;
    pri_pos.normalize_rows();
    out.app = combine_separate(out.per_read, pri_pos);
    return out;
}

// ---------------------------------------------------------------------------
// pipeline

Pipeline::Pipeline(const ExperimentConfig& cfg) : cfg_(cfg), scheme_(scheme_by_id(cfg.scheme_id)) {
    n_outer_ = cfg.n_outer;
    if (cfg.outer == OuterKind::ldpc) {
        std::ifstream is(cfg.outer_file);
        if (!is) throw std::runtime_error("cannot open protograph file: " + cfg.outer_file);
        const auto proto = ldpc::load_protograph(is);
        Rng rng(derive_seed(cfg.seed, 0x11f7u));
        ldpc_ = ldpc::lift(proto, cfg.lift, gf::Field::of(scheme_.k()), rng);
        n_outer_ = ldpc_->cols;
    } else if (cfg.outer == OuterKind::polar) {
        std::ifstream is(cfg.outer_file);
        if (!is) throw std::runtime_error("cannot open frozen-set file: " + cfg.outer_file);
        int qf = 0;
        polar_ = polar::load_frozen(is, &qf);
        if (qf != (1 << scheme_.k()))
            throw std::runtime_error("frozen-set field does not match the inner scheme");
        polar_->list_size = cfg.list_size;
        n_outer_ = polar_->n_outer;
    }
}

FrameVerdict Pipeline::run_frame(double p, std::uint64_t frame_seed) const {
    Rng rng(frame_seed);
    ChannelParams params{p, p, cfg_.p_sub, cfg_.q_channel};
    const gf::Field& field = gf::Field::of(scheme_.k());
    const int q_o = field.q();

    // outer encode
    std::vector<int> w;
    std::vector<int> info;
    std::optional<ldpc::NbParityCheck> h_frame;
    std::optional<ldpc::Encoder> enc;
    if (cfg_.outer == OuterKind::ldpc) {
        h_frame = *ldpc_;
        const std::size_t want = h_frame->cols - h_frame->rows;
        for (int attempt = 0; attempt < 8; ++attempt) {
            ldpc::refresh_weights(*h_frame, field, rng);
            enc.emplace(*h_frame, field);
            if (enc->dimension() == want) break;
        }
        info.resize(enc->dimension());
        for (auto& u : info) u = rng.symbol(q_o);
        w = enc->encode(info);
    } else if (cfg_.outer == OuterKind::polar) {
        info.resize(polar_->k_info);
        for (auto& u : info) u = rng.symbol(q_o);
        w = polar::encode_polar(info, *polar_, field);
    } else {
        w.resize(n_outer_);
        for (auto& wi : w) wi = rng.symbol(q_o);
    }

    const FrameCode fc = make_frame_code(scheme_, n_outer_, frame_seed);
    const SymbolVec x = fc.code.encode(w, fc.offset_ptr());
    const ReadSet rs = transmit_multi(x, params, cfg_.m_reads, rng);

    FrameVerdict v;
    AppMatrix priors = AppMatrix::uniform(n_outer_, q_o);

    if (cfg_.outer == OuterKind::ldpc && cfg_.turbo_iters > 0) {
        // inner-outer iterations exchanging extrinsic information
        AppMatrix inner_priors = priors;
        ldpc::BpResult bp;
        bool any = false;
        for (int t = 0; t <= cfg_.turbo_iters; ++t) {
            InnerDecode id =
                decode_inner(rs.reads, fc, n_outer_, inner_priors, params, cfg_.mode, cfg_, x.size());
            if (id.erasure) {
                v.error = true;
                v.erasure = true;
                return v;
            }
            AppMatrix to_outer = extrinsic_from(id.app, inner_priors);
            bp = ldpc::decode_bp(to_outer, *h_frame, field, cfg_.bp_iters);
            any = true;
            if (bp.converged) break;
            inner_priors = cfg_.turbo_extrinsic ? bp.extrinsic : bp.posterior;
        }
        v.error = !any || !(bp.hard == w);
        return v;
    }

    InnerDecode id = decode_inner(rs.reads, fc, n_outer_, priors, params, cfg_.mode, cfg_, x.size());
    if (id.erasure) {
        v.error = true;
        v.erasure = true;
        return v;
    }

    if (cfg_.outer == OuterKind::ldpc) {
        const auto bp = ldpc::decode_bp(id.app, *h_frame, field, cfg_.bp_iters);
        v.error = !(bp.hard == w);
    } else if (cfg_.outer == OuterKind::polar) {
        const auto scl = polar::decode_scl(id.app, *polar_, field);
        v.error = !(scl.info == info);
    } else {
        for (std::size_t i = 0; i < n_outer_ && !v.error; ++i)
            if (id.app.argmax_row(i) != w[i]) v.error = true;
    }
    return v;
}

// ---------------------------------------------------------------------------

std::vector<FerRow> run_fer(const ExperimentConfig& cfg) {
    Pipeline pipe(cfg);
    std::vector<FerRow> rows;
    constexpr std::size_t kBatch = 32;

    for (std::size_t pi = 0; pi < cfg.p_grid.size(); ++pi) {
        const double p = cfg.p_grid[pi];
        FerRow row;
        row.p = p;
        row.m = cfg.m_reads;
        row.mode = to_string(cfg.mode);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            std::uint64_t frames = 0, errors = 0;
            while (frames < cfg.frames_target && errors < cfg.error_target) {
                const std::size_t batch =
                    std::min<std::uint64_t>(kBatch, cfg.frames_target - frames);
                std::vector<FrameVerdict> verdicts(batch);
                parallel_for_indexed(batch, [&](std::size_t b) {
                    const std::uint64_t fseed = derive_seed(cfg.seed, pi, frames + b);
                    verdicts[b] = pipe.run_frame(p, fseed);
                });
                for (const auto& vd : verdicts) {
                    ++frames;
                    if (vd.error) ++errors;
                }
            }
            row.frames = frames;
            row.frame_errors = errors;
            row.fer = frames ? static_cast<double>(errors) / static_cast<double>(frames) : 0.0;
        } catch (const CapacityError&) {
            row.capacity_error = true;
            row.fer = std::nan("");
        }
        row.wallclock =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<AirRow> run_air(const ExperimentConfig& cfg) {
    const Scheme scheme = scheme_by_id(cfg.scheme_id);
    const std::size_t frames =
        cfg.air_frames ? cfg.air_frames
                       : std::max<std::size_t>(10, (10000 + cfg.n_outer - 1) / cfg.n_outer);
    air::AirOptions opt{cfg.i_max, cfg.sigma_mult, cfg.sigma_escalated, cfg.joint_budget};

    std::vector<AirRow> rows;
    for (std::size_t pi = 0; pi < cfg.p_grid.size(); ++pi) {
        const double p = cfg.p_grid[pi];
        const ChannelParams params{p, p, cfg.p_sub, cfg.q_channel};
        for (const auto& est_name : cfg.estimators) {
            air::RateEstimate est;
            const std::uint64_t seed = derive_seed(cfg.seed, 0xa15u + pi);
            if (est_name == "bcjr-once") {
                est = air::bcjr_once_rate(scheme, params, cfg.m_reads, cfg.n_outer,
                                          cfg.mode == DecodeMode::joint
                                              ? air::CombineMode::joint
                                              : air::CombineMode::separate,
                                          frames, seed, opt);
            } else if (est_name == "mi") {
                est = air::mutual_info_rate(scheme, params, cfg.m_reads, cfg.n_outer, frames,
                                            seed, opt);
            } else if (est_name == "uncoded-mi") {
                est = air::uncoded_mi_rate(params, cfg.m_reads, cfg.n_outer, frames, seed);
            } else {
                throw std::invalid_argument("unknown estimator: " + est_name);
            }
            rows.push_back({p, cfg.m_reads, est.estimator, est.bits_per_use, est.std_error,
                            est.frames});
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV

void write_fer_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<FerRow>& rows,
                   bool with_timing) {
    const std::string hash = cfg.hash_hex();
    os << "p,M,mode,frames,frame_errors,FER,wallclock,config_hash\n";
    for (const auto& r : rows) {
        os << fmt("%g", r.p) << ',' << r.m << ',' << r.mode << ',' << r.frames << ','
           << r.frame_errors << ',';
        if (r.capacity_error)
            os << "nan";
        else
            os << fmt("%.6e", r.fer);
        os << ',' << fmt("%.3f", with_timing ? r.wallclock : 0.0) << ',' << hash << '\n';
    }
}

void write_air_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<AirRow>& rows) {
    const std::string hash = cfg.hash_hex();
    os << "p,M,estimator,bits_per_use,stderr,frames,config_hash\n";
    for (const auto& r : rows) {
        os << fmt("%g", r.p) << ',' << r.m << ',' << r.estimator << ','
           << fmt("%.6f", r.bits_per_use) << ',' << fmt("%.6f", r.std_error) << ',' << r.frames
           << ',' << hash << '\n';
    }
}

// ---------------------------------------------------------------------------
// design sample sources

InnerSample sample_inner_frame(const Scheme& scheme, const ChannelParams& params, int m_reads,
                               DecodeMode mode, std::size_t n_outer, std::uint64_t frame_seed,
                               const ExperimentConfig& cfg) {
    Rng rng(frame_seed);
    const int q_o = scheme.q_outer();
    InnerSample s;
    s.w.resize(n_outer);
    for (auto& wi : s.w) wi = rng.symbol(q_o);
    const FrameCode fc = make_frame_code(scheme, n_outer, frame_seed);
    const SymbolVec x = fc.code.encode(s.w, fc.offset_ptr());
    const ReadSet rs = transmit_multi(x, params, m_reads, rng);
    const AppMatrix priors = AppMatrix::uniform(n_outer, q_o);
    InnerDecode id = decode_inner(rs.reads, fc, n_outer, priors, params, mode, cfg, x.size());
    s.erasure = id.erasure;
    s.app = std::move(id.app);
    return s;
}

polar::AppPool build_app_pool(const Scheme& scheme, const ChannelParams& params, int m_reads,
                              DecodeMode mode, std::size_t n_outer, std::size_t min_samples,
                              std::uint64_t seed) {
    polar::AppPool pool;
    pool.q = scheme.q_outer();
    ExperimentConfig cfg;
    std::size_t rows = 0, frame = 0;
    const std::size_t max_frames = 16 + 8 * (min_samples / std::max<std::size_t>(1, n_outer));
    std::vector<InnerSample> samples(max_frames);
    std::atomic<std::size_t> produced{0};
    // frames are independent; decode them across the worker pool
    const std::size_t want_frames =
        std::min(max_frames, 2 + min_samples / std::max<std::size_t>(1, n_outer));
    parallel_for_indexed(want_frames, [&](std::size_t i) {
        samples[i] = sample_inner_frame(scheme, params, m_reads, mode, n_outer,
                                        derive_seed(seed, i), cfg);
        produced.fetch_add(1);
    });
    for (frame = 0; frame < want_frames && rows < min_samples; ++frame) {
        if (samples[frame].erasure) continue;
        rows += n_outer;
        pool.add(std::move(samples[frame].app), std::move(samples[frame].w));
    }
    // top up serially if erasures left the pool short
    while (rows < min_samples && frame < max_frames) {
        auto s = sample_inner_frame(scheme, params, m_reads, mode, n_outer,
                                    derive_seed(seed, frame), cfg);
        ++frame;
        if (s.erasure) continue;
        rows += n_outer;
        pool.add(std::move(s.app), std::move(s.w));
    }
    if (rows < min_samples) throw std::runtime_error("build_app_pool: too many erased frames");
    return pool;
}

ldpc::PoolSampler make_de_pool_sampler(const Scheme& scheme, int m_reads, DecodeMode mode,
                                       std::size_t n_outer, int q_channel, double p_sub,
                                       std::uint64_t seed) {
    return [=](double p, std::size_t min_rows, Rng& rng) {
        const ChannelParams params{p, p, p_sub, q_channel};
        ExperimentConfig cfg;
        std::vector<std::vector<double>> rows;
        rows.reserve(min_rows);
        const int q_o = scheme.q_outer();
        std::size_t guard = 0;
        while (rows.size() < min_rows) {
            if (++guard > 16 + 8 * (min_rows / std::max<std::size_t>(1, n_outer)))
                throw std::runtime_error("de pool: too many erased frames");
            const auto s = sample_inner_frame(scheme, params, m_reads, mode, n_outer,
                                              derive_seed(seed, rng.next_u64()), cfg);
            if (s.erasure) continue;
            for (std::size_t i = 0; i < n_outer; ++i) {
                std::vector<double> row(static_cast<std::size_t>(q_o));
                // error-referenced: relabel so that the true symbol sits at 0
                for (int z = 0; z < q_o; ++z) row[static_cast<std::size_t>(z)] = s.app.at(i, s.w[i] ^ z);
                rows.push_back(std::move(row));
            }
        }
        return rows;
    };
}

polar::FrameProvider make_polar_frame_provider(const Scheme& scheme, const ChannelParams& params,
                                               int m_reads, DecodeMode mode,
                                               std::size_t n_outer) {
    return [=](Rng& rng) {
        ExperimentConfig cfg;
        for (;;) {
            const auto s = sample_inner_frame(scheme, params, m_reads, mode, n_outer,
                                              rng.next_u64(), cfg);
            if (!s.erasure) return std::make_pair(s.app, s.w);
        }
    };
}

}  // namespace ids::sim
