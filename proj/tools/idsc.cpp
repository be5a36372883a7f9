// idsc: channel sampling, FER/AIR sweeps, and code-design commands.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ids/air.hpp"
#include "ids/ldpc.hpp"
#include "ids/polar.hpp"
#include "ids/scheme.hpp"
#include "ids/sim.hpp"

namespace {

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("--p", "empty probability grid");
    return out;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"concatenated coding for IDS channels with multiple reads"};
    app.require_subcommand(1);
    app.fallthrough();  // allow global options after the subcommand
    app.set_config("--config");

    std::string p_csv = "0.05";
    std::uint64_t seed = 1;
    std::string out_path;
    bool timing = false;

    // ---- channel-sample ------------------------------------------------
    auto* sample = app.add_subcommand("channel-sample", "sample IDS channel reads");
    std::size_t cs_n = 32;
    int cs_m = 1, cs_q = 4;
    double cs_p = 0.05, cs_psub = 0.0;
    std::string cs_input;
    sample->add_option("--p", cs_p, "p_ins = p_del");
    sample->add_option("--psub", cs_psub, "substitution probability");
    sample->add_option("--q", cs_q, "alphabet size");
    sample->add_option("--n", cs_n, "random input length");
    sample->add_option("--input", cs_input, "explicit input symbols, space separated");
    sample->add_option("--M", cs_m, "number of reads");
    sample->add_option("--seed", seed, "master seed");

    // ---- fer -----------------------------------------------------------
    auto* fer = app.add_subcommand("fer", "frame error rate sweep");
    ids::sim::ExperimentConfig fc;
    std::string fer_mode = "separate", fer_outer = "none";
    fer->add_option("--p", p_csv, "comma-separated p grid");
    fer->add_option("--psub", fc.p_sub, "substitution probability");
    fer->add_option("--scheme", fc.scheme_id, "inner scheme id")->capture_default_str();
    fer->add_option("--outer", fer_outer, "outer code: none|ldpc|polar")->capture_default_str();
    fer->add_option("--outer-file", fc.outer_file, "protograph or frozen-set file");
    fer->add_option("--lift", fc.lift, "LDPC lift size")->capture_default_str();
    fer->add_option("--n-outer", fc.n_outer, "outer length (outer=none)")->capture_default_str();
    fer->add_option("--M", fc.m_reads, "number of reads")->capture_default_str();
    fer->add_option("--mode", fer_mode, "single|separate|joint")->capture_default_str();
    fer->add_option("--turbo", fc.turbo_iters, "inner-outer iterations")->capture_default_str();
    bool turbo_full_app = false;
    fer->add_flag("--turbo-full-app", turbo_full_app, "feed back full APPs instead of extrinsics");
    fer->add_option("--bp-iters", fc.bp_iters, "BP iterations")->capture_default_str();
    fer->add_option("--list-size", fc.list_size, "SCL list size")->capture_default_str();
    fer->add_option("--frames", fc.frames_target, "frame budget")->capture_default_str();
    fer->add_option("--errors", fc.error_target, "frame-error stop")->capture_default_str();
    fer->add_option("--seed", seed, "master seed");
    fer->add_option("--imax", fc.i_max, "max insertions per symbol")->capture_default_str();
    fer->add_option("--sigma", fc.sigma_mult, "drift bound multiplier")->capture_default_str();
    fer->add_option("--sigma-esc", fc.sigma_escalated, "escalated multiplier")
        ->capture_default_str();
    fer->add_option("--out", out_path, "CSV output path (default stdout)");
    fer->add_flag("--timing", timing, "emit wallclock seconds in the CSV");

    // ---- air -----------------------------------------------------------
    auto* airc = app.add_subcommand("air", "achievable information rate sweep");
    ids::sim::ExperimentConfig ac;
    std::string air_mode = "separate";
    std::vector<std::string> air_est = {"bcjr-once", "mi"};
    airc->add_option("--p", p_csv, "comma-separated p grid");
    airc->add_option("--psub", ac.p_sub, "substitution probability");
    airc->add_option("--scheme", ac.scheme_id, "inner scheme id")->capture_default_str();
    airc->add_option("--estimator", air_est, "bcjr-once|mi|uncoded-mi (repeatable)");
    airc->add_option("--M", ac.m_reads, "number of reads")->capture_default_str();
    airc->add_option("--mode", air_mode, "separate|joint (bcjr-once)")->capture_default_str();
    airc->add_option("--n-outer", ac.n_outer, "outer symbols per frame")->capture_default_str();
    airc->add_option("--frames", ac.air_frames, "frames per point (0 = auto)");
    airc->add_option("--seed", seed, "master seed");
    airc->add_option("--imax", ac.i_max, "max insertions per symbol")->capture_default_str();
    airc->add_option("--out", out_path, "CSV output path (default stdout)");

    // ---- design ----------------------------------------------------------
    auto* design = app.add_subcommand("design", "inner/outer code design");
    design->require_subcommand(1);

    auto* dtvc = design->add_subcommand("tvc", "clique-search TVC codebooks");
    int tn = 4, tq = 4, tdmin = 4, tsize = 16, tt = 4;
    dtvc->add_option("--n", tn, "word length")->capture_default_str();
    dtvc->add_option("--q", tq, "alphabet")->capture_default_str();
    dtvc->add_option("--dmin", tdmin, "minimum Levenshtein distance")->capture_default_str();
    dtvc->add_option("--size", tsize, "codebook size")->capture_default_str();
    dtvc->add_option("--t", tt, "number of codebooks")->capture_default_str();
    dtvc->add_option("--out", out_path, "codebook file (default stdout)");

    auto* dker = design->add_subcommand("polar-kernel", "rank kernel ratios");
    std::string dk_scheme = "CC-2";
    double dk_p = 0.04;
    int dk_m = 1;
    std::size_t dk_samples = 100000, dk_nouter = 240;
    dker->add_option("--scheme", dk_scheme, "inner scheme")->capture_default_str();
    dker->add_option("--p", dk_p, "p_ins = p_del")->capture_default_str();
    dker->add_option("--M", dk_m, "reads")->capture_default_str();
    dker->add_option("--samples", dk_samples, "Monte-Carlo trials")->capture_default_str();
    dker->add_option("--n-outer", dk_nouter, "outer symbols per pool frame")
        ->capture_default_str();
    dker->add_option("--seed", seed, "master seed");
    dker->add_option("--out", out_path, "CSV output (default stdout)");

    auto* dfro = design->add_subcommand("polar-frozen", "genie-aided frozen set");
    std::string df_scheme = "CC-1";
    double df_p = 0.06;
    int df_m = 1, df_alpha = 3, df_beta = 1, df_crc = 8;
    std::size_t df_nouter = 64, df_k = 32, df_frames = 400;
    dfro->add_option("--scheme", df_scheme, "inner scheme")->capture_default_str();
    dfro->add_option("--p", df_p, "design point")->capture_default_str();
    dfro->add_option("--M", df_m, "reads")->capture_default_str();
    dfro->add_option("--n-outer", df_nouter, "polar length")->capture_default_str();
    dfro->add_option("--K", df_k, "information symbols")->capture_default_str();
    dfro->add_option("--alpha", df_alpha, "kernel alpha")->capture_default_str();
    dfro->add_option("--beta", df_beta, "kernel beta")->capture_default_str();
    dfro->add_option("--crc-bits", df_crc, "CRC length")->capture_default_str();
    dfro->add_option("--frames", df_frames, "genie frames")->capture_default_str();
    dfro->add_option("--seed", seed, "master seed");
    dfro->add_option("--out", out_path, "frozen-set file (default stdout)");

    auto* dth = design->add_subcommand("ldpc-threshold", "Monte-Carlo DE threshold");
    std::string th_proto, th_scheme = "TVC-2";
    int th_m = 1;
    std::size_t th_nouter = 240;
    ids::ldpc::DeBudget th_budget;
    dth->add_option("--proto", th_proto, "base matrix file")->required();
    dth->add_option("--scheme", th_scheme, "inner scheme")->capture_default_str();
    dth->add_option("--M", th_m, "reads")->capture_default_str();
    dth->add_option("--n-outer", th_nouter, "outer symbols per pool frame")
        ->capture_default_str();
    dth->add_option("--p-lo", th_budget.p_lo, "bracket low")->capture_default_str();
    dth->add_option("--p-hi", th_budget.p_hi, "bracket high")->capture_default_str();
    dth->add_option("--steps", th_budget.bisect_steps, "bisection steps")->capture_default_str();
    dth->add_option("--population", th_budget.population, "DE population")->capture_default_str();
    dth->add_option("--iters", th_budget.iterations, "DE iterations")->capture_default_str();
    dth->add_option("--pool-rows", th_budget.pool_rows, "channel rows per probe")
        ->capture_default_str();
    dth->add_option("--seed", seed, "master seed");
    dth->add_option("--out", out_path, "report output (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        std::ofstream file;
        if (sample->parsed()) {
            ids::Rng rng(seed);
            ids::ChannelParams params{cs_p, cs_p, cs_psub, cs_q};
            ids::SymbolVec x;
            if (!cs_input.empty()) {
                std::stringstream ss(cs_input);
                int v;
                while (ss >> v) x.push_back(static_cast<ids::Symbol>(v));
            } else {
                x.resize(cs_n);
                for (auto& s : x) s = static_cast<ids::Symbol>(rng.symbol(cs_q));
            }
            auto& os = open_out(file, out_path);
            os << "# input:";
            for (auto s : x) os << ' ' << int(s);
            os << '\n';
            const auto rs = ids::transmit_multi(x, params, cs_m, rng);
            for (const auto& y : rs.reads) {
                for (std::size_t i = 0; i < y.size(); ++i) os << (i ? " " : "") << int(y[i]);
                os << '\n';
            }
        } else if (fer->parsed()) {
            fc.p_grid = parse_grid(p_csv);
            fc.mode = ids::sim::decode_mode_from(fer_mode);
            fc.turbo_extrinsic = !turbo_full_app;
            fc.seed = seed;
            if (fer_outer == "none")
                fc.outer = ids::sim::OuterKind::none;
            else if (fer_outer == "ldpc")
                fc.outer = ids::sim::OuterKind::ldpc;
            else if (fer_outer == "polar")
                fc.outer = ids::sim::OuterKind::polar;
            else
                throw std::runtime_error("unknown outer kind: " + fer_outer);
            const auto rows = ids::sim::run_fer(fc);
            ids::sim::write_fer_csv(open_out(file, out_path), fc, rows, timing);
        } else if (airc->parsed()) {
            ac.p_grid = parse_grid(p_csv);
            ac.mode = ids::sim::decode_mode_from(air_mode);
            ac.estimators = air_est;
            ac.seed = seed;
            const auto rows = ids::sim::run_air(ac);
            ids::sim::write_air_csv(open_out(file, out_path), ac, rows);
        } else if (dtvc->parsed()) {
            const auto res = ids::clique_design(tn, tq, tdmin, tsize, tt);
            if (!res.ok) {
                std::cerr << "design failure: largest clique found has "
                          << res.largest_clique.size() << " words\n";
                return 1;
            }
            for (const auto& cb : res.codebooks) {
                const auto v = ids::verify_codebook(cb, tdmin);
                if (!v.ok) throw std::runtime_error("designed codebook failed verification");
            }
            ids::save_codebooks(open_out(file, out_path), res.codebooks, tdmin);
        } else if (dker->parsed()) {
            const auto scheme = ids::scheme_by_id(dk_scheme);
            const ids::ChannelParams params{dk_p, dk_p, 0.0, 4};
            const auto pool = ids::sim::build_app_pool(scheme, params, dk_m,
                                                       ids::sim::DecodeMode::separate, dk_nouter,
                                                       dk_samples, ids::derive_seed(seed, 0xau));
            ids::Rng rng(ids::derive_seed(seed, 0xbu));
            const auto scores = ids::polar::optimize_kernel(pool, ids::gf::Field::of(scheme.k()),
                                                            dk_samples, rng);
            auto& os = open_out(file, out_path);
            os << "ratio,failure,stderr,samples\n";
            for (const auto& s : scores)
                os << s.alpha << ',' << s.failure << ',' << s.std_error << ',' << s.samples
                   << '\n';
        } else if (dfro->parsed()) {
            const auto scheme = ids::scheme_by_id(df_scheme);
            const ids::ChannelParams params{df_p, df_p, 0.0, 4};
            const auto& field = ids::gf::Field::of(scheme.k());
            auto provider = ids::sim::make_polar_frame_provider(
                scheme, params, df_m, ids::sim::DecodeMode::separate, df_nouter);
            ids::polar::PolarSpec spec;
            spec.n_outer = df_nouter;
            spec.k_info = df_k;
            spec.alpha = df_alpha;
            spec.beta = df_beta;
            spec.crc_bits = df_crc;
            const std::size_t n_freeze =
                df_nouter - df_k - spec.crc_symbols(field.k());
            ids::Rng rng(ids::derive_seed(seed, 0xcu));
            spec.frozen = ids::polar::select_frozen(provider, df_nouter, n_freeze, field,
                                                    df_alpha, df_beta, df_frames, rng);
            ids::polar::save_frozen(open_out(file, out_path), spec, field);
        } else if (dth->parsed()) {
            const auto scheme = ids::scheme_by_id(th_scheme);
            std::ifstream pis(th_proto);
            if (!pis) throw std::runtime_error("cannot open protograph file: " + th_proto);
            const auto proto = ids::ldpc::load_protograph(pis);
            auto sampler = ids::sim::make_de_pool_sampler(scheme, th_m,
                                                          ids::sim::DecodeMode::separate,
                                                          th_nouter, 4, 0.0,
                                                          ids::derive_seed(seed, 0xdu));
            ids::Rng rng(ids::derive_seed(seed, 0xeu));
            const auto est = ids::ldpc::estimate_threshold(proto, ids::gf::Field::of(scheme.k()),
                                                           sampler, th_budget, rng);
            auto& os = open_out(file, out_path);
            os << "p_th " << est.p_point << "\nbracket " << est.p_lo << ' ' << est.p_hi
               << "\nstable " << (est.stable ? 1 : 0) << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
