// Python bindings for the main operations: channel sampling, inner/outer
// codes, trellis decoding, multi-read inference, information rates, and the
// sweep drivers.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "ids/air.hpp"
#include "ids/gf.hpp"
#include "ids/ldpc.hpp"
#include "ids/multiseq.hpp"
#include "ids/polar.hpp"
#include "ids/scheme.hpp"
#include "ids/sim.hpp"

namespace py = pybind11;
using namespace ids;

namespace {

std::vector<std::vector<double>> app_to_lists(const AppMatrix& a) {
    std::vector<std::vector<double>> out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        out[i].assign(a.row(i), a.row(i) + a.q());
    return out;
}

AppMatrix app_from_lists(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    AppMatrix a(rows.size(), static_cast<int>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw std::invalid_argument("ragged probability matrix");
        for (std::size_t j = 0; j < rows[i].size(); ++j) a.at(i, static_cast<int>(j)) = rows[i][j];
    }
    return a;
}

struct PyDecodeResult {
    std::vector<std::vector<double>> app;
    double log_py;
    bool erasure;
    std::uint64_t edges_enumerated;
    std::uint64_t edges_active;
};

PyDecodeResult wrap(const DecodeResult& r) {
    return {app_to_lists(r.app), r.log_py, r.erasure, r.edges_enumerated, r.edges_active};
}

}  // namespace

PYBIND11_MODULE(idscodes, m) {
    m.doc() = "concatenated coding for insertion-deletion-substitution channels with "
              "multiple reads";

    // ---- gf ----------------------------------------------------------
    py::class_<gf::Field>(m, "Field")
        .def(py::init<int, std::uint32_t>(), py::arg("k"), py::arg("primitive_poly"))
        .def_static("of", &gf::Field::of, py::return_value_policy::reference)
        .def_property_readonly("k", &gf::Field::k)
        .def_property_readonly("q", &gf::Field::q)
        .def_static("add", &gf::Field::add)
        .def("mul", &gf::Field::mul)
        .def("inv", &gf::Field::inv)
        .def("div", &gf::Field::div);

    // ---- channel -----------------------------------------------------
    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init([](double p_ins, double p_del, double p_sub, int q) {
                 return ChannelParams{p_ins, p_del, p_sub, q};
             }),
             py::arg("p_ins") = 0.0, py::arg("p_del") = 0.0, py::arg("p_sub") = 0.0,
             py::arg("q") = 4)
        .def_readwrite("p_ins", &ChannelParams::p_ins)
        .def_readwrite("p_del", &ChannelParams::p_del)
        .def_readwrite("p_sub", &ChannelParams::p_sub)
        .def_readwrite("q", &ChannelParams::q)
        .def("p_trans", &ChannelParams::p_trans);

    m.def(
        "transmit",
        [](const std::vector<int>& x, const ChannelParams& p, std::uint64_t seed) {
            Rng rng(seed);
            SymbolVec xs(x.begin(), x.end());
            const auto y = transmit(xs, p, rng);
            return std::vector<int>(y.begin(), y.end());
        },
        py::arg("x"), py::arg("params"), py::arg("seed"));
    m.def(
        "transmit_multi",
        [](const std::vector<int>& x, const ChannelParams& p, int m, std::uint64_t seed) {
            Rng rng(seed);
            SymbolVec xs(x.begin(), x.end());
            const auto rs = transmit_multi(xs, p, m, rng);
            std::vector<std::vector<int>> out;
            for (const auto& y : rs.reads) out.emplace_back(y.begin(), y.end());
            return out;
        },
        py::arg("x"), py::arg("params"), py::arg("m"), py::arg("seed"));

    // ---- inner -------------------------------------------------------
    py::class_<Codebook>(m, "Codebook")
        .def_readonly("n", &Codebook::n)
        .def_readonly("k", &Codebook::k)
        .def_readonly("q", &Codebook::q)
        .def_property_readonly("words", [](const Codebook& cb) {
            std::vector<std::vector<int>> out;
            for (const auto& w : cb.words) out.emplace_back(w.begin(), w.end());
            return out;
        });

    m.def(
        "levenshtein_indel",
        [](const std::vector<int>& a, const std::vector<int>& b) {
            SymbolVec as(a.begin(), a.end()), bs(b.begin(), b.end());
            return levenshtein_indel(as, bs);
        },
        py::arg("a"), py::arg("b"));
    m.def("dm_construct", &dm_construct, py::arg("n"), py::arg("k"), py::arg("q"));
    m.def(
        "verify_codebook",
        [](const Codebook& cb, int d_min) {
            const auto v = verify_codebook(cb, d_min);
            return py::make_tuple(v.ok, v.min_distance, v.worst_pair);
        },
        py::arg("codebook"), py::arg("d_min"));
    m.def(
        "clique_design",
        [](int n, int q, int d_min, int target_size, int t) {
            const auto r = clique_design(n, q, d_min, target_size, t);
            if (!r.ok) throw std::runtime_error("clique design failed; largest clique has " +
                                                std::to_string(r.largest_clique.size()) + " words");
            return r.codebooks;
        },
        py::arg("n"), py::arg("q"), py::arg("d_min"), py::arg("target_size"), py::arg("t"));
    m.def("designed_tvc_codebooks", [] { return designed_tvc_codebooks(); });

    py::class_<Scheme>(m, "Scheme")
        .def_property_readonly("id", [](const Scheme& s) { return s.id; })
        .def_property_readonly("n", &Scheme::n)
        .def_property_readonly("k", &Scheme::k)
        .def_property_readonly("q_outer", &Scheme::q_outer)
        .def(
            "encode",
            [](const Scheme& s, const std::vector<int>& w, std::uint64_t frame_seed) {
                const auto fc = make_frame_code(s, w.size(), frame_seed);
                const auto x = fc.code.encode(w, fc.offset_ptr());
                return std::vector<int>(x.begin(), x.end());
            },
            py::arg("w"), py::arg("frame_seed"));
    m.def("scheme_by_id", &scheme_by_id, py::arg("id"));
    m.def("scheme_ids", &scheme_ids);

    // ---- trellis / multiseq -------------------------------------------
    py::class_<DriftBounds>(m, "DriftBounds")
        .def(py::init([](int d_min, int d_max, int i_max) {
                 return DriftBounds{d_min, d_max, i_max};
             }),
             py::arg("d_min"), py::arg("d_max"), py::arg("i_max") = 2)
        .def_static("dynamic", &DriftBounds::dynamic, py::arg("n_channel"), py::arg("params"),
                    py::arg("sigma_mult") = 5.0, py::arg("i_max") = 2)
        .def_readwrite("d_min", &DriftBounds::d_min)
        .def_readwrite("d_max", &DriftBounds::d_max)
        .def_readwrite("i_max", &DriftBounds::i_max)
        .def("delta", &DriftBounds::delta)
        .def("transitions", &DriftBounds::transitions);

    py::class_<PyDecodeResult>(m, "DecodeResult")
        .def_readonly("app", &PyDecodeResult::app)
        .def_readonly("log_py", &PyDecodeResult::log_py)
        .def_readonly("erasure", &PyDecodeResult::erasure)
        .def_readonly("edges_enumerated", &PyDecodeResult::edges_enumerated)
        .def_readonly("edges_active", &PyDecodeResult::edges_active);

    m.def(
        "lattice_forward",
        [](const std::vector<int>& x, const std::vector<int>& y, const ChannelParams& p,
           int i_max) {
            SymbolVec xs(x.begin(), x.end()), ys(y.begin(), y.end());
            return lattice_forward(xs, ys, p, i_max);
        },
        py::arg("x_block"), py::arg("y_segment"), py::arg("params"), py::arg("i_max") = 2);

    m.def(
        "decode_single",
        [](const std::vector<int>& y, const Scheme& scheme, std::size_t n_outer,
           std::uint64_t frame_seed, const ChannelParams& params, const DriftBounds& bounds) {
            const auto fc = make_frame_code(scheme, n_outer, frame_seed);
            SymbolVec ys(y.begin(), y.end());
            const auto priors = AppMatrix::uniform(n_outer, scheme.q_outer());
            return wrap(decode_single(ys, fc.code, fc.offset_ptr(), priors, params, bounds));
        },
        py::arg("y"), py::arg("scheme"), py::arg("n_outer"), py::arg("frame_seed"),
        py::arg("params"), py::arg("bounds"));

    m.def(
        "decode_joint",
        [](const std::vector<std::vector<int>>& reads, const Scheme& scheme, std::size_t n_outer,
           std::uint64_t frame_seed, const ChannelParams& params, const DriftBounds& bounds,
           double budget) {
            const auto fc = make_frame_code(scheme, n_outer, frame_seed);
            std::vector<SymbolVec> rs;
            for (const auto& y : reads) rs.emplace_back(y.begin(), y.end());
            const auto priors = AppMatrix::uniform(n_outer, scheme.q_outer());
            return wrap(
                decode_joint(rs, fc.code, fc.offset_ptr(), priors, params, bounds, budget));
        },
        py::arg("reads"), py::arg("scheme"), py::arg("n_outer"), py::arg("frame_seed"),
        py::arg("params"), py::arg("bounds"), py::arg("budget") = kJointStateBudget);

    m.def(
        "combine_separate",
        [](const std::vector<std::vector<std::vector<double>>>& apps,
           const std::vector<std::vector<double>>& priors) {
            std::vector<AppMatrix> ms;
            for (const auto& a : apps) ms.push_back(app_from_lists(a));
            return app_to_lists(combine_separate(ms, app_from_lists(priors)));
        },
        py::arg("apps"), py::arg("priors"));

    m.def(
        "complexity_of",
        [](std::size_t n_channel, int n, int nu, int k, const DriftBounds& bounds, int m) {
            const auto r = complexity_of(n_channel, n, nu, k, bounds, m);
            py::dict d;
            d["edges_single"] = r.edges_single;
            d["edges_separate"] = r.edges_separate;
            d["edges_joint"] = r.edges_joint;
            d["delta"] = r.delta;
            d["transitions"] = r.transitions;
            return d;
        },
        py::arg("n_channel"), py::arg("n"), py::arg("nu"), py::arg("k"), py::arg("bounds"),
        py::arg("m_reads"));

    // ---- ldpc ----------------------------------------------------------
    py::class_<ldpc::Protograph>(m, "Protograph")
        .def(py::init([](std::size_t rows, std::size_t cols, const std::vector<int>& b) {
                 ldpc::Protograph p{rows, cols, b};
                 if (b.size() != rows * cols) throw std::invalid_argument("bad base matrix size");
                 return p;
             }),
             py::arg("rows"), py::arg("cols"), py::arg("b"))
        .def_readonly("rows", &ldpc::Protograph::rows)
        .def_readonly("cols", &ldpc::Protograph::cols)
        .def("design_rate", &ldpc::Protograph::design_rate);

    py::class_<ldpc::NbParityCheck>(m, "NbParityCheck")
        .def_readonly("rows", &ldpc::NbParityCheck::rows)
        .def_readonly("cols", &ldpc::NbParityCheck::cols)
        .def_readonly("girth", &ldpc::NbParityCheck::girth)
        .def("num_edges", &ldpc::NbParityCheck::num_edges);

    m.def(
        "ldpc_lift",
        [](const ldpc::Protograph& p, std::size_t q_lift, int field_k, std::uint64_t seed) {
            Rng rng(seed);
            return ldpc::lift(p, q_lift, gf::Field::of(field_k), rng);
        },
        py::arg("proto"), py::arg("q_lift"), py::arg("field_k"), py::arg("seed"));
    m.def(
        "ldpc_encode",
        [](const ldpc::NbParityCheck& h, int field_k, const std::vector<int>& info) {
            const ldpc::Encoder enc(h, gf::Field::of(field_k));
            return enc.encode(info);
        },
        py::arg("h"), py::arg("field_k"), py::arg("info"));
    m.def(
        "ldpc_decode_bp",
        [](const std::vector<std::vector<double>>& apps, const ldpc::NbParityCheck& h,
           int field_k, int max_iter) {
            const auto r = ldpc::decode_bp(app_from_lists(apps), h, gf::Field::of(field_k),
                                           max_iter);
            return py::make_tuple(r.hard, r.converged, r.iterations);
        },
        py::arg("apps"), py::arg("h"), py::arg("field_k"), py::arg("max_iter") = 100);

    // ---- polar ---------------------------------------------------------
    py::class_<polar::PolarSpec>(m, "PolarSpec")
        .def(py::init([](std::size_t n_outer, std::size_t k_info, int alpha, int beta,
                         int crc_bits, int list_size, const std::vector<std::uint32_t>& frozen) {
                 polar::PolarSpec s;
                 s.n_outer = n_outer;
                 s.k_info = k_info;
                 s.alpha = alpha;
                 s.beta = beta;
                 s.crc_bits = crc_bits;
                 s.list_size = list_size;
                 s.frozen = frozen;
                 return s;
             }),
             py::arg("n_outer"), py::arg("k_info"), py::arg("alpha"), py::arg("beta"),
             py::arg("crc_bits"), py::arg("list_size"), py::arg("frozen"))
        .def_readwrite("n_outer", &polar::PolarSpec::n_outer)
        .def_readwrite("k_info", &polar::PolarSpec::k_info)
        .def_readwrite("alpha", &polar::PolarSpec::alpha)
        .def_readwrite("beta", &polar::PolarSpec::beta)
        .def_readwrite("list_size", &polar::PolarSpec::list_size)
        .def_readwrite("frozen", &polar::PolarSpec::frozen);

    m.def(
        "polar_encode",
        [](const std::vector<int>& info, const polar::PolarSpec& spec, int field_k) {
            return polar::encode_polar(info, spec, gf::Field::of(field_k));
        },
        py::arg("info"), py::arg("spec"), py::arg("field_k"));
    m.def(
        "polar_decode_scl",
        [](const std::vector<std::vector<double>>& apps, const polar::PolarSpec& spec,
           int field_k) {
            const auto r = polar::decode_scl(app_from_lists(apps), spec, gf::Field::of(field_k));
            return py::make_tuple(r.info, r.crc_ok);
        },
        py::arg("apps"), py::arg("spec"), py::arg("field_k"));

    // ---- air / sweeps ---------------------------------------------------
    py::class_<air::RateEstimate>(m, "RateEstimate")
        .def_readonly("bits_per_use", &air::RateEstimate::bits_per_use)
        .def_readonly("std_error", &air::RateEstimate::std_error)
        .def_readonly("frames", &air::RateEstimate::frames)
        .def_readonly("erasures", &air::RateEstimate::erasures)
        .def_readonly("estimator", &air::RateEstimate::estimator);

    m.def(
        "bcjr_once_rate",
        [](const std::string& scheme_id, const ChannelParams& p, int m, std::size_t n_outer,
           const std::string& mode, std::size_t frames, std::uint64_t seed) {
            return air::bcjr_once_rate(scheme_by_id(scheme_id), p, m, n_outer,
                                       mode == "joint" ? air::CombineMode::joint
                                                       : air::CombineMode::separate,
                                       frames, seed);
        },
        py::arg("scheme"), py::arg("params"), py::arg("m_reads"), py::arg("n_outer"),
        py::arg("mode") = "separate", py::arg("frames") = 10, py::arg("seed") = 1);
    m.def(
        "mutual_info_rate",
        [](const std::string& scheme_id, const ChannelParams& p, int m, std::size_t n_outer,
           std::size_t frames, std::uint64_t seed) {
            return air::mutual_info_rate(scheme_by_id(scheme_id), p, m, n_outer, frames, seed);
        },
        py::arg("scheme"), py::arg("params"), py::arg("m_reads"), py::arg("n_outer"),
        py::arg("frames") = 10, py::arg("seed") = 1);
    m.def("uncoded_mi_rate", &air::uncoded_mi_rate, py::arg("params"), py::arg("m_reads"),
          py::arg("n_channel"), py::arg("frames"), py::arg("seed"));

    py::class_<sim::ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("p_grid", &sim::ExperimentConfig::p_grid)
        .def_readwrite("p_sub", &sim::ExperimentConfig::p_sub)
        .def_readwrite("scheme_id", &sim::ExperimentConfig::scheme_id)
        .def_readwrite("outer_file", &sim::ExperimentConfig::outer_file)
        .def_readwrite("lift", &sim::ExperimentConfig::lift)
        .def_readwrite("n_outer", &sim::ExperimentConfig::n_outer)
        .def_readwrite("m_reads", &sim::ExperimentConfig::m_reads)
        .def_readwrite("turbo_iters", &sim::ExperimentConfig::turbo_iters)
        .def_readwrite("frames_target", &sim::ExperimentConfig::frames_target)
        .def_readwrite("error_target", &sim::ExperimentConfig::error_target)
        .def_readwrite("air_frames", &sim::ExperimentConfig::air_frames)
        .def_readwrite("estimators", &sim::ExperimentConfig::estimators)
        .def_readwrite("seed", &sim::ExperimentConfig::seed)
        .def_property(
            "outer",
            [](const sim::ExperimentConfig& c) {
                return c.outer == sim::OuterKind::none   ? "none"
                       : c.outer == sim::OuterKind::ldpc ? "ldpc"
                                                         : "polar";
            },
            [](sim::ExperimentConfig& c, const std::string& s) {
                c.outer = s == "none"   ? sim::OuterKind::none
                          : s == "ldpc" ? sim::OuterKind::ldpc
                          : s == "polar"
                              ? sim::OuterKind::polar
                              : throw std::invalid_argument("unknown outer kind: " + s);
            })
        .def_property(
            "mode", [](const sim::ExperimentConfig& c) { return sim::to_string(c.mode); },
            [](sim::ExperimentConfig& c, const std::string& s) {
                c.mode = sim::decode_mode_from(s);
            })
        .def("hash_hex", &sim::ExperimentConfig::hash_hex);

    m.def("run_fer", [](const sim::ExperimentConfig& cfg) {
        const auto rows = sim::run_fer(cfg);
        py::list out;
        for (const auto& r : rows) {
            py::dict d;
            d["p"] = r.p;
            d["M"] = r.m;
            d["mode"] = r.mode;
            d["frames"] = r.frames;
            d["frame_errors"] = r.frame_errors;
            d["FER"] = r.fer;
            d["capacity_error"] = r.capacity_error;
            out.append(d);
        }
        return out;
    });
    m.def("run_air", [](const sim::ExperimentConfig& cfg) {
        const auto rows = sim::run_air(cfg);
        py::list out;
        for (const auto& r : rows) {
            py::dict d;
            d["p"] = r.p;
            d["M"] = r.m;
            d["estimator"] = r.estimator;
            d["bits_per_use"] = r.bits_per_use;
            d["stderr"] = r.std_error;
            d["frames"] = r.frames;
            out.append(d);
        }
        return out;
    });
    m.def("fer_csv", [](const sim::ExperimentConfig& cfg) {
        std::ostringstream os;
        sim::write_fer_csv(os, cfg, sim::run_fer(cfg), false);
        return os.str();
    });
}
