"""Smoke tests for the idscodes extension module."""

import math

import pytest

idscodes = pytest.importorskip("idscodes")


def test_field_arithmetic():
    f = idscodes.Field.of(4)
    assert f.q == 16
    assert f.mul(2, 9) == 1
    assert idscodes.Field.add(5, 5) == 0
    for a in range(1, 16):
        assert f.mul(a, f.inv(a)) == 1


def test_noiseless_channel_is_identity():
    params = idscodes.ChannelParams(0.0, 0.0, 0.0, 4)
    x = [0, 1, 2, 3, 3, 2, 1, 0]
    assert idscodes.transmit(x, params, seed=1) == x
    reads = idscodes.transmit_multi(x, params, 3, seed=2)
    assert reads == [x, x, x]


def test_levenshtein_and_codebooks():
    assert idscodes.levenshtein_indel([0, 0, 0, 0], [0, 0, 2, 2]) == 4
    books = idscodes.designed_tvc_codebooks()
    assert len(books) == 4
    union = {tuple(w) for cb in books for w in cb.words}
    assert len(union) == 56
    for cb in books:
        ok, dmin, _ = idscodes.verify_codebook(cb, 4)
        assert ok and dmin == 4


def test_decode_single_noiseless_certainty():
    scheme = idscodes.scheme_by_id("TVC-2")
    w = [5, 11, 0, 3, 15, 8, 2, 9]
    x = scheme.encode(w, frame_seed=7)
    params = idscodes.ChannelParams(0.0, 0.0, 0.0, 4)
    bounds = idscodes.DriftBounds(0, 0, 2)
    res = idscodes.decode_single(x, scheme, len(w), 7, params, bounds)
    assert not res.erasure
    for i, wi in enumerate(w):
        assert res.app[i][wi] == pytest.approx(1.0)


def test_joint_reduces_to_single():
    scheme = idscodes.scheme_by_id("WM")
    w = [3, 14, 0, 7, 9, 1]
    x = scheme.encode(w, frame_seed=5)
    params = idscodes.ChannelParams(0.05, 0.05, 0.0, 4)
    y = idscodes.transmit(x, params, seed=9)
    drift = len(y) - len(x)
    span = len(x) + len(y)
    bounds = idscodes.DriftBounds(-span, span, 3)
    assert -span <= drift <= span
    single = idscodes.decode_single(y, scheme, len(w), 5, params, bounds)
    joint = idscodes.decode_joint([y], scheme, len(w), 5, params, bounds, budget=1e9)
    for ra, rb in zip(single.app, joint.app):
        for a, b in zip(ra, rb):
            assert a == pytest.approx(b, abs=1e-12)


def test_combine_separate_square_law():
    apps = [[[0.3, 0.7]], [[0.3, 0.7]]]
    priors = [[0.5, 0.5]]
    combined = idscodes.combine_separate(apps, priors)
    denom = 0.09 + 0.49
    assert combined[0][0] == pytest.approx(0.09 / denom)


def test_complexity_formula():
    bounds = idscodes.DriftBounds(-10, 10, 2)
    rep = idscodes.complexity_of(960, 4, 0, 4, bounds, 2)
    assert rep["edges_single"] == 1048320
    assert rep["edges_separate"] == 2 * rep["edges_single"]


def test_ldpc_roundtrip():
    proto = idscodes.Protograph(2, 4, [1, 2, 1, 1, 1, 1, 2, 1])
    h = idscodes.ldpc_lift(proto, 6, 4, seed=3)
    assert (h.rows, h.cols) == (12, 24)
    info = list(range(12))
    info = [v % 16 for v in info]
    c = idscodes.ldpc_encode(h, 4, info)
    apps = [[1.0 if a == ci else 0.0 for a in range(16)] for ci in c]
    hard, converged, iters = idscodes.ldpc_decode_bp(apps, h, 4)
    assert converged and hard == c and iters == 1


def test_polar_roundtrip():
    frozen = list(range(6))
    spec = idscodes.PolarSpec(16, 8, alpha=3, beta=1, crc_bits=8, list_size=4, frozen=frozen)
    info = [4, 9, 15, 0, 7, 2, 11, 5]
    w = idscodes.polar_encode(info, spec, 4)
    apps = [[1.0 if a == wi else 0.0 for a in range(16)] for wi in w]
    decoded, crc_ok = idscodes.polar_decode_scl(apps, spec, 4)
    assert crc_ok and decoded == info


def test_air_saturates_noiseless():
    params = idscodes.ChannelParams(0.0, 0.0, 0.0, 4)
    est = idscodes.mutual_info_rate("TVC-2", params, 1, 24, frames=3, seed=1)
    assert est.bits_per_use == pytest.approx(1.0, abs=1e-9)
    unc = idscodes.uncoded_mi_rate(params, 1, 32, 2, 1)
    assert unc.bits_per_use == pytest.approx(2.0, abs=1e-9)


def test_fer_sweep_deterministic():
    cfg = idscodes.ExperimentConfig()
    cfg.p_grid = [0.0, 0.05]
    cfg.scheme_id = "TVC-2"
    cfg.n_outer = 16
    cfg.m_reads = 1
    cfg.mode = "single"
    cfg.frames_target = 10
    cfg.seed = 13
    rows = idscodes.run_fer(cfg)
    assert rows[0]["p"] == 0.0 and rows[0]["frame_errors"] == 0
    assert idscodes.fer_csv(cfg) == idscodes.fer_csv(cfg)
    assert cfg.hash_hex() in idscodes.fer_csv(cfg)
