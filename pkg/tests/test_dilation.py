import numpy as np
import pytest

from pavekit.core import ContractViolation, Frame, gen_random_unit_frame, numeric_rank
from pavekit.dilation import dilate_operator, naimark_dilate, parseval_complete
from pavekit.frames import frame_operator, gram_matrix, parseval_normalize


def _parseval(n, m, seed, field="real"):
    return parseval_normalize(gen_random_unit_frame(n, m, seed, field))


def test_naimark_roundtrip_seeded():
    for seed in range(10):
        fr = _parseval(3, 7, seed, field="complex" if seed % 2 else "real")
        dil = naimark_dilate(fr)
        p, emb = dil.projection, dil.embedding
        assert dil.ambient_dim == fr.M
        assert np.abs(p @ p - p).max() < 1e-9
        assert np.abs(p - p.conj().T).max() < 1e-10
        assert numeric_rank(p) == fr.n
        assert abs(np.trace(p).real - fr.n) < 1e-8
        # P e_i lands exactly on the embedded i-th vector
        for i in range(fr.M):
            assert np.abs(p[:, i] - emb @ fr.synthesis[:, i]).max() < 1e-9
        # the embedding is an isometry
        assert np.abs(emb.conj().T @ emb - np.eye(fr.n)).max() < 1e-9


def test_naimark_rejects_non_parseval():
    with pytest.raises(ContractViolation):
        naimark_dilate(gen_random_unit_frame(3, 7, 0))


def test_dilate_identity_operator():
    t = np.eye(3)
    dil = dilate_operator(t)
    assert dil.ambient_dim == 5         # 2n - 1
    want = np.diag([1.0, 1.0, 1.0, 0.0, 0.0])
    assert np.abs(dil.projection - want).max() < 1e-8


def test_dilate_rank_deficient_norm_one():
    t = np.diag([1.0, 0.0])
    dil = dilate_operator(t)
    assert dil.ambient_dim == 3
    assert numeric_rank(dil.projection) == 2
    # completion supplies the missing coordinate direction
    assert np.abs(np.abs(dil.added_vectors) - np.array([[0.0], [1.0]])).max() < 1e-9


def test_dilate_operator_contract_seeded():
    rng = np.random.default_rng(0)
    for trial in range(15):
        n = int(rng.integers(2, 6))
        t = rng.standard_normal((n, n))
        nrm = np.linalg.norm(t, 2)
        if trial % 2 == 0:
            t = t / nrm                     # exactly norm one
            expect = 2 * n - 1
        else:
            t = t / (nrm * 1.5)             # strict contraction
            expect = 2 * n
        dil = dilate_operator(t)
        assert dil.ambient_dim == expect
        p, emb = dil.projection, dil.embedding
        assert np.abs(p @ p - p).max() < 1e-8
        for i in range(n):
            assert np.abs(p[:, i] - emb @ t[:, i]).max() < 1e-9
        comb = dil.frame.synthesis
        assert np.abs(comb @ comb.conj().T - np.eye(n)).max() < 1e-8


def test_dilate_rejects_expansive():
    with pytest.raises(ContractViolation):
        dilate_operator(np.diag([1.5, 0.2]))


def test_parseval_complete():
    rng = np.random.default_rng(5)
    t = rng.standard_normal((3, 4))
    t = t / (np.linalg.norm(t, 2) * 1.2)    # Bessel bound < 1
    fr = Frame(t)
    full = parseval_complete(fr)
    s = frame_operator(full)
    assert np.abs(s - np.eye(3)).max() < 2e-8
    assert np.array_equal(full.synthesis[:, :4], t)


def test_parseval_complete_rejects_big_bessel():
    with pytest.raises(ContractViolation):
        parseval_complete(Frame(np.eye(2) * 1.5))


def test_projection_equals_gram():
    fr = _parseval(2, 5, 3)
    dil = naimark_dilate(fr)
    assert np.abs(dil.projection - gram_matrix(fr)).max() < 1e-12
