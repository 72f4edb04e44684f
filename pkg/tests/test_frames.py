import numpy as np
import pytest

from pavekit.core import (
    ContractViolation,
    Frame,
    gen_harmonic_frame,
    gen_random_unit_frame,
)
from pavekit.frames import (
    analysis_matrix,
    canonical_dual,
    frame_bounds,
    frame_operator,
    frames_equivalent,
    gram_matrix,
    is_frame_sequence,
    parseval_normalize,
    project_frame,
    spectral_summary,
    subframe,
)


def _corpus():
    out = [gen_harmonic_frame(2, 4), gen_harmonic_frame(3, 7)]
    for seed in range(6):
        out.append(gen_random_unit_frame(3, 6, seed))
        out.append(gen_random_unit_frame(4, 5, seed, field="complex"))
    return out


def test_bounds_match_frame_operator_spectrum():
    for fr in _corpus():
        lo, hi = frame_bounds(fr)
        w = np.linalg.eigvalsh(frame_operator(fr))
        assert abs(lo - max(w[0], 0.0)) < 1e-10
        assert abs(hi - w[-1]) < 1e-10


def test_summary_invariants():
    for fr in _corpus():
        s = spectral_summary(fr)
        assert s.lower <= s.upper + 1e-12
        assert abs(s.trace_S - np.linalg.norm(fr.synthesis) ** 2) < 1e-9
        # unit-norm family: some vector already witnesses an upper bound >= 1
        if np.abs(np.linalg.norm(fr.synthesis, axis=0) - 1.0).max() < 1e-9:
            assert s.bessel >= 1.0 - 1e-12
        if s.rank == fr.M:
            assert s.riesz_lower is not None and s.riesz_lower > 0
        else:
            assert s.riesz_lower is None


def test_harmonic_summary_tight():
    s = spectral_summary(gen_harmonic_frame(3, 9))
    assert s.is_tight and not s.is_parseval
    assert abs(s.lower - 3.0) < 1e-12 and abs(s.upper - 3.0) < 1e-12
    assert s.is_equal_norm and s.spans


def test_canonical_dual_reconstructs():
    for fr in _corpus():
        dual = canonical_dual(fr)
        t, d = fr.synthesis, dual.synthesis
        # sum_i <f, dual_i> f_i = f  for every f, i.e. T D* = I
        assert np.abs(t @ d.conj().T - np.eye(fr.n)).max() < 1e-9
        assert np.abs(d @ t.conj().T - np.eye(fr.n)).max() < 1e-9


def test_parseval_normalize_gram_idempotent():
    for fr in _corpus():
        pn = parseval_normalize(fr)
        s = frame_operator(pn)
        assert np.abs(s - np.eye(fr.n)).max() < 1e-9
        g = gram_matrix(pn)
        assert np.abs(g @ g - g).max() < 2e-8
        assert frames_equivalent(fr, pn)


def test_is_frame_sequence():
    ok, bounds = is_frame_sequence(Frame(np.zeros((3, 2))))
    assert not ok and bounds is None
    # rank-1 family is still a frame for its span
    fr = Frame(np.array([[1.0, 2.0], [0.0, 0.0]]))
    ok, lo = is_frame_sequence(fr)
    assert ok and lo == pytest.approx(5.0)   # smallest nonzero eigenvalue


def test_subframe_and_projection():
    fr = gen_harmonic_frame(3, 6)
    sf = subframe(fr, [4, 1])
    assert np.array_equal(sf.synthesis, fr.synthesis[:, [4, 1]])
    with pytest.raises(ContractViolation):
        subframe(fr, [0, 6])
    p = np.zeros((3, 3))
    p[0, 0] = p[1, 1] = 1.0
    pf = project_frame(fr, p)
    s = frame_operator(pf)
    assert np.abs(s - p @ frame_operator(fr) @ p).max() < 1e-9
    with pytest.raises(ContractViolation):
        project_frame(fr, np.diag([1.0, 0.5, 0.0]))


def test_equivalence_is_change_of_basis():
    rng = np.random.default_rng(7)
    fr = gen_random_unit_frame(3, 6, 0)
    a = rng.standard_normal((3, 3)) + np.eye(3) * 3.0   # invertible
    moved = Frame(a @ fr.synthesis)
    assert frames_equivalent(fr, moved)
    other = gen_random_unit_frame(3, 6, 1)
    assert not frames_equivalent(fr, other)
    with pytest.raises(ContractViolation):
        frames_equivalent(fr, gen_random_unit_frame(3, 5, 0))


def test_analysis_is_adjoint_of_synthesis():
    fr = gen_random_unit_frame(4, 6, 3, field="complex")
    assert np.abs(analysis_matrix(fr) - fr.synthesis.conj().T).max() == 0.0


def test_dual_of_parseval_is_itself():
    pn = parseval_normalize(gen_random_unit_frame(3, 8, 2))
    dual = canonical_dual(pn)
    assert np.abs(dual.synthesis - pn.synthesis).max() < 1e-9
