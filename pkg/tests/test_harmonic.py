import math

import numpy as np
import pytest

from pavekit.core import ContractViolation
from pavekit.harmonic import (
    GridFunction,
    ap_blocks,
    christensen_bounds,
    deviation_profile,
    distribution_check,
    example_e1_set,
    gk_component,
    gk_component_by_mask,
    grid_indicator,
    kadec_bounds,
    kadec_empirical_check,
    montgomery_vaughan_theta,
    shift_covariance_residual,
    toeplitz_section,
    translate,
    translate_average,
    tt3_identity_check,
    uniform_feichtinger_criterion,
    uniform_paving_criterion,
)


def _trig_poly(rng, n, terms=6):
    freqs = rng.choice(np.arange(-(n // 2 - 1), n // 2), size=terms,
                       replace=False)
    coeffs = rng.standard_normal(terms) + 1j * rng.standard_normal(terms)
    x = np.arange(n) / n
    vals = np.zeros(n, dtype=np.complex128)
    for f, c in zip(freqs, coeffs):
        vals += c * np.exp(2j * np.pi * f * x)
    return GridFunction(vals)


def test_grid_function_json_roundtrip():
    rng = np.random.default_rng(0)
    g = _trig_poly(rng, 24)
    h = GridFunction.from_json(g.to_json())
    assert np.array_equal(h.values, g.values)
    assert h.N == 24


def test_translate_and_divisor_contract():
    g = grid_indicator(12, np.arange(12) < 3)
    t = translate(g, 1, 4)                 # shift by 1/4 = 3 cells
    assert np.array_equal(t.values, np.roll(g.values, 3))
    with pytest.raises(ContractViolation):
        translate_average(g, 5)            # 5 does not divide 12


def test_identity_keystone_on_random_polynomials():
    rng = np.random.default_rng(1)
    for _ in range(50):
        g = _trig_poly(rng, 360)
        for k in (2, 3, 4, 6):
            ok, resid = tt3_identity_check(g, k)
            assert ok, f"residual {resid} at K={k}"


def test_component_routes_agree():
    rng = np.random.default_rng(2)
    for _ in range(10):
        g = _trig_poly(rng, 48)
        for k in (2, 3, 4):
            for res in range(k):
                a = gk_component(g, k, res)
                b = gk_component_by_mask(g, k, res)
                assert np.abs(a.values - b.values).max() < 1e-10


def test_components_sum_to_function():
    rng = np.random.default_rng(3)
    g = _trig_poly(rng, 36)
    for k in (2, 3, 6):
        acc = np.zeros(36, dtype=np.complex128)
        for res in range(k):
            acc += gk_component(g, k, res).values
        assert np.abs(acc - g.values).max() < 1e-10


def test_shift_covariance():
    rng = np.random.default_rng(4)
    g = _trig_poly(rng, 60)
    for k in (2, 3, 5):
        for res in range(k):
            for ell in range(1, k):
                assert shift_covariance_residual(g, k, res, ell) < 1e-10


def test_e1_bookkeeping_and_criteria():
    g, book = example_e1_set(360, 3)
    assert book["measure_set"] + book["measure_complement"] == 1.0
    assert abs(book["sum_weighted"] - book["measure_set"]) < 1e-12
    assert book["measure_complement"] >= 0.5
    for k in (1, 2, 3):
        ok, mn = uniform_feichtinger_criterion(g, k, 0.1)
        assert not ok and mn == 0.0
        ok, dev = uniform_paving_criterion(g, k, 0.5)
        assert not ok and dev >= 0.5


def test_e1_validation():
    with pytest.raises(ContractViolation):
        example_e1_set(100, 3)             # lcm(1..3) = 6 does not divide 100
    with pytest.raises(ContractViolation):
        example_e1_set(360, 3, c=0.7)      # mean bound needs c <= 1/2
    with pytest.raises(ContractViolation):
        example_e1_set(12, 3)              # no room for the level pieces


def test_deviation_profile_tt4_trend():
    rng = np.random.default_rng(5)
    # random union of grid intervals
    mask = np.zeros(720, dtype=bool)
    for _ in range(5):
        start = int(rng.integers(0, 720))
        mask[start:start + int(rng.integers(10, 80))] = True
    g = grid_indicator(720, mask)
    for k, dev in deviation_profile(g, [1, 2, 4, 8, 144, 360, 720]):
        assert dev <= 10.0 / math.sqrt(k) + 1e-12
    # averaging over the full grid reproduces the mean exactly
    assert deviation_profile(g, [720])[0][1] < 1e-12


def test_toeplitz_section_closed_form():
    n = 64
    g = grid_indicator(n, np.arange(n) < n // 2)   # E = [0, 1/2)
    sec = toeplitz_section(g, [0, 1])
    assert sec.shape == (2, 2)
    assert abs(sec[0, 0] - 0.5) < 1e-15            # diagonal = |E| exactly
    assert abs(sec[1, 1] - 0.5) < 1e-15
    want = np.sum(np.exp(-2j * np.pi * np.arange(n // 2) / n)) / n
    assert abs(sec[0, 1] - want) < 1e-12
    assert abs(sec[1, 0] - np.conj(want)) < 1e-12
    w = np.linalg.eigvalsh(sec)
    assert w[0] > 0                                # sections stay positive


def test_toeplitz_rejects_complex_symbol_and_aliasing():
    rng = np.random.default_rng(6)
    g = _trig_poly(rng, 32)
    with pytest.raises(ContractViolation):
        toeplitz_section(g, [0, 1])                # complex-valued symbol
    real = GridFunction(np.abs(g.values) ** 2)
    with pytest.raises(ContractViolation):
        toeplitz_section(real, [0, 20])            # frequency beyond N/2 - 1


def test_ap_blocks_and_distribution():
    assert ap_blocks([0, 1, 2, 3, 4, 5], 3) == [[0, 3], [1, 4], [2, 5]]
    g = GridFunction(np.full(24, 0.7))
    rep = distribution_check(g, ap_blocks(list(range(6)), 2), 0.1)
    assert rep["verdict"]
    for blk in rep["blocks"]:
        assert abs(blk["min"] - 0.7) < 1e-12 and abs(blk["max"] - 0.7) < 1e-12


def test_mv_theta_single_and_orthogonal():
    rep = montgomery_vaughan_theta([3.0], [1.0 + 0.5j], 2.0)
    assert rep["theta"] == 0.0
    # distinct integer frequencies over a full period: energy is exact,
    # so theta vanishes up to quadrature error
    rep = montgomery_vaughan_theta([0.0, 1.0, 2.0], [1.0, 2.0, -1.0], 1.0)
    assert abs(rep["theta"]) <= 10.0 * rep["quad_error_theta"] + 1e-9
    assert rep["within_unit"]


def test_mv_theta_random_instances():
    rng = np.random.default_rng(7)
    for _ in range(30):
        k = int(rng.integers(2, 6))
        gaps = rng.uniform(0.5, 2.0, size=k)
        freqs = np.cumsum(gaps)
        coeffs = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        rep = montgomery_vaughan_theta(list(freqs), list(coeffs),
                                       float(rng.uniform(1.0, 3.0)))
        assert rep["within_unit"], rep
        assert abs(rep["theta"]) <= 1.0 + 1e-3


def test_mv_theta_rejects_coincident_frequencies():
    with pytest.raises(ContractViolation):
        montgomery_vaughan_theta([1.0, 1.0], [1.0, 1.0], 1.0)


def test_kadec_bounds_constants():
    b = kadec_bounds(1.0, 1.0, math.pi, 0.0)
    assert b["L"] == 0.25
    assert b["lower"] == 1.0 and b["upper"] == 1.0
    # frozen: quarter-threshold formula at A=1, B=4, gamma=pi
    b2 = kadec_bounds(1.0, 4.0, math.pi, 0.1)
    assert abs(b2["L"] - 0.13497327191869206) < 1e-15
    # frozen: classical lower bound at delta = 0.2
    b3 = kadec_bounds(1.0, 1.0, math.pi, 0.2)
    assert abs(b3["lower"] - 0.0489434837048) < 1e-10
    assert b3["valid"]
    assert not kadec_bounds(1.0, 1.0, math.pi, 0.3)["valid"]
    with pytest.raises(ContractViolation):
        kadec_bounds(2.0, 1.0, math.pi, 0.1)


def test_christensen_bounds():
    b = christensen_bounds(1.0, 2.0, 0.0, 0.0)
    assert b["valid"] and b["lower"] == 1.0 and b["upper"] == 2.0
    b2 = christensen_bounds(1.0, 2.0, 0.1, 0.2)
    assert abs(b2["lower"] - 0.49) < 1e-12
    assert abs(b2["upper"] - 2.0 * (1.1 + 0.2 / math.sqrt(2.0)) ** 2) < 1e-12
    edge = christensen_bounds(1.0, 1.0, 0.5, 0.5)   # slack exactly 1
    assert not edge["valid"] and abs(edge["lower"]) < 1e-15


def test_kadec_empirical_edge_cases():
    rep = kadec_empirical_check(4, deltas=np.zeros(9))
    assert abs(rep["lambda_min"] - 1.0) < 1e-9 and rep["passed"]
    # a common shift modulates every vector by the same unimodular factor
    rep = kadec_empirical_check(4, deltas=np.full(9, 0.2))
    assert abs(rep["lambda_min"] - 1.0) < 1e-9
    with pytest.raises(ContractViolation):
        kadec_empirical_check(4, delta_max=0.3)


def test_kadec_empirical_random():
    for seed in range(10):
        rep = kadec_empirical_check(8, delta_max=0.2, seed=seed)
        assert rep["passed"], rep
        assert rep["lambda_min"] >= rep["predicted_lower"] - 0.05
