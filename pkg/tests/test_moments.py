import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectra.eig import singular_values
from spectra.ensembles import EnsembleSpec, Kind, build, deterministic_part
from spectra.errors import BadParams, EmptyMeasure, TooLarge
from spectra.measures import (BlipWeightParams, SpectralSample, WeightedPointMeasure,
                              bulk_sq_singular_measure, trim)
from spectra.moments import (MomentReport, alternating_identity, blip_centered_target,
                             blip_first_moment_target, catalan, cjr_coefficients,
                             ebsssm_identity_check, empirical_moment, hermitized_moment_eval,
                             hollow_goe_trace_moment, nonregular_bulk_targets,
                             pattern_bulk_moment, quarter_circle_target)
from spectra.rng import SeedStream


def test_empirical_moment_examples():
    assert empirical_moment(WeightedPointMeasure([3.0], [1.0]), 2) == 9
    sym = WeightedPointMeasure([-1.0, 1.0], [0.5, 0.5])
    assert empirical_moment(sym, 1, centered=True) == 0
    two = WeightedPointMeasure([0.0, 2.0], [0.5, 0.5])
    assert empirical_moment(two, 2, centered=True) == pytest.approx(1.0)
    heavy = WeightedPointMeasure([1.0, 3.0], [2.0, 2.0])
    assert empirical_moment(heavy, 1, normalized=True) == pytest.approx(2.0)
    with pytest.raises(EmptyMeasure):
        empirical_moment(WeightedPointMeasure([], []), 1)


def test_moment_report_errors():
    rep = MomentReport(1, 0.52, 0.5, 0.05)
    assert rep.abs_error == pytest.approx(0.02)
    assert rep.rel_error == pytest.approx(0.04)
    assert rep.passed
    assert not MomentReport(3, 0.2, 0.0, 0.1, relative=False).passed


def test_catalan_values():
    assert catalan(0) == 1
    assert catalan(3) == 5
    assert catalan(10) == 16796


def test_catalan_recurrence():
    for n in range(13):
        assert catalan(n + 1) == sum(catalan(i) * catalan(n - i) for i in range(n + 1))


def test_quarter_circle_targets():
    assert quarter_circle_target(1, 2, 1) == pytest.approx(0.5)
    assert quarter_circle_target(2, 2, 1) == pytest.approx(0.5)
    assert quarter_circle_target(2, 10 ** 6, 1) == pytest.approx(2.0, rel=1e-5)
    with pytest.raises(BadParams):
        quarter_circle_target(1, 2, 2)


def test_hollow_goe_small_cases():
    for k in range(1, 6):
        assert hollow_goe_trace_moment(k, 1) == 0
    assert hollow_goe_trace_moment(2, 2) == 2
    assert hollow_goe_trace_moment(2, 4) == 6


def test_hollow_goe_k2_closed_form():
    # Tr B^r = 2 x^r for even r, so E = 2 (r - 1)!!
    for r in range(0, 9, 2):
        assert hollow_goe_trace_moment(2, r) == 2 * math.prod(range(1, r, 2))


def test_hollow_goe_odd_vanish():
    for k in range(1, 6):
        for r in range(1, 9, 2):
            assert hollow_goe_trace_moment(k, r) == 0


def test_hollow_goe_monte_carlo_k3():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(200_000, 3))
    B = np.zeros((x.shape[0], 3, 3))
    for (i, j), col in zip([(0, 1), (0, 2), (1, 2)], x.T):
        B[:, i, j] = B[:, j, i] = col
    tr4 = np.einsum("nij,njk,nkl,nli->n", B, B, B, B)
    assert tr4.mean() == pytest.approx(float(hollow_goe_trace_moment(3, 4)), rel=0.03)


def test_hollow_goe_caps():
    with pytest.raises(TooLarge):
        hollow_goe_trace_moment(6, 2)
    with pytest.raises(TooLarge):
        hollow_goe_trace_moment(2, 9)


def test_blip_targets():
    assert blip_centered_target(2, 2) == pytest.approx(0.5)
    assert blip_centered_target(2, 3) == 0
    assert blip_centered_target(2, 4) == pytest.approx(0.75)
    assert blip_first_moment_target(1) == 0
    assert blip_first_moment_target(2) == 1
    assert blip_first_moment_target(4) == pytest.approx(1.5)


def _cjr_closed_form(r):
    """c_j = C(r, j) C(2r, r - j) / (r + 1 - j), an independent closed form."""
    return tuple(math.comb(r, j) * math.comb(2 * r, r - j) // (r + 1 - j) for j in range(r + 1))


def test_cjr_first_order():
    assert cjr_coefficients(1).coefficients == (1, 1)


def test_cjr_matches_closed_form():
    for r in range(1, 7):
        assert cjr_coefficients(r).coefficients == _cjr_closed_form(r)


def test_cjr_invariants():
    for r in range(1, 7):
        c = cjr_coefficients(r).coefficients
        assert c[0] == catalan(r)
        assert c[-1] == 1
        assert all(0 <= cj <= 4 ** r * catalan(r) for cj in c)


def test_cjr_cap():
    with pytest.raises(TooLarge):
        cjr_coefficients(7)


def test_cjr_matches_ginibre_moments():
    # (1/N) Tr [(X/sqrt N - z)^*(X/sqrt N - z)]^r for an iid complex Gaussian matrix
    N, z = 300, 1.0
    rng = np.random.default_rng(1)
    acc = np.zeros(3)
    for _ in range(4):
        X = (rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))) / math.sqrt(2 * N) - z * np.eye(N)
        ev = np.linalg.eigvalsh(X.conj().T @ X)
        acc += [np.mean(ev ** r) for r in (1, 2, 3)]
    acc /= 4
    for r in (1, 2, 3):
        assert acc[r - 1] == pytest.approx(hermitized_moment_eval(cjr_coefficients(r), z), rel=0.03)


def test_hermitized_eval():
    assert hermitized_moment_eval(cjr_coefficients(1), 0) == 1
    assert hermitized_moment_eval(cjr_coefficients(3), 0) == 5
    assert hermitized_moment_eval(cjr_coefficients(2), 1j) == sum(cjr_coefficients(2).coefficients)


def _stirling2(p, m):
    table = [[0] * (m + 1) for _ in range(p + 1)]
    table[0][0] = 1
    for i in range(1, p + 1):
        for j in range(1, m + 1):
            table[i][j] = j * table[i - 1][j] + table[i - 1][j - 1]
    return table[p][m]


def test_alternating_identity_examples():
    assert alternating_identity(3, 2) == 0
    assert alternating_identity(3, 3) == 6
    assert alternating_identity(0, 0) == 1


def test_alternating_identity_dichotomy():
    for m in range(21):
        for p in range(m + 1):
            assert alternating_identity(m, p) == math.factorial(m) * _stirling2(p, m)
            assert alternating_identity(m, p) == (math.factorial(m) if p == m else 0)


def test_alternating_identity_bounds():
    with pytest.raises(ValueError):
        alternating_identity(65, 1)
    with pytest.raises(ValueError):
        alternating_identity(3, 4)


def test_identity_on_deterministic_part():
    for N, k in ((32, 2), (33, 3)):
        spec = EnsembleSpec(Kind.CHECKERBOARD, N, k)
        params = BlipWeightParams.for_size(N, k)
        P = deterministic_part(spec)
        assert ebsssm_identity_check(P, params, 1) <= 1e-10
        assert ebsssm_identity_check(N / k * P, params, 1) <= 1e-10
        assert ebsssm_identity_check(np.zeros((N, N)), params, 1) == 0.0


def test_identity_caps():
    params = BlipWeightParams.for_size(512, 2)
    with pytest.raises(TooLarge):
        ebsssm_identity_check(np.zeros((512, 512)), params, 1)
    with pytest.raises(TooLarge):
        ebsssm_identity_check(np.zeros((32, 32)), BlipWeightParams.for_size(32, 2), 5)


@given(st.sampled_from([(32, 2), (64, 2), (33, 3), (63, 3)]), st.integers(1, 2),
       st.integers(0, 2**32))
@settings(max_examples=20, deadline=None)
def test_identity_random_matrices(shape, r, seed):
    N, k = shape
    A = build(EnsembleSpec(Kind.CHECKERBOARD, N, k), SeedStream(seed))
    assert ebsssm_identity_check(A, BlipWeightParams.for_size(N, k), r) <= 1e-6


def test_nonregular_targets():
    t = nonregular_bulk_targets()
    assert t == (0.75, 1.25, 2.625, 6.1875)
    assert t[0] > quarter_circle_target(1, 2, 1)
    mask = [[False, True], [True, True]]
    assert tuple(float(pattern_bulk_moment(mask, r)) for r in range(1, 5)) == t


def test_pattern_moment_reduces_to_quarter_circle():
    for k in (2, 3):
        mask = ~np.eye(k, dtype=bool)
        for r in range(1, 4):
            assert pattern_bulk_moment(mask, r) == Fraction(catalan(r)) * Fraction(k - 1, k) ** r


def test_bulk_moments_improve_with_n():
    errors = []
    for N in (128, 256, 512):
        est = np.zeros(3)
        for t in range(20):
            s = singular_values(build(EnsembleSpec(Kind.CHECKERBOARD, N, 2), SeedStream(31, t))).values
            m = trim(bulk_sq_singular_measure(SpectralSample(singular_values=s), N))
            est += [empirical_moment(m, r, normalized=True) for r in (1, 2, 3)]
        est /= 20
        errors.append(sum(abs(est[r - 1] - quarter_circle_target(r, 2)) for r in (1, 2, 3)))
    inversions = sum(b > a for a, b in zip(errors, errors[1:]))
    assert inversions <= 1
    assert errors[-1] < errors[0]
