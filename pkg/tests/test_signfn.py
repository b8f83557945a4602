"""Newton matrix sign function and spectral projectors."""

import numpy as np
import pytest

from hermeig import generate, oracle
from hermeig.errors import PreconditionError
from hermeig.fparith import NATIVE, sgn_iterations
from hermeig.matcore import Mat
from hermeig.signfn import (
    ApolloniusRegion,
    alpha_for_gap,
    projectors_from_sign,
    sgn,
)
from hermeig.signfn import _newton_iterations


# ---------------------------------------------------------------------------
# Apollonius geometry
# ---------------------------------------------------------------------------

def test_region_center_radius_identity():
    for alpha in (0.5, 0.9, 0.995):
        reg = ApolloniusRegion(alpha)
        assert reg.center - reg.radius == pytest.approx(
            (1 - alpha) / (1 + alpha), rel=1e-12
        )


def test_region_membership_on_real_grid():
    # real points between the inner edge and 1 always belong to the region
    for alpha in (0.95, 0.995):
        reg = ApolloniusRegion(alpha)
        inner = reg.inner_edge * (1.0 + 1e-9)
        for z in np.linspace(inner, 1.0, 50):
            assert reg.contains(complex(z, 0.0))
            assert reg.contains(complex(-z, 0.0))
        assert not reg.contains(complex(inner / 2.0, 0.0))
        assert not reg.contains(0.0j)


# ---------------------------------------------------------------------------
# alpha_for_gap
# ---------------------------------------------------------------------------

def test_alpha_value_at_17_over_1200():
    g = 17.0 / 1200.0
    assert alpha_for_gap(g) == pytest.approx(199.0 / 201.0, rel=1e-14)


def test_alpha_tends_to_one():
    assert alpha_for_gap(1e-9) == pytest.approx(1.0, abs=1e-8)


def test_alpha_always_above_99_percent():
    for g in np.linspace(1e-8, 17.0 / (6 * 199.0) * 0.999, 25):
        assert alpha_for_gap(float(g)) > 0.99


def test_alpha_rejects_large_gap():
    with pytest.raises(PreconditionError):
        alpha_for_gap(0.05)


# ---------------------------------------------------------------------------
# sgn
# ---------------------------------------------------------------------------

def test_sign_of_diagonal():
    a = Mat.diag([0.5, -0.5])
    res = sgn(a, 1e-6, 0.01, gap_estimate=0.01)
    assert np.allclose(res.s.to_array().real, np.diag([1.0, -1.0]), atol=1e-6)
    assert res.iterations_run <= sgn_iterations(alpha_for_gap(0.01), 1e-6, 0.01)


def test_first_newton_iterate_scalar():
    x0 = np.diag([0.5, -0.5]).astype(complex)
    x1, run = _newton_iterations(x0, 1, NATIVE, None)
    assert run == 1
    assert np.allclose(x1, np.diag([1.25, -1.25]), atol=0)


def test_sign_matches_reference_on_separated_hermitian():
    for s in range(8):
        a, _ = generate.fermi_gapped(16, 200 + s, k=8, gap=0.45)
        res = sgn(a, 1e-6, 0.01, gap_estimate=0.01)
        ref = oracle.sgn_reference(a)
        assert np.linalg.norm(res.s.to_array() - ref, 2) <= 1e-6


def test_sign_involution():
    delta = 1e-6
    a, _ = generate.fermi_gapped(12, 33, k=6, gap=0.5)
    res = sgn(a, delta, 0.01, gap_estimate=0.01)
    s = res.s.to_array()
    assert np.linalg.norm(s @ s - np.eye(12), 2) <= 2 * delta + delta**2


def test_sign_rescaling_recorded():
    a = Mat.diag([0.3, -0.3])
    res = sgn(a, 1e-4, 0.01, gap_estimate=0.4)
    assert res.rescale_halvings >= 5  # 0.4 must drop below 17/1194
    ref = oracle.sgn_reference(a)
    assert np.linalg.norm(res.s.to_array() - ref, 2) <= 1e-4


def test_newton_preserves_oracle_sign_of_iterates():
    a, _ = generate.fermi_gapped(8, 44, k=4, gap=0.5)
    ref = oracle.sgn_reference(a)
    x = a.to_array().copy()
    for _ in range(6):
        x, _ = _newton_iterations(x, 1, NATIVE, None)
        assert np.allclose(oracle.sgn_reference(x), ref, atol=1e-8)


def test_sgn_preconditions():
    a = Mat.diag([0.5, -0.5])
    with pytest.raises(PreconditionError):
        sgn(a, 0.2, 0.01, gap_estimate=0.01)  # delta too large
    with pytest.raises(PreconditionError):
        sgn(Mat(np.ones((2, 3))), 1e-4, 0.01)


def test_scalar_reduction_matches_newton_sequence():
    x = 0.5
    seq = []
    for _ in range(4):
        x = (x + 1.0 / x) / 2.0
        seq.append(x)
    m, _ = _newton_iterations(np.array([[0.5 + 0j]]), 4, NATIVE, None)
    assert m[0, 0].real == pytest.approx(seq[-1], rel=0, abs=0)


def test_early_exit_mode_shortens_run():
    a = Mat.diag([0.9, -0.9])
    full = sgn(a, 1e-6, 0.01, gap_estimate=0.001)
    fast = sgn(a, 1e-6, 0.01, gap_estimate=0.001, early_exit=True)
    assert fast.iterations_run <= full.iterations_run


# ---------------------------------------------------------------------------
# projectors
# ---------------------------------------------------------------------------

def test_projectors_identity_sign():
    p_plus, p_minus = projectors_from_sign(Mat.identity(3))
    assert np.array_equal(p_plus.to_array(), np.eye(3))
    assert np.array_equal(p_minus.to_array(), np.zeros((3, 3)))


def test_projectors_diag_sign():
    p_plus, _ = projectors_from_sign(Mat.diag([1.0, -1.0]))
    assert np.array_equal(p_plus.to_array().real, np.diag([1.0, 0.0]))


def test_projectors_sum_to_identity_exactly():
    for s in range(6):
        a, _ = generate.fermi_gapped(10, 300 + s, k=5, gap=0.4)
        res = sgn(a, 1e-6, 0.01, gap_estimate=0.01)
        p_plus, p_minus = projectors_from_sign(res.s)
        total = p_plus.to_array() + p_minus.to_array()
        assert np.array_equal(total, np.eye(10).astype(complex))


def test_projector_idempotency_defect():
    delta = 1e-6
    a, _ = generate.fermi_gapped(16, 55, k=8, gap=0.5)
    res = sgn(a, delta, 0.01, gap_estimate=0.01)
    p_plus, _ = projectors_from_sign(res.s)
    arr = p_plus.to_array()
    assert np.linalg.norm(arr @ arr - arr, 2) <= 3 * delta
