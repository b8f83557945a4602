"""Self-checks for the independent reference routines."""

import math
from pathlib import Path

import numpy as np
import pytest

from hermeig import generate, oracle
from hermeig.errors import PreconditionError


def test_diagonal_input_is_fixed_point():
    d = np.diag([3.0, -1.0, 0.5]).astype(complex)
    dec = oracle.eig_reference(d)
    assert np.allclose(dec.eigenvalues, [-1.0, 0.5, 3.0], atol=0)
    assert dec.residual == 0.0


def test_two_by_two_closed_form():
    a, b, c = 1.0, 2.0, 3.0
    m = np.array([[a, b], [b, c]], dtype=complex)
    disc = math.sqrt((a - c) ** 2 + 4 * b * b)
    expected = sorted([(a + c - disc) / 2, (a + c + disc) / 2])
    dec = oracle.eig_reference(m)
    assert np.allclose(dec.eigenvalues, expected, atol=1e-14)


@pytest.mark.parametrize("n", [5, 16, 48])
def test_random_hermitian_residual_and_orthonormality(n):
    m = generate.random_hermitian(n, seed=n)
    dec = oracle.eig_reference(m)
    arr = m.to_array()
    norm = np.linalg.norm(arr, 2)
    assert dec.residual <= 1e-12 * n * max(norm, 1.0)
    v = dec.eigenvectors
    assert np.linalg.norm(v.conj().T @ v - np.eye(n), 2) <= 1e-12 * n
    assert np.all(np.diff(dec.eigenvalues) >= 0.0)


def test_gershgorin_containment_on_diag_dominant():
    rng = np.random.default_rng(7)
    n = 12
    a = rng.standard_normal((n, n)) * 0.01 + 1j * rng.standard_normal((n, n)) * 0.01
    a = (a + a.conj().T) / 2
    a[np.arange(n), np.arange(n)] = np.arange(n, dtype=float)
    evals = oracle.eig_reference(a).eigenvalues
    radii = np.sum(np.abs(a), axis=1) - np.abs(np.diagonal(a))
    centers = np.diagonal(a).real
    for lam in evals:
        assert np.any(np.abs(lam - centers) <= radii + 1e-12)


def test_sgn_reference_diagonal():
    s = oracle.sgn_reference(np.diag([2.0, -3.0]).astype(complex))
    assert np.allclose(s, np.diag([1.0, -1.0]), atol=1e-14)


def test_density_reference_diagonal():
    p = oracle.density_reference(np.diag([-1.0, 0.0, 1.0]).astype(complex), k=1)
    assert np.allclose(p, np.diag([1.0, 0.0, 0.0]), atol=1e-12)


def test_chol_reference_hand_value():
    m = np.array([[4.0, 2.0], [2.0, 3.0]], dtype=complex)
    low = oracle.chol_reference(m)
    expected = np.array([[2.0, 0.0], [1.0, math.sqrt(2.0)]])
    assert np.allclose(low, expected, atol=1e-15)
    with pytest.raises(PreconditionError):
        oracle.chol_reference(np.array([[1.0, 2.0], [2.0, 1.0]], dtype=complex))


def test_norm_and_gap_reference():
    m = np.diag([0.5, -0.3, 0.1]).astype(complex)
    assert oracle.norm_reference(m) == pytest.approx(0.5, abs=1e-14)
    assert oracle.gap_reference(m) == pytest.approx(0.4, abs=1e-14)
    rect = np.array([[3.0, 0.0], [0.0, 1.0], [0.0, 0.0]], dtype=complex)
    assert oracle.norm_reference(rect) == pytest.approx(3.0, abs=1e-12)


def test_mm_reference_exact_small():
    a = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
    b = np.array([[5.0, 6.0], [7.0, 8.0]], dtype=complex)
    assert np.array_equal(oracle.mm_reference(a, b).real, [[19.0, 22.0], [43.0, 50.0]])


def test_generalized_reference_diagonal_pencil():
    h = np.diag([1.0, 2.0]).astype(complex)
    s = np.diag([1.0, 4.0]).astype(complex)
    lam = oracle.generalized_eig_reference(h, s)
    assert np.allclose(np.sort(lam), [0.5, 1.0], atol=1e-13)


def test_random_unitary_is_unitary():
    q = oracle.random_unitary(10, seed=5)
    assert np.linalg.norm(q.conj().T @ q - np.eye(10), 2) <= 1e-13


def test_oracle_module_does_not_import_production_code():
    import_lines = [
        ln.strip()
        for ln in Path(oracle.__file__).read_text().splitlines()
        if ln.strip().startswith(("import ", "from "))
    ]
    banned = ("matcore", "spectra", "signfn", "chol", "shatter", "dft", "fparith")
    for ln in import_lines:
        for name in banned:
            assert name not in ln, f"oracle must stay independent of {name}: {ln}"
