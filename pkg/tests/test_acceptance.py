"""Acceptance suite: one test per headline guarantee.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or in
the captured output) and asserts the stated tolerance.  Tolerances are
fixed here, not tuned at run time.  Statistical criteria use seeded trial
families and allow the documented failure-probability slack.
"""

import json
import math
import time

import numpy as np
import pytest

from hermeig import fparith, generate, matio, oracle
from hermeig._rng import child_seed
from hermeig.chol import chol, schur_blocks
from hermeig.dft import density, electron_density, fermi, transh
from hermeig.errors import BreakdownError, HermeigError
from hermeig.fparith import DEFAULT_CONSTANTS, PrecisionBudget
from hermeig.matcore import Mat, herm, herm_mm, inv, mm
from hermeig.shatter import shatterh
from hermeig.signfn import sgn
from hermeig.spectra import evalsh, evalsh_rel, norm_rel


def _line(name: str, passed: bool, detail: str) -> None:
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


# ---------------------------------------------------------------------------
# 1. shattering gap statistic
# ---------------------------------------------------------------------------

def test_criterion_1_shattering_gap_statistic():
    n, gamma, trials = 32, 0.01, 200
    a = generate.random_hermitian(n, 1234)
    threshold = gamma / (2.0 * n**3)
    t0 = time.perf_counter()
    hits = 0
    for t in range(trials):
        res = shatterh(a, gamma, seed=child_seed(9000, t))
        gap = oracle.gap_reference(res.x)
        drift = oracle.norm_reference(res.x.to_array() - a.to_array())
        if gap > threshold and drift < 8.0 * gamma:
            hits += 1
    elapsed = time.perf_counter() - t0
    rate = hits / trials
    floor = 1.0 - 3.0 / n - 0.05
    ok = rate >= floor and elapsed < 120.0
    _line(
        "criterion 1 shattering gap statistic",
        ok,
        f"rate={rate:.3f} (floor {floor:.3f}), elapsed={elapsed:.1f}s",
    )
    assert rate >= floor
    assert elapsed < 120.0


# ---------------------------------------------------------------------------
# 2. gap-independent additive eigenvalues
# ---------------------------------------------------------------------------

def _evalsh_success_rate(n: int, trials: int, eps: float, seed0: int):
    hits = 0
    worst = 0.0
    for t in range(trials):
        a, _ = generate.degenerate_spectrum(n, 5000 + t, levels=max(2, n // 4))
        try:
            res = evalsh(a, eps, seed=child_seed(seed0, t))
        except HermeigError:
            continue
        err = float(np.max(np.abs(res.eigenvalues - oracle.eig_reference(a).eigenvalues)))
        worst = max(worst, err)
        if err <= eps:
            hits += 1
    return hits / trials, worst


def test_criterion_2_evalsh_gapless_accuracy():
    eps = 1e-2
    t0 = time.perf_counter()
    rate16, worst16 = _evalsh_success_rate(16, 50, eps, 11)
    rate64, worst64 = _evalsh_success_rate(64, 50, eps, 12)
    elapsed = time.perf_counter() - t0
    floor64 = 1.0 - 17.0 / 64.0 - 0.05
    ok = rate64 >= floor64 and elapsed < 300.0
    _line(
        "criterion 2 gapless eigenvalue accuracy",
        ok,
        f"n=16 rate={rate16:.2f} worst={worst16:.2e} (report-only); "
        f"n=64 rate={rate64:.2f} (floor {floor64:.3f}) worst={worst64:.2e}; "
        f"elapsed={elapsed:.1f}s",
    )
    assert rate64 >= floor64
    assert elapsed < 300.0


# ---------------------------------------------------------------------------
# 3. relative-error eigenvalues
# ---------------------------------------------------------------------------

def test_criterion_3_relative_eigenvalues():
    eps = 0.1
    lam_min = 2.0**-10
    ok = True
    details = []
    for s in range(6):
        n = 8
        mags = np.logspace(math.log10(lam_min), 0.0, n)
        signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        spectrum = np.sort(mags * signs)
        q = oracle.random_unitary(n, 600 + s)
        a = herm(Mat((q * spectrum[None, :]) @ q.conj().T))
        res = evalsh_rel(a, eps, seed=child_seed(13, s))
        ref = oracle.eig_reference(a).eigenvalues
        rel_ok = bool(np.all(np.abs(res.eigenvalues - ref) <= eps * np.abs(ref)))
        bound = math.ceil(math.log2((1 + 2 * eps) / (eps * lam_min))) + 1
        sched_ok = len(res.trials_log) <= bound
        ok = ok and rel_ok and sched_ok
        details.append(f"s{s}:{'ok' if rel_ok and sched_ok else 'bad'}")
    _line("criterion 3 relative eigenvalue accuracy", ok, " ".join(details))
    assert ok


# ---------------------------------------------------------------------------
# 4. relative-error spectral norm
# ---------------------------------------------------------------------------

def test_criterion_4_norm_relative_error():
    eps = 1e-3
    trials, hits = 50, 0
    worst = 0.0
    for s in range(trials):
        a = generate.random_hermitian(16, 700 + s, norm=0.5)
        ref = oracle.norm_reference(a)
        try:
            sigma = norm_rel(a, eps, seed=child_seed(14, s))
        except HermeigError:
            continue
        rel = abs(sigma - ref) / ref
        worst = max(worst, rel)
        if rel <= eps:
            hits += 1
    ok = hits == trials
    _line(
        "criterion 4 spectral norm relative error",
        ok,
        f"hits={hits}/{trials}, worst rel err={worst:.2e} (tol {eps})",
    )
    assert hits == trials


# ---------------------------------------------------------------------------
# 5. sign function accuracy
# ---------------------------------------------------------------------------

def test_criterion_5_sign_function():
    delta = 1e-6
    ok = True
    worst = 0.0
    for s in range(20):
        a, _ = generate.fermi_gapped(16, 800 + s, k=8, gap=0.45)
        evals = oracle.eig_reference(a).eigenvalues
        assert np.min(np.abs(evals)) >= 0.2
        res = sgn(a, delta, 0.01, gap_estimate=0.01)
        ref = oracle.sgn_reference(a)
        sarr = res.s.to_array()
        err = float(np.linalg.norm(sarr - ref, 2))
        invol = float(np.linalg.norm(sarr @ sarr - np.eye(16), 2))
        worst = max(worst, err)
        ok = ok and err <= delta and invol <= 2 * delta + delta**2
    _line("criterion 5 sign function accuracy", ok, f"worst err={worst:.2e} (tol {delta})")
    assert ok


# ---------------------------------------------------------------------------
# 6. Fermi level
# ---------------------------------------------------------------------------

def test_criterion_6_fermi_level():
    eps = 0.01
    trials = 50
    ok = True
    worst_mu, worst_gap = 0.0, 0.0
    for s in range(trials):
        n, k = 12, 6
        a, _ = generate.fermi_gapped(
            n, 1000 + s, k=k, gap=0.05 + 0.2 * (s % 5) / 4.0, degeneracies=(s % 2 == 0)
        )
        mu_ref, gap_ref = oracle.fermi_reference(a, k)
        assert gap_ref >= 0.05 - 1e-12
        res = fermi(a, eps, k, seed=child_seed(15, s))
        mu_err = abs(res.mu - mu_ref) / gap_ref
        gap_err = abs(res.gap - gap_ref) / gap_ref
        worst_mu = max(worst_mu, mu_err)
        worst_gap = max(worst_gap, gap_err)
        ok = ok and mu_err <= eps and gap_err <= 2 * eps
    _line(
        "criterion 6 Fermi level",
        ok,
        f"worst mu err={worst_mu:.2e} (tol {eps}), worst gap err={worst_gap:.2e} (tol {2*eps})",
    )
    assert ok


# ---------------------------------------------------------------------------
# 7. density matrix
# ---------------------------------------------------------------------------

def test_criterion_7_density_matrix():
    delta = 1e-3
    ok = True
    worst = 0.0
    for s in range(8):
        n, k = 12, 5
        a, _ = generate.fermi_gapped(n, 1100 + s, k=k, gap=0.12)
        out = density(a, delta, k, seed=child_seed(16, s))
        parr = out.p.to_array()
        ref = oracle.density_reference(a, k)
        err = float(np.linalg.norm(parr - ref, 2))
        trace_ok = abs(np.trace(parr).real - k) <= 3 * n * delta
        idem_ok = np.linalg.norm(parr @ parr - parr, 2) <= 3 * delta
        neg = Mat(-a.to_array(), hermitian_certified=True)
        hole = density(neg, delta, n - k, seed=child_seed(17, s))
        compl = float(np.linalg.norm(parr + hole.p.to_array() - np.eye(n), 2))
        worst = max(worst, err)
        ok = ok and err <= delta and trace_ok and idem_ok and compl <= 2 * delta
    _line("criterion 7 density matrix", ok, f"worst ||P-P_ref||={worst:.2e} (tol {delta})")
    assert ok


# ---------------------------------------------------------------------------
# 8. electron density queries
# ---------------------------------------------------------------------------

def test_criterion_8_electron_density():
    delta = 1e-3
    ok = True
    worst = 0.0
    rng = np.random.default_rng(18)
    for s in range(3):
        n, k = 12, 6
        a, _ = generate.fermi_gapped(n, 1200 + s, k=k, gap=0.15)
        out = density(a, delta, k, seed=child_seed(19, s))
        ref = oracle.density_reference(a, k)
        for _ in range(100):
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            approx = electron_density(out.p, x)
            exact = float((x.conj() @ ref @ x).real)
            rel = abs(approx - exact) / float(np.linalg.norm(x) ** 2)
            worst = max(worst, rel)
            ok = ok and rel <= 8 * delta
    _line(
        "criterion 8 electron density queries",
        ok,
        f"worst |err|/||x||^2={worst:.2e} (tol {8*delta})",
    )
    assert ok


# ---------------------------------------------------------------------------
# 9. Cholesky backward error
# ---------------------------------------------------------------------------

def test_criterion_9_cholesky_backward_error():
    ok = True
    worst = 0.0
    breakdowns_native = 0
    for n in (8, 32, 128):
        for s in range(50):
            m = generate.hpd(n, 2000 + 100 * n + s, kappa_target=1e3)
            try:
                res = chol(m)
            except BreakdownError:
                breakdowns_native += 1
                continue
            larr = res.l.to_array()
            marr = m.to_array()
            rel = float(
                np.linalg.norm(larr @ larr.conj().T - marr, 2)
                / np.linalg.norm(marr, 2)
            )
            worst = max(worst, rel)
            ok = ok and rel <= 1e-8
    ok = ok and breakdowns_native == 0

    # directional low-precision check (report-only)
    b12 = PrecisionBudget.emulated(12)
    degraded = 0
    for s in range(20):
        m = generate.hpd(16, 3000 + s, kappa_target=1e4)
        try:
            res = chol(m, b12)
            larr = res.l.to_array()
            rel = float(
                np.linalg.norm(larr @ larr.conj().T - m.to_array(), 2)
                / np.linalg.norm(m.to_array(), 2)
            )
            if rel > 1e-2:
                degraded += 1
        except BreakdownError:
            degraded += 1
    _line(
        "criterion 9 Cholesky backward error",
        ok,
        f"worst native rel residual={worst:.2e} (tol 1e-8), "
        f"native breakdowns={breakdowns_native}, "
        f"12-bit degraded {degraded}/20 (directional, report-only)",
    )
    assert ok
    assert degraded >= 1  # the directional effect should be visible


# ---------------------------------------------------------------------------
# 10. generalized-to-Hermitian transform
# ---------------------------------------------------------------------------

def test_criterion_10_transh_backward_similarity():
    eps = 1e-6
    ok = True
    worst = 0.0
    for s in range(10):
        n = 16
        h = generate.random_hermitian(n, 4000 + s, norm=0.5)
        s0 = generate.hpd(n, 4100 + s, kappa_target=40.0)
        lam = oracle.eig_reference(s0).eigenvalues
        overlap = Mat(s0.to_array() / lam[0], hermitian_certified=True)
        kappa_s = oracle.cond_reference(overlap)
        assert kappa_s <= 50.0 * 1.5
        out = transh(h, overlap)
        got = np.sort(oracle.eig_reference(out).eigenvalues)
        ref = np.sort(oracle.generalized_eig_reference(h, overlap))
        tol = (
            eps
            * math.sqrt(kappa_s)
            * oracle.norm_reference(np.linalg.inv(overlap.to_array()))
            * oracle.norm_reference(h)
        )
        err = float(np.max(np.abs(got - ref)))
        worst = max(worst, err / tol)
        ok = ok and err <= tol
    h = generate.random_hermitian(16, 4999, norm=0.5)
    ident = transh(h, Mat.identity(16))
    ident_err = float(np.linalg.norm(ident.to_array() - h.to_array(), 2))
    ok = ok and ident_err <= 1e-12 * 16
    _line(
        "criterion 10 generalized reduction",
        ok,
        f"worst err/tol={worst:.2e}, identity case err={ident_err:.2e}",
    )
    assert ok


# ---------------------------------------------------------------------------
# 11. primitive contracts
# ---------------------------------------------------------------------------

def test_criterion_11_primitive_contracts():
    u = 2.0**-53
    ok = True
    # multiplication
    rng = np.random.default_rng(20)
    for s in range(10):
        n = 32
        a = Mat(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        b = Mat(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        out, _ = mm(a, b)
        err = np.linalg.norm(out.to_array() - oracle.mm_reference(a, b), 2)
        bound = (
            DEFAULT_CONSTANTS.mu_mm(n)
            * u
            * np.linalg.norm(a.to_array(), 2)
            * np.linalg.norm(b.to_array(), 2)
        )
        ok = ok and err <= bound
    # inversion residual over the seeded suite
    for n in (4, 16, 64):
        for s in range(100):
            m = generate.hpd(n, 5000 + s, kappa_target=100.0)
            out, _ = inv(m)
            resid = np.linalg.norm(out.to_array() @ m.to_array() - np.eye(n), 2)
            bound = 10.0 * DEFAULT_CONSTANTS.mu_inv(n) * u * 100.0 ** (
                DEFAULT_CONSTANTS.c_inv * max(1.0, math.log2(n))
            )
            ok = ok and resid <= min(bound, 1e-9)
    # symmetrized multiplication distance
    for s in range(10):
        n = 16
        a = Mat(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        gram = herm_mm(a.conj_t(), a)
        ref = oracle.mm_reference(a.conj_t(), a)
        bound = (
            DEFAULT_CONSTANTS.c_herm
            * math.log2(n)
            * u
            * np.linalg.norm(a.to_array(), 2) ** 2
            * DEFAULT_CONSTANTS.mu_mm(n)
        )
        ok = ok and np.linalg.norm(gram.to_array() - ref, 2) <= bound
    # block-norm inequalities on random HPD matrices
    for s in range(100):
        m = generate.hpd(12, 6000 + s, kappa_target=300.0)
        a, b, c = schur_blocks(m)
        norm_m = oracle.norm_reference(m)
        schur = (
            c.to_array()
            - b.to_array() @ np.linalg.inv(a.to_array()) @ b.to_array().conj().T
        )
        schur = (schur + schur.conj().T) / 2
        ok = ok and oracle.norm_reference(a) <= norm_m * (1 + 1e-12)
        ok = ok and oracle.norm_reference(c) <= norm_m * (1 + 1e-12)
        ok = ok and oracle.norm_reference(schur) <= norm_m * (1 + 1e-12)
        ok = ok and oracle.norm_reference(b) <= norm_m / 2 * (1 + 1e-12)
    _line("criterion 11 primitive contracts", ok, "mm/inv/herm and block-norm suites")
    assert ok


# ---------------------------------------------------------------------------
# 12. determinism
# ---------------------------------------------------------------------------

def test_criterion_12_determinism(tmp_path):
    from hermeig.cli import main

    m_path = tmp_path / "h.mtx"
    a, _ = generate.fermi_gapped(10, 7000, k=5, gap=0.2)
    matio.save(m_path, a)
    outputs = []
    for run in range(2):
        rep = tmp_path / f"rep{run}.json"
        rc = main(
            ["density", "--input", str(m_path), "--k", "5", "--delta", "1e-3",
             "--seed", "99", "--json-out", str(rep)]
        )
        assert rc == 0
        data = json.loads(rep.read_text())
        data.pop("timing_ms")
        outputs.append(json.dumps(data))
    evals1 = evalsh(a, 1e-3, seed=42).eigenvalues
    evals2 = evalsh(a, 1e-3, seed=42).eigenvalues
    ok = outputs[0] == outputs[1] and np.array_equal(evals1, evals2)
    _line("criterion 12 determinism", ok, "byte-identical reports and bit-identical spectra")
    assert ok
