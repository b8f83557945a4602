"""Command-line harness: generators, pipeline drivers, and statistics.

Every subcommand emits a versioned JSON report with a stable field order;
rerunning with identical flags and seed reproduces the report byte for
byte except for the timing field.  Exit codes: 0 success, 2 precondition
or validation failure, 3 budget infeasible, 4 probabilistic failure,
5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import dft, generate, matio, oracle, signfn, spectra
from .chol import chol as run_chol
from ._rng import child_seed
from .errors import BreakdownError, HermeigError, exit_code_for
from .fparith import NATIVE, PrecisionBudget, StabilityConstants
from .matcore import Mat
from .shatter import shatterh

SCHEMA_VERSION = 1


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _budget(args) -> PrecisionBudget:
    bits = getattr(args, "emulate_bits", None)
    return PrecisionBudget.emulated(bits) if bits else NATIVE


def _consts(args) -> StabilityConstants:
    overrides = {}
    for item in getattr(args, "consts", None) or []:
        key, _, value = item.partition("=")
        if not value:
            raise ValueError(f"bad --const {item!r}; expected name=value")
        overrides[key] = float(value)
    return StabilityConstants(**overrides) if overrides else StabilityConstants()


def _thread_count() -> int:
    return max(1, int(os.environ.get("HERMEIG_THREADS", "1")))


def _run_trials(fn, trials: int):
    workers = _thread_count()
    if workers == 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))


def _emit(args, report: dict) -> None:
    text = json.dumps(_jsonable(report), indent=2) + "\n"
    if getattr(args, "json_out", None):
        Path(args.json_out).write_text(text)
    else:
        sys.stdout.write(text)


def _report(subcommand: str, seed, inputs: dict, outputs: dict, certificates=None, t0=None):
    return {
        "schema": SCHEMA_VERSION,
        "subcommand": subcommand,
        "seed": seed,
        "inputs": inputs,
        "outputs": outputs,
        "certificates": certificates or [],
        "timing_ms": (time.perf_counter() - t0) * 1e3 if t0 is not None else 0.0,
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> dict:
    t0 = time.perf_counter()
    out = Path(args.output)
    info: dict = {"kind": args.kind, "n": args.n}
    if args.kind == "random_hermitian":
        matio.save(out, generate.random_hermitian(args.n, args.seed))
    elif args.kind == "shattered":
        matio.save(out, generate.shattered_input(args.n, args.seed))
    elif args.kind == "hpd":
        matio.save(out, generate.hpd(args.n, args.seed, kappa_target=args.kappa))
        info["kappa_target"] = args.kappa
    elif args.kind == "tight_binding_chain":
        matio.save(out, generate.tight_binding_chain(args.n))
        info["spectrum"] = generate.tight_binding_spectrum(args.n)
    elif args.kind == "degenerate_spectrum":
        m, spectrum = generate.degenerate_spectrum(args.n, args.seed)
        matio.save(out, m)
        info["spectrum"] = spectrum
    elif args.kind == "ks_problem":
        problem = generate.ks_problem(args.n, args.seed, k=args.k, coupling=args.coupling)
        stem = out.with_suffix("")
        h_path = stem.with_name(stem.name + "_h.mtx")
        s_path = stem.with_name(stem.name + "_s.mtx")
        x_path = stem.with_name(stem.name + "_x.mtx")
        matio.save(h_path, problem.h)
        matio.save(s_path, problem.s)
        matio.save(x_path, problem.basis_eval)
        container = {
            "schema": SCHEMA_VERSION,
            "h": h_path.name,
            "s": s_path.name,
            "k": problem.k,
            "basis_eval": x_path.name,
        }
        Path(out).write_text(json.dumps(container, indent=2) + "\n")
        info["k"] = problem.k
    else:
        raise ValueError(f"unknown kind {args.kind!r}")
    return _report("generate", args.seed, info, {"output": str(out)}, t0=t0)


def cmd_shatter(args) -> dict:
    t0 = time.perf_counter()
    budget = _budget(args)
    if args.input:
        a = matio.load(args.input)
        n = a.rows
    else:
        n = args.n
        a = Mat(np.zeros((n, n), dtype=np.complex128), hermitian_certified=True)
    gamma = args.gamma
    claimed_gap = gamma / (2.0 * float(n) ** 3)

    def one(t: int) -> dict:
        res = shatterh(a, gamma, budget, child_seed(args.seed, "trial", t))
        gap = oracle.gap_reference(res.x)
        drift = oracle.norm_reference(res.x.to_array() - a.to_array())
        return {
            "trial": t,
            "gap": gap,
            "drift": drift,
            "success": bool(gap > claimed_gap and drift < 8.0 * gamma),
        }

    rows = _run_trials(one, args.trials)
    successes = sum(r["success"] for r in rows)
    if args.emit_gap_stats:
        lines = ["trial,gap,drift,success\n"]
        for r in rows:
            lines.append(f"{r['trial']},{r['gap']!r},{r['drift']!r},{int(r['success'])}\n")
        Path(args.emit_gap_stats).write_text("".join(lines))
    outputs = {
        "n": n,
        "gamma": gamma,
        "claimed_gap": claimed_gap,
        "claimed_drift": 8.0 * gamma,
        "trials": args.trials,
        "successes": successes,
        "success_rate": successes / args.trials if args.trials else 0.0,
    }
    return _report("shatter", args.seed, {"gamma": gamma, "trials": args.trials}, outputs, t0=t0)


def cmd_evals(args) -> dict:
    t0 = time.perf_counter()
    budget = _budget(args)
    a = matio.load(args.input)
    if args.relative:
        res = spectra.evalsh_rel(a, args.eps, budget, args.seed, _consts(args))
    else:
        res = spectra.evalsh(a, args.eps, budget, args.seed, _consts(args))
    outputs = {
        "eigenvalues": res.eigenvalues,
        "backward_error": res.backward_error,
        "schedule": res.trials_log if args.relative else None,
    }
    if args.oracle:
        ref = oracle.eig_reference(a).eigenvalues
        outputs["oracle_eigenvalues"] = ref
        outputs["max_abs_error"] = float(np.max(np.abs(res.eigenvalues - ref)))
    inputs = {"input": args.input, "eps": args.eps, "relative": bool(args.relative)}
    return _report("evals", args.seed, inputs, outputs, t0=t0)


def cmd_chol(args) -> dict:
    t0 = time.perf_counter()
    budget = _budget(args)
    m = matio.load(args.input)
    inputs = {"input": args.input, "eps": args.eps, "emulate_bits": args.emulate_bits}
    try:
        res = run_chol(m, budget, eps=args.eps, consts=_consts(args))
    except BreakdownError as exc:
        outputs = {"breakdown": True, "error": str(exc)}
        return _report("chol", args.seed, inputs, outputs, t0=t0)
    larr = res.l.to_array()
    residual = float(
        np.linalg.norm(larr @ larr.conj().T - m.to_array(), ord=2)
        / max(np.linalg.norm(m.to_array(), ord=2), 1e-300)
    )
    if args.output:
        matio.save(args.output, res.l)
    outputs = {
        "breakdown": False,
        "relative_residual": residual,
        "recursion_depth": res.recursion_depth,
        "backward_bound": res.backward_bound,
    }
    if args.oracle:
        ref = oracle.chol_reference(m)
        outputs["oracle_factor_distance"] = float(np.linalg.norm(larr - ref, ord="fro"))
    return _report("chol", args.seed, inputs, outputs, t0=t0)


def cmd_fermi(args) -> dict:
    t0 = time.perf_counter()
    budget = _budget(args)
    a = matio.load(args.input)
    res = dft.fermi(a, args.eps, args.k, budget, args.seed, _consts(args))
    outputs = {
        "mu": res.mu,
        "gap": res.gap,
        "k": res.k,
        "delta_final": res.delta_final,
    }
    if args.oracle:
        mu_ref, gap_ref = oracle.fermi_reference(a, args.k)
        outputs["oracle_mu"] = mu_ref
        outputs["oracle_gap"] = gap_ref
    inputs = {"input": args.input, "eps": args.eps, "k": args.k}
    return _report("fermi", args.seed, inputs, outputs, t0=t0)


def cmd_density(args) -> dict:
    t0 = time.perf_counter()
    budget = _budget(args)
    a = matio.load(args.input)
    res = dft.density(a, args.delta, args.k, budget, args.seed, _consts(args))
    if args.output:
        matio.save(args.output, res.p)
    outputs = {
        "fermi_mu": res.fermi.mu,
        "fermi_gap": res.fermi.gap,
        "idempotency_defect": res.idempotency_defect,
        "trace_defect": res.trace_defect,
        "trace": float(np.trace(res.p.to_array()).real),
    }
    if args.oracle:
        ref = oracle.density_reference(a, args.k)
        outputs["oracle_distance"] = float(
            np.linalg.norm(res.p.to_array() - ref, ord=2)
        )
    inputs = {"input": args.input, "delta": args.delta, "k": args.k}
    return _report("density", args.seed, inputs, outputs, t0=t0)


def _load_ks(path: str) -> dft.KSProblem:
    base = Path(path).parent
    payload = json.loads(Path(path).read_text())
    h = matio.load(base / payload["h"])
    s = matio.load(base / payload["s"]) if payload.get("s") else None
    x = matio.load(base / payload["basis_eval"]) if payload.get("basis_eval") else None
    return dft.KSProblem(h=h, s=s, k=int(payload["k"]), basis_eval=x)


def cmd_ks(args) -> dict:
    t0 = time.perf_counter()
    budget = _budget(args)
    problem = _load_ks(args.input)
    sol = dft.solve_ks(problem, args.delta, budget, args.seed, _consts(args))
    if args.output:
        matio.save(args.output, sol.density.p)
    outputs = {
        "fermi_mu": sol.density.fermi.mu,
        "fermi_gap": sol.density.fermi.gap,
        "idempotency_defect": sol.density.idempotency_defect,
        "trace_defect": sol.density.trace_defect,
        "provenance": sol.provenance,
        "electron_densities": sol.electron_densities,
    }
    inputs = {"input": args.input, "delta": args.delta}
    return _report("ks", args.seed, inputs, outputs, t0=t0)


def cmd_bench(args) -> dict:
    t0 = time.perf_counter()
    from . import matcore

    budget = _budget(args)
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = []
    for n in sizes:
        a = generate.random_hermitian(n, args.seed)
        start = time.perf_counter()
        if args.op == "mm":
            matcore.mm(a, a, budget)
        elif args.op == "inv":
            matcore.inv(a, budget)
        elif args.op == "chol":
            run_chol(generate.hpd(n, args.seed, 10.0), budget)
        elif args.op == "evalsh":
            spectra.evalsh(a, 1e-2, budget, args.seed)
        else:
            raise ValueError(f"unknown op {args.op!r}")
        rows.append({"n": n, "op": args.op, "elapsed_ms": (time.perf_counter() - start) * 1e3})
    return _report(
        "bench",
        args.seed,
        {"op": args.op, "sizes": sizes},
        {"timings_ms": rows},
        t0=t0,
    )


def cmd_sweep_precision(args) -> dict:
    t0 = time.perf_counter()
    bits_list = [int(b) for b in args.bits.split(",")]
    n = args.n
    rows = []
    for bits in bits_list:
        budget = PrecisionBudget.emulated(bits)

        def one(t: int) -> bool:
            seed = child_seed(args.seed, "sweep", bits, t)
            try:
                if args.algo == "chol":
                    m = generate.hpd(n, seed, kappa_target=args.kappa)
                    res = run_chol(m, budget)
                    larr = res.l.to_array()
                    rel = np.linalg.norm(
                        larr @ larr.conj().T - m.to_array(), ord=2
                    ) / np.linalg.norm(m.to_array(), ord=2)
                    return bool(rel <= args.eps)
                if args.algo == "shatter":
                    a = generate.random_hermitian(n, seed)
                    res = shatterh(a, args.gamma, budget, seed)
                    gap = oracle.gap_reference(res.x)
                    return bool(gap > args.gamma / (2.0 * float(n) ** 3))
                if args.algo == "sign":
                    a, _ = generate.fermi_gapped(n, seed, k=n // 2, gap=0.4)
                    sres = signfn.sgn(a, 0.05, 0.01, budget, gap_estimate=0.01)
                    ref = oracle.sgn_reference(a)
                    return bool(
                        np.linalg.norm(sres.s.to_array() - ref, ord=2) <= 0.05
                    )
                raise ValueError(f"unknown algo {args.algo!r}")
            except HermeigError:
                return False

        outcomes = _run_trials(one, args.trials)
        successes = sum(outcomes)
        rows.append(
            {
                "bits": bits,
                "trials": args.trials,
                "successes": successes,
                "rate": successes / args.trials if args.trials else 0.0,
            }
        )
    if args.output:
        lines = ["bits,trials,successes,rate\n"]
        for r in rows:
            lines.append(f"{r['bits']},{r['trials']},{r['successes']},{r['rate']!r}\n")
        Path(args.output).write_text("".join(lines))
    inputs = {"algo": args.algo, "bits": bits_list, "trials": args.trials, "n": n}
    # more bits should never hurt beyond sampling noise; flag, don't fail
    ordered = sorted(rows, key=lambda r: r["bits"])
    noise = 1.0 / max(args.trials, 1)
    monotone = all(
        b["rate"] >= a["rate"] - noise for a, b in zip(ordered, ordered[1:])
    )
    outputs = {"sweep": rows, "monotone_plausible": monotone}
    return _report("sweep-precision", args.seed, inputs, outputs, t0=t0)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(p, budgeted=True):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json-out", help="write the JSON report here instead of stdout")
    if budgeted:
        p.add_argument("--emulate-bits", type=int, default=None)
        p.add_argument(
            "--const",
            dest="consts",
            action="append",
            metavar="NAME=VALUE",
            help="override a stability constant (repeatable)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermeig",
        description="Finite-precision Hermitian eigenproblem toolkit",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("generate", help="write a deterministic test problem")
    p.add_argument("--kind", choices=generate.KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--kappa", type=float, default=100.0)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--coupling", type=float, default=0.1)
    _add_common(p, budgeted=False)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("shatter", help="perturb to create an eigenvalue gap")
    p.add_argument("--input", help="Hermitian matrix file (default: zero matrix)")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--emit-gap-stats", help="CSV path for per-trial gap statistics")
    _add_common(p)
    p.set_defaults(func=cmd_shatter)

    p = sub.add_parser("evals", help="gap-independent Hermitian eigenvalues")
    p.add_argument("--input", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--relative", action="store_true")
    p.add_argument("--oracle", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_evals)

    p = sub.add_parser("chol", help="recursive Cholesky factorization")
    p.add_argument("--input", required=True)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--output")
    p.add_argument("--oracle", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_chol)

    p = sub.add_parser("fermi", help="Fermi level and gap")
    p.add_argument("--input", required=True)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--oracle", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_fermi)

    p = sub.add_parser("density", help="density matrix via the sign function")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--output")
    p.add_argument("--oracle", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("ks", help="end-to-end Kohn-Sham pipeline")
    p.add_argument("--input", required=True, help="KS problem container (JSON)")
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--output")
    _add_common(p)
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("bench", help="wall-clock timings of the primitives")
    p.add_argument("--op", choices=("mm", "inv", "chol", "evalsh"), default="mm")
    p.add_argument("--sizes", default="32,64")
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser(
        "sweep-precision", help="success rate across emulated bit widths"
    )
    p.add_argument("--algo", choices=("chol", "shatter", "sign"), default="chol")
    p.add_argument("--bits", default="12,16,24,32,53")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--kappa", type=float, default=1e4)
    p.add_argument("--gamma", type=float, default=0.01)
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--output", help="CSV path for the success-rate table")
    _add_common(p, budgeted=False)
    p.set_defaults(func=cmd_sweep_precision)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except (HermeigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    _emit(args, report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
