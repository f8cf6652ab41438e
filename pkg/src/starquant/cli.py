"""Batch command-line front end.

One job per process invocation, described either by flags or by a JSON job
file.  All input and output is exact; outputs are deterministic for a fixed
job (sorted keys, fixed seeds, exact arithmetic).

Exit codes: 0 success / all checks passed, 1 verification failure, 2 input
schema error, 3 mathematical precondition error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import PreconditionError, SchemaError
from .grading import (
    check_jacobi,
    check_lambda_relation,
    decompose,
    h0_dim,
    specialize_mu,
)
from .matrices import (
    SqMatrix,
    closed_form_vs_oracle,
    closed_star_exponential,
    expand_closed_form,
    riccati_1d,
    riccati_vs_moyal,
)
from .parsing import parse_poly, parse_scalar
from .poly import MultiPoly
from .scalars import GaussianRational, ParamScalar
from .star import OrderingK, StarContext, intertwine, star, star_k_ordered
from .verify import SUITES, run_suite

COMMANDS = ("star", "star-exp", "riccati", "ordering", "grade", "verify")

_JOB_KEYS = {"command", "context", "inputs", "truncation", "output_path"}
_CONTEXT_KEYS = {"n", "lambda", "coupling", "params"}

_INPUT_KEYS = {
    "star": {"f", "g", "mu"},
    "star-exp": {"lambda", "A"},
    "riccati": {"a", "b", "c"},
    "ordering": {"K", "f", "g"},
    "grade": {"f", "mu"},
    "verify": {"suite", "seed", "cases", "lambda", "n", "d_max", "k_max"},
}


def max_input_degree() -> int:
    raw = os.environ.get("STARQUANT_MAX_DEGREE", "16")
    try:
        return int(raw)
    except ValueError as exc:
        raise SchemaError(f"STARQUANT_MAX_DEGREE must be an integer, got {raw!r}") from exc


def _guard_degree(p: MultiPoly, label: str) -> MultiPoly:
    cap = max_input_degree()
    if p.degree() > cap:
        raise SchemaError(
            f"{label} has degree {p.degree()} above the cap {cap} "
            "(raise STARQUANT_MAX_DEGREE to override)"
        )
    return p


def _poly_input(value, n: int, label: str) -> MultiPoly:
    if isinstance(value, str):
        return _guard_degree(parse_poly(value, n), label)
    if isinstance(value, list):
        try:
            return _guard_degree(MultiPoly.from_json(n, value), label)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed polynomial JSON for {label}: {exc}") from exc
    raise SchemaError(f"{label} must be an expression string or a JSON term list")


def _scalar_input(value, label: str) -> ParamScalar:
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, (int, float)):
        if isinstance(value, float) and not value.is_integer():
            raise SchemaError(f"{label} must be exact; write it as a string fraction")
        return ParamScalar.from_rat(int(value))
    if isinstance(value, list):
        try:
            return ParamScalar.from_json(value)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed scalar JSON for {label}: {exc}") from exc
    raise SchemaError(f"{label} must be a string or a JSON scalar list")


def _gauss_input(value, label: str) -> GaussianRational:
    if isinstance(value, (int,)):
        value = str(value)
    if not isinstance(value, str):
        raise SchemaError(f"{label} must be a scalar string")
    try:
        return GaussianRational.parse(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad scalar for {label}: {exc}") from exc


def _matrix_input(value, label: str) -> SqMatrix:
    if not isinstance(value, list) or not value:
        raise SchemaError(f"{label} must be a non-empty matrix (list of rows)")
    rows = []
    for row in value:
        if not isinstance(row, list):
            raise SchemaError(f"{label} rows must be lists")
        rows.append(tuple(_gauss_input(v, label) for v in row))
    try:
        return SqMatrix(tuple(rows))
    except ValueError as exc:
        raise SchemaError(f"{label}: {exc}") from exc


def _context_input(data) -> StarContext:
    if not isinstance(data, dict):
        raise SchemaError("context must be an object")
    unknown = set(data) - _CONTEXT_KEYS
    if unknown:
        raise SchemaError(f"unknown context fields: {sorted(unknown)}")
    for key in ("n", "lambda", "coupling"):
        if key not in data:
            raise SchemaError(f"context is missing {key!r}")
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        raise SchemaError("context n must be a positive integer")
    lam_data = data["lambda"]
    if not isinstance(lam_data, list) or len(lam_data) != n:
        raise SchemaError("context lambda must be an n x n matrix")
    rows = []
    for row in lam_data:
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError("context lambda must be an n x n matrix")
        rows.append(tuple(_poly_input(v, n, "lambda entry") for v in row))
    coupling = _scalar_input(data["coupling"], "coupling")
    params = data.get("params")
    if params is not None:
        from .scalars import PARAM_NAMES

        if not set(params) <= set(PARAM_NAMES):
            raise SchemaError(f"unknown parameters {sorted(set(params) - set(PARAM_NAMES))}")
    return StarContext(n, tuple(rows), coupling)


def _poly_payload(p: MultiPoly) -> dict:
    return {"text": p.text(), "terms": p.to_json()}


def _scalar_payload(s: ParamScalar) -> dict:
    return {"text": s.text(), "terms": s.to_json()}


def _series_payload(series) -> list:
    return [_scalar_payload(c.constant_coefficient()) for c in series.coeffs]


def _graded_payload(f: MultiPoly) -> dict:
    return decompose(f).to_json()


# --- command handlers --------------------------------------------------------


def _run_star(job: dict) -> tuple:
    ctx = _context_input(job.get("context"))
    inputs = job["inputs"]
    f = _poly_input(inputs["f"], ctx.n, "f")
    g = _poly_input(inputs["g"], ctx.n, "g")
    result = star(ctx, f, g)
    payload = {
        "star": _poly_payload(result),
        "graded": _graded_payload(result),
    }
    if "mu" in inputs:
        value = _gauss_input(inputs["mu"], "mu")
        payload["specialized"] = _poly_payload(specialize_mu(result, value))
    return payload, 0


def _run_star_exp(job: dict) -> tuple:
    inputs = job["inputs"]
    n_order = job["truncation"]
    lam = _matrix_input(inputs["lambda"], "lambda")
    a_mat = _matrix_input(inputs["A"], "A")
    amplitude, phase = closed_star_exponential(lam, a_mat, n_order)
    expansion = expand_closed_form(lam, a_mat, n_order)
    report = closed_form_vs_oracle(lam, a_mat, n_order)
    table = []
    for k in range(n_order + 1):
        comps = decompose(expansion.coeffs[k]).components
        table.append(
            [{"degree": d, "mu": w} for (d, w) in sorted(comps)]
        )
    payload = {
        "amplitude": _series_payload(amplitude),
        "phase_matrix": [m.to_json() for m in phase.coeffs],
        "oracle_check": report.to_json(),
        "order_table": table,
    }
    return payload, 0 if report.passed else 1


def _run_riccati(job: dict) -> tuple:
    inputs = job["inputs"]
    n_order = job["truncation"]
    a = _gauss_input(inputs.get("a", "0"), "a")
    b = _gauss_input(inputs.get("b", "0"), "b")
    c = _gauss_input(inputs.get("c", "0"), "c")
    g, h = riccati_1d(a, b, c, n_order)
    report = riccati_vs_moyal(a, b, c, n_order)
    d = c * c - a * b
    payload = {
        "discriminant": d.text(),
        "g": _series_payload(g),
        "h": _series_payload(h),
        "oracle_check": report.to_json(),
    }
    return payload, 0 if report.passed else 1


def _run_ordering(job: dict) -> tuple:
    inputs = job["inputs"]
    kmat_sq = _matrix_input(inputs["K"], "K")
    kmat = OrderingK(kmat_sq.rows)
    n = kmat.n
    if n % 2:
        raise SchemaError("ordering matrices act on an even number of variables")
    f = _poly_input(inputs["f"], n, "f")
    payload = {"intertwined_f": _poly_payload(intertwine(kmat, f))}
    if "g" in inputs:
        g = _poly_input(inputs["g"], n, "g")
        ctx = (
            _context_input(job["context"])
            if job.get("context") is not None
            else StarContext.weyl(n // 2)
        )
        payload["k_ordered_product"] = _poly_payload(
            star_k_ordered(ctx, kmat, f, g)
        )
    return payload, 0


def _run_grade(job: dict) -> tuple:
    inputs = job["inputs"]
    if job.get("context") is None:
        raise SchemaError("grade requires a context carrying n")
    n = _context_input(job["context"]).n
    f = _poly_input(inputs["f"], n, "f")
    if "mu" in inputs:
        f = specialize_mu(f, _gauss_input(inputs["mu"], "mu"))
    graded = decompose(f)
    payload = {
        "graded": graded.to_json(),
        "projective_dimension": n - 1,
        "h0_dims": {
            str(d): h0_dim(n - 1, d) for d in graded.degrees()
        },
    }
    return payload, 0


def _run_verify(job: dict) -> tuple:
    inputs = job["inputs"]
    suite = inputs.get("suite")
    if suite not in SUITES:
        raise SchemaError(f"suite must be one of {sorted(SUITES)}")
    seed = inputs.get("seed", 42)
    cases = inputs.get("cases")
    if not isinstance(seed, int):
        raise SchemaError("seed must be an integer")
    if cases is not None and (not isinstance(cases, int) or cases < 1):
        raise SchemaError("cases must be a positive integer")
    if "lambda" in inputs:
        if suite not in ("jacobi", "lambda-relation"):
            raise SchemaError("an explicit lambda is only used by the validator suites")
        n = inputs.get("n")
        lam_data = inputs["lambda"]
        if n is None:
            n = len(lam_data)
        rows = tuple(
            tuple(_poly_input(v, n, "lambda entry") for v in row)
            for row in lam_data
        )
        from .scalars import HALF_MU

        ctx = StarContext(n, rows, HALF_MU)
        if suite == "jacobi":
            report = check_jacobi(ctx, inputs.get("d_max", 4))
        else:
            report = check_lambda_relation(
                ctx, inputs.get("k_max", 4), inputs.get("d_max", 4)
            )
        return {"report": report.to_json()}, 0 if report.passed else 1
    results = run_suite(suite, seed=seed, cases=cases)
    failed = [r for r in results if not r["pass"]]
    payload = {
        "suite": suite,
        "seed": seed,
        "cases": results,
        "total": len(results),
        "failed": len(failed),
    }
    return payload, 0 if not failed else 1


_HANDLERS = {
    "star": _run_star,
    "star-exp": _run_star_exp,
    "riccati": _run_riccati,
    "ordering": _run_ordering,
    "grade": _run_grade,
    "verify": _run_verify,
}


def validate_job(job: dict) -> dict:
    if not isinstance(job, dict):
        raise SchemaError("job must be a JSON object")
    unknown = set(job) - _JOB_KEYS
    if unknown:
        raise SchemaError(f"unknown job fields: {sorted(unknown)}")
    command = job.get("command")
    if command not in COMMANDS:
        raise SchemaError(f"command must be one of {COMMANDS}")
    truncation = job.get("truncation", 8)
    if not isinstance(truncation, int) or truncation < 1:
        raise SchemaError("truncation must be an integer >= 1")
    inputs = job.get("inputs", {})
    if not isinstance(inputs, dict):
        raise SchemaError("inputs must be an object")
    unknown = set(inputs) - _INPUT_KEYS[command]
    if unknown:
        raise SchemaError(f"unknown inputs for {command}: {sorted(unknown)}")
    out = job.get("output_path")
    if out is not None and not isinstance(out, str):
        raise SchemaError("output_path must be a string")
    return {
        "command": command,
        "context": job.get("context"),
        "inputs": inputs,
        "truncation": truncation,
        "output_path": out,
    }


def run_job(job: dict) -> tuple:
    job = validate_job(job)
    payload, code = _HANDLERS[job["command"]](job)
    envelope = {"command": job["command"], "result": payload}
    return envelope, code, job["output_path"]


def _build_argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="starquant",
        description="Exact star products, star exponentials and their verifications.",
    )
    ap.add_argument("--job", help="path to a JSON job file")
    ap.add_argument("--command", choices=COMMANDS, help="command to run")
    ap.add_argument("--n", type=int, help="variable count for the context")
    ap.add_argument(
        "--lambda",
        dest="lam",
        help="JSON matrix; polynomial entries for contexts, scalars for star-exp",
    )
    ap.add_argument("--coupling", help="coupling scalar, e.g. 'mu/2' or 'i*hbar/2'")
    ap.add_argument("--f", help="first polynomial")
    ap.add_argument("--g", help="second polynomial")
    ap.add_argument("--A", help="JSON matrix of scalars (quadratic form)")
    ap.add_argument("--K", help="JSON matrix of scalars (ordering matrix)")
    ap.add_argument("--a", help="riccati coefficient a")
    ap.add_argument("--b", help="riccati coefficient b")
    ap.add_argument("--c", help="riccati coefficient c")
    ap.add_argument("--N", type=int, default=8, help="truncation order (default 8)")
    ap.add_argument("--seed", type=int, default=42, help="seed for randomized suites")
    ap.add_argument("--cases", type=int, help="case count for randomized suites")
    ap.add_argument("--suite", help="verification suite name")
    ap.add_argument("--mu", help="specialize mu to this scalar in the output")
    ap.add_argument("--out", help="also write the JSON result to this path")
    return ap


def _json_flag(raw: str, label: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"--{label} must be valid JSON: {exc}") from exc


def job_from_args(args: argparse.Namespace) -> dict:
    command = args.command
    job: dict = {"command": command, "truncation": args.N, "inputs": {}}
    if args.out:
        job["output_path"] = args.out
    inputs = job["inputs"]
    if command == "star":
        if args.n is None or args.lam is None or args.coupling is None:
            raise SchemaError("star requires --n, --lambda and --coupling")
        job["context"] = {
            "n": args.n,
            "lambda": _json_flag(args.lam, "lambda"),
            "coupling": args.coupling,
        }
        if args.f is None or args.g is None:
            raise SchemaError("star requires --f and --g")
        inputs["f"] = args.f
        inputs["g"] = args.g
        if args.mu is not None:
            inputs["mu"] = args.mu
    elif command == "star-exp":
        if args.lam is None or args.A is None:
            raise SchemaError("star-exp requires --lambda and --A")
        inputs["lambda"] = _json_flag(args.lam, "lambda")
        inputs["A"] = _json_flag(args.A, "A")
    elif command == "riccati":
        for name, value in (("a", args.a), ("b", args.b), ("c", args.c)):
            if value is not None:
                inputs[name] = value
    elif command == "ordering":
        if args.K is None or args.f is None:
            raise SchemaError("ordering requires --K and --f")
        inputs["K"] = _json_flag(args.K, "K")
        inputs["f"] = args.f
        if args.g is not None:
            inputs["g"] = args.g
    elif command == "grade":
        if args.n is None or args.f is None:
            raise SchemaError("grade requires --n and --f")
        zero = "0"
        job["context"] = {
            "n": args.n,
            "lambda": [[zero] * args.n for _ in range(args.n)],
            "coupling": "mu/2",
        }
        inputs["f"] = args.f
        if args.mu is not None:
            inputs["mu"] = args.mu
    elif command == "verify":
        if args.suite is None:
            raise SchemaError("verify requires --suite")
        inputs["suite"] = args.suite
        inputs["seed"] = args.seed
        if args.cases is not None:
            inputs["cases"] = args.cases
        if args.lam is not None:
            inputs["lambda"] = _json_flag(args.lam, "lambda")
            if args.n is not None:
                inputs["n"] = args.n
    return job


def main(argv=None) -> int:
    ap = _build_argparser()
    args = ap.parse_args(argv)
    try:
        if bool(args.job) == bool(args.command):
            raise SchemaError("pass exactly one of --job or --command")
        if args.job:
            try:
                with open(args.job, "r", encoding="utf-8") as fh:
                    job = json.load(fh)
            except OSError as exc:
                raise SchemaError(f"cannot read job file: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise SchemaError(f"job file is not valid JSON: {exc}") from exc
            if args.out and isinstance(job, dict) and "output_path" not in job:
                job["output_path"] = args.out
        else:
            job = job_from_args(args)
        envelope, code, out_path = run_job(job)
    except SchemaError as exc:
        print(json.dumps({"error": str(exc), "kind": "schema"}), file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(json.dumps({"error": str(exc), "kind": "precondition"}), file=sys.stderr)
        return 3
    except ZeroDivisionError as exc:
        print(
            json.dumps({"error": f"division by zero: {exc}", "kind": "precondition"}),
            file=sys.stderr,
        )
        return 3
    text = json.dumps(envelope, indent=2, sort_keys=True)
    print(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
