"""Command line front end: ``htva <command> --problem <file> [options]``.

Every command prints a JSON report.  Exact rationals are strings "p/q" and
half-integer gradings are doubled integers flagged with ``"doubled": true``.
Exit codes: 0 success, 1 verification mismatch, 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from . import brst, conformal, hypertoric as ht, zhu_weyl
from .vertex_engine import (ParseError, fock_action, format_state, ope, parse_element, vacuum)

COMMANDS = ("analyze", "charts", "ope", "brst-check", "cohomology", "virasoro", "zhu-compare", "wakimoto")


class InputError(ValueError):
    """Problem file or argument error; exit code 2."""


class MismatchError(RuntimeError):
    """A verification failed; exit code 1."""

    def __init__(self, results: dict):
        super().__init__("verification mismatch")
        self.results = results


def parse_rational(text, where: str) -> Fraction:
    if isinstance(text, bool):
        raise InputError(f"{where}: expected a rational, got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InputError(f"{where}: expected a rational string \"p/q\", got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{where}: malformed rational {text!r}") from None


def load_problem(data: dict) -> tuple:
    """(HypertoricInput, options) from a decoded problem file."""
    if not isinstance(data, dict):
        raise InputError("problem file: top level must be an object")
    unknown = set(data) - {"delta", "stability", "options"}
    if unknown:
        raise InputError(f"problem file: unknown field(s) {sorted(unknown)}")
    if "delta" not in data:
        raise InputError("problem file: missing field 'delta'")
    delta = data["delta"]
    if not isinstance(delta, list) or not delta or not all(isinstance(r, list) for r in delta):
        raise InputError("field 'delta': expected a nonempty list of integer rows")
    for i, row in enumerate(delta):
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, int):
                raise InputError(f"field 'delta'[{i}][{j}]: expected an integer, got {v!r}")
    if "stability" not in data:
        raise InputError("field 'stability': required")
    stab = data["stability"]
    if not isinstance(stab, list):
        raise InputError("field 'stability': expected a list of rationals")
    stab = [parse_rational(v, f"field 'stability'[{i}]") for i, v in enumerate(stab)]
    options = data.get("options", {})
    if not isinstance(options, dict):
        raise InputError("field 'options': expected an object")
    allowed = {"max_weight", "hbar_truncation_guard", "localization_chart", "lambda_shift"}
    bad = set(options) - allowed
    if bad:
        raise InputError(f"field 'options': unknown key(s) {sorted(bad)}")
    try:
        inp = ht.HypertoricInput.create(delta, stab)
    except ht.HypertoricError as exc:
        raise InputError(f"invalid input: {exc}") from None
    return inp, options


def parse_problem(path: str) -> ht.HypertoricInput:
    return _read_problem(path)[0]


def _read_problem(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read problem file: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"problem file: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return load_problem(data)


def to_json(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): to_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    return value


def input_hash(inp: ht.HypertoricInput) -> str:
    canon = json.dumps({"delta": [list(r) for r in inp.delta],
                        "stability": [str(Fraction(v)) for v in inp.stability]}, sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()


def _int_list(text: str, where: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{where}: expected comma separated integers, got {text!r}") from None


def _rat_list(text: str, where: str) -> List[Fraction]:
    return [parse_rational(t, where) for t in text.split(",") if t.strip()]


def _doubled(x) -> int:
    return int(2 * Fraction(x))


def _chart(inp, spec) -> ht.Chart:
    if spec is None:
        raise InputError("--chart is required for this command")
    J = _int_list(spec, "--chart") if isinstance(spec, str) else list(spec)
    try:
        ht.require_unimodular(inp)
        return ht.chart_by_label(inp, J)
    except ht.HypertoricError as exc:
        raise InputError(str(exc)) from None


def _require_unimodular(inp):
    try:
        ht.require_unimodular(inp)
    except ht.NonUnimodularError as exc:
        raise InputError(f"non-unimodular input: {exc}") from None


def cmd_analyze(inp, args, opts) -> dict:
    rep = ht.validate(inp)
    out: Dict[str, Any] = {"M": inp.M, "N": inp.N, "rank_ok": rep.rank_ok, "gcd_ok": rep.gcd_ok,
                           "unimodular": rep.unimodular, "gram": ht.gram_matrix(inp)}
    walls = ht.git_walls(inp)
    out["walls"] = len(walls)
    out["wall_columns"] = [list(w.columns) for w in walls]
    out["generic"] = ht.is_generic(inp)
    if not out["generic"]:
        out["offending_walls"] = [list(w.columns) for w in ht.walls_containing(inp, inp.stability)]
    out["lambda0"] = ht.lattice_lambda0(inp)
    out["beta"] = {str(k): ht.euler_beta(inp, k) for k in range(1, inp.N + 1)}
    if rep.unimodular and out["generic"]:
        out["charts"] = len(ht.enumerate_charts(inp))
        group = ht.weyl_group(inp)
        out["weyl_order"] = len(group)
    return out


def cmd_charts(inp, args, opts) -> dict:
    _require_unimodular(inp)
    try:
        charts = ht.enumerate_charts(inp)
    except ht.HypertoricError as exc:
        raise InputError(str(exc)) from None
    if args.chart:
        charts = [_chart(inp, args.chart)]
    ctx = brst.make_context(inp)
    out = []
    for ch in charts:
        cctx = brst.make_context(inp, ch)
        gens = brst.chart_generators(cctx, ch)
        out.append({"J": list(ch.J), "alpha": list(ch.alpha), "J1": list(ch.J1), "J2": list(ch.J2),
                    "inverted": [f"{n}{j}" for n, j in ch.inverted()],
                    "generators": {k: format_state(v) for k, v in sorted(gens.items())}})
    del ctx
    return {"charts": out}


def _context(inp, args, opts):
    chart_spec = args.chart or opts.get("localization_chart")
    if chart_spec is not None:
        if isinstance(chart_spec, list):
            chart_spec = ",".join(str(v) for v in chart_spec)
        ch = _chart(inp, chart_spec)
        return brst.make_context(inp, ch)
    return brst.make_context(inp)


def _parse(text: str, ctx) -> Any:
    loc = ctx.localized_letters(ctx.chart) if ctx.chart is not None else ()
    try:
        return parse_element(text, ctx.algebra, loc)
    except ParseError as exc:
        raise InputError(f"element {text!r}: {exc}") from None
    except ValueError as exc:
        raise InputError(f"element {text!r}: {exc}") from None


def cmd_ope(inp, args, opts) -> dict:
    if not args.element or len(args.element) != 2:
        raise InputError("ope needs exactly two --element arguments")
    ctx = _context(inp, args, opts)
    a, b = (_parse(t, ctx) for t in args.element)
    terms = ope(a, b)
    return {"a": format_state(a), "b": format_state(b),
            "ope": [{"pole": p, "coefficient": format_state(s)} for p, s in terms]}


def _max_weight(args, opts, default=2) -> Fraction:
    if args.max_weight is not None:
        return parse_rational(args.max_weight, "--max-weight")
    if "max_weight" in opts:
        return parse_rational(opts["max_weight"], "options.max_weight")
    return Fraction(default)


def cmd_brst_check(inp, args, opts) -> dict:
    _require_unimodular(inp)
    ctx = brst.make_context(inp)
    w2 = _doubled(_max_weight(args, opts))
    m2 = w2 + 2
    ok, count, fails = brst.check_d_squared(ctx, w2, m2)
    okc, countc, failsc = brst.check_d_squared(ctx, w2, m2, classical=True)
    okq, countq, failsq = brst.check_classical_consistency(ctx, w2, m2)
    negative = []
    for (pw, pm, g) in brst.piece_labels(ctx, w2, m2):
        if g < 0:
            res = brst.cohomology(ctx, Fraction(pw, 2), Fraction(pm, 2), g)
            if res.dim_H:
                negative.append({"w2": pw, "m2": pm, "ghost": g, "dim": res.dim_H, "doubled": True})
    out = {"max_weight2": w2, "max_s_weight2": m2, "doubled": True,
           "d_squared_zero": ok, "monomials_checked": count,
           "classical_d_squared_zero": okc, "classical_quantum_consistent": okq,
           "negative_ghost_vanishing": not negative, "negative_ghost_classes": negative,
           "failures": [str(f) for f in (fails + failsc + failsq)[:20]]}
    if not (ok and okc and okq and not negative):
        raise MismatchError(out)
    return out


def cmd_cohomology(inp, args, opts) -> dict:
    _require_unimodular(inp)
    ctx = brst.make_context(inp)
    w2 = _doubled(_max_weight(args, opts))
    m2 = w2 + 2
    table = []
    for (pw, pm, g) in brst.piece_labels(ctx, w2, m2):
        res = brst.cohomology(ctx, Fraction(pw, 2), Fraction(pm, 2), g)
        row = {"w2": pw, "m2": pm, "ghost": g, "doubled": True, "dim_kernel": res.dim_kernel,
               "dim_image_in": res.dim_image_in, "dim_H": res.dim_H}
        if args.show_basis:
            row["basis"] = [format_state(s) for s in res.basis_of_H]
        if g == 0 and not args.no_oracle:
            row["oracle_dim"] = brst.h0_oracle_prediction(ctx, pw, pm)
        table.append(row)
    return {"pieces": table}


def cmd_virasoro(inp, args, opts) -> dict:
    _require_unimodular(inp)
    ctx = brst.make_context(inp)
    lam = None
    if args.lambda_:
        lam = _rat_list(args.lambda_, "--lambda")
    elif "lambda_shift" in opts:
        lam = [parse_rational(v, "options.lambda_shift") for v in opts["lambda_shift"]]
    if lam is not None and len(lam) != inp.N:
        raise InputError(f"--lambda: expected {inp.N} entries")
    try:
        omega = conformal.build_omega(ctx, lam)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    rep = conformal.virasoro_check(ctx, omega)
    out = {"central_charge": rep.central_charge, "quartic": rep.quartic,
           "expected_quartic": rep.expected_quartic, "match": rep.match,
           "cubic_zero": rep.cubic_zero, "quadratic_matches": rep.quadratic_matches,
           "linear_matches": rep.linear_matches, "higher_poles_zero": rep.higher_poles_zero,
           "mismatches": rep.mismatches}
    if not rep.match:
        raise MismatchError(out)
    return out


def cmd_zhu_compare(inp, args, opts) -> dict:
    _require_unimodular(inp)
    ctx = brst.make_context(inp)
    w = _max_weight(args, opts)
    rep = zhu_weyl.compare_zhu_weyl(ctx, w)
    pois = zhu_weyl.c2_poisson_check(ctx, w)
    out = {"w_max2": _doubled(w), "doubled": True, "commutators": rep.commutators,
           "all_match": rep.all_match, "c2_dims": rep.c2_dims, "classical_dims": rep.classical_dims,
           "dims_match": rep.dims_match, "poisson_pairs": pois.pairs, "poisson_ok": pois.ok,
           "poisson_failures": pois.bracket_failures + pois.ideal_failures + pois.derivative_failures}
    if not (rep.all_match and pois.ok):
        raise MismatchError(out)
    return out


def cmd_wakimoto(inp, args, opts) -> dict:
    _require_unimodular(inp)
    ch = _chart(inp, args.chart or opts.get("localization_chart"))
    ctx = brst.make_context(inp)
    if not args.element or len(args.element) != 1:
        raise InputError("wakimoto needs exactly one --element (chart form: x_j=a*_j, y_j=a_j, c_i=b_i)")
    lam = _rat_list(args.lambda_, "--lambda") if args.lambda_ else [Fraction(0)] * inp.M
    if len(lam) != inp.M:
        raise InputError(f"--lambda: expected {inp.M} entries for the Heisenberg highest weight")
    a = _parse(args.element[0], ctx)
    v = _parse(args.vector, ctx) if args.vector else vacuum(ctx.algebra)
    try:
        res = fock_action(a, args.mode, lam, v, sites=ch.complement)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    text = format_state(res)
    return {"chart": list(ch.J), "lambda": lam, "mode": args.mode, "element": format_state(a),
            "vector": format_state(v) + " |lambda>", "result": text if text == "0" else text + " |lambda>"}


HANDLERS = {"analyze": cmd_analyze, "charts": cmd_charts, "ope": cmd_ope, "brst-check": cmd_brst_check,
            "cohomology": cmd_cohomology, "virasoro": cmd_virasoro, "zhu-compare": cmd_zhu_compare,
            "wakimoto": cmd_wakimoto}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="htva", description="Exact free-field, BRST and Zhu algebra computations from a hypertoric input.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--problem", required=True, help="JSON problem file with delta and stability")
    p.add_argument("--max-weight", dest="max_weight", help="weight bound W (rational)")
    p.add_argument("--chart", help="chart label J as comma separated column indices")
    p.add_argument("--lambda", dest="lambda_", help="comma separated rational vector")
    p.add_argument("--element", action="append", help="element expression (repeatable)")
    p.add_argument("--vector", help="module vector for wakimoto, as creation monomials")
    p.add_argument("--mode", type=int, default=-1, help="mode index n for wakimoto")
    p.add_argument("--show-basis", action="store_true", help="print cohomology representatives")
    p.add_argument("--no-oracle", action="store_true", help="skip the classical H^0 prediction")
    p.add_argument("--json-out", dest="json_out", help="also write the report to this path")
    return p


def dispatch(command: str, args: argparse.Namespace) -> tuple:
    """Run one command; returns (exit code, report dict)."""
    start = time.perf_counter()
    report: Dict[str, Any] = {"command": command, "version": __version__}
    code = 0
    try:
        inp, opts = _read_problem(args.problem)
        report["input_hash"] = input_hash(inp)
        report["results"] = HANDLERS[command](inp, args, opts)
    except InputError as exc:
        code = 2
        report["error"] = str(exc)
    except MismatchError as exc:
        code = 1
        report["results"] = exc.results
        report["error"] = "verification mismatch"
    report["timing_seconds"] = round(time.perf_counter() - start, 3)
    return code, to_json(report)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    threads = os.environ.get("HTVA_THREADS")
    if threads is not None and not threads.isdigit():
        print(json.dumps({"error": "HTVA_THREADS must be a positive integer"}))
        return 2
    code, report = dispatch(args.command, args)
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
