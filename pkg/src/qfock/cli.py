"""Command-line interface: JSON in, JSON out, deterministic for fixed seed.

Every invocation writes a single result document to stdout with the echoed
inputs, the outputs, a status, and the elapsed time; floats carry 17
significant digits so golden files are byte-stable (the elapsed_ms field is
the one run-dependent value).  Exit codes: 0 ok, 1 usage error, 2
computation error (including failed verification suites).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import combinat, fock, jsonio, polywick, qsde, verify, wickalg

DEFAULT_SEED = 12345


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QFOCK_SEED")
    if env is not None:
        return int(env)
    return DEFAULT_SEED


def _read_input(args) -> dict | None:
    if getattr(args, "input", None):
        with open(args.input, "r", encoding="utf-8") as fh:
            return json.load(fh)
    return None


def _q_grid(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _word_vectors(word: str, gram: str):
    letters = sorted(set(word))
    if gram != "identity":
        raise ValueError("only --gram identity is built in; pass vectors via --input")
    d = len(letters)
    basis = {c: np.eye(d)[i] for i, c in enumerate(letters)}
    return [basis[c] for c in word]


# -- subcommand implementations ------------------------------------------------


def _cmd_pairings(args, _seed):
    ctx = combinat.IndexSet.range(args.n)
    out = []
    for p in combinat.enumerate_pairings(ctx, args.k):
        cr, sp, crb = combinat.contraction_stats(p)
        out.append({"pairs": [list(pair) for pair in p.pairs],
                    "cr": cr, "sp": sp, "crb": crb})
    return {"count": len(out), "pairings": out}


def _cmd_cosets(args, _seed):
    reps = combinat.coset_reps(args.n, args.k)
    return {"count": len(reps),
            "reps": [{"perm": list(r.permutation), "inversions": r.inversions}
                     for r in reps]}


def _cmd_moment(args, _seed):
    doc = _read_input(args)
    if doc is not None:
        vectors = [np.asarray(v, dtype=float) for v in doc["vectors"]]
    else:
        if not args.word:
            raise ValueError("need --word or --input")
        vectors = _word_vectors(args.word, args.gram)
    return {"value": wickalg.moment(vectors, args.q)}


def _cmd_wick_expand(args, _seed):
    doc = _read_input(args)
    if doc is None:
        raise ValueError("--input with {'vectors': [...]} required")
    vectors = [np.asarray(v, dtype=float) for v in doc["vectors"]]
    return {"element": wickalg.expand_field_product(vectors, args.q).to_json()}


def _cmd_multiply(args, _seed):
    doc = _read_input(args)
    if doc is None:
        raise ValueError("--input with {'a': ..., 'b': ...} required")
    A = wickalg.WickElement.from_json(doc["a"])
    B = wickalg.WickElement.from_json(doc["b"])
    return {"element": wickalg.multiply(A, B, args.q).to_json()}


def _cmd_norm(args, seed):
    doc = _read_input(args)
    if doc is None:
        raise ValueError("--input with {'element': ...} required")
    A = wickalg.WickElement.from_json(doc["element"])
    out = {"triple_norm": wickalg.triple_norm(A, args.q)}
    if args.cutoff is not None:
        op = wickalg.to_operator(A, args.q, args.cutoff)
        sectors = sorted(op.exact_sectors)
        out["operator_norm_estimate"] = fock.operator_norm(op, sectors, seed=seed)
        out["sectors"] = sectors
    return out


def _cmd_delta_r(args, _seed):
    doc = _read_input(args)
    if doc is None:
        raise ValueError("--input document required")
    pattern = polywick.InsertionPattern.from_json(doc["pattern"])
    F = fock.FockTensor.from_json(doc["f"])
    pi = combinat.Pairing(tuple(tuple(p) for p in doc.get("pi", [])),
                          pattern.leg_context())
    As = [wickalg.WickElement.from_json(a) for a in doc["operators"]]
    return {"element": polywick.delta_R(pattern, pi, F, As, args.q).to_json()}


def _cmd_counterterm(args, _seed):
    doc = _read_input(args)
    if doc is not None:
        configs = [(c["n_legs"], tuple(c["inserts"]),
                    tuple(tuple(p) for p in c["pairs"])) for c in doc["configs"]]
    elif args.family == "quartic2d":
        configs = polywick.quartic_2d_configs()
    elif args.family == "quartic3d":
        configs = polywick.quartic_3d_configs()
    else:
        raise ValueError("need --family quartic2d|quartic3d or --input configs")
    poly = polywick.counterterm_polynomial(configs)
    return {"config_count": len(configs), "polynomial": poly.to_json(),
            "eval_at_one": poly.evaluate(1.0, 1.0)}


def _grid_from_args(args) -> qsde.TimeGrid:
    return qsde.TimeGrid(args.horizon, args.cells)


def _cmd_levy(args, _seed):
    grid = _grid_from_args(args)
    doc = _read_input(args)
    a = (wickalg.WickElement.from_json(doc["a"]) if doc
         else wickalg.WickElement.one(grid.cells))
    el = qsde.levy_area(a, args.s, args.t, args.side, grid, args.q, args.diag_weight)
    return {"element": el.to_json()}


def _cmd_chen(args, _seed):
    grid = _grid_from_args(args)
    doc = _read_input(args)
    a = (wickalg.WickElement.from_json(doc["a"]) if doc
         else wickalg.WickElement.one(grid.cells))
    r = qsde.chen_residual(args.s, args.u, args.t, a, args.side, grid,
                           args.q, args.diag_weight)
    return {"max_abs_coeff": r.max_abs_coeff()}


def _cmd_bphz(args, _seed):
    rho = {"quartic": qsde.quartic_bump, "triangle": qsde.triangle_bump}[args.mollifier]
    val = qsde.bphz_constant(rho, args.epsilon)
    return {"value": val, "deviation_from_half": abs(val - 0.5)}


def _cmd_ito(args, _seed):
    grid = _grid_from_args(args)
    return qsde.ito_residual(args.p, args.t, grid, args.q)


def _cmd_verify(args, seed):
    kwargs = {"seed": seed}
    if args.q_grid:
        kwargs["q_grid"] = tuple(_q_grid(args.q_grid))
    if args.d:
        kwargs["d"] = args.d
    if args.chaos:
        kwargs["chaos"] = args.chaos
    return verify.run_suites([args.suite], **kwargs)


# -- wiring ---------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="qfock",
                     description="q-deformed Gaussian operator calculus")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--q", type=float, default=0.0)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--input", type=str, default=None)
        p.add_argument("--output", type=str, default=None)
        return p

    p = add("pairings", _cmd_pairings, "enumerate pairings with statistics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None)

    p = add("cosets", _cmd_cosets, "minimum-inversion coset representatives")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = add("moment", _cmd_moment, "vacuum moment of a field-operator word")
    p.add_argument("--word", type=str, default=None)
    p.add_argument("--gram", type=str, default="identity")

    add("wick-expand", _cmd_wick_expand, "Wick expansion of a field product")
    add("multiply", _cmd_multiply, "product of two Wick expansions")

    p = add("norm", _cmd_norm, "graded norm (and operator-norm estimate)")
    p.add_argument("--cutoff", type=int, default=None)

    add("delta-r", _cmd_delta_r, "renormalised insertion product")

    p = add("counterterm", _cmd_counterterm, "counterterm polynomial of configs")
    p.add_argument("--family", type=str, default=None,
                   choices=["quartic2d", "quartic3d"])

    for name, fn, help_text in (("levy", _cmd_levy, "Levy area with insertion"),
                                ("chen", _cmd_chen, "Chen additivity defect")):
        p = add(name, fn, help_text)
        p.add_argument("--s", type=float, required=True)
        if name == "chen":
            p.add_argument("--u", type=float, required=True)
        p.add_argument("--t", type=float, required=True)
        p.add_argument("--side", type=str, default=qsde.LEFT,
                       choices=[qsde.LEFT, qsde.RIGHT])
        p.add_argument("--cells", "--grid", dest="cells", type=int, default=16)
        p.add_argument("--horizon", type=float, default=1.0)
        p.add_argument("--diag-weight", type=float, default=0.0)

    p = add("bphz-constant", _cmd_bphz, "renormalisation constant by quadrature")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--mollifier", type=str, default="quartic",
                   choices=["quartic", "triangle"])

    p = add("ito", _cmd_ito, "discrete Ito residual report")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--cells", "--grid", dest="cells", type=int, default=64)
    p.add_argument("--horizon", type=float, default=1.0)

    p = add("verify", _cmd_verify, "run verification suites")
    p.add_argument("--suite", type=str, default="all")
    p.add_argument("--q-grid", type=str, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--chaos", type=int, default=None)
    return parser


def _echo_inputs(args) -> dict:
    skip = {"fn", "command", "output"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        out[key] = value
    return out


def _preprocess(argv):
    # argparse reads "-0.9,0,0.9" as a flag; fold list values into = form
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--q-grid" and i + 1 < len(argv):
            out.append(f"--q-grid={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv) -> int:
    parser = _build_parser()
    args = parser.parse_args(_preprocess(list(argv)))
    seed = _resolve_seed(args)
    start = time.monotonic()
    status = "ok"
    try:
        outputs = args.fn(args, seed)
        exit_code = 0
        if args.command == "verify" and not outputs.get("passed", False):
            status = "error"
            outputs = {"code": "verification-failed", **outputs}
            exit_code = 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        status = "error"
        outputs = {"code": type(exc).__name__, "message": str(exc)}
        exit_code = 2
    elapsed_ms = int(round(1000.0 * (time.monotonic() - start)))
    result = {
        "command": args.command,
        "inputs": _echo_inputs(args),
        "outputs": outputs,
        "status": status,
        "elapsed_ms": elapsed_ms,
    }
    text = jsonio.dumps(result) + "\n"
    sys.stdout.write(text)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return exit_code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
