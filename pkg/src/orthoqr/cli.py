"""Command line interface.

    ortho gen <family> [params] --seed S --out F
    ortho run <experiment> [--scale k=v,...] [--seeds a,b,c] --out F.csv
    ortho factor --v V.mtxt --a A.mtxt --choice {mlu|qr|polar}
                 [--intra {house|cholshift}] [--b B.mtxt] --out-prefix P
    ortho time [--config k=v,...] --out F.csv

Exit codes: 0 ok, 2 intra-step failure, 1 usage or I/O error.
"""

import argparse
import sys

import numpy as np

from .errors import IntraFailure, OrthoError
from .experiments import COLUMNS, CsvWriter, run_experiment, timing_mode, _row
from .metrics import compute_metrics, failed_report
from .mtxt import read_mtxt, write_mtxt
from .oblique import InnerProduct, b_two_stage_qr, initial_b_basis
from .testgen import (
    fixture_badbcg,
    gen_cond_general,
    gen_family,
    gen_mlu_adversarial,
    gen_prescribed_kappa_t,
    gen_random_orthonormal,
    gen_spd,
)
from .twostage import two_stage_qr

_CHOICE_MAP = {"mlu": "mlu", "qr": "qr", "polar": "polar"}
_INTRA_MAP = {"house": "householder", "cholshift": "cholshift"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _parse_kv(text):
    out = {}
    if not text:
        return out
    for part in text.split(","):
        if not part:
            continue
        key, _, val = part.partition("=")
        try:
            out[key] = int(val)
        except ValueError:
            try:
                out[key] = float(val)
            except ValueError:
                out[key] = val
    return out


def _build_parser():
    parser = _Parser(prog="ortho",
                     description="Two-stage Householder orthogonalization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated matrix family as MTXT")
    g.add_argument("family", choices=[
        "badbcg", "mlu-adversarial", "prescribed-kappa-t", "sstep",
        "stewart-extreme", "spd", "cond-general", "random-orthonormal"])
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--k0", type=int, default=100)
    g.add_argument("--k", type=int, default=10)
    g.add_argument("--p", type=int, default=10)
    g.add_argument("--alpha", type=float, default=0.1)
    g.add_argument("--kappa", type=float, default=1e5)
    g.add_argument("--field", choices=["real", "complex"], default="real")
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="run a stability experiment, emit CSV")
    r.add_argument("experiment", choices=[
        "table1", "table2", "table3", "table4", "fig1", "sweep_unconditional"])
    r.add_argument("--scale", default="", help="comma list k=v overriding defaults")
    r.add_argument("--seeds", default="", help="comma list of integer seeds")
    r.add_argument("--out", required=True)

    f = sub.add_parser("factor", help="two-stage factorization of files")
    f.add_argument("--v", required=True)
    f.add_argument("--a", required=True)
    f.add_argument("--choice", choices=sorted(_CHOICE_MAP), default="qr")
    f.add_argument("--intra", choices=sorted(_INTRA_MAP), default="house")
    f.add_argument("--b", default=None)
    f.add_argument("--out-prefix", required=True)

    t = sub.add_parser("time", help="wall-clock comparison against naive QR")
    t.add_argument("--config", default="", help="comma list k=v (n,k0,k,reps,...)")
    t.add_argument("--out", required=True)
    return parser


def _cmd_gen(args):
    out = args.out
    if args.family == "badbcg":
        v, a = fixture_badbcg()
        write_mtxt(_pref(out, "v"), v)
        write_mtxt(_pref(out, "a"), a)
        return 0
    if args.family == "mlu-adversarial":
        pair = gen_mlu_adversarial(args.k0, args.alpha, args.n, args.seed)
        write_mtxt(_pref(out, "v"), pair.v)
        write_mtxt(_pref(out, "u"), pair.target_u)
        return 0
    if args.family == "prescribed-kappa-t":
        v, p = gen_prescribed_kappa_t(args.n, args.k0, args.kappa, args.seed)
        write_mtxt(_pref(out, "v"), v)
        write_mtxt(_pref(out, "p"), p)
        return 0
    if args.family in ("sstep", "stewart-extreme"):
        name = args.family.replace("-", "_")
        a = gen_family(name, args.n, args.p, args.k, args.seed)
        write_mtxt(out, a)
        return 0
    if args.family == "spd":
        write_mtxt(out, gen_spd(args.n, args.kappa, args.seed))
        return 0
    if args.family == "cond-general":
        write_mtxt(out, gen_cond_general(args.n, args.k, args.kappa, args.seed,
                                         args.field))
        return 0
    if args.family == "random-orthonormal":
        write_mtxt(out, gen_random_orthonormal(args.n, args.k, args.seed,
                                               args.field))
        return 0
    raise OrthoError(f"unhandled family {args.family}")


def _pref(out, tag):
    stem = out[:-5] if out.endswith(".mtxt") else out
    return f"{stem}.{tag}.mtxt"


def _cmd_run(args):
    seeds = [int(s) for s in args.seeds.split(",") if s] or None
    run_experiment(args.experiment, scale=_parse_kv(args.scale), seeds=seeds,
                   out=args.out)
    return 0


def _cmd_factor(args):
    v = read_mtxt(args.v)
    a = read_mtxt(args.a)
    choice = _CHOICE_MAP[args.choice]
    intra = _INTRA_MAP[args.intra]
    n, k0 = v.shape
    k = a.shape[1]
    inner = None
    status = 0
    try:
        if args.b:
            inner = InnerProduct.weighted(read_mtxt(args.b))
            u = initial_b_basis(inner, k0 + k)
            res = b_two_stage_qr(v, a, u, inner, choice=choice)
        else:
            res = two_stage_qr(v, a, choice=choice, intra=intra)
        rep = compute_metrics(v, a, res, inner=inner, scheme="twostage")
        write_mtxt(f"{args.out_prefix}.q.mtxt", res.q)
        write_mtxt(f"{args.out_prefix}.r.mtxt", res.r)
        write_mtxt(f"{args.out_prefix}.s.mtxt", res.s)
    except IntraFailure:
        rep = failed_report(scheme="twostage")
        status = 2
    writer = CsvWriter(f"{args.out_prefix}.report.csv", COLUMNS)
    writer.write(_row("twostage", choice, intra, n, k0, k, 1, 0,
                      float("nan"), rep, float("nan")))
    writer.close()
    return status


def _cmd_time(args):
    timing_mode(_parse_kv(args.config), out=args.out)
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "factor":
            return _cmd_factor(args)
        if args.command == "time":
            return _cmd_time(args)
    except OrthoError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
