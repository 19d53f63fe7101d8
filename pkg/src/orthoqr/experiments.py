"""Experiment drivers reproducing the stability study at desk scale.

Every experiment emits one CSV row per (scheme, choice, seed, instance)
with the fixed column order below; rows are flushed as they are produced
so partial results survive an error.
"""

import time

import numpy as np

from .baselines import bcgs2_block, bcgs_two_stage
from .core import EPS, cond2, householder_qr, spectral_norm
from .errors import BreakdownError, IntraFailure, IoError, NotPositiveDefinite, ParameterError
from .metrics import compute_metrics, failed_report
from .oblique import InnerProduct, b_block_householder_qr
from .rand import make_rng, normal_matrix
from .testgen import (
    fixture_badbcg,
    gen_family,
    gen_mlu_adversarial,
    gen_prescribed_kappa_t,
    gen_random_orthonormal,
    gen_spd,
)
from .twostage import block_householder_qr, two_stage_qr

COLUMNS = ["scheme", "choice", "intra", "n", "k0", "k", "p", "seed",
           "kappa_input", "kappa_t", "loss_orth", "cross_orth",
           "rel_residual", "status", "wall_ms"]

CHOICES = ("mlu", "qr", "polar")

TABLE1_SEQUENCES = [
    ["inter", "intra"],
    ["inter", "inter", "intra"],
    ["inter", "intra", "inter", "intra"],
    ["inter", "inter", "inter", "intra"],
    ["inter", "intra", "inter", "intra", "inter", "intra"],
]


def _fmt(x):
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


class CsvWriter:
    """Row-at-a-time CSV writer; every row is flushed immediately."""

    def __init__(self, path, columns):
        self.columns = columns
        try:
            self.fh = open(path, "w") if path else None
            if self.fh:
                self.fh.write(",".join(columns) + "\n")
                self.fh.flush()
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from None

    def write(self, row):
        if self.fh:
            try:
                self.fh.write(",".join(_fmt(row[c]) for c in self.columns) + "\n")
                self.fh.flush()
            except OSError as exc:
                raise IoError(f"write failed: {exc}") from None

    def close(self):
        if self.fh:
            self.fh.close()


def _row(scheme, choice, intra, n, k0, k, p, seed, kappa_input, report, wall_ms):
    return {
        "scheme": scheme, "choice": choice, "intra": intra,
        "n": n, "k0": k0, "k": k, "p": p, "seed": seed,
        "kappa_input": kappa_input,
        "kappa_t": report.kappa_t,
        "loss_orth": report.loss_orth,
        "cross_orth": report.cross_orth,
        "rel_residual": report.rel_residual,
        "status": report.status,
        "wall_ms": wall_ms,
    }


def _run_table1(scale, seeds, emit):
    """The 4x2 fixture: five inter/intra sequences, then the two-stage
    method with all three seed choices."""
    v, a = fixture_badbcg()
    kin = cond2(np.hstack([v, a]))
    for seq in TABLE1_SEQUENCES:
        tag = "bcgs:" + "+".join(seq)
        t0 = time.perf_counter()
        res = bcgs_two_stage(v, a, list(seq))
        ms = 1e3 * (time.perf_counter() - t0)
        rep = compute_metrics(v, a, res, augmented=True, scheme=tag)
        emit(_row(tag, "", "householder", 4, 2, 2, 1, 0, kin, rep, ms))
    for choice in CHOICES:
        t0 = time.perf_counter()
        res = two_stage_qr(v, a, choice)
        ms = 1e3 * (time.perf_counter() - t0)
        rep = compute_metrics(v, a, res, augmented=True, scheme="twostage")
        emit(_row("twostage", choice, "householder", 4, 2, 2, 1, 0, kin, rep, ms))


def _split_blocks(a, k):
    return [a[:, i:i + k] for i in range(0, a.shape[1], k)]


def _run_table2(scale, seeds, emit):
    """Multi-block driver vs BCGS2 on the two ill-conditioned families."""
    n = scale.get("n", 1000)
    p = scale.get("p", 10)
    k = scale.get("k", 5)
    for family in ("sstep", "stewart_extreme"):
        for seed in seeds:
            a = gen_family(family, n, p, k, seed)
            blocks = _split_blocks(a, k)
            kin = cond2(a)
            for choice in CHOICES:
                t0 = time.perf_counter()
                res = block_householder_qr(blocks, choice=choice)
                ms = 1e3 * (time.perf_counter() - t0)
                rep = compute_metrics(None, a, res, scheme=f"bh:{family}")
                emit(_row(f"bh:{family}", choice, "householder", n, 0, k, p,
                          seed, kin, rep, ms))
            for intra in ("householder", "cholshift"):
                t0 = time.perf_counter()
                try:
                    res = bcgs2_block(blocks, intra=intra)
                    ms = 1e3 * (time.perf_counter() - t0)
                    rep = compute_metrics(None, a, res, scheme=f"bcgs2:{family}")
                except IntraFailure:
                    ms = 1e3 * (time.perf_counter() - t0)
                    rep = failed_report(scheme=f"bcgs2:{family}")
                emit(_row(f"bcgs2:{family}", "", intra, n, 0, k, p,
                          seed, kin, rep, ms))


def _run_table3(scale, seeds, emit):
    """Same comparison under a weighted inner product, kappa(B) = 1e5."""
    n = scale.get("n", 1000)
    p = scale.get("p", 10)
    k = scale.get("k", 5)
    kappa_b = scale.get("kappa_b", 1e5)
    for family in ("sstep", "stewart_extreme"):
        for seed in seeds:
            inner = InnerProduct.weighted(gen_spd(n, kappa_b, seed + 7919))
            a = gen_family(family, n, p, k, seed)
            blocks = _split_blocks(a, k)
            kin = cond2(a)
            for choice in CHOICES:
                t0 = time.perf_counter()
                try:
                    res = b_block_householder_qr(blocks, inner, choice=choice)
                    ms = 1e3 * (time.perf_counter() - t0)
                    rep = compute_metrics(None, a, res, inner=inner,
                                          scheme=f"bh_b:{family}")
                except IntraFailure:
                    ms = 1e3 * (time.perf_counter() - t0)
                    rep = failed_report(scheme=f"bh_b:{family}")
                emit(_row(f"bh_b:{family}", choice, "householder", n, 0, k, p,
                          seed, kin, rep, ms))
            for intra in ("householder", "cholshift"):
                t0 = time.perf_counter()
                try:
                    res = bcgs2_block(blocks, intra=intra, inner=inner)
                    ms = 1e3 * (time.perf_counter() - t0)
                    rep = compute_metrics(None, a, res, inner=inner,
                                          scheme=f"bcgs2_b:{family}")
                except IntraFailure:
                    ms = 1e3 * (time.perf_counter() - t0)
                    rep = failed_report(scheme=f"bcgs2_b:{family}")
                emit(_row(f"bcgs2_b:{family}", "", intra, n, 0, k, p,
                          seed, kin, rep, ms))


def _run_table4(scale, seeds, emit):
    """Adversarial seed block: the pivot-free LU choice loses accuracy,
    the other two stay at roundoff."""
    n = scale.get("n", 1000)
    k0 = scale.get("k0", 100)
    k = scale.get("k", 100)
    alpha = scale.get("alpha", 0.1)
    for seed in seeds:
        pair = gen_mlu_adversarial(k0, alpha, n, seed)
        a = normal_matrix(make_rng(seed + 10007), n, k)
        kin = cond2(np.hstack([pair.v, a]))
        for choice in CHOICES:
            t0 = time.perf_counter()
            res = two_stage_qr(pair.v, a, choice)
            ms = 1e3 * (time.perf_counter() - t0)
            rep = compute_metrics(pair.v, a, res, scheme="twostage")
            emit(_row("twostage", choice, "householder", n, k0, k, 1,
                      seed, kin, rep, ms))


def _run_fig1(scale, seeds, emit):
    """Prescribed-kappa(T) sweep; kappa_input carries the target kappa."""
    n = scale.get("n", 1000)
    k0 = scale.get("k0", 100)
    k = scale.get("k", 100)
    kappas = scale.get("kappas", [1e2, 1e4, 1e6, 1e8, 1e10, 1e12])
    for kappa in kappas:
        for seed in seeds:
            v, p = gen_prescribed_kappa_t(n, k0, kappa, seed)
            a = normal_matrix(make_rng(seed + 20011), n, k)
            t0 = time.perf_counter()
            res = two_stage_qr(v, a, "explicit", p=p)
            ms = 1e3 * (time.perf_counter() - t0)
            rep = compute_metrics(v, a, res, scheme="twostage")
            emit(_row("twostage", "explicit", "householder", n, k0, k, 1,
                      seed, float(kappa), rep, ms))


def _run_sweep_unconditional(scale, seeds, emit):
    """Stability across input condition numbers spanning 1e0..1e15."""
    n = scale.get("n", 500)
    k0 = scale.get("k0", 20)
    k = scale.get("k", 20)
    kappa_lo = scale.get("kappa_lo", 0.0)
    kappa_hi = scale.get("kappa_hi", 15.0)
    targets = np.logspace(kappa_lo, kappa_hi, len(seeds))
    for target, seed in zip(targets, seeds):
        rng = make_rng(seed + 30013)
        v = gen_random_orthonormal(n, k0, seed)
        raw = normal_matrix(rng, n, k)
        raw -= v @ (v.T @ raw)
        wq = householder_qr(raw).q
        mix = normal_matrix(rng, k0, k)
        mix /= spectral_norm(mix)
        rot = householder_qr(normal_matrix(rng, k, k)).q
        sv = np.logspace(0.0, -np.log10(max(target, 1.0)), k)
        a = v @ mix + (wq * sv) @ rot.T
        kin = cond2(np.hstack([v, a]))
        for choice in ("qr", "polar"):
            t0 = time.perf_counter()
            res = two_stage_qr(v, a, choice)
            ms = 1e3 * (time.perf_counter() - t0)
            rep = compute_metrics(v, a, res, scheme="twostage")
            emit(_row("twostage", choice, "householder", n, k0, k, 1,
                      seed, kin, rep, ms))


EXPERIMENTS = {
    "table1": (_run_table1, [0]),
    "table2": (_run_table2, [1, 2]),
    "table3": (_run_table3, [1]),
    "table4": (_run_table4, [1, 2, 3]),
    "fig1": (_run_fig1, list(range(10))),
    "sweep_unconditional": (_run_sweep_unconditional, list(range(200))),
}


def run_experiment(name, scale=None, seeds=None, out=None):
    """Run a named experiment; returns the rows and optionally writes CSV."""
    if name not in EXPERIMENTS:
        raise ParameterError(
            f"unknown experiment {name!r}; expected one of {sorted(EXPERIMENTS)}")
    runner, default_seeds = EXPERIMENTS[name]
    seeds = list(seeds) if seeds is not None else list(default_seeds)
    scale = dict(scale or {})
    writer = CsvWriter(out, COLUMNS)
    rows = []

    def emit(row):
        rows.append(row)
        writer.write(row)

    try:
        runner(scale, seeds, emit)
    finally:
        writer.close()
    return rows


def timing_mode(config=None, out=None):
    """Median-of-5 wall times per scheme, relative to one Householder-QR
    of the stacked [v, a]."""
    config = dict(config or {})
    n = config.get("n", 10000)
    k0 = config.get("k0", 100)
    k = config.get("k", 100)
    reps = config.get("reps", 5)
    choices = config.get("choices", ["mlu", "qr", "polar"])
    seed = config.get("seed", 1)
    field = config.get("field", "real")

    v = gen_random_orthonormal(n, k0, seed, field)
    a = normal_matrix(make_rng(seed + 40009), n, k, field)
    stacked = np.hstack([v, a])

    def _median_ms(fn):
        times = []
        for _ in range(reps):
            t0 = time.perf_counter()
            fn()
            times.append(1e3 * (time.perf_counter() - t0))
        return float(np.median(times))

    naive_ms = _median_ms(lambda: householder_qr(stacked))
    rows = [{"scheme": "householder_full", "choice": "", "intra": "householder",
             "n": n, "k0": k0, "k": k, "wall_ms": naive_ms, "rel_time": 1.0}]
    for choice in choices:
        ms = _median_ms(lambda: two_stage_qr(v, a, choice))
        rows.append({"scheme": "twostage", "choice": choice,
                     "intra": "householder", "n": n, "k0": k0, "k": k,
                     "wall_ms": ms, "rel_time": ms / naive_ms})
    if out:
        cols = ["scheme", "choice", "intra", "n", "k0", "k", "wall_ms", "rel_time"]
        writer = CsvWriter(out, cols)
        for row in rows:
            writer.write(row)
        writer.close()
    return rows
