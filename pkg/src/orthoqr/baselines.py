"""Reference competitors: BCGS sequences, BCGS2, BMGS, two-stage Cholesky-QR.

All baselines honor the same factorization contract as the two-stage
method (a = v s + q r up to roundoff) even where their orthogonality
degrades; residual and orthogonality fail independently.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import as_matrix, cholesky, orthonormality_defect, tri_solve
from .errors import DimensionError, IntraFailure, ParameterError
from .oblique import InnerProduct, b_intra_qr
from .twostage import BlockQRResult, TwoStageResult, intra_qr

SCHEMES = ("BCGS", "BCGS2", "BMGS", "BMGS_WY", "CholQR2Stage")


@dataclass
class BaselineSpec:
    scheme: str = "BCGS"
    intra: str = "householder"
    reorth_sequence: list = field(default_factory=lambda: ["inter", "intra"])

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if not self.reorth_sequence:
            raise ParameterError("reorth_sequence must be nonempty")
        if self.reorth_sequence[-1] != "intra":
            raise ParameterError("reorth_sequence must end with an intra step")


def bcgs_two_stage(v, a, spec=None, intra=None):
    """Run an inter/intra step sequence of the classical block scheme.

    `spec` may be a BaselineSpec or a plain list of "inter"/"intra" tags.
    Maintains a = v s + work r across steps so the returned triple always
    satisfies the factorization contract; sweep_history records the
    augmented orthogonality defect after each intra step.
    """
    v = as_matrix(v, "v")
    a = as_matrix(a, "a")
    if v.shape[0] != a.shape[0]:
        raise DimensionError("v and a must have the same row count")
    if isinstance(spec, BaselineSpec):
        sequence = spec.reorth_sequence
        intra = intra or spec.intra
    else:
        sequence = spec or ["inter", "intra"]
    intra = intra or "householder"
    if not sequence or sequence[-1] != "intra":
        raise ParameterError("sequence must be nonempty and end with 'intra'")

    k0, k = v.shape[1], a.shape[1]
    dtype = np.result_type(v, a)
    work = a.astype(dtype)
    s = np.zeros((k0, k), dtype=dtype)
    r = np.eye(k, dtype=dtype)
    history = []
    for step in sequence:
        if step == "inter":
            c = v.conj().T @ work
            work = work - v @ c
            s = s + c @ r
        elif step == "intra":
            qr = intra_qr(work, intra)
            work = qr.q
            r = qr.r @ r
            history.append(orthonormality_defect(np.hstack([v, work])))
        else:
            raise ParameterError(f"unknown step {step!r}")
    return TwoStageResult(work, r, s, None, sweep_history=history)


def bcgs2_block(blocks, intra="householder", inner=None):
    """Two-sweep (inter, intra, inter, intra) block CGS.

    With a weighted inner product the projections and the intra step both
    run under it. Intra breakdown raises IntraFailure tagged with the
    block index.
    """
    if not blocks:
        raise ParameterError("need at least one block")
    blocks = [as_matrix(b, f"block {i}") for i, b in enumerate(blocks)]
    n = blocks[0].shape[0]
    sizes = [b.shape[1] for b in blocks]
    total = sum(sizes)
    if total > n:
        raise DimensionError(f"need sum(k_i) <= n, got {total} > {n}")
    ip = inner or InnerProduct.euclidean()

    def _intra(x, idx):
        try:
            if ip.kind == "euclidean":
                return intra_qr(x, intra)
            return b_intra_qr(x, ip, intra)
        except IntraFailure as exc:
            exc.block = idx
            raise

    dtype = np.result_type(*blocks)
    r_full = np.zeros((total, total), dtype=dtype)
    qr0 = _intra(blocks[0], 0)
    qs = [qr0.q]
    r_full[:sizes[0], :sizes[0]] = qr0.r

    offset = sizes[0]
    for i in range(1, len(blocks)):
        ki = sizes[i]
        qacc = np.hstack(qs)
        bx = ip.apply(blocks[i])
        s1 = qacc.conj().T @ bx
        y = blocks[i] - qacc @ s1
        qr1 = _intra(y, i)
        s2 = qacc.conj().T @ ip.apply(qr1.q)
        z = qr1.q - qacc @ s2
        qr2 = _intra(z, i)
        qs.append(qr2.q)
        m = offset
        r_full[:m, offset:offset + ki] = s1 + s2 @ qr1.r
        r_full[offset:offset + ki, offset:offset + ki] = qr2.r @ qr1.r
        offset += ki
    return BlockQRResult(np.hstack(qs), r_full, sizes)


def bmgs_inter(v_blocks, a, wy=False):
    """Block-MGS inter-block projection of a against [v_1, ..., v_p].

    Plain mode sweeps the projectors block by block; WY mode assembles the
    lower triangular correction T (unit block diagonal, T = I in exact
    arithmetic for orthonormal v) and applies I - V T V^* in two products.
    """
    if not v_blocks:
        raise ParameterError("need at least one v block")
    v_blocks = [as_matrix(b, f"v block {i}") for i, b in enumerate(v_blocks)]
    a = as_matrix(a, "a")
    n = a.shape[0]
    if any(b.shape[0] != n for b in v_blocks):
        raise DimensionError("v blocks and a must share the row count")
    if not wy:
        work = a.copy()
        for vb in v_blocks:
            work = work - vb @ (vb.conj().T @ work)
        return work
    vcat = np.hstack(v_blocks)
    m = vcat.shape[1]
    t = np.eye(m, dtype=np.result_type(vcat, a))
    offset = v_blocks[0].shape[1]
    for i in range(1, len(v_blocks)):
        ki = v_blocks[i].shape[1]
        t[offset:offset + ki, :offset] = \
            -v_blocks[i].conj().T @ (vcat[:, :offset] @ t[:offset, :offset])
        offset += ki
    return a - vcat @ (t @ (vcat.conj().T @ a))


def cholqr_two_stage(v, a):
    """Cholesky-QR of [v, a] exploiting v's orthonormality.

    r^* is the Cholesky factor of a^* a - (a^* v)(v^* a); raises
    NotPositiveDefinite when that Gram complement is numerically
    indefinite.
    """
    v = as_matrix(v, "v")
    a = as_matrix(a, "a")
    if v.shape[0] != a.shape[0]:
        raise DimensionError("v and a must have the same row count")
    s = v.conj().T @ a
    g = a.conj().T @ a - s.conj().T @ s
    g = (g + g.conj().T) / 2.0
    l = cholesky(g)
    q = tri_solve(l, (a - v @ s).conj().T, lower=True).conj().T
    return TwoStageResult(q, np.triu(l.conj().T), s, None)
