"""Stability metrics: loss of orthogonality, cross-orthogonality, residual.

Every norm is computed exactly (SVD), never estimated; the B-weighted
variants go through the cached Cholesky factor of the weight matrix.
"""

from dataclasses import dataclass

import numpy as np

from .core import as_matrix, spectral_norm
from .errors import DimensionError


@dataclass
class StabilityReport:
    loss_orth: float
    cross_orth: float
    rel_residual: float
    kappa_t: float
    scheme: str = ""
    status: str = "ok"


def orthogonality_loss(q, inner=None, v=None):
    """||q^* B q - I||_2, or the [v, q]-augmented variant when v is given.

    Computed as max |sigma^2 - 1| over the singular values of L^* [v?, q],
    which equals the gram defect exactly.
    """
    block = q if v is None else np.hstack([v, q])
    if block.size == 0:
        return 0.0
    if inner is not None and inner.kind == "weighted":
        block = inner.chol_b.conj().T @ block
    s = np.linalg.svd(block, compute_uv=False)
    return float(np.max(np.abs(s ** 2 - 1.0)))


def compute_metrics(v, a, result, inner=None, augmented=False, scheme=""):
    """StabilityReport for a factorization result against its inputs.

    v may be None (plain q^* q loss, no cross term); `result` needs q and
    r attributes, and s when v participates in the residual. augmented
    switches the loss to the [v, q]-stacked defect.
    """
    a = as_matrix(a, "a")
    q = as_matrix(result.q, "q")
    r = as_matrix(result.r, "r")
    if v is not None:
        v = as_matrix(v, "v")
        if v.shape[0] != q.shape[0]:
            raise DimensionError("v and q must share the row count")
    if a.shape[0] != q.shape[0]:
        raise DimensionError("a and q must share the row count")

    loss = orthogonality_loss(q, inner, v=v if augmented else None)
    if v is not None and v.shape[1] and q.shape[1]:
        cross_mat = v.conj().T @ (inner.apply(q) if inner is not None
                                  and inner.kind == "weighted" else q)
        cross = float(np.linalg.norm(cross_mat))
    else:
        cross = 0.0
    recon = q @ r
    s = getattr(result, "s", None)
    if v is not None and s is not None and s.size:
        recon = recon + v @ s
    anorm = spectral_norm(a)
    resid = spectral_norm(a - recon) / anorm if anorm > 0 else 0.0
    diag = getattr(result, "diagnostics", None)
    kappa_t = diag.kappa_t if diag is not None else float("nan")
    return StabilityReport(loss_orth=loss, cross_orth=cross, rel_residual=resid,
                           kappa_t=kappa_t, scheme=scheme)


def failed_report(scheme=""):
    """Sentinel report for an intra-failed run: metric fields are nan."""
    nan = float("nan")
    return StabilityReport(loss_orth=nan, cross_orth=nan, rel_residual=nan,
                           kappa_t=nan, scheme=scheme, status="intra_failed")
