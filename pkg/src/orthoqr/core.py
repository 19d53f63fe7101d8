"""Dense factorization kernels every other module consumes.

All routines operate on 2-D float64/complex128 arrays and are pure
functions of their inputs; norms written as ||.||_2 are spectral norms
computed exactly through singular values.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .errors import (
    ConvergenceError,
    DimensionError,
    NotHermitian,
    NotPositiveDefinite,
    ParameterError,
    SingularError,
)

EPS = 2.0 ** -53  # unit roundoff in IEEE double precision


def as_matrix(a, name="matrix"):
    """Coerce to a contiguous 2-D float64/complex128 array."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if np.iscomplexobj(a):
        return np.ascontiguousarray(a, dtype=np.complex128)
    return np.ascontiguousarray(a, dtype=np.float64)


def spectral_norm(a):
    """Largest singular value; 0.0 for an empty matrix."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def orthonormality_defect(v):
    """||v^* v - I||_2."""
    v = np.asarray(v)
    if v.size == 0:
        return 0.0
    g = v.conj().T @ v
    return spectral_norm(g - np.eye(v.shape[1], dtype=g.dtype))


@dataclass
class QRPair:
    """q has (near-)orthonormal columns; r is upper triangular with exact
    zeros stored below the diagonal."""

    q: np.ndarray
    r: np.ndarray


def householder_qr(a, nonneg_diag=False):
    """QR factorization of a tall matrix.

    With nonneg_diag the diagonal of r is made real and nonnegative by
    post-multiplying q with the conjugate column phases; the factorization
    itself is untouched.
    """
    a = as_matrix(a, "a")
    m, n = a.shape
    if m < n:
        raise DimensionError(f"need rows >= cols, got {m}x{n}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError("input contains non-finite entries")
    q, r = np.linalg.qr(a, mode="reduced")
    if nonneg_diag and n:
        d = np.diagonal(r).copy()
        absd = np.abs(d)
        safe = np.where(absd == 0, 1.0, absd)
        phase = np.where(absd == 0, 1.0 + 0j if np.iscomplexobj(r) else 1.0, d / safe)
        q = q * phase[np.newaxis, :]
        r = r / phase[:, np.newaxis]
        idx = np.arange(n)
        r[idx, idx] = absd
    return QRPair(q, np.triu(r))


def cholesky(a):
    """Lower-triangular L with a = L L^*.

    The input must be Hermitian to 1e-12 * ||a||_2 and is symmetrized
    before factorization to remove representation noise.
    """
    a = as_matrix(a, "a")
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"cholesky needs a square matrix, got {a.shape}")
    if a.shape[0] == 0:
        return a.copy()
    nrm = spectral_norm(a)
    if spectral_norm(a - a.conj().T) > 1e-12 * nrm:
        raise NotHermitian("matrix is not Hermitian to 1e-12 * ||a||_2")
    h = (a + a.conj().T) / 2.0
    try:
        return spla.cholesky(h, lower=True, check_finite=True)
    except spla.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None


def polar(a):
    """Polar split a = u h with u unitary and h Hermitian PSD, via SVD."""
    a = as_matrix(a, "a")
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"polar needs a square matrix, got {a.shape}")
    try:
        u, s, vh = np.linalg.svd(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from None
    unitary = u @ vh
    herm = (vh.conj().T * s) @ vh
    herm = (herm + herm.conj().T) / 2.0
    return unitary, herm


def cond2(a):
    """Spectral condition number sigma_max / sigma_min; +inf if singular."""
    a = as_matrix(a, "a")
    if a.size == 0:
        raise DimensionError("cond2 of an empty matrix")
    try:
        s = np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from None
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def tri_solve(t, b, lower=False, adjoint=False, side="left", unit_diagonal=False):
    """Triangular solve t x = b (side="left") or x t = b (side="right").

    adjoint solves with t^* in place of t. Substitution only; raises
    SingularError on a zero diagonal entry.
    """
    t = as_matrix(t, "t")
    if t.shape[0] != t.shape[1]:
        raise DimensionError(f"triangular factor must be square, got {t.shape}")
    if not unit_diagonal and t.shape[0] and np.any(np.diagonal(t) == 0):
        raise SingularError("zero diagonal entry in triangular factor")
    b_arr = np.asarray(b)
    vec = b_arr.ndim == 1
    bb = b_arr[:, np.newaxis] if vec else as_matrix(b, "b")
    if side == "left":
        if t.shape[0] != bb.shape[0]:
            raise DimensionError(f"shape mismatch {t.shape} vs {bb.shape}")
        x = spla.solve_triangular(
            t, bb, lower=lower, trans="C" if adjoint else "N",
            unit_diagonal=unit_diagonal, check_finite=False)
    elif side == "right":
        if vec:
            bb = b_arr[np.newaxis, :]
        if t.shape[0] != bb.shape[1]:
            raise DimensionError(f"shape mismatch {bb.shape} vs {t.shape}")
        if adjoint:
            # x t^* = b  <=>  t x^* = b^*
            x = spla.solve_triangular(
                t, bb.conj().T, lower=lower, trans="N",
                unit_diagonal=unit_diagonal, check_finite=False).conj().T
        else:
            # x t = b  <=>  t^T x^T = b^T
            x = spla.solve_triangular(
                t, bb.T, lower=lower, trans="T",
                unit_diagonal=unit_diagonal, check_finite=False).T
    else:
        raise ParameterError(f"side must be 'left' or 'right', got {side!r}")
    return x[:, 0] if (vec and side == "left") else (x[0] if vec else x)


def shifted_cholesky_qr(a, refine_passes=2):
    """Shifted Cholesky-QR followed by unshifted Cholesky-QR refinements.

    The first Gram matrix gets the shift 11 (m n + n (n+1)) u ||G||_2;
    refinement Grams are unshifted. Breakdown raises NotPositiveDefinite
    and is never repaired.
    """
    a = as_matrix(a, "a")
    m, n = a.shape
    if m < n:
        raise DimensionError(f"need rows >= cols, got {m}x{n}")
    if n == 0:
        return QRPair(a.copy(), np.zeros((0, 0), dtype=a.dtype))
    g = a.conj().T @ a
    g = (g + g.conj().T) / 2.0
    shift = 11.0 * (m * n + n * (n + 1)) * EPS * spectral_norm(g)
    l = cholesky(g + shift * np.eye(n, dtype=g.dtype))
    q = tri_solve(l, a.conj().T, lower=True).conj().T
    r = l.conj().T
    for _ in range(refine_passes):
        g2 = q.conj().T @ q
        g2 = (g2 + g2.conj().T) / 2.0
        l2 = cholesky(g2)
        q = tri_solve(l2, q.conj().T, lower=True).conj().T
        r = l2.conj().T @ r
    return QRPair(q, np.triu(r))
