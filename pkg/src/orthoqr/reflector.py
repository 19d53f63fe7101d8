"""Block reflectors of the form H = I - W T^{-1} W^*.

Given a block v with orthonormal columns, a reflector maps the embedded
seed X = [p; 0] onto v (H X = v) without ever forming H densely. W = X - v
is stored explicitly while T = I - v_top^* p lives behind a solver tied to
the seed construction that produced it:

  * "mlu"      - p is a diagonal sign matrix chosen during a pivot-free LU
                 of (p - v_top); T = (L U)^* p.
  * "qr"       - p = -q1 from the QR of v_top with nonnegative diagonal;
                 T = I + r1^* is lower triangular with ||T||_2 <= 2.
  * "polar"    - p = -u from the polar split of v_top; T = I + h is
                 Hermitian positive definite with kappa_2(T) <= 2.
  * "explicit" - caller-supplied unitary p; T is kept dense behind a
                 pivoted LU.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla

from .core import (
    as_matrix,
    cholesky,
    cond2,
    householder_qr,
    orthonormality_defect,
    polar,
    spectral_norm,
    tri_solve,
)
from .errors import (
    DimensionError,
    NormBoundError,
    OrthonormalityError,
    ParameterError,
    SingularTError,
)

CHOICES = ("mlu", "qr", "polar", "explicit")


@dataclass
class MLUResult:
    """Pivot-free LU of (diag(p_diag) - z); every |u_tri| diagonal >= 1."""

    p_diag: np.ndarray
    l: np.ndarray
    u_tri: np.ndarray


def modified_lu(z):
    """LU of (p - z) with the diagonal sign matrix p chosen on the fly.

    p_ii = -sign(z_ii) with sign(mu) = 1 when Re mu >= 0 and -1 otherwise,
    which keeps every pivot magnitude at least one, so no pivoting is
    needed. Requires ||z||_2 <= 1 (+ 1e-8 slack).
    """
    z = as_matrix(z, "z")
    k = z.shape[0]
    if z.shape[0] != z.shape[1]:
        raise DimensionError(f"modified_lu needs a square matrix, got {z.shape}")
    if spectral_norm(z) > 1.0 + 1e-8:
        raise NormBoundError("||z||_2 exceeds 1 beyond tolerance")
    work = z.copy()
    p = np.ones(k)
    l = np.eye(k, dtype=z.dtype)
    u = np.zeros((k, k), dtype=z.dtype)
    for i in range(k):
        p[i] = -1.0 if work[i, i].real >= 0 else 1.0
        u[i, i] = p[i] - work[i, i]
        u[i, i + 1:] = -work[i, i + 1:]
        l[i + 1:, i] = -work[i + 1:, i] / u[i, i]
        if i + 1 < k:
            work[i + 1:, i + 1:] += np.outer(l[i + 1:, i], u[i, i + 1:])
    return MLUResult(p, l, u)


class MluTSolver:
    """T = (l u)^* diag(p); solves run through the triangular factors."""

    kind = "mlu"

    def __init__(self, mlu):
        self.mlu = mlu

    def solve(self, b, adjoint=False):
        p, l, u = self.mlu.p_diag, self.mlu.l, self.mlu.u_tri
        if adjoint:
            # T^* x = diag(p) l u x = b
            y = tri_solve(l, p[:, np.newaxis] * np.asarray(b), lower=True,
                          unit_diagonal=True)
            return tri_solve(u, y)
        # T x = u^* l^* diag(p) x = b
        y = tri_solve(u, b, adjoint=True)
        y = tri_solve(l, y, lower=True, adjoint=True, unit_diagonal=True)
        return p[:, np.newaxis] * y

    def reconstruct(self):
        return (self.mlu.l @ self.mlu.u_tri).conj().T * self.mlu.p_diag[np.newaxis, :]


class TriTSolver:
    """T stored as an explicit lower triangular matrix."""

    kind = "tri"

    def __init__(self, t):
        self.t = t

    def solve(self, b, adjoint=False):
        return tri_solve(self.t, b, lower=True, adjoint=adjoint)

    def reconstruct(self):
        return self.t


class CholTSolver:
    """T Hermitian positive definite, held with its Cholesky factor."""

    kind = "chol"

    def __init__(self, t):
        self.t = t
        self.l = cholesky(t)

    def solve(self, b, adjoint=False):
        # T = T^*, so the adjoint solve is identical
        y = tri_solve(self.l, b, lower=True)
        return tri_solve(self.l, y, lower=True, adjoint=True)

    def reconstruct(self):
        return self.t


class LuTSolver:
    """General dense T behind a pivoted LU (explicit seeds only)."""

    kind = "lu"

    def __init__(self, t):
        self.t = t
        self.lu, self.piv = spla.lu_factor(t, check_finite=False)
        if np.any(np.diagonal(self.lu) == 0):
            raise SingularTError("T is numerically singular")

    def solve(self, b, adjoint=False):
        return spla.lu_solve((self.lu, self.piv), b, trans=2 if adjoint else 0,
                             check_finite=False)

    def reconstruct(self):
        return self.t


@dataclass
class GenHouseholder:
    """Factored reflector H = I - w t^{-1} w^*; immutable once built."""

    w: np.ndarray
    t_solver: object
    p: np.ndarray
    choice: str
    n: int
    k0: int


@dataclass
class ReflectorDiagnostics:
    kappa_t: float
    wt_inv_norm: float


def seed_from_block(z, choice, p=None):
    """Seed matrix p and T-solver for T = I - z^* p.

    z is the square block the seed is computed from (the top block of v in
    the Euclidean case). Returns (p, t_solver).
    """
    k0 = z.shape[0]
    if choice == "mlu":
        mlu = modified_lu(z)
        return np.diag(mlu.p_diag).astype(z.dtype), MluTSolver(mlu)
    if choice == "qr":
        qp = householder_qr(z, nonneg_diag=True)
        p = -qp.q
        t = np.eye(k0, dtype=z.dtype) + qp.r.conj().T
        return p, TriTSolver(t)
    if choice == "polar":
        u, h = polar(z)
        p = -u
        t = np.eye(k0, dtype=z.dtype) + h
        return p, CholTSolver(t)
    if choice == "explicit":
        if p is None:
            raise ParameterError("choice='explicit' requires a seed matrix p")
        p = as_matrix(p, "p")
        if p.shape != (k0, k0):
            raise DimensionError(f"seed p must be {k0}x{k0}, got {p.shape}")
        if orthonormality_defect(p) > 1e-12 * max(k0, 1):
            raise ParameterError("explicit seed p is not unitary to tolerance")
        t = np.eye(k0, dtype=np.result_type(z, p)) - z.conj().T @ p
        return p, LuTSolver(t)
    raise ParameterError(f"unknown choice {choice!r}; expected one of {CHOICES}")


def build_reflector(v, choice="qr", p=None, orth_tol=1e-8, allow_defect=False):
    """Reflector mapping [p; 0] onto v for a block v with orthonormal columns.

    The orthonormality defect ||v^* v - I||_2 must stay below orth_tol
    unless allow_defect is set (the reflector's quality then degrades
    proportionally to the defect).
    """
    v = as_matrix(v, "v")
    n, k0 = v.shape
    if k0 > n:
        raise DimensionError(f"v must be tall, got {v.shape}")
    if k0 == 0:
        raise DimensionError("v must have at least one column")
    defect = orthonormality_defect(v)
    if defect > orth_tol and not allow_defect:
        raise OrthonormalityError(
            f"||v^* v - I||_2 = {defect:.3e} exceeds {orth_tol:.1e}")
    p_mat, t_solver = seed_from_block(v[:k0, :], choice, p=p)
    w = -v.copy()
    w[:k0, :] += p_mat
    return GenHouseholder(w=w, t_solver=t_solver, p=p_mat, choice=choice,
                          n=n, k0=k0)


def apply_reflector(h, x, adjoint=False):
    """H x, or H^* x when adjoint is set, as x - w (T-solve) (w^* x)."""
    x = as_matrix(x, "x")
    if x.shape[0] != h.n:
        raise DimensionError(f"x has {x.shape[0]} rows, reflector expects {h.n}")
    y = h.w.conj().T @ x
    z = h.t_solver.solve(y, adjoint=adjoint)
    return x - h.w @ z


def reflector_diagnostics(h):
    """kappa_2 of the reconstructed T and ||W T^{-1}||_2."""
    t = h.t_solver.reconstruct()
    kappa_t = cond2(t)
    # solve T^* z = w^* so that z^* = w T^{-1}
    z = h.t_solver.solve(h.w.conj().T, adjoint=True)
    return ReflectorDiagnostics(kappa_t=kappa_t, wt_inv_norm=spectral_norm(z))
