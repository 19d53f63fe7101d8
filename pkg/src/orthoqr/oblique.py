"""Orthogonalization under a weighted (B-) inner product <x, y> = y^* B x.

The reflectors here have the form H = I - W T^{-1} W^* B with
H^{-1} = I - W T^{-*} W^* B; they map a B-orthonormal seed basis onto a
B-orthonormal target exactly, and preserve the B-gram of everything else
up to the input's orthonormality defect.
"""

from dataclasses import dataclass

import numpy as np

from .core import (
    QRPair,
    EPS,
    as_matrix,
    cholesky,
    cond2,
    householder_qr,
    spectral_norm,
    tri_solve,
)
from .errors import (
    BreakdownError,
    DimensionError,
    IntraFailure,
    NotHermitian,
    NotPositiveDefinite,
    OrthonormalityError,
    ParameterError,
)
from .reflector import ReflectorDiagnostics, seed_from_block
from .twostage import BlockQRResult, TwoStageResult


@dataclass(frozen=True)
class InnerProduct:
    """Euclidean or SPD-weighted inner product with a cached Cholesky factor."""

    kind: str
    b: np.ndarray | None = None
    chol_b: np.ndarray | None = None

    @staticmethod
    def euclidean():
        return InnerProduct(kind="euclidean")

    @staticmethod
    def weighted(b):
        b = as_matrix(b, "b")
        if b.shape[0] != b.shape[1]:
            raise DimensionError(f"weight matrix must be square, got {b.shape}")
        if spectral_norm(b - b.conj().T) > 1e-12 * spectral_norm(b):
            raise NotHermitian("weight matrix is not Hermitian to tolerance")
        b = (b + b.conj().T) / 2.0
        return InnerProduct(kind="weighted", b=b, chol_b=cholesky(b))

    @property
    def n(self):
        return None if self.b is None else self.b.shape[0]

    def apply(self, x):
        """B x (identity for the Euclidean kind)."""
        return x if self.kind == "euclidean" else self.b @ x

    def gram(self, x, y):
        """y^* B x."""
        return np.asarray(y).conj().T @ self.apply(np.asarray(x))

    def col_norms(self, x):
        """Column B-norms via the Cholesky factor: ||L^* x_j||_2."""
        m = x if self.kind == "euclidean" else self.chol_b.conj().T @ x
        return np.sqrt((np.abs(m) ** 2).sum(axis=0))

    def norm(self, x):
        """B-weighted spectral norm ||L^* x||_2 (vector 2-norm for 1-D x)."""
        x = np.asarray(x)
        m = x if self.kind == "euclidean" else self.chol_b.conj().T @ x
        if m.ndim == 1:
            return float(np.linalg.norm(m))
        return spectral_norm(m)

    def defect(self, x):
        """||x^* B x - I||_2 through singular values of L^* x."""
        x = np.asarray(x)
        if x.size == 0:
            return 0.0
        m = x if self.kind == "euclidean" else self.chol_b.conj().T @ x
        s = np.linalg.svd(m, compute_uv=False)
        return float(np.max(np.abs(s ** 2 - 1.0)))


def initial_b_basis(inner, m):
    """First m canonical vectors scaled into a B-orthonormal block.

    Uses the inverse Cholesky factor of the leading m x m principal
    submatrix of B, so the block is upper triangular over zero rows.
    """
    if inner.kind != "weighted":
        raise ParameterError("initial_b_basis needs a weighted inner product")
    n = inner.n
    if m > n:
        raise ParameterError(f"need m <= n, got m={m}, n={n}")
    lm = cholesky(inner.b[:m, :m])
    top = tri_solve(lm, np.eye(m, dtype=lm.dtype), lower=True, adjoint=True)
    u = np.zeros((n, m), dtype=lm.dtype)
    u[:m, :] = top
    return u


@dataclass
class BGenHouseholder:
    """Factored B-reflector H = I - w t^{-1} w^* B."""

    w: np.ndarray
    t_solver: object
    p: np.ndarray
    x: np.ndarray
    inner: InnerProduct
    choice: str
    n: int
    k0: int


def b_build_reflector(v, u0, inner, choice="qr", p=None, orth_tol=1e-6,
                      allow_defect=False):
    """Reflector mapping the transformed basis u0 p onto v.

    v and u0 must both be B-orthonormal (defect <= orth_tol). The seed p
    is chosen from the k0 x k0 coupling matrix v^* B u0 by the same
    constructions as the Euclidean case, keeping T = I - v^* B u0 p in
    solver-friendly factored form.
    """
    v = as_matrix(v, "v")
    u0 = as_matrix(u0, "u0")
    if v.shape != u0.shape:
        raise DimensionError(f"v and u0 must agree in shape, {v.shape} vs {u0.shape}")
    n, k0 = v.shape
    if k0 == 0:
        raise DimensionError("v must have at least one column")
    for name, blk in (("v", v), ("u0", u0)):
        d = inner.defect(blk)
        if d > orth_tol and not allow_defect:
            raise OrthonormalityError(
                f"||{name}^* B {name} - I||_2 = {d:.3e} exceeds {orth_tol:.1e}")
    coupling = v.conj().T @ inner.apply(u0)     # v^* B u0
    p_mat, t_solver = seed_from_block(coupling.conj().T, choice, p=p)
    x = u0 @ p_mat
    w = x - v
    return BGenHouseholder(w=w, t_solver=t_solver, p=p_mat, x=x, inner=inner,
                           choice=choice, n=n, k0=k0)


def b_apply_reflector(h, x, inverse=False):
    """H x, or H^{-1} x = (I - w T^{-*} w^* B) x when inverse is set."""
    x = as_matrix(x, "x")
    if x.shape[0] != h.n:
        raise DimensionError(f"x has {x.shape[0]} rows, reflector expects {h.n}")
    y = h.w.conj().T @ h.inner.apply(x)
    z = h.t_solver.solve(y, adjoint=inverse)
    return x - h.w @ z


def b_reflector_diagnostics(h):
    t = h.t_solver.reconstruct()
    z = h.t_solver.solve(h.w.conj().T, adjoint=True)
    return ReflectorDiagnostics(kappa_t=cond2(t), wt_inv_norm=spectral_norm(z))


def b_householder_qr(a, u_init, inner, reorth=True, prefix=None):
    """Left-looking Householder-style QR under the B inner product.

    Column j is reduced by the previous inverse reflectors, projected
    against the used-up initial basis vectors, then sent onto the j-th
    initial basis vector by a fresh rank-one B-reflector. With reorth,
    each reflector vector is orthogonalized once against the accumulated
    basis (prefix columns first) before use; the output q is B-orthonormal
    to roughly sqrt(kappa(B)) u.

    Raises BreakdownError when a reduced column's B-norm falls below
    1e3 u times the largest input column B-norm.
    """
    a = as_matrix(a, "a")
    u_init = as_matrix(u_init, "u_init")
    n, k = a.shape
    if u_init.shape[0] != n:
        raise DimensionError("a and u_init must share the row count")
    if u_init.shape[1] < k:
        raise DimensionError(f"u_init needs at least {k} columns")
    if prefix is not None:
        prefix = as_matrix(prefix, "prefix")
        if prefix.shape[0] != n:
            raise DimensionError("prefix must share the row count")
    dtype = np.result_type(a, u_init)
    if k == 0:
        return QRPair(np.zeros((n, 0), dtype=dtype), np.zeros((0, 0), dtype=dtype))

    scale = float(inner.col_norms(a).max()) if a.size else 0.0
    thresh = 1e3 * EPS * scale
    basis = u_init[:, :k].astype(dtype).copy()   # columns get sign-scaled
    r = np.zeros((k, k), dtype=dtype)
    ws = np.zeros((n, k), dtype=dtype)
    ts = np.zeros(k, dtype=dtype)

    for j in range(k):
        y = a[:, j].astype(dtype).copy()
        for i in range(j):                        # apply H_i^{-1}
            coef = (ws[:, i].conj() @ inner.apply(y)) / np.conj(ts[i])
            y = y - ws[:, i] * coef
        if j:
            coeffs = basis[:, :j].conj().T @ inner.apply(y)
            r[:j, j] = coeffs
            y = y - basis[:, :j] @ coeffs
        beta = inner.norm(y)
        if beta <= thresh:
            raise BreakdownError(
                f"column {j} is numerically zero after projection "
                f"(B-norm {beta:.3e} <= {thresh:.3e})")
        y = y / beta
        align = u_init[:, j].conj() @ inner.apply(y)
        sigma = 1.0 if align == 0 else -align / abs(align)
        basis[:, j] *= sigma
        w = basis[:, j] - y
        if reorth:
            others = basis[:, :j] if prefix is None else \
                np.hstack([prefix, basis[:, :j]])
            if others.size:
                w = w - others @ (others.conj().T @ inner.apply(w))
        t = w.conj() @ inner.apply(basis[:, j])
        ws[:, j] = w
        ts[j] = t
        r[j, j] = beta

    q = basis.copy()
    for i in range(k - 1, -1, -1):               # q_j = H_1 ... H_j basis_j
        coef = (ws[:, i].conj() @ inner.apply(q[:, i:])) / ts[i]
        q[:, i:] = q[:, i:] - np.outer(ws[:, i], coef)
    return QRPair(q, np.triu(r))


def b_intra_qr(x, inner, intra="householder"):
    """Intra-block B-orthogonalization used by the baselines.

    householder: Euclidean QR first, then a Cholesky correction of the
    B-gram. cholshift: shifted Cholesky-QR on the B-gram followed by two
    unshifted passes. Breakdown raises IntraFailure.
    """
    x = as_matrix(x, "x")
    try:
        if intra == "householder":
            qe = householder_qr(x)
            g = qe.q.conj().T @ inner.apply(qe.q)
            l = cholesky(g)
            q = tri_solve(l, qe.q.conj().T, lower=True).conj().T
            return QRPair(q, np.triu(l.conj().T @ qe.r))
        if intra == "cholshift":
            m, n = x.shape
            if n == 0:
                return QRPair(x.copy(), np.zeros((0, 0), dtype=x.dtype))
            g = x.conj().T @ inner.apply(x)
            g = (g + g.conj().T) / 2.0
            shift = 11.0 * (m * n + n * (n + 1)) * EPS * spectral_norm(g)
            l = cholesky(g + shift * np.eye(n, dtype=g.dtype))
            q = tri_solve(l, x.conj().T, lower=True).conj().T
            r = l.conj().T
            for _ in range(2):
                g2 = q.conj().T @ inner.apply(q)
                g2 = (g2 + g2.conj().T) / 2.0
                l2 = cholesky(g2)
                q = tri_solve(l2, q.conj().T, lower=True).conj().T
                r = l2.conj().T @ r
            return QRPair(q, np.triu(r))
    except NotPositiveDefinite as exc:
        raise IntraFailure(f"B-weighted {intra} intra step broke down: {exc}") \
            from None
    raise ParameterError(f"unknown intra method {intra!r}")


def b_two_stage_qr(v, a, u, inner, choice="qr", reorth=True, p=None):
    """Two-stage Householder-QR under the B inner product.

    Parameters
    ----------
    v : (n, k0) B-orthonormal block to orthogonalize against.
    a : (n, k) general block.
    u : (n, >= k0+k) B-orthonormal initial basis; its first k0 columns
        seed the reflector, the next k start the trailing QR.
    choice : seed construction, as in the Euclidean case.

    Returns (q, r, s) with [v, q]^* B [v, q] = I and a = v s + q r up to
    roundoff scaled by sqrt(kappa(B)).
    """
    v = as_matrix(v, "v")
    a = as_matrix(a, "a")
    u = as_matrix(u, "u")
    n, k0 = v.shape
    k = a.shape[1]
    if a.shape[0] != n or u.shape[0] != n:
        raise DimensionError("v, a and u must share the row count")
    if u.shape[1] < k0 + k:
        raise DimensionError(f"u needs at least k0+k = {k0 + k} columns")
    if k0 + k > n:
        raise DimensionError(f"need k0 + k <= n, got {k0}+{k} > {n}")
    if k0 == 0:
        qr = b_householder_qr(a, u[:, :k], inner, reorth=reorth)
        return TwoStageResult(qr.q, qr.r, np.zeros((0, k), dtype=a.dtype),
                              ReflectorDiagnostics(1.0, 0.0))
    h = b_build_reflector(v, u[:, :k0], inner, choice, p=p)
    work = b_apply_reflector(h, a, inverse=True)
    s = h.x.conj().T @ inner.apply(work)
    work = work - h.x @ s
    qr = b_householder_qr(work, u[:, k0:k0 + k], inner, reorth=reorth,
                          prefix=h.x)
    q = b_apply_reflector(h, qr.q)
    return TwoStageResult(q, qr.r, s, b_reflector_diagnostics(h))


def b_block_householder_qr(blocks, inner, choice="qr", reorth=True):
    """Multi-block driver under the B inner product.

    One B-orthonormal initial basis covers all blocks; block i >= 2 runs
    the two-stage factorization against the accumulated q's. Breakdown is
    reported as IntraFailure tagged with the block index.
    """
    if not blocks:
        raise ParameterError("need at least one block")
    blocks = [as_matrix(b, f"block {i}") for i, b in enumerate(blocks)]
    n = blocks[0].shape[0]
    sizes = [b.shape[1] for b in blocks]
    total = sum(sizes)
    if total > n:
        raise DimensionError(f"need sum(k_i) <= n, got {total} > {n}")
    u = initial_b_basis(inner, total)

    dtype = np.result_type(*blocks)
    r_full = np.zeros((total, total), dtype=dtype)
    try:
        qr0 = b_householder_qr(blocks[0], u[:, :sizes[0]], inner, reorth=reorth)
    except (BreakdownError, NotPositiveDefinite) as exc:
        raise IntraFailure(str(exc), block=0) from None
    qs = [qr0.q]
    r_full[:sizes[0], :sizes[0]] = qr0.r
    worst = ReflectorDiagnostics(1.0, 0.0)

    offset = sizes[0]
    for i in range(1, len(blocks)):
        ki = sizes[i]
        qacc = np.hstack(qs)
        m = qacc.shape[1]
        try:
            res = b_two_stage_qr(qacc, blocks[i], u[:, :m + ki], inner,
                                 choice=choice, reorth=reorth)
        except (BreakdownError, NotPositiveDefinite) as exc:
            raise IntraFailure(str(exc), block=i) from None
        qs.append(res.q)
        r_full[:m, offset:offset + ki] = res.s
        r_full[offset:offset + ki, offset:offset + ki] = res.r
        if res.diagnostics and res.diagnostics.kappa_t > worst.kappa_t:
            worst = res.diagnostics
        offset += ki
    return BlockQRResult(np.hstack(qs), r_full, sizes, worst)
