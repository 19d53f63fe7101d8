"""Seeded generators for every matrix family the experiments consume.

Each generator is a pure function of its parameters and seed; identical
calls give bit-identical output.
"""

from dataclasses import dataclass

import numpy as np

from .core import as_matrix, householder_qr
from .errors import ConstructionError, ParameterError
from .rand import make_rng, normal_matrix, standard_normal, uniform

FAMILIES = ("sstep", "stewart_extreme")


def fixture_badbcg():
    """The 4x2 pair on which a single inter/intra sweep loses orthogonality.

    v's columns span the plane where a's dominant content lives; a's only
    independent content is 1e-30-sized, far below roundoff of the
    projection.
    """
    s = np.sqrt(2.0) / 2.0
    v = np.array([
        [s, s],
        [-s, s],
        [0.0, 0.0],
        [0.0, 0.0],
    ])
    a = np.array([
        [1.0, 1.0],
        [1.0, 1.0],
        [1e-30, 0.0],
        [0.0, 1e-30],
    ])
    return v, a


def gen_random_orthonormal(n, k, seed, field="real"):
    """Orthonormal n x k block: QR of a seeded Gaussian matrix."""
    if k > n:
        raise ParameterError(f"need k <= n, got k={k}, n={n}")
    rng = make_rng(seed)
    return householder_qr(normal_matrix(rng, n, k, field)).q


def gen_spd(n, kappa, seed):
    """Hermitian positive definite matrix with condition number kappa."""
    if kappa < 1:
        raise ParameterError("kappa must be >= 1")
    rng = make_rng(seed)
    q = householder_qr(normal_matrix(rng, n, n)).q
    eig = np.logspace(0.0, np.log10(kappa), n)
    b = (q * eig) @ q.conj().T
    return (b + b.conj().T) / 2.0


def gen_cond_general(n, k, kappa, seed, field="real"):
    """General n x k matrix with prescribed condition number kappa."""
    if k > n:
        raise ParameterError(f"need k <= n, got k={k}, n={n}")
    if kappa < 1:
        raise ParameterError("kappa must be >= 1")
    rng = make_rng(seed)
    u = householder_qr(normal_matrix(rng, n, k, field)).q
    vk = householder_qr(normal_matrix(rng, k, k, field)).q
    sv = np.logspace(0.0, np.log10(kappa), k)[::-1]
    return (u * sv) @ vk.conj().T


def mlu_target_upper(k0, alpha):
    """The ill-conditioned upper triangular target for the pivot-free LU.

    Row i (0-based): diagonal 1 + alpha/sqrt(k0 - i), off-diagonal entries
    -1/sqrt(k0 - i).
    """
    u = np.zeros((k0, k0))
    for i in range(k0):
        denom = np.sqrt(k0 - i)
        u[i, i] = 1.0 + alpha / denom
        u[i, i + 1:] = -1.0 / denom
    return u


@dataclass
class AdversarialPair:
    """Orthonormal block whose top-square pivot-free LU hits target_u."""

    v: np.ndarray
    target_u: np.ndarray


def _reverse_embed(rows_mat, n, seed):
    """Orthonormal n x k block built by reversing a Householder-QR sweep.

    rows_mat holds, row by row, the first row of each successive trailing
    block the forward sweep would produce; every row's 2-norm must stay
    below one so the unit-vector extension exists.
    """
    rows_mat = as_matrix(rows_mat, "rows_mat")
    k = rows_mat.shape[0]
    if n < 2 * k:
        raise ParameterError(f"need n >= 2*k, got n={n}, k={k}")
    norms = np.sqrt((np.abs(rows_mat) ** 2).sum(axis=1))
    if np.any(norms >= 1.0):
        raise ConstructionError("a row 2-norm reached 1; extension impossible")
    rng = make_rng(seed)

    base = rows_mat[k - 1, k - 1]
    m0 = n - k + 1
    v_cur = np.zeros((m0, 1))
    tail = standard_normal(rng, (m0 - 1,))
    tail /= np.linalg.norm(tail)
    v_cur[0, 0] = base
    v_cur[1:, 0] = np.sqrt(max(0.0, 1.0 - base ** 2)) * tail

    for i in range(2, k + 1):
        b = rows_mat[k - i, k - i:]
        m = v_cur.shape[0]
        vh = np.zeros((m + 1, i))
        vh[0, 0] = -1.0 if b[0] >= 0 else 1.0
        vh[1:, 1:] = v_cur
        # free unit vector orthogonal to every column of vh; projecting
        # twice and renormalizing x keeps the step's reflection orthogonal
        # to roundoff, so defects stay additive instead of compounding
        w = standard_normal(rng, (m + 1,))
        w -= vh @ (vh.T @ w)
        w -= vh @ (vh.T @ w)
        w /= np.linalg.norm(w)
        x = np.sqrt(max(0.0, 1.0 - float(b @ b))) * w + vh @ b
        x /= np.linalg.norm(x)
        hvec = (x - np.eye(m + 1)[:, 0]) / (x[0] - 1.0)
        tau = 1.0 - x[0]
        v_cur = vh - tau * np.outer(hvec, hvec @ vh)
    return v_cur


def gen_mlu_adversarial_from_r(r, n, seed):
    """Orthonormal block whose pivot-free LU reproduces diag(sign) + r.

    r must be strictly upper triangular plus diagonal (k x k) with every
    row 2-norm below one. The embedded rows are the negated rows of r so
    the on-the-fly sign choice lands on d_ii = sign(r_ii).
    """
    r = as_matrix(r, "r")
    k = r.shape[0]
    if r.shape[0] != r.shape[1]:
        raise ParameterError("r must be square")
    d = np.where(np.diagonal(r).real >= 0, 1.0, -1.0)
    v = _reverse_embed(-np.triu(r), n, seed)
    return AdversarialPair(v=v, target_u=np.diag(d) + np.triu(r))


def gen_mlu_adversarial(k0, alpha, n, seed):
    """Orthonormal n x k0 block driving the pivot-free LU to its
    ill-conditioned target (condition number grows like 1/alpha-driven)."""
    if k0 < 1:
        raise ParameterError("k0 must be >= 1")
    if n < 2 * k0:
        raise ParameterError(f"need n >= 2*k0, got n={n}, k0={k0}")
    target = mlu_target_upper(k0, alpha)
    r = target - np.eye(k0)
    pair = gen_mlu_adversarial_from_r(r, n, seed)
    return AdversarialPair(v=pair.v, target_u=target)


def gen_prescribed_kappa_t(n, k0, kappa, seed):
    """(v, p) pair whose reflector T = I - v_top^* p has condition number
    within a factor 1.5 of kappa.

    v_top and p share singular vectors; T's singular values are |1 - s d|
    for chosen singular values s and signs d, so one small value 2/kappa
    against a pack near 1.4 pins the condition number.
    """
    if kappa < 1:
        raise ParameterError("kappa must be >= 1")
    if k0 < 2:
        raise ParameterError("k0 must be >= 2")
    if n < 2 * k0:
        raise ParameterError(f"need n >= 2*k0, got n={n}, k0={k0}")
    rng = make_rng(seed)
    w1 = householder_qr(normal_matrix(rng, k0, k0)).q
    w2 = householder_qr(normal_matrix(rng, k0, k0)).q
    o = householder_qr(normal_matrix(rng, n - k0, k0)).q
    sig = uniform(rng, 0.36, 0.44, k0)
    d = -np.ones(k0)
    if kappa > 4.0:
        sig[0] = 1.0 - 2.0 / kappa
        d[0] = 1.0
    vtop = (w1 * sig) @ w2.T
    vbot = (o * np.sqrt(1.0 - sig ** 2)) @ w2.T
    p = (w1 * d) @ w2.T
    return np.vstack([vtop, vbot]), p


def gen_family(name, n, p, k, seed):
    """Ill-conditioned block families used by the multi-block experiments."""
    if p * k > n:
        raise ParameterError(f"need p*k <= n, got p*k={p * k}, n={n}")
    if p < 1 or k < 1:
        raise ParameterError("p and k must be >= 1")
    rng = make_rng(seed)
    if p == 1:
        a = normal_matrix(rng, n, k)
        return a / np.sqrt((np.abs(a) ** 2).sum(axis=0)).max()
    if name == "sstep":
        return _family_sstep(rng, n, p, k)
    if name == "stewart_extreme":
        return _family_stewart(rng, n, p, k)
    raise ParameterError(f"unknown family {name!r}; expected one of {FAMILIES}")


def _family_sstep(rng, n, p, k):
    """Krylov power blocks of a log-spaced diagonal operator.

    The carrier vector is renormalized at block boundaries only, so column
    norms inside a block spread by factors up to ||M||^(k-1); a single
    global column scale brings the largest column to unit norm.
    """
    lam = np.logspace(1.0, 10.0, n)
    v = standard_normal(rng, (n,))
    v /= np.linalg.norm(v)
    cols = []
    for _ in range(p):
        v /= np.linalg.norm(v)
        for _ in range(k):
            cols.append(v.copy())
            v = lam * v
    a = np.column_stack(cols)
    return a / np.sqrt((a ** 2).sum(axis=0)).max()


def _family_stewart(rng, n, p, k):
    """Alternating fresh random blocks and near-copies of the previous
    block (times a large square mixer, plus 1e-12 noise).

    The mixer scale pushes the copies' absolute 1e-12 noise below the
    roundoff of projections against the pair's span, which is what makes
    the inter-block deficiency extreme.
    """
    blocks = []
    for i in range(p):
        if i % 2 == 0:
            blocks.append(standard_normal(rng, (n, k)))
        else:
            c = 1e4 * standard_normal(rng, (k, k))
            noise = standard_normal(rng, (n, k))
            blocks.append(blocks[-1] @ c + 1e-12 * noise)
    return np.hstack(blocks)
