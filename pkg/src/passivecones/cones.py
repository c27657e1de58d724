"""Lyapunov cones ``L_H = {A : HA + A*H > 0}`` and matrix-convex combinations.

``L_I`` (``H = I``) is the matricial right half-plane; its members are
exactly the matrices ``P + iH`` with ``P`` positive definite.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .matcore import (
    EPS,
    DefinitenessVerdict,
    HermitianSplit,
    as_matrix,
    ctranspose,
    definiteness,
    hermitian_split,
    is_hermitian,
    is_singular,
    smallest_singular_value,
    spectral_norm,
    zero_tol,
)


class NoWitnessError(ValueError):
    """The matrix lies in the closed cone, so no maximality witness exists."""


class GramConditionError(ValueError):
    pass


@dataclass(frozen=True)
class ConeMembership:
    in_open: bool
    in_closed: bool
    certificate: np.ndarray
    verdict: DefinitenessVerdict
    split: HermitianSplit | None = None

    @property
    def min_eig(self):
        return self.verdict.min_eig


def membership_L_H(a, h, tol=EPS):
    """Test ``a`` against ``L_H`` and its closure using the certificate ``HA + A*H``."""
    a = as_matrix(a, square=True)
    h = as_matrix(h, square=True)
    if a.shape != h.shape:
        raise ValueError(f"shape mismatch: A {a.shape}, H {h.shape}")
    if not is_hermitian(h, tol):
        raise ValueError("H must be Hermitian")
    if is_singular(h, tol):
        raise ValueError("H must be non-singular")
    x = h @ a
    cert = x + ctranspose(x)
    v = definiteness(cert, tol)
    return ConeMembership(in_open=v.is_pd, in_closed=v.is_psd, certificate=cert, verdict=v)


def membership_L_I(a, tol=EPS):
    a = as_matrix(a, square=True)
    res = membership_L_H(a, np.eye(a.shape[0]), tol)
    return ConeMembership(res.in_open, res.in_closed, res.certificate, res.verdict,
                          split=hermitian_split(a))


@dataclass(frozen=True)
class MaximalityWitness:
    alpha: float
    A: np.ndarray
    sigma_min_sum: float


def maximality_witness(b, tol=EPS):
    """For ``b`` outside the closed ``L_I`` build ``A`` in ``L_I`` with ``A + b`` singular.

    With ``alpha = -lambda_min(b + b*)`` the choice ``A = (alpha I + b* - b)/2``
    has Hermitian part ``alpha I`` and ``A + b = (alpha I + b + b*)/2``, which
    has a zero eigenvalue.
    """
    b = as_matrix(b, square=True)
    s = b + ctranspose(b)
    lam_min = float(np.linalg.eigvalsh(s)[0])
    if lam_min >= -zero_tol(s, tol):
        raise NoWitnessError("B lies in (or too close to) the closed cone L_I")
    alpha = -lam_min
    n = b.shape[0]
    a = (alpha * np.eye(n) + ctranspose(b) - b) / 2
    return MaximalityWitness(alpha=alpha, A=a, sigma_min_sum=smallest_singular_value(a + b))


class CombineMode(str, Enum):
    ISOMETRY = "isometry"
    CONE = "full-rank-cone"


def check_gram(gram, mode, tol=EPS, what="Upsilon"):
    mode = CombineMode(mode)
    n = gram.shape[0]
    if mode is CombineMode.ISOMETRY:
        if np.linalg.norm(gram - np.eye(n), 2) > zero_tol(gram, tol):
            raise GramConditionError(f"{what}*{what} is not the identity")
    elif not definiteness(gram, tol).is_pd:
        raise GramConditionError(f"{what}*{what} is not positive definite")


def block_diag(mats):
    mats = [np.asarray(m) for m in mats]
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    dtype = np.result_type(*mats)
    out = np.zeros((rows, cols), dtype=dtype)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def matrix_convex_combine(mats, upsilon, mode=CombineMode.ISOMETRY, tol=EPS):
    """``Upsilon* diag(A_1, ..., A_k) Upsilon``."""
    mats = [as_matrix(m, square=True) for m in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].shape[0]
    if any(m.shape != (n, n) for m in mats):
        raise ValueError("all matrices must share their size")
    upsilon = as_matrix(upsilon)
    if upsilon.shape != (len(mats) * n, n):
        raise ValueError(f"Upsilon must be {len(mats) * n}x{n}, got {upsilon.shape}")
    check_gram(ctranspose(upsilon) @ upsilon, mode, tol)
    return ctranspose(upsilon) @ block_diag(mats) @ upsilon


def scaled_identity_counterexample(c1, c2, n):
    """The isometry and result showing scaled identities are not matrix-convex.

    Returns ``(Upsilon, Upsilon* diag(c1 I, c2 I) Upsilon)``; the result is
    ``diag(c1, c2 I_{n-1})``, which is not a scaled identity when ``c1 != c2``.
    """
    ups = np.zeros((2 * n, n))
    ups[0, 0] = 1.0
    ups[n + 1:, 1:] = np.eye(n - 1)
    res = matrix_convex_combine([c1 * np.eye(n), c2 * np.eye(n)], ups)
    return ups, res


def theta_pair(t):
    """The two ``theta`` values making the 2x2 combination below singular."""
    r = abs(t)
    d = r / (2 * np.sqrt(r * r + 4))
    return 0.5 - d, 0.5 + d


def theta_matrix(t, theta):
    """``[[2θ-1, θt], [(θ-1)conj(t), 1-2θ]]``."""
    t = complex(t)
    return np.array([[2 * theta - 1, theta * t],
                     [(theta - 1) * t.conjugate(), 1 - 2 * theta]])


def involution_combination(t, theta):
    """``θ N + (1-θ) U* N U`` for the involution ``N = [[-1, t], [0, 1]]``.

    ``U`` is the unitary ``[[0, 1], [-1, 0]]`` (``t = 0``) or
    ``[[0, 1], [-conj(t)/t, 0]]``.  The result equals ``theta_matrix(t, θ)``
    with the sign of its diagonal reversed, so it has the same determinant.
    """
    t = complex(t)
    N = np.array([[-1, t], [0, 1]])
    w = -1.0 if t == 0 else -t.conjugate() / t
    U = np.array([[0, 1], [w, 0]])
    return theta * N + (1 - theta) * (ctranspose(U) @ N @ U)


def singular_theta_combination(t):
    """Both ``theta`` roots and the corresponding singular matrices."""
    thetas = theta_pair(t)
    return thetas, tuple(theta_matrix(t, th) for th in thetas)


@dataclass(frozen=True)
class StructuredIsometry:
    k: int
    n: int
    m: int
    blocks_n: tuple
    blocks_m: tuple
    assembled: np.ndarray
    mode: CombineMode

    def block(self, j):
        return block_diag([self.blocks_n[j], self.blocks_m[j]])


def structured_isometry(blocks_n, blocks_m, mode=CombineMode.ISOMETRY, tol=EPS):
    """Interleave ``k`` pairs of blocks into a ``(n+m)k x (n+m)`` matrix.

    Rows ``j(n+m) .. j(n+m)+n`` carry ``blocks_n[j]`` in the first ``n``
    columns, the next ``m`` rows carry ``blocks_m[j]`` in the last ``m``.
    """
    blocks_n = [as_matrix(b) for b in blocks_n]
    blocks_m = [as_matrix(b) for b in blocks_m]
    if len(blocks_n) != len(blocks_m) or not blocks_n:
        raise ValueError("need the same positive number of n- and m-blocks")
    k = len(blocks_n)
    n = blocks_n[0].shape[1]
    m = blocks_m[0].shape[1]
    if any(b.shape != (n, n) for b in blocks_n) or any(b.shape != (m, m) for b in blocks_m):
        raise ValueError("blocks must be n x n and m x m")
    mode = CombineMode(mode)
    dtype = np.result_type(*blocks_n, *blocks_m)
    ups = np.zeros(((n + m) * k, n + m), dtype=dtype)
    for j in range(k):
        r = j * (n + m)
        ups[r:r + n, :n] = blocks_n[j]
        ups[r + n:r + n + m, n:] = blocks_m[j]
    check_gram(sum(ctranspose(b) @ b for b in blocks_n), mode, tol, "Upsilon_n")
    check_gram(sum(ctranspose(b) @ b for b in blocks_m), mode, tol, "Upsilon_m")
    return StructuredIsometry(k, n, m, tuple(blocks_n), tuple(blocks_m), ups, mode)


def structured_isometry_from_matrix(ups, n, m, mode=CombineMode.ISOMETRY, tol=EPS):
    """Split an assembled structured isometry back into its blocks.

    Raises if the matrix does not have the interleaved zero pattern.
    """
    ups = as_matrix(ups)
    rows, cols = ups.shape
    if cols != n + m or rows % (n + m):
        raise ValueError(f"expected a (n+m)k x (n+m) matrix with n={n}, m={m}")
    k = rows // (n + m)
    bn, bm = [], []
    scale = max(1.0, spectral_norm(ups))
    for j in range(k):
        r = j * (n + m)
        if (np.abs(ups[r:r + n, n:]).max(initial=0) > tol * scale
                or np.abs(ups[r + n:r + n + m, :n]).max(initial=0) > tol * scale):
            raise ValueError("matrix does not have the structured zero pattern")
        bn.append(ups[r:r + n, :n])
        bm.append(ups[r + n:r + n + m, n:])
    return structured_isometry(bn, bm, mode, tol)


def nm_matrix_convex_combine(mats, ups):
    """``sum_j diag(u_jn, u_jm)* R_j diag(u_jn, u_jm)`` for ``(n+m)``-square ``R_j``."""
    mats = [as_matrix(r, square=True) for r in mats]
    size = ups.n + ups.m
    if len(mats) != ups.k or any(r.shape != (size, size) for r in mats):
        raise ValueError(f"need {ups.k} matrices of size {size}")
    out = 0
    for j, r in enumerate(mats):
        d = ups.block(j)
        out = out + ctranspose(d) @ r @ d
    return out


class BallMembership(str, Enum):
    OPEN = "open"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def spectral_norm_ball_membership(a, alpha, tol=EPS):
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    gap = spectral_norm(a) - alpha
    if abs(gap) <= tol * max(1.0, alpha):
        return BallMembership.BOUNDARY
    return BallMembership.OPEN if gap < 0 else BallMembership.OUTSIDE


def random_L_I_member(n, rng, eps=1e-3):
    """``P + iH`` with ``P = G*G + eps I`` and ``H = (G' + G'*)/2`` from Gaussians."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    p = ctranspose(g) @ g + eps * np.eye(n)
    g2 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return p + 1j * (g2 + ctranspose(g2)) / 2
