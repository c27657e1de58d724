"""Realization arrays ``R = [A B; C D]`` used both as arrays and as matrices.

As an array, ``R`` encodes ``F(s) = C (sI - A)^-1 B + D``.  As an
``(n+m) x (n+m)`` matrix it can be scaled, summed, inverted and compressed
like any other matrix; the KYP residual
``Q = diag(-H, I) R + R* diag(-H, I)`` ties the two faces together.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.signal

from . import cones
from .matcore import (
    EPS,
    DefinitenessVerdict,
    PoleMarker,
    as_matrix,
    ctranspose,
    definiteness,
    hermitian_sqrt,
    is_hermitian,
    is_singular,
    spectral_norm,
)
from .ratfun import RationalMatrixFunction, ratio


@dataclass(frozen=True, eq=False)
class RealizationArray:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        n, m = self.A.shape[0], self.D.shape[0]
        shapes = {"A": (n, n), "B": (n, m), "C": (m, n), "D": (m, m)}
        for name, shape in shapes.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"block {name} has shape {getattr(self, name).shape}, expected {shape}")

    @classmethod
    def from_blocks(cls, A, B, C, D):
        D = np.atleast_2d(np.asarray(D))
        m = D.shape[0]
        A = np.asarray(A)
        n = int(round(np.sqrt(A.size)))
        return cls(A.reshape(n, n), np.asarray(B).reshape(n, m), np.asarray(C).reshape(m, n), D)

    @classmethod
    def from_matrix(cls, M, n, m):
        M = as_matrix(M, square=True)
        if M.shape[0] != n + m:
            raise ValueError(f"matrix is {M.shape[0]}-square, expected n+m = {n + m}")
        return cls(M[:n, :n].copy(), M[:n, n:].copy(), M[n:, :n].copy(), M[n:, n:].copy())

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.D.shape[0]

    @property
    def matrix(self):
        return np.block([[self.A, self.B], [self.C, self.D]])

    def to_rational(self):
        """Transfer function as a rational matrix function (via ``scipy.signal.ss2tf``)."""
        n, m = self.n, self.m
        if n == 0:
            return RationalMatrixFunction(tuple(tuple(ratio([self.D[i, j]]) for j in range(m))
                                                for i in range(m)), realization=self)
        cols = []
        for j in range(m):
            num, den = scipy.signal.ss2tf(self.A, self.B, self.C, self.D, input=j)
            # ss2tf returns descending coefficients
            cols.append([ratio(num[i][::-1], den[::-1]) for i in range(m)])
        return RationalMatrixFunction(tuple(tuple(cols[j][i] for j in range(m)) for i in range(m)),
                                      realization=self)


def R_f():
    """Realization of ``1/s``."""
    return RealizationArray.from_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]), 1, 1)


def R_g():
    """Realization of the constant ``1``."""
    return RealizationArray.from_matrix(np.array([[0.0, 0.0], [0.0, 1.0]]), 1, 1)


def R_h(a, b, d):
    """Realization ``[-a sqrt(b); sqrt(b) d]`` of ``b/(s+a) + d``."""
    rb = np.sqrt(b)
    return RealizationArray.from_matrix(np.array([[-a, rb], [rb, d]]), 1, 1)


def transfer_eval(R, s, tol=EPS):
    s = complex(s)
    if R.n == 0:
        return R.D.astype(complex)
    pencil = s * np.eye(R.n) - R.A
    if is_singular(pencil, tol):
        return PoleMarker(s)
    return R.C @ np.linalg.solve(pencil, R.B) + R.D


def realization_matrix_op(Rs, op, factor=None):
    """Scale, sum or invert realizations through their matrix face."""
    Rs = list(Rs)
    if not Rs:
        raise ValueError("need at least one realization")
    n, m = Rs[0].n, Rs[0].m
    if any((r.n, r.m) != (n, m) for r in Rs):
        raise ValueError("realizations must share (n, m)")
    if op == "scale":
        if len(Rs) != 1 or factor is None or not factor > 0:
            raise ValueError("scale takes one realization and a positive factor")
        M = factor * Rs[0].matrix
    elif op == "sum":
        M = sum(r.matrix for r in Rs)
    elif op == "invert":
        if len(Rs) != 1:
            raise ValueError("invert takes one realization")
        if is_singular(Rs[0].matrix):
            raise ValueError("matrix view is singular")
        M = np.linalg.inv(Rs[0].matrix)
    else:
        raise ValueError(f"unknown op {op!r}")
    return RealizationArray.from_matrix(M, n, m)


@dataclass(frozen=True)
class KypCertificate:
    H: np.ndarray
    Q: np.ndarray
    verdict: DefinitenessVerdict
    H_verdict: DefinitenessVerdict

    @property
    def valid(self):
        return self.verdict.is_psd and self.H_verdict.is_pd


def kyp_residual(R, H):
    """``diag(-H, I) R + R* diag(-H, I)``."""
    J = cones.block_diag([-np.asarray(H), np.eye(R.m)])
    X = J @ R.matrix
    return X + ctranspose(X)


def kyp_verify(R, H, tol=EPS):
    H = as_matrix(H, square=True) if R.n else np.zeros((0, 0))
    if H.shape != (R.n, R.n):
        raise ValueError(f"H must be {R.n}x{R.n}")
    if R.n and not is_hermitian(H, tol):
        raise ValueError("H must be Hermitian")
    hv = definiteness(H, tol)
    if not hv.is_pd:
        raise ValueError("H must be positive definite")
    Q = kyp_residual(R, H)
    return KypCertificate(H=H, Q=Q, verdict=definiteness(Q, tol), H_verdict=hv)


@dataclass(frozen=True)
class KypSearchResult:
    feasible: bool
    certificate: KypCertificate | None
    iterations: int
    residuals: tuple
    reason: str


def _hermitian_basis(n):
    basis = []
    for i in range(n):
        e = np.zeros((n, n), complex)
        e[i, i] = 1
        basis.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            e = np.zeros((n, n), complex)
            e[i, j] = e[j, i] = 1
            basis.append(e)
            e = np.zeros((n, n), complex)
            e[i, j], e[j, i] = 1j, -1j
            basis.append(e)
    return basis


def _psd_part(Q, floor=0.0):
    """Clip the eigenvalues of ``Q`` at ``floor``; also return the distance to the PSD cone."""
    w, U = np.linalg.eigh(Q)
    return (U * np.maximum(w, floor)) @ ctranspose(U), float(np.linalg.norm(np.minimum(w, 0)))


KYP_STALL_WINDOW = 25
KYP_MARGINS = (1e-2, 1e-4, 1e-6, 0.0)


def kyp_search(R, max_iter=2000, tol=1e-9):
    """Look for ``H > 0`` making the KYP residual positive semidefinite.

    Alternating projections starting from ``H = I``: clip the residual's
    eigenvalues, refit ``H`` by linear least squares, then push ``H`` above
    a small multiple of ``tol``.  The clip level starts slightly positive
    (aiming inside the cone speeds up strictly feasible problems) and is
    lowered to zero each time the residual stalls, meaning its distance to
    the semidefinite cone drops by less than a relative ``tol`` over 25
    iterations.  A stall at clip level zero, or ``max_iter`` steps, ends the
    search as infeasible.
    """
    n = R.n
    if n == 0:
        cert = kyp_verify(R, np.zeros((0, 0)), tol)
        ok = cert.verdict.is_psd
        return KypSearchResult(ok, cert if ok else None, 0, (),
                               "static gain" if ok else "D + D* is not positive semidefinite")
    basis = _hermitian_basis(n)
    Q0 = kyp_residual(R, np.zeros((n, n)))
    # Q(H) = Q0 + sum_k h_k L(E_k) with L linear
    cols = [kyp_residual(R, E) - Q0 for E in basis]
    Lmat = np.stack([np.concatenate([c.real.ravel(), c.imag.ravel()]) for c in cols], axis=1)
    Lpinv = np.linalg.pinv(Lmat)
    real = np.isrealobj(R.matrix)
    H = np.eye(n)
    residuals = []
    phase, phase_start = 0, 0
    for it in range(max_iter):
        Q = kyp_residual(R, H)
        Q = (Q + ctranspose(Q)) / 2
        hv = definiteness(H, tol)
        qv = definiteness(Q, tol)
        scale = max(1.0, spectral_norm(Q))
        Qp, dist = _psd_part(Q, KYP_MARGINS[phase] * scale)
        residuals.append(dist)
        if hv.is_pd and qv.is_psd:
            return KypSearchResult(True, KypCertificate(H, Q, qv, hv), it, tuple(residuals),
                                   "certificate found")
        if it - phase_start >= KYP_STALL_WINDOW:
            old = residuals[-KYP_STALL_WINDOW - 1]
            if old - dist < tol * old:
                if phase == len(KYP_MARGINS) - 1:
                    return KypSearchResult(False, None, it, tuple(residuals), "residual stalled")
                phase, phase_start = phase + 1, it
        target = Qp - Q0
        h = Lpinv @ np.concatenate([target.real.ravel(), target.imag.ravel()])
        H = sum(hk * E for hk, E in zip(h, basis))
        w, U = np.linalg.eigh((H + ctranspose(H)) / 2)
        H = (U * np.maximum(w, 10 * tol * max(1.0, w[-1]))) @ ctranspose(U)
        if real:
            H = H.real
    return KypSearchResult(False, None, max_iter, tuple(residuals), "iteration limit")


def coordinate_change(R, H):
    """``diag(H^1/2, I) R diag(H^-1/2, I)``; the KYP test with ``H`` becomes the test with ``I``."""
    H = as_matrix(H, square=True)
    if not definiteness(H).is_pd:
        raise ValueError("H must be positive definite")
    root, inv_root = hermitian_sqrt(H)
    return RealizationArray(root @ R.A @ inv_root, root @ R.B, R.C @ inv_root, R.D.copy())


# ------------------------------------------------------------- balancing

LYAP_KRON_MAX = 30


def solve_lyapunov(A, Q):
    """Solve ``A X + X A* = Q``."""
    n = A.shape[0]
    if n > LYAP_KRON_MAX:
        return scipy.linalg.solve_continuous_lyapunov(A, Q)
    K = np.kron(A, np.eye(n)) + np.kron(np.eye(n), np.conj(A))
    X = np.linalg.solve(K, np.asarray(Q, dtype=K.dtype).ravel()).reshape(n, n)
    X = (X + ctranspose(X)) / 2
    return X.real if np.isrealobj(A) and np.isrealobj(Q) else X


def gramians(R):
    """Controllability and observability Gramians of a Hurwitz realization."""
    W = solve_lyapunov(R.A, -R.B @ ctranspose(R.B))
    M = solve_lyapunov(ctranspose(R.A), -ctranspose(R.C) @ R.C)
    return W, M


@dataclass(frozen=True)
class SignIterationTrace:
    H: tuple
    alpha: tuple
    gram_B: tuple
    gram_C: tuple
    converged: bool

    @property
    def steps(self):
        return len(self.H) - 1

    def distances(self):
        """``||H_j + I||_2`` along the trace."""
        n = self.H[0].shape[0]
        return np.array([spectral_norm(h + np.eye(n)) for h in self.H])

    def condition(self):
        """``max(||H_j||, ||H_j^-1||)`` along the trace."""
        return np.array([max(spectral_norm(h), spectral_norm(np.linalg.inv(h))) for h in self.H])


def sign_iteration(H, B, C, tol=1e-10, max_iter=500):
    """Drive a negative-definite ``H`` to ``-I`` by convex combinations with its inverse.

    Each step uses ``alpha = 1/(1 + max(||H||, ||H^-1||))`` and
    ``H <- alpha H + (1 - alpha) H^-1``.  The Gram matrices ``BB*`` and
    ``C*C`` are carried along so that, whenever ``H A* + A H = BB*`` and
    ``H A + A* H = C*C`` hold initially, the same identities hold for every
    iterate with the carried Grams.
    """
    H = as_matrix(H, square=True)
    if not definiteness(H).is_nd:
        raise ValueError("H must be negative definite")
    n = H.shape[0]
    B = np.asarray(B).reshape(n, -1)
    C = np.asarray(C).reshape(-1, n)
    GB, GC = B @ ctranspose(B), ctranspose(C) @ C
    Hs, alphas, GBs, GCs = [H], [], [GB], [GC]
    eye = np.eye(n)
    for _ in range(max_iter + 1):
        Hinv = np.linalg.inv(H)
        alpha = 1.0 / (1.0 + max(spectral_norm(H), spectral_norm(Hinv)))
        alphas.append(alpha)
        if spectral_norm(H + eye) <= tol:
            return SignIterationTrace(tuple(Hs), tuple(alphas), tuple(GBs), tuple(GCs), True)
        if len(Hs) > max_iter:
            break
        GB, GC = (alpha * GB + (1 - alpha) * Hinv @ GC @ Hinv,
                  alpha * GC + (1 - alpha) * Hinv @ GB @ Hinv)
        H = alpha * H + (1 - alpha) * Hinv
        H = (H + ctranspose(H)) / 2
        Hs.append(H)
        GBs.append(GB)
        GCs.append(GC)
    return SignIterationTrace(tuple(Hs), tuple(alphas), tuple(GBs), tuple(GCs), False)


@dataclass(frozen=True)
class BalancingResult:
    transform: np.ndarray
    balanced: RealizationArray
    gramian: np.ndarray
    iterations: SignIterationTrace | None = field(default=None)


def gramian_balance(R, tol=EPS, via_sign_iteration=False):
    """Square-root balancing of a Hurwitz, minimal realization.

    Returns the transform ``T`` (``x_bal = T x``), the balanced realization
    and the common diagonal Gramian.  With ``via_sign_iteration`` the
    sign iteration is also run on ``-gramian`` and the balanced ``B``, ``C``.
    """
    if R.n == 0:
        raise ValueError("nothing to balance")
    lam = np.linalg.eigvals(R.A)
    if np.max(lam.real) >= -tol * max(1.0, spectral_norm(R.A)):
        raise ValueError("A is not Hurwitz")
    W, M = gramians(R)
    for G, what in ((W, "controllability"), (M, "observability")):
        w = np.linalg.eigvalsh(G)
        if w[0] <= tol * w[-1]:
            raise ValueError(f"{what} Gramian is numerically singular")
    Lc = np.linalg.cholesky(W)
    Lo = np.linalg.cholesky(M)
    U, sig, Vh = np.linalg.svd(ctranspose(Lo) @ Lc)
    root = np.sqrt(sig)
    T = (ctranspose(U) @ ctranspose(Lo)) / root[:, None]
    Tinv = (Lc @ ctranspose(Vh)) / root[None, :]
    bal = RealizationArray(T @ R.A @ Tinv, T @ R.B, R.C @ Tinv, R.D.copy())
    trace = sign_iteration(-np.diag(sig), bal.B, bal.C) if via_sign_iteration else None
    return BalancingResult(transform=T, balanced=bal, gramian=np.diag(sig), iterations=trace)


def nm_realization_combine(Rs, ups):
    """Structured compression of realizations through their matrix face."""
    Rs = list(Rs)
    if any((r.n, r.m) != (ups.n, ups.m) for r in Rs):
        raise ValueError("realizations must match the isometry's (n, m)")
    M = cones.nm_matrix_convex_combine([r.matrix for r in Rs], ups)
    return RealizationArray.from_matrix(M, ups.n, ups.m)


def random_certified_realization(n, m, rng, real=True):
    """A realization with ``diag(-I, I) R + R* diag(-I, I)`` positive definite.

    ``R = diag(-I, I) X`` with ``X`` in the open cone ``L_I``.
    """
    k = n + m
    if real:
        g = rng.standard_normal((k, k))
        sk = rng.standard_normal((k, k))
        X = g.T @ g + 1e-3 * np.eye(k) + (sk - sk.T) / 2
    else:
        X = cones.random_L_I_member(k, rng)
    J = cones.block_diag([-np.eye(n), np.eye(m)])
    return RealizationArray.from_matrix(J @ X, n, m)
