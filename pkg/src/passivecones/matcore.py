"""Dense complex linear-algebra kernel.

Everything here works on plain ``numpy`` arrays.  Matrices are promoted to
``complex128`` only where the operation needs it; real input stays real
when the result is mathematically real (sign of a real matrix, exponential
of a real matrix).
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

EPS = 1e-9
"""Global relative tolerance (zero eigenvalues, singularity, Hermitian-ness)."""

SIGN_COND_LIMIT = 1e12
NEWTON_TOL = 1e-12
NEWTON_MAXITER = 100


class AxisEigenvalueError(ValueError):
    """Raised when a matrix has an eigenvalue on (or too near) the imaginary axis."""


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class PoleMarker:
    """Returned instead of a value when evaluating at (or next to) a pole."""

    at: complex


def as_matrix(a, square=False):
    a = np.asarray(a)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def ctranspose(a):
    return np.conj(np.swapaxes(a, -1, -2))


def spectral_norm(a):
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def zero_tol(m, tol=EPS):
    """Absolute threshold below which a spectral quantity of ``m`` is zero."""
    return tol * max(1.0, spectral_norm(m))


def is_hermitian(m, tol=EPS):
    m = as_matrix(m, square=True)
    return bool(np.linalg.norm(m - ctranspose(m), 2) <= zero_tol(m, tol))


@dataclass(frozen=True)
class HermitianSplit:
    """``A = P + iH`` with both ``P`` and ``H`` Hermitian."""

    P: np.ndarray
    H: np.ndarray

    def reassemble(self):
        return self.P + 1j * self.H


def hermitian_split(a):
    a = as_matrix(a, square=True)
    ah = ctranspose(a)
    P = (a + ah) / 2
    H = (a - ah) / 2j
    return HermitianSplit(P=P, H=H)


class Definiteness(str, Enum):
    POSITIVE_DEFINITE = "positive-definite"
    PSD_SINGULAR = "positive-semidefinite-singular"
    INDEFINITE = "indefinite"
    NSD_SINGULAR = "negative-semidefinite-singular"
    NEGATIVE_DEFINITE = "negative-definite"


@dataclass(frozen=True)
class DefinitenessVerdict:
    cls: Definiteness
    min_eig: float
    max_eig: float

    @property
    def is_pd(self):
        return self.cls is Definiteness.POSITIVE_DEFINITE

    @property
    def is_psd(self):
        return self.cls in (Definiteness.POSITIVE_DEFINITE, Definiteness.PSD_SINGULAR)

    @property
    def is_nd(self):
        return self.cls is Definiteness.NEGATIVE_DEFINITE


def definiteness(m, tol=EPS):
    """Classify a Hermitian matrix by the signs of its eigenvalues.

    An eigenvalue counts as zero when its magnitude is at most
    ``tol * max(1, ||m||_2)``.  The zero matrix is reported as
    positive-semidefinite-singular.
    """
    m = as_matrix(m, square=True)
    if m.shape[0] == 0:
        return DefinitenessVerdict(Definiteness.POSITIVE_DEFINITE, np.inf, -np.inf)
    thresh = zero_tol(m, tol)
    if np.linalg.norm(m - ctranspose(m), 2) > thresh:
        raise NotHermitianError("matrix is not Hermitian to tolerance")
    w = np.linalg.eigvalsh((m + ctranspose(m)) / 2)
    lo, hi = float(w[0]), float(w[-1])
    if lo > thresh:
        cls = Definiteness.POSITIVE_DEFINITE
    elif hi < -thresh:
        cls = Definiteness.NEGATIVE_DEFINITE
    elif lo >= -thresh:
        cls = Definiteness.PSD_SINGULAR
    elif hi <= thresh:
        cls = Definiteness.NSD_SINGULAR
    else:
        cls = Definiteness.INDEFINITE
    return DefinitenessVerdict(cls, lo, hi)


def _sign_newton(a):
    x = a.astype(complex)
    for _ in range(NEWTON_MAXITER):
        x_next = (x + np.linalg.inv(x)) / 2
        if np.linalg.norm(x_next - x, 2) <= NEWTON_TOL * max(1.0, np.linalg.norm(x_next, 2)):
            return x_next
        x = x_next
    raise np.linalg.LinAlgError("Newton sign iteration did not converge")


def sign_matrix(a, tol=EPS):
    """Matrix sign ``E`` of ``a``: ``E @ E = I``, ``E`` commutes with ``a``
    and ``a @ E`` has its spectrum in the open right half-plane.

    Computed from an eigendecomposition, each eigenvalue mapped to the sign
    of its real part.  If the eigenvector basis is too ill-conditioned the
    Newton iteration ``X <- (X + X^-1)/2`` is used instead.
    """
    a = as_matrix(a, square=True)
    n = a.shape[0]
    if n == 0:
        return a.copy()
    lam, V = np.linalg.eig(a)
    if np.any(np.abs(lam.real) <= zero_tol(a, tol)):
        raise AxisEigenvalueError("matrix has an eigenvalue on the imaginary axis")
    if np.linalg.cond(V) > SIGN_COND_LIMIT:
        E = _sign_newton(a)
    else:
        E = (V * np.sign(lam.real)) @ np.linalg.inv(V)
    if np.isrealobj(a):
        E = E.real
    return E


def matrix_exponential(a, t=1.0):
    """``exp(a t)`` via scaling-and-squaring Pade (scipy)."""
    a = as_matrix(a, square=True)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    return scipy.linalg.expm(a * t)


def random_isometry(k, n, seed):
    """A ``kn x n`` complex isometry from the QR factor of a seeded Gaussian."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((k * n, n)) + 1j * rng.standard_normal((k * n, n))
    q, r = np.linalg.qr(g)
    # fix the phase so the factor is unique
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_unitary(n, seed):
    return random_isometry(1, n, seed)


def smallest_singular_value(a):
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def is_singular(a, tol=EPS):
    """``sigma_min <= tol * sigma_max`` (the zero matrix is singular)."""
    s = np.linalg.svd(np.asarray(a), compute_uv=False)
    return bool(s[-1] <= tol * s[0]) if s[0] > 0 else True


def hermitian_sqrt(h):
    """Square root and inverse square root of a Hermitian positive-definite matrix."""
    w, U = np.linalg.eigh(h)
    if w[0] <= 0:
        raise ValueError("matrix is not positive definite")
    s = np.sqrt(w)
    return (U * s) @ ctranspose(U), (U / s) @ ctranspose(U)
