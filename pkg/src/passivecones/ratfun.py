"""Real rational functions, scalar and m x m, and positive-real checks.

A scalar function is a reduced ``num/den`` pair of ascending coefficient
arrays with a monic denominator.  Reduction cancels ``s^k`` factors exactly
and any other common factor by matching numerically computed roots, then
drops coefficients below ``COEF_CLEAN * max|c|``.

Matrix-valued functions are grids of scalar functions; inversion goes
through the adjugate and the determinant, which is fine for the small
sizes used here (m <= 4).
"""
from dataclasses import dataclass, field
from enum import Enum
from itertools import permutations

import numpy as np
import numpy.polynomial.polynomial as P
from numpy.polynomial import Polynomial

from .matcore import EPS, PoleMarker, ctranspose

COEF_CLEAN = 1e-12
ROOT_MATCH_TOL = 1e-4
CANCEL_RESIDUAL = 1e-10
POLE_TOL = 1e-7


class SingularFunctionError(ValueError):
    """Inversion of a function whose (determinant) is identically zero."""


def _clean(c):
    c = np.atleast_1d(np.asarray(c))
    if c.ndim != 1:
        raise ValueError("coefficients must be a 1-d sequence")
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite coefficient")
    scale = np.abs(c).max(initial=0.0)
    if scale == 0:
        return np.zeros(1)
    if np.iscomplexobj(c):
        if np.abs(c.imag).max() < COEF_CLEAN * scale:
            c = c.real
    c = np.where(np.abs(c) < COEF_CLEAN * scale, 0, c)
    c = np.trim_zeros(c, "b")
    return c.astype(complex) if np.iscomplexobj(c) else c.astype(float)


def _clusters(roots):
    """Group roots lying within ``ROOT_MATCH_TOL`` of each other.

    A multiple root comes back from the eigenvalue solver as a small ring of
    simple roots whose spread can reach ``eps**(1/k)``; their mean is far
    more accurate than any single member.  Returns ``[(mean, count)]``.
    """
    left = list(roots)
    out = []
    while left:
        r = left.pop(0)
        members = [r]
        rest = []
        for q in left:
            (members if abs(q - r) <= ROOT_MATCH_TOL * max(1.0, abs(r)) else rest).append(q)
        left = rest
        out.append([complex(np.mean(members)), len(members)])
    return out


def _cancel_common(num, den):
    """Divide out common roots (with multiplicity), located by cluster means.

    Candidate pairs are nearest clusters within ``ROOT_MATCH_TOL``.  Each
    cancellation is kept only if the function's values on a small circle
    around the root move by at most ``CANCEL_RESIDUAL`` relative, so a
    near-miss (a zero and a pole ``delta`` apart, or a mean that is off
    because of nearby roots) is left alone rather than smeared into the
    function.
    """
    cn, cd = _clusters(P.polyroots(num)), _clusters(P.polyroots(den))
    num0, den0 = num, den
    num, den = num.astype(complex), den.astype(complex)
    for r, kn in cn:
        if not cd:
            break
        dist = [abs(q - r) for q, _ in cd]
        j = int(np.argmin(dist))
        if dist[j] > ROOT_MATCH_TOL * max(1.0, abs(r)):
            continue
        q, kd = cd[j]
        rr = (r * kn + q * kd) / (kn + kd)
        k = min(kn, kd)
        n_try = _deflate(num, [rr] * k)
        d_try = _deflate(den, [rr] * k)
        pts = rr + 0.1 * max(1.0, abs(rr)) * np.exp(2j * np.pi * (np.arange(8) + 0.5) / 8)
        ref = P.polyval(pts, num0) / P.polyval(pts, den0)
        new = P.polyval(pts, n_try) / P.polyval(pts, d_try)
        if np.all(np.abs(new - ref) <= CANCEL_RESIDUAL * np.maximum(np.abs(ref), 1e-300)):
            num, den = n_try, d_try
            if kd == k:
                cd.pop(j)
            else:
                cd[j][1] -= k
    return num, den


def _deflate(c, roots):
    for r in roots:
        c, _ = P.polydiv(c, np.array([-r, 1.0]))
    return c


def _reduce(num, den):
    num, den = _clean(num), _clean(den)
    if not den.any():
        raise ZeroDivisionError("zero denominator")
    if not num.any():
        return np.zeros(1), np.ones(1)
    # exact cancellation of common powers of s
    k = min(np.flatnonzero(num)[0], np.flatnonzero(den)[0])
    num, den = num[k:], den[k:]
    if len(num) > 1 and len(den) > 1:
        real = not (np.iscomplexobj(num) or np.iscomplexobj(den))
        num, den = _cancel_common(num, den)
        if real:
            num, den = num.real, den.real
    lead = den[-1]
    return _clean(num / lead), _clean(den / lead)


def _polyval_pair(c, s):
    """Evaluate ``c`` at points ``s`` as ``(value, magnitude scale)``.

    Points with ``|s| > 1`` are evaluated on the reversed polynomial in
    ``1/s`` and the result is returned relative to ``s**deg``; the caller
    combines the powers.
    """
    s = np.asarray(s, dtype=complex)
    big = np.abs(s) > 1
    z = np.where(big, 1 / np.where(big, s, 1), s)
    ca = np.abs(c)
    val_small = P.polyval(z, c)
    val_big = P.polyval(z, c[::-1])
    mag_small = P.polyval(np.abs(z), ca)
    mag_big = P.polyval(np.abs(z), ca[::-1])
    return np.where(big, val_big, val_small), np.where(big, mag_big, mag_small), big


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """Scalar ``num(s)/den(s)``; construct via :func:`ratio` to get a reduced form."""

    num: np.ndarray
    den: np.ndarray

    @property
    def numerator(self):
        return Polynomial(self.num)

    @property
    def denominator(self):
        return Polynomial(self.den)

    @property
    def degrees(self):
        return len(self.num) - 1, len(self.den) - 1

    @property
    def is_zero(self):
        return not self.num.any()

    @property
    def is_real(self):
        return not (np.iscomplexobj(self.num) or np.iscomplexobj(self.den))

    def poles(self):
        return P.polyroots(self.den) if len(self.den) > 1 else np.zeros(0, complex)

    def zeros(self):
        return P.polyroots(self.num) if len(self.num) > 1 else np.zeros(0, complex)

    def evaluate(self, s, tol=EPS):
        """Vectorised evaluation; returns ``(values, pole_mask)``."""
        s = np.asarray(s, dtype=complex)
        nv, _, big = _polyval_pair(self.num, s)
        dv, dmag, _ = _polyval_pair(self.den, s)
        pole = np.abs(dv) <= tol * dmag
        dn, dd = self.degrees
        with np.errstate(divide="ignore", invalid="ignore"):
            val = nv / np.where(pole, 1, dv)
            val = np.where(big, val * s ** (dn - dd), val)
        return np.where(pole, np.nan, val), pole

    def __call__(self, s, tol=EPS):
        val, pole = self.evaluate(np.array([s]), tol)
        return PoleMarker(complex(s)) if pole[0] else complex(val[0])

    def __add__(self, other):
        other = as_rf(other)
        if len(self.den) == len(other.den) and np.array_equal(self.den, other.den):
            return ratio(P.polyadd(self.num, other.num), self.den)
        num = P.polyadd(P.polymul(self.num, other.den), P.polymul(other.num, self.den))
        return ratio(num, P.polymul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-as_rf(other))

    def __rsub__(self, other):
        return as_rf(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return ratio(self.num * other, self.den)
        other = as_rf(other)
        return ratio(P.polymul(self.num, other.num), P.polymul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero:
            raise SingularFunctionError("cannot invert the zero function")
        return ratio(self.den, self.num)

    def __truediv__(self, other):
        return self * as_rf(other).inverse()

    def allclose(self, other, rtol=1e-9):
        """Coefficient-wise comparison of reduced forms (relative to the largest coefficient)."""
        other = as_rf(other)
        for a, b in ((self.num, other.num), (self.den, other.den)):
            if len(a) != len(b):
                return False
            scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
            if np.abs(a - b).max() > rtol * scale:
                return False
        return True

    def __repr__(self):
        return f"RationalFunction(num={self.num.tolist()}, den={self.den.tolist()})"


def ratio(num, den=(1.0,)):
    n, d = _reduce(num, den)
    return RationalFunction(n, d)


def as_rf(x):
    if isinstance(x, RationalFunction):
        return x
    if np.isscalar(x):
        return ratio([x])
    if isinstance(x, RationalMatrixFunction) and x.m == 1:
        return x.entries[0][0]
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational function")


def constant(c):
    return ratio([c])


S = ratio([0.0, 1.0])
"""The identity function ``s``."""


def _det(rows):
    """Leibniz determinant of a small grid of scalar functions."""
    m = len(rows)
    if m == 1:
        return rows[0][0]
    if m == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = constant(0.0)
    for perm in permutations(range(m)):
        sign = np.linalg.det(np.eye(m)[list(perm)])
        term = constant(1.0)
        for i, j in enumerate(perm):
            if rows[i][j].is_zero:
                term = None
                break
            term = term * rows[i][j]
        if term is not None:
            total = total + term * float(round(sign))
    return total


@dataclass(frozen=True, eq=False)
class RationalMatrixFunction:
    """``m x m`` grid of scalar rational functions.

    ``realization`` optionally carries a state-space array producing the
    same function; it is informational and not kept in sync by the algebra.
    """

    entries: tuple
    realization: object = field(default=None, compare=False)

    def __post_init__(self):
        m = len(self.entries)
        if m == 0 or any(len(row) != m for row in self.entries):
            raise ValueError("entries must form a non-empty square grid")

    @property
    def m(self):
        return len(self.entries)

    @property
    def is_real(self):
        return all(e.is_real for row in self.entries for e in row)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def is_diagonal(self):
        return all(self.entries[i][j].is_zero
                   for i in range(self.m) for j in range(self.m) if i != j)

    def evaluate(self, s, tol=EPS):
        """Values at points ``s`` with shape ``(len(s), m, m)`` and a pole mask."""
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        out = np.empty((len(s), self.m, self.m), dtype=complex)
        pole = np.zeros(len(s), dtype=bool)
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                v, p = e.evaluate(s, tol)
                out[:, i, j] = v
                pole |= p
        return out, pole

    def __call__(self, s, tol=EPS):
        val, pole = self.evaluate(np.array([s]), tol)
        return PoleMarker(complex(s)) if pole[0] else val[0]

    def _map2(self, other, op):
        other = as_rmf(other, self.m)
        if other.m != self.m:
            raise ValueError("size mismatch")
        return RationalMatrixFunction(tuple(
            tuple(op(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)))

    def __add__(self, other):
        return self._map2(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._map2(other, lambda a, b: a - b)

    def __neg__(self):
        return RationalMatrixFunction(tuple(tuple(-e for e in row) for row in self.entries))

    def __mul__(self, c):
        if not np.isscalar(c):
            raise TypeError("use @ for matrix products")
        return RationalMatrixFunction(tuple(tuple(e * c for e in row) for row in self.entries))

    __rmul__ = __mul__

    def __matmul__(self, other):
        other = as_rmf(other, self.m)
        m = self.m
        rows = []
        for i in range(m):
            row = []
            for j in range(m):
                acc = constant(0.0)
                for k in range(m):
                    if not (self.entries[i][k].is_zero or other.entries[k][j].is_zero):
                        acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return RationalMatrixFunction(tuple(rows))

    def determinant(self):
        return _det(self.entries)

    def inverse(self):
        m = self.m
        if self.is_diagonal:
            return RationalMatrixFunction(tuple(
                tuple(self.entries[i][i].inverse() if i == j else constant(0.0) for j in range(m))
                for i in range(m)))
        det = self.determinant()
        if det.is_zero:
            raise SingularFunctionError("determinant is identically zero")
        inv_det = det.inverse()
        rows = []
        for i in range(m):
            row = []
            for j in range(m):
                minor = [[self.entries[r][c] for c in range(m) if c != i]
                         for r in range(m) if r != j]
                cof = _det(minor) * (-1.0) ** (i + j)
                row.append(cof * inv_det)
            rows.append(tuple(row))
        return RationalMatrixFunction(tuple(rows))

    def transpose(self):
        m = self.m
        return RationalMatrixFunction(tuple(tuple(self.entries[j][i] for j in range(m))
                                            for i in range(m)))

    def allclose(self, other, rtol=1e-9):
        other = as_rmf(other, self.m)
        return other.m == self.m and all(
            a.allclose(b, rtol) for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    def max_degree(self):
        return max(max(e.degrees) for row in self.entries for e in row)

    def __repr__(self):
        return f"RationalMatrixFunction(m={self.m}, entries={list(map(list, self.entries))})"


def as_rmf(x, m=1):
    if isinstance(x, RationalMatrixFunction):
        return x
    if isinstance(x, RationalFunction):
        return RationalMatrixFunction(((x,),))
    if np.isscalar(x):
        return identity(m) * float(x) if np.isrealobj(x) else identity(m) * x
    arr = np.asarray(x)
    if arr.ndim == 2:
        return RationalMatrixFunction(tuple(tuple(constant(v) for v in row) for row in arr))
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational matrix function")


def scalar(num, den=(1.0,)):
    return RationalMatrixFunction(((ratio(num, den),),))


def diag(fs):
    fs = [as_rf(f) for f in fs]
    m = len(fs)
    return RationalMatrixFunction(tuple(
        tuple(fs[i] if i == j else constant(0.0) for j in range(m)) for i in range(m)))


def identity(m):
    return diag([constant(1.0)] * m)


def block(blocks):
    """Assemble a square function from a square grid of equally sized blocks."""
    out = []
    for brow in blocks:
        brow = [as_rmf(b) for b in brow]
        for i in range(brow[0].m):
            out.append(tuple(e for b in brow for e in b.entries[i]))
    return RationalMatrixFunction(tuple(out))


def sub_block(F, i, j, size):
    return RationalMatrixFunction(tuple(
        tuple(F.entries[r][c] for c in range(j * size, (j + 1) * size))
        for r in range(i * size, (i + 1) * size)))


# operations named after the algebra they implement

def rf_eval(F, s, tol=EPS):
    return as_rmf(F)(s, tol)


def rf_add(F, G):
    return as_rmf(F) + as_rmf(G)


def rf_scale(c, F, cic=False):
    if cic and not c > 0:
        raise ValueError("cone scaling requires a positive factor")
    return as_rmf(F) * c


def rf_invert(F):
    return as_rmf(F).inverse()


def phi(X, Y):
    """``(X^-1 + Y)^-1`` for numbers, matrices or rational (matrix) functions."""
    if isinstance(X, (RationalFunction, RationalMatrixFunction)) or isinstance(
            Y, (RationalFunction, RationalMatrixFunction)):
        m = X.m if isinstance(X, RationalMatrixFunction) else (
            Y.m if isinstance(Y, RationalMatrixFunction) else 1)
        X, Y = as_rmf(X, m), as_rmf(Y, m)
        return (X.inverse() + Y).inverse()
    if np.isscalar(X) and np.isscalar(Y):
        return 1 / (1 / X + Y)
    X, Y = np.asarray(X), np.asarray(Y)
    return np.linalg.inv(np.linalg.inv(X) + Y)


# ---------------------------------------------------------------- cic trees

@dataclass(frozen=True)
class Generator:
    name: str  # "f" (1/s) or "g" (constant 1)

    def __post_init__(self):
        if self.name not in ("f", "g"):
            raise ValueError("generator must be 'f' or 'g'")

    def __str__(self):
        return self.name


@dataclass(frozen=True, eq=False)
class Leaf:
    function: RationalMatrixFunction

    def __str__(self):
        return "leaf"


@dataclass(frozen=True)
class Scale:
    factor: float
    child: object

    def __post_init__(self):
        if not self.factor > 0:
            raise ValueError("scale factors must be strictly positive")

    def __str__(self):
        return f"{self.factor:.6g}*{self.child}"


@dataclass(frozen=True)
class Sum:
    children: tuple

    def __str__(self):
        return "(" + " + ".join(map(str, self.children)) + ")"


@dataclass(frozen=True)
class Inverse:
    child: object

    def __str__(self):
        return f"inv({self.child})"


def tree_depth(e):
    if isinstance(e, (Generator, Leaf)):
        return 0
    if isinstance(e, Sum):
        return 1 + max(tree_depth(c) for c in e.children)
    return 1 + tree_depth(e.child)


def tree_to_json(e):
    if isinstance(e, Generator):
        return {"gen": e.name}
    if isinstance(e, Scale):
        return {"scale": e.factor, "child": tree_to_json(e.child)}
    if isinstance(e, Sum):
        return {"sum": [tree_to_json(c) for c in e.children]}
    if isinstance(e, Inverse):
        return {"inverse": tree_to_json(e.child)}
    raise TypeError("leaf nodes carry a function and are not serialised")


def cic_eval(e, m=1):
    """Fold a cic expression; ``f`` maps to ``I/s`` and ``g`` to ``I`` (size ``m``)."""
    if isinstance(e, Generator):
        unit = ratio([1.0], [0.0, 1.0]) if e.name == "f" else constant(1.0)
        return diag([unit] * m)
    if isinstance(e, Leaf):
        return e.function
    if isinstance(e, Scale):
        return cic_eval(e.child, m) * e.factor
    if isinstance(e, Sum):
        out = cic_eval(e.children[0], m)
        for c in e.children[1:]:
            out = out + cic_eval(c, m)
        return out
    if isinstance(e, Inverse):
        return cic_eval(e.child, m).inverse()
    raise TypeError(f"not a cic expression: {e!r}")


_NODE_P = {"leaf": 0.15, "scale": 0.25, "inverse": 0.25, "sum": 0.35}


def cic_sample(depth, seed, m=1):
    """Seeded random cic expression of depth at most ``depth``.

    ``m`` is accepted for symmetry with :func:`cic_eval` (trees do not
    depend on the size).  Scale factors are log-uniform on ``[1e-2, 1e2]``.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    rng = np.random.default_rng(seed)
    kinds = list(_NODE_P)
    probs = np.array(list(_NODE_P.values()))

    def grow(d):
        if d == 0:
            return Generator("f" if rng.random() < 0.5 else "g")
        kind = kinds[rng.choice(len(kinds), p=probs)]
        if kind == "leaf":
            return Generator("f" if rng.random() < 0.5 else "g")
        if kind == "scale":
            return Scale(float(10 ** rng.uniform(-2, 2)), grow(d - 1))
        if kind == "inverse":
            return Inverse(grow(d - 1))
        return Sum((grow(d - 1), grow(d - 1)))

    return grow(depth)


# -------------------------------------------------------------- PR checks

class FailureReason(str, Enum):
    RHP_POLE = "rhp-pole"
    HERMITIAN_INDEFINITE = "hermitian-part-indefinite"
    NOT_REAL = "not-real-on-reals"


@dataclass(frozen=True)
class PRFailure:
    location: complex
    reason: FailureReason
    value: float = 0.0  # offending real part / eigenvalue


@dataclass(frozen=True)
class GridSpec:
    n_omega: int = 200
    omega_min: float = 1e-4
    omega_max: float = 1e4
    n_re: int = 20
    re_min: float = 1e-3
    re_max: float = 1e3
    n_im: int = 20
    im_max: float = 1e3

    @classmethod
    def parse(cls, text):
        """``"n_omega=400,n_re=30"`` style overrides."""
        if not text:
            return cls()
        kw = {}
        for part in text.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            if key not in cls.__dataclass_fields__:
                raise ValueError(f"unknown grid field {key!r}")
            kw[key] = int(val) if key.startswith("n_") else float(val)
        return cls(**kw)

    def boundary(self):
        w = np.logspace(np.log10(self.omega_min), np.log10(self.omega_max), self.n_omega)
        return 1j * np.concatenate([[0.0], w])

    def interior(self):
        re = np.logspace(np.log10(self.re_min), np.log10(self.re_max), self.n_re)
        half = self.n_im // 2
        im_pos = np.logspace(-3, np.log10(self.im_max), half)
        im = np.concatenate([-im_pos[::-1], im_pos])
        if self.n_im % 2:
            im = np.concatenate([im, [0.0]])
        return (re[:, None] + 1j * im[None, :]).ravel()


@dataclass(frozen=True)
class PRVerdict:
    is_pr: bool
    failures: tuple
    skipped: tuple = ()


def rhp_poles(F, pole_tol=POLE_TOL):
    found = []
    for row in as_rmf(F).entries:
        for e in row:
            for p in e.poles():
                if p.real > pole_tol * max(1.0, abs(p)):
                    found.append(complex(p))
    return found


def _hermitian_min_eigs(vals):
    herm = (vals + ctranspose(vals)) / 2
    lam = np.linalg.eigvalsh(herm)[:, 0]
    scale = np.maximum(1.0, np.linalg.norm(vals, ord=2, axis=(1, 2)))
    return lam, scale


def pr_check(F, grid=None, tol=EPS, pole_tol=POLE_TOL):
    """Sampling-based positive-realness test with exact pole exclusion.

    1. no pole of any entry in the open right half-plane;
    2. Hermitian part of ``F(iw)`` positive semidefinite on a log grid of
       ``w`` (points next to an imaginary-axis pole are skipped and listed);
    3. the same on a grid inside the right half-plane.
    Realness of the coefficients is checked first.
    """
    F = as_rmf(F)
    grid = grid or GridSpec()
    failures = []
    if not F.is_real:
        failures.append(PRFailure(0j, FailureReason.NOT_REAL))
    for p in rhp_poles(F, pole_tol):
        failures.append(PRFailure(p, FailureReason.RHP_POLE, p.real))

    poles = np.concatenate([e.poles() for row in F.entries for e in row] or [np.zeros(0)])
    skipped = []
    for pts in (grid.boundary(), grid.interior()):
        if len(poles):
            d = np.abs(pts[:, None] - poles[None, :])
            near = np.any(d <= 1e-6 * np.maximum(1.0, np.abs(poles))[None, :], axis=1)
        else:
            near = np.zeros(len(pts), dtype=bool)
        vals, at_pole = F.evaluate(pts, tol)
        near |= at_pole
        skipped.extend(complex(p) for p in pts[near])
        ok = ~near
        if not ok.any():
            continue
        lam, scale = _hermitian_min_eigs(vals[ok])
        for s, l in zip(pts[ok][lam < -tol * scale], lam[lam < -tol * scale]):
            failures.append(PRFailure(complex(s), FailureReason.HERMITIAN_INDEFINITE, float(l)))
    return PRVerdict(is_pr=not failures, failures=tuple(failures), skipped=tuple(skipped))


# ---------------------------------------------------------- circuits

def ladder_impedance(spec):
    """Driving-point impedance of one of two small passive networks.

    ``{"topology": "fig2", "values": {"R1", "R2", "C"}}``: ``R1`` in series with
    ``R2 || C``, i.e. ``R1 + (1/C)/(s + 1/(R2 C))``.

    ``{"topology": "fig3", "values": {"Ca", "Lb", "Lc", "Cd"}}``: three parallel
    branches (``Ca`` in series with ``Lb``; ``Lc``; ``Cd``), i.e.
    ``(((s Ca)^-1 + s Lb)^-1 + (s Lc)^-1 + s Cd)^-1``.
    """
    topo = spec.get("topology")
    vals = spec.get("values", {})
    need = {"fig2": ("R1", "R2", "C"), "fig3": ("Ca", "Lb", "Lc", "Cd")}
    if topo not in need:
        raise ValueError(f"unknown topology {topo!r}")
    missing = [k for k in need[topo] if k not in vals]
    if missing:
        raise ValueError(f"missing element values: {missing}")
    for k in need[topo]:
        if not float(vals[k]) > 0:
            raise ValueError(f"element {k} must be positive")
    v = {k: float(vals[k]) for k in need[topo]}
    if topo == "fig2":
        admittance = constant(1 / v["R2"]) + S * v["C"]
        return as_rmf(constant(v["R1"]) + admittance.inverse())
    branch_ab = ((S * v["Ca"]).inverse() + S * v["Lb"]).inverse()
    total = branch_ab + (S * v["Lc"]).inverse() + S * v["Cd"]
    return as_rmf(total.inverse())


def feedback_network(Fa, Fb, Fc, Fd):
    """``2m x 2m`` transfer of the two-loop feedback network.

    With ``Fc^ = Fc^-1 + Fd`` and ``Fa^ = Fa^-1 + Fb`` the blocks are
    ``[[S, -S Fa^-1], [Fa^-1 S, (Fc^-1 + Fa)^-1]]`` where ``S = (Fc^ + Fa^-1)^-1``.
    """
    Fa, Fb, Fc, Fd = (as_rmf(x) for x in (Fa, Fb, Fc, Fd))
    fc_hat = Fc.inverse() + Fd
    fa_hat = Fa.inverse() + Fb
    fa_hat_inv = fa_hat.inverse()
    s = (fc_hat + fa_hat_inv).inverse()
    lower_right = (fc_hat.inverse() + fa_hat).inverse()
    return block([[s, -(s @ fa_hat_inv)], [fa_hat_inv @ s, lower_right]])


def maximality_counterexample(G, s0, a, b, tol=1e-6):
    """``(G + aI + b^2 (G + aI)^-1)^-1``, which has a pole at ``s0``.

    Requires ``G`` without right half-plane poles and ``G(s0)`` having the
    eigenvalue ``-a + ib`` with ``a > 0``.
    """
    G = as_rmf(G)
    s0 = complex(s0)
    if not a > 0:
        raise ValueError("a must be positive")
    if s0.real <= 0:
        raise ValueError("s0 must lie in the open right half-plane")
    if rhp_poles(G):
        raise ValueError("G must be analytic in the right half-plane")
    g0 = G(s0)
    if isinstance(g0, PoleMarker):
        raise ValueError("G has a pole at s0")
    target = complex(-a, b)
    lam = np.linalg.eigvals(g0)
    if np.min(np.abs(lam - target)) > tol * max(1.0, abs(target)):
        raise ValueError(f"G(s0) has no eigenvalue {target}")
    shifted = G + identity(G.m) * float(a)
    try:
        pre = shifted + shifted.inverse() * float(b) ** 2 if b else shifted
        out = pre.inverse()
    except SingularFunctionError as exc:
        raise ValueError("degenerate: G + aI is identically singular") from exc
    pv = pre(s0)
    if not isinstance(pv, PoleMarker):
        sv = np.linalg.svd(pv, compute_uv=False)
        if sv[-1] > tol * max(1.0, sv[0]):
            raise ValueError("pre-inverse is not singular at s0")
    return out
