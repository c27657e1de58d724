"""Switched linear systems ``dx/dt = A_{i(t)} x`` and their exponential envelopes.

A family sharing a Lyapunov factor (every ``A_i`` in ``L_H`` for one ``H``
with ``-H`` positive definite) decays at a uniform exponential rate no
matter how the active matrix is switched.  This module simulates such
systems under a few switching policies and checks the envelope
``||x(t)|| <= beta ||x(t0)|| exp(alpha (t0 - t))`` on every sampled pair.
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cones import membership_L_H
from .matcore import (
    EPS,
    as_matrix,
    ctranspose,
    definiteness,
    hermitian_sqrt,
    is_hermitian,
    matrix_exponential,
)

ENVELOPE_TOL = 1e-7


@dataclass(frozen=True)
class SwitchedSystem:
    matrices: tuple
    H: np.ndarray | None = None

    def __post_init__(self):
        mats = tuple(as_matrix(a, square=True) for a in self.matrices)
        if not mats:
            raise ValueError("the matrix family is empty")
        n = mats[0].shape[0]
        if any(a.shape != (n, n) for a in mats):
            raise ValueError("all matrices must share their size")
        object.__setattr__(self, "matrices", mats)
        if self.H is not None:
            h = as_matrix(self.H, square=True)
            if h.shape != (n, n):
                raise ValueError(f"H must be {n}x{n}")
            object.__setattr__(self, "H", h)

    @property
    def n(self):
        return self.matrices[0].shape[0]

    @property
    def is_complex(self):
        return any(np.iscomplexobj(a) for a in self.matrices)


@dataclass(frozen=True)
class QuadraticStabilityReport:
    contained: bool
    members: tuple


def _lyapunov_weight(H, tol=EPS):
    """``P = -H`` after checking that it is positive definite."""
    if H is None:
        raise ValueError("a common Lyapunov factor H is required")
    if not is_hermitian(H, tol):
        raise ValueError("H must be Hermitian")
    P = -(H + ctranspose(H)) / 2
    if not definiteness(P, tol).is_pd:
        raise ValueError("-H must be positive definite")
    return P


def check_quadratic_stability(sys, tol=EPS):
    """Membership of every ``A_i`` in ``L_H``; the family is contained iff all are."""
    _lyapunov_weight(sys.H, tol)
    members = tuple(membership_L_H(a, sys.H, tol) for a in sys.matrices)
    return QuadraticStabilityReport(all(m.in_open for m in members), members)


class PolicyKind(str, Enum):
    FIXED = "fixed"
    RANDOM = "random"
    GREEDY = "greedy"


@dataclass(frozen=True)
class SwitchingPolicy:
    """How the active matrix is chosen.

    ``fixed`` cycles through ``sequence`` holding each index for ``dwell``
    seconds.  ``random`` draws a uniform index and an exponential dwell time
    with mean ``dwell`` from a generator seeded with ``seed``.  ``greedy``
    re-decides every ``dwell`` seconds, picking the matrix whose Hermitian
    part makes ``||x||`` grow fastest at that instant.  ``dwell=None`` means
    ``10 dt`` for ``random`` and ``dt`` otherwise.
    """

    kind: PolicyKind = PolicyKind.FIXED
    sequence: tuple = (0,)
    dwell: float | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        object.__setattr__(self, "sequence", tuple(int(i) for i in self.sequence))
        if self.kind is PolicyKind.FIXED and not self.sequence:
            raise ValueError("fixed policy needs a non-empty sequence")
        if self.dwell is not None and not self.dwell > 0:
            raise ValueError("dwell must be positive")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    switch_schedule: tuple = field(default=())

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        x = np.asarray(self.states)
        if x.ndim != 2 or x.shape[0] != t.shape[0]:
            raise ValueError("need one state per sample time")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", x)

    @property
    def norms(self):
        return np.linalg.norm(self.states, axis=1)


def greedy_index(mats_herm, x):
    """``argmax_i x* (A_i + A_i*) x``; ties go to the lowest index."""
    rates = np.real(np.einsum("i,kij,j->k", np.conj(x), mats_herm, x))
    return int(np.argmax(rates))


def simulate(sys, policy, x0, horizon, dt):
    """Piecewise-constant switching with exact propagation ``x <- exp(A_i tau) x``.

    Samples are taken every ``dt`` seconds from 0 to ``horizon``.  Switches
    may fall between samples; each sub-interval is propagated exactly.
    ``switch_schedule`` lists ``((t_start, t_end), index)`` per segment.
    """
    if not dt > 0 or not horizon > 0:
        raise ValueError("dt and horizon must be positive")
    policy = policy if isinstance(policy, SwitchingPolicy) else SwitchingPolicy(policy)
    mats = sys.matrices
    k = len(mats)
    if any(not 0 <= i < k for i in policy.sequence):
        raise ValueError("policy index out of range")
    x = np.asarray(x0)
    if x.shape != (sys.n,):
        raise ValueError(f"x0 must have length {sys.n}")
    dtype = complex if (np.iscomplexobj(x) or sys.is_complex) else float
    x = x.astype(dtype)

    steps = int(round(horizon / dt))
    times = dt * np.arange(steps + 1)
    dwell = policy.dwell
    if dwell is None:
        dwell = 10 * dt if policy.kind is PolicyKind.RANDOM else dt
    rng = np.random.default_rng(policy.seed)
    herm = np.stack([a + ctranspose(a) for a in mats])

    full_step = {}

    def prop(i, tau):
        if tau == dt:
            if i not in full_step:
                full_step[i] = matrix_exponential(mats[i], dt)
            return full_step[i]
        return matrix_exponential(mats[i], tau)

    def choose(count, state):
        if policy.kind is PolicyKind.FIXED:
            return policy.sequence[count % len(policy.sequence)], dwell
        if policy.kind is PolicyKind.RANDOM:
            return int(rng.integers(k)), float(rng.exponential(dwell))
        return greedy_index(herm, state), dwell

    states = np.empty((steps + 1, sys.n), dtype=dtype)
    states[0] = x
    schedule = []
    count = 0
    active, hold = choose(count, x)
    seg_start, seg_end = 0.0, hold
    for j in range(steps):
        t, t_next = times[j], times[j + 1]
        # absorb switches that land within rounding of the next sample
        while seg_end < t_next - 1e-12 * max(1.0, t_next):
            x = prop(active, seg_end - t) @ x
            t = seg_end
            schedule.append(((seg_start, seg_end), active))
            count += 1
            active, hold = choose(count, x)
            seg_start, seg_end = t, t + hold
        x = prop(active, dt if t == times[j] else t_next - t) @ x
        states[j + 1] = x
        if seg_end <= t_next + 1e-12 * max(1.0, t_next) and j + 1 < steps:
            schedule.append(((seg_start, t_next), active))
            count += 1
            active, hold = choose(count, x)
            seg_start, seg_end = t_next, t_next + hold
    schedule.append(((seg_start, times[-1]), active))
    return Trajectory(times, states, tuple(schedule))


@dataclass(frozen=True)
class EnvelopeReport:
    alpha: float
    beta: float
    violations: tuple
    max_ratio: float
    tol: float = ENVELOPE_TOL


def envelope_constants(sys, tol=EPS):
    """Decay rate ``alpha`` and overshoot ``beta`` for the spectral-norm envelope.

    Without ``H`` (or with ``H = -cI``) this is ``alpha = min_i lambda_min(-(A_i + A_i*))/2``
    and ``beta = 1``.  For a general ``P = -H > 0`` the ``P``-weighted norm
    decays at ``alpha = min_i lambda_min(P^-1/2 (P A_i + A_i* P) P^-1/2)/(-2)``
    and converting back to the Euclidean norm costs ``beta = sqrt(cond P)``.
    """
    if sys.H is None:
        P = np.eye(sys.n)
    else:
        P = _lyapunov_weight(sys.H, tol)
    _, inv_root = hermitian_sqrt(P)
    rates = []
    for a in sys.matrices:
        x = P @ a
        s = inv_root @ (x + ctranspose(x)) @ inv_root
        rates.append(np.linalg.eigvalsh(-(s + ctranspose(s)) / 2)[0] / 2)
    w = np.linalg.eigvalsh(P)
    return float(min(rates)), float(np.sqrt(w[-1] / w[0]))


def verify_envelope(traj, sys, tol=ENVELOPE_TOL):
    """Check the envelope on every sampled pair ``t0 <= t`` in one pass.

    With ``g(t) = log||x(t)|| + alpha t`` the ratio for a pair is
    ``exp(g(t) - g(t0)) / beta``, so the worst ``t0`` for each ``t`` is the
    running minimiser of ``g``.  Each violating ``t`` is reported once,
    paired with that worst ``t0``.
    """
    alpha, beta = envelope_constants(sys)
    norms = traj.norms
    t = traj.times
    if norms[0] == 0:
        return EnvelopeReport(alpha, beta, (), 0.0, tol)
    with np.errstate(divide="ignore"):
        g = np.log(norms) + alpha * t
    ratio = np.exp(g - np.minimum.accumulate(g) - np.log(beta))
    bad = np.nonzero(ratio > 1 + tol)[0]
    violations = tuple((float(t[np.argmin(g[:j + 1])]), float(t[j])) for j in bad)
    return EnvelopeReport(alpha, beta, violations, float(ratio.max()), tol)
