"""Passive linear systems through maximal matrix-convex invertible cones.

Submodules
----------
matcore   dense complex linear algebra (Hermitian split, definiteness, sign)
cones     Lyapunov cones, maximality witnesses, matrix-convex combinations
ratfun    rational matrix functions, cic trees, positive-real checks
realize   realization arrays, KYP certificates, balancing
incsim    switched linear systems and exponential envelopes
jsonio    shared JSON / CSV formats
cli       command-line front end
"""
from . import cones, incsim, jsonio, matcore, ratfun, realize

__all__ = ["cones", "incsim", "jsonio", "matcore", "ratfun", "realize"]
__version__ = "0.1.0"
