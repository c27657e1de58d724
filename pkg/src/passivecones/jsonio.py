"""JSON and CSV formats shared by the command line and the scripts.

Floats are written with 17 significant digits so that every value
round-trips exactly; non-finite floats follow Python's ``json`` module
(``NaN``, ``Infinity``).
"""
import io
import json

import numpy as np

from .cones import ConeMembership
from .incsim import EnvelopeReport, SwitchedSystem, Trajectory
from .matcore import DefinitenessVerdict, as_matrix
from .ratfun import RationalFunction, RationalMatrixFunction, ratio
from .realize import KypCertificate, RealizationArray


class FormatError(ValueError):
    """Raised for JSON that does not match the expected schema."""


# ------------------------------------------------------------ serialisation

def _float(x):
    x = float(x)
    if np.isnan(x):
        return "NaN"
    if np.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if "." not in text and "e" not in text and "n" not in text:
        text += ".0"
    return text


def dumps(obj, indent=None):
    """``json.dumps`` replacement that prints floats with 17 significant digits."""
    return _dump(obj, indent, 0)


def _dump(obj, indent, level):
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = [(json.dumps(str(k)), v) for k, v in obj.items()]
        if not items:
            return "{}"
        if indent is None:
            return "{" + ", ".join(f"{k}: {_dump(v, None, 0)}" for k, v in items) + "}"
        pad = " " * (indent * (level + 1))
        body = ",\n".join(f"{pad}{k}: {_dump(v, indent, level + 1)}" for k, v in items)
        return "{\n" + body + "\n" + " " * (indent * level) + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # keep short numeric rows on one line
        if indent is None or all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_dump(v, None, 0) for v in obj) + "]"
        pad = " " * (indent * (level + 1))
        body = ",\n".join(pad + _dump(v, indent, level + 1) for v in obj)
        return "[\n" + body + "\n" + " " * (indent * level) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from exc


def _require(obj, keys, what):
    if not isinstance(obj, dict):
        raise FormatError(f"{what} must be a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise FormatError(f"{what} is missing {missing}")


# ---------------------------------------------------------------- matrices

def matrix_to_json(a):
    a = np.asarray(a)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    flat = a.ravel()
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]),
            "data": [[float(np.real(z)), float(np.imag(z))] for z in flat]}


def matrix_from_json(obj):
    """Parse ``{"rows", "cols", "data": [[re, im], ...]}``; bare numbers are real entries.

    The result is real when every imaginary part is zero.
    """
    _require(obj, ("rows", "cols", "data"), "matrix")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 0 or cols < 0:
        raise FormatError("rows and cols must be non-negative integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise FormatError(f"data must hold rows*cols = {rows * cols} entries")
    vals = []
    for z in data:
        if isinstance(z, (int, float)) and not isinstance(z, bool):
            vals.append(complex(z))
        elif isinstance(z, list) and len(z) == 2:
            vals.append(complex(float(z[0]), float(z[1])))
        else:
            raise FormatError(f"bad matrix entry {z!r}")
    a = np.array(vals, dtype=complex).reshape(rows, cols)
    if not np.all(np.isfinite(a)):
        raise FormatError("matrix has non-finite entries")
    return a.real.copy() if not np.any(a.imag) else a


# ------------------------------------------------------- rational functions

def rational_to_json(F):
    if isinstance(F, RationalFunction):
        F = RationalMatrixFunction(((F,),))
    return {"m": F.m,
            "entries": [[{"num": [float(c) for c in np.real(e.num)],
                          "den": [float(c) for c in np.real(e.den)]} for e in row]
                        for row in F.entries]}


def rational_from_json(obj):
    _require(obj, ("m", "entries"), "rational function")
    m, entries = obj["m"], obj["entries"]
    if not isinstance(m, int) or m < 1:
        raise FormatError("m must be a positive integer")
    if len(entries) != m or any(len(row) != m for row in entries):
        raise FormatError("entries must be an m x m grid")
    rows = []
    for row in entries:
        out = []
        for e in row:
            _require(e, ("num", "den"), "rational entry")
            try:
                out.append(ratio([float(c) for c in e["num"]], [float(c) for c in e["den"]]))
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise FormatError(f"bad rational entry: {exc}") from exc
        rows.append(tuple(out))
    return RationalMatrixFunction(tuple(rows))


# ------------------------------------------------------------ realizations

def realization_to_json(R):
    return {"n": R.n, "m": R.m, "A": matrix_to_json(R.A), "B": matrix_to_json(R.B),
            "C": matrix_to_json(R.C), "D": matrix_to_json(R.D)}


def realization_from_json(obj):
    _require(obj, ("n", "m", "A", "B", "C", "D"), "realization")
    blocks = {k: matrix_from_json(obj[k]) for k in "ABCD"}
    n, m = obj["n"], obj["m"]
    want = {"A": (n, n), "B": (n, m), "C": (m, n), "D": (m, m)}
    for k, shape in want.items():
        if blocks[k].shape != shape:
            raise FormatError(f"block {k} must be {shape}, got {blocks[k].shape}")
    try:
        return RealizationArray(**blocks)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


# ------------------------------------------------------------ certificates

def verdict_to_json(v: DefinitenessVerdict):
    return {"class": v.cls.value, "min_eig": v.min_eig, "max_eig": v.max_eig}


def membership_to_json(res: ConeMembership):
    out = {"in_open": res.in_open, "in_closed": res.in_closed, "min_eig": res.min_eig,
           "certificate": matrix_to_json(res.certificate)}
    if res.split is not None:
        out["P"] = matrix_to_json(res.split.P)
        out["H"] = matrix_to_json(res.split.H)
    return out


def certificate_to_json(cert: KypCertificate):
    return {"H": matrix_to_json(cert.H), "Q": matrix_to_json(cert.Q),
            "verdict": verdict_to_json(cert.verdict), "valid": cert.valid}


# ------------------------------------------------------- switched systems

def system_to_json(sys: SwitchedSystem):
    out = {"matrices": [matrix_to_json(a) for a in sys.matrices]}
    if sys.H is not None:
        out["H"] = matrix_to_json(sys.H)
    return out


def system_from_json(obj):
    _require(obj, ("matrices",), "switched system")
    mats = [matrix_from_json(a) for a in obj["matrices"]]
    H = matrix_from_json(obj["H"]) if obj.get("H") is not None else None
    try:
        return SwitchedSystem(tuple(mats), H)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def envelope_to_json(rep: EnvelopeReport):
    return {"alpha": rep.alpha, "beta": rep.beta, "max_ratio": rep.max_ratio,
            "tol": rep.tol, "violation_count": len(rep.violations),
            "violations": [list(p) for p in rep.violations]}


def vector_from_json(obj):
    """A state vector: a plain list of numbers or ``[re, im]`` pairs, or an ``n x 1`` matrix."""
    if isinstance(obj, dict):
        return as_matrix(matrix_from_json(obj)).ravel()
    if not isinstance(obj, list):
        raise FormatError("vector must be a list or a matrix object")
    return matrix_from_json({"rows": len(obj), "cols": 1, "data": obj}).ravel()


def trajectory_to_csv(traj: Trajectory):
    """Columns ``t, x_1_re, x_1_im, ..., norm``."""
    n = traj.states.shape[1]
    buf = io.StringIO()
    head = ["t"] + [f"x_{i + 1}_{part}" for i in range(n) for part in ("re", "im")] + ["norm"]
    buf.write(",".join(head) + "\n")
    for t, x, nrm in zip(traj.times, traj.states, traj.norms):
        row = [_float(t)]
        for z in x:
            row += [_float(np.real(z)), _float(np.imag(z))]
        row.append(_float(nrm))
        buf.write(",".join(row) + "\n")
    return buf.getvalue()
