"""Command-line front end.

Every command prints one JSON document ``{"status": ..., "payload": ...}``
to ``--out`` (stdout by default); human-readable diagnostics go to stderr.
``status`` is ``ok``, ``refuted`` (a mathematical property fails),
``infeasible`` (a search found nothing) or ``error``.  Only ``error``
gives a nonzero exit code.

File arguments take a path to a JSON file; an argument starting with ``{``
is parsed as inline JSON instead.
"""
import argparse
import functools
import sys
from dataclasses import dataclass, field

import numpy as np

from . import cones, incsim, jsonio, matcore, ratfun, realize
from .jsonio import FormatError

STATUSES = ("ok", "refuted", "infeasible", "error")


@dataclass
class CommandResult:
    status: str
    payload: object = None
    diagnostics: list = field(default_factory=list)
    # sim run writes its CSV here instead of the JSON document
    text: str | None = None

    @property
    def exit_code(self):
        return 1 if self.status == "error" else 0


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# ------------------------------------------------------------------ inputs

def _load(arg):
    if arg is None:
        return None
    text = arg
    if not arg.lstrip().startswith("{"):
        try:
            with open(arg) as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"cannot read {arg}: {exc.strerror}") from exc
    return jsonio.loads(text)


def _split(arg):
    """Comma-separated file list; inline JSON objects may not be mixed in."""
    if arg.lstrip().startswith("{") or arg.lstrip().startswith("["):
        obj = jsonio.loads(arg)
        return obj if isinstance(obj, list) else [obj]
    return [_load(p) for p in arg.split(",") if p]


def _matrix(arg):
    return jsonio.matrix_from_json(_load(arg))


def _complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise CliError(f"cannot parse complex number {text!r}") from exc


def _ints(text, count=None):
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise CliError(f"expected comma-separated integers, got {text!r}") from exc
    if count is not None and len(vals) != count:
        raise CliError(f"expected {count} integers, got {text!r}")
    return vals


# ---------------------------------------------------------------- commands

def cmd_cone_check(args):
    a = _matrix(args.matrix)
    if args.H is None:
        res = cones.membership_L_I(a, args.tol)
    else:
        res = cones.membership_L_H(a, _matrix(args.H), args.tol)
    status = "ok" if res.in_open else "refuted"
    return CommandResult(status, jsonio.membership_to_json(res),
                         [f"definiteness of the certificate: {res.verdict.cls.value}"])


def cmd_cone_witness(args):
    b = _matrix(args.matrix)
    try:
        w = cones.maximality_witness(b, args.tol)
    except cones.NoWitnessError as exc:
        return CommandResult("refuted", {"witness": None}, [str(exc)])
    return CommandResult("ok", {"alpha": w.alpha, "A": jsonio.matrix_to_json(w.A),
                                "sigma_min_sum": w.sigma_min_sum})


def cmd_cone_combine(args):
    mats = [jsonio.matrix_from_json(o) for o in _split(args.inputs)]
    ups = _matrix(args.isometry)
    if args.structured:
        n, m = _ints(args.structured, 2)
        sups = cones.structured_isometry_from_matrix(ups, n, m, args.mode, args.tol)
        out = cones.nm_matrix_convex_combine(mats, sups)
    else:
        out = cones.matrix_convex_combine(mats, ups, args.mode, args.tol)
    return CommandResult("ok", {"result": jsonio.matrix_to_json(out)})


def cmd_sign(args):
    a = _matrix(args.matrix)
    return CommandResult("ok", {"sign": jsonio.matrix_to_json(matcore.sign_matrix(a, args.tol))})


def _pr_payload(F, grid, tol):
    v = ratfun.pr_check(F, grid, tol)
    return v, {"is_pr": v.is_pr,
               "failures": [{"location": [f.location.real, f.location.imag],
                             "reason": f.reason.value, "value": f.value} for f in v.failures],
               "skipped": [[complex(s).real, complex(s).imag] for s in v.skipped]}


def cmd_pr_check(args):
    F = jsonio.rational_from_json(_load(args.function))
    v, payload = _pr_payload(F, ratfun.GridSpec.parse(args.grid), args.tol)
    return CommandResult("ok" if v.is_pr else "refuted", payload)


def cmd_pr_cic_sample(args):
    grid = ratfun.GridSpec.parse(args.grid)
    items, bad = [], 0
    for k in range(args.count):
        seed = args.seed + k
        tree = ratfun.cic_sample(args.depth, seed, args.m)
        F = ratfun.cic_eval(tree, args.m)
        v, pr = _pr_payload(F, grid, args.tol)
        bad += not v.is_pr
        items.append({"seed": seed, "depth": ratfun.tree_depth(tree),
                      "tree": ratfun.tree_to_json(tree), "degree": F.max_degree(),
                      "function": jsonio.rational_to_json(F), "pr": pr})
    return CommandResult("ok" if bad == 0 else "refuted",
                         {"count": args.count, "not_pr": bad, "samples": items},
                         [f"{args.count - bad}/{args.count} samples positive real"])


def cmd_pr_circuit(args):
    spec = _load(args.spec)
    if not isinstance(spec, dict):
        raise FormatError("circuit spec must be a JSON object")
    F = ratfun.ladder_impedance(spec)
    v, pr = _pr_payload(F, ratfun.GridSpec.parse(args.grid), args.tol)
    return CommandResult("ok" if v.is_pr else "refuted",
                         {"function": jsonio.rational_to_json(F), "pr": pr})


def cmd_pr_network(args):
    blocks = [jsonio.rational_from_json(o) for o in _split(args.blocks)]
    if len(blocks) != 4:
        raise CliError("--blocks needs exactly four functions Fa,Fb,Fc,Fd")
    F = ratfun.feedback_network(*blocks)
    return CommandResult("ok", {"function": jsonio.rational_to_json(F)})


def cmd_real_eval(args):
    R = jsonio.realization_from_json(_load(args.realization))
    s = _complex(args.at)
    val = realize.transfer_eval(R, s, args.tol)
    if isinstance(val, matcore.PoleMarker):
        return CommandResult("ok", {"pole": True, "at": [s.real, s.imag]},
                             ["sI - A is singular at the evaluation point"])
    return CommandResult("ok", {"pole": False, "value": jsonio.matrix_to_json(val)})


def cmd_real_op(args):
    Rs = [jsonio.realization_from_json(o) for o in _split(args.inputs)]
    R = realize.realization_matrix_op(Rs, args.op, args.factor)
    return CommandResult("ok", jsonio.realization_to_json(R))


def cmd_real_kyp(args):
    R = jsonio.realization_from_json(_load(args.realization))
    if args.search:
        res = realize.kyp_search(R, args.max_iter, args.tol)
        payload = {"feasible": res.feasible, "iterations": res.iterations, "reason": res.reason,
                   "certificate": jsonio.certificate_to_json(res.certificate)
                   if res.certificate else None}
        return CommandResult("ok" if res.feasible else "infeasible", payload, [res.reason])
    if args.H is None:
        raise CliError("real kyp needs --H or --search")
    H = _matrix(args.H) if R.n else np.zeros((0, 0))
    cert = realize.kyp_verify(R, H, args.tol)
    return CommandResult("ok" if cert.valid else "refuted", jsonio.certificate_to_json(cert))


def cmd_real_balance(args):
    R = jsonio.realization_from_json(_load(args.realization))
    via = args.via == "sign-iteration"
    res = realize.gramian_balance(R, args.tol, via_sign_iteration=via)
    payload = {"transform": jsonio.matrix_to_json(res.transform),
               "balanced": jsonio.realization_to_json(res.balanced),
               "gramian": jsonio.matrix_to_json(res.gramian)}
    diags = []
    if res.iterations is not None:
        tr = res.iterations
        payload["sign_iteration"] = {"converged": tr.converged, "steps": tr.steps,
                                     "alpha": list(tr.alpha),
                                     "distance": [float(d) for d in tr.distances()]}
        diags.append(f"sign iteration: {tr.steps} steps, converged={tr.converged}")
    return CommandResult("ok", payload, diags)


def cmd_sim_run(args):
    sys_ = jsonio.system_from_json(_load(args.system))
    x0 = jsonio.vector_from_json(_load(args.x0) if not args.x0.lstrip().startswith("[")
                                 else jsonio.loads(args.x0))
    seq = _ints(args.sequence) if args.sequence else tuple(range(len(sys_.matrices)))
    policy = incsim.SwitchingPolicy(args.policy, seq, args.dwell, args.seed)
    traj = incsim.simulate(sys_, policy, x0, args.horizon, args.dt)
    rep = incsim.verify_envelope(traj, sys_, args.envelope_tol)
    return CommandResult("ok" if not rep.violations else "refuted",
                         jsonio.envelope_to_json(rep),
                         [f"{len(traj.times)} samples, {len(traj.switch_schedule)} segments"],
                         text=jsonio.trajectory_to_csv(traj))


# ------------------------------------------------------------------ parser

@functools.lru_cache(maxsize=1)
def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--tol", type=float, default=matcore.EPS, help="relative tolerance")
    common.add_argument("--seed", type=int, default=0, help="random seed")

    p = _Parser(prog="passivecones", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="group", required=True)

    def group(name, help_):
        g = sub.add_parser(name, help=help_)
        return g.add_subparsers(dest="cmd", required=True)

    def leaf(parent, name, func, help_):
        c = parent.add_parser(name, parents=[common], help=help_)
        c.set_defaults(func=func)
        return c

    cone = group("cone", "Lyapunov cone membership and combinations")
    c = leaf(cone, "check", cmd_cone_check, "membership in L_H (L_I without --H)")
    c.add_argument("--matrix", required=True)
    c.add_argument("--H")
    c = leaf(cone, "witness", cmd_cone_witness, "maximality witness for B outside closed L_I")
    c.add_argument("--matrix", required=True)
    c = leaf(cone, "combine", cmd_cone_combine, "matrix-convex combination")
    c.add_argument("--inputs", required=True)
    c.add_argument("--isometry", required=True)
    c.add_argument("--structured", help="n,m for the block-structured combination")
    c.add_argument("--mode", default="isometry", choices=[m.value for m in cones.CombineMode])

    c = sub.add_parser("sign", parents=[common], help="matrix sign")
    c.set_defaults(func=cmd_sign)
    c.add_argument("--matrix", required=True)

    pr = group("pr", "positive-real rational functions")
    c = leaf(pr, "check", cmd_pr_check, "positive-real test on a grid")
    c.add_argument("--function", required=True)
    c.add_argument("--grid", default="")
    c = leaf(pr, "cic-sample", cmd_pr_cic_sample, "seeded cic trees and their PR check")
    c.add_argument("--depth", type=int, required=True)
    c.add_argument("--count", type=int, default=1)
    c.add_argument("--m", type=int, default=1)
    c.add_argument("--grid", default="")
    c = leaf(pr, "circuit", cmd_pr_circuit, "impedance of a small passive network")
    c.add_argument("--spec", required=True)
    c.add_argument("--grid", default="")
    c = leaf(pr, "network", cmd_pr_network, "two-loop feedback network")
    c.add_argument("--blocks", required=True)

    real = group("real", "state-space realizations")
    c = leaf(real, "eval", cmd_real_eval, "transfer function at a point")
    c.add_argument("--realization", required=True)
    c.add_argument("--at", required=True)
    c = leaf(real, "op", cmd_real_op, "scale, sum or invert realization arrays")
    c.add_argument("--op", required=True, choices=["scale", "sum", "invert"])
    c.add_argument("--inputs", required=True)
    c.add_argument("--factor", type=float)
    c = leaf(real, "kyp", cmd_real_kyp, "KYP certificate check or search")
    c.add_argument("--realization", required=True)
    g = c.add_mutually_exclusive_group()
    g.add_argument("--H")
    g.add_argument("--search", action="store_true")
    c.add_argument("--max-iter", type=int, default=2000)
    c = leaf(real, "balance", cmd_real_balance, "Gramian balancing")
    c.add_argument("--realization", required=True)
    c.add_argument("--via", choices=["square-root", "sign-iteration"], default="square-root")

    sim = group("sim", "switched-system simulation")
    c = leaf(sim, "run", cmd_sim_run, "simulate and check the exponential envelope")
    c.add_argument("--system", required=True)
    c.add_argument("--policy", choices=[k.value for k in incsim.PolicyKind], default="fixed")
    c.add_argument("--sequence", help="indices cycled by the fixed policy")
    c.add_argument("--dwell", type=float)
    c.add_argument("--x0", required=True)
    c.add_argument("--horizon", type=float, required=True)
    c.add_argument("--dt", type=float, required=True)
    c.add_argument("--envelope-tol", type=float, default=incsim.ENVELOPE_TOL)
    c.add_argument("--report", help="path for the envelope JSON (default stderr)")
    return p


def run(argv):
    """Parse and execute; never raises for bad input."""
    args = None
    try:
        args = build_parser().parse_args(argv)
        return args.func(args), args
    except (CliError, FormatError, ValueError, TypeError, KeyError,
            np.linalg.LinAlgError) as exc:
        return CommandResult("error", {"message": str(exc)}, [str(exc)]), args


def document(result):
    return jsonio.dumps({"status": result.status, "payload": result.payload}, indent=2) + "\n"


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def main(argv=None):
    result, args = run(sys.argv[1:] if argv is None else argv)
    out = getattr(args, "out", None)
    for line in result.diagnostics:
        print(line, file=sys.stderr)
    try:
        if result.text is not None:
            _write(out, result.text)
            report = getattr(args, "report", None)
            if report:
                _write(report, document(result))
            else:
                sys.stderr.write(document(result))
        else:
            _write(out, document(result))
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 1
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
