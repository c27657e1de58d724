"""Find a pair of Hurwitz matrices whose greedy switching makes ``||x||`` grow.

Each matrix is stable on its own, yet no common Lyapunov factor exists:
a common factor would force the envelope bound and rule out growth.  The
pair is ``A_1 = [[-a, 1], [-b, -a]]`` and ``A_2 = Q A_1 Q^T`` for a rotation
``Q``; the script sweeps ``b`` and the rotation angle until the greedy
trajectory ends above its starting norm.

    python scripts/greedy_growth.py --csv growth.csv
"""
import argparse
import sys
from dataclasses import dataclass

import numpy as np

from passivecones.incsim import SwitchedSystem, SwitchingPolicy, simulate
from passivecones.jsonio import trajectory_to_csv


@dataclass
class GrowthConfig:
    damping: float = 0.1
    stiffness: tuple = (1.5, 2.0, 5.0, 10.0)
    angles: int = 13
    horizon: float = 10.0
    dt: float = 1e-2
    growth: float = 2.0


def rotated_pair(a, b, angle):
    c, s = np.cos(angle), np.sin(angle)
    Q = np.array([[c, -s], [s, c]])
    A1 = np.array([[-a, 1.0], [-b, -a]])
    return A1, Q @ A1 @ Q.T


def find_growth(cfg):
    """First ``(b, angle, trajectory)`` with ``||x(T)|| >= growth ||x(0)||``, else ``None``."""
    x0 = np.array([1.0, 0.0])
    for b in cfg.stiffness:
        for angle in np.linspace(0, np.pi / 2, cfg.angles)[1:]:
            sys_ = SwitchedSystem(rotated_pair(cfg.damping, b, angle))
            traj = simulate(sys_, SwitchingPolicy("greedy"), x0, cfg.horizon, cfg.dt)
            if traj.norms[-1] >= cfg.growth * traj.norms[0]:
                return b, angle, traj
    return None


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--damping", type=float, default=GrowthConfig.damping)
    p.add_argument("--horizon", type=float, default=GrowthConfig.horizon)
    p.add_argument("--dt", type=float, default=GrowthConfig.dt)
    p.add_argument("--csv", help="write the growing trajectory")
    a = p.parse_args(argv)
    cfg = GrowthConfig(damping=a.damping, horizon=a.horizon, dt=a.dt)
    hit = find_growth(cfg)
    if hit is None:
        print("no growth found in the sweep")
        return 1
    b, angle, traj = hit
    A1, A2 = rotated_pair(cfg.damping, b, angle)
    print(f"b = {b}, angle = {angle:.4f} rad")
    print(f"spectral abscissae {np.linalg.eigvals(A1).real.max():.3f}, {np.linalg.eigvals(A2).real.max():.3f}")
    print(f"||x(0)|| = {traj.norms[0]:.3f}, ||x({traj.times[-1]:g})|| = {traj.norms[-1]:.3e}")
    if a.csv:
        with open(a.csv, "w") as fh:
            fh.write(trajectory_to_csv(traj))
    return 0


if __name__ == "__main__":
    sys.exit(main())
