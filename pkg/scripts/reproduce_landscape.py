"""Effective-rate landscape of the two-stage cascade and its critical point."""

import argparse
from pathlib import Path

from prespa import cascade
from prespa.model import TWO_PI, SystemParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("."))
    ap.add_argument("--n-grid", type=int, default=200)
    args = ap.parse_args()
    p = SystemParams()
    kappa = TWO_PI * p.kappa_r
    land = cascade.sweep_landscape((0.0, kappa / 4), (0.0, kappa / 2), kappa, args.n_grid)
    args.out.mkdir(parents=True, exist_ok=True)
    land.to_csv(args.out / "landscape.csv", header=[f"kappa = {kappa:.6f} rad/us"])
    o1, o2, rate = land.argmax_nonoscillatory()
    c1, c2 = cascade.critical_drive_point(kappa)
    exp = cascade.analyze(cascade.CascadeMatrix(TWO_PI * 0.055, TWO_PI * 0.160, kappa))
    print(f"Lambda coalescence: omega2 = kappa/{kappa / cascade.coalescence_omega2(kappa):.6f}")
    print(f"oscillation edge at omega2 = kappa/4: omega1 = kappa/{kappa / c1:.2f}")
    print(f"grid argmax (non-oscillatory): omega1 = kappa/{kappa / o1:.2f}, omega2 = kappa/{kappa / o2:.2f}, rate {rate:.4f} /us")
    print(f"experiment drives: rate {exp.rate:.4f} /us, eigenvalue {exp.eigenvalue:.4f}")


if __name__ == "__main__":
    main()
