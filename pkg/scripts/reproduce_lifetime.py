"""Logical lifetimes of the corrected and uncorrected binomial code and the Fock {0,1} reference."""

import argparse
import json
from pathlib import Path

from prespa import codes, solver
from prespa.model import SystemParams, build_effective_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("."))
    ap.add_argument("--kappa-cor", type=float, default=0.25)
    ap.add_argument("--n-cav", type=int, default=10)
    args = ap.parse_args()
    p = SystemParams()
    cases = {
        "binomial_corrected": (args.kappa_cor, codes.binomial_code(args.n_cav), 800.0),
        "binomial_uncorrected": (0.0, codes.binomial_code(args.n_cav), 400.0),
        "fock01": (0.0, codes.fock01_code(args.n_cav), 800.0),
    }
    fits = {}
    for name, (kc, code, t_end) in cases.items():
        model = build_effective_model(kc, p, args.n_cav)
        fits[name] = codes.logical_lifetime(model, code, solver.TimeGrid(0.0, t_end, 161))
        f = fits[name]
        print(f"{name:<22} T_p {f.T_p:7.1f}  T_eq {f.T_eq:7.1f}  tau_process {f.tau_process:7.1f}  1/e {f.t_1e:7.1f} us")
    ratio = fits["binomial_corrected"].tau_process / fits["fock01"].tau_process
    print(f"corrected / Fock01 = {ratio:.3f}")
    args.out.mkdir(parents=True, exist_ok=True)
    payload = {k: v.to_dict() for k, v in fits.items()} | {"ratio_corrected_to_fock01": ratio}
    (args.out / "lifetimes.json").write_text(json.dumps(payload, indent=2) + "\n")


if __name__ == "__main__":
    main()
