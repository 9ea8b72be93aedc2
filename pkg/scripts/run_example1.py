"""Worked example end to end: forward spectrum, nodal sets, and both inversions.

    python scripts/run_example1.py [--n-max 200] [--out results/example1]
"""
import argparse
from pathlib import Path

from dirac_nodal import (
    AsymptoticNodalModel,
    derived_constants,
    eigenvalues,
    example1_problem,
    nodal_data,
    reconstruct,
    synthesize_nodal_data,
)
from dirac_nodal import io as dio
from dirac_nodal.cli import error_report

def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-min", type=int, default=25)
    ap.add_argument("--n-max", type=int, default=200)
    ap.add_argument("--synthetic-n-max", type=int, default=10000)
    ap.add_argument("--out", default="results/example1")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    p = example1_problem()
    c = derived_constants(p)
    print(f"A1 = {c.A1:.10f}  A2 = {c.A2:.10f}  omega(pi) = {c.omega_pi:.2e}")

    spec = eigenvalues(p, (args.n_min, args.n_max))
    data = nodal_data(p, args.n_min, args.n_max, spectrum=spec)
    (out / "spectrum.csv").write_text(dio.spectrum_csv(spec))
    (out / "nodes.csv").write_text(dio.nodal_csv(data))

    numeric = error_report(p, reconstruct(data, m=p.m))
    model = AsymptoticNodalModel.from_problem(p)
    synth = synthesize_nodal_data(model, args.synthetic_n_max // 2, args.synthetic_n_max)
    asym = error_report(p, reconstruct(synth, m=p.m))

    print(f"{'error':<12} {'numeric n<=' + str(args.n_max):>18} {'asymptotic n<=' + str(args.synthetic_n_max):>20}")
    for key in numeric:
        if key.endswith("_error"):
            print(f"{key:<12} {numeric[key]:>18.3e} {asym[key]:>20.3e}")
    (out / "errors.json").write_text(dio.dumps_json({"numeric": numeric, "asymptotic": asym}))

if __name__ == "__main__":
    main()
