"""Residual decay of the large-n expansions on the worked example.

Prints n * |lambda_n - prediction| and max_j |x_n^j - prediction| per n, the
fitted nodal decay slope, and the smallest n from which every nodal set has
exactly n points.

    python scripts/convergence_study.py [--n-min 1] [--n-max 200]
"""
import argparse
import warnings

import numpy as np

from dirac_nodal import (
    AsymptoticNodalModel,
    derived_constants,
    eigenvalue_asymptotic,
    eigenvalues,
    example1_problem,
    nodal_asymptotic,
    nodal_data,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-min", type=int, default=1)
    ap.add_argument("--n-max", type=int, default=200)
    ap.add_argument("--every", type=int, default=10, help="print every k-th row")
    args = ap.parse_args()

    p = example1_problem()
    c = derived_constants(p)
    model = AsymptoticNodalModel.from_problem(p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        spec = eigenvalues(p, (args.n_min, args.n_max))
        data = nodal_data(p, args.n_min, args.n_max, spectrum=spec)
    if spec.missing:
        print(f"unresolved indices: {spec.missing}")

    print(f"{'n':>5} {'lambda_n':>14} {'n*eig resid':>12} {'count':>6} {'max nodal resid':>16}")
    rows = []
    for n in sorted(data.sets):
        s = data.sets[n]
        eig = abs(spec[n] - eigenvalue_asymptotic(c, p.alpha, p.beta, n)) * n
        try:
            nod = float(np.max(np.abs(s.points - nodal_asymptotic(model, n, np.arange(n))))) if s.count_ok else np.nan
        except ValueError:
            nod = np.nan  # expansion leaves (0, pi) at this n
        rows.append((n, s.count_ok, nod))
        if n % args.every == 0 or n == args.n_min:
            print(f"{n:>5} {spec[n]:>14.8f} {eig:>12.4f} {s.count:>6} {nod:>16.3e}")

    bad = [n for n, ok, _ in rows if not ok]
    threshold = (max(bad) + 1) if bad else min(data.sets)
    print(f"count == n for every n >= {threshold} (mismatches: {bad})")
    good = [(n, e) for n, ok, e in rows if ok and np.isfinite(e) and n >= 25]
    if len(good) > 2:
        ns, es = np.array(good).T
        print(f"nodal residual slope over n >= 25: {np.polyfit(np.log(ns), np.log(es), 1)[0]:.2f}")


if __name__ == "__main__":
    main()
