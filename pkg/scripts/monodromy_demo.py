"""Walk Sigma' around a vertex of Sigma and print the lifted height trace.

    python scripts/monodromy_demo.py --complex "torus_flat(4)" --times 2
"""

import argparse

from topoheight.builders import from_name
from topoheight.complex import Chain, intersect
from topoheight.height import monodromy_sweep
from topoheight.hodge import hodge_context
from topoheight.homology import trivialize
from topoheight.sampling import loop_family


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--complex", default="torus_flat(4)")
    ap.add_argument("--times", type=int, default=1)
    ap.add_argument("--mult", type=int, default=1)
    args = ap.parse_args()

    X = from_name(args.complex)
    ctx = hodge_context(X)
    far = X.n_cells(0) - 1
    sigma = Chain(X, 0, "primal", {0: args.mult, far: -args.mult})
    gamma = trivialize(sigma)
    anchor = next(t for t, c in enumerate(X.cells[2]) if not {0, far} & set(c))
    fam = loop_family(X, 0, anchor, args.times)
    res = monodromy_sweep(sigma, gamma, fam, ctx)
    for i, f in enumerate(res.trace):
        print(f"{i:3d}  {float(f): .6f}")
    print(f"jump {res.jump}  crossing {res.crossing}  swept Gamma.Z {intersect(gamma, fam.swept())}"
          f"  harmonic defect {res.harmonic_defect}")


if __name__ == "__main__":
    main()
