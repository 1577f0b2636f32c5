"""Command-line entry point.

Every command prints line-delimited JSON: a header line describing the run,
then one line per output.  Rationals are written as "p/q" strings so exact
values survive the round trip.  Exit codes: 2 usage, 3 parse error,
4 violated precondition, 5 failed invariant.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import io
from .complex import DUAL, PRIMAL, Chain

EXIT_USAGE, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INVARIANT = 2, 3, 4, 5


def _q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _jsonable(v):
    if isinstance(v, Fraction):
        return _q(v)
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return float(f"{v:.15g}")
    if isinstance(v, complex):
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, Chain):
        return _chain_json(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    try:
        return float(v)  # numpy / mpmath reals
    except (TypeError, ValueError):
        pass
    try:
        return _jsonable(complex(v))
    except (TypeError, ValueError):
        return str(v)


def _chain_json(c: Chain) -> dict:
    X = c.complex
    k = c.degree if c.side == PRIMAL else X.dim - c.degree
    return {"degree": c.degree, "side": c.side,
            "coeffs": [["-".join(map(str, X.cells[k][i])), _q(c.coeffs[i])] for i in c.support()]}


class Report:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.lines: list[dict] = []
        self.t0 = time.perf_counter()
        inputs = {}
        for name in ("complex", "sigma", "gamma", "sigma_prime", "gamma_prime", "theta_prime",
                     "family"):
            path = getattr(args, name, None)
            if path:
                inputs[name] = {"path": path, "sha256": io.file_hash(path)}
        head = {"command": args.command if not getattr(args, "action", None)
                else f"{args.command} {args.action}",
                "mode": "float" if getattr(args, "float", False) or args.command == "analytic"
                else "exact",
                "inputs": inputs}
        if getattr(args, "weights", None):
            head["weights"] = args.weights
        self.lines.append(head)

    def add(self, key: str, value, **extra) -> None:
        line = {"output": key, "value": _jsonable(value)}
        line.update({k: _jsonable(v) for k, v in extra.items()})
        self.lines.append(line)

    def write_chain(self, name: str, c: Chain) -> None:
        out = getattr(self.args, "out", None)
        if out:
            p = Path(out)
            p.mkdir(parents=True, exist_ok=True)
            (p / f"{name}.chain").write_text(io.format_chain(c), encoding="utf-8")

    def emit(self, stream) -> None:
        if getattr(self.args, "timing", False):
            self.lines.append({"timing_s": round(time.perf_counter() - self.t0, 3)})
        text = "".join(json.dumps(line, sort_keys=False) + "\n" for line in self.lines)
        stream.write(text)
        out = getattr(self.args, "out", None)
        if out:
            Path(out).mkdir(parents=True, exist_ok=True)
            (Path(out) / "report.jsonl").write_text(text, encoding="utf-8")


# shared loaders -----------------------------------------------------------------


def _setup(args):
    from .hodge import hodge_context
    X, shipped = io.load_complex(args.complex)
    w = io.load_weights(getattr(args, "weights", None), X, shipped)
    return X, hodge_context(X, w)


def _chain(args, name: str, X, required: bool = True) -> Chain | None:
    path = getattr(args, name, None)
    if path is None:
        if required:
            raise io.ParseError(f"--{name.replace('_', '-')} is required")
        return None
    return io.load_chain(path, X)


def _gamma(args, sigma: Chain, name: str = "gamma") -> Chain:
    from .homology import trivialize
    g = _chain(args, name, sigma.complex, required=False)
    return g if g is not None else trivialize(sigma)


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()] if s else []


def _rats(s: str) -> list[Fraction]:
    try:
        return [Fraction(x) for x in s.split(",") if x.strip()] if s else []
    except ValueError as e:
        raise io.ParseError(str(e)) from None


def _points(s: str) -> list[complex]:
    try:
        return [complex(x.replace(" ", "").replace("i", "j")) for x in s.split(",")]
    except ValueError as e:
        raise io.ParseError(f"bad point list {s!r}") from e


# commands -----------------------------------------------------------------------


def cmd_build(args, rep: Report):
    X, shipped = io.load_complex(args.complex)
    from .hodge import MetricWeights
    w = io.load_weights(getattr(args, "weights", None), X, shipped)
    rep.add("f_vector", list(X.f_vector))
    rep.add("euler_characteristic", X.euler_characteristic())
    rep.add("closed_oriented_manifold", X.closed_oriented_manifold_checked)
    rep.add("weights", w.label)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        keep = None if w == MetricWeights.unit(X) else w
        (Path(args.out) / "complex.txt").write_text(io.format_complex(X, keep), encoding="utf-8")


def cmd_homology(args, rep: Report):
    from .homology import homology_basis
    X, _ = io.load_complex(args.complex)
    hb = homology_basis(X, args.degree, args.side)
    rep.add("rank", hb.rank, degree=args.degree, side=args.side)
    rep.add("torsion", hb.torsion)
    for j, c in enumerate(hb.representatives):
        rep.add(f"basis[{j}]", c)
        rep.write_chain(f"basis{j}", c)


def cmd_trivialize(args, rep: Report):
    from .homology import trivialize
    X, _ = io.load_complex(args.complex)
    sigma = _chain(args, "sigma", X)
    g = trivialize(sigma)
    if g.boundary() != sigma:
        raise AssertionError("boundary of the trivializing chain differs from Sigma")
    rep.add("gamma", g)
    rep.write_chain("gamma", g)


def cmd_filtration(args, rep: Report):
    from .homology import complement_pair
    X, _ = io.load_complex(args.complex)
    sigma = _chain(args, "sigma", X)
    sp = _chain(args, "sigma_prime", X, required=False)
    if sp is None:
        sp = Chain.zero(X, sigma.degree, DUAL)
    cp = complement_pair(sigma, sp)
    rep.add("relative_rank", cp.M.rank)
    rep.add("weight_ranks", list(cp.filtration.ranks), labels=["W0", "W1", "W2"])


def cmd_omega(args, rep: Report):
    X, ctx = _setup(args)
    sigma = _chain(args, "sigma", X)
    if args.float:
        from .hodge import FloatHodge
        vec = FloatHodge(ctx).omega(sigma)
        rep.add("omega", [float(f"{x:.12g}") for x in vec], degree=sigma.degree + 1, side=sigma.side)
        return
    om = ctx.omega_form(sigma)
    rep.add("omega", om)
    rep.write_chain("omega", om)


def cmd_aj(args, rep: Report):
    from .hodge import aj_image, dual_aj_image, period_bases
    X, ctx = _setup(args)
    sigma = _chain(args, "sigma", X)
    g = _gamma(args, sigma)
    k1 = sigma.degree + 1
    bases = period_bases(X, k1 if sigma.side == PRIMAL else X.dim - k1)
    a = aj_image(sigma, g, ctx, bases)
    b = dual_aj_image(sigma, g, ctx, bases)
    rep.add("alpha", a.coords, raw=a.raw, ambiguity="Z^%d" % len(a.coords))
    rep.add("beta", b.coords, raw=b.raw, ambiguity="Z^%d" % len(b.coords))


def cmd_height(args, rep: Report):
    from .height import height
    X, ctx = _setup(args)
    sigma = _chain(args, "sigma", X)
    gp = _chain(args, "gamma_prime", X)
    hv = height(sigma, gp, ctx)
    if args.float:
        from .complex import integrate
        from .hodge import FloatHodge
        vec = FloatHodge(ctx).omega(sigma)
        om = Chain.from_vector(X, sigma.degree + 1, sigma.side, [Fraction(float(x)) for x in vec])
        rep.add("height", float(f"{float(integrate(gp, om)):.12g}"), ambiguity=hv.modulus)
        return
    rep.add("height", hv.raw, ambiguity=hv.modulus, canonical=hv.canonical)


def cmd_zee(args, rep: Report):
    from .height import zee_check, zee_prime_check
    X, ctx = _setup(args)
    sigma = _chain(args, "sigma", X)
    g = _gamma(args, sigma)
    tp = _chain(args, "theta_prime", X, required=False)
    if tp is not None:
        rep.add("intersection", zee_check(sigma, g, tp, ctx), identity="zee")
        return
    gp = _chain(args, "gamma_prime", X)
    sp = gp.boundary()
    rep.add("intersection", zee_prime_check(sigma, g, sp, gp, ctx), identity="zee-prime")


def _load_family(path: str, X):
    """Directory with manifest.txt: 'START file' then 'STEP file' lines."""
    from .height import CrossingFamily
    d = Path(path)
    man = d / "manifest.txt"
    if not man.is_file():
        raise io.ParseError(f"missing {man}")
    start, steps = None, []
    for no, line in io._lines(man.read_text(encoding="utf-8")):
        parts = line.split()
        if len(parts) != 2 or parts[0].upper() not in ("START", "STEP"):
            raise io.ParseError("expected 'START file' or 'STEP file'", no)
        c = io.load_chain(str(d / parts[1]), X)
        if parts[0].upper() == "START":
            start = c
        else:
            steps.append(c)
    if not steps:
        raise io.ParseError("family has no steps")
    if start is None:
        start = Chain.zero(X, steps[0].degree - 1, steps[0].side)
    return CrossingFamily.from_steps(start, steps)


def cmd_sweep(args, rep: Report):
    from .height import monodromy_sweep
    X, ctx = _setup(args)
    sigma = _chain(args, "sigma", X)
    g = _gamma(args, sigma)
    fam = _load_family(args.family, X)
    res = monodromy_sweep(sigma, g, fam, ctx)
    rep.add("trace", res.trace)
    rep.add("jump", res.jump, crossing=res.crossing, harmonic_defect=res.harmonic_defect)


def _four(args):
    X, ctx = _setup(args)
    sigma = _chain(args, "sigma", X)
    g = _gamma(args, sigma)
    gp = _chain(args, "gamma_prime", X)
    return X, ctx, sigma, g, gp.boundary(), gp


def cmd_structure(args, rep: Report):
    from .bundle import extract_alpha_beta, integral_structure, structure_canonical
    X, ctx, sigma, g, sp, gp = _four(args)
    z = integral_structure(sigma, g, sp, gp, ctx)
    rep.add("matrix", [[Fraction(x) for x in row] for row in z.matrix])
    a, b = extract_alpha_beta(z)
    rep.add("alpha", a.coords, raw=a.raw)
    rep.add("beta", b.coords, raw=b.raw)
    rep.add("canonical", structure_canonical(z))


def cmd_lift(args, rep: Report):
    from .bundle import lift
    X, ctx, sigma, g, sp, gp = _four(args)
    p = lift(sigma, g, sp, gp, ctx)
    c = p.canonical()
    rep.add("point", {"alpha": p.alpha, "beta": p.beta, "r": p.r})
    rep.add("canonical", {"alpha": c.alpha, "beta": c.beta, "r": c.r}, ambiguity="Z^2r x Z")


def cmd_bundle(args, rep: Report):
    from .bundle import BundlePoint, act, chern_pairing, holonomy
    if args.action == "act":
        alpha, beta = _rats(args.alpha), _rats(args.beta)
        m, n = _ints(args.m), _ints(args.n)
        if not (len(alpha) == len(beta) == len(m) == len(n)):
            raise ValueError("alpha, beta, m, n must have equal lengths")
        p = act(m, n, BundlePoint(tuple(alpha), tuple(beta), Fraction(args.r)), reduce=True)
        rep.add("alpha", p.alpha)
        rep.add("beta", p.beta)
        rep.add("r", p.r, ambiguity=Fraction(1))
    elif args.action == "chern":
        rep.add("chern_pairing", chern_pairing(args.rank))
    else:
        rep.add("holonomy", holonomy(_rats(args.beta), _ints(args.m)), ambiguity=Fraction(1))


def cmd_analytic(args, rep: Report):
    from . import elliptic as el
    E = el.EllipticCurve(complex(args.tau.replace("i", "j")), dps=args.precision)
    pts = _points(args.points) if args.points else []
    need = {"third-kind": 2, "height": 4, "holo-check": 3, "abel": 2, "compare": 4}[args.action]
    if len(pts) != need:
        raise io.ParseError(f"{args.action} expects {need} points")
    if args.action == "third-kind":
        psi = el.third_kind(E, *pts)
        rep.add("c", complex(psi.c))
        rep.add("periods", [complex(p) for p in psi.periods()])
        r = min(0.1, abs(pts[0] - pts[1]) / 4)
        rep.add("residues", [complex(el.loop_integral(psi, p, r)) for p in pts])
    elif args.action == "height":
        hh = el.holomorphic_height(E, *pts)
        rep.add("height", complex(hh.value), ambiguity=hh.ambiguity())
    elif args.action == "holo-check":
        a, b, t0 = pts
        grid = [t0 + 0.1 + 0.05j, t0 + 0.2 + 0.1j]
        rep.add("cr_residual", el.holomorphy_check(E, a, b, t0, grid, h=args.h).cr_residual,
                h=args.h)
    elif args.action == "abel":
        rep.add("windings", el.abel_divisor_check(E, *pts),
                contours=["around t", "around t0", "around both", "pole free"])
    else:
        ladder = _ints(args.refine) or [4, 8, 16, 32]
        r = el.compare_discrete(E, *pts, ladder=ladder)
        rep.add("analytic", r.analytic, imag=r.analytic_imag)
        for row in r.rows:
            rep.add("discrete", row.discrete, N=row.N, gap=row.gap, ambiguity=row.ambiguity)
        rep.add("monotone", r.monotone)


COMMANDS = {
    "build": cmd_build, "homology": cmd_homology, "trivialize": cmd_trivialize,
    "filtration": cmd_filtration, "omega": cmd_omega, "aj": cmd_aj, "height": cmd_height,
    "zee": cmd_zee, "sweep": cmd_sweep, "structure": cmd_structure, "lift": cmd_lift,
    "bundle": cmd_bundle, "analytic": cmd_analytic,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="topoheight", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def common(sp, complex_=True, weights=False):
        if complex_:
            sp.add_argument("--complex", required=True,
                            help="builder such as torus_flat(4) or a complex file")
        if weights:
            sp.add_argument("--weights", help="unit | default | file:PATH")
            mode = sp.add_mutually_exclusive_group()
            mode.add_argument("--exact", dest="float", action="store_false")
            mode.add_argument("--float", dest="float", action="store_true")
            sp.set_defaults(float=False)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="directory for emitted chain files and the report")
        sp.add_argument("--timing", action="store_true", help="append wall time (breaks determinism)")

    common(sub.add_parser("build", help="build or read a complex"), weights=True)
    sp = sub.add_parser("homology", help="integral homology basis")
    common(sp)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--side", choices=[PRIMAL, DUAL], default=PRIMAL)
    sp = sub.add_parser("trivialize", help="chain bounding a null-homologous cycle")
    common(sp)
    sp.add_argument("--sigma", required=True)
    sp = sub.add_parser("filtration", help="weight filtration of the complement pair")
    common(sp)
    sp.add_argument("--sigma", required=True)
    sp.add_argument("--sigma-prime")
    helps = {"omega": "vanishing-cycle form of Sigma", "aj": "Abel-Jacobi images",
             "height": "height pairing and its ambiguity", "zee": "integrality identities",
             "sweep": "monodromy along a family of Sigma'", "structure": "integral period matrix",
             "lift": "bundle point of a pair"}
    for name, extra in (("omega", ()), ("aj", ("--gamma",)), ("height", ("--gamma-prime",)),
                        ("zee", ("--gamma", "--gamma-prime", "--theta-prime")),
                        ("sweep", ("--gamma", "--family")),
                        ("structure", ("--gamma", "--gamma-prime")),
                        ("lift", ("--gamma", "--gamma-prime"))):
        sp = sub.add_parser(name, help=helps[name])
        common(sp, weights=True)
        sp.add_argument("--sigma", required=True)
        for flag in extra:
            sp.add_argument(flag, required=flag in ("--family",) or
                            (flag == "--gamma-prime" and name in ("height", "structure", "lift")))

    sp = sub.add_parser("bundle", help="Poincare bundle arithmetic")
    bsub = sp.add_subparsers(dest="action", metavar="ACTION")
    bsub.required = True
    a = bsub.add_parser("act")
    for flag in ("--alpha", "--beta", "--m", "--n"):
        a.add_argument(flag, required=True)
    a.add_argument("--r", default="0")
    c = bsub.add_parser("chern")
    c.add_argument("--rank", type=int, default=1)
    h = bsub.add_parser("holonomy")
    h.add_argument("--beta", required=True)
    h.add_argument("--m", required=True)

    sp = sub.add_parser("analytic", help="genus one analytic checks")
    asub = sp.add_subparsers(dest="action", metavar="ACTION")
    asub.required = True
    from .elliptic import DEFAULT_DPS
    for name in ("third-kind", "height", "holo-check", "abel", "compare"):
        a = asub.add_parser(name)
        a.add_argument("--tau", default="1j")
        a.add_argument("--points", required=True, help="comma separated complex numbers")
        a.add_argument("--precision", type=int, default=DEFAULT_DPS)
        a.add_argument("--refine", default="", help="refinement ladder for compare")
        a.add_argument("--h", type=float, default=1e-3)
        a.add_argument("--out")
        a.add_argument("--timing", action="store_true")
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0
    random.seed(getattr(args, "seed", 0))
    rep = Report(args)
    try:
        COMMANDS[args.command](args, rep)
    except io.ParseError as e:
        stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except AssertionError as e:
        stderr.write(f"invariant failure: {e}\n")
        return EXIT_INVARIANT
    except (ValueError, ArithmeticError) as e:
        stderr.write(f"precondition violated: {e}\n")
        return EXIT_PRECONDITION
    rep.emit(stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
