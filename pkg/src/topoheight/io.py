"""Text formats for complexes, weights and chains.

Complex file::

    DIM 2
    VERTICES 4
    SIMPLICES
    0 1 2
    ...
    WEIGHTS 1          (optional, degree given or implied by the cell-ids)
    0-1 1/2
    3 2

A cell-id is either an index into the sorted cell list of that degree or a
vertex tuple joined by '-'.  Chain file::

    DEGREE 1 SIDE dual
    -1 0-2
    3/2 5

Cells of a dual j-chain are named by the primal (m-j)-cell they are dual to.
Lines starting with '#' are ignored.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from pathlib import Path

from .builders import from_name
from .complex import DUAL, PRIMAL, SIDES, Chain, ComplexError, SimplicialComplex
from .hodge import MetricWeights


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if s:
            yield no, s


def _rational(tok: str, no: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {tok!r}", no) from None


def _cell(X: SimplicialComplex, k: int | None, tok: str, no: int) -> tuple[int, int]:
    """(degree, index) for a cell-id; k may be None only for vertex tuples."""
    if "-" in tok or (k is None and tok.isdigit()):
        try:
            verts = tuple(sorted(int(v) for v in tok.split("-")))
        except ValueError:
            raise ParseError(f"bad cell-id {tok!r}", no) from None
        kk = len(verts) - 1
        if k is not None and kk != k:
            raise ParseError(f"cell {tok} has degree {kk}, expected {k}", no)
        if kk > X.dim or verts not in X.index[kk]:
            raise ParseError(f"no cell {tok}", no)
        return kk, X.index[kk][verts]
    try:
        i = int(tok)
    except ValueError:
        raise ParseError(f"bad cell-id {tok!r}", no) from None
    if not 0 <= i < X.n_cells(k):
        raise ParseError(f"cell index {i} out of range for degree {k}", no)
    return k, i


def _cell_name(X: SimplicialComplex, k: int, i: int) -> str:
    return "-".join(str(v) for v in X.cells[k][i])


# complexes ---------------------------------------------------------------


def parse_complex(text: str, name: str = "") -> tuple[SimplicialComplex, MetricWeights | None]:
    dim = nverts = None
    tops: list[list[int]] = []
    weight_lines: list[tuple[int | None, str, str, int]] = []
    section = None
    wdeg = None
    for no, s in _lines(text):
        head = s.split()
        key = head[0].upper()
        if key == "DIM":
            if len(head) != 2 or not head[1].isdigit():
                raise ParseError("expected 'DIM m'", no)
            dim = int(head[1])
            continue
        if key == "VERTICES":
            if len(head) != 2 or not head[1].isdigit():
                raise ParseError("expected 'VERTICES n'", no)
            nverts = int(head[1])
            continue
        if key in ("SIMPLICES", "SIMPLICIES"):
            section = "simplices"
            continue
        if key == "WEIGHTS":
            section = "weights"
            if len(head) > 2 or (len(head) == 2 and not head[1].isdigit()):
                raise ParseError("expected 'WEIGHTS' or 'WEIGHTS k'", no)
            wdeg = int(head[1]) if len(head) == 2 else None
            continue
        if section == "simplices":
            try:
                tops.append([int(v) for v in head])
            except ValueError:
                raise ParseError(f"bad simplex {s!r}", no) from None
        elif section == "weights":
            if len(head) != 2:
                raise ParseError("expected 'cell-id rational'", no)
            weight_lines.append((wdeg, head[0], head[1], no))
        else:
            raise ParseError(f"unexpected line {s!r}", no)
    if dim is None:
        raise ParseError("missing DIM header")
    if not tops:
        raise ParseError("missing SIMPLICES section")
    try:
        X = SimplicialComplex.from_top_simplices(dim, tops, nverts, name=name)
    except ComplexError as e:
        raise ParseError(str(e)) from e
    if not weight_lines:
        return X, None
    lists = {k: [Fraction(1)] * X.n_cells(k) for k in range(dim + 1)}
    touched = set()
    for k, cid, val, no in weight_lines:
        kk, i = _cell(X, k, cid, no)
        w = _rational(val, no)
        if w <= 0:
            raise ParseError(f"weight {val} is not positive", no)
        lists[kk][i] = w
        touched.add(kk)
    return X, MetricWeights.from_lists(X, {k: lists[k] for k in touched}, label="file")


def format_complex(X: SimplicialComplex, weights: MetricWeights | None = None) -> str:
    m = X.dim
    out = [f"DIM {m}", f"VERTICES {X.n_cells(0)}", "SIMPLICES"]
    for c, o in zip(X.cells[m], X.orient[m]):
        c = list(c)
        if o < 0:
            c[0], c[1] = c[1], c[0]
        out.append(" ".join(map(str, c)))
    if weights is not None:
        for k in range(m + 1):
            ws = weights.primal[k]
            if all(w == 1 for w in ws):
                continue
            out.append(f"WEIGHTS {k}")
            out.extend(f"{_cell_name(X, k, i)} {w}" for i, w in enumerate(ws))
    return "\n".join(out) + "\n"


def load_complex(spec: str) -> tuple[SimplicialComplex, MetricWeights | None]:
    """A builder expression such as ``torus_flat(4)`` or a complex file path."""
    X = from_name(spec)
    if X is not None:
        return X, None
    p = Path(spec)
    if not p.is_file():
        raise ParseError(f"{spec!r} is neither a builder nor a readable file")
    return parse_complex(p.read_text(encoding="utf-8"), name=p.stem)


# chains -----------------------------------------------------------------


def parse_chain(text: str, X: SimplicialComplex) -> Chain:
    degree = side = None
    coeffs: dict[int, Fraction] = {}
    for no, s in _lines(text):
        head = s.split()
        if degree is None:
            if (len(head) != 4 or head[0].upper() != "DEGREE" or head[2].upper() != "SIDE"
                    or not head[1].isdigit() or head[3].lower() not in SIDES):
                raise ParseError("expected 'DEGREE k SIDE primal|dual'", no)
            degree, side = int(head[1]), head[3].lower()
            if degree > X.dim:
                raise ParseError(f"degree {degree} exceeds dimension {X.dim}", no)
            continue
        if len(head) != 2:
            raise ParseError("expected 'coefficient cell-id'", no)
        c = _rational(head[0], no)
        k = degree if side == PRIMAL else X.dim - degree
        _, i = _cell(X, k, head[1], no)
        coeffs[i] = coeffs.get(i, Fraction(0)) + c
    if degree is None:
        raise ParseError("missing DEGREE header")
    return Chain(X, degree, side, {i: c for i, c in coeffs.items() if c})


def format_chain(c: Chain) -> str:
    X = c.complex
    k = c.degree if c.side == PRIMAL else X.dim - c.degree
    out = [f"DEGREE {c.degree} SIDE {c.side}"]
    for i in c.support():
        out.append(f"{c.coeffs[i]} {_cell_name(X, k, i)}")
    return "\n".join(out) + "\n"


def load_chain(path: str, X: SimplicialComplex) -> Chain:
    p = Path(path)
    if not p.is_file():
        raise ParseError(f"cannot read chain file {path!r}")
    return parse_chain(p.read_text(encoding="utf-8"), X)


def load_weights(spec: str | None, X: SimplicialComplex, shipped: MetricWeights | None) -> MetricWeights:
    """``unit``, ``default`` or ``file:PATH`` (a complex file with WEIGHTS)."""
    if spec is None:
        return shipped if shipped is not None else MetricWeights.default(X)
    if spec == "unit":
        return MetricWeights.unit(X)
    if spec == "default":
        return MetricWeights.default(X)
    if spec.startswith("file:"):
        p = Path(spec[5:])
        if not p.is_file():
            raise ParseError(f"cannot read weights file {p}")
        text = p.read_text(encoding="utf-8")
        if not text.lstrip().upper().startswith("DIM"):
            text = f"DIM {X.dim}\nSIMPLICES\n" + format_complex(X).split("SIMPLICES\n", 1)[1] + text
        Y, w = parse_complex(text)
        if Y.cells != X.cells or w is None:
            raise ParseError("weights file does not match the complex")
        return w
    raise ParseError(f"unknown weights {spec!r}")


def file_hash(path: str) -> str | None:
    p = Path(path)
    if not p.is_file():
        return None
    return hashlib.sha256(p.read_bytes()).hexdigest()[:16]
