"""JSON encodings of every value type handled by the command line.

Rationals are strings ``"a/b"`` (or ``"a"``); valuations add ``"inf"`` and
``"-inf"``; matrices are row-major lists of such strings.  Schema errors
raise :class:`SchemaError`, which the CLI maps to exit status 2.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .apartment import ApartmentPoint, Box, Corner, LatticeSeqSpec, RaySpec
from .group_action import MonomialElement, ProjElement, RootGroupElement
from .lattice_building import BuildingGraph, Frame, LatticeClass
from .local_arith import format_rat, parse_ext, parse_rat
from .norm_points import NormPoint


class SchemaError(ValueError):
    pass


def _need(obj, key, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"missing key {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise SchemaError(f"key {key!r} has the wrong type")
    return val


def _rat(s) -> Fraction:
    try:
        return parse_rat(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"not a rational: {s!r}") from exc


def _int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"not an integer: {v!r}")
    return v


def _matrix(rows):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) and r for r in rows):
        raise SchemaError("matrix must be a nonempty list of nonempty rows")
    return [[_rat(x) for x in r] for r in rows]


def matrix_json(M):
    return [[format_rat(x) for x in row] for row in M]


def ext_json(v) -> str:
    return format_rat(v)


def ext_from_json(s):
    try:
        return parse_ext(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"not an extended rational: {s!r}") from exc


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2)


# --- lattice classes and graphs ---

def lattice_json(L: LatticeClass) -> dict:
    return {"p": L.p, "n": L.n, "basis": matrix_json(L.basis)}


def lattice_from_json(obj, p=None) -> LatticeClass:
    basis = _matrix(_need(obj, "basis"))
    p = _int(obj.get("p", p)) if obj.get("p", p) is not None else None
    if p is None:
        raise SchemaError("missing key 'p'")
    L = LatticeClass.from_basis(basis, p)
    if "n" in obj and _int(obj["n"]) != L.n:
        raise SchemaError("'n' disagrees with the basis")
    return L


def class_hash(L: LatticeClass) -> str:
    text = json.dumps(lattice_json(L), sort_keys=True)
    return hashlib.sha1(text.encode()).hexdigest()[:10]


def graph_json(g: BuildingGraph) -> dict:
    return {
        "center": g.center,
        "radius": g.radius,
        "vertices": [lattice_json(v) for v in g.vertices],
        "layers": list(g.layers),
        "edges": [list(e) for e in g.edges],
    }


def graph_dot(g: BuildingGraph) -> tuple[str, dict]:
    """DOT text labelled by canonical-form hashes, and the hash -> class sidecar."""
    labels = [class_hash(v) for v in g.vertices]
    sidecar = {h: lattice_json(v) for h, v in zip(labels, g.vertices)}
    return g.to_dot(labels), sidecar


# --- apartment ---

def point_json(x: ApartmentPoint) -> dict:
    return {"n": x.n, "support": list(x.support), "coords": {str(i): format_rat(c) for i, c in zip(x.support, x.coords)}}


def point_from_json(obj, n=None) -> ApartmentPoint:
    support = _need(obj, "support", list)
    coords = _need(obj, "coords", dict)
    n = _int(obj.get("n", n)) if obj.get("n", n) is not None else None
    if n is None:
        raise SchemaError("missing key 'n'")
    support = [_int(i) for i in support]
    if sorted(str(i) for i in support) != sorted(coords):
        raise SchemaError("coords keys must match the support")
    return ApartmentPoint(n, tuple(support), tuple(_rat(coords[str(i)]) for i in support))


def box_json(b: Box) -> list:
    return [[format_rat(lo), format_rat(hi)] for lo, hi in b.intervals]


def nbhd_json(spec) -> dict:
    if isinstance(spec, Corner):
        return {"I": list(spec.I), "box": box_json(spec.box)}
    return {"box": box_json(spec)}


def nbhd_from_json(obj):
    raw = _need(obj, "box", list)
    try:
        intervals = tuple((_rat(lo), _rat(hi)) for lo, hi in raw)
    except (TypeError, ValueError) as exc:
        raise SchemaError("box must be a list of [lo, hi] pairs") from exc
    box = Box(intervals)
    if "I" in obj and obj["I"] is not None:
        return Corner(tuple(_int(i) for i in _need(obj, "I", list)), box)
    return box


def ray_json(r: RaySpec) -> dict:
    return {"base": point_json(r.base), "direction": [format_rat(d) for d in r.direction]}


def ray_from_json(obj, n=None) -> RaySpec:
    base = point_from_json(_need(obj, "base", dict), n)
    return RaySpec(base, tuple(_rat(d) for d in _need(obj, "direction", list)))


def seq_json(s: LatticeSeqSpec) -> dict:
    return {"p": s.p, "base": list(s.base), "slopes": list(s.slopes)}


def seq_from_json(obj, p=None) -> LatticeSeqSpec:
    p = obj.get("p", p)
    if p is None:
        raise SchemaError("missing key 'p'")
    return LatticeSeqSpec(
        _int(p),
        tuple(_int(b) for b in _need(obj, "base", list)),
        tuple(_int(d) for d in _need(obj, "slopes", list)),
    )


def chart_json(ch: dict) -> dict:
    return {str(j): ext_json(v) for j, v in sorted(ch.items())}


def chart_from_json(obj) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError("chart must be an object keyed by index")
    try:
        return {int(k): ext_from_json(v) for k, v in obj.items()}
    except ValueError as exc:
        raise SchemaError("chart keys must be indices") from exc


# --- norm points ---

def norm_json(x: NormPoint) -> dict:
    return {"p": x.p, "basis": matrix_json(x.basis), "weights": [format_rat(w) for w in x.weights]}


def norm_from_json(obj, p=None) -> NormPoint:
    p = obj.get("p", p)
    if p is None:
        raise SchemaError("missing key 'p'")
    return NormPoint(_int(p), _matrix(_need(obj, "basis")), tuple(_rat(w) for w in _need(obj, "weights", list)))


# --- group elements ---

def element_json(g) -> dict:
    if isinstance(g, ProjElement):
        return {"matrix": matrix_json(g.matrix)}
    if isinstance(g, MonomialElement):
        return {"perm": list(g.perm), "vals": list(g.vals)}
    if isinstance(g, RootGroupElement):
        return {"i": g.i, "j": g.j, "omega": format_rat(g.omega)}
    raise TypeError(type(g).__name__)


def element_from_json(obj):
    if not isinstance(obj, dict):
        raise SchemaError("group element must be an object")
    if "matrix" in obj:
        return ProjElement(_matrix(obj["matrix"]))
    if "perm" in obj:
        return MonomialElement(tuple(_int(i) for i in _need(obj, "perm", list)),
                               tuple(_int(t) for t in _need(obj, "vals", list)))
    if "omega" in obj:
        return RootGroupElement(_int(_need(obj, "i")), _int(_need(obj, "j")), _rat(obj["omega"]))
    raise SchemaError("unrecognized group element (expected matrix, perm/vals or i/j/omega)")


def frame_json(f: Frame) -> dict:
    return {
        "vectors": matrix_json(f.vectors),
        "subset": [j + 1 for j in f.subset],
        "x_exponents": list(f.x_exponents),
        "y_exponents": list(f.y_exponents),
    }


def frame_from_json(obj) -> Frame:
    return Frame(
        tuple(tuple(r) for r in _matrix(_need(obj, "vectors"))),
        tuple(_int(j) - 1 for j in _need(obj, "subset", list)),
        tuple(_int(a) for a in _need(obj, "x_exponents", list)),
        tuple(_int(b) for b in _need(obj, "y_exponents", list)),
    )


def any_point_from_json(obj, p, n):
    """Dispatch on shape: lattice class, norm point or apartment point."""
    if not isinstance(obj, dict):
        raise SchemaError("point must be an object")
    if "weights" in obj:
        return norm_from_json(obj, p)
    if "basis" in obj:
        return lattice_from_json(obj, p)
    if "support" in obj:
        return point_from_json(obj, n)
    raise SchemaError("unrecognized point (expected basis, basis+weights, or support+coords)")


def any_point_json(x):
    if isinstance(x, LatticeClass):
        return lattice_json(x)
    if isinstance(x, NormPoint):
        return norm_json(x)
    return point_json(x)
