"""Command line interface: ``btcompact <command> [options]``.

Inputs are JSON strings, ``@path`` to read a file, or ``-`` for stdin.
Exit status is 0 on success, 2 for malformed input and 3 when an input
violates a mathematical precondition.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import jsonio
from .apartment import (
    ApartmentPoint,
    _ext_key,
    contract,
    corner_chart,
    corner_chart_inv,
    corners_of,
    f_set,
    f_value,
    f_value_oracle,
    fundamental_nbhd,
    lattice_seq_limit,
    nbhd_contains,
    ray_limit,
    ray_tail_certificate,
)
from .errors import PreconditionError
from .group_action import (
    MonomialElement,
    RootGroupElement,
    act,
    act_monomial,
    as_root_element,
    psi,
    restrict,
    stabilizes_set,
    star_condition,
)
from .lattice_building import (
    LatticeClass,
    MAX_N,
    adjacent,
    ball,
    check_guardrails,
    common_frame,
    is_simplex,
    neighbors,
    phi,
    phi_inv,
    rel_pos,
    verify_frame,
)
from .local_arith import check_prime
from .norm_points import NormPoint, from_apartment, from_lattice, to_apartment
from .selftest import run_all

PRIME_ENV = "BTCOMPACT_PRIME"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    p: int
    n: int | None
    seed: int
    override: bool
    fmt: str


# --- input helpers -------------------------------------------------------------

def _read(text: str):
    if text == "-":
        text = sys.stdin.read()
    elif text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise jsonio.SchemaError(f"cannot read {text[1:]}: {exc.strerror}") from exc
    return jsonio.loads(text)


def _parse(decoder, text, *extra):
    """Decode one JSON argument; structural mistakes become schema errors."""
    obj = _read(text)
    try:
        return decoder(obj, *extra)
    except (jsonio.SchemaError, PreconditionError):
        raise
    except (TypeError, KeyError, IndexError, ValueError, AttributeError) as exc:
        raise jsonio.SchemaError(f"malformed input: {exc}") from exc


def _index_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise jsonio.SchemaError(f"expected comma separated indices, got {text!r}") from exc


def _rational(text: str) -> Fraction:
    return jsonio._rat(text)


def _point(cfg: Config, text: str) -> ApartmentPoint:
    return _parse(jsonio.point_from_json, text, cfg.n)


def _lattice(cfg: Config, text: str) -> LatticeClass:
    return _parse(jsonio.lattice_from_json, text, cfg.p)


def _list_of(decoder, text, *extra):
    def many(obj, *ex):
        if not isinstance(obj, list) or not obj:
            raise jsonio.SchemaError("expected a nonempty JSON list")
        return [decoder(o, *ex) for o in obj]

    return _parse(many, text, *extra)


# --- commands ------------------------------------------------------------------

def cmd_ball(args, cfg: Config):
    if args.center:
        center = _lattice(cfg, args.center)
    else:
        center = LatticeClass.standard(_need_n(cfg), cfg.p)
    check_guardrails(center.n, center.p, cfg.override)
    g = ball(center, args.radius, override=cfg.override)
    dot, sidecar = jsonio.graph_dot(g)
    if args.sidecar:
        with open(args.sidecar, "w", encoding="utf-8") as fh:
            fh.write(jsonio.dumps(sidecar) + "\n")
    fmt = cfg.fmt or "dot"
    if fmt == "dot":
        return dot
    if fmt == "table":
        rows = [f"{i}\t{lay}\t{jsonio.class_hash(v)}\t{json.dumps(jsonio.matrix_json(v.basis))}"
                for i, (v, lay) in enumerate(zip(g.vertices, g.layers))]
        return "\n".join(["index\tlayer\thash\tbasis", *rows]) + "\n"
    return jsonio.graph_json(g)


def cmd_adjacent(args, cfg):
    a, b = _lattice(cfg, args.a), _lattice(cfg, args.b)
    out = {"adjacent": adjacent(a, b)}
    try:
        out["rel_pos"] = rel_pos(a, b)
    except PreconditionError:
        out["rel_pos"] = None
    return out


def cmd_neighbors(args, cfg):
    L = _lattice(cfg, args.lattice)
    return [jsonio.lattice_json(M) for M in sorted(neighbors(L, cfg.override), key=LatticeClass.sort_key)]


def cmd_simplex(args, cfg):
    classes = _list_of(jsonio.lattice_from_json, args.classes, cfg.p)
    return {"simplex": is_simplex(classes)}


def cmd_phi(args, cfg):
    return jsonio.point_json(phi(_lattice(cfg, args.lattice)))


def cmd_phi_inv(args, cfg):
    return jsonio.lattice_json(phi_inv(_point(cfg, args.point), cfg.p))


def cmd_limit_ray(args, cfg):
    r = _parse(jsonio.ray_from_json, args.ray, cfg.n)
    lim = ray_limit(r)
    out = {"limit": jsonio.point_json(lim)}
    if args.certify:
        out["tail_starts"] = [ray_tail_certificate(r, fundamental_nbhd(lim, k)) for k in range(1, args.certify + 1)]
    return out


def cmd_limit_lattices(args, cfg):
    s = _parse(jsonio.seq_from_json, args.seq, cfg.p)
    L = lattice_seq_limit(s)
    return {"limit": jsonio.lattice_json(L), "apartment_point": jsonio.point_json(phi(L))}


def cmd_f_value(args, cfg):
    root = tuple(_index_list(args.root))
    if len(root) != 2:
        raise jsonio.SchemaError("--root expects two indices i,j")
    if args.points:
        omega = _list_of(jsonio.point_from_json, args.points, cfg.n)
        if args.oracle:
            return jsonio.ext_json(max((f_value_oracle(root, x) for x in omega), key=_ext_key))
        return jsonio.ext_json(f_set(root, omega))
    x = _point(cfg, args.point)
    return jsonio.ext_json(f_value_oracle(root, x) if args.oracle else f_value(root, x))


def cmd_nbhd_contains(args, cfg):
    spec = _parse(jsonio.nbhd_from_json, args.nbhd)
    return {"contains": nbhd_contains(spec, _point(cfg, args.point))}


def cmd_chart(args, cfg):
    x = _point(cfg, args.point)
    i = args.i if args.i is not None else corners_of(x)[0]
    return {"i": i, "chart": jsonio.chart_json(corner_chart(i, x))}


def cmd_chart_inv(args, cfg):
    chart = _parse(jsonio.chart_from_json, args.chart)
    n = _need_n(cfg) if cfg.n else len(chart) + 1
    return jsonio.point_json(corner_chart_inv(args.i, chart, n))


def cmd_contract(args, cfg):
    return jsonio.point_json(contract(_point(cfg, args.point), _rational(args.t)))


def _group_element(cfg, text):
    return _parse(jsonio.element_from_json, text)


def _as_proj(g, n, p):
    if isinstance(g, RootGroupElement):
        return g.to_proj(n)
    if isinstance(g, MonomialElement):
        return g.to_proj(p)
    return g


def cmd_act(args, cfg):
    g = _group_element(cfg, args.element)
    x = _parse(jsonio.any_point_from_json, args.point, cfg.p, cfg.n)
    if isinstance(x, ApartmentPoint):
        if isinstance(g, MonomialElement):
            return jsonio.point_json(act_monomial(g, x))
        y = act(_as_proj(g, x.n, cfg.p), from_apartment(x, cfg.p))
        try:
            return jsonio.point_json(to_apartment(y))
        except PreconditionError:
            return jsonio.norm_json(y)
    return jsonio.any_point_json(act(_as_proj(g, x.n, x.p), x))


def _norm_of(x, p):
    if isinstance(x, NormPoint):
        return x
    if isinstance(x, LatticeClass):
        return from_lattice(x)
    return from_apartment(x, p)


def cmd_stabilizes(args, cfg):
    g = _group_element(cfg, args.element)

    def decode(obj):
        return jsonio.any_point_from_json(obj, cfg.p, cfg.n)

    points = _list_of(decode, args.points)
    n = points[0].n
    out = {"stabilizes": stabilizes_set(_as_proj(g, n, cfg.p), [_norm_of(x, cfg.p) for x in points])}
    apartment = [x for x in points if isinstance(x, ApartmentPoint)]
    out["star_condition"] = star_condition(apartment) if len(apartment) == len(points) else None
    return out


def cmd_common_apartment(args, cfg):
    x, y = _lattice(cfg, args.x), _lattice(cfg, args.y)
    frame = common_frame(x, y)
    return {"frame": jsonio.frame_json(frame), "verified": verify_frame(frame, x, y)}


def cmd_restrict(args, cfg):
    g = _group_element(cfg, args.element)
    g = _as_proj(g, _need_n(cfg) if isinstance(g, RootGroupElement) else None, cfg.p)
    h = restrict(g, _index_list(args.I))
    out = {"element": jsonio.element_json(h)}
    u = as_root_element(h)
    if u is not None:
        out["root_element"] = jsonio.element_json(u)
        out["psi"] = jsonio.ext_json(psi(u, cfg.p))
    return out


def cmd_selftest(args, cfg):
    results = run_all(cfg.seed, args.scale)
    failed = sum(not r.passed for r in results)
    lines = [r.line() for r in results]
    lines.append(f"{len(results) - failed}/{len(results)} criteria passed (seed {cfg.seed})")
    return _Report("\n".join(lines) + "\n", 1 if failed else 0)


@dataclass
class _Report:
    text: str
    status: int


def _need_n(cfg: Config) -> int:
    if cfg.n is None:
        raise UsageError("this command needs --n")
    return cfg.n


COMMANDS = {
    "ball": cmd_ball,
    "adjacent": cmd_adjacent,
    "neighbors": cmd_neighbors,
    "simplex": cmd_simplex,
    "phi": cmd_phi,
    "phi-inv": cmd_phi_inv,
    "limit-ray": cmd_limit_ray,
    "limit-lattices": cmd_limit_lattices,
    "f-value": cmd_f_value,
    "nbhd-contains": cmd_nbhd_contains,
    "chart": cmd_chart,
    "chart-inv": cmd_chart_inv,
    "contract": cmd_contract,
    "act": cmd_act,
    "stabilizes": cmd_stabilizes,
    "common-apartment": cmd_common_apartment,
    "restrict": cmd_restrict,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=argparse.SUPPRESS,
                        help=f"prime (default: ${PRIME_ENV} or 3)")
    common.add_argument("--n", type=int, default=argparse.SUPPRESS, help="ambient dimension")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="sampling seed (default 0)")
    common.add_argument("--override-guardrails", action="store_true", default=argparse.SUPPRESS,
                        help="allow n > 4 or p > 7 in enumeration")
    common.add_argument("--format", choices=("json", "dot", "table"), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="btcompact", parents=[common],
                                     description="Exact computations in the compactified building of PGL_n(Q_p).")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    c = add("ball", "graph ball around a lattice class")
    c.add_argument("--center", help="lattice class JSON (default: standard class)")
    c.add_argument("--radius", type=int, required=True)
    c.add_argument("--sidecar", help="write the hash -> class mapping to this file")

    c = add("adjacent", "adjacency and relative position of two classes")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)

    c = add("neighbors", "all classes adjacent to a class")
    c.add_argument("--lattice", required=True)

    c = add("simplex", "whether a set of classes is pairwise adjacent")
    c.add_argument("--classes", required=True, help="JSON list of lattice classes")

    c = add("phi", "apartment vertex of a diagonal class")
    c.add_argument("--lattice", required=True)

    c = add("phi-inv", "diagonal class of an integral apartment point")
    c.add_argument("--point", required=True)

    c = add("limit-ray", "limit of an affine ray in the compactified apartment")
    c.add_argument("--ray", required=True)
    c.add_argument("--certify", type=int, default=0, metavar="K",
                   help="also certify tails in the first K basic neighbourhoods")

    c = add("limit-lattices", "limit of a nested diagonal lattice sequence")
    c.add_argument("--seq", required=True)

    c = add("f-value", "filtration level f_x(a) or f_Omega(a)")
    c.add_argument("--root", required=True, help="i,j")
    grp = c.add_mutually_exclusive_group(required=True)
    grp.add_argument("--point")
    grp.add_argument("--points", help="JSON list of points (finite set Omega)")
    c.add_argument("--oracle", action="store_true", help="use the closure feasibility computation")

    c = add("nbhd-contains", "membership in a basic open set")
    c.add_argument("--nbhd", required=True)
    c.add_argument("--point", required=True)

    c = add("chart", "corner chart of a point")
    c.add_argument("--point", required=True)
    c.add_argument("--i", type=int, help="corner index (default: least corner containing the point)")

    c = add("chart-inv", "point with the given corner chart")
    c.add_argument("--i", type=int, required=True)
    c.add_argument("--chart", required=True, help='JSON object, e.g. {"2":"2","3":"inf"}')

    c = add("contract", "contraction r(x, t)")
    c.add_argument("--point", required=True)
    c.add_argument("--t", required=True)

    c = add("act", "group element acting on a point")
    c.add_argument("--element", required=True)
    c.add_argument("--point", required=True)

    c = add("stabilizes", "whether g fixes every point of a finite set")
    c.add_argument("--element", required=True)
    c.add_argument("--points", required=True)

    c = add("common-apartment", "frame of an apartment containing two vertices")
    c.add_argument("--x", required=True, help="lattice class of any rank")
    c.add_argument("--y", required=True, help="full-rank lattice class")

    c = add("restrict", "restriction of g to V_I")
    c.add_argument("--element", required=True)
    c.add_argument("--I", required=True, help="comma separated indices")

    c = add("selftest", "run every property suite")
    c.add_argument("--scale", type=float, default=1.0, help="multiply sample counts")
    return parser


def _config(ns) -> Config:
    p = getattr(ns, "p", None)
    if p is None:
        env = os.environ.get(PRIME_ENV)
        try:
            p = int(env) if env else 3
        except ValueError:
            raise UsageError(f"${PRIME_ENV} must be an integer") from None
    check_prime(p)
    override = getattr(ns, "override_guardrails", False)
    n = getattr(ns, "n", None)
    if n is not None and not override and not 2 <= n <= MAX_N:
        raise PreconditionError(f"n must satisfy 2 <= n <= {MAX_N} (pass --override-guardrails)")
    return Config(p, n, getattr(ns, "seed", 0), override, getattr(ns, "format", None))


def _render(payload, fmt: str | None) -> str:
    if isinstance(payload, str) and payload.endswith("\n"):
        return payload
    if fmt == "table":
        if isinstance(payload, dict):
            return "".join(f"{k}\t{json.dumps(v) if not isinstance(v, str) else v}\n" for k, v in payload.items())
        if isinstance(payload, list):
            return "".join(json.dumps(v) + "\n" for v in payload)
        return f"{payload}\n"
    return jsonio.dumps(payload) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _config(ns)
        if cfg.fmt == "dot" and ns.command != "ball":
            raise UsageError("--format dot is only available for ball")
        payload = COMMANDS[ns.command](ns, cfg)
        status = 0
        if isinstance(payload, _Report):
            payload, status = payload.text, payload.status
        sys.stdout.write(_render(payload, cfg.fmt))
        return status
    except (jsonio.SchemaError, UsageError) as exc:
        print(f"btcompact: error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"btcompact: precondition violated: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
