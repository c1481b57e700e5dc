"""``ncalc`` command line: load models, run checks, print canonical JSON reports.

Exit codes: 0 pass, 1 fail (with witness), 2 usage or parse error, 3 untestable.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import affine, formal, forms, io
from .matrix import MatrixSeries, invert_rational
from .series import SeriesError
from .space import SpaceError

EXIT = {"pass": 0, "fail": 1, "untestable": 3}
DEFAULT_ORDER = 6
ORDER_CAP = 10


class UsageError(Exception):
    pass


class Ctx:
    """Collects input digests and builds the report."""

    def __init__(self, argv: list[str], timing: bool):
        self.argv = argv
        self.inputs: dict = {}
        self.timing = timing
        self.t0 = time.perf_counter()

    def load(self, path: str):
        text = Path(path).read_text()
        self.inputs[path] = io.digest(text)
        return io.read_json(path)

    def report(self, outcome: str, **result) -> dict:
        rep = {"command": self.argv, "inputs": self.inputs, "outcome": outcome, "result": result}
        if self.timing:
            rep["timing_ms"] = int((time.perf_counter() - self.t0) * 1000)
        return rep


def _path_arg(s: str | None) -> list[str] | None:
    return None if s is None else s.split("|")


def _ser_path(p) -> list:
    return list(p.points)


def _max_order() -> int:
    env = os.environ.get("NCALC_MAX_ORDER")
    if env is None:
        return ORDER_CAP
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"NCALC_MAX_ORDER={env!r} is not an integer") from None


def _order(args, default: int | None) -> int | None:
    n = args.order if args.order is not None else default
    if n is not None:
        cap = _max_order()
        if n > cap:
            raise UsageError(f"order {n} exceeds the cap {cap} (set NCALC_MAX_ORDER to raise it)")
        if n < 1:
            raise UsageError("order must be positive")
    return n


# ------------------------------------------------------------------ space


def cmd_space_check(args, ctx: Ctx) -> dict:
    data = ctx.load(args.file)
    try:
        sp = io.space_from_json(data)
    except io.FormatError as exc:
        return ctx.report("fail", error=str(exc), location=exc.location)
    return ctx.report(
        "pass",
        space=io.space_to_json(sp),
        components=[list(c) for c in sp.components()],
    )


# ------------------------------------------------------------------ forms


def _load_form(args, ctx):
    sp = io.space_from_json(ctx.load(args.space))
    return sp, io.form_from_json(ctx.load(args.form), sp)


def cmd_form_check(args, ctx: Ctx) -> dict:
    sp, w = _load_form(args, ctx)
    g = w.group
    closed = forms.is_closed(w)
    quads = forms.quadrangle_report(w)
    L = args.max_len
    if args.base is not None:
        sp.index(args.base)
        pairs = [(args.base, y) for y in sp.infinity_monad(args.base)]
    else:
        pairs = []
        for x in sp.vertices:
            dist = sp.distances(x)
            pairs += [(x, y) for y in sp.vertices if sp.index(y) > sp.index(x) and dist.get(y, L + 1) <= L]
    witness = None
    for x, y in pairs:
        rep = forms.path_independence_check(w, x, y, L)
        if rep.witness is not None:
            (p0, v0), (p1, v1) = rep.witness
            witness = {"paths": [_ser_path(p0), _ser_path(p1)], "values": [g.serialize(v0), g.serialize(v1)]}
            break
    ok = closed.ok and quads.ok and witness is None
    return ctx.report(
        "pass" if ok else "fail",
        closed=closed.ok,
        closedness_violations=[list(t) for t in closed.violations],
        quadrangle_defects=[
            {"quadrangle": list(q), "defect": g.serialize(forms.quadrangle_defect(w, *q))} for q in quads.violations
        ],
        path_independence={"max_len": L, "pairs_checked": len(pairs), "witness": witness},
    )


def cmd_form_integrate(args, ctx: Ctx) -> dict:
    sp, w = _load_form(args, ctx)
    g = w.group
    base = args.base if args.base is not None else sp.vertices[0]
    sp.index(base)
    try:
        f = forms.primitive(w, base, tree=args.tree)
    except forms.PrimitiveConflict as exc:
        return ctx.report(
            "fail",
            conflict={
                "edge": list(exc.edge),
                "tree_paths": [_ser_path(p) for p in exc.paths],
                "expected": g.serialize(exc.expected),
                "found": g.serialize(exc.found),
            },
        )
    return ctx.report("pass", base=base, primitive={v: g.serialize(f(v)) for v in f.values})


# ------------------------------------------------------------------ affine


def _load_conn(args, ctx) -> affine.AffineConnection:
    data = ctx.load(args.conn)
    return io.conn_from_json(data, base=Path(args.conn).parent)


def cmd_affine_check(args, ctx: Ctx) -> dict:
    conn = _load_conn(args, ctx)
    try:
        ax = affine.validate_axioms(conn)
    except affine.TotalityError as exc:
        return ctx.report("fail", totality_failure="|".join(exc.triple))
    violations = {}
    for name, t in ax.violations:
        violations.setdefault(name, []).append("|".join(t))
    result = {"connection": conn.name, "vertices": len(conn.space), "axioms": ax.ok,
              "violations": violations, "symmetric": ax.symmetric}
    if ax.asymmetric:
        result["asymmetric_example"] = "|".join(ax.asymmetric[0])
    if not ax.ok:
        return ctx.report("fail", **result)
    if not ax.symmetric:
        result["weakly_flat"] = None
        return ctx.report("pass", **result)
    wf = affine.weak_flatness_check(conn)
    result["weakly_flat"] = wf.ok
    result["flatness_violations"] = len(wf.violations)
    if wf.violations:
        result["flatness_witness"] = list(wf.violations[0])
    return ctx.report("pass" if wf.ok else "fail", **result)


def cmd_affine_grid(args, ctx: Ctx) -> dict:
    conn = _load_conn(args, ctx)
    if args.max_len is not None:
        if None in (args.at, args.y_end, args.z_end):
            raise UsageError("codomain invariance needs --at, --y-end and --z-end")
        rep = affine.grid2_codomain_invariance(conn, args.at, args.y_end, args.z_end, args.max_len)
        if rep.reason:
            return ctx.report("untestable", reason=rep.reason)
        if rep.witness:
            (pa, ca), (pb, cb) = rep.witness
            return ctx.report("fail", witness=[
                {"y_path": _ser_path(pa[0]), "z_path": _ser_path(pa[1]), "codomain": ca},
                {"y_path": _ser_path(pb[0]), "z_path": _ser_path(pb[1]), "codomain": cb},
            ])
        return ctx.report("pass", codomain=rep.value)
    if args.y_path is None or args.z_path is None:
        raise UsageError("grid needs --y-path and --z-path (or --max-len for invariance)")
    if args.x_path is not None:
        g3 = affine.grid3(conn, _path_arg(args.x_path), _path_arg(args.y_path), _path_arg(args.z_path))
        return ctx.report("pass", grid=[[list(r) for r in plane] for plane in g3.w], codomain=g3.codomain)
    g = affine.grid2(conn, _path_arg(args.y_path), _path_arg(args.z_path))
    result = {"grid": [list(r) for r in g.u], "codomain": g.codomain}
    if conn.symmetric:
        t = affine.grid2(conn, _path_arg(args.z_path), _path_arg(args.y_path))
        result["transpose_ok"] = t.u == g.transpose()
    return ctx.report("pass" if result.get("transpose_ok", True) else "fail", **result)


def cmd_affine_cube(args, ctx: Ctx) -> dict:
    conn = _load_conn(args, ctx)
    if args.points:
        if len(args.points) != 4:
            raise UsageError("--points takes p0 p1 p2 p4")
        rep = affine.cube_check(conn, *args.points)
        if rep.reason:
            return ctx.report("untestable", reason=rep.reason)
        result = {"values": rep.values, "failing": rep.violations}
        if rep.cube:
            result["cube"] = {str(k): v for k, v in sorted(rep.cube.items())}
        return ctx.report("pass" if rep.ok else "fail", **result)
    rep = affine.cube_check_all(conn)
    if rep.reason:
        return ctx.report("untestable", reason=rep.reason)
    result = {"quadruples_failing": len(rep.violations)}
    if rep.violations:
        q, eqs = rep.violations[0]
        result["witness"] = {"points": list(q), "failing": eqs}
        result["equations_failing"] = sorted({e for _q, es in rep.violations for e in es})
    return ctx.report("pass" if rep.ok else "fail", **result)


def cmd_affine_heap(args, ctx: Ctx) -> dict:
    conn = _load_conn(args, ctx)
    rep = affine.heap_suite(conn, samples=args.samples, seed=args.seed)
    if rep.reason:
        return ctx.report("untestable", reason=rep.reason, seed=args.seed)
    result = dict(rep.value)
    result["violations"] = len(rep.violations)
    if rep.violations:
        result["witness"] = [str(v) for v in rep.violations[0]]
        return ctx.report("fail", **result)
    heap = affine.Heap(conn, check=False)
    o = conn.space.vertices[0]
    orders: dict = {}
    for x in conn.space.vertices:
        k, acc = 1, x
        while acc != o:
            acc = heap.add(o, acc, x)
            k += 1
        orders[str(k)] = orders.get(str(k), 0) + 1
    result["base"] = o
    result["element_orders"] = orders
    return ctx.report("pass", **result)


# ------------------------------------------------------------------ jets


def _zero_text(rs) -> list:
    return [s.to_text() for s in rs]


def _matrix_text(m) -> list:
    return [[s.to_text() for s in r] for r in m.rows]


def cmd_jet_verify(args, ctx: Ctx) -> dict:
    N = _order(args, None)
    given = [a for a in ("omega", "gamma", "map") if getattr(args, a)]
    if len(given) != 1:
        raise UsageError("jet verify needs exactly one of --omega, --gamma, --map")
    if args.omega or args.map:
        if args.omega:
            w = io.omega_from_json(ctx.load(args.omega))
            if N is not None:
                w = formal.CoordOneForm([m.truncate(N) for m in w.omega])
        else:
            f = io.matrix_map_from_json(ctx.load(args.map))
            if N is not None:
                f = f.truncate(N)
            w = formal.maurer_cartan_from_map(f)
        res = formal.basicx_verify(w)
        tensor = formal.closedness_residual(w)
        pairs = formal.closedness_residual_pairs(w)
        agree = all(tensor[k].truncate(pairs[k].order) == pairs[k] for k in tensor)
        closed = all(v.is_zero() for v in tensor.values())
        swap = formal.quadrangle_swap_defect(w)
        ok = res.is_zero() and agree and (swap.is_zero() == closed)
        result = {
            "order": w.order,
            "basicx_residual": "0" if res.is_zero() else _matrix_text(res),
            "closed": closed,
            "closedness_residual": {f"{a}|{b}": _matrix_text(v) for (a, b), v in tensor.items()},
            "routes_agree": agree,
            "quadrangle_swap_invariant": swap.is_zero(),
        }
        if args.map:
            try:
                p = formal.formal_primitive(w, w.order + 1)
                c_inv = MatrixSeries.constant(f.spec, invert_rational(f.constant_matrix()), f.order)
                result["primitive_roundtrip"] = p == (c_inv @ f)
            except formal.ObstructionError as exc:
                result["primitive_roundtrip"] = False
                result["obstruction"] = {"degree": exc.degree, "component": list(exc.component)}
            ok = ok and closed and result["primitive_roundtrip"]
        return ctx.report("pass" if ok else "fail", **result)

    G = io.gamma_from_json(ctx.load(args.gamma))
    if N is not None:
        G = G.truncate(N)
    tor = formal.torsion(G)
    if tor:
        return ctx.report("untestable", reason="Gamma is not symmetric", symmetric=False,
                          torsion={f"{c}|{a}|{b}": s.to_text() for (c, a, b), s in sorted(tor.items())})
    res = formal.affine_flatness_residual(G)
    curv = formal.curvature_tensor(G)
    flat = all(s.is_zero() for s in res)
    agree = flat == (not curv)
    scal = {}
    for t in ("1/2", "2", "-1"):
        r = formal.second_order_scalar_verify(G, Fraction(t))
        scal[t] = {"residual": "0" if all(s.is_zero() for s in r.residual) else _zero_text(r.residual),
                   "swap_invariant": r.swap_invariant}
    scal_ok = all(v["residual"] == "0" and v["swap_invariant"] for v in scal.values())
    result = {"order": G.order, "symmetric": True, "flat": flat, "conventions_agree": agree,
              "curvature": {"|".join(map(str, k)): s.to_text() for k, s in sorted(curv.items())},
              "scalar_law": scal}
    ok = agree and scal_ok
    if flat:
        cube = formal.cube_check(G)
        result["cube_lemma"] = cube.ok
        result["cube_failing"] = cube.violations
        ok = ok and cube.ok
    return ctx.report("pass" if ok else "fail", **result)


def _write_out(path: str | None, data: dict):
    if path:
        Path(path).write_text(io.canonical(data))


def cmd_jet_primitive(args, ctx: Ctx) -> dict:
    if not args.omega:
        raise UsageError("jet primitive needs --omega")
    w = io.omega_from_json(ctx.load(args.omega))
    N = _order(args, min(w.order + 1, DEFAULT_ORDER))
    try:
        f = formal.formal_primitive(w, N)
    except formal.ObstructionError as exc:
        return ctx.report("fail", obstruction={"degree": exc.degree, "component": list(exc.component),
                                              "defect": _matrix_text(exc.value)})
    except formal.FormalError as exc:
        raise UsageError(str(exc)) from None
    data = io.matrix_map_to_json(f)
    _write_out(args.out, data)
    return ctx.report("pass", primitive=data)


def cmd_jet_chart(args, ctx: Ctx) -> dict:
    if not args.gamma:
        raise UsageError("jet chart needs --gamma")
    G = io.gamma_from_json(ctx.load(args.gamma))
    N = _order(args, min(G.order + 2, DEFAULT_ORDER))
    if formal.torsion(G):
        return ctx.report("untestable", reason="Gamma is not symmetric")
    try:
        chart = formal.formal_chart(G, N)
    except formal.ObstructionError as exc:
        return ctx.report("fail", obstruction={"degree": exc.degree, "component": list(exc.component),
                                              "defect": exc.value.to_text()})
    except formal.FormalError as exc:
        raise UsageError(str(exc)) from None
    triv = formal.trivialization_residual(chart, G)
    ok = all(s.is_zero() for s in triv)
    data = io.chart_to_json(chart)
    _write_out(args.out, data)
    return ctx.report("pass" if ok else "fail", chart=data,
                      trivialization_residual="0" if ok else _zero_text(triv))


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ncalc", description=__doc__.splitlines()[0])
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    sub = p.add_subparsers(dest="group", required=True)

    sp = sub.add_parser("space").add_subparsers(dest="cmd", required=True)
    c = sp.add_parser("check")
    c.add_argument("file")
    c.set_defaults(fn=cmd_space_check)

    fp = sub.add_parser("form").add_subparsers(dest="cmd", required=True)
    for name, fn in (("check", cmd_form_check), ("integrate", cmd_form_integrate)):
        c = fp.add_parser(name)
        c.add_argument("--space", required=True)
        c.add_argument("--form", required=True)
        c.add_argument("--base")
        c.add_argument("--max-len", type=int, default=4)
        if name == "integrate":
            c.add_argument("--tree", choices=["bfs", "dfs"], default="bfs")
        c.set_defaults(fn=fn)

    ap = sub.add_parser("affine").add_subparsers(dest="cmd", required=True)
    c = ap.add_parser("check")
    c.add_argument("--conn", required=True)
    c.set_defaults(fn=cmd_affine_check)
    c = ap.add_parser("grid")
    c.add_argument("--conn", required=True)
    c.add_argument("--y-path", help="'|'-separated vertex ids")
    c.add_argument("--z-path")
    c.add_argument("--x-path", help="third path for a 3-dimensional grid")
    c.add_argument("--max-len", type=int, help="check codomain invariance over all path pairs")
    c.add_argument("--at")
    c.add_argument("--y-end")
    c.add_argument("--z-end")
    c.set_defaults(fn=cmd_affine_grid)
    c = ap.add_parser("cube")
    c.add_argument("--conn", required=True)
    c.add_argument("--points", nargs="+", metavar="P")
    c.set_defaults(fn=cmd_affine_cube)
    c = ap.add_parser("heap")
    c.add_argument("--conn", required=True)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--samples", type=int, default=200)
    c.set_defaults(fn=cmd_affine_heap)

    jp = sub.add_parser("jet").add_subparsers(dest="cmd", required=True)
    for name, fn in (("verify", cmd_jet_verify), ("primitive", cmd_jet_primitive), ("chart", cmd_jet_chart)):
        c = jp.add_parser(name)
        c.add_argument("--order", type=int)
        c.add_argument("--omega")
        c.add_argument("--gamma")
        c.add_argument("--map")
        if name != "verify":
            c.add_argument("--out", help="also write the solved series to this file")
        c.set_defaults(fn=fn)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    ctx = Ctx([a for a in argv if a != "--timing"], args.timing)
    try:
        report = args.fn(args, ctx)
    except (UsageError, io.FormatError, SpaceError, SeriesError, formal.FormalError,
            forms.FormError, affine.AffineError, FileNotFoundError) as exc:
        sys.stderr.write(f"ncalc: {exc}\n")
        return 2
    sys.stdout.write(io.canonical(report))
    return EXIT[report["outcome"]]


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
