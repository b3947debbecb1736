"""``gpd`` command line: diagrams, graded diagrams, landscapes, distances, checks.

Exit codes: 0 success, 1 usage error, 2 input/parse error, 3 a verification
check failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

from ._numbers import fmt, parse_number
from .grading import graded_diagram, graded_rank
from .landscape import landscape_from_graded
from .modules import (
    Barcode,
    Grid,
    MapChain,
    NotRealizableError,
    RankTable,
    SignedDiagram,
    diagram_from_rank,
    extend_to_grid,
    rank_from_barcode,
    rank_from_mapchain,
)
from .transport import CostParams, is_metric, signed_wasserstein, wasserstein

log = logging.getLogger("gradedpd")

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VERIFY = 0, 1, 2, 3


class ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Input


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def parse_barcode(text: str, m: int | None = None, source: str = "<input>") -> Barcode:
    """Lines of ``birth death [multiplicity]``; ``#`` starts a comment."""
    bars = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if len(fields) not in (2, 3):
                raise ValueError(f"expected 'birth death multiplicity', got {len(fields)} fields")
            nums = [int(f) for f in fields]
            if len(nums) == 2:
                nums.append(1)
            if not 0 <= nums[0] < nums[1]:
                raise ValueError("need 0 <= birth < death")
            if nums[2] < 1:
                raise ValueError("multiplicity must be positive")
            if m is not None and nums[1] > m + 1:
                raise ValueError(f"death {nums[1]} exceeds m+1 = {m + 1}")
        except ValueError as exc:
            raise ParseError(f"{source}:{lineno}: {exc}: {raw.strip()!r}") from None
        bars.append(tuple(nums))
    return Barcode.from_bars(bars, m=m)


def parse_mapchain(text: str, source: str = "<input>") -> MapChain:
    """JSON object ``{"field": "GF(2)", "dims": [...], "maps": [[[...]]]}``."""
    try:
        obj = json.loads(text)
        return MapChain(tuple(obj["dims"]), tuple(obj["maps"]), obj.get("field", "GF(2)"))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{source}: invalid map chain: {exc}") from None


def parse_grid(text: str, source: str = "<grid>") -> Grid:
    pts = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            pts.append(parse_number(line))
        except ValueError:
            raise ParseError(f"{source}:{lineno}: not a number: {raw.strip()!r}") from None
    try:
        return Grid(tuple(pts))
    except ValueError as exc:
        raise ParseError(f"{source}: {exc}") from None


@dataclass
class Loaded:
    rank: RankTable
    grid: Grid


def load_module(path: str, grid_spec: str = "identity", m: int | None = None) -> Loaded:
    text = _read_text(path)
    grid = None if grid_spec == "identity" else parse_grid(_read_text(grid_spec), grid_spec)
    if grid is not None:
        if m is not None and m != grid.m:
            raise ParseError(f"--m {m} disagrees with the grid ({len(grid)} points, m = {grid.m})")
        m = grid.m
    if text.lstrip().startswith("{"):
        mc = parse_mapchain(text, path)
        if m is not None and mc.m != m:
            raise ParseError(f"{path}: map chain has m = {mc.m}, expected {m}")
        rank = rank_from_mapchain(mc)
    else:
        rank = rank_from_barcode(parse_barcode(text, m, path))
    return Loaded(rank, grid if grid is not None else Grid.identity(rank.m))


# ---------------------------------------------------------------------------
# Output


def _coord(x, grid: Grid, infinite: bool) -> str:
    if infinite and x == grid.points[-1]:
        return "inf"
    return fmt(x)


def _json_coord(x, grid: Grid, infinite: bool):
    if infinite and x == grid.points[-1]:
        return "inf"
    if isinstance(x, int):
        return x
    return float(x)


def diagram_lines(d: SignedDiagram, grid: Grid, infinite: bool, prefix: str = "") -> list[str]:
    return [f"{prefix}{_coord(b, grid, infinite)} {_coord(e, grid, infinite)} {v}" for (b, e), v in d.items()]


def diagram_json(d: SignedDiagram, grid: Grid, infinite: bool) -> list[dict]:
    return [
        {"birth": _json_coord(b, grid, infinite), "death": _json_coord(e, grid, infinite), "value": v}
        for (b, e), v in d.items()
    ]


def _emit(args, text: str) -> None:
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)


def _render(args, lines: list[str], obj) -> str:
    if args.format == "json":
        return json.dumps(obj, indent=2, sort_keys=False) + "\n"
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------------------
# Commands


def cmd_pd(args) -> int:
    loaded = load_module(args.input, args.grid, args.m)
    pd = extend_to_grid(diagram_from_rank(loaded.rank), loaded.grid)
    lines = diagram_lines(pd, loaded.grid, args.infinite_death)
    _emit(args, _render(args, lines, {"points": diagram_json(pd, loaded.grid, args.infinite_death)}))
    return EXIT_OK


def cmd_gpd(args) -> int:
    loaded = load_module(args.input, args.grid, args.m)
    gd = graded_diagram(graded_rank(loaded.rank)).on_grid(loaded.grid)
    inf = args.infinite_death
    if args.sum:
        total = gd.total()
        _emit(args, _render(args, diagram_lines(total, loaded.grid, inf), {"points": diagram_json(total, loaded.grid, inf)}))
        return EXIT_OK
    if args.k is not None:
        lvl = gd.level(args.k)
        _emit(args, _render(args, diagram_lines(lvl, loaded.grid, inf), {"k": args.k, "points": diagram_json(lvl, loaded.grid, inf)}))
        return EXIT_OK
    lines = []
    for k, lvl in enumerate(gd.levels, start=1):
        lines += diagram_lines(lvl, loaded.grid, inf, prefix=f"{k} ")
    obj = {"levels": [{"k": k, "points": diagram_json(lvl, loaded.grid, inf)} for k, lvl in enumerate(gd.levels, 1)]}
    _emit(args, _render(args, lines, obj))
    return EXIT_OK


def cmd_landscape(args) -> int:
    loaded = load_module(args.input, args.grid, args.m)
    gd = graded_diagram(graded_rank(loaded.rank))
    L = landscape_from_graded(gd, loaded.grid)
    ks = [args.k] if args.k is not None else list(range(1, L.K + 1))
    blocks = ["".join(f"{k} {fmt(t)} {fmt(h)}\n" for t, h in L.points(k)) for k in ks if L.points(k)]
    obj = {"levels": [{"k": k, "points": [[float(t), float(h)] for t, h in L.points(k)]} for k in ks]}
    if args.format == "json":
        _emit(args, json.dumps(obj, indent=2) + "\n")
    else:
        _emit(args, "\n".join(blocks))
    if args.plot_data:
        polylines = [
            {"k": k, "t": [float(t) for t, _ in L.points(k)], "h": [float(h) for _, h in L.points(k)]} for k in ks
        ]
        Path(args.plot_data).write_text(json.dumps({"polylines": polylines}, indent=2) + "\n")
    return EXIT_OK


def _coupling_lines(coupling) -> list[str]:
    return [f"pair {fmt(z[0])} {fmt(z[1])} -> {fmt(w[0])} {fmt(w[1])} x{k}" for z, w, k in coupling.pairs]


def _num(x):
    return int(x) if isinstance(x, int) else float(x)


def cmd_dist(args) -> int:
    cp = CostParams(args.p, args.q)
    a = load_module(args.input_a, args.grid, args.m)
    b = load_module(args.input_b, args.grid, args.m)
    D = extend_to_grid(diagram_from_rank(a.rank), a.grid)
    E = extend_to_grid(diagram_from_rank(b.rank), b.grid)
    W, coupling = wasserstein(D, E, cp)
    lines = [f"W {fmt(W)}"]
    obj: dict = {"p": cp.p, "q": cp.q, "W": _num(W)}
    if args.witness:
        lines += _coupling_lines(coupling)
        obj["coupling"] = [[list(map(float, z)), list(map(float, w)), k] for z, w, k in coupling.pairs]
    if args.graded:
        if not is_metric(cp):
            print(f"warning: W_{{{cp.p},{cp.q}}} with p > 1 is not a metric on graded diagrams", file=sys.stderr)
        gD = graded_diagram(graded_rank(a.rank)).on_grid(a.grid)
        gE = graded_diagram(graded_rank(b.rank)).on_grid(b.grid)
        K = max(gD.K, gE.K)
        levels = []
        for k in range(1, K + 1):
            Wk, ck = signed_wasserstein(gD.level(k), gE.level(k), cp)
            levels.append(Wk)
            lines.append(f"W_{k} {fmt(Wk)}")
            if args.witness:
                lines += _coupling_lines(ck)
        total = sum(levels, 0)
        lines.append(f"sum {fmt(total)}")
        obj["levels"] = [_num(x) for x in levels]
        obj["sum"] = _num(total)
        obj["metric"] = is_metric(cp)
    _emit(args, _render(args, lines, obj))
    return EXIT_OK


def _instance(args) -> str:
    if args.suite == "triangle":
        return f"eps={args.eps} p={args.p} q={args.q} k={args.k or 1}"
    if args.sharp_K is not None:
        return f"sharp K={args.sharp_K}"
    return "see report"


def cmd_verify(args) -> int:
    from . import suites

    if args.suite == "consistency":
        report = suites.consistency_suite(args.seed, args.count)
    elif args.suite == "stability":
        if args.sharp_K is not None:
            report = suites.sharp_stability_suite(args.sharp_K)
        else:
            report = suites.stability_suite(args.seed, args.count)
    elif args.suite == "triangle":
        report = suites.triangle_suite(parse_number(args.eps), args.p, args.q, args.k or 1)
    else:
        report = suites.geodesic_suite(args.seed, args.count)
    text = json.dumps(report, indent=2) + "\n"
    _emit(args, text)
    if not report["ok"]:
        seeds = sorted({f["seed"] for f in report.get("failures", []) if "seed" in f})
        where = f"instance seeds {seeds}" if seeds else _instance(args)
        print(f"verification failed: suite {args.suite}, seed {args.seed}, {where}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gpd", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, inputs=("input",)):
        for name in inputs:
            p.add_argument(name, help="barcode file or JSON map chain; '-' reads stdin")
        p.add_argument("--grid", default="identity", help="file with one real per line, or 'identity'")
        p.add_argument("--m", type=int, default=None, help="grid size (default: inferred)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("-o", "--output", default=None, help="output file (default stdout)")
        p.add_argument("--infinite-death", action="store_true", help="print deaths at the last grid point as inf")

    p = sub.add_parser("pd", help="persistence diagram")
    common(p)
    p.set_defaults(func=cmd_pd)

    p = sub.add_parser("gpd", help="graded persistence diagram")
    common(p)
    p.add_argument("--k", type=int, default=None, help="only this level")
    p.add_argument("--sum", action="store_true", help="print the sum of all levels")
    p.set_defaults(func=cmd_gpd)

    p = sub.add_parser("landscape", help="persistence landscape critical points")
    common(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--plot-data", default=None, help="also write JSON polylines here")
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("dist", help="Wasserstein distance between two modules")
    common(p, inputs=("input_a", "input_b"))
    p.add_argument("--p", default="1")
    p.add_argument("--q", default="1")
    p.add_argument("--graded", action="store_true", help="also per-level signed distances and their sum")
    p.add_argument("--witness", action="store_true", help="print optimal couplings")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=("consistency", "stability", "triangle", "geodesic"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--sharp-K", dest="sharp_K", type=int, default=None)
    p.add_argument("--eps", default="0.5")
    p.add_argument("--p", default="2")
    p.add_argument("--q", default="2")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except ParseError as exc:
        print(f"gpd: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NotRealizableError as exc:
        print(f"gpd: not realizable: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"gpd: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
