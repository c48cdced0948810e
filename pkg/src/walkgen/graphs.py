"""Built-in test graphs and the JSON graph description format.

A description is either ``{"builtin": NAME, ...}`` or
``{"edges": [[u, v, re, im], ...], "root": 1, "v_transitive": false}``.
Weights may be numbers or ``"p/q"`` strings; ``im`` may be omitted.  An
optional ``"v"`` gives the target vertex (a lattice point for grids).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .errors import GraphFormatError, UsageError
from .grids import GridSpec, grid_oracle
from .scalars import GaussianRational, format_scalar, gauss, parse_scalar, to_exact
from .walks import EdgeListOracle, WeightOracle

__all__ = [
    "GraphChoice",
    "k2",
    "path3",
    "asymmetric_path3",
    "star5",
    "cycle",
    "random_graph",
    "zero_return_triangle",
    "cancelling_square",
    "BUILTINS",
    "builtin",
    "parse_graph",
    "load_graph",
    "dump_graph",
    "parse_target",
]


@dataclass
class GraphChoice:
    """An oracle together with the target vertex chosen for it (or None)."""

    oracle: WeightOracle
    v: int | None
    name: str = ""


def k2(weight=1) -> EdgeListOracle:
    """Single edge ``{1, 2}``; swapping the endpoints maps the root to 2."""
    return EdgeListOracle([(1, 2, weight)], v_transitive=True, witness="swap 1 and 2", name="k2")


def path3(weight=1) -> EdgeListOracle:
    """Path ``1 - 2 - 3`` with equal weights; reversal maps the root to 3."""
    return EdgeListOracle([(1, 2, weight), (2, 3, weight)], v_transitive=True,
                          witness="reversal 1 <-> 3", name="path3")


def asymmetric_path3(w12=1, w23=Fraction(1, 2)) -> EdgeListOracle:
    """Path ``1 - 2 - 3`` with unequal weights, declared transitive anyway.

    No weight-preserving bijection maps 1 to 3, so identities that need
    one fail here.
    """
    return EdgeListOracle([(1, 2, w12), (2, 3, w23)], v_transitive=True,
                          witness="declared without a valid bijection", name="asymmetric_path3")


def star5(weight=1) -> EdgeListOracle:
    """Root 1 joined to leaves 2..6."""
    return EdgeListOracle([(1, k, weight) for k in range(2, 7)], name="star5")


def cycle(n: int = 5, weight=Fraction(1, 2)) -> EdgeListOracle:
    """Cycle on ``1..n``; rotations make it transitive."""
    if n < 3:
        raise UsageError("a cycle needs at least 3 vertices")
    edges = [(k, k % n + 1, weight) for k in range(1, n + 1)]
    return EdgeListOracle(edges, v_transitive=True, witness="rotation", name=f"cycle{n}")


def random_graph(seed: int, n: int = 6, p: float = 0.4, signed: bool = True,
                 complex_weights: bool = False) -> EdgeListOracle:
    """Seeded random graph on ``1..n`` with small rational weights.

    Vertex 1 is always joined to vertex 2 so the root has a neighbour.
    """
    rng = random.Random(seed)

    def weight():
        num = rng.randint(1, 3) * (rng.choice((1, -1)) if signed else 1)
        re = Fraction(num, rng.randint(2, 5))
        if complex_weights and rng.random() < 0.5:
            return gauss(re, Fraction(rng.randint(-2, 2), rng.randint(2, 5)))
        return re

    edges = [(1, 2, weight())]
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            if (u, v) != (1, 2) and rng.random() < p:
                edges.append((u, v, weight()))
    return EdgeListOracle(edges, name=f"random{seed}")


def zero_return_triangle() -> EdgeListOracle:
    """Triangle whose return series sums to zero at ``x = 1``.

    Weights ``40i/41`` on ``{1,2}``, ``9i/41`` on ``{1,3}`` and 1 on
    ``{2,3}`` give ``B(x) = (1 - x^2) / (1 + (720/1681) x^3)``.  It is
    declared transitive so the zero-denominator rules can be exercised.
    """
    return EdgeListOracle(
        [(1, 2, gauss(0, Fraction(40, 41))), (1, 3, gauss(0, Fraction(9, 41))), (2, 3, 1)],
        v_transitive=True, witness="declared for degenerate-rule testing", name="zero_return_triangle",
    )


def cancelling_square() -> EdgeListOracle:
    """Four-cycle whose two routes from 1 to 4 cancel exactly.

    Every walk weight reaching vertex 4 sums to zero, so the series that
    avoid 4 coincide with the unrestricted ones.
    """
    h = Fraction(2, 5)
    return EdgeListOracle([(1, 2, h), (1, 3, h), (2, 4, h), (3, 4, -h)], v_transitive=True,
                          witness="declared for degenerate-rule testing", name="cancelling_square")


# name -> (factory, default target)
BUILTINS: dict[str, tuple[Callable[[], WeightOracle], int | None]] = {
    "k2": (k2, 2),
    "path3": (path3, 3),
    "asymmetric_path3": (asymmetric_path3, 3),
    "star5": (star5, 2),
    "cycle5": (lambda: cycle(5), 3),
    "zero_return_triangle": (zero_return_triangle, 2),
    "cancelling_square": (cancelling_square, 4),
}


def parse_target(text) -> tuple[int, ...]:
    """Parse ``"1,0,0"`` or a list into a tuple of ints."""
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    if isinstance(text, int):
        return (text,)
    parts = [p for p in str(text).replace(" ", "").split(",") if p != ""]
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise GraphFormatError(f"cannot parse target {text!r}") from exc


def builtin(name: str, d: int | None = None, v=None) -> GraphChoice:
    """Construct a named built-in graph.

    ``grid`` needs ``d``; its ``v`` is a lattice point (origin means no
    separate target).  Other builtins take ``v`` as a vertex id.
    """
    if name == "grid":
        if d is None:
            raise GraphFormatError("builtin grid needs a dimension d")
        target = parse_target(v) if v is not None else None
        spec = GridSpec(int(d), target)
        oracle = grid_oracle(spec)
        vid = None if spec.target_is_origin else oracle.target_id
        return GraphChoice(oracle, vid, f"grid{spec.d}")
    if name.startswith("random"):
        try:
            seed = int(name[len("random"):] or 0)
        except ValueError as exc:
            raise GraphFormatError(f"unknown builtin {name!r}") from exc
        vid = 6 if v is None else int(parse_target(v)[0])
        return GraphChoice(random_graph(seed), vid, name)
    if name not in BUILTINS:
        raise GraphFormatError(f"unknown builtin {name!r}; choose grid, random<seed> or {sorted(BUILTINS)}")
    factory, default_v = BUILTINS[name]
    vid = default_v if v is None else int(parse_target(v)[0])
    return GraphChoice(factory(), vid, name)


def _weight(parts) -> object:
    if not parts:
        raise GraphFormatError("edge is missing its weight")
    if len(parts) > 2:
        raise GraphFormatError(f"weight has too many components: {parts!r}")

    def one(x):
        if isinstance(x, str):
            try:
                return parse_scalar(x, exact=True)
            except (ValueError, ZeroDivisionError) as exc:
                raise GraphFormatError(f"bad weight component {x!r}") from exc
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise GraphFormatError(f"bad weight component {x!r}")
        return to_exact(x)

    re = one(parts[0])
    im = one(parts[1]) if len(parts) == 2 else Fraction(0)
    return re + im * gauss(0, 1) if im else re


def parse_graph(desc: dict) -> GraphChoice:
    """Build an oracle (and target) from a parsed JSON description."""
    if not isinstance(desc, dict):
        raise GraphFormatError("graph description must be a JSON object")
    if "builtin" in desc:
        return builtin(str(desc["builtin"]), desc.get("d"), desc.get("v"))
    if "edges" not in desc:
        raise GraphFormatError("graph description needs 'builtin' or 'edges'")
    edges = []
    for e in desc["edges"]:
        if not isinstance(e, (list, tuple)) or len(e) < 3:
            raise GraphFormatError(f"edge must be [u, v, re, im], got {e!r}")
        try:
            u, v = int(e[0]), int(e[1])
        except (TypeError, ValueError) as exc:
            raise GraphFormatError(f"bad vertex ids in edge {e!r}") from exc
        edges.append((u, v, _weight(list(e[2:]))))
    root = desc.get("root", 1)
    if not isinstance(root, int) or isinstance(root, bool):
        raise GraphFormatError(f"root must be an integer, got {root!r}")
    try:
        oracle = EdgeListOracle(edges, root=root, v_transitive=bool(desc.get("v_transitive", False)),
                                witness=desc.get("witness"), name=desc.get("name"))
    except UsageError as exc:
        raise GraphFormatError(str(exc)) from exc
    v = desc.get("v")
    if v is not None:
        v = int(parse_target(v)[0])
    return GraphChoice(oracle, v, desc.get("name", "edges"))


def load_graph(path) -> GraphChoice:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise GraphFormatError(f"cannot read graph file {path}: {exc}") from exc
    try:
        desc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path} is not valid JSON: {exc}") from exc
    return parse_graph(desc)


def dump_graph(oracle: EdgeListOracle, v: int | None = None) -> dict:
    """JSON-ready description of an edge-list oracle (weights as ``"p/q"``)."""
    edges = []
    for a, b, w in oracle.edges:
        if isinstance(w, GaussianRational):
            edges.append([a, b, format_scalar(w.re), format_scalar(w.im)])
        else:
            edges.append([a, b, format_scalar(w)])
    out = {"edges": edges, "root": oracle.root, "v_transitive": oracle.v_transitive}
    if v is not None:
        out["v"] = v
    return out
