"""Command-line interface: ``walkgen coeffs|limit|verify|polya``.

Exit codes: 0 success, 1 identity check failed, 2 bad graph or usage,
3 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

from .errors import GraphFormatError, InsufficientOrderError, ResourceBudgetError, UsageError, WalkgenError
from .graphs import GraphChoice, builtin, load_graph, parse_target
from .grids import GridSpec, ball_size, dp_budget, grid_oracle, polya_column
from .scalars import format_scalar, parse_scalar
from .series import DEFAULT_POLICY, EXACT, FLOAT, ConvergencePolicy, Mode
from .theorems import evaluate, oracle_meta, report_to_json
from .verifier import verify_identities
from .walks import coefficients

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

# orders up to which "auto" picks exact arithmetic for the Polya table
AUTO_EXACT_WORK = 200_000


@dataclass
class RunConfig:
    """Validated settings shared by all subcommands."""

    command: str
    graph: str | None = None
    builtin: str | None = None
    d: int | None = None
    v: str | None = None
    order: int = 64
    backend: str | None = None
    fmt: str = "json"
    out: str | None = None
    policy: ConvergencePolicy = field(default_factory=ConvergencePolicy)
    assertions: dict = field(default_factory=dict)

    def __post_init__(self):
        lowest = 0 if self.command in ("coeffs", "polya") else 1
        if self.order < lowest:
            raise UsageError(f"--order must be at least {lowest}")
        if self.command != "polya" and (self.graph is None) == (self.builtin is None):
            raise UsageError("give exactly one of --graph FILE or --builtin NAME")

    def load(self) -> GraphChoice:
        if self.graph is not None:
            choice = load_graph(self.graph)
            if self.v is not None:
                choice.v = int(parse_target(self.v)[0])
            return choice
        return builtin(self.builtin, self.d, self.v)


def _policy_from_pairs(pairs: Sequence[str]) -> ConvergencePolicy:
    fields = {f.name: f for f in dataclasses.fields(ConvergencePolicy)}
    values = {}
    for item in pairs:
        if "=" not in item:
            raise UsageError(f"--policy expects KEY=VAL, got {item!r}")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key not in fields:
            raise UsageError(f"unknown policy key {key!r}; known: {sorted(fields)}")
        default = getattr(DEFAULT_POLICY, key)
        try:
            if isinstance(default, int) or key == "tail_start":
                values[key] = int(raw)
            else:
                values[key] = float(raw)
        except ValueError as exc:
            raise UsageError(f"bad value for policy key {key}: {raw!r}") from exc
        if values[key] <= 0 and key not in ("tail_start",):
            raise UsageError(f"policy value {key} must be positive")
    return ConvergencePolicy(**values)


_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}
_SERIES = {"A", "B", "C", "D", "A_v", "B_v", "C_v", "E_v"}


def _assertions_from_pairs(pairs: Sequence[str]) -> tuple[dict, dict]:
    """Split ``--assert`` items into oracle flags and series verdicts."""
    flags, series = {}, {}
    for item in pairs:
        if "=" not in item:
            raise UsageError(f"--assert expects KEY=VAL, got {item!r}")
        key, raw = (s.strip() for s in item.split("=", 1))
        if key in ("convex", "nonnegative", "v_transitive"):
            if raw.lower() not in _BOOL:
                raise UsageError(f"--assert {key} needs true or false")
            flags[key] = _BOOL[raw.lower()]
        elif key in _SERIES:
            if raw == "+inf":
                series[key] = "+inf"
            else:
                mode, _, val = raw.partition(":")
                if not val:
                    mode, val = "absolute", raw
                try:
                    series[key] = (Mode(mode), complex(parse_scalar(val, exact=False)))
                except ValueError as exc:
                    raise UsageError(f"bad series assertion {item!r}") from exc
        else:
            raise UsageError(f"unknown assertion key {key!r}")
    return flags, series


# ---------------------------------------------------------------------------
# formatting


def _cell(x) -> str:
    return format_scalar(x)


def _json_value(x):
    if isinstance(x, complex):
        if x.imag == 0:
            return _json_value(x.real)
        return {"re": _json_value(x.real), "im": _json_value(x.imag)}
    if isinstance(x, float):
        return "+inf" if x == math.inf else x
    if hasattr(x, "item"):
        return _json_value(x.item())
    if isinstance(x, int):
        return x
    return format_scalar(x)


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) if not isinstance(x, str) else x for x in row])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands


def _bundle_rows(bundle) -> tuple[list[str], list[tuple]]:
    header = ["n", *bundle.names()]
    rows = [(str(r[0]), *r[1:]) for r in bundle.rows()]
    return header, rows


def cmd_coeffs(cfg: RunConfig) -> int:
    choice = cfg.load()
    backend = cfg.backend or EXACT
    bundle = coefficients(choice.oracle, choice.v, cfg.order, backend)
    header, rows = _bundle_rows(bundle)
    if cfg.fmt == "csv":
        _emit(_csv_text(header, rows), cfg.out)
    else:
        obj = {
            "schema": 1,
            "graph": choice.name,
            "order": bundle.order,
            "backend": backend,
            "root": bundle.root,
            "v": bundle.v,
            "columns": header,
            "rows": [[int(r[0]), *(_json_value(x) for x in r[1:])] for r in rows],
        }
        _emit(_json_text(obj), cfg.out)
    return EXIT_OK


def _limit_payload(choice: GraphChoice, order: int, cfg: RunConfig) -> dict:
    backend = cfg.backend or FLOAT
    bundle = coefficients(choice.oracle, choice.v, order, backend)
    meta = oracle_meta(choice.oracle, order, choice.v, cfg.policy, cfg.assertions.get("flags"))
    ev = evaluate(bundle, meta, cfg.policy, cfg.assertions.get("series"))
    pref = ev.preferred
    return {
        "schema": 1,
        "graph": choice.name,
        "order": order,
        "backend": backend,
        "v": choice.v,
        "preferred": None if pref is None else pref.theorem_id,
        "applicable": [r.theorem_id for r in ev.applicable()],
        "reports": [report_to_json(r) for r in ev.reports],
    }


def _reports_csv(payload: dict) -> str:
    rows = []
    for r in payload["reports"]:
        res = r["result"]
        if isinstance(res, dict):
            res = f"{res['re']}{res['im']:+}j"
        rows.append((r["theorem_id"], str(r["applicable"]).lower(), r["grade"],
                     str(r["preferred"]).lower(), "" if res is None else str(res)))
    return _csv_text(["theorem_id", "applicable", "grade", "preferred", "result"], rows)


def cmd_limit(cfg: RunConfig) -> int:
    choice = cfg.load()
    payload = _limit_payload(choice, cfg.order, cfg)
    _emit(_reports_csv(payload) if cfg.fmt == "csv" else _json_text(payload), cfg.out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    choice = cfg.load()
    report = verify_identities(choice.oracle, choice.v, cfg.order)
    if cfg.fmt == "csv":
        rows = [(r.name, str(r.applicable).lower(), str(r.passed).lower(),
                 "" if r.first_failure is None else str(r.first_failure)) for r in report.results]
        _emit(_csv_text(["identity", "applicable", "passed", "first_failing_order"], rows), cfg.out)
    else:
        obj = report.to_json()
        obj["graph"] = choice.name
        _emit(_json_text(obj), cfg.out)
    if not report.passed:
        ff = report.first_failure()
        print(f"identity {ff.name} fails at order {ff.first_failure}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def _polya_backend(cfg: RunConfig, d: int) -> str:
    if cfg.backend in (EXACT, FLOAT):
        return cfg.backend
    return EXACT if ball_size(d, cfg.order) * max(cfg.order, 1) <= AUTO_EXACT_WORK else FLOAT


def cmd_polya(cfg: RunConfig) -> int:
    if cfg.d is None:
        raise UsageError("polya needs --d")
    target = parse_target(cfg.v) if cfg.v is not None else None
    spec = GridSpec(cfg.d, target)
    oracle = grid_oracle(spec)
    oracle.check_budget(cfg.order)
    backend = _polya_backend(cfg, spec.d)
    column = polya_column(spec, cfg.order, backend)
    limit_order = min(max(cfg.order, cfg.policy.min_order), dp_budget(spec.d))
    choice = GraphChoice(oracle, None if spec.target_is_origin else oracle.target_id, f"grid{spec.d}")
    limit_cfg = dataclasses.replace(cfg, backend=FLOAT)
    payload = _limit_payload(choice, limit_order, limit_cfg)
    rows = [(str(n), column[n]) for n in range(cfg.order + 1)]
    if cfg.fmt == "csv":
        text = _csv_text(["n", "P"], rows)
        pref = payload["preferred"]
        if pref is not None:
            rep = next(r for r in payload["reports"] if r["theorem_id"] == pref)
            text += f"# limit {pref} {json.dumps(rep['result'])} grade {rep['grade']}\n"
        _emit(text, cfg.out)
    else:
        obj = {
            "schema": 1,
            "d": spec.d,
            "target": list(spec.target),
            "order": cfg.order,
            "backend": backend,
            "columns": ["n", "P"],
            "rows": [[n, _json_value(column[n])] for n in range(cfg.order + 1)],
            "limit": payload,
        }
        _emit(_json_text(obj), cfg.out)
    return EXIT_OK


COMMANDS = {"coeffs": cmd_coeffs, "limit": cmd_limit, "verify": cmd_verify, "polya": cmd_polya}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walkgen", description="Weighted walk generating functions.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", "-N", type=int, default=None, help="truncation order N")
    common.add_argument("--backend", choices=["exact", "float", "auto"], default=None)
    common.add_argument("--format", dest="fmt", choices=["json", "csv"], default=None)
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--policy", action="append", default=[], metavar="KEY=VAL",
                        help="convergence policy override (repeatable)")
    common.add_argument("--assert", dest="asserts", action="append", default=[], metavar="KEY=VAL",
                        help="user assertion: convex/nonnegative/v_transitive=true|false, "
                             "or a series verdict such as B=+inf or B=absolute:0")
    common.add_argument("--d", type=int, default=None, help="lattice dimension")
    common.add_argument("--v", default=None, help='target: vertex id, or lattice point "a,b,c"')
    graph = argparse.ArgumentParser(add_help=False)
    src = graph.add_mutually_exclusive_group()
    src.add_argument("--graph", default=None, help="graph description JSON file")
    src.add_argument("--builtin", default=None, help="built-in graph name (grid, k2, path3, ...)")

    sub.add_parser("coeffs", parents=[common, graph], help="emit the walk coefficient table")
    sub.add_parser("limit", parents=[common, graph], help="evaluate the limit formulas")
    sub.add_parser("verify", parents=[common, graph], help="check the identities exactly")
    sub.add_parser("polya", parents=[common], help="visit probabilities on the lattice")
    return parser


_DEFAULT_ORDER = {"coeffs": 16, "limit": 64, "verify": 8, "polya": 64}
_DEFAULT_FORMAT = {"coeffs": "csv", "limit": "json", "verify": "json", "polya": "csv"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    flags, series = _assertions_from_pairs(ns.asserts)
    backend = ns.backend
    if ns.command == "verify":
        backend = EXACT
    elif backend == "auto" and ns.command != "polya":
        backend = None
    return RunConfig(
        command=ns.command,
        graph=getattr(ns, "graph", None),
        builtin=getattr(ns, "builtin", None),
        d=ns.d,
        v=ns.v,
        order=_DEFAULT_ORDER[ns.command] if ns.order is None else ns.order,
        backend=backend,
        fmt=ns.fmt or _DEFAULT_FORMAT[ns.command],
        out=ns.out,
        policy=_policy_from_pairs(ns.policy),
        assertions={"flags": flags, "series": series},
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except ResourceBudgetError as exc:
        print(f"walkgen: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (GraphFormatError, UsageError, InsufficientOrderError) as exc:
        print(f"walkgen: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WalkgenError as exc:
        print(f"walkgen: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
