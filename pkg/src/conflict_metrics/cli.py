"""Command-line front end.

Subcommands wire the library into reproducible pipelines whose default
output is JSON (sorted keys, fixed layout), so identical inputs plus
``--no-timing`` give byte-identical reports.  Exit codes: 0 success, 1
input error, 2 resource limit.  ``CONFLICT_METRICS_THREADS`` caps the
worker threads used to process bench instances.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConflictMetricsError, ResourceLimitError
from .formulas import KnowledgeBase, parse_kb
from .generate import GenParams, generate_random_kb, generate_set_family, mfsp_name
from .measures import (
    MEASURE_IDS,
    check_postulates,
    compute_report,
    distributable_decomposition,
    i_d,
)
from .mus import enumerate_all, enumerate_muses, import_mus_list, muses_to_text
from .musgraph import build_mus_graph, graph_to_text, mus_decomposition
from .packing import (
    SetFamily,
    encode_ilp,
    encode_mincost_sat,
    family_to_text,
    mcsp_branch_bound,
    parse_family,
    write_lp,
    write_wcnf,
)

DEFAULT_ORACLE_CALLS = 10**6
DEFAULT_TIMEOUT_S = 60.0


class CliInputError(ConflictMetricsError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); input errors are exit 1
        raise CliInputError(message)


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[Path] = field(default_factory=list)
    out: Path | None = None
    measures: tuple[str, ...] = MEASURE_IDS
    backend: str = "bnb"
    fmt: str = "lp"
    input_format: str = "auto"
    mus_file: Path | None = None
    seed: int = 0
    timeout_s: float = DEFAULT_TIMEOUT_S
    max_oracle_calls: int = DEFAULT_ORACLE_CALLS
    no_timing: bool = False
    plain: bool = False
    distributable: bool = False
    gen_m: int = 50
    gen_n: int = 20
    min_size: int = 2
    max_size: int = 3
    count: int = 50
    num_vars: int = 4
    num_formulas: int = 6
    verbose: bool = False


def _build_parser() -> _Parser:
    parser = _Parser(prog="conflict-metrics", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: _Parser) -> None:
        p.add_argument("--out", type=Path, help="write the report to this file instead of stdout")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("muses", help="enumerate all MUSes of a KB")
    p.add_argument("inputs", nargs=1, type=Path, metavar="KB")
    p.add_argument("--max-oracle-calls", type=int, default=DEFAULT_ORACLE_CALLS)
    common(p)

    p = sub.add_parser("msses", help="enumerate all MSSes of a KB")
    p.add_argument("inputs", nargs=1, type=Path, metavar="KB")
    p.add_argument("--max-oracle-calls", type=int, default=DEFAULT_ORACLE_CALLS)
    common(p)

    p = sub.add_parser("graph", help="export the MUS graph")
    p.add_argument("inputs", nargs=1, type=Path, metavar="KB")
    common(p)

    p = sub.add_parser("decompose", help="MUS decomposition (or the distributable one)")
    p.add_argument("inputs", nargs=1, type=Path, metavar="KB")
    p.add_argument("--distributable", action="store_true")
    common(p)

    p = sub.add_parser("measure", help="compute inconsistency measures")
    p.add_argument("inputs", nargs=1, type=Path, metavar="KB")
    p.add_argument("--measure", default="all", help="comma list of measures or 'all'")
    p.add_argument("--backend", choices=("bruteforce", "bnb"), default="bnb")
    p.add_argument("--mus-file", type=Path, help="use this verified MUS list (lower-bound mode)")
    p.add_argument("--no-timing", action="store_true")
    p.add_argument("--plain", action="store_true")
    p.add_argument("--timeout-s", type=float, default=DEFAULT_TIMEOUT_S)
    p.add_argument("--max-oracle-calls", type=int, default=DEFAULT_ORACLE_CALLS)
    common(p)

    p = sub.add_parser("encode", help="emit an LP or WCNF encoding of a packing instance")
    p.add_argument("inputs", nargs=1, type=Path, metavar="FILE")
    p.add_argument("--format", dest="fmt", choices=("lp", "wcnf"), default="lp")
    p.add_argument("--input-format", choices=("auto", "family", "kb"), default="auto")
    common(p)

    p = sub.add_parser("generate", help="generate a random set family")
    p.add_argument("--m", dest="gen_m", type=int, default=50)
    p.add_argument("--n", dest="gen_n", type=int, default=20)
    p.add_argument("--min-size", type=int, default=2)
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("import-muses", help="verify an externally produced MUS list")
    p.add_argument("inputs", nargs=1, type=Path, metavar="KB")
    p.add_argument("--mus-file", type=Path, required=True)
    common(p)

    p = sub.add_parser("check-postulates", help="probe a measure against the postulates")
    p.add_argument("--measure", default="i_d")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--vars", dest="num_vars", type=int, default=4)
    p.add_argument("--formulas", dest="num_formulas", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("bruteforce", "bnb"), default="bnb")
    common(p)

    p = sub.add_parser("bench", help="per-instance distribution-index table")
    p.add_argument("inputs", nargs="+", type=Path, metavar="FILE")
    p.add_argument("--backend", choices=("bruteforce", "bnb"), default="bnb")
    p.add_argument("--input-format", choices=("auto", "family", "kb"), default="auto")
    p.add_argument("--timeout-s", type=float, default=DEFAULT_TIMEOUT_S)
    p.add_argument("--max-oracle-calls", type=int, default=DEFAULT_ORACLE_CALLS)
    p.add_argument("--no-timing", action="store_true")
    p.add_argument("--plain", action="store_true")
    common(p)

    return parser


def _to_config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(subcommand=ns.subcommand)
    for name, value in vars(ns).items():
        if name == "subcommand" or value is None:
            continue
        if name == "measure":
            if value == "all":
                cfg.measures = MEASURE_IDS
            else:
                chosen = tuple(m.strip() for m in value.split(",") if m.strip())
                bad = [m for m in chosen if m not in MEASURE_IDS]
                if bad:
                    raise CliInputError(f"unknown measures {bad}; pick from {list(MEASURE_IDS)} or 'all'")
                cfg.measures = chosen
        elif name == "backend":
            cfg.backend = value
        elif hasattr(cfg, name):
            setattr(cfg, name, value)
    for path in cfg.inputs:
        if not path.exists():
            raise CliInputError(f"no such file: {path}")
    if cfg.mus_file is not None and not cfg.mus_file.exists():
        raise CliInputError(f"no such file: {cfg.mus_file}")
    return cfg


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is not None:
        cfg.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(cfg: RunConfig, payload) -> None:
    _emit(cfg, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _read_kb(path: Path) -> KnowledgeBase:
    return parse_kb(path.read_text(encoding="utf-8"))


def _backend_name(name: str) -> str:
    return "branch_bound" if name == "bnb" else name


def _load_instance(cfg: RunConfig, path: Path) -> tuple[str, SetFamily | KnowledgeBase]:
    """('family'|'kb', parsed object) honoring --input-format."""
    text = path.read_text(encoding="utf-8")
    if cfg.input_format == "family":
        return "family", parse_family(text)
    if cfg.input_format == "kb":
        return "kb", parse_kb(text)
    try:
        return "family", parse_family(text)
    except ConflictMetricsError:
        return "kb", parse_kb(text)


def _cmd_muses(cfg: RunConfig) -> int:
    kb = _read_kb(cfg.inputs[0])
    muses = enumerate_muses(kb, max_oracle_calls=cfg.max_oracle_calls)
    _emit_json(cfg, {"kind": "muses", "count": len(muses), "sets": [sorted(s) for s in muses]})
    return 0


def _cmd_msses(cfg: RunConfig) -> int:
    kb = _read_kb(cfg.inputs[0])
    _, msses = enumerate_all(kb, max_oracle_calls=cfg.max_oracle_calls)
    _emit_json(cfg, {"kind": "msses", "count": len(msses), "sets": [sorted(s) for s in msses]})
    return 0


def _cmd_graph(cfg: RunConfig) -> int:
    kb = _read_kb(cfg.inputs[0])
    muses = enumerate_muses(kb)
    _emit(cfg, graph_to_text(build_mus_graph(muses)))
    return 0


def _cmd_decompose(cfg: RunConfig) -> int:
    kb = _read_kb(cfg.inputs[0])
    muses = enumerate_muses(kb)
    if cfg.distributable:
        pmd = distributable_decomposition(kb, muses)
        payload = {
            "kind": "distributable_decomposition",
            "cardinality": pmd.cardinality,
            "groups": [
                {"formulas": sorted(group), "mus_ids": sorted(ids)}
                for group, ids in zip(pmd.groups, pmd.mus_ids_per_group)
            ],
            "residue": sorted(kb.all_indices() - frozenset().union(*pmd.groups))
            if pmd.groups
            else sorted(kb.all_indices()),
        }
    else:
        dec = mus_decomposition(kb, muses)
        payload = {
            "kind": "mus_decomposition",
            "components": [
                {"formulas": sorted(c.formulas), "mus_ids": sorted(c.mus_ids)} for c in dec.components
            ],
            "free": sorted(dec.free),
        }
    _emit_json(cfg, payload)
    return 0


def _cmd_measure(cfg: RunConfig) -> int:
    kb = _read_kb(cfg.inputs[0])
    muses = None
    if cfg.mus_file is not None:
        muses = import_mus_list(kb, cfg.mus_file.read_text(encoding="utf-8"))
    report = compute_report(
        kb,
        measures=cfg.measures,
        backend=_backend_name(cfg.backend),
        muses=muses,
        with_timing=not cfg.no_timing,
        max_oracle_calls=cfg.max_oracle_calls,
        time_budget_s=cfg.timeout_s,
    )
    payload = report.to_json_dict()
    if cfg.plain:
        lines = [f"{key}\t{payload[key]}" for key in sorted(payload) if key != "components"]
        lines.append("components\t" + ",".join(str(c) for c in payload["components"]))
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit_json(cfg, payload)
    return 0


def _cmd_encode(cfg: RunConfig) -> int:
    kind, obj = _load_instance(cfg, cfg.inputs[0])
    if kind == "kb":
        muses = enumerate_muses(obj)
        family = SetFamily(
            universe_size=len(obj),
            sets=tuple(tuple(sorted(s)) for s in muses),
        )
    else:
        family = obj
    if cfg.fmt == "lp":
        _emit(cfg, write_lp(encode_ilp(family)))
    else:
        _emit(cfg, write_wcnf(encode_mincost_sat(family)))
    return 0


def _cmd_generate(cfg: RunConfig) -> int:
    params = GenParams(m=cfg.gen_m, n=cfg.gen_n, min_size=cfg.min_size, max_size=cfg.max_size, seed=cfg.seed)
    family = generate_set_family(params)
    header = f"# {mfsp_name(params)} seed={cfg.seed}\n"
    _emit(cfg, header + family_to_text(family))
    return 0


def _cmd_import_muses(cfg: RunConfig) -> int:
    kb = _read_kb(cfg.inputs[0])
    muses = import_mus_list(kb, cfg.mus_file.read_text(encoding="utf-8"))
    _emit_json(
        cfg,
        {
            "kind": "muses",
            "count": len(muses),
            "mode": "lower_bound",
            "sets": [sorted(s) for s in muses],
        },
    )
    return 0


def _cmd_check_postulates(cfg: RunConfig) -> int:
    if len(cfg.measures) != 1:
        raise CliInputError("check-postulates takes exactly one measure")
    measure = cfg.measures[0]
    family = [
        generate_random_kb(cfg.num_vars, cfg.num_formulas, seed=cfg.seed + i) for i in range(cfg.count)
    ]
    report = check_postulates(measure, family, backend=_backend_name(cfg.backend))
    _emit_json(cfg, report.to_json_dict())
    return 0


def _bench_one(cfg: RunConfig, path: Path) -> dict:
    row: dict = {"instance": path.name}
    start = time.perf_counter()
    try:
        kind, obj = _load_instance(cfg, path)
        if kind == "family":
            row["num_mus"] = obj.m
            solution = mcsp_branch_bound(obj, time_budget_s=cfg.timeout_s)
            row["i_d"] = solution.cardinality
            if not solution.optimal:
                row["timeout"] = True
        else:
            muses = enumerate_muses(obj, max_oracle_calls=cfg.max_oracle_calls)
            row["num_mus"] = len(muses)
            row["i_d"] = i_d(obj, muses, backend=_backend_name(cfg.backend), time_budget_s=cfg.timeout_s)
    except ResourceLimitError as exc:
        row["error"] = str(exc)
    if not cfg.no_timing:
        row["time_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
    return row


def _cmd_bench(cfg: RunConfig) -> int:
    threads = int(os.environ.get("CONFLICT_METRICS_THREADS", "1") or "1")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda p: _bench_one(cfg, p), cfg.inputs))
    else:
        rows = [_bench_one(cfg, path) for path in cfg.inputs]
    if cfg.plain:
        lines = ["instance\tnum_mus\ti_d\ttime_ms"]
        for row in rows:
            lines.append(
                "\t".join(
                    str(row.get(key, "-")) for key in ("instance", "num_mus", "i_d", "time_ms")
                )
            )
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit_json(cfg, {"kind": "bench", "rows": rows})
    return 0


_COMMANDS = {
    "muses": _cmd_muses,
    "msses": _cmd_msses,
    "graph": _cmd_graph,
    "decompose": _cmd_decompose,
    "measure": _cmd_measure,
    "encode": _cmd_encode,
    "generate": _cmd_generate,
    "import-muses": _cmd_import_muses,
    "check-postulates": _cmd_check_postulates,
    "bench": _cmd_bench,
}


def run(argv: list[str]) -> int:
    """Parse argv and execute; returns the process exit code."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = _to_config(ns)
        return _COMMANDS[cfg.subcommand](cfg)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2
    except (ConflictMetricsError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
