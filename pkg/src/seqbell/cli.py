"""Command-line front end with bit-stable tabular output.

Subcommands::

    seqbell verify    run the certification table, exit 1 on any failure
    seqbell chsh      CHSH values per observer (exact, closed form, or sampled)
    seqbell region    violation regions and the constrained third-observer max
    seqbell tradeoff  the optimal-pointer curve (lam, F, G, CHSH_1)

Every command accepts ``--format {csv,jsonl}``, ``--precision`` (significant
digits, default 10), ``--output FILE`` (which also writes a
``FILE.manifest.json`` sidecar with a content checksum), and ``--config FILE``
(``key = value`` lines mirroring the flag names; flags take precedence).
The ``SEQBELL_SEED`` environment variable overrides the default seed and is
echoed in the manifest.  Identical invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from typing import Any, Sequence

from . import __version__
from .acceptance import CRITERION_IDS, run_all
from .analysis import (
    RegionReport,
    double_violation_region,
    max_chsh3_under_double_violation,
    pairwise_regions,
    tradeoff_curve,
)
from .mc import estimate_chsh
from .scenario import (
    METHOD_CLOSED_FORM,
    METHOD_MONTE_CARLO,
    chsh_value,
    closed_form_chsh,
    default_config,
)

SEED_ENV_VAR = "SEQBELL_SEED"

REGION_COLUMNS = ("row_type", "lam1", "lam2", "lam3", "chsh1", "chsh2", "chsh3", "value", "note")


def _parse_lambdas(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"malformed sharpness list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty sharpness list")
    for v in values:
        if not (0.0 < v <= 1.0) or not math.isfinite(v):
            raise argparse.ArgumentTypeError(f"sharpness {v!r} outside (0, 1]")
    return values


def _parse_pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"malformed pair {text!r}; expected like 1,2") from exc
    if (a, b) not in ((1, 2), (1, 3), (2, 3)):
        raise argparse.ArgumentTypeError("pair must be one of 1,2 or 1,3 or 2,3")
    return a, b


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config_defaults(args: argparse.Namespace, converters: dict[str, Any]) -> None:
    """Fill still-unset options from the config file; flags already won."""
    if not getattr(args, "config", None):
        return
    file_values = _load_config_file(args.config)
    for key, raw in file_values.items():
        if key not in converters:
            raise ValueError(f"unknown config key {key!r}")
        if getattr(args, key, None) is None:
            setattr(args, key, converters[key](raw))


def _resolve_seed(args: argparse.Namespace) -> tuple[int, str]:
    if getattr(args, "seed", None) is not None:
        return args.seed, "flag"
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env), "env"
        except ValueError as exc:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from exc
    return 0, "default"


class _Emitter:
    """Accumulates rows and renders them as CSV or JSONL with fixed precision."""

    def __init__(self, fmt: str, precision: int, columns: Sequence[str]):
        if precision < 1:
            raise ValueError("precision must be >= 1")
        self.fmt = fmt
        self.precision = precision
        self.columns = tuple(columns)
        self.rows: list[dict[str, Any]] = []

    def add(self, **row: Any) -> None:
        self.rows.append(row)

    def _fmt_value(self, value: Any) -> Any:
        if isinstance(value, float):
            return f"{value:.{self.precision}g}"
        if isinstance(value, (tuple, list)):
            return ",".join(str(self._fmt_value(v)) for v in value)
        return value

    def render(self) -> str:
        if self.fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow(["" if row.get(c) is None else self._fmt_value(row.get(c)) for c in self.columns])
            return buf.getvalue()
        lines = []
        for row in self.rows:
            record = {}
            for c in self.columns:
                value = row.get(c)
                if value is None:
                    continue
                if isinstance(value, float):
                    value = float(f"{value:.{self.precision}g}")
                elif isinstance(value, (tuple, list)):
                    value = [float(f"{v:.{self.precision}g}") if isinstance(v, float) else v for v in value]
                record[c] = value
            lines.append(json.dumps(record, separators=(", ", ": ")))
        return "\n".join(lines) + ("\n" if lines else "")


def _deliver(text: str, args: argparse.Namespace, command: str, parameters: dict[str, Any]) -> None:
    output = getattr(args, "output", None)
    if output is None:
        sys.stdout.write(text)
        return
    payload = text.encode("utf-8")
    with open(output, "wb") as handle:
        handle.write(payload)
    manifest = {
        "command": command,
        "parameters": parameters,
        "artifact_version": __version__,
        "output_sha256": hashlib.sha256(payload).hexdigest(),
        "seed_env": os.environ.get(SEED_ENV_VAR),
    }
    with open(output + ".manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _cmd_chsh(args: argparse.Namespace) -> int:
    _apply_config_defaults(
        args,
        {
            "lambdas": _parse_lambdas,
            "bob": str,
            "method": str,
            "shots": int,
            "seed": int,
            "format": str,
            "precision": int,
        },
    )
    lambdas = args.lambdas
    if lambdas is None:
        raise ValueError("--lambdas is required (flag or config file)")
    method = args.method or "exact"
    fmt = args.format or "csv"
    precision = args.precision if args.precision is not None else 10
    shots = args.shots if args.shots is not None else 1_000_000
    seed, seed_source = _resolve_seed(args)

    n = len(lambdas)
    bob_arg = args.bob or "all"
    if bob_arg == "all":
        bobs = list(range(1, n + 1))
    else:
        bobs = [int(bob_arg)]
        if not 1 <= bobs[0] <= n:
            raise ValueError(f"--bob {bobs[0]} outside chain of length {n}")

    cfg = default_config(n, lambdas)
    emitter = _Emitter(fmt, precision, ("bob", "lambda_vector", "chsh", "method", "stderr"))
    for bob in bobs:
        if method == "exact":
            report = chsh_value(cfg, bob)
            emitter.add(bob=bob, lambda_vector=lambdas, chsh=report.chsh_value, method=report.method)
        elif method == "closed":
            emitter.add(
                bob=bob,
                lambda_vector=lambdas,
                chsh=closed_form_chsh(lambdas, bob),
                method=METHOD_CLOSED_FORM,
            )
        elif method == "mc":
            report = estimate_chsh(cfg, bob, shots, seed)
            emitter.add(
                bob=bob,
                lambda_vector=lambdas,
                chsh=report.estimate,
                method=METHOD_MONTE_CARLO,
                stderr=report.standard_error,
            )
        else:
            raise ValueError(f"unknown method {method!r}")

    parameters = {
        "lambdas": list(lambdas),
        "bob": bob_arg,
        "method": method,
        "format": fmt,
        "precision": precision,
    }
    if method == "mc":
        parameters.update({"shots": shots, "seed": seed, "seed_source": seed_source})
    _deliver(emitter.render(), args, "chsh", parameters)
    return 0


def _region_rows(emitter: _Emitter, report: RegionReport) -> None:
    def padded(cell: tuple[float, ...] | None) -> tuple[Any, Any, Any]:
        if cell is None:
            return None, None, None
        vals = list(cell) + [None] * (3 - len(cell))
        return vals[0], vals[1], vals[2]

    for cell, chsh_row in zip(report.feasible_cells, report.cell_chsh):
        l1, l2, l3 = padded(cell)
        chsh_vals = {f"chsh{b}": v for b, v in zip(report.target_bobs, chsh_row)}
        emitter.add(row_type="cell", lam1=l1, lam2=l2, lam3=l3, **chsh_vals)
    l1, l2, l3 = padded(report.extremal_cell)
    emitter.add(
        row_type="extremal",
        lam1=l1,
        lam2=l2,
        lam3=l3,
        value=report.extremal_value,
        note=f"feasible_count={report.feasible_count}",
    )
    if report.analytic_boundary is not None:
        l1, l2, l3 = padded(report.analytic_boundary)
        emitter.add(
            row_type="analytic",
            lam1=l1,
            lam2=l2,
            lam3=l3,
            value=report.analytic_value,
            note="analytic boundary point",
        )
    if report.window is not None:
        emitter.add(
            row_type="window",
            lam1=report.window[0],
            lam2=report.window[1],
            note="detected sharpness interval for lam1",
        )


def _cmd_region(args: argparse.Namespace) -> int:
    _apply_config_defaults(
        args,
        {"pair": _parse_pair, "resolution": float, "format": str, "precision": int},
    )
    fmt = args.format or "csv"
    precision = args.precision if args.precision is not None else 10
    emitter = _Emitter(fmt, precision, REGION_COLUMNS)

    if args.triple:
        resolution = args.resolution if args.resolution is not None else 0.005
        report = max_chsh3_under_double_violation(resolution=resolution)
        _region_rows(emitter, report)
        assert report.extremal_value is not None and report.analytic_value is not None
        sup = max(report.extremal_value, report.analytic_value)
        if sup <= 2.0:
            emitter.add(
                row_type="triple_violation",
                value=sup,
                note=f"INFEASIBLE: sup CHSH_3 = {sup:.4f} < 2",
            )
        parameters: dict[str, Any] = {"triple": True, "resolution": resolution}
    else:
        pair = args.pair if args.pair is not None else (1, 2)
        if pair == (1, 2):
            resolution = args.resolution if args.resolution is not None else 0.001
            report = double_violation_region(resolution=resolution)
        else:
            resolution = args.resolution if args.resolution is not None else 0.02
            report = pairwise_regions(resolution=resolution)[pair]
        _region_rows(emitter, report)
        parameters = {"pair": list(pair), "resolution": resolution}

    parameters.update({"format": fmt, "precision": precision})
    _deliver(emitter.render(), args, "region", parameters)
    return 0


def _cmd_tradeoff(args: argparse.Namespace) -> int:
    _apply_config_defaults(args, {"steps": int, "format": str, "precision": int})
    steps = args.steps if args.steps is not None else 101
    if steps < 2:
        raise ValueError("--steps must be >= 2")
    fmt = args.format or "csv"
    precision = args.precision if args.precision is not None else 10
    grid = [i / (steps - 1) for i in range(steps)]
    emitter = _Emitter(fmt, precision, ("sharpness", "quality_f", "precision_g", "chsh_first"))
    for point in tradeoff_curve(grid):
        emitter.add(
            sharpness=point.sharpness,
            quality_f=point.quality_f,
            precision_g=point.precision_g,
            chsh_first=point.chsh_first,
        )
    _deliver(
        emitter.render(),
        args,
        "tradeoff",
        {"steps": steps, "format": fmt, "precision": precision},
    )
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    only = None
    if args.only:
        only = [part.strip() for part in args.only.split(",") if part.strip()]
        unknown = [cid for cid in only if cid not in CRITERION_IDS]
        if unknown:
            raise ValueError(f"unknown criteria: {', '.join(unknown)}")
    results = run_all(only)
    failures = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{result.criterion_id:<5} {status}  {result.description} :: {result.detail}")
        if not result.passed:
            failures += 1
    print(f"{len(results) - failures}/{len(results)} criteria passed")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqbell",
        description="Sequential unsharp-measurement CHSH simulation and certification",
    )
    parser.add_argument("--version", action="version", version=f"seqbell {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("csv", "jsonl"), default=None, help="output format (default csv)")
        p.add_argument("--precision", type=int, default=None, help="significant digits (default 10)")
        p.add_argument("--output", default=None, help="write to FILE plus FILE.manifest.json")
        p.add_argument("--config", default=None, help="key = value file mirroring flag names")

    p_verify = sub.add_parser("verify", help="run the certification table")
    p_verify.add_argument("--only", default=None, help="comma-separated criterion ids, e.g. AC1,AC5")
    p_verify.set_defaults(func=_cmd_verify)

    p_chsh = sub.add_parser("chsh", help="CHSH value per observer")
    p_chsh.add_argument("--lambdas", type=_parse_lambdas, default=None, help="comma-separated sharpness list")
    p_chsh.add_argument("--bob", default=None, help="observer index (1-based) or 'all'")
    p_chsh.add_argument("--method", choices=("exact", "closed", "mc"), default=None)
    p_chsh.add_argument("--shots", type=int, default=None, help="samples for --method mc (default 1000000)")
    p_chsh.add_argument("--seed", type=int, default=None, help="sampling seed (default 0 or SEQBELL_SEED)")
    add_common(p_chsh)
    p_chsh.set_defaults(func=_cmd_chsh)

    p_region = sub.add_parser("region", help="violation regions")
    group = p_region.add_mutually_exclusive_group()
    group.add_argument("--pair", type=_parse_pair, default=None, help="observer pair: 1,2 or 1,3 or 2,3")
    group.add_argument("--triple", action="store_true", help="constrained third-observer maximum")
    p_region.add_argument("--resolution", type=float, default=None, help="grid step")
    add_common(p_region)
    p_region.set_defaults(func=_cmd_region)

    p_tradeoff = sub.add_parser("tradeoff", help="optimal-pointer curve")
    p_tradeoff.add_argument("--steps", type=int, default=None, help="grid points on [0, 1] (default 101)")
    add_common(p_tradeoff)
    p_tradeoff.set_defaults(func=_cmd_tradeoff)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        parser.exit(2, f"seqbell: error: {exc}\n")
        return 2  # unreachable; keeps type checkers happy


if __name__ == "__main__":
    raise SystemExit(main())
