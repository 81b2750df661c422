"""Command line entry point.

    unimag run --config cfg.json [--out path] [--format csv|json]
    unimag compare --config cfg.json --methods oracle,dyson:1,magnus:2

Exit status 2 signals an invalid config, 3 a numerical failure (singular
propagator, non-positive-definite normalizer, BCH guard).
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time
from dataclasses import replace

import click
import numpy as np

from .config import ConfigError, RunConfig, load_config
from .hamiltonians import normality_defect, split
from .linalg import NumericalError, adjoint, fro_norm
from .propagate import METHODS, exact_unitarized_history, oracle_history, propagator_history

__all__ = ["main", "simulate", "compare_methods", "run_columns", "write_rows"]

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
UNITARIZED = ("unitarized_exact", "unitarized_series")


def run_columns(dim: int) -> list[str]:
    return (
        ["t", "state_norm"]
        + [f"pop_{i}" for i in range(1, dim + 1)]
        + ["unitarity_defect", "fidelity_vs_oracle", "path_disagreement", "newschro_residual", "normality_defect"]
    )


def _fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))


def _defects(ops: np.ndarray) -> np.ndarray:
    eye = np.eye(ops.shape[-1])
    return np.linalg.norm(adjoint(ops) @ ops - eye, axis=(1, 2))


def simulate(cfg: RunConfig) -> list[dict]:
    """Rows of the ``run`` table, one per ``output_every`` grid node."""
    grid = cfg.grid
    H = cfg.hamiltonian()
    H.validate(grid)
    psi0 = cfg.initial_vector()
    Hs = H.sample(grid.nodes)

    U_oracle = oracle_history(H, grid, cfg.oracle_substeps)
    ops = propagator_history(H, grid, cfg.method, cfg.orders, cfg.oracle_substeps, U_oracle=U_oracle)
    other = None
    if cfg.method == "unitarized_exact":
        other = propagator_history(H, grid, "unitarized_series", cfg.orders)
    elif cfg.method == "unitarized_series":
        other = exact_unitarized_history(U_oracle)

    states = ops @ psi0
    reference = U_oracle @ psi0
    defects = _defects(ops)
    rows = []
    for j in range(0, grid.steps + 1, cfg.output_every):
        psi = states[j]
        residual = None
        if j > 0:
            Hc = split(Hs[j])[0]
            residual = fro_norm((ops[j] - ops[j - 1]) / grid.h + 1j * Hc @ ops[j])
        row = {"t": float(grid.nodes[j]), "state_norm": float(np.linalg.norm(psi))}
        for i, p in enumerate(np.abs(psi) ** 2, start=1):
            row[f"pop_{i}"] = float(p)
        row["unitarity_defect"] = float(defects[j])
        row["fidelity_vs_oracle"] = _fidelity(reference[j], psi)
        row["path_disagreement"] = None if other is None else fro_norm(ops[j] - other[j])
        row["newschro_residual"] = residual
        row["normality_defect"] = normality_defect(Hs[j])
        rows.append(row)
    return rows


def _parse_method(token: str, cfg: RunConfig) -> tuple[str, RunConfig]:
    """``name`` or ``name:order``; the order overrides dyson_k, omega_n or bch_order."""
    name, _, order = token.strip().partition(":")
    if name not in METHODS:
        raise ConfigError("methods", f"unknown method {name!r}; expected one of {METHODS}")
    if not order:
        return token.strip(), replace(cfg, method=name)
    if not order.isdigit():
        raise ConfigError("methods", f"order in {token!r} must be an integer")
    k = int(order)
    key = {"dyson": "dyson_k", "magnus": "omega_n", "unitarized_series": "bch_order"}.get(name)
    caps = {"dyson_k": (0, 6), "omega_n": (1, 3), "bch_order": (1, 3)}
    if key is None:
        raise ConfigError("methods", f"method {name!r} takes no order")
    lo, hi = caps[key]
    if not lo <= k <= hi:
        raise ConfigError("methods", f"order of {name} must lie in [{lo}, {hi}], got {k}")
    return token.strip(), replace(cfg, method=name, orders=replace(cfg.orders, **{key: k}))


def compare_methods(cfg: RunConfig, methods: list[str]) -> list[dict]:
    """One row per method: terminal fidelity vs the oracle, max unitarity defect, wall time."""
    if len(methods) < 2:
        raise ConfigError("methods", "compare needs at least two methods")
    parsed = [_parse_method(m, cfg) for m in methods]
    grid = cfg.grid
    H = cfg.hamiltonian()
    H.validate(grid)
    psi0 = cfg.initial_vector()
    U_oracle = oracle_history(H, grid, cfg.oracle_substeps)
    reference = U_oracle[-1] @ psi0
    rows = []
    for label, sub in parsed:
        start = time.perf_counter()
        ops = propagator_history(H, grid, sub.method, sub.orders, sub.oracle_substeps)
        elapsed = time.perf_counter() - start
        rows.append(
            {
                "method": label,
                "terminal_fidelity": _fidelity(reference, ops[-1] @ psi0),
                "max_unitarity_defect": float(_defects(ops).max()),
                "wall_time": elapsed,
            }
        )
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_rows(rows: list[dict], columns: list[str], fmt: str, config_echo: dict, path: str | None) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])
        text = buf.getvalue()
    else:
        text = json.dumps({"config_echo": config_echo, "rows": rows}, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _finish(cfg: RunConfig, out: str | None, fmt: str | None) -> tuple[str | None, str]:
    return (out if out is not None else cfg.output_path), (fmt or cfg.output_format)


@click.group()
def main():
    """Unitarized Magnus propagation for non-Hermitian Hamiltonians."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", default=None, help="Output path; '-' for stdout.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
def run(config_path, out, fmt):
    """Propagate the configured model with one method and emit a table."""
    try:
        cfg = load_config(config_path)
        rows = simulate(cfg)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    path, fmt = _finish(cfg, out, fmt)
    write_rows(rows, run_columns(cfg.dim), fmt, cfg.raw, path)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False))
@click.option("--methods", required=True, help="Comma-separated, e.g. oracle,dyson:1,magnus:2")
@click.option("--out", default=None, help="Output path; '-' for stdout.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
def compare(config_path, methods, out, fmt):
    """Compare several methods against the oracle on the configured model."""
    try:
        cfg = load_config(config_path)
        rows = compare_methods(cfg, [m for m in methods.split(",") if m.strip()])
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    path, fmt = _finish(cfg, out, fmt)
    write_rows(rows, ["method", "terminal_fidelity", "max_unitarity_defect", "wall_time"], fmt, cfg.raw, path)


if __name__ == "__main__":
    main()
