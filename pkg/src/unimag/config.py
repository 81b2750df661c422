"""Run configuration: loading, validation, and model construction.

A config is a JSON document::

    {
      "model": {"hatano_nelson": {"l": 6, "tau": [1, 1, 1, 1, 1],
                                  "gamma": {"g0": [0, 0, 0, 0, 0],
                                            "g1": [0.5, 0.5, 0.5, 0.5, 0.5],
                                            "omega": [1, 1, 1, 1, 1]}}},
      "time": {"t0": 0, "t1": 2, "steps": 400, "output_every": 10},
      "method": "unitarized_exact",
      "orders": {"dyson_k": 4, "omega_n": 2, "bch_order": 3},
      "initial_state": "site_1_localized",
      "output": {"path": "out.csv", "format": "csv"}
    }

``model`` holds exactly one of ``hatano_nelson``, ``explicit_matrix`` or
``random``.  Validation failures raise :class:`ConfigError` naming the
offending field.
"""

from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .dyson import DYSON_MAX_ORDER
from .grid import TimeGrid
from .hamiltonians import (
    TIME_PROFILES,
    HamiltonianSpec,
    HatanoNelsonSpec,
    build_hatano_nelson,
    random_bounded_hamiltonian,
)
from .propagate import METHODS, Orders

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "SEED_ENV"]

SEED_ENV = "UNIMAG_SEED"
MODEL_KINDS = ("hatano_nelson", "explicit_matrix", "random")
INITIAL_STATES = ("site_1_localized", "uniform")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass
class RunConfig:
    model_kind: str
    model: dict[str, Any]
    t0: float
    t1: float
    steps: int
    output_every: int = 1
    oracle_substeps: int = 4
    method: str = "unitarized_exact"
    orders: Orders = field(default_factory=Orders)
    initial_state: Any = "site_1_localized"
    output_path: str | None = None
    output_format: str = "csv"
    raw: dict[str, Any] = field(default_factory=dict)

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.t0, self.t1, self.steps)

    @property
    def dim(self) -> int:
        if self.model_kind == "hatano_nelson":
            return int(self.model["l"])
        return int(self.model["dim"])

    def hamiltonian(self) -> HamiltonianSpec:
        m = self.model
        if self.model_kind == "hatano_nelson":
            g = m["gamma"]
            gammas = [_sine_drive(a, b, w) for a, b, w in zip(g["g0"], g["g1"], g["omega"])]
            return build_hatano_nelson(HatanoNelsonSpec(m["l"], m["tau"], gammas), times=self.grid.nodes)
        if self.model_kind == "random":
            return random_bounded_hamiltonian(
                m["dim"], m["bound"], m["seed"], m["time_profile"], window=(self.t0, self.t1)
            )
        return _explicit_hamiltonian(m, self.grid)

    def initial_vector(self) -> np.ndarray:
        d = self.dim
        if self.initial_state == "site_1_localized":
            psi = np.zeros(d, dtype=np.complex128)
            psi[0] = 1.0
            return psi
        if self.initial_state == "uniform":
            return np.full(d, 1.0 / np.sqrt(d), dtype=np.complex128)
        psi = np.asarray(self.initial_state, dtype=np.complex128)
        return psi / np.linalg.norm(psi)


def _sine_drive(g0: float, g1: float, omega: float):
    return lambda t: g0 + g1 * np.sin(omega * t)


def _explicit_hamiltonian(m: dict[str, Any], grid: TimeGrid) -> HamiltonianSpec:
    A = np.asarray(m["entries_real"], dtype=float) + 1j * np.asarray(m["entries_imag"], dtype=float)
    B = np.asarray(m["drive_real"], dtype=float) + 1j * np.asarray(m["drive_imag"], dtype=float)
    A.setflags(write=False)
    B.setflags(write=False)
    profile = {"constant": lambda t: 0.0, "polynomial": lambda t: t, "trigonometric": np.sin}[m["time_profile"]]

    def evaluate(t: float) -> np.ndarray:
        return A + profile(t) * B

    bound = max(float(np.linalg.norm(evaluate(t))) for t in grid.nodes)
    return HamiltonianSpec(A.shape[0], evaluate, bound)


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ConfigError(f"{where}.{key}" if where else key, "missing")
    return obj[key]


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        raise ConfigError(name, f"expected a finite number, got {value!r}")
    return float(value)


def _integer(value, name: str, lo: int | None = None, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise ConfigError(name, f"must lie in [{lo}, {hi}], got {value}")
    return value


def _numbers(value, name: str, length: int | None = None) -> list[float]:
    if not isinstance(value, list):
        raise ConfigError(name, "expected a list of numbers")
    out = [_number(v, f"{name}[{i}]") for i, v in enumerate(value)]
    if length is not None and len(out) != length:
        raise ConfigError(name, f"expected {length} entries, got {len(out)}")
    return out


def _square(value, name: str, dim: int) -> list[list[float]]:
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigError(name, f"expected {dim} rows")
    return [_numbers(row, f"{name}[{i}]", dim) for i, row in enumerate(value)]


def _parse_model(model) -> tuple[str, dict[str, Any]]:
    if not isinstance(model, dict) or len(model) != 1:
        raise ConfigError("model", f"expected exactly one of {MODEL_KINDS}")
    (kind, body), = model.items()
    if kind not in MODEL_KINDS:
        raise ConfigError("model", f"unknown model {kind!r}; expected one of {MODEL_KINDS}")
    where = f"model.{kind}"
    if not isinstance(body, dict):
        raise ConfigError(where, "expected an object")

    if kind == "hatano_nelson":
        l = _integer(_require(body, "l", where), f"{where}.l", lo=2, hi=64)
        tau = _numbers(_require(body, "tau", where), f"{where}.tau", l - 1)
        gamma = body.get("gamma", {})
        if not isinstance(gamma, dict):
            raise ConfigError(f"{where}.gamma", "expected an object with g0, g1, omega")
        g = {
            key: _numbers(gamma.get(key, [default] * (l - 1)), f"{where}.gamma.{key}", l - 1)
            for key, default in (("g0", 0.0), ("g1", 0.0), ("omega", 1.0))
        }
        return kind, {"l": l, "tau": tau, "gamma": g}

    if kind == "random":
        dim = _integer(_require(body, "dim", where), f"{where}.dim", lo=1, hi=64)
        bound = _number(_require(body, "bound", where), f"{where}.bound")
        if bound <= 0:
            raise ConfigError(f"{where}.bound", "must be > 0")
        seed = _integer(_require(body, "seed", where), f"{where}.seed", lo=0)
        if os.environ.get(SEED_ENV):
            try:
                seed = int(os.environ[SEED_ENV])
            except ValueError:
                raise ConfigError(SEED_ENV, f"expected an integer, got {os.environ[SEED_ENV]!r}") from None
        profile = body.get("time_profile", "constant")
        if profile not in TIME_PROFILES:
            raise ConfigError(f"{where}.time_profile", f"expected one of {TIME_PROFILES}")
        return kind, {"dim": dim, "bound": bound, "seed": seed, "time_profile": profile}

    dim = _integer(_require(body, "dim", where), f"{where}.dim", lo=1, hi=64)
    _require(body, "entries_real", where)
    zero = [[0.0] * dim for _ in range(dim)]
    out = {"dim": dim}
    for key in ("entries_real", "entries_imag", "drive_real", "drive_imag"):
        out[key] = _square(body.get(key, zero), f"{where}.{key}", dim)
    profile = body.get("time_profile", "constant")
    if profile not in TIME_PROFILES:
        raise ConfigError(f"{where}.time_profile", f"expected one of {TIME_PROFILES}")
    out["time_profile"] = profile
    return kind, out


def _parse_initial_state(value, dim: int):
    if isinstance(value, str):
        if value not in INITIAL_STATES:
            raise ConfigError("initial_state", f"expected one of {INITIAL_STATES} or an explicit vector")
        return value
    if isinstance(value, dict):
        re = _numbers(_require(value, "real", "initial_state"), "initial_state.real", dim)
        im = _numbers(value.get("imag", [0.0] * dim), "initial_state.imag", dim)
        vec = [complex(a, b) for a, b in zip(re, im)]
    else:
        vec = [complex(v) for v in _numbers(value, "initial_state", dim)]
    if np.linalg.norm(vec) == 0:
        raise ConfigError("initial_state", "vector must be nonzero")
    return vec


def parse_config(data: dict[str, Any]) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be an object")
    kind, model = _parse_model(_require(data, "model", ""))

    time = _require(data, "time", "")
    t0 = _number(_require(time, "t0", "time"), "time.t0")
    t1 = _number(_require(time, "t1", "time"), "time.t1")
    if not t1 > t0:
        raise ConfigError("time.t1", "must be greater than time.t0")
    steps = _integer(_require(time, "steps", "time"), "time.steps", lo=1)
    output_every = _integer(time.get("output_every", 1), "time.output_every", lo=1)
    substeps = _integer(time.get("oracle_substeps", 4), "time.oracle_substeps", lo=1)

    method = data.get("method", "unitarized_exact")
    if method not in METHODS:
        raise ConfigError("method", f"expected one of {METHODS}, got {method!r}")

    o = data.get("orders", {})
    if not isinstance(o, dict):
        raise ConfigError("orders", "expected an object")
    compose = o.get("compose", "product")
    if compose not in ("product", "sigma"):
        raise ConfigError("orders.compose", "expected 'product' or 'sigma'")
    orders = Orders(
        dyson_k=_integer(o.get("dyson_k", 4), "orders.dyson_k", lo=0, hi=DYSON_MAX_ORDER),
        omega_n=_integer(o.get("omega_n", 2), "orders.omega_n", lo=1, hi=3),
        bch_order=_integer(o.get("bch_order", 3), "orders.bch_order", lo=1, hi=3),
        compose=compose,
    )

    dim = model["l"] if kind == "hatano_nelson" else model["dim"]
    initial = _parse_initial_state(data.get("initial_state", "site_1_localized"), dim)

    out = data.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output", "expected an object")
    fmt = out.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError("output.format", f"expected one of {FORMATS}")
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path", "expected a string")

    echo = copy.deepcopy(data)
    if kind == "random":
        echo["model"]["random"]["seed"] = model["seed"]

    return RunConfig(
        model_kind=kind,
        model=model,
        t0=t0,
        t1=t1,
        steps=steps,
        output_every=output_every,
        oracle_substeps=substeps,
        method=method,
        orders=orders,
        initial_state=initial,
        output_path=path,
        output_format=fmt,
        raw=echo,
    )


def load_config(path: str | os.PathLike) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError("config", f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from None
    return parse_config(data)
