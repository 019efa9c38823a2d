"""Command-line front end: experiment orchestration and CSV/JSON persistence.

Configuration files use a flat, typed key/value format with section nesting:

    # comment lines start with '#'; blank lines are ignored
    experiment = scan_j2          # top-level key before any section
    [model]                       # section header
    source = table_row            # string (bare or double-quoted)
    row = 6                       # integer
    [noise]
    gamma = 0.01                  # float
    channels = dephasing, photon_loss   # comma list
    [grid]
    lo = 2.0
    hi = 40.0
    points = 8
    [run]
    seed = 0
    samples = 90
    threads = 1
    out = scan_j2.csv

Every key is validated against the experiment's schema; unknown keys are
rejected with their line number.  Loading fills defaults, and emitting a
loaded configuration reproduces it exactly (load -> emit -> load is the
identity on resolved configurations).

Per run, a CSV table (header row, '.' decimal, 12 significant digits, one
row per sample) and a JSON summary (peaks, locations, seeds, the full
resolved configuration, and a format-version field) are written.  Identical
configurations and seeds produce byte-identical CSV files.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import click
import numpy as np

from . import circuit_map as cmap
from .dynamics import NoiseModel, PropagationError
from .hilbert import HilbertError
from .metrics import (
    FidelityTrace,
    GateTimeWindowError,
    TargetGate,
    average_fidelity,
    default_open_window,
)
from .search import CostSpec, search as run_search
from .spin_model import (
    GateConfig,
    ModelError,
    SpinModelParams,
    add_crosstalk,
    analytic_gate_time,
    build_n5_model,
    closed_config_for_branch,
    n5_control_states,
    symmetric_chain,
)
from .drive import calibrated_pi_pulse, rabi_prepare

FORMAT_VERSION = "1"

EXPERIMENT_KINDS = (
    "fidelity_trace",
    "scan_j2",
    "scan_j1",
    "scan_delta",
    "qutrit_compare",
    "crosstalk_scan",
    "n5_trace",
    "drive_demo",
    "circuit_map",
    "search",
)


class ConfigError(ValueError):
    """Malformed or invalid configuration input."""


# ---------------------------------------------------------------------------
# config format
# ---------------------------------------------------------------------------

def _parse_scalar(raw: str):
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def parse_config_text(text: str) -> dict[str, dict[str, Any]]:
    """Parse the sectioned key/value format into {section: {key: value}}.

    Top-level keys (before any section header) land in section ''.
    """
    out: dict[str, dict[str, Any]] = {"": {}}
    section = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if not section:
                raise ConfigError(f"line {lineno}: empty section name")
            out.setdefault(section, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out[section]:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if "," in raw:
            out[section][key] = [_parse_scalar(p) for p in raw.split(",")]
        else:
            out[section][key] = _parse_scalar(raw)
    return out


def _format_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return ", ".join(_format_value(x) for x in v)
    if isinstance(v, str):
        needs_quotes = v == "" or any(c in v for c in "#,=[]") or v != v.strip()
        return f'"{v}"' if needs_quotes else v
    return str(v)


def serialize_config(sections: dict[str, dict[str, Any]]) -> str:
    lines = []
    top = sections.get("", {})
    for key in top:
        lines.append(f"{key} = {_format_value(top[key])}")
    for name, body in sections.items():
        if name == "":
            continue
        lines.append(f"[{name}]")
        for key in body:
            lines.append(f"{key} = {_format_value(body[key])}")
    return "\n".join(lines) + "\n"


# schema: section -> key -> (type tag, default); None default means required
_COMMON_RUN = {
    "seed": ("int", 0),
    "samples": ("int", 90),
    "threads": ("int", 1),
    "out": ("str", ""),
}
_MODEL_KEYS = {
    "source": ("str", "table_row"),
    "row": ("int", 6),
    "j1x": ("float", 40.9),
    "j1z": ("float", 40.9),
    "j2x": ("float", -540.4),
    "j2z": ("float", 1007.1),
    "delta": ("float", 933.4),
    "branch": ("str", "plus"),
    "e1": ("float", 561.6),
    "e2": ("float", 438.5),
    "e12": ("float", 186.0),
    "e23": ("float", 397.1),
    "c1": ("float", 926.3),
    "c2": ("float", 76.2),
    "c23": ("float", 240.4),
    "l12": ("float", 37.3),
}
_NOISE_KEYS = {
    "gamma": ("float", 0.01),
    "channels": ("strlist", ["dephasing", "photon_loss"]),
}

SCHEMAS: dict[str, dict[str, dict[str, tuple]]] = {
    "fidelity_trace": {
        "model": _MODEL_KEYS,
        "noise": _NOISE_KEYS,
        "grid": {
            "window_lo": ("float", 0.001),
            "window_hi": ("float", 1.2),
            "control": ("str", "open"),
        },
        "run": _COMMON_RUN,
    },
    "scan_j2": {
        "model": _MODEL_KEYS,
        "noise": _NOISE_KEYS,
        "grid": {
            "j1": ("float", 30.0),
            "lo": ("float", 2.0),
            "hi": ("float", 40.0),
            "points": ("int", 8),
        },
        "run": _COMMON_RUN,
    },
    "scan_j1": {
        "model": _MODEL_KEYS,
        "noise": _NOISE_KEYS,
        "grid": {
            "j2": ("float", 750.0),
            "lo": ("float", 18.75),
            "hi": ("float", 125.0),
            "points": ("int", 8),
        },
        "run": _COMMON_RUN,
    },
    "scan_delta": {
        "model": _MODEL_KEYS,
        "noise": _NOISE_KEYS,
        "grid": {
            "j1": ("float", 30.0),
            "j2z": ("float", 600.0),
            "lo": ("float", 300.0),
            "hi": ("float", 900.0),
            "points": ("int", 7),
        },
        "run": _COMMON_RUN,
    },
    "qutrit_compare": {
        "model": {"rows": ("intlist", [6, 11])},
        "noise": _NOISE_KEYS,
        "grid": {
            "window_hi": ("float", 1.2),
            "configs": ("strlist", ["open", "closed_plus", "closed_minus"]),
        },
        "run": _COMMON_RUN,
    },
    "crosstalk_scan": {
        "model": _MODEL_KEYS,
        "noise": _NOISE_KEYS,
        "grid": {
            "fractions_pct": ("floatlist", [0.0, 2.0, 4.0, 6.0, 8.0, 10.0]),
        },
        "run": _COMMON_RUN,
    },
    "n5_trace": {
        "model": {
            "j1": ("float", 30.0),
            "j2": ("float", 750.0),
            "delta3": ("float", 3000.0),
            "branch": ("str", "E0"),
        },
        "noise": _NOISE_KEYS,
        "grid": {"window_hi": ("float", 1.2)},
        "run": _COMMON_RUN,
    },
    "drive_demo": {
        "model": _MODEL_KEYS,
        "noise": _NOISE_KEYS,
        "grid": {
            "amplitude_fraction": ("float", 0.02),
            "n_durations": ("int", 25),
        },
        "run": _COMMON_RUN,
    },
    "circuit_map": {
        "model": _MODEL_KEYS,
        "noise": _NOISE_KEYS,
        "grid": {},
        "run": _COMMON_RUN,
    },
    "search": {
        "model": {"branch": ("str", "plus")},
        "noise": _NOISE_KEYS,
        "grid": {
            "n_restarts": ("int", 8),
            "max_evaluations": ("int", 400),
            "keep_all": ("bool", True),
        },
        "run": _COMMON_RUN,
    },
}

def _check_scalar(tag: str, value: Any) -> Any:
    if tag == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError("expected integer")
        return value
    if tag == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError("expected number")
        return float(value)
    if tag == "str":
        if not isinstance(value, str):
            raise ConfigError("expected string")
        return value
    if tag == "bool":
        if not isinstance(value, bool):
            raise ConfigError("expected true/false")
        return value
    raise ConfigError(f"unknown schema type {tag}")


def _check_type(tag: str, value: Any, where: str) -> Any:
    try:
        if tag.endswith("list"):
            items = value if isinstance(value, list) else [value]
            return [_check_scalar(tag[:-4], x) for x in items]
        return _check_scalar(tag, value)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved experiment configuration."""

    kind: str
    sections: dict[str, dict[str, Any]]

    def __getitem__(self, section: str) -> dict[str, Any]:
        return self.sections[section]

    def to_text(self) -> str:
        data: dict[str, dict[str, Any]] = {"": {"experiment": self.kind}}
        data.update({k: dict(v) for k, v in self.sections.items()})
        return serialize_config(data)


def resolve_config(raw: dict[str, dict[str, Any]]) -> ExperimentConfig:
    """Validate a parsed mapping against its experiment schema, fill defaults."""
    top = dict(raw.get("", {}))
    kind = top.pop("experiment", None)
    if kind is None:
        raise ConfigError("missing top-level key 'experiment'")
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    if top:
        raise ConfigError(f"unknown top-level key {sorted(top)[0]!r}")
    schema = SCHEMAS[kind]
    sections: dict[str, dict[str, Any]] = {}
    for sec_name, body in raw.items():
        if sec_name == "":
            continue
        if sec_name not in schema:
            raise ConfigError(f"unknown section [{sec_name}] for {kind}")
        for key in body:
            if key not in schema[sec_name]:
                raise ConfigError(f"unknown key {key!r} in section [{sec_name}]")
    for sec_name, keys in schema.items():
        body = dict(raw.get(sec_name, {}))
        resolved = {}
        for key, (tag, default) in keys.items():
            if key in body:
                resolved[key] = _check_type(tag, body[key], f"[{sec_name}] {key}")
            else:
                if default is None:
                    raise ConfigError(f"missing required key {key!r} in [{sec_name}]")
                resolved[key] = default
        sections[sec_name] = resolved
    return ExperimentConfig(kind=kind, sections=sections)


def load_config(path: str | Path) -> ExperimentConfig:
    return resolve_config(parse_config_text(Path(path).read_text()))


def default_config(kind: str) -> ExperimentConfig:
    return resolve_config({"": {"experiment": kind}})


# ---------------------------------------------------------------------------
# run records and persistence
# ---------------------------------------------------------------------------

@dataclass
class RunRecord:
    kind: str
    config: ExperimentConfig
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict[str, Any]
    wall_time_s: float
    version: str = FORMAT_VERSION

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_format_cell(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "version": self.version,
            "experiment": self.kind,
            "config": self.config.to_text(),
            "summary": self.summary,
            "wall_time_s": self.wall_time_s,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _format_cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def emit(record: RunRecord, out_path: str | Path) -> tuple[Path, Path]:
    """Write the CSV table and JSON summary next to each other."""
    csv_path = Path(out_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(record.to_csv())
    json_path = csv_path.with_suffix(".json")
    json_path.write_text(record.to_json())
    return csv_path, json_path


# ---------------------------------------------------------------------------
# model resolution helpers
# ---------------------------------------------------------------------------

def _spin_from_model_section(model: dict[str, Any]) -> tuple[SpinModelParams, str]:
    source = model["source"]
    if source == "table_row":
        params = cmap.table_spin_params(model["row"])
        return params, cmap.table_branch(model["row"])
    if source == "spin":
        return (
            symmetric_chain(
                model["j1x"], model["j1z"], model["j2x"], model["j2z"],
                model["delta"], detuning_choice=model["branch"],
            ),
            model["branch"],
        )
    if source == "circuit":
        circuit = cmap.CircuitParams(
            e1=model["e1"], e2=model["e2"], e12=model["e12"], e23=model["e23"],
            c1=model["c1"], c2=model["c2"], c23=model["c23"], l12=model["l12"],
        )
        res = cmap.circuit_to_spin(circuit)
        branch = model["branch"]
        return res.spin_params(), branch
    raise ConfigError(f"unknown model source {source!r}")


def _noise_from_section(noise: dict[str, Any], no_noise: bool) -> NoiseModel | None:
    if no_noise or noise["gamma"] == 0.0:
        return None
    return NoiseModel(
        gamma=noise["gamma"], channels=frozenset(noise["channels"])
    )


def _trace_at(trace: FidelityTrace, t: float) -> float:
    times, fbar = trace.as_arrays()
    return float(np.interp(t, times, fbar))


def _map_points(fn: Callable, items: Sequence, threads: int) -> list:
    """Evaluate scan points, optionally on a thread pool, preserving order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def run_fidelity_trace(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    t0 = time.perf_counter()
    model, branch = _spin_from_model_section(config["model"])
    noise = _noise_from_section(config["noise"], no_noise)
    grid = config["grid"]
    n = config["run"]["samples"]
    tg = analytic_gate_time(model)
    times = np.linspace(grid["window_lo"] * tg, grid["window_hi"] * tg, n)
    cfg = _gate_config(grid["control"], branch)
    trace_noisy = average_fidelity(model, cfg, noise, times)
    trace_clean = average_fidelity(model, cfg, None, times)
    rows = [
        (t, fn, fc)
        for t, fn, fc in zip(times, trace_noisy.fbar, trace_clean.fbar)
    ]
    summary = {
        "gate_time_analytic_us": tg,
        "peak_time_us": trace_noisy.peak_time,
        "peak_fidelity": trace_noisy.peak_value,
        "peak_fidelity_noiseless": trace_clean.peak_value,
        "seed": config["run"]["seed"],
    }
    return RunRecord(
        kind=config.kind,
        config=config,
        columns=("t_us", "fbar", "fbar_noiseless"),
        rows=rows,
        summary=summary,
        wall_time_s=time.perf_counter() - t0,
    )


def _gate_config(control: str, branch: str) -> GateConfig:
    if control == "open":
        return GateConfig(delta_branch=branch, control_state="open_0")
    if control == "closed":
        return closed_config_for_branch(branch)
    if control in ("closed_plus", "closed_minus", "closed_11"):
        state = {
            "closed_plus": "closed_1plus",
            "closed_minus": "closed_1minus",
            "closed_11": "closed_11",
        }[control]
        return GateConfig(delta_branch=branch, control_state=state)
    raise ConfigError(f"unknown control configuration {control!r}")


def _scan_point(
    params: SpinModelParams,
    branch: str,
    noise: NoiseModel | None,
    n_samples: int,
) -> dict[str, float]:
    """Open and closed fidelities at the numerical gate time, noisy and clean."""
    tg = analytic_gate_time(params)
    window = default_open_window(params, n=n_samples)
    open_cfg = GateConfig(delta_branch=branch, control_state="open_0")
    closed_cfg = closed_config_for_branch(branch)
    out: dict[str, float] = {"tg_analytic_us": tg}
    trace_clean = average_fidelity(params, open_cfg, None, window)
    t_num = trace_clean.peak_time
    out["tg_numeric_us"] = t_num
    out["peak_on_boundary"] = float(trace_clean.peak_on_boundary)
    out["fbar_open"] = trace_clean.peak_value
    closed_clean = average_fidelity(params, closed_cfg, None, window)
    out["fbar_closed"] = _trace_at(closed_clean, t_num)
    if noise is not None:
        trace_noisy = average_fidelity(params, open_cfg, noise, window)
        out["fbar_open_noisy"] = _trace_at(trace_noisy, t_num)
        closed_noisy = average_fidelity(params, closed_cfg, noise, window)
        out["fbar_closed_noisy"] = _trace_at(closed_noisy, t_num)
    else:
        out["fbar_open_noisy"] = out["fbar_open"]
        out["fbar_closed_noisy"] = out["fbar_closed"]
    return out


_SCAN_COLUMNS = (
    "tg_analytic_us", "tg_numeric_us", "fbar_open", "fbar_open_noisy",
    "fbar_closed", "fbar_closed_noisy", "peak_on_boundary",
)


def _scan_record(
    config: ExperimentConfig,
    no_noise: bool,
    axis_name: str,
    axis_values: Sequence[float],
    params_of: Callable[[float], tuple[SpinModelParams, str]],
) -> RunRecord:
    t0 = time.perf_counter()
    noise = _noise_from_section(config["noise"], no_noise)
    n = config["run"]["samples"]
    threads = config["run"]["threads"]

    def point(v: float) -> tuple:
        params, branch = params_of(v)
        data = _scan_point(params, branch, noise, n)
        return (v,) + tuple(data[c] for c in _SCAN_COLUMNS)

    rows = _map_points(point, list(axis_values), threads)
    best = max(rows, key=lambda r: r[3])
    summary = {
        "best_axis_value": best[0],
        "best_open_fidelity": best[3],
        "axis": axis_name,
        "seed": config["run"]["seed"],
    }
    return RunRecord(
        kind=config.kind,
        config=config,
        columns=(axis_name,) + _SCAN_COLUMNS,
        rows=rows,
        summary=summary,
        wall_time_s=time.perf_counter() - t0,
    )


def run_scan_j2(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    grid = config["grid"]
    j1 = grid["j1"]
    values = np.linspace(grid["lo"] * j1, grid["hi"] * j1, grid["points"])

    def params_of(j2: float) -> tuple[SpinModelParams, str]:
        delta = 2.0 * (j2 + j2)
        return (
            symmetric_chain(j1, j1, j2, j2, delta, detuning_choice="plus"),
            "plus",
        )

    return _scan_record(config, no_noise, "j2_mhz", values, params_of)


def run_scan_j1(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    grid = config["grid"]
    j2 = grid["j2"]
    values = np.linspace(grid["lo"], grid["hi"], grid["points"])

    def params_of(j1: float) -> tuple[SpinModelParams, str]:
        delta = 2.0 * (j2 + j2)
        return (
            symmetric_chain(j1, j1, j2, j2, delta, detuning_choice="plus"),
            "plus",
        )

    return _scan_record(config, no_noise, "j1_mhz", values, params_of)


def run_scan_delta(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    """Vary J2x at fixed J2z so the minus-branch detuning sweeps through zero."""
    grid = config["grid"]
    j1, j2z = grid["j1"], grid["j2z"]
    values = np.linspace(grid["lo"], grid["hi"], grid["points"])

    def params_of(j2x: float) -> tuple[SpinModelParams, str]:
        delta = 2.0 * (j2z - j2x)
        return (
            symmetric_chain(j1, j1, j2x, j2z, delta, detuning_choice="minus"),
            "minus",
        )

    record = _scan_record(config, no_noise, "j2x_mhz", values, params_of)
    record.summary["delta_values_mhz"] = [
        2.0 * (j2z - v) for v in values
    ]
    return record


def run_qutrit_compare(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    t0 = time.perf_counter()
    noise = _noise_from_section(config["noise"], no_noise)
    grid = config["grid"]
    n = config["run"]["samples"]
    rows_out: list[tuple] = []
    summary: dict[str, Any] = {"peaks": {}, "seed": config["run"]["seed"]}
    for row_index in config["model"]["rows"]:
        spin = cmap.table_spin_params(row_index)
        qutrit = cmap.table_qutrit_params(row_index)
        branch = cmap.table_branch(row_index)
        tg = analytic_gate_time(spin)
        times = np.linspace(1e-4 * tg, grid["window_hi"] * tg, n)
        for control in grid["configs"]:
            cfg = _gate_config(control, branch)
            tr_qubit = average_fidelity(spin, cfg, noise, times)
            tr_qutrit = average_fidelity(qutrit, cfg, noise, times)
            for t, fq, ft in zip(times, tr_qubit.fbar, tr_qutrit.fbar):
                rows_out.append((row_index, control, t, fq, ft))
            summary["peaks"][f"row{row_index}_{control}"] = {
                "qubit_peak": tr_qubit.peak_value,
                "qubit_peak_time_us": tr_qubit.peak_time,
                "qutrit_peak": tr_qutrit.peak_value,
                "qutrit_peak_time_us": tr_qutrit.peak_time,
                "peak_shift": tr_qutrit.peak_value - tr_qubit.peak_value,
            }
    return RunRecord(
        kind=config.kind,
        config=config,
        columns=("table_row", "control", "t_us", "fbar_qubit", "fbar_qutrit"),
        rows=rows_out,
        summary=summary,
        wall_time_s=time.perf_counter() - t0,
    )


def run_crosstalk_scan(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    t0 = time.perf_counter()
    model, branch = _spin_from_model_section(config["model"])
    noise = _noise_from_section(config["noise"], no_noise)
    n = config["run"]["samples"]
    fractions = config["grid"]["fractions_pct"]
    window = default_open_window(model, n=n)
    open_cfg = GateConfig(delta_branch=branch, control_state="open_0")
    closed_plus = GateConfig(delta_branch=branch, control_state="closed_1plus")
    closed_minus = GateConfig(delta_branch=branch, control_state="closed_1minus")
    rows: list[tuple] = []
    for pct in fractions:
        jc = pct / 100.0 * abs(model.j1x)
        h_nn = add_crosstalk(model, j_nn=jc, j_nnn=0.0)
        h_nnn = add_crosstalk(model, j_nn=jc, j_nnn=jc)
        cells = [jc]
        for h in (h_nn, h_nnn):
            tr_open = average_fidelity(model, open_cfg, noise, window, hamiltonian=h)
            t_num = tr_open.peak_time
            cells.append(tr_open.peak_value)
            for ccfg in (closed_plus, closed_minus):
                tr = average_fidelity(model, ccfg, noise, window, hamiltonian=h)
                cells.append(_trace_at(tr, t_num))
        rows.append(tuple(cells))
    summary = {
        "j1_mhz": model.j1x,
        "baseline_open": rows[0][1],
        "seed": config["run"]["seed"],
    }
    return RunRecord(
        kind=config.kind,
        config=config,
        columns=(
            "jc_mhz",
            "fbar_open_nn", "fbar_closed_plus_nn", "fbar_closed_minus_nn",
            "fbar_open_nnn", "fbar_closed_plus_nnn", "fbar_closed_minus_nnn",
        ),
        rows=rows,
        summary=summary,
        wall_time_s=time.perf_counter() - t0,
    )


def run_n5_trace(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    t0 = time.perf_counter()
    m = config["model"]
    noise = _noise_from_section(config["noise"], no_noise)
    n = config["run"]["samples"]
    params = build_n5_model(
        m["j1"], m["j1"], m["j2"], m["j2"], m["delta3"], branch=m["branch"]
    )
    tg = analytic_gate_time(params)
    times = np.linspace(1e-4 * tg, config["grid"]["window_hi"] * tg, n)
    cfg = GateConfig(delta_branch="plus", control_state="custom",
                     custom_vector=tuple(n5_control_states(params)["open_0"]))
    target = TargetGate.open_gate("plus")  # negative swap with the i phase
    trace = average_fidelity(params, cfg, noise, times, target=target)
    rows = [(t, f) for t, f in zip(times, trace.fbar)]
    summary = {
        "gate_time_analytic_us": tg,
        "peak_time_us": trace.peak_time,
        "peak_fidelity": trace.peak_value,
        "seed": config["run"]["seed"],
    }
    return RunRecord(
        kind=config.kind,
        config=config,
        columns=("t_us", "fbar"),
        rows=rows,
        summary=summary,
        wall_time_s=time.perf_counter() - t0,
    )


def run_drive_demo(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    t0 = time.perf_counter()
    model, _branch = _spin_from_model_section(config["model"])
    noise = _noise_from_section(config["noise"], no_noise)
    grid = config["grid"]
    amplitude = grid["amplitude_fraction"] * abs(model.j2z)
    pulse = calibrated_pi_pulse(model, amplitude)
    t_pi = pulse.pi_duration()
    durations = np.linspace(t_pi / grid["n_durations"], 2.0 * t_pi,
                            grid["n_durations"])
    rows = []
    for d in durations:
        res = rabi_prepare(model, pulse, "closed_1plus", float(d), noise=noise)
        rows.append((float(d), res.transfer_probability))
    pi_result = rabi_prepare(model, pulse, "closed_1plus", t_pi, noise=noise)
    summary = {
        "amplitude_mhz": amplitude,
        "frequency_mhz": pulse.frequency,
        "pi_duration_us": t_pi,
        "pi_transfer_probability": pi_result.transfer_probability,
        "seed": config["run"]["seed"],
    }
    return RunRecord(
        kind=config.kind,
        config=config,
        columns=("duration_us", "p_open"),
        rows=rows,
        summary=summary,
        wall_time_s=time.perf_counter() - t0,
    )


def run_circuit_map(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    t0 = time.perf_counter()
    m = config["model"]
    if m["source"] == "table_row":
        circuit = cmap.table_circuit_params(m["row"])
    else:
        circuit = cmap.CircuitParams(
            e1=m["e1"], e2=m["e2"], e12=m["e12"], e23=m["e23"],
            c1=m["c1"], c2=m["c2"], c23=m["c23"], l12=m["l12"],
        )
    res = cmap.circuit_to_spin(circuit)
    columns = (
        "omega1_ghz", "omega2_ghz", "j1x_mhz", "j1z_mhz", "j2x_mhz", "j2y_mhz",
        "j2z_mhz", "delta_mhz", "anh_rel_1", "anh_rel_2", "k23x_mhz",
        "m23x_mhz", "r23x_mhz", "p23x_mhz",
    )
    row = (
        res.omega1, res.omega2, res.j1x, res.j1z, res.j2x, res.j2y, res.j2z,
        res.delta, res.anh_rel_1, res.anh_rel_2, res.k23x, res.m23x,
        res.r23x, res.p23x,
    )
    kinv, cond = cmap.inverse_capacitance(cmap.gate_capacitance_matrix(circuit))
    summary = {
        "condition_number": cond,
        "t_coeffs": list(res.t_coeffs),
        "s_coeffs_ghz": list(res.s_coeffs),
        "seed": config["run"]["seed"],
    }
    return RunRecord(
        kind=config.kind,
        config=config,
        columns=columns,
        rows=[row],
        summary=summary,
        wall_time_s=time.perf_counter() - t0,
    )


def run_search_experiment(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    t0 = time.perf_counter()
    grid = config["grid"]
    results = run_search(
        cost=CostSpec(),
        bounds=None,
        branch=config["model"]["branch"],
        seed=config["run"]["seed"],
        n_restarts=grid["n_restarts"],
        max_evaluations=grid["max_evaluations"],
        keep_all=grid["keep_all"],
    )
    columns = (
        "e1_ghz", "e2_ghz", "e12_ghz", "e23_ghz", "c1_ff", "c2_ff", "c23_ff",
        "l12_nh", "omega1_ghz", "omega2_ghz", "j1x_mhz", "j1z_mhz", "j2x_mhz",
        "j2z_mhz", "delta_mhz", "anh_rel_1", "anh_rel_2", "k23x_mhz",
        "m23x_mhz", "cost", "accepted",
    )
    rows = []
    for r in results:
        c, s = r.circuit, r.spin
        rows.append((
            c.e1, c.e2, c.e12, c.e23, c.c1, c.c2, c.c23, c.l12,
            s.omega1, s.omega2, s.j1x, s.j1z, s.j2x, s.j2z, s.delta,
            s.anh_rel_1, s.anh_rel_2, s.k23x, s.m23x, r.cost, r.accepted,
        ))
    summary = {
        "n_results": len(results),
        "n_accepted": sum(1 for r in results if r.accepted),
        "best_cost": results[0].cost if results else None,
        "best_residuals": results[0].residuals if results else None,
        "seed": config["run"]["seed"],
    }
    return RunRecord(
        kind=config.kind,
        config=config,
        columns=columns,
        rows=rows,
        summary=summary,
        wall_time_s=time.perf_counter() - t0,
    )


RUNNERS: dict[str, Callable[[ExperimentConfig, bool], RunRecord]] = {
    "fidelity_trace": run_fidelity_trace,
    "scan_j2": run_scan_j2,
    "scan_j1": run_scan_j1,
    "scan_delta": run_scan_delta,
    "qutrit_compare": run_qutrit_compare,
    "crosstalk_scan": run_crosstalk_scan,
    "n5_trace": run_n5_trace,
    "drive_demo": run_drive_demo,
    "circuit_map": run_circuit_map,
    "search": run_search_experiment,
}


def run_experiment(config: ExperimentConfig, no_noise: bool = False) -> RunRecord:
    return RUNNERS[config.kind](config, no_noise)


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

_SUBCOMMANDS = {
    "trace": "fidelity_trace",
    "scan-j2": "scan_j2",
    "scan-j1": "scan_j1",
    "scan-delta": "scan_delta",
    "qutrit": "qutrit_compare",
    "crosstalk": "crosstalk_scan",
    "n5": "n5_trace",
    "drive": "drive_demo",
    "circuit-map": "circuit_map",
    "search": "search",
}


@click.group()
def main() -> None:
    """Conditional two-qubit swap gate simulator."""


def _register(name: str, kind: str) -> None:
    @main.command(name=name, help=f"Run the {kind} experiment.")
    @click.option("--config", "config_path", type=click.Path(exists=True),
                  default=None, help="Configuration file.")
    @click.option("--out", "out_path", default=None, help="Output CSV path.")
    @click.option("--seed", type=int, default=None, help="Override the seed.")
    @click.option("--threads", type=int, default=None,
                  help="Worker threads for scan points.")
    @click.option("--no-noise", is_flag=True, default=False,
                  help="Disable decoherence noise for this run.")
    def command(config_path, out_path, seed, threads, no_noise, _kind=kind):
        try:
            cfg = load_config(config_path) if config_path else default_config(_kind)
            if cfg.kind != _kind:
                raise ConfigError(
                    f"configuration is for {cfg.kind!r}, expected {_kind!r}"
                )
            sections = {k: dict(v) for k, v in cfg.sections.items()}
            if seed is not None:
                sections["run"]["seed"] = seed
            if threads is not None:
                sections["run"]["threads"] = threads
            cfg = ExperimentConfig(kind=cfg.kind, sections=sections)
            out = out_path or cfg["run"]["out"] or f"{_kind}.csv"
        except ConfigError as exc:
            click.echo(f"configuration error: {exc}", err=True)
            raise SystemExit(2)
        try:
            record = run_experiment(cfg, no_noise=no_noise)
        except (PropagationError, GateTimeWindowError, ModelError,
                HilbertError, cmap.MappingError,
                cmap.SingularCapacitanceError) as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            raise SystemExit(3)
        csv_path, json_path = emit(record, out)
        click.echo(f"wrote {csv_path} and {json_path} "
                   f"({record.wall_time_s:.1f} s)")

    command.__name__ = f"cmd_{kind}"


for _name, _kind in _SUBCOMMANDS.items():
    _register(_name, _kind)


if __name__ == "__main__":
    main()
