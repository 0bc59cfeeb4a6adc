"""Configuration ingestion, seeded trajectory ensembles, and experiment statistics.

A single JSON document drives an experiment: model + couplings, initial ket,
protocol list, a step-size plan (fixed dt with a list of step counts, or
fixed total time with a list of step sizes), trajectory count, noise level,
and master seed. Results are deterministic functions of the config and seed,
independent of how many workers execute the trajectories.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .compilers import (
    DETERMINISTIC_PROTOCOLS,
    PROTOCOL_NAMES,
    StepPlan,
    TrajectoryRecord,
    run_exact,
    run_protocol,
)
from .hamiltonians import (
    Decomposition,
    HilbertStructure,
    basis_state,
    build_kerr,
    build_mfim,
    build_rabi,
)
from .moments import NoiseModel
from .rng import trajectory_stream

PROTOCOL_IDS = {name: i for i, name in enumerate(PROTOCOL_NAMES)}

DEFAULT_PARAMS = {
    "mfim": {"L": 4, "J": 1.0, "h_x": 0.5, "h_z": 0.3},
    "kerr": {"delta": 0.3, "K": 1.0, "eps": 0.5, "D": 50},
    "rabi": {"omega": 1.0, "Omega": 1.0, "g": 0.2, "D": 50},
}
DEFAULT_INITIAL_STATE = {
    "mfim": "0011",
    "kerr": "(|1⟩+|5⟩)/√2",
    "rabi": "(|2,0⟩+|5,0⟩)/√2",
}
DEFAULT_N_LIST = [5, 10, 15, 20, 25, 30, 35, 40, 45, 50]
DEFAULT_DT_LIST = [0.01, 0.02, 0.04, 0.05, 0.1]


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class PlanPoint:
    x_kind: str  # "steps" | "dt"
    x_value: float
    plan: StepPlan


@dataclass
class PlanSpec:
    mode: str = "fixed_dt"
    dt: float = 0.02
    n_list: list[int] = field(default_factory=lambda: list(DEFAULT_N_LIST))
    t: float = 1.0
    dt_list: list[float] = field(default_factory=lambda: list(DEFAULT_DT_LIST))

    def points(self) -> list[PlanPoint]:
        if self.mode == "fixed_dt":
            return [
                PlanPoint("steps", float(n), StepPlan(n * self.dt, n))
                for n in self.n_list
            ]
        out = []
        for dt in self.dt_list:
            n = max(1, round(self.t / dt))
            out.append(PlanPoint("dt", self.t / n, StepPlan(self.t, n)))
        return out

    def to_dict(self) -> dict:
        if self.mode == "fixed_dt":
            return {"mode": "fixed_dt", "dt": self.dt, "n_list": list(self.n_list)}
        return {"mode": "fixed_t", "t": self.t, "dt_list": list(self.dt_list)}


@dataclass
class ExperimentConfig:
    model: str
    params: dict
    initial_state: str
    protocols: list[str]
    plan: PlanSpec
    trajectories: int = 2000
    noise_std: float = 0.0
    master_seed: int = 0
    out: str | None = None
    format: str = "csv"
    include_bounds: bool = False
    ptrace_trajectories: int = 1
    shot_params: dict | None = None

    def to_dict(self) -> dict:
        d = {
            "model": self.model,
            "params": dict(self.params),
            "initial_state": self.initial_state,
            "protocols": list(self.protocols),
            "plan": self.plan.to_dict(),
            "trajectories": self.trajectories,
            "noise_std": self.noise_std,
            "master_seed": self.master_seed,
        }
        if self.out is not None:
            d["out"] = self.out
        if self.include_bounds:
            d["include_bounds"] = True
        if self.ptrace_trajectories != 1:
            d["ptrace_trajectories"] = self.ptrace_trajectories
        if self.shot_params is not None:
            d["shot_params"] = dict(self.shot_params)
        return d


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _plan_from_dict(raw: dict) -> PlanSpec:
    _require(isinstance(raw, dict), "plan must be an object")
    mode = raw.get("mode", "fixed_dt")
    _require(mode in ("fixed_dt", "fixed_t"), f"unknown plan mode {mode!r}")
    known = {"mode", "dt", "n_list", "t", "dt_list"}
    unknown = set(raw) - known
    _require(not unknown, f"unknown plan keys {sorted(unknown)}")
    spec = PlanSpec(mode=mode)
    if mode == "fixed_dt":
        spec.dt = float(raw.get("dt", 0.02))
        _require(spec.dt > 0, "plan dt must be positive")
        n_list = raw.get("n_list", DEFAULT_N_LIST)
        _require(
            isinstance(n_list, list) and len(n_list) > 0,
            "plan n_list must be a nonempty list",
        )
        for n in n_list:
            _require(isinstance(n, int) and n >= 1, f"bad step count {n!r}")
        spec.n_list = list(n_list)
    else:
        spec.t = float(raw.get("t", 1.0))
        _require(spec.t > 0, "plan t must be positive")
        dt_list = raw.get("dt_list", DEFAULT_DT_LIST)
        _require(
            isinstance(dt_list, list) and len(dt_list) > 0,
            "plan dt_list must be a nonempty list",
        )
        for dt in dt_list:
            _require(isinstance(dt, (int, float)) and dt > 0, f"bad step size {dt!r}")
        spec.dt_list = [float(dt) for dt in dt_list]
    return spec


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Validate a parsed JSON document into an ExperimentConfig."""
    _require(isinstance(raw, dict), "config must be a JSON object")
    known = {
        "model",
        "params",
        "initial_state",
        "protocols",
        "plan",
        "trajectories",
        "noise_std",
        "master_seed",
        "out",
        "format",
        "include_bounds",
        "ptrace_trajectories",
        "shot_params",
    }
    unknown = set(raw) - known
    _require(not unknown, f"unknown config keys {sorted(unknown)}")

    model = raw.get("model")
    _require(model in DEFAULT_PARAMS, f"model must be one of {sorted(DEFAULT_PARAMS)}, got {model!r}")

    params = dict(DEFAULT_PARAMS[model])
    overrides = raw.get("params", {})
    _require(isinstance(overrides, dict), "params must be an object")
    bad = set(overrides) - set(params)
    _require(not bad, f"unknown {model} parameters {sorted(bad)}")
    params.update(overrides)

    protocols = raw.get("protocols", ["arc", "rc"])
    _require(
        isinstance(protocols, list) and len(protocols) > 0,
        "protocols must be a nonempty list",
    )
    for name in protocols:
        _require(name in PROTOCOL_NAMES, f"unknown protocol {name!r}")
    _require(len(set(protocols)) == len(protocols), "duplicate protocol names")

    plan = _plan_from_dict(raw.get("plan", {"mode": "fixed_dt"}))

    trajectories = raw.get("trajectories", 2000)
    _require(
        isinstance(trajectories, int) and trajectories >= 1,
        "trajectories must be a positive integer",
    )
    noise_std = float(raw.get("noise_std", 0.0))
    _require(noise_std >= 0, "noise_std must be nonnegative")
    master_seed = raw.get("master_seed", 0)
    _require(
        isinstance(master_seed, int) and 0 <= master_seed < 2**64,
        "master_seed must be an unsigned 64-bit integer",
    )
    fmt = raw.get("format", "csv")
    _require(fmt in ("csv", "json"), f"format must be csv or json, got {fmt!r}")
    ptrace_m = raw.get("ptrace_trajectories", 1)
    _require(
        isinstance(ptrace_m, int) and ptrace_m >= 1,
        "ptrace_trajectories must be a positive integer",
    )
    shot_params = raw.get("shot_params")
    if shot_params is not None:
        _require(isinstance(shot_params, dict), "shot_params must be an object")

    return ExperimentConfig(
        model=model,
        params=params,
        initial_state=raw.get("initial_state", DEFAULT_INITIAL_STATE[model]),
        protocols=list(protocols),
        plan=plan,
        trajectories=trajectories,
        noise_std=noise_std,
        master_seed=master_seed,
        out=raw.get("out"),
        format=fmt,
        include_bounds=bool(raw.get("include_bounds", False)),
        ptrace_trajectories=ptrace_m,
        shot_params=shot_params,
    )


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return config_from_dict(raw)


def build_model(config: ExperimentConfig) -> tuple[Decomposition, HilbertStructure]:
    """Construct the configured model's decomposition and Hilbert structure."""
    p = config.params
    if config.model == "mfim":
        return build_mfim(int(p["L"]), p["J"], p["h_x"], p["h_z"])
    if config.model == "kerr":
        return build_kerr(p["delta"], p["K"], p["eps"], int(p["D"]))
    return build_rabi(p["omega"], p["Omega"], p["g"], int(p["D"]))


@dataclass(eq=False)
class SeriesPoint:
    protocol: str
    x_kind: str
    x_value: float
    mean_fidelity: float
    stderr: float
    trajectories: int


@dataclass(eq=False)
class EnsembleResult:
    series: list[SeriesPoint]
    extrapolated: dict[str, float]
    config: ExperimentConfig


@dataclass(eq=False)
class PTraceTable:
    """Per-step sampling-probability trace of one adaptive trajectory."""

    labels: tuple[str, ...]
    steps: np.ndarray
    probabilities: np.ndarray
    sampled_indices: np.ndarray
    taus: np.ndarray
    config: ExperimentConfig


def worker_count() -> int:
    """Bounded worker pool size; ARC_SIM_THREADS overrides the default."""
    env = os.environ.get("ARC_SIM_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"ARC_SIM_THREADS must be an integer, got {env!r}") from None
        _require(n >= 1, "ARC_SIM_THREADS must be >= 1")
        return n
    return min(8, os.cpu_count() or 1)


class _Context:
    """Built model + per-plan-point exact-state cache, shared by trajectories."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.decomp, self.structure = build_model(config)
        self.state0 = basis_state(config.initial_state, self.structure)
        self.points = config.plan.points()
        self._exact: dict[int, list] = {}

    def exact(self, point_idx: int) -> list:
        if point_idx not in self._exact:
            plan = self.points[point_idx].plan
            self._exact[point_idx] = run_exact(
                self.state0, self.decomp.total_operator, plan
            )
        return self._exact[point_idx]

    def run_one(self, protocol: str, point_idx: int, m: int) -> TrajectoryRecord:
        plan = self.points[point_idx].plan
        stream = trajectory_stream(
            self.config.master_seed, PROTOCOL_IDS[protocol], point_idx, m
        )
        return run_protocol(
            protocol,
            self.state0,
            self.decomp,
            plan,
            noise=NoiseModel(self.config.noise_std),
            stream=stream,
            exact_states=self.exact(point_idx),
        )


_WORKER_CTX: _Context | None = None


def _worker_init(config_dict: dict) -> None:
    global _WORKER_CTX
    _WORKER_CTX = _Context(config_from_dict(config_dict))


def _worker_chunk(protocol: str, point_idx: int, lo: int, hi: int) -> tuple[str, int, int, list]:
    assert _WORKER_CTX is not None
    fids = [
        _WORKER_CTX.run_one(protocol, point_idx, m).final_fidelity
        for m in range(lo, hi)
    ]
    return protocol, point_idx, lo, fids


def _ensemble_fidelities(ctx: _Context, config: ExperimentConfig) -> dict:
    """Per-(protocol, plan point) fidelity arrays, trajectory-indexed."""
    m_count = config.trajectories
    tasks = []  # (protocol, point_idx, n_trajectories)
    for protocol in config.protocols:
        n = 1 if protocol in DETERMINISTIC_PROTOCOLS else m_count
        for point_idx in range(len(ctx.points)):
            tasks.append((protocol, point_idx, n))

    fids = {
        (protocol, point_idx): np.empty(n)
        for protocol, point_idx, n in tasks
    }
    workers = worker_count()
    total = sum(n for _, _, n in tasks)
    if workers > 1 and total >= 4 * workers:
        chunk = max(16, -(-m_count // (4 * workers)))
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_worker_init,
            initargs=(config.to_dict(),),
        ) as pool:
            futures = []
            for protocol, point_idx, n in tasks:
                for lo in range(0, n, chunk):
                    futures.append(
                        pool.submit(
                            _worker_chunk, protocol, point_idx, lo, min(lo + chunk, n)
                        )
                    )
            for fut in futures:
                protocol, point_idx, lo, values = fut.result()
                fids[(protocol, point_idx)][lo : lo + len(values)] = values
    else:
        for protocol, point_idx, n in tasks:
            for m in range(n):
                fids[(protocol, point_idx)][m] = ctx.run_one(
                    protocol, point_idx, m
                ).final_fidelity
    return fids


def run_ensemble(config: ExperimentConfig) -> EnsembleResult:
    """Run every (protocol, plan point) ensemble and aggregate fidelity statistics.

    Deterministic protocols (exact, trotter1) are executed once per plan
    point; stochastic protocols get `trajectories` independent runs, each
    seeded from (master seed, protocol, plan point, trajectory index).
    """
    ctx = _Context(config)
    fids = _ensemble_fidelities(ctx, config)
    series = []
    for protocol in config.protocols:
        for point_idx, point in enumerate(ctx.points):
            values = fids[(protocol, point_idx)]
            m = len(values)
            mean = float(np.sum(values) / m)
            stderr = float(np.std(values, ddof=1) / np.sqrt(m)) if m > 1 else 0.0
            series.append(
                SeriesPoint(protocol, point.x_kind, point.x_value, mean, stderr, m)
            )
    extrapolated = {}
    if config.plan.mode == "fixed_t" and len(ctx.points) >= 3:
        for protocol in config.protocols:
            pts = [
                (sp.x_value, sp.mean_fidelity)
                for sp in series
                if sp.protocol == protocol
            ]
            extrapolated[protocol] = extrapolate_zero_dt(pts)
    return EnsembleResult(series=series, extrapolated=extrapolated, config=config)


def run_ptrace(config: ExperimentConfig) -> PTraceTable:
    """Sampling-probability trace of the adaptive protocol at one plan point.

    Logs a single seeded trajectory by default; with ptrace_trajectories > 1
    the probability rows are averaged over that many trajectories and the
    sampled-index/tau columns are left empty (-1 / NaN).
    """
    if config.protocols != ["arc"]:
        raise ConfigError('probability traces require protocols == ["arc"]')
    points = config.plan.points()
    if len(points) != 1:
        raise ConfigError("probability traces require a single plan point")
    ctx = _Context(config)
    records = [
        ctx.run_one("arc", 0, m) for m in range(config.ptrace_trajectories)
    ]
    n = points[0].plan.steps
    steps = np.arange(1, n + 1)
    if len(records) == 1:
        rec = records[0]
        return PTraceTable(
            ctx.decomp.labels, steps, rec.probabilities, rec.indices, rec.taus, config
        )
    probs = np.mean([rec.probabilities for rec in records], axis=0)
    return PTraceTable(
        ctx.decomp.labels,
        steps,
        probs,
        np.full(n, -1, dtype=int),
        np.full(n, np.nan),
        config,
    )


def extrapolate_zero_dt(points: Sequence[tuple[float, float]]) -> float:
    """Zero-step-size fidelity: linear fit over the 3 smallest dt, intercept in [0, 1]."""
    if len(points) < 3:
        raise ValueError("extrapolation needs at least 3 (dt, fidelity) points")
    smallest = sorted(points, key=lambda p: p[0])[:3]
    x = np.array([p[0] for p in smallest])
    y = np.array([p[1] for p in smallest])
    slope, intercept = np.polyfit(x, y, 1)
    return float(min(max(intercept, 0.0), 1.0))
