"""Run configuration documents and seeded trial fan-out."""

from __future__ import annotations

import json
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .cnf import Cnf
from .dynamics import DynamicsConfig, Network, RunRecord, run
from .metrics import BenchReport, aggregate
from .perturb import PerturbationConfig, make_schedule
from .reference import WalkSatParams, walksat

SOLVERS = ("skisat", "walksat")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        where = ":".join(str(p) for p in (path, line) if p is not None)
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True)
class WalkSatSettings:
    noise_prob: float = 0.5
    cutoff_flips: int = 100_000
    max_tries: int = 1


@dataclass(frozen=True)
class RunConfig:
    solver: str = "skisat"
    trials: int = 1000
    seed_base: int = 0
    power_watts: float | None = None
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    perturbation: PerturbationConfig = field(default_factory=PerturbationConfig)
    walksat: WalkSatSettings = field(default_factory=WalkSatSettings)

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.power_watts is not None and self.power_watts <= 0:
            raise ValueError("power_watts must be positive")
        WalkSatParams(self.walksat.noise_prob, self.walksat.cutoff_flips, self.walksat.max_tries)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def with_mode(self, mode: str) -> "RunConfig":
        return replace(self, perturbation=replace(self.perturbation, mode=mode))


_SECTIONS = {"dynamics": DynamicsConfig, "perturbation": PerturbationConfig, "walksat": WalkSatSettings}


def _key_line(text: str, key: str) -> int | None:
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _check_keys(cls, data: dict, text: str, path, section: str = "") -> None:
    known = {f.name for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown key {section}{key!r}", _key_line(text, key), path)


def parse_run_config(text: str, path: str | None = None) -> RunConfig:
    """Parse and validate a JSON run-config document; missing keys take defaults."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno, path) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object", 1, path)
    _check_keys(RunConfig, data, text, path)
    kwargs = {}
    for key, value in data.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"{key!r} must be an object", _key_line(text, key), path)
            _check_keys(_SECTIONS[key], value, text, path, f"{key}.")
            try:
                kwargs[key] = _SECTIONS[key](**value)
            except (TypeError, ValueError) as exc:
                bad = next((k for k in value if k in str(exc)), key)
                raise ConfigError(f"{key}: {exc}", _key_line(text, bad), path) from None
        else:
            kwargs[key] = value
    try:
        return RunConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        bad = next((k for k in data if k in str(exc)), None)
        raise ConfigError(str(exc), _key_line(text, bad) if bad else None, path) from None


def load_run_config(path) -> RunConfig:
    return parse_run_config(Path(path).read_text(), str(path))


def satlib_id(path, cnf: Cnf) -> str:
    """SATLIB-style id: 'uf50-0100.cnf' with 218 clauses -> 'uf50-218/0100'."""
    stem = Path(path).stem
    m = re.fullmatch(r"(uuf|uf)(\d+)-(\d+)", stem)
    if m and int(m.group(2)) == cnf.num_vars:
        return f"{m.group(1)}{m.group(2)}-{cnf.num_clauses}/{m.group(3)}"
    return stem


# Worker-process globals, set once per pool by _init_worker.
_W: dict = {}


def _init_worker(clauses, num_vars, config_dict):
    cnf = Cnf.from_lists(num_vars, clauses)
    _W["cnf"] = cnf
    _W["net"] = Network(cnf)
    _W["cfg"] = _config_from_dict(config_dict)


def _config_from_dict(d: dict) -> RunConfig:
    d = dict(d)
    for key, cls in _SECTIONS.items():
        d[key] = cls(**d[key])
    return RunConfig(**d)


def run_one(cnf: Cnf, cfg: RunConfig, seed: int, network: Network | None = None) -> RunRecord:
    if cfg.solver == "walksat":
        w = cfg.walksat
        return walksat(cnf, WalkSatParams(w.noise_prob, w.cutoff_flips, w.max_tries, seed))
    schedule = make_schedule(cfg.perturbation, cfg.dynamics.max_steps, seed)
    return run(cnf, cfg.dynamics, schedule, seed, network=network)


def _run_seeds(seeds):
    return [run_one(_W["cnf"], _W["cfg"], s, _W["net"]) for s in seeds]


def default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def run_trials(cnf: Cnf, cfg: RunConfig, jobs: int | None = None) -> list[RunRecord]:
    """Seeds seed_base .. seed_base+trials-1; results come back ordered by seed."""
    seeds = list(range(cfg.seed_base, cfg.seed_base + cfg.trials))
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1 or len(seeds) == 1:
        net = Network(cnf)
        return [run_one(cnf, cfg, s, net) for s in seeds]
    n_chunks = min(len(seeds), jobs * 4)
    chunks = [seeds[i::n_chunks] for i in range(n_chunks)]
    with ProcessPoolExecutor(jobs, initializer=_init_worker,
                             initargs=(cnf.to_lists(), cnf.num_vars, cfg.to_dict())) as pool:
        results = [r for chunk in pool.map(_run_seeds, chunks) for r in chunk]
    return sorted(results, key=lambda r: r.seed)


def bench(cnf: Cnf, cfg: RunConfig, instance: str, jobs: int | None = None,
          keep_records: bool = False) -> BenchReport:
    records = run_trials(cnf, cfg, jobs)
    if cfg.solver == "skisat":
        solver = f"skisat:{cfg.perturbation.mode}"
        for r in records:
            r.solver = solver
        dt = cfg.dynamics.dt_seconds
    else:
        solver, dt = "walksat", None
    return aggregate(records, instance, solver, cfg.to_dict(), dt_seconds=dt,
                     power_watts=cfg.power_watts, keep_records=keep_records)
