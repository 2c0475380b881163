"""Figures of merit over batches of runs: success rate, N99, time and energy to solution."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .dynamics import RunRecord

# Published reference numbers. They are hardware measurements and are only
# ever echoed into reports, never recomputed.
CITED_TTS_US = {
    "uf50-218/0100": {"amoebasat_hw": 4.13, "walksat_m1": 187.0, "skisat": 4.2},
    "uf50-218/0410": {"amoebasat_hw": 4.36, "walksat_m1": 141.0, "skisat": 4.2},
    "uf50-218/0767": {"amoebasat_hw": 8.30, "walksat_m1": 365.0, "skisat": 10.8},
    "uf100-430/0285": {"amoebasat_hw": 356.0, "walksat_m1": 5872.0, "skisat": 344.7},
    "uf150-645/0100": {"amoebasat_hw": 1832.0, "walksat_m1": 6026.0, "skisat": 137.7},
    "uf225-960/028": {"amoebasat_hw": 3078.0, "walksat_m1": 1508.0, "skisat": 27.6},
}
CITED_POWER_W = {
    "skisat_circuit_with_perturbation": 0.020,
    "skisat_circuit_50var": 0.03768,
    "m1_cpu_walksat": 7.5,
}

CSV_COLUMNS = ("instance", "solver", "trials", "sr", "n99", "tts_s", "ets_j")


def n99(sr: float) -> int:
    """Repetitions needed to see at least one success with 99% probability."""
    if not 0.0 < sr <= 1.0:
        raise ValueError(f"success rate must lie in (0, 1], got {sr}")
    if sr >= 0.99:
        return 1
    ratio = math.log(0.01) / math.log1p(-sr)
    # guard against ratios like 7.000000000000001 from rounding
    return max(1, math.ceil(ratio - 1e-9))


def success_rate(records: Sequence[RunRecord]) -> float:
    if not records:
        raise ValueError("no records")
    return sum(r.solved for r in records) / len(records)


def tts(records: Sequence[RunRecord], dt_seconds: float) -> float | None:
    """Mean steps-to-solution over successes, times the step duration, times N99.

    Returns None when nothing was solved.
    """
    solved = [r.steps_to_solution for r in records if r.solved]
    if not solved:
        return None
    return sum(solved) / len(solved) * dt_seconds * n99(len(solved) / len(records))


def baseline_tts(records: Sequence[RunRecord]) -> float | None:
    """Mean wall time per run times N99, for solvers timed on the host CPU."""
    sr = success_rate(records)
    if sr == 0:
        return None
    mean_wall = sum(r.extra["wall_seconds"] for r in records) / len(records)
    return mean_wall * n99(sr)


def ets(tts_seconds: float, power_watts: float) -> float:
    if tts_seconds <= 0 or power_watts <= 0:
        raise ValueError("time and power must both be positive")
    return tts_seconds * power_watts


@dataclass
class BenchReport:
    instance: str
    solver: str
    trials: int
    successes: int
    success_rate: float
    n99: int | None
    mean_steps_to_solution: float | None
    tts_seconds: float | None
    ets_joules: float | None = None
    power_watts: float | None = None
    config: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    cited: dict = field(default_factory=dict)
    records: list[dict] | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["records"] is None:
            del d["records"]
        return d

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "BenchReport":
        return cls.from_dict(json.loads(text))

    def csv_row(self) -> dict:
        return {
            "instance": self.instance,
            "solver": self.solver,
            "trials": self.trials,
            "sr": self.success_rate,
            "n99": "" if self.n99 is None else self.n99,
            "tts_s": "" if self.tts_seconds is None else self.tts_seconds,
            "ets_j": "" if self.ets_joules is None else self.ets_joules,
        }


def aggregate(records: Sequence[RunRecord], instance: str, solver: str, config: dict | None = None,
              *, dt_seconds: float | None = None, power_watts: float | None = None,
              keep_records: bool = False) -> BenchReport:
    """Reduce a batch of runs on one instance to a report.

    Simulated solvers need ``dt_seconds``; records carrying ``wall_seconds``
    (host-timed baselines) are timed per run instead.
    """
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    solvers = {r.solver for r in records}
    if solvers != {solver}:
        raise ValueError(f"records come from solvers {sorted(solvers)}, expected {solver!r}")
    records = sorted(records, key=lambda r: r.seed)
    successes = sum(r.solved for r in records)
    sr = successes / len(records)
    steps = [r.steps_to_solution for r in records if r.solved]
    mean_steps = sum(steps) / len(steps) if steps else None

    timing: dict = {}
    if all("wall_seconds" in r.extra for r in records):
        total_wall = sum(r.extra["wall_seconds"] for r in records)
        total_flips = sum(r.extra.get("flips", 0) for r in records)
        total_tries = sum(r.extra.get("tries", 1) for r in records)
        timing = {
            "mean_run_seconds": total_wall / len(records),
            "mean_try_seconds": total_wall / total_tries,
            "mean_flip_seconds": total_wall / total_flips if total_flips else None,
        }
        t = baseline_tts(records)
    else:
        if dt_seconds is None:
            raise ValueError("dt_seconds is required for simulated solvers")
        t = tts(records, dt_seconds)
        timing = {"dt_seconds": dt_seconds}

    e = ets(t, power_watts) if (t is not None and power_watts is not None) else None
    cited = {}
    if instance in CITED_TTS_US:
        cited = {"tts_us": CITED_TTS_US[instance], "power_w": CITED_POWER_W}
    return BenchReport(
        instance=instance,
        solver=solver,
        trials=len(records),
        successes=successes,
        success_rate=sr,
        n99=n99(sr) if successes else None,
        mean_steps_to_solution=mean_steps,
        tts_seconds=t,
        ets_joules=e,
        power_watts=power_watts,
        config=dict(config or {}),
        timing=timing,
        cited=cited,
        records=[r.to_dict() for r in records] if keep_records else None,
    )


def reports_csv(reports: Sequence[BenchReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for rep in reports:
        w.writerow(rep.csv_row())
    return buf.getvalue()
