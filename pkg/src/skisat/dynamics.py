"""Clause-coupled capacitor dynamics.

Node voltages live on [0, 1] (rails normalized, comparator threshold 0.5).
Each clause drives the nodes of its literals with unit currents:

* an unsatisfied clause pushes every one of its variables toward the value
  that would satisfy it;
* a clause with exactly one true literal holds that variable in place;
* while the global perturbation bit P is high, satisfied clauses are
  silenced, which removes the hold currents.

With P low the current on node i is exactly minus the discrete derivative
of the unsatisfied-clause count with respect to X_i, so the system performs
gradient descent on the Hamming cube.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .cnf import Cnf, evaluate
from .perturb import PerturbationSchedule, draw_noise

if os.environ.get("SKISAT_PURE_PYTHON"):
    from ._fallback import simulate as _simulate

    KERNEL = "python"
else:
    try:
        from ._kernel import simulate as _simulate

        KERNEL = "compiled"
    except ImportError:
        from ._fallback import simulate as _simulate

        KERNEL = "python"


@dataclass(frozen=True)
class DynamicsConfig:
    # 1 mV step on a 0.6 V half-swing
    delta_v: float = 1.0 / 600.0
    dt_seconds: float = 20e-12
    v_init: float = 0.5
    # kT/C for 200 fF at 300 K is ~144 uV, i.e. 2.4e-4 of the half-swing
    init_noise_rms: float = 2.4e-4
    # 100 ns anneal
    max_steps: int = 5_000
    threshold: float = 0.5
    record_trace: bool = False

    def __post_init__(self):
        if not 0.0 < self.delta_v < 0.5:
            raise ValueError(f"delta_v must lie in (0, 0.5), got {self.delta_v}")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.dt_seconds <= 0:
            raise ValueError("dt_seconds must be positive")
        if not 0.0 <= self.v_init <= 1.0:
            raise ValueError("v_init must lie in [0, 1]")
        if self.init_noise_rms < 0:
            raise ValueError("init_noise_rms must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ClauseOutputs:
    t: bool
    z: tuple[bool, ...]


@dataclass(frozen=True, eq=False)
class SolverState:
    v: np.ndarray
    x: np.ndarray
    step: int
    best_unsat: int
    best_x: np.ndarray
    threshold: float = 0.5

    @classmethod
    def from_voltages(cls, v, threshold=0.5, step=0, best_unsat=None, best_x=None, cnf=None):
        v = np.asarray(v, dtype=np.float64)
        x = quantize(v, threshold)
        if best_unsat is None:
            if cnf is None:
                raise ValueError("need either best_unsat or a formula to evaluate")
            best_unsat = evaluate(cnf, x).unsat_count
            best_x = x.copy()
        return cls(v, x, step, best_unsat, best_x, threshold)


@dataclass
class RunRecord:
    solved: bool
    steps_to_solution: int | None
    final_best_unsat: int
    best_x: list[int]
    seed: int
    solver: str = "skisat"
    steps_run: int = 0
    unsat_trace: list[int] | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["unsat_trace"] is None:
            del d["unsat_trace"]
        if not d["extra"]:
            del d["extra"]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(**d)


def quantize(v, threshold: float = 0.5) -> np.ndarray:
    """Comparator outputs: 1 where v >= threshold."""
    return (np.asarray(v) >= threshold).astype(np.int8)


def clause_outputs(literal_truths: Sequence[bool], p: bool) -> ClauseOutputs:
    """Satisfaction bit and per-literal coupling bits for one clause.

    Coupling bit m is the NOR of every other literal; a high P zeroes all
    coupling bits of a satisfied clause.
    """
    lits = [bool(l) for l in literal_truths]
    t = any(lits)
    if p and t:
        return ClauseOutputs(t, (False,) * len(lits))
    n_true = sum(lits)
    return ClauseOutputs(t, tuple(n_true - l == 0 for l in lits))


def _bits(cnf: Cnf, x) -> np.ndarray:
    bits = np.asarray(x, dtype=np.int8).ravel()
    if bits.shape[0] != cnf.num_vars:
        raise ValueError(f"assignment has {bits.shape[0]} bits, formula has {cnf.num_vars} variables")
    return bits


def _literal_truth(cnf: Cnf, bits: np.ndarray):
    var0, sign, ptr = cnf.incidence()
    lit_true = ((bits[var0] == 1) == (sign > 0)).astype(np.int64)
    n_true = np.add.reduceat(lit_true, ptr[:-1])
    return var0, sign, lit_true, np.repeat(n_true, np.diff(ptr))


def node_currents(cnf: Cnf, x, p: bool) -> np.ndarray:
    """Summed coupling current into each node, in units of the reference current.

    Vectorized form of summing ``clause_outputs`` over clauses: literal m of a
    clause drives its node when no other literal of the clause is true, unless
    P is high and the clause is satisfied.
    """
    bits = _bits(cnf, x)
    var0, sign, lit_true, n_true = _literal_truth(cnf, bits)
    z = n_true - lit_true == 0
    if p:
        z &= n_true == 0
    return np.bincount(var0, weights=sign * z, minlength=cnf.num_vars).astype(np.int64)


def make_break(cnf: Cnf, x, i: int) -> tuple[int, int]:
    """(make, break) for variable ``i`` (1-based): unsatisfied clauses containing it,
    and clauses whose only true literal is on it."""
    bits = _bits(cnf, x)
    if not 1 <= i <= cnf.num_vars:
        raise IndexError(f"variable {i} out of range 1..{cnf.num_vars}")
    var0, _, lit_true, n_true = _literal_truth(cnf, bits)
    mine = var0 == i - 1
    make = int(np.count_nonzero(mine & (n_true == 0)))
    brk = int(np.count_nonzero(mine & (lit_true == 1) & (n_true == 1)))
    return make, brk


def step(state: SolverState, cnf: Cnf, p: bool, cfg: DynamicsConfig) -> SolverState:
    """One synchronous update: currents from the current outputs, then all voltages move."""
    cur = node_currents(cnf, state.x, p)
    moving = cur != 0
    v = state.v.copy()
    v[moving] = v[moving] + cfg.delta_v * cur[moving]
    np.clip(v, 0.0, 1.0, out=v)
    x = quantize(v, cfg.threshold)
    unsat = evaluate(cnf, x).unsat_count
    if unsat < state.best_unsat:
        best_unsat, best_x = unsat, x.copy()
    else:
        best_unsat, best_x = state.best_unsat, state.best_x
    return SolverState(v, x, state.step + 1, best_unsat, best_x, cfg.threshold)


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    init_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_ss), np.random.default_rng(noise_ss)


def initial_voltages(num_vars: int, cfg: DynamicsConfig, rng: np.random.Generator) -> np.ndarray:
    """Mid-rail reset plus Gaussian sampling noise, clamped to the rails."""
    v = cfg.v_init + rng.normal(0.0, cfg.init_noise_rms, size=num_vars)
    return np.clip(v, 0.0, 1.0)


def init_state(cnf: Cnf, cfg: DynamicsConfig, seed: int) -> SolverState:
    rng, _ = _streams(seed)
    return SolverState.from_voltages(initial_voltages(cnf.num_vars, cfg, rng), cfg.threshold, cnf=cnf)


class Network:
    """Flattened incidence arrays for the integration kernels."""

    def __init__(self, cnf: Cnf):
        self.cnf = cnf
        self.var0, self.sign, self.ptr = (np.array(a) for a in cnf.incidence())
        lengths = np.diff(self.ptr)
        clause_of = np.repeat(np.arange(cnf.num_clauses, dtype=np.int64), lengths)
        order = np.argsort(self.var0, kind="stable")
        self.occ_clause = np.ascontiguousarray(clause_of[order])
        self.occ_sign = np.ascontiguousarray(self.sign[order])
        self.occ_ptr = np.zeros(cnf.num_vars + 1, dtype=np.int64)
        self.occ_ptr[1:] = np.cumsum(np.bincount(self.var0, minlength=cnf.num_vars))

    def simulate(self, v, p_bits, noise, slot_steps, cfg: DynamicsConfig, kernel=None):
        fn = _simulate if kernel is None else kernel
        return fn(self.var0, self.sign, self.ptr, self.occ_ptr, self.occ_clause, self.occ_sign,
                  v, p_bits, noise, int(slot_steps), float(cfg.delta_v), float(cfg.threshold),
                  bool(cfg.record_trace))


def run(cnf: Cnf, cfg: DynamicsConfig, schedule: PerturbationSchedule, seed: int,
        *, network: Network | None = None, kernel=None) -> RunRecord:
    """One seeded anneal; stops at the first step where every clause is satisfied."""
    if len(schedule) < cfg.max_steps:
        raise ValueError(f"schedule covers {len(schedule)} steps, config needs {cfg.max_steps}")
    net = network if network is not None else Network(cnf)
    rng_init, rng_noise = _streams(seed)
    v = initial_voltages(cnf.num_vars, cfg, rng_init)
    p_bits = np.ascontiguousarray(schedule.bits[: cfg.max_steps], dtype=np.uint8)
    n_slots = -(-cfg.max_steps // schedule.slot_steps)
    noise = np.ascontiguousarray(draw_noise(rng_noise, schedule.noise_rms, n_slots, cnf.num_vars))
    solved_at, best, best_x, trace = net.simulate(v, p_bits, noise, schedule.slot_steps, cfg, kernel)
    solved = solved_at >= 0
    return RunRecord(
        solved=solved,
        steps_to_solution=int(solved_at) if solved else None,
        final_best_unsat=int(best),
        best_x=[int(b) for b in best_x],
        seed=int(seed),
        steps_run=int(solved_at) if solved else cfg.max_steps,
        unsat_trace=[int(u) for u in trace] if trace is not None else None,
    )


def trace_csv(record: RunRecord, schedule: PerturbationSchedule) -> str:
    """Per-step trajectory as CSV rows (step, unsat_count, P)."""
    if record.unsat_trace is None:
        raise ValueError("record has no trace; run with record_trace=True")
    rows = ["step,unsat_count,P"]
    rows += [f"{t + 1},{u},{int(schedule.bits[t])}" for t, u in enumerate(record.unsat_trace)]
    return "\n".join(rows) + "\n"


def with_max_steps(cfg: DynamicsConfig, max_steps: int) -> DynamicsConfig:
    return replace(cfg, max_steps=max_steps)
