"""Baselines and oracles: WalkSAT (SKC variant) and exhaustive MAX-SAT enumeration."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from .cnf import Cnf, evaluate
from .dynamics import RunRecord

BRUTE_FORCE_MAX_VARS = 26


@dataclass(frozen=True)
class WalkSatParams:
    noise_prob: float = 0.5
    cutoff_flips: int = 100_000
    max_tries: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.noise_prob <= 1.0:
            raise ValueError("noise_prob must lie in [0, 1]")
        if self.cutoff_flips < 1:
            raise ValueError("cutoff_flips must be >= 1")
        if self.max_tries < 1:
            raise ValueError("max_tries must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class OracleResult:
    min_unsat: int
    witness: list[int]

    @property
    def satisfiable(self) -> bool:
        return self.min_unsat == 0


class _WalkState:
    """Assignment plus per-clause true-literal counts, updated per flip."""

    def __init__(self, cnf: Cnf, x: list[int]):
        self.clauses = cnf.to_lists()
        self.occ: list[list[tuple[int, int]]] = [[] for _ in range(cnf.num_vars + 1)]
        for j, c in enumerate(self.clauses):
            for lit in c:
                self.occ[abs(lit)].append((j, lit))
        self.x = [0] + list(x)  # 1-based
        self.count = [sum(self.is_true(l) for l in c) for c in self.clauses]
        self.unsat = [j for j, n in enumerate(self.count) if n == 0]
        self.where = {j: k for k, j in enumerate(self.unsat)}

    def is_true(self, lit: int) -> bool:
        return (self.x[abs(lit)] == 1) == (lit > 0)

    def break_count(self, var: int) -> int:
        return sum(1 for j, lit in self.occ[var] if self.count[j] == 1 and self.is_true(lit))

    def _drop(self, j):
        k = self.where.pop(j)
        last = self.unsat.pop()
        if last != j:
            self.unsat[k] = last
            self.where[last] = k

    def flip(self, var: int) -> None:
        self.x[var] ^= 1
        for j, lit in self.occ[var]:
            if self.is_true(lit):
                self.count[j] += 1
                if self.count[j] == 1:
                    self._drop(j)
            else:
                self.count[j] -= 1
                if self.count[j] == 0:
                    self.where[j] = len(self.unsat)
                    self.unsat.append(j)


def walksat(cnf: Cnf, params: WalkSatParams = WalkSatParams()) -> RunRecord:
    """SKC WalkSAT: freebie moves first, then noisy min-break picks, restarting at the cutoff."""
    rng = np.random.default_rng(params.seed)
    total_flips = 0
    best_unsat = cnf.num_clauses + 1
    best_x: list[int] = []
    solved_at = None
    tries = 0
    t0 = time.perf_counter()
    for _ in range(params.max_tries):
        tries += 1
        st = _WalkState(cnf, rng.integers(0, 2, size=cnf.num_vars).tolist())
        for flip in range(params.cutoff_flips + 1):
            if len(st.unsat) < best_unsat:
                best_unsat = len(st.unsat)
                best_x = st.x[1:]
            if not st.unsat:
                solved_at = total_flips + flip
                break
            if flip == params.cutoff_flips:
                break
            clause = st.clauses[st.unsat[rng.integers(len(st.unsat))]]
            breaks = [st.break_count(abs(l)) for l in clause]
            lowest = min(breaks)
            if lowest > 0 and rng.random() < params.noise_prob:
                var = abs(clause[rng.integers(len(clause))])
            else:
                ties = [abs(l) for l, b in zip(clause, breaks) if b == lowest]
                var = ties[rng.integers(len(ties))] if len(ties) > 1 else ties[0]
            st.flip(var)
        if solved_at is not None:
            break
        total_flips += params.cutoff_flips
    elapsed = time.perf_counter() - t0

    solved = solved_at is not None
    if solved and evaluate(cnf, best_x).unsat_count != 0:
        raise AssertionError("walksat claimed a non-satisfying assignment")
    flips = solved_at if solved else total_flips
    return RunRecord(
        solved=solved,
        steps_to_solution=solved_at,
        final_best_unsat=best_unsat,
        best_x=[int(b) for b in best_x],
        seed=params.seed,
        solver="walksat",
        steps_run=flips,
        extra={"tries": tries, "flips": flips, "wall_seconds": elapsed},
    )


def _unsat_counts(cnf: Cnf, assignments: np.ndarray) -> np.ndarray:
    """Unsatisfied-clause count for each assignment encoded as an integer bit mask
    (bit i-1 holds variable i)."""
    counts = np.zeros(assignments.shape[0], dtype=np.int32)
    for clause in cnf.clauses:
        sat = np.zeros(assignments.shape[0], dtype=bool)
        for lit in clause.ints():
            bit = (assignments >> (abs(lit) - 1)) & 1
            sat |= bit == (1 if lit > 0 else 0)
        counts += ~sat
    return counts


def brute_force(cnf: Cnf, chunk: int = 1 << 18) -> OracleResult:
    """Exact MAX-SAT by enumerating all 2^N assignments; the first minimizer is the witness."""
    n = cnf.num_vars
    if n > BRUTE_FORCE_MAX_VARS:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_MAX_VARS} variables, formula has {n}")
    best, best_a = cnf.num_clauses + 1, 0
    total = 1 << n
    for start in range(0, total, chunk):
        a = np.arange(start, min(start + chunk, total), dtype=np.int64)
        counts = _unsat_counts(cnf, a)
        k = int(np.argmin(counts))
        if counts[k] < best:
            best, best_a = int(counts[k]), int(a[k])
            if best == 0:
                break
    witness = [(best_a >> i) & 1 for i in range(n)]
    return OracleResult(best, witness)


def cutoff_sweep(cnf: Cnf, cutoffs, trials: int, seed_base: int = 0, noise_prob: float = 0.5):
    """Success rate and mean flips per try for each cutoff, one try per trial."""
    rows = []
    for cutoff in cutoffs:
        recs = [walksat(cnf, WalkSatParams(noise_prob, cutoff, 1, seed_base + i)) for i in range(trials)]
        solved = sum(r.solved for r in recs)
        rows.append({
            "cutoff": cutoff,
            "success_rate": solved / trials,
            "mean_flips": float(np.mean([r.extra["flips"] for r in recs])),
        })
    return rows
