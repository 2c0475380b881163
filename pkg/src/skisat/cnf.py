"""CNF formulas: data model, DIMACS I/O, random k-SAT generation, evaluation."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)


class DimacsError(ValueError):
    """Malformed DIMACS input. ``line`` is 1-based, or None if not tied to a line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True, order=True)
class Literal:
    var_index: int
    negated: bool = False

    def __post_init__(self):
        if self.var_index < 1:
            raise ValueError(f"variable index must be >= 1, got {self.var_index}")

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("literal 0 is the DIMACS clause terminator")
        return cls(abs(lit), lit < 0)

    def __int__(self) -> int:
        return -self.var_index if self.negated else self.var_index

    def value(self, x: Sequence[int]) -> bool:
        """Truth value under a 0/1 assignment indexed from 0."""
        return bool(x[self.var_index - 1]) != self.negated


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]

    def __post_init__(self):
        if not self.literals:
            raise ValueError("empty clause")
        seen = set()
        for lit in self.literals:
            if lit.var_index in seen:
                raise ValueError(f"variable {lit.var_index} occurs twice in clause {self.ints()}")
            seen.add(lit.var_index)

    @classmethod
    def from_ints(cls, lits: Iterable[int]) -> "Clause":
        return cls(tuple(Literal.from_int(l) for l in lits))

    def ints(self) -> list[int]:
        return [int(l) for l in self.literals]

    def __len__(self) -> int:
        return len(self.literals)


@dataclass(frozen=True)
class Cnf:
    """An immutable CNF formula over variables 1..num_vars."""

    num_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("a formula needs at least one variable")
        if not self.clauses:
            raise ValueError("a formula needs at least one clause")
        for c in self.clauses:
            for lit in c.literals:
                if lit.var_index > self.num_vars:
                    raise ValueError(
                        f"literal {int(lit)} exceeds declared variable count {self.num_vars}"
                    )

    @classmethod
    def from_lists(cls, num_vars: int, clauses: Iterable[Iterable[int]]) -> "Cnf":
        return cls(num_vars, tuple(Clause.from_ints(c) for c in clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def to_lists(self) -> list[list[int]]:
        return [c.ints() for c in self.clauses]

    def incidence(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flattened clause/variable incidence as (var0, sign, ptr).

        ``var0`` holds 0-based variable indices, ``sign`` is +1/-1 polarity,
        clause j spans ``ptr[j]:ptr[j+1]``. The arrays are cached and read-only.
        """
        return self._incidence

    @cached_property
    def _incidence(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        lits = [int(l) for c in self.clauses for l in c.literals]
        ptr = np.zeros(self.num_clauses + 1, dtype=np.int64)
        ptr[1:] = np.cumsum([len(c) for c in self.clauses])
        arr = np.asarray(lits, dtype=np.int64)
        out = (np.abs(arr) - 1, np.sign(arr).astype(np.int64), ptr)
        for a in out:
            a.setflags(write=False)
        return out


@dataclass(frozen=True)
class UnsatReport:
    unsat_count: int
    unsat_indices: list[int]


_P_LINE = re.compile(r"^p\s+cnf\s+(\S+)\s+(\S+)\s*$")


def parse_dimacs(text: str, *, drop_tautologies: bool = False) -> Cnf:
    """Parse DIMACS CNF text.

    Duplicate literals inside a clause are merged with a warning.
    Tautological clauses raise unless ``drop_tautologies`` is set, in which
    case they are removed and the declared clause count is reduced to match.
    A SATLIB-style ``%`` trailer ends the clause section.
    """
    num_vars = declared = None
    clauses: list[list[int]] = []
    dropped = 0
    current: list[int] = []
    current_start = None

    def finish(lineno: int) -> None:
        nonlocal current, current_start, dropped
        if not current:
            raise DimacsError("empty clause", lineno)
        lits: list[int] = []
        for lit in current:
            if lit in lits:
                log.warning("line %d: duplicate literal %d merged", current_start, lit)
                continue
            lits.append(lit)
        if any(-lit in lits for lit in lits):
            if not drop_tautologies:
                raise DimacsError(f"tautological clause {lits}", current_start)
            dropped += 1
        else:
            clauses.append(lits)
        current = []
        current_start = None

    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError("duplicate problem header", lineno)
            m = _P_LINE.match(line)
            if m is None:
                raise DimacsError(f"bad problem header {line!r}", lineno)
            try:
                num_vars, declared = int(m.group(1)), int(m.group(2))
            except ValueError:
                raise DimacsError(f"non-integer counts in header {line!r}", lineno) from None
            if num_vars < 1 or declared < 1:
                raise DimacsError("header counts must be positive", lineno)
            continue
        if num_vars is None:
            raise DimacsError("clause data before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"non-integer token {tok!r}", lineno) from None
            if lit == 0:
                # SATLIB files end with "%\n0\n"; a stray 0 with no open clause is tolerated.
                if current:
                    finish(lineno)
                continue
            if abs(lit) > num_vars:
                raise DimacsError(
                    f"variable {abs(lit)} exceeds declared count {num_vars}", lineno
                )
            if current_start is None:
                current_start = lineno
            current.append(lit)

    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("last clause is not terminated by 0", lineno)
    if len(clauses) + dropped != declared:
        raise DimacsError(
            f"header declares {declared} clauses, found {len(clauses) + dropped}"
        )
    if dropped:
        log.warning("dropped %d tautological clause(s)", dropped)
    return Cnf.from_lists(num_vars, clauses)


def read_dimacs(path, **kwargs) -> Cnf:
    with open(path) as fh:
        return parse_dimacs(fh.read(), **kwargs)


def serialize_dimacs(cnf: Cnf, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {cnf.num_vars} {cnf.num_clauses}")
    lines.extend(" ".join(map(str, c.ints())) + " 0" for c in cnf.clauses)
    return "\n".join(lines) + "\n"


def write_dimacs(cnf: Cnf, path, comments: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_dimacs(cnf, comments))


def generate_random_ksat(n: int, m: int, k: int, seed: int) -> Cnf:
    """Uniform random k-SAT: each clause picks k distinct variables and random signs.

    Duplicate clauses are allowed, as in the standard uniform model.
    """
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if m < 1:
        raise ValueError("need at least one clause")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(m):
        vars_ = rng.choice(n, size=k, replace=False) + 1
        signs = rng.integers(0, 2, size=k) * 2 - 1
        clauses.append([int(v * s) for v, s in zip(vars_, signs)])
    return Cnf.from_lists(n, clauses)


def _as_bits(cnf: Cnf, x) -> np.ndarray:
    bits = np.asarray(x, dtype=np.int8).ravel()
    if bits.shape[0] != cnf.num_vars:
        raise ValueError(f"assignment has {bits.shape[0]} bits, formula has {cnf.num_vars} variables")
    return bits


def evaluate(cnf: Cnf, x) -> UnsatReport:
    """Count the clauses whose literals are all false under the 0/1 assignment ``x``."""
    bits = _as_bits(cnf, x)
    var0, sign, ptr = cnf.incidence()
    true_lit = (bits[var0] == 1) == (sign > 0)
    per_clause = np.add.reduceat(true_lit.astype(np.int64), ptr[:-1])
    unsat = np.flatnonzero(per_clause == 0)
    return UnsatReport(int(unsat.size), unsat.tolist())


def unsat_count(cnf: Cnf, x) -> int:
    return evaluate(cnf, x).unsat_count
