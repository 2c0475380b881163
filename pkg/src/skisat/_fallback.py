"""Pure-numpy integration loop, used when the compiled kernel is unavailable.

Recomputes every clause's true-literal count at each step rather than
tracking it incrementally, so it doubles as an independent check on
``_kernel.simulate``. Arithmetic on ``v`` matches the compiled loop
operation for operation so both produce bit-identical trajectories.
"""

import numpy as np


def _clamp(v):
    v[v < 0.0] = 0.0
    v[v > 1.0] = 1.0
    return v


def simulate(var0, sign, ptr, occ_ptr, occ_clause, occ_sign, v, p_bits, noise,
             slot_steps, delta_v, threshold, record_trace):
    n = v.shape[0]
    n_steps = p_bits.shape[0]
    lengths = np.diff(ptr)
    clause_of = np.repeat(np.arange(lengths.shape[0]), lengths)
    positive = sign > 0

    x = (v >= threshold).astype(np.int8)

    def counts(x):
        lit_true = (x[var0] == 1) == positive
        return lit_true, np.add.reduceat(lit_true.astype(np.int64), ptr[:-1])

    lit_true, cnt = counts(x)
    unsat = int(np.count_nonzero(cnt == 0))
    best = unsat
    best_x = x.copy()
    trace = np.zeros(n_steps, dtype=np.int32) if record_trace else None
    if unsat == 0:
        return 0, best, best_x, trace[:0] if record_trace else None

    n_inject = noise.shape[0]
    for t in range(n_steps):
        if n_inject and t % slot_steps == 0 and t // slot_steps < n_inject:
            v += noise[t // slot_steps]
            _clamp(v)
            x = (v >= threshold).astype(np.int8)
            lit_true, cnt = counts(x)

        c = cnt[clause_of]
        z = (c - lit_true) == 0
        if p_bits[t]:
            z &= c == 0
        cur = np.bincount(var0, weights=np.where(z, sign, 0), minlength=n).astype(np.int64)
        moving = cur != 0
        v[moving] = v[moving] + delta_v * cur[moving]
        _clamp(v)
        x = (v >= threshold).astype(np.int8)
        lit_true, cnt = counts(x)
        unsat = int(np.count_nonzero(cnt == 0))
        if record_trace:
            trace[t] = unsat
        if unsat < best:
            best = unsat
            best_x = x.copy()
        if unsat == 0:
            return t + 1, best, best_x, trace[: t + 1] if record_trace else None
    return -1, best, best_x, trace
