"""Global perturbation stream P(t) and the Gaussian-noise ablation baseline."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

MODES = ("ski_pulse", "gaussian_noise", "none")

# 8 mV RMS on a 0.6 V half-swing
DEFAULT_NOISE_RMS = 8.0 / 600.0


@dataclass(frozen=True)
class PerturbationConfig:
    mode: str = "ski_pulse"
    slot_steps: int = 16
    density_start: float = 0.85
    density_end: float = 0.0
    noise_rms: float = DEFAULT_NOISE_RMS

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.slot_steps < 1:
            raise ValueError("slot_steps must be >= 1")
        for name in ("density_start", "density_end"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.noise_rms < 0:
            raise ValueError("noise_rms must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class PerturbationSchedule:
    """Precomputed P(t) for one run.

    ``noise_rms`` is nonzero only for gaussian_noise mode, where the run
    injects one noise vector per slot instead of pulsing P.
    """

    bits: np.ndarray
    seed: int
    slot_steps: int = 16
    mode: str = "ski_pulse"
    noise_rms: float = 0.0

    def __len__(self) -> int:
        return self.bits.shape[0]

    def __eq__(self, other):
        if not isinstance(other, PerturbationSchedule):
            return NotImplemented
        return (
            self.seed == other.seed
            and self.slot_steps == other.slot_steps
            and self.mode == other.mode
            and self.noise_rms == other.noise_rms
            and np.array_equal(self.bits, other.bits)
        )

    @property
    def n_slots(self) -> int:
        return math.ceil(len(self) / self.slot_steps)

    def slot_bits(self) -> np.ndarray:
        return self.bits[:: self.slot_steps]


def slot_densities(cfg: PerturbationConfig, n_slots: int) -> np.ndarray:
    """Linearly interpolated pulse probability for each slot."""
    if n_slots == 1:
        return np.array([cfg.density_start])
    s = np.arange(n_slots)
    return cfg.density_start + (cfg.density_end - cfg.density_start) * s / (n_slots - 1)


def build_schedule(cfg: PerturbationConfig, max_steps: int, seed: int) -> PerturbationSchedule:
    """Draw one Bernoulli bit per slot with linearly decaying density, hold it for the slot."""
    if cfg.mode != "ski_pulse":
        raise ValueError(f"build_schedule needs mode 'ski_pulse', got {cfg.mode!r}")
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    n_slots = math.ceil(max_steps / cfg.slot_steps)
    rng = np.random.default_rng(seed)
    slot_on = rng.random(n_slots) < slot_densities(cfg, n_slots)
    bits = np.repeat(slot_on.astype(np.uint8), cfg.slot_steps)[:max_steps]
    return PerturbationSchedule(bits, seed, cfg.slot_steps, cfg.mode)


def make_schedule(cfg: PerturbationConfig, max_steps: int, seed: int) -> PerturbationSchedule:
    """Schedule for any mode; the two ablation modes keep P at zero throughout."""
    if cfg.mode == "ski_pulse":
        return build_schedule(cfg, max_steps, seed)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    bits = np.zeros(max_steps, dtype=np.uint8)
    rms = cfg.noise_rms if cfg.mode == "gaussian_noise" else 0.0
    return PerturbationSchedule(bits, seed, cfg.slot_steps, cfg.mode, rms)


def draw_noise(rng: np.random.Generator, noise_rms: float, n_slots: int, n_vars: int) -> np.ndarray:
    """One row of i.i.d. Gaussian kicks per slot, shape (n_slots, n_vars)."""
    if noise_rms == 0.0:
        return np.zeros((0, n_vars))
    return rng.normal(0.0, noise_rms, size=(n_slots, n_vars))


def apply_gaussian_noise(state, noise_rms: float, rng: np.random.Generator):
    """Return ``state`` with one Gaussian kick added to every node voltage (rail-clamped)."""
    from .dynamics import SolverState

    if noise_rms == 0.0:
        return state
    v = np.clip(state.v + rng.normal(0.0, noise_rms, size=state.v.shape[0]), 0.0, 1.0)
    return SolverState.from_voltages(v, state.threshold, state.step, state.best_unsat, state.best_x)
