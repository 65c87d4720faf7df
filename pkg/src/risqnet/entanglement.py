"""Bell-diagonal entangled pairs and the noise they pick up end to end.

Pairs are generated in a Werner-like form controlled by a source knob
``alpha_s`` that simultaneously sets the generation rate, then degrade in
two ways on the way to (and inside) the quantum memories:

* isotropic depolarizing noise from storage, with strength set by the
  wait time relative to the memory coherence time, and
* phase damping from atmospheric turbulence, which mixes the Phi/Psi
  phase pairs with a probability that grows with the Rytov variance.

Everything here works on the four Bell-basis weights directly; the
density matrix never needs to be materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299792458.0

# Source knob domain and the generation rates it maps to [pairs/s].
ALPHA_MIN = 0.0005
ALPHA_MAX = 0.5
RATE_MIN = 1e3
RATE_MAX = 1e6
_RATE_PER_ALPHA = 2.0e6  # R_in = 2 alpha_s * 1e6

_SUM_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class BellDiagonalState:
    """Weights over the Bell basis (Phi+, Phi-, Psi+, Psi-)."""

    lam00: float
    lam01: float
    lam10: float
    lam11: float

    def __post_init__(self):
        lams = (self.lam00, self.lam01, self.lam10, self.lam11)
        for lam in lams:
            if not 0.0 <= lam <= 1.0:
                raise ValueError(f"Bell weight {lam} outside [0, 1]")
        if abs(sum(lams) - 1.0) > _SUM_TOL:
            raise ValueError(f"Bell weights sum to {sum(lams)!r}, expected 1")

    @property
    def fidelity(self) -> float:
        """Overlap with the Phi+ target state."""
        return self.lam00

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.lam00, self.lam01, self.lam10, self.lam11)


@dataclass(frozen=True, slots=True)
class MemoryParams:
    """Quantum memory bank at the QBS."""

    capacity: float = 1e7           # aggregate generation budget [pairs/s]
    coherence_time: float = 2.43e-3  # [s]
    processing_time: float = 4e-6    # matter-qubit interface delay [s]

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")
        if self.coherence_time <= 0:
            raise ValueError("coherence_time must be positive")
        if self.processing_time < 0:
            raise ValueError("processing_time must be nonnegative")


@dataclass(frozen=True, slots=True)
class NoiseParams:
    """One link's combined storage + turbulence noise strengths."""

    q_depol: float   # depolarizing mixing probability, in [0, 1]
    p_phase: float   # phase-damping swap probability, in [0, 1]

    def __post_init__(self):
        if not 0.0 <= self.q_depol <= 1.0:
            raise ValueError("q_depol must be in [0, 1]")
        if not 0.0 <= self.p_phase <= 1.0:
            raise ValueError("p_phase must be in [0, 1]")

    def apply(self, state: BellDiagonalState) -> BellDiagonalState:
        return phase_damp(depolarize(state, self.q_depol), self.p_phase)


def werner(fidelity: float) -> BellDiagonalState:
    """Werner state with the given Phi+ fidelity; the rest is isotropic."""
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError("fidelity must be in [0, 1]")
    rest = (1.0 - fidelity) / 3.0
    return BellDiagonalState(fidelity, rest, rest, rest)


def werner_from_alpha(alpha_s: float) -> BellDiagonalState:
    """Freshly generated pair: fidelity trades off against rate."""
    if not ALPHA_MIN <= alpha_s <= ALPHA_MAX:
        raise ValueError(
            f"alpha_s must be in [{ALPHA_MIN}, {ALPHA_MAX}], got {alpha_s}")
    return werner(1.0 - alpha_s)


def rate_from_alpha(alpha_s: float) -> float:
    """Pair-generation rate [pairs/s] for a source knob setting."""
    if not ALPHA_MIN <= alpha_s <= ALPHA_MAX:
        raise ValueError(
            f"alpha_s must be in [{ALPHA_MIN}, {ALPHA_MAX}], got {alpha_s}")
    return _RATE_PER_ALPHA * alpha_s


def alpha_from_rate(r_in: float) -> float:
    """Inverse of rate_from_alpha over the closed rate domain."""
    if not RATE_MIN <= r_in <= RATE_MAX:
        raise ValueError(
            f"r_in must be in [{RATE_MIN:g}, {RATE_MAX:g}] Hz, got {r_in}")
    return r_in / _RATE_PER_ALPHA


def storage_time(d_e2e: float, mem: MemoryParams) -> float:
    """How long the stored half waits: photon flight time plus processing."""
    if d_e2e < 0:
        raise ValueError("d_e2e must be nonnegative")
    return d_e2e / SPEED_OF_LIGHT + mem.processing_time


def depolarize(state: BellDiagonalState, q: float) -> BellDiagonalState:
    """Mix toward the maximally mixed state with probability q."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must be in [0, 1]")
    keep = 1.0 - q
    return BellDiagonalState(
        0.25 + (state.lam00 - 0.25) * keep,
        0.25 + (state.lam01 - 0.25) * keep,
        0.25 + (state.lam10 - 0.25) * keep,
        0.25 + (state.lam11 - 0.25) * keep,
    )


def depolarize_strength(t: float, coherence_time: float) -> float:
    """Mixing probability 1 - exp(-t/T) after storing for time t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if coherence_time <= 0:
        raise ValueError("coherence_time must be positive")
    return -math.expm1(-t / coherence_time)


def phase_damp_prob(rytov_var: float) -> float:
    """Phase-flip pairing probability induced by scintillation."""
    if rytov_var < 0:
        raise ValueError("rytov_var must be nonnegative")
    return math.erf(rytov_var)


def phase_damp(state: BellDiagonalState, p: float) -> BellDiagonalState:
    """Swap weight within each phase pair (Phi+/Phi-, Psi+/Psi-) w.p. p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    keep = 1.0 - p
    return BellDiagonalState(
        keep * state.lam00 + p * state.lam01,
        keep * state.lam01 + p * state.lam00,
        keep * state.lam10 + p * state.lam11,
        keep * state.lam11 + p * state.lam10,
    )


def e2e_state(source: BellDiagonalState, t: float, mem: MemoryParams,
              p_phase: float) -> BellDiagonalState:
    """Delivered pair after storage depolarization then phase damping."""
    return phase_damp(depolarize(source, depolarize_strength(t, mem.coherence_time)),
                      p_phase)
