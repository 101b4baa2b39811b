"""Heralded single-mode sources built from squeezing, displaced ancillas and photon detection.

Mode 0 of a source is the system mode; modes 1..N are herald modes, each
prepared in a coherent state, mixed into the system on a high-transmission
beamsplitter and later required to show exactly one photon.
"""
from __future__ import annotations

import numpy as np

from . import fock_oracle
from .errors import CutoffTooSmallError
from .experiment import SourceSpec, TargetState, displacement_params  # noqa: F401  (re-export)
from .gaussian import GaussianState, beamsplitter, build_af, displace, reduce, squeeze, vacuum
from .hafnian import numerical_rank, probability

HERALDED_TAIL_TOL = 1e-6


def build_source(spec: SourceSpec) -> GaussianState:
    """Gaussian state of system + herald modes before the herald measurement."""
    state = squeeze(vacuum(spec.mode_count), 0, spec.r)
    for j, beta in enumerate(spec.herald_displacements(), start=1):
        state = displace(state, j, beta)
        state = beamsplitter(state, 0, j, spec.t)
    return squeeze(state, 0, -spec.r)


def herald_probability(source: GaussianState) -> float:
    """Probability that every herald mode registers exactly one photon."""
    m = source.mode_count
    if m < 2:
        raise ValueError("source has no herald modes")
    heralds = reduce(source, list(range(1, m)))
    return probability(build_af(heralds), [1] * (m - 1))


def herald_rank(source: GaussianState) -> int:
    """Numerical rank of the herald-pattern submatrix; a complexity diagnostic."""
    m = source.mode_count
    if m < 2:
        return 0
    af = build_af(reduce(source, list(range(1, m))))
    return numerical_rank(af.a_matrix)


def heralded_state(spec: SourceSpec, cutoff: int) -> np.ndarray:
    """Normalized system amplitudes |0>..|cutoff> after a successful herald.

    Computed by brute force in the Fock basis. Raises ``CutoffTooSmallError``
    when more than 1e-6 of the probability lies above ``cutoff``.
    """
    if cutoff < spec.herald_count:
        raise CutoffTooSmallError("cutoff is below the target degree")
    _, amps = fock_oracle.simulate_source(spec, max(cutoff, fock_oracle.SOURCE_CUTOFF))
    tail = float(np.sum(np.abs(amps[cutoff + 1:]) ** 2))
    if tail > HERALDED_TAIL_TOL:
        raise CutoffTooSmallError(f"{tail:.2e} of the heralded state lies above photon number {cutoff}")
    return amps[: cutoff + 1]


def fidelity(spec: SourceSpec, target: TargetState, cutoff: int = 40) -> float:
    """|<target|heralded>|^2."""
    amps = heralded_state(spec, max(cutoff, target.degree))
    overlap = np.vdot(target.vector(amps.size - 1), amps)
    return float(min(abs(overlap) ** 2, 1.0))
