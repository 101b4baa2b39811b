"""Boson sampling from heralded non-Gaussian sources.

Every source's system mode enters the interferometer while its herald modes
bypass it; all modes are then counted. The probability of a system pattern
given that every herald fired is the joint pattern probability divided by
the product of per-source herald probabilities, which can equally be folded
into a single rescaled loop Hafnian.

Mode order of the assembled state: system modes 0..M'-1, then the herald
blocks of source 0, source 1, ...
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInstanceError, HeraldImpossibleError
from .experiment import Experiment, PhotonPattern, pattern_factorial, patterns_up_to
from .gaussian import AFPair, GaussianState, apply_unitary, build_af, direct_sum, reduce, vacuum
from .hafnian import absorb_scale, finalize_probability, lhaf_for_pattern
from .state_prep import build_source, herald_probability

UNDERFLOW_FLOOR = 1e-300


def assemble(exp: Experiment) -> GaussianState:
    """Direct sum of the source states and vacuum on unused interferometer inputs."""
    m_sys = exp.system_modes
    joint = direct_sum(vacuum(m_sys), *[build_source(spec) for spec in exp.sources])
    # joint order is [vacuum placeholders, src0 (system, heralds), src1, ...]
    order = list(range(m_sys))
    heralds = []
    offset = m_sys
    for spec, slot in zip(exp.sources, exp.wiring):
        order[slot] = offset
        heralds += list(range(offset + 1, offset + spec.mode_count))
        offset += spec.mode_count
    return reduce(joint, order + heralds)


def propagate(state: GaussianState, exp: Experiment) -> GaussianState:
    return apply_unitary(state, exp.interferometer, list(range(exp.system_modes)))


def output_state(exp: Experiment) -> GaussianState:
    return propagate(assemble(exp), exp)


def herald_probabilities(exp: Experiment) -> list[float]:
    return [herald_probability(build_source(spec)) if spec.herald_count else 1.0 for spec in exp.sources]


def _log_herald_total(probs: Sequence[float]) -> float:
    if any(p <= 0 for p in probs):
        raise HeraldImpossibleError("a source can never herald")
    log_total = float(sum(math.log(p) for p in probs))
    if log_total < math.log(UNDERFLOW_FLOOR):
        raise HeraldImpossibleError(f"herald probability exp({log_total:.1f}) is below the floor {UNDERFLOW_FLOOR}")
    return log_total


@dataclass(frozen=True)
class PreparedExperiment:
    """Everything pattern-independent: output A/F data and herald probabilities."""

    experiment: Experiment
    af: AFPair
    herald_probs: tuple
    log_herald_total: float

    @property
    def herald_modes(self) -> int:
        return sum(self.experiment.herald_counts)

    def full_pattern(self, pattern: Sequence[int]) -> list[int]:
        pattern = [int(n) for n in pattern]
        if len(pattern) != self.experiment.system_modes:
            raise ValueError("pattern length must equal the number of interferometer modes")
        if any(n < 0 for n in pattern):
            raise ValueError("photon counts must be non-negative")
        return pattern + [1] * self.herald_modes

    def joint(self, pattern: Sequence[int]) -> float:
        full = self.full_pattern(pattern)
        lhaf = lhaf_for_pattern(self.af.a_matrix, self.af.f_vector, full)
        return finalize_probability(self.af.prefactor * lhaf / pattern_factorial(full))

    def conditional(self, pattern: Sequence[int]) -> float:
        joint = self.joint(pattern)
        return joint * math.exp(-self.log_herald_total)

    def conditional_absorbed(self, pattern: Sequence[int]) -> float:
        full = self.full_pattern(pattern)
        n = 2 * sum(full)  # dimension of the pattern submatrix
        a, f = self.af.a_matrix, self.af.f_vector
        if self.log_herald_total != 0.0:
            if n == 0:
                raise EmptyInstanceError("no detected photons to absorb the herald probability into")
            # Lhaf(c^2 A, c F) = c^n Lhaf(A, F) with c^n = 1 / prod p_k
            c = absorb_scale(math.exp(self.log_herald_total), 1, n)
            a, f = c * c * a, c * f
        lhaf = lhaf_for_pattern(a, f, full)
        return finalize_probability(self.af.prefactor * lhaf / pattern_factorial(full))


def prepare(exp: Experiment) -> PreparedExperiment:
    probs = herald_probabilities(exp)
    log_total = _log_herald_total(probs)
    return PreparedExperiment(exp, build_af(output_state(exp)), tuple(probs), log_total)


def joint_probability(exp: Experiment, pattern: Sequence[int]) -> float:
    """Probability of ``pattern`` on the system modes and one photon in every herald."""
    return prepare(exp).joint(pattern)


def conditional_probability(exp: Experiment, pattern: Sequence[int]) -> float:
    """Joint probability divided by the product of per-source herald probabilities."""
    return prepare(exp).conditional(pattern)


def conditional_probability_absorbed(exp: Experiment, pattern: Sequence[int]) -> float:
    """Same quantity from a single loop Hafnian with the herald factor absorbed."""
    return prepare(exp).conditional_absorbed(pattern)


@dataclass(frozen=True)
class Distribution:
    patterns: tuple
    probs: np.ndarray

    @property
    def total(self) -> float:
        return float(np.sum(self.probs))

    @property
    def tail(self) -> float:
        """Probability mass above the enumeration cutoff."""
        return 1.0 - self.total

    def items(self) -> list[tuple]:
        return list(zip(self.patterns, self.probs.tolist()))

    def as_dict(self) -> dict:
        return dict(self.items())


def full_distribution(exp: Experiment, threads: int = 1, absorbed: bool = False) -> Distribution:
    """Conditional probabilities of every system pattern with total <= exp.cutoff."""
    prep = prepare(exp)
    pats = patterns_up_to(exp.system_modes, exp.cutoff)
    fn = prep.conditional_absorbed if absorbed else prep.conditional
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            probs = list(pool.map(fn, pats))
    else:
        probs = [fn(p) for p in pats]
    return Distribution(tuple(pats), np.array(probs, dtype=float))


def sample(exp: Experiment, count: int, seed: int, dist: Distribution | None = None) -> list[PhotonPattern]:
    """Inverse-CDF draws from the enumerated (renormalized) conditional distribution."""
    if count == 0:
        return []
    dist = full_distribution(exp) if dist is None else dist
    cdf = np.cumsum(dist.probs)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    picks = np.searchsorted(cdf, rng.random(count), side="right")
    picks = np.minimum(picks, len(dist.patterns) - 1)
    return [dist.patterns[k] for k in picks]
