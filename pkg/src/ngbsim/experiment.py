"""Domain types shared by the Gaussian pipeline and the Fock-space oracle.

Nothing in here touches covariance matrices or Hafnians, so both
simulation routes can import it without sharing a computational path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateTargetError, WiringConflictError

PhotonPattern = tuple  # tuple[int, ...]

ROOT_TOL = 1e-10


def pattern_factorial(pattern: Sequence[int]) -> int:
    """n_1! n_2! ... n_M! as an exact integer."""
    out = 1
    for n in pattern:
        out *= math.factorial(int(n))
    return out


def patterns_up_to(modes: int, cutoff: int) -> list[PhotonPattern]:
    """All count vectors over ``modes`` modes with total <= ``cutoff``, colex order."""
    if modes == 0:
        return [()]
    out = []

    def rec(prefix, left):
        if len(prefix) == modes:
            out.append(tuple(prefix))
            return
        for n in range(left + 1):
            rec(prefix + [n], left - n)

    rec([], cutoff)
    out.sort(key=lambda p: tuple(reversed(p)))
    return out


# ---------------------------------------------------------------------------
# polynomial helpers


def _polish_roots(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """One Newton step per root; ``coeffs`` in increasing-degree order."""
    p = np.polynomial.polynomial
    dcoeffs = p.polyder(coeffs)
    out = roots.astype(complex).copy()
    for k, z in enumerate(out):
        d = p.polyval(z, dcoeffs)
        if abs(d) > 0:
            step = p.polyval(z, coeffs) / d
            if np.isfinite(step):
                out[k] = z - step
    return out


def polynomial_roots(coeffs: Sequence[complex]) -> np.ndarray:
    """Roots of sum_n c_n x^n via companion eigenvalues plus a Newton polish.

    Leading zeros (trailing entries of ``coeffs``) are dropped first.
    """
    c = np.asarray(coeffs, dtype=complex)
    nz = np.flatnonzero(np.abs(c) > 0)
    if nz.size == 0:
        raise DegenerateTargetError("all coefficients are zero")
    c = c[: nz[-1] + 1]
    if c.size == 1:
        return np.zeros(0, dtype=complex)
    monic = c / c[-1]
    roots = np.linalg.eigvals(np.polynomial.polynomial.polycompanion(monic)) if c.size > 2 else np.array([-monic[0]])
    return _polish_roots(monic, roots)


def canonical_order(values: np.ndarray) -> np.ndarray:
    """Lexicographic (real, imag) sort that ignores sub-tolerance noise."""
    vals = np.asarray(values, dtype=complex)
    key = [(round(v.real, 9) + 0.0, round(v.imag, 9) + 0.0) for v in vals]
    order = sorted(range(len(vals)), key=lambda k: key[k])
    return vals[order]


def displacement_params(coeffs: Sequence[complex]) -> np.ndarray:
    """Displacements alpha_j with prod_j (x + alpha_j) proportional to sum_n c_n x^n.

    ``coeffs`` are the coefficients of the creation-operator polynomial
    ``sum_n c_n (a^dag)^n |0>``; the degree is the index of the last nonzero entry.
    """
    return canonical_order(-polynomial_roots(coeffs))


def _squeezed_frame_powers(r: float, degree: int) -> list[np.ndarray]:
    """Polynomials T_k(x) with (cosh r a - sinh r a^dag)^k |0> = T_k(a^dag)|0>.

    The annihilator acts on g(a^dag)|0> as the derivative g'.
    """
    ch, sh = math.cosh(r), math.sinh(r)
    powers = [np.array([1.0 + 0j])]
    for _ in range(degree):
        g = powers[-1]
        nxt = np.zeros(g.size + 1, dtype=complex)
        nxt[: g.size - 1] += ch * g[1:] * np.arange(1, g.size)
        nxt[1:] -= sh * g
        powers.append(nxt)
    return powers


def herald_roots(alphas: Sequence[complex], r: float) -> np.ndarray:
    """Roots gamma_j of the subtraction polynomial P with P(b)|0> ∝ prod_j (a^dag + alpha_j)|0>.

    ``b = cosh r a - sinh r a^dag`` is the annihilator seen through the
    squeeze/unsqueeze pair that brackets the herald chain. Each herald stage
    implements (a - gamma_j) on the squeezed system mode in the high
    transmission limit, so the chain produces P(b)|0>.
    """
    alphas = np.asarray(alphas, dtype=complex)
    degree = alphas.size
    if degree == 0:
        return np.zeros(0, dtype=complex)
    if r == 0:
        raise ValueError("a nonzero squeezing parameter is needed to reach a non-vacuum target")
    target = np.polynomial.polynomial.polyfromroots(-alphas).astype(complex)  # monic
    powers = _squeezed_frame_powers(r, degree)
    scale = (-math.sinh(r)) ** degree
    p = np.zeros(degree + 1, dtype=complex)
    p[degree] = 1.0
    for m in range(degree - 1, -1, -1):
        acc = scale * target[m]
        for k in range(m + 1, degree + 1):
            acc -= p[k] * powers[k][m]
        p[m] = acc / powers[m][m]
    return canonical_order(polynomial_roots(p))


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class TargetState:
    """Fock amplitudes of |0>..|N>, stored normalized."""

    amplitudes: tuple

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        norm = np.linalg.norm(amps)
        if amps.size == 0 or norm == 0:
            raise DegenerateTargetError("target state has no nonzero amplitude")
        nz = np.flatnonzero(np.abs(amps) > 0)
        amps = amps[: nz[-1] + 1] / norm
        object.__setattr__(self, "amplitudes", tuple(complex(a) for a in amps))

    @classmethod
    def from_polynomial(cls, coeffs: Sequence[complex]) -> "TargetState":
        """Build from creation-operator coefficients c_n, amplitude_n = c_n sqrt(n!)."""
        c = np.asarray(coeffs, dtype=complex)
        return cls(tuple(c * np.sqrt([math.factorial(n) for n in range(c.size)])))

    @classmethod
    def fock(cls, n: int) -> "TargetState":
        amps = np.zeros(n + 1, dtype=complex)
        amps[n] = 1.0
        return cls(tuple(amps))

    @classmethod
    def cat_even(cls, alpha: complex = 1.0, n_max: int = 2) -> "TargetState":
        """Even cat state truncated to photon numbers <= n_max."""
        amps = [alpha**n / math.sqrt(math.factorial(n)) if n % 2 == 0 else 0.0 for n in range(n_max + 1)]
        return cls(tuple(amps))

    @property
    def degree(self) -> int:
        return len(self.amplitudes) - 1

    def vector(self, cutoff: int | None = None) -> np.ndarray:
        size = self.degree + 1 if cutoff is None else cutoff + 1
        out = np.zeros(max(size, self.degree + 1), dtype=complex)
        out[: self.degree + 1] = self.amplitudes
        return out[:size]

    def polynomial_coeffs(self) -> np.ndarray:
        amps = np.asarray(self.amplitudes, dtype=complex)
        return amps / np.sqrt([math.factorial(n) for n in range(amps.size)])

    def displacement_params(self) -> np.ndarray:
        return displacement_params(self.polynomial_coeffs())


@dataclass(frozen=True)
class SourceSpec:
    """One heralded source: squeeze r, N herald beamsplitters of transmission t, unsqueeze.

    ``alphas`` are the roots-derived displacements of the target polynomial.
    ``displacements`` overrides the herald-mode amplitudes actually injected;
    when omitted they are derived from (alphas, r, t).
    """

    r: float
    t: float
    alphas: tuple = ()
    displacements: tuple | None = None

    def __post_init__(self):
        if not 0.0 < self.t < 1.0:
            raise ValueError(f"transmission must lie in (0, 1), got {self.t}")
        object.__setattr__(self, "alphas", tuple(complex(a) for a in self.alphas))
        if self.displacements is not None:
            if len(self.displacements) != len(self.alphas):
                raise ValueError("need one herald displacement per alpha")
            object.__setattr__(self, "displacements", tuple(complex(b) for b in self.displacements))

    @classmethod
    def for_target(cls, target: TargetState, r: float, t: float) -> "SourceSpec":
        return cls(r=r, t=t, alphas=tuple(target.displacement_params()))

    @property
    def herald_count(self) -> int:
        return len(self.alphas)

    @property
    def mode_count(self) -> int:
        return self.herald_count + 1

    def herald_displacements(self) -> np.ndarray:
        """Coherent amplitude fed into each herald mode before its beamsplitter."""
        if self.displacements is not None:
            return np.asarray(self.displacements, dtype=complex)
        return herald_roots(self.alphas, self.r) * math.sqrt(1.0 - self.t)


@dataclass(frozen=True)
class Experiment:
    """K heralded sources wired into an M'-mode interferometer."""

    sources: tuple
    interferometer: np.ndarray = field(compare=False)
    wiring: tuple = ()
    cutoff: int = 4

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.interferometer, dtype=complex))
        object.__setattr__(self, "interferometer", u)
        object.__setattr__(self, "sources", tuple(self.sources))
        wiring = tuple(int(w) for w in self.wiring) if self.wiring else tuple(range(len(self.sources)))
        object.__setattr__(self, "wiring", wiring)
        if u.shape[0] != u.shape[1]:
            raise ValueError("interferometer must be square")
        if len(wiring) != len(self.sources):
            raise WiringConflictError("need one injection mode per source")
        if len(self.sources) > u.shape[0]:
            raise WiringConflictError("more sources than interferometer modes")
        if len(set(wiring)) != len(wiring) or any(not 0 <= w < u.shape[0] for w in wiring):
            raise WiringConflictError(f"invalid wiring {wiring} for {u.shape[0]} modes")
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")

    @property
    def system_modes(self) -> int:
        return self.interferometer.shape[0]

    @property
    def herald_counts(self) -> list[int]:
        return [s.herald_count for s in self.sources]

    @property
    def total_modes(self) -> int:
        return self.system_modes + sum(self.herald_counts)
