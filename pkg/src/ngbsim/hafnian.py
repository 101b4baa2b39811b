"""Hafnians, loop Hafnians and the photon-pattern probability built on them.

Two evaluation routes share one contract:

* ``loop_hafnian`` / ``hafnian`` enumerate matchings of an explicit matrix
  (the reference, cost ~ number of matchings);
* ``loop_hafnian_repeated`` sums the same matchings for a matrix whose rows
  are repeated according to a photon pattern, memoizing over the remaining
  multiplicities so repeated rows are not expanded separately.

The compiled kernels in ``ngbsim._kernels`` are used when importable; set
``NGBSIM_PURE_PYTHON=1`` to force the pure-Python fallback.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels_py
from .errors import (
    ComplexResidualError,
    DimensionTooLargeError,
    EmptyInstanceError,
    FactorMismatchError,
    InvalidPError,
    NegativeProbabilityError,
)
from .gaussian import AFPair

if os.environ.get("NGBSIM_PURE_PYTHON"):
    _kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _kernels = _kernels_py
        BACKEND = "python"

KERNELS = {"python": _kernels_py}
if BACKEND == "compiled":
    KERNELS["compiled"] = _kernels

MAX_DIM = 20
MAX_STATES = 1 << 26
SYM_TOL = 1e-9
FACTOR_TOL = 1e-8
IMAG_RTOL = 1e-8
NEG_TOL = 1e-9
LOG_DOMAIN_P = 1e-6
MAX_MONOMIALS = 5_000_000


@dataclass(frozen=True)
class MatchingInstance:
    a_sub: np.ndarray
    f_sub: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a_sub, dtype=complex)) if np.size(self.a_sub) else np.zeros((0, 0), complex)
        f = np.asarray(self.f_sub, dtype=complex).reshape(-1)
        if a.shape != (f.size, f.size):
            raise ValueError(f"matrix shape {a.shape} does not match vector length {f.size}")
        if a.size and np.abs(a - a.T).max() > SYM_TOL * max(1.0, np.abs(a).max()):
            raise ValueError("matching instance matrix is not symmetric")
        object.__setattr__(self, "a_sub", a)
        object.__setattr__(self, "f_sub", f)

    @property
    def dim(self) -> int:
        return self.f_sub.size


@dataclass(frozen=True)
class LowRankFactor:
    """A_s = g g^T with g of shape (N, R), plus the loop weights."""

    g: np.ndarray
    f_sub: np.ndarray

    @property
    def rank(self) -> int:
        return self.g.shape[1]


def pattern_indices(pattern: Sequence[int]) -> list[int]:
    """Row indices selected by a photon pattern: copies of j first, then of M+j."""
    m = len(pattern)
    idx = [j for j, n in enumerate(pattern) for _ in range(int(n))]
    return idx + [m + j for j in idx]


def submatrix_for_pattern(af: AFPair, pattern: Sequence[int]) -> MatchingInstance:
    if len(pattern) != af.mode_count:
        raise ValueError("pattern length does not match the mode count")
    if any(n < 0 for n in pattern):
        raise ValueError("photon counts must be non-negative")
    idx = pattern_indices(pattern)
    return MatchingInstance(af.a_matrix[np.ix_(idx, idx)], af.f_vector[idx])


def _check_dim(n: int, max_dim: int) -> None:
    if n > max_dim:
        raise DimensionTooLargeError(f"matrix dimension {n} exceeds enumeration cap {max_dim}")


def hafnian(a: np.ndarray, max_dim: int = MAX_DIM) -> complex:
    """Sum over perfect matchings; zero for odd dimension."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0] if a.size else 0
    if n % 2:
        return 0j
    _check_dim(n, max_dim)
    if n == 0:
        return 1 + 0j
    return _kernels.lhaf_enum(a, np.zeros(n, dtype=complex), False)


def loop_hafnian(inst: MatchingInstance, max_dim: int = MAX_DIM) -> complex:
    """Sum over matchings in which every vertex is paired (a_ij) or looped (f_i)."""
    n = inst.dim
    _check_dim(n, max_dim)
    if n == 0:
        return 1 + 0j
    return _kernels.lhaf_enum(inst.a_sub, inst.f_sub, True)


def loop_hafnian_repeated(
    a: np.ndarray, f: np.ndarray, mult: Sequence[int], loops: bool = True, max_states: int = MAX_STATES
) -> complex:
    """Loop Hafnian of ``a``/``f`` with index i repeated ``mult[i]`` times."""
    mult = [int(m) for m in mult]
    keep = [i for i, m in enumerate(mult) if m > 0]
    if not keep:
        return 1 + 0j
    states = math.prod(mult[i] + 1 for i in keep)
    if states > max_states:
        raise DimensionTooLargeError(f"{states} multiplicity states exceed the cap {max_states}")
    a = np.asarray(a, dtype=complex)[np.ix_(keep, keep)]
    f = np.asarray(f, dtype=complex)[keep]
    return _kernels.lhaf_repeated(a, f, [mult[i] for i in keep], loops)


def lhaf_for_pattern(a: np.ndarray, f: np.ndarray, pattern: Sequence[int]) -> complex:
    """Lhaf of the pattern submatrix of (a, f) without materializing it."""
    pattern = [int(n) for n in pattern]
    return loop_hafnian_repeated(a, f, pattern + pattern)


def scale_absorb(inst: MatchingInstance, p: float, k: int) -> MatchingInstance:
    """Rescale so that Lhaf(result) = p^-k Lhaf(inst)."""
    if not p > 0:
        raise InvalidPError(f"herald probability must be positive, got {p}")
    n = inst.dim
    if n == 0:
        raise EmptyInstanceError("cannot absorb a scale factor into an empty instance")
    c = absorb_scale(p, k, n)
    return MatchingInstance(c * c * inst.a_sub, c * inst.f_sub)


def absorb_scale(p: float, k: float, n: int) -> float:
    """c = p^(-k/n), computed through logarithms for tiny p."""
    if p < LOG_DOMAIN_P:
        return math.exp(-k * math.log(p) / n)
    return p ** (-k / n)


# ---------------------------------------------------------------------------
# low rank


def low_rank_factor(inst: MatchingInstance, rtol: float = 1e-10) -> LowRankFactor:
    """Takagi-style factor A_s = g g^T keeping singular values above rtol * s_max."""
    a = inst.a_sub
    n = inst.dim
    if n == 0:
        return LowRankFactor(np.zeros((0, 0), dtype=complex), inst.f_sub)
    u, s, vh = np.linalg.svd(a)
    if s[0] == 0:
        return LowRankFactor(np.zeros((n, 0), dtype=complex), inst.f_sub)
    r = int(np.sum(s > rtol * s[0]))
    u, s, vh = u[:, :r], s[:r], vh[:r]
    # A = U S Z U^T with Z = Vh conj(U) symmetric unitary commuting with S
    z = vh @ u.conj()
    w, v = np.linalg.eig(z)
    root = v @ np.diag(np.sqrt(w.astype(complex))) @ np.linalg.inv(v)
    g = u @ root @ np.diag(np.sqrt(s))
    return LowRankFactor(g, inst.f_sub)


def check_factor(factor: LowRankFactor, inst: MatchingInstance, tol: float = FACTOR_TOL) -> float:
    """Max entrywise residual of g g^T against A_s, relative to max(1, |A_s|_max)."""
    if inst.dim == 0:
        return 0.0
    scale = max(1.0, float(np.abs(inst.a_sub).max()))
    resid = float(np.abs(factor.g @ factor.g.T - inst.a_sub).max()) / scale
    if resid > tol:
        raise FactorMismatchError(f"relative |g g^T - A|_max = {resid:.3e} exceeds {tol:.0e}")
    return resid


def _double_factorial_weight(m: int) -> float:
    """(m-1)!! for even m as a float, zero for odd m; exact integer before conversion."""
    if m % 2:
        return 0.0
    val = math.prod(range(m - 1, 0, -2))
    if val > 2**53:
        raise OverflowError(f"(m-1)!! for m={m} is not exactly representable")
    return float(val)


def loop_hafnian_low_rank(factor: LowRankFactor, inst: MatchingInstance | None = None) -> complex:
    """Loop Hafnian of g g^T via expansion of prod_i (f_i z_0 + sum_k g_ik z_k).

    Each monomial z_0^m0 z_1^m1 ... z_R^mR of the product contributes
    prod_k (m_k - 1)!! when every m_k (k >= 1) is even. The number of
    monomials is C(N + R, R), so the cost grows like N^R rather than with
    the number of matchings. With ``inst`` given, the factor is verified
    against it first.
    """
    if inst is not None:
        check_factor(factor, inst)
    g = np.asarray(factor.g, dtype=complex)
    f = np.asarray(factor.f_sub, dtype=complex)
    n = f.size
    if n == 0:
        return 1 + 0j
    r = g.shape[1]
    loops = bool(np.any(f != 0))
    lin = np.concatenate([f[:, None], g], axis=1) if loops else g
    nvar = lin.shape[1]
    if nvar == 0:
        return 0j
    monomials = math.comb(n + nvar - 1, nvar - 1)
    if monomials > MAX_MONOMIALS:
        raise DimensionTooLargeError(f"{monomials} monomials exceed the cap {MAX_MONOMIALS}")
    # homogeneous polynomial of degree i, keyed by exponent tuple
    poly = {(0,) * nvar: 1 + 0j}
    for i in range(n):
        row = [(k, complex(lin[i, k])) for k in range(nvar) if lin[i, k] != 0]
        nxt: dict = {}
        for expo, coef in poly.items():
            for k, c in row:
                key = expo[:k] + (expo[k] + 1,) + expo[k + 1:]
                nxt[key] = nxt.get(key, 0j) + c * coef
        poly = nxt
    first = 1 if loops else 0
    total = 0j
    for expo, coef in poly.items():
        w = 1.0
        for m in expo[first:]:
            w *= _double_factorial_weight(m)
            if w == 0.0:
                break
        if w:
            total += w * coef
    return complex(total)


def numerical_rank(a: np.ndarray, rtol: float = 1e-10) -> int:
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0


# ---------------------------------------------------------------------------
# probabilities


def finalize_probability(value: complex, tol: float = IMAG_RTOL) -> float:
    """Real part of a probability after residual and sign checks."""
    if abs(value.imag) > tol * abs(value) + 1e-14:
        raise ComplexResidualError(f"probability has imaginary residual {value.imag:.3e} (value {value:.3e})")
    p = value.real
    if p < -NEG_TOL:
        raise NegativeProbabilityError(f"negative probability {p:.3e}")
    return max(p, 0.0)


def probability(af: AFPair, pattern: Sequence[int]) -> float:
    """exp(-d^dag Q^-1 d / 2) / (n! sqrt(det Q)) * Lhaf(A_s, F_s)."""
    if len(pattern) != af.mode_count:
        raise ValueError("pattern length does not match the mode count")
    if any(n < 0 for n in pattern):
        raise ValueError("photon counts must be non-negative")
    lhaf = lhaf_for_pattern(af.a_matrix, af.f_vector, pattern)
    fact = math.prod(math.factorial(int(n)) for n in pattern)
    return finalize_probability(af.prefactor * lhaf / fact)
