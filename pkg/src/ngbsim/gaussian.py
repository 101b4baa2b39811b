"""Multimode Gaussian states in the complex (alpha, alpha*) ordering.

Covariance matrices are stored for the vector of mode operators
``xi = [a_1..a_M, a_1^dag..a_M^dag]`` with the vacuum at ``I/2``, so that
``sigma_Q = sigma + I/2`` is the identity for the vacuum. A linear optical or
squeezing element acts as ``xi -> W xi`` in the Heisenberg picture, giving
``sigma -> W sigma W^dag`` and ``disp -> W disp``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import NonUnitaryError, SingularSigmaQError

STRUCT_TOL = 1e-10
UNITARY_TOL = 1e-10
COND_LIMIT = 1e12


@dataclass(frozen=True)
class GaussianState:
    sigma: np.ndarray
    disp: np.ndarray

    @property
    def mode_count(self) -> int:
        return self.sigma.shape[0] // 2

    @property
    def sigma_q(self) -> np.ndarray:
        return self.sigma + 0.5 * np.eye(self.sigma.shape[0])

    def check(self, tol: float = STRUCT_TOL) -> None:
        """Raise ``ValueError`` if the block/conjugate-pair structure is broken."""
        m = self.mode_count
        c, s = self.sigma[:m, :m], self.sigma[:m, m:]
        if not np.allclose(c, c.conj().T, atol=tol, rtol=0):
            raise ValueError("upper-left covariance block is not Hermitian")
        if not np.allclose(s, s.T, atol=tol, rtol=0):
            raise ValueError("upper-right covariance block is not symmetric")
        if not np.allclose(self.sigma[m:, m:], c.conj(), atol=tol, rtol=0):
            raise ValueError("lower-right block is not the conjugate of the upper-left block")
        if not np.allclose(self.sigma[m:, :m], s.conj(), atol=tol, rtol=0):
            raise ValueError("lower-left block is not the conjugate of the upper-right block")
        if not np.allclose(self.disp[m:], self.disp[:m].conj(), atol=tol, rtol=0):
            raise ValueError("displacement vector lacks conjugate-pair structure")
        if np.linalg.eigvalsh(_hermitian(self.sigma_q)).min() <= 0:
            raise ValueError("sigma_Q is not positive definite")


@dataclass(frozen=True)
class AFPair:
    """Exponent data for the photon-counting formula plus the scalar prefactor pieces."""

    a_matrix: np.ndarray
    f_vector: np.ndarray
    det_q: float
    exp_factor: float

    @property
    def mode_count(self) -> int:
        return self.a_matrix.shape[0] // 2

    @property
    def prefactor(self) -> float:
        return self.exp_factor / np.sqrt(self.det_q)


def _hermitian(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _swap(m: int) -> np.ndarray:
    x = np.zeros((2 * m, 2 * m))
    x[:m, m:] = np.eye(m)
    x[m:, :m] = np.eye(m)
    return x


def vacuum(m: int) -> GaussianState:
    if m < 1:
        raise ValueError("need at least one mode")
    return GaussianState(0.5 * np.eye(2 * m, dtype=complex), np.zeros(2 * m, dtype=complex))


def _transform(state: GaussianState, w: np.ndarray) -> GaussianState:
    return GaussianState(w @ state.sigma @ w.conj().T, w @ state.disp)


def squeeze(state: GaussianState, mode: int, r: float) -> GaussianState:
    """Single-mode squeezer exp(r/2 (a^2 - a^dag^2)) on ``mode``."""
    m = state.mode_count
    if not 0 <= mode < m:
        raise IndexError(mode)
    w = np.eye(2 * m, dtype=complex)
    ch, sh = np.cosh(r), np.sinh(r)
    w[mode, mode] = w[m + mode, m + mode] = ch
    w[mode, m + mode] = w[m + mode, mode] = -sh
    return _transform(state, w)


def displace(state: GaussianState, mode: int, alpha: complex) -> GaussianState:
    m = state.mode_count
    if not 0 <= mode < m:
        raise IndexError(mode)
    disp = state.disp.copy()
    disp[mode] += alpha
    disp[m + mode] += np.conj(alpha)
    return GaussianState(state.sigma, disp)


def beamsplitter_matrix(t: float) -> np.ndarray:
    st, sr = np.sqrt(t), np.sqrt(1.0 - t)
    return np.array([[st, sr], [-sr, st]], dtype=complex)


def beamsplitter(state: GaussianState, i: int, j: int, t: float) -> GaussianState:
    """Real beamsplitter a_i -> sqrt(t) a_i + sqrt(1-t) a_j, a_j -> -sqrt(1-t) a_i + sqrt(t) a_j."""
    if i == j:
        raise ValueError("beamsplitter needs two distinct modes")
    if not 0.0 <= t <= 1.0:
        raise ValueError("transmission must lie in [0, 1]")
    return apply_unitary(state, beamsplitter_matrix(t), [i, j])


def unitary_defect(u: np.ndarray) -> float:
    u = np.asarray(u, dtype=complex)
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def apply_unitary(state: GaussianState, u: np.ndarray, modes: Sequence[int]) -> GaussianState:
    u = np.asarray(u, dtype=complex)
    modes = list(modes)
    if u.shape != (len(modes), len(modes)):
        raise ValueError("unitary size does not match the mode list")
    if len(set(modes)) != len(modes):
        raise ValueError("modes must be distinct")
    defect = unitary_defect(u)
    if defect > UNITARY_TOL:
        raise NonUnitaryError(f"matrix is not unitary: max |U^dag U - I| = {defect:.3e}")
    m = state.mode_count
    emb = np.eye(m, dtype=complex)
    emb[np.ix_(modes, modes)] = u
    return _transform(state, sla.block_diag(emb, emb.conj()))


def reduce(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Marginal state on the modes in ``keep`` (in that order)."""
    keep = list(keep)
    if not keep or len(set(keep)) != len(keep):
        raise ValueError("keep must be a non-empty list of distinct modes")
    m = state.mode_count
    idx = keep + [m + k for k in keep]
    return GaussianState(state.sigma[np.ix_(idx, idx)], state.disp[idx])


def direct_sum(*states: GaussianState) -> GaussianState:
    total = sum(s.mode_count for s in states)
    sigma = np.zeros((2 * total, 2 * total), dtype=complex)
    disp = np.zeros(2 * total, dtype=complex)
    off = 0
    for s in states:
        m = s.mode_count
        lo = list(range(off, off + m))
        hi = [total + k for k in lo]
        idx = lo + hi
        sigma[np.ix_(idx, idx)] = s.sigma
        disp[idx] = s.disp
        off += m
    return GaussianState(sigma, disp)


def permute_modes(state: GaussianState, order: Sequence[int]) -> GaussianState:
    """New mode k is old mode ``order[k]``."""
    order = list(order)
    m = state.mode_count
    if sorted(order) != list(range(m)):
        raise ValueError("order must be a permutation of the modes")
    return reduce(state, order)


def build_af(state: GaussianState) -> AFPair:
    """A = X (I - sigma_Q^-1), F = d^dag sigma_Q^-1 and the prefactor ingredients."""
    q = _hermitian(state.sigma_q)
    evals = np.linalg.eigvalsh(q)
    if evals.min() <= 0 or evals.max() / evals.min() > COND_LIMIT:
        raise SingularSigmaQError(f"sigma_Q is singular or ill-conditioned (eigenvalues {evals.min():.3e}..{evals.max():.3e})")
    chol = sla.cho_factor(q, lower=True)
    n = q.shape[0]
    q_inv = sla.cho_solve(chol, np.eye(n, dtype=complex))
    det_q = float(np.exp(2.0 * np.sum(np.log(np.abs(np.diag(chol[0]))))))
    a = _swap(n // 2) @ (np.eye(n) - q_inv)
    a = 0.5 * (a + a.T)
    d = state.disp
    f = d.conj() @ q_inv
    quad = float(np.real(d.conj() @ sla.cho_solve(chol, d)))
    return AFPair(a, f, det_q, float(np.exp(-0.5 * quad)))
