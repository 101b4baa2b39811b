"""Brute-force truncated Fock-space simulator.

This is the ground truth for the loop-Hafnian pipeline, so it deliberately
does not import ``gaussian`` or ``hafnian``: every operator is a truncated
matrix exponential of its generator acting on number-basis state vectors.

Number-conserving two-mode operators are exponentiated one total-photon
sector at a time; a sector with total <= cutoff is complete in the
truncated space, so those blocks are exact.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import CutoffTooSmallError, DimensionTooLargeError
from .experiment import Experiment, SourceSpec, patterns_up_to

SOURCE_CUTOFF = 80
TAIL_TOL = 1e-8
MAX_DIM = 10**7


def _lowering(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d + 1)), 1).astype(complex)


def squeeze_matrix(r: float, d: int) -> np.ndarray:
    """exp(r/2 (a^2 - a^dag^2)) on the truncated space {|0>..|d>}."""
    a = _lowering(d)
    ad = a.conj().T
    return sla.expm(0.5 * r * (a @ a - ad @ ad))


def displace_matrix(alpha: complex, d: int) -> np.ndarray:
    a = _lowering(d)
    return sla.expm(alpha * a.conj().T - np.conj(alpha) * a)


def _rotation_generator(t: float) -> np.ndarray:
    theta = np.arccos(np.sqrt(t))
    return np.array([[0.0, theta], [-theta, 0.0]], dtype=complex)


def _sector_generator(g: np.ndarray, total: int) -> np.ndarray:
    """Matrix of sum_kl g_kl a_k^dag a_l on the basis |m, total-m>, m = 0..total."""
    out = np.zeros((total + 1, total + 1), dtype=complex)
    for m in range(total + 1):
        n = total - m
        out[m, m] += g[0, 0] * m + g[1, 1] * n
        if n > 0:
            out[m + 1, m] += g[0, 1] * np.sqrt((m + 1) * n)  # a^dag b
        if m > 0:
            out[m - 1, m] += g[1, 0] * np.sqrt(m * (n + 1))  # b^dag a
    return out


@lru_cache(maxsize=64)
def _sector_blocks(g_key: tuple, cutoff: int) -> tuple:
    g = np.array(g_key, dtype=complex).reshape(2, 2)
    return tuple(sla.expm(_sector_generator(g, total)) for total in range(cutoff + 1))


def two_mode_generator(u: np.ndarray) -> np.ndarray:
    """Anti-Hermitian G with exp(G) = u; the Fock operator exp(sum G_kl a_k^dag a_l) maps a -> u a."""
    g = sla.logm(np.asarray(u, dtype=complex))
    return 0.5 * (g - g.conj().T)


def beamsplitter_matrix(t: float, d: int) -> np.ndarray:
    """Truncated exp(theta (a^dag b - a b^dag)), cos(theta) = sqrt(t), on (d+1)^2 states.

    Basis index is m * (d + 1) + n for |m, n>.
    """
    a = _lowering(d)
    eye = np.eye(d + 1)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    theta = np.arccos(np.sqrt(t))
    return sla.expm(theta * (a1.conj().T @ a2 - a1 @ a2.conj().T))


def op_matrix(kind: str, value, cutoff: int) -> np.ndarray:
    """Truncated operator matrix for ``squeeze`` (r), ``displace`` (alpha) or ``beamsplitter`` (t)."""
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    if kind == "squeeze":
        return squeeze_matrix(float(value), cutoff)
    if kind == "displace":
        return displace_matrix(complex(value), cutoff)
    if kind == "beamsplitter":
        return beamsplitter_matrix(float(value), cutoff)
    raise ValueError(f"unknown operator kind {kind!r}")


def apply_two_mode(psi: np.ndarray, g: np.ndarray, i: int, j: int) -> np.ndarray:
    """Apply exp(sum g_kl a_k^dag a_l) on modes (i, j) of a tensor of shape (c+1,)*M.

    Only components with (photons in i) + (photons in j) <= c are transformed
    exactly; callers keep the total photon number within the cutoff.
    """
    c = psi.shape[0] - 1
    blocks = _sector_blocks(tuple(np.round(np.asarray(g).ravel(), 15)), c)
    moved = np.moveaxis(psi, (i, j), (0, 1))
    out = np.zeros_like(moved)
    for total, blk in enumerate(blocks):
        m = np.arange(total + 1)
        vec = moved[m, total - m]
        out[m, total - m] = np.tensordot(blk, vec, axes=(1, 0))
    return np.moveaxis(out, (0, 1), (i, j))


# ---------------------------------------------------------------------------
# interferometer decomposition


def mesh_decompose(u: np.ndarray) -> tuple[list, np.ndarray]:
    """Write u = T_1^dag ... T_k^dag diag(phases) with Givens rotations on adjacent modes.

    Returns ``(rotations, phases)`` where each rotation is ``(i, i + 1, V)``
    and ``V`` is the 2x2 unitary T^dag acting on that pair.
    """
    work = np.array(u, dtype=complex)
    n = work.shape[0]
    rotations = []
    for col in range(n - 1):
        for row in range(n - 1, col, -1):
            x, y = work[row - 1, col], work[row, col]
            norm = np.hypot(abs(x), abs(y))
            if abs(y) < 1e-15:
                continue
            t = np.array([[np.conj(x), np.conj(y)], [-y, x]], dtype=complex) / norm
            work[[row - 1, row], :] = t @ work[[row - 1, row], :]
            rotations.append((row - 1, row, t.conj().T))
    return rotations, np.diag(work).copy()


def mesh_reconstruct(rotations: list, phases: np.ndarray) -> np.ndarray:
    n = phases.size
    out = np.diag(phases).astype(complex)
    for i, j, v in reversed(rotations):
        emb = np.eye(n, dtype=complex)
        emb[np.ix_([i, j], [i, j])] = v
        out = emb @ out
    return out


def apply_interferometer(psi: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Fock action of the operator U_hat with U_hat^dag a U_hat = u a."""
    rotations, phases = mesh_decompose(u)
    recon = mesh_reconstruct(rotations, phases)
    if np.abs(recon - u).max() > 1e-10:
        raise ArithmeticError("mesh decomposition failed to reconstruct the interferometer")
    c = psi.shape[0] - 1
    out = psi
    n_axis = np.arange(c + 1)
    # operator order U_hat = R_1 ... R_k D_hat: the phase layer acts on the state first
    for mode, phi in enumerate(phases):
        shape = [1] * psi.ndim
        shape[mode] = c + 1
        out = out * (phi ** n_axis).reshape(shape)
    for i, j, v in reversed(rotations):
        out = apply_two_mode(out, two_mode_generator(v), i, j)
    return out


# ---------------------------------------------------------------------------
# sources and experiments


def _herald_step(system: np.ndarray, beta: complex, t: float, herald_cutoff: int) -> np.ndarray:
    """Mix the system with |beta> on a beamsplitter and project the herald on |1>."""
    d = system.size - 1
    coherent = displace_matrix(beta, herald_cutoff)[:, 0]
    joint = np.zeros((d + 2, d + 2), dtype=complex)
    h = min(herald_cutoff, d + 1)
    joint[: d + 1, : h + 1] = np.outer(system, coherent[: h + 1])
    blocks = _sector_blocks(tuple(np.round(_rotation_generator(t).ravel(), 15)), d + 1)
    out = np.zeros(d + 1, dtype=complex)
    for total in range(1, d + 2):
        m = np.arange(total + 1)
        # keep only the output row with system = total - 1, herald = 1
        out[total - 1] = blocks[total][total - 1] @ joint[m, total - m]
    return out


def simulate_source(spec: SourceSpec, cutoff: int = SOURCE_CUTOFF, herald_cutoff: int = 30) -> tuple[float, np.ndarray]:
    """Run the heralded source circuit on number states.

    Returns the probability that every herald sees one photon and the
    normalized system-mode amplitudes on |0>..|cutoff>.
    """
    psi = squeeze_matrix(spec.r, cutoff)[:, 0]
    for beta in spec.herald_displacements():
        psi = _herald_step(psi, beta, spec.t, herald_cutoff)
    psi = squeeze_matrix(-spec.r, cutoff) @ psi
    prob = float(np.vdot(psi, psi).real)
    if prob == 0.0:
        return 0.0, np.zeros(cutoff + 1, dtype=complex)
    psi = psi / np.sqrt(prob)
    tail = float(np.sum(np.abs(psi[-max(cutoff // 4, 1):]) ** 2))
    if tail > TAIL_TOL:
        raise CutoffTooSmallError(f"mass {tail:.2e} in the top levels of a cutoff-{cutoff} simulation")
    return prob, psi


def simulate_experiment(exp: Experiment, cutoff: int | None = None, source_cutoff: int = SOURCE_CUTOFF) -> list[tuple]:
    """Conditional distribution of system patterns with total <= cutoff, by state-vector evolution."""
    c = exp.cutoff if cutoff is None else cutoff
    m = exp.system_modes
    if (c + 1) ** m > MAX_DIM:
        raise DimensionTooLargeError(f"Fock space of dimension {(c + 1) ** m} exceeds {MAX_DIM}")
    factors = [np.eye(c + 1, dtype=complex)[0] for _ in range(m)]
    for spec, mode in zip(exp.sources, exp.wiring):
        _, amps = simulate_source(spec, max(source_cutoff, c))
        factors[mode] = amps[: c + 1]
    psi = factors[0]
    for fac in factors[1:]:
        psi = np.multiply.outer(psi, fac)
    psi = np.asarray(psi, dtype=complex).reshape((c + 1,) * m)
    totals = np.indices(psi.shape).sum(axis=0)
    psi = np.where(totals <= c, psi, 0)
    psi = apply_interferometer(psi, exp.interferometer)
    probs = np.abs(psi) ** 2
    return [(pat, float(probs[pat])) for pat in patterns_up_to(m, c)]


def product_distribution(amplitudes: Sequence[np.ndarray], u: np.ndarray, cutoff: int) -> list[tuple]:
    """Distribution after ``u`` for a product of given single-mode amplitude vectors."""
    m = len(amplitudes)
    factors = []
    for amps in amplitudes:
        v = np.zeros(cutoff + 1, dtype=complex)
        k = min(len(amps), cutoff + 1)
        v[:k] = amps[:k]
        factors.append(v)
    psi = factors[0]
    for fac in factors[1:]:
        psi = np.multiply.outer(psi, fac)
    psi = np.asarray(psi).reshape((cutoff + 1,) * m)
    totals = np.indices(psi.shape).sum(axis=0)
    psi = apply_interferometer(np.where(totals <= cutoff, psi, 0), u)
    probs = np.abs(psi) ** 2
    return [(pat, float(probs[pat])) for pat in patterns_up_to(m, cutoff)]
