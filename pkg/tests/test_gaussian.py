import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ngbsim import gaussian as g
from ngbsim.errors import NonUnitaryError, SingularSigmaQError
from ngbsim.hafnian import probability


def prob(state, pattern):
    return probability(g.build_af(state), pattern)


def test_vacuum_convention():
    s = g.vacuum(1)
    assert np.allclose(s.sigma, 0.5 * np.eye(2))
    assert np.allclose(s.disp, 0)
    assert np.allclose(g.vacuum(2).sigma, 0.5 * np.eye(4))
    assert prob(s, [0]) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        g.vacuum(0)


def test_squeeze_covariance_and_identity():
    r = 0.7
    s = g.squeeze(g.vacuum(1), 0, r)
    expected = 0.5 * np.array([[math.cosh(2 * r), -math.sinh(2 * r)], [-math.sinh(2 * r), math.cosh(2 * r)]])
    assert np.allclose(s.sigma, expected, atol=1e-14)
    same = g.squeeze(g.vacuum(2), 1, 0.0)
    assert np.allclose(same.sigma, g.vacuum(2).sigma)


@pytest.mark.parametrize("r", [0.3, 0.8, 1.2])
def test_squeezed_vacuum_photon_statistics(r):
    s = g.squeeze(g.vacuum(1), 0, r)
    for n in range(7):
        if n % 2:
            assert prob(s, [n]) <= 1e-12
            continue
        k = n // 2
        closed = math.factorial(n) * math.tanh(r) ** n / (4**k * math.factorial(k) ** 2 * math.cosh(r))
        assert prob(s, [n]) == pytest.approx(closed, rel=1e-10)


@pytest.mark.parametrize("alpha", [0.5, 1.2 - 0.4j, 2j])
def test_coherent_state_is_poisson(alpha):
    s = g.displace(g.vacuum(1), 0, alpha)
    mean = abs(alpha) ** 2
    for n in range(8):
        expected = math.exp(-mean) * mean**n / math.factorial(n)
        assert prob(s, [n]) == pytest.approx(expected, rel=1e-10, abs=1e-15)


def test_squeeze_and_displace_invert():
    s = g.displace(g.squeeze(g.vacuum(2), 1, 0.4), 0, 0.3 + 0.2j)
    back = g.displace(g.squeeze(s, 1, -0.4), 0, -(0.3 + 0.2j))
    assert np.allclose(back.sigma, g.vacuum(2).sigma, atol=1e-13)
    assert np.allclose(back.disp, 0, atol=1e-15)


def test_beamsplitter_limits():
    s = g.displace(g.vacuum(2), 0, 1.0)
    through = g.beamsplitter(s, 0, 1, 1.0)
    assert np.allclose(through.disp, s.disp)
    swapped = g.beamsplitter(s, 0, 1, 0.0)
    assert np.allclose(swapped.disp[:2], [0, -1.0])
    with pytest.raises(ValueError):
        g.beamsplitter(s, 0, 0, 0.5)


def test_apply_unitary_permutation_and_checks():
    s = g.displace(g.squeeze(g.vacuum(3), 0, 0.5), 2, 0.7)
    perm = np.eye(3)[[2, 0, 1]]
    moved = g.apply_unitary(s, perm, [0, 1, 2])
    assert np.allclose(moved.disp[:3], perm @ s.disp[:3])
    assert np.allclose(g.reduce(moved, [1]).sigma, g.reduce(s, [0]).sigma)
    with pytest.raises(NonUnitaryError):
        g.apply_unitary(s, 1.01 * np.eye(2), [0, 1])
    with pytest.raises(ValueError):
        g.apply_unitary(s, np.eye(2), [0, 0])


def test_two_mode_squeezed_marginal_is_thermal():
    r = 0.6
    s = g.squeeze(g.squeeze(g.vacuum(2), 0, r), 1, -r)
    tmss = g.beamsplitter(s, 0, 1, 0.5)
    marg = g.reduce(tmss, [0])
    nbar = math.sinh(r) ** 2
    assert np.allclose(marg.sigma, (nbar + 0.5) * np.eye(2), atol=1e-12)
    for n in range(5):
        assert prob(marg, [n]) == pytest.approx(nbar**n / (1 + nbar) ** (n + 1), rel=1e-10)
    # photon-number correlation: only equal counts
    assert prob(tmss, [1, 0]) <= 1e-14
    assert prob(tmss, [2, 2]) == pytest.approx(nbar**2 / (1 + nbar) ** 3, rel=1e-10)


def test_direct_sum_and_permute():
    a = g.squeeze(g.vacuum(1), 0, 0.3)
    b = g.displace(g.vacuum(1), 0, 0.5j)
    s = g.direct_sum(a, b)
    assert np.allclose(g.reduce(s, [0]).sigma, a.sigma)
    assert np.allclose(g.reduce(s, [1]).disp, b.disp)
    p = g.permute_modes(s, [1, 0])
    assert np.allclose(g.reduce(p, [0]).disp, b.disp)
    with pytest.raises(ValueError):
        g.permute_modes(s, [0, 0])


def test_build_af_vacuum_and_coherent():
    af = g.build_af(g.vacuum(2))
    assert np.allclose(af.a_matrix, 0)
    assert np.allclose(af.f_vector, 0)
    assert af.prefactor == pytest.approx(1.0)
    af = g.build_af(g.displace(g.vacuum(1), 0, 0.5))
    assert np.allclose(af.f_vector, [0.5, 0.5])
    assert af.prefactor == pytest.approx(math.exp(-0.25))


def test_build_af_rejects_singular():
    bad = g.GaussianState(-0.5 * np.eye(2, dtype=complex), np.zeros(2, dtype=complex))
    with pytest.raises(SingularSigmaQError):
        g.build_af(bad)


def test_check_flags_broken_structure():
    s = g.squeeze(g.vacuum(1), 0, 0.4)
    s.check()
    broken = g.GaussianState(s.sigma, np.array([1.0, 2.0], dtype=complex))
    with pytest.raises(ValueError):
        broken.check()


@settings(max_examples=40, deadline=None)
@given(
    ops=st.lists(
        st.tuples(
            st.sampled_from(["squeeze", "displace", "bs"]),
            st.integers(0, 2),
            st.floats(-1.0, 1.0),
            st.floats(0.05, 0.95),
        ),
        max_size=8,
    )
)
def test_gate_sequences_preserve_structure(ops):
    s = g.vacuum(3)
    for kind, mode, x, t in ops:
        if kind == "squeeze":
            s = g.squeeze(s, mode, x)
        elif kind == "displace":
            s = g.displace(s, mode, x * (1 - 0.5j))
        else:
            s = g.beamsplitter(s, mode, (mode + 1) % 3, t)
    s.check()
    af = g.build_af(s)
    assert np.allclose(af.a_matrix, af.a_matrix.T, atol=1e-9)
    # passive gates conserve the mean photon number
    n_before = np.trace(s.sigma[:3, :3]).real - 1.5 + np.sum(np.abs(s.disp[:3]) ** 2)
    u = np.linalg.qr(np.arange(9).reshape(3, 3) + 1j * np.eye(3))[0]
    s2 = g.apply_unitary(s, u, [0, 1, 2])
    n_after = np.trace(s2.sigma[:3, :3]).real - 1.5 + np.sum(np.abs(s2.disp[:3]) ** 2)
    assert n_after == pytest.approx(n_before, rel=1e-9, abs=1e-9)
