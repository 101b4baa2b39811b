import itertools
import math

import numpy as np
import pytest

from ngbsim import hafnian as hf


@pytest.fixture(params=sorted(hf.KERNELS))
def backend(request, monkeypatch):
    """Run the test once per available kernel implementation."""
    monkeypatch.setattr(hf, "_kernels", hf.KERNELS[request.param])
    return request.param


def random_symmetric(rng, n, scale=1.0):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (z + z.T) / 2


def random_vector(rng, n, scale=1.0):
    return scale * (rng.normal(size=n) + 1j * rng.normal(size=n))


def haf_by_permutations(a):
    """Hafnian from its permutation-sum definition: sum_sigma prod a[s0,s1]... / (2^k k!)."""
    n = a.shape[0]
    if n % 2:
        return 0j
    if n == 0:
        return 1 + 0j
    k = n // 2
    total = 0j
    for perm in itertools.permutations(range(n)):
        prod = 1 + 0j
        for j in range(k):
            prod *= a[perm[2 * j], perm[2 * j + 1]]
        total += prod
    return total / (2**k * math.factorial(k))


def lhaf_by_loop_subsets(a, f):
    """Loop Hafnian as a sum over looped vertex subsets times the Hafnian of the rest."""
    n = a.shape[0]
    total = 0j
    for size in range(n + 1):
        if (n - size) % 2:
            continue
        for looped in itertools.combinations(range(n), size):
            rest = [i for i in range(n) if i not in looped]
            total += np.prod(f[list(looped)]) * haf_by_permutations(a[np.ix_(rest, rest)])
    return total


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict: criterion(ok, detail)."""

    def record(ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {request.node.name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
