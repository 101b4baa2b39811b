"""Small experiment configurations on which the pipeline is checked against the oracle."""
from __future__ import annotations

import numpy as np

from .config import preset_unitary
from .experiment import Experiment, SourceSpec, TargetState

R_DEFAULT = 0.5


def _random_unitary(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


TARGETS = {
    "one": TargetState.fock(1),
    "two": TargetState.fock(2),
    "three": TargetState.fock(3),
    "zero_plus_one": TargetState((1.0, 1.0)),
    "zero_plus_two": TargetState((1.0, 0.0, 1.0)),
    "mixed_three": TargetState((0.6, 0.3j, -0.5, 0.4)),
    "cat": TargetState.cat_even(1.0, 2),
}


def _exp(names, u, t, cutoff, wiring=(), r=R_DEFAULT) -> Experiment:
    sources = tuple(SourceSpec.for_target(TARGETS[n], r, t) for n in names)
    return Experiment(sources, u, tuple(wiring), cutoff)


def oracle_suite() -> list[tuple[str, Experiment]]:
    """Configurations covering K in {1,2}, M' in {1,2,3}, degree <= 3, t in {0.9, 0.99, 0.999}."""
    bs = preset_unitary("bs50", 2)
    dft3 = preset_unitary("dft", 3)
    u3 = _random_unitary(3, 7)
    u2 = _random_unitary(2, 3)
    return [
        ("K1 M1 |1> t=0.9", _exp(["one"], np.eye(1), 0.9, 6)),
        ("K1 M1 |0>+|2> t=0.99", _exp(["zero_plus_two"], np.eye(1), 0.99, 6)),
        ("K1 M1 deg3 t=0.999", _exp(["mixed_three"], np.eye(1), 0.999, 6)),
        ("K1 M2 |1> bs50 t=0.99", _exp(["one"], bs, 0.99, 5)),
        ("K1 M2 |3> random t=0.9", _exp(["three"], u2, 0.9, 5, wiring=[1])),
        ("K1 M3 |0>+|1> dft t=0.999", _exp(["zero_plus_one"], dft3, 0.999, 4)),
        ("K2 M2 HOM t=0.999", _exp(["one", "one"], bs, 0.999, 5)),
        ("K2 M2 |1>,|2> bs50 t=0.9", _exp(["one", "two"], bs, 0.9, 5)),
        ("K2 M2 cat,|0>+|1> random t=0.99", _exp(["cat", "zero_plus_one"], u2, 0.99, 4)),
        ("K2 M3 |1>,|1> dft t=0.99", _exp(["one", "one"], dft3, 0.99, 4)),
        ("K2 M3 |0>+|2>,|1> random t=0.9", _exp(["zero_plus_two", "one"], u3, 0.9, 4, wiring=[2, 0])),
        ("K2 M3 deg3,|1> dft t=0.999", _exp(["mixed_three", "one"], dft3, 0.999, 3)),
        ("K2 M2 |3>,|0>+|1> random t=0.99", _exp(["three", "zero_plus_one"], u2, 0.99, 4)),
    ]


def quick_suite() -> list[tuple[str, Experiment]]:
    picks = {0, 3, 6, 9}
    return [item for k, item in enumerate(oracle_suite()) if k in picks]
