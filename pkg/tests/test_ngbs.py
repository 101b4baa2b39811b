import math

import numpy as np
import pytest

from ngbsim import fock_oracle, ngbs
from ngbsim.errors import EmptyInstanceError, HeraldImpossibleError, WiringConflictError
from ngbsim.experiment import Experiment, SourceSpec, TargetState, patterns_up_to
from ngbsim.gaussian import reduce
from ngbsim.state_prep import build_source
from ngbsim.suite import oracle_suite

BS = np.array([[1, 1], [-1, 1]]) / math.sqrt(2)
ONE = TargetState.fock(1)


def spec(target=ONE, r=0.5, t=0.99):
    return SourceSpec.for_target(target, r, t)


def test_patterns_colex_order():
    pats = patterns_up_to(2, 2)
    assert pats == [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)]
    assert len(patterns_up_to(3, 4)) == math.comb(7, 3)


def test_assemble_without_sources_is_vacuum():
    state = ngbs.assemble(Experiment((), np.eye(2)))
    assert np.allclose(state.sigma, 0.5 * np.eye(4))


def test_assemble_places_system_and_heralds():
    s = spec(TargetState.fock(2))
    exp = Experiment((s,), np.eye(3), wiring=(2,))
    state = ngbs.assemble(exp)
    assert state.mode_count == 3 + 2
    src = build_source(s)
    assert np.allclose(reduce(state, [2, 3, 4]).sigma, src.sigma)
    assert np.allclose(reduce(state, [0, 1]).sigma, 0.5 * np.eye(4))


def test_propagate_only_touches_system_modes():
    exp = Experiment((spec(),), BS)
    before = ngbs.assemble(exp)
    after = ngbs.propagate(before, exp)
    assert np.allclose(reduce(after, [2]).sigma, reduce(before, [2]).sigma)


def test_single_source_identity_gives_target_statistics():
    exp = Experiment((spec(t=0.999),), np.eye(1), cutoff=4)
    dist = ngbs.full_distribution(exp).as_dict()
    assert dist[(1,)] > 0.99


def test_hom_dip():
    exp = Experiment((spec(t=0.999), spec(t=0.999)), BS, cutoff=4)
    prep = ngbs.prepare(exp)
    assert prep.conditional([1, 1]) <= 1e-3
    assert abs(prep.conditional([2, 0]) - prep.conditional([0, 2])) <= 1e-9


@pytest.mark.parametrize("name,exp", oracle_suite()[:6], ids=[n for n, _ in oracle_suite()[:6]])
def test_absorbed_route_equals_division(name, exp):
    prep = ngbs.prepare(exp)
    for pat in patterns_up_to(exp.system_modes, exp.cutoff):
        div = prep.conditional(pat)
        assert prep.conditional_absorbed(pat) == pytest.approx(div, rel=1e-9, abs=1e-15)


def test_joint_is_conditional_times_herald_probability():
    exp = Experiment((spec(TargetState.fock(2)),), np.eye(1), cutoff=3)
    prep = ngbs.prepare(exp)
    p = math.prod(prep.herald_probs)
    assert prep.joint([2]) == pytest.approx(p * prep.conditional([2]), rel=1e-12)
    assert ngbs.joint_probability(exp, [2]) == pytest.approx(prep.joint([2]))
    assert ngbs.conditional_probability_absorbed(exp, [2]) == pytest.approx(ngbs.conditional_probability(exp, [2]))


def test_absorbed_needs_photons():
    exp = Experiment((spec(),), np.eye(1))
    prep = ngbs.prepare(exp)
    # heralds always contribute photons, so the full pattern is never empty here
    assert prep.conditional_absorbed([0]) >= 0
    exp0 = Experiment((), np.eye(1))
    assert ngbs.prepare(exp0).conditional_absorbed([0]) == pytest.approx(1.0)
    with pytest.raises(EmptyInstanceError):
        ngbs.PreparedExperiment(exp0, ngbs.prepare(exp0).af, (0.5,), math.log(0.5)).conditional_absorbed([0])


def test_pattern_validation():
    prep = ngbs.prepare(Experiment((spec(),), BS))
    with pytest.raises(ValueError):
        prep.conditional([1])
    with pytest.raises(ValueError):
        prep.conditional([-1, 0])


def test_wiring_conflicts():
    with pytest.raises(WiringConflictError):
        Experiment((spec(), spec()), BS, wiring=(0, 0))
    with pytest.raises(WiringConflictError):
        Experiment((spec(),), BS, wiring=(2,))
    with pytest.raises(WiringConflictError):
        Experiment((spec(), spec()), np.eye(1))


def test_impossible_herald():
    dead = SourceSpec(r=0.0, t=0.9, alphas=(0.0,), displacements=(0.0,))
    with pytest.raises(HeraldImpossibleError):
        ngbs.prepare(Experiment((dead,), np.eye(1)))


@pytest.mark.parametrize("name,exp", oracle_suite(), ids=[n for n, _ in oracle_suite()])
def test_normalization_within_tail(name, exp):
    dist = ngbs.full_distribution(exp)
    oracle_tail = 1.0 - sum(p for _, p in fock_oracle.simulate_experiment(exp))
    assert dist.tail >= -1e-9
    assert dist.tail == pytest.approx(oracle_tail, abs=1e-9)


def test_total_photon_distribution_invariant_under_interferometer():
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    sources = (spec(TargetState((1, 1))), spec(TargetState.fock(2)))
    by_total = []
    for u in (np.eye(3), q):
        dist = ngbs.full_distribution(Experiment(sources, u, cutoff=4))
        totals = np.zeros(5)
        for pat, p in dist.items():
            totals[sum(pat)] += p
        by_total.append(totals)
    assert np.allclose(by_total[0], by_total[1], atol=1e-12)


def test_threads_are_deterministic():
    exp = oracle_suite()[9][1]
    a = ngbs.full_distribution(exp, threads=1).probs
    b = ngbs.full_distribution(exp, threads=4).probs
    assert np.array_equal(a, b)


def test_sampling_determinism_and_edge_cases():
    exp = Experiment((spec(), spec()), BS, cutoff=3)
    assert ngbs.sample(exp, 0, 1) == []
    a = ngbs.sample(exp, 50, 7)
    assert a == ngbs.sample(exp, 50, 7)
    assert a != ngbs.sample(exp, 50, 8)
    assert all(sum(p) <= 3 for p in a)


def test_sample_frequencies_within_three_sigma():
    exp = Experiment((spec(t=0.9), spec(TargetState((1, 1)), t=0.9)), BS, cutoff=4)
    dist = ngbs.full_distribution(exp)
    n = 100_000
    draws = ngbs.sample(exp, n, 123, dist)
    counts = {}
    for p in draws:
        counts[p] = counts.get(p, 0) + 1
    norm = dist.total
    for pat, p in dist.items():
        q = p / norm
        sigma = math.sqrt(n * q * (1 - q))
        assert abs(counts.get(pat, 0) - n * q) <= 3 * sigma + 1


def test_hom_joint_matches_half_squared_herald_probability():
    exp = Experiment((spec(t=0.999), spec(t=0.999)), BS, cutoff=4)
    prep = ngbs.prepare(exp)
    # ideal |1,1> -> (|2,0> - |0,2>)/sqrt2; residual error is O(1 - t)
    assert prep.joint([2, 0]) == pytest.approx(0.5 * prep.herald_probs[0] ** 2, rel=1e-3)


def test_vacuum_experiment_distribution():
    dist = ngbs.full_distribution(Experiment((), np.eye(2), cutoff=0))
    assert dist.items() == [((0, 0), 1.0)]


def test_permuting_interferometer_rows_permutes_distribution():
    rng = np.random.default_rng(2)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    sources = (spec(TargetState((1, 1))), spec())
    perm = [2, 0, 1]
    base = ngbs.full_distribution(Experiment(sources, q, cutoff=3)).as_dict()
    moved = ngbs.full_distribution(Experiment(sources, q[perm], cutoff=3)).as_dict()
    for pat, p in base.items():
        # output mode k of the permuted device is output mode perm[k] of the original
        assert moved[tuple(pat[perm[k]] for k in range(3))] == pytest.approx(p, rel=1e-10, abs=1e-16)
