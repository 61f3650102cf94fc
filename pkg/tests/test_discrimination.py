import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellanalyzer.discrimination import (
    OutcomeClass,
    check_linear_dependence,
    check_two_photon_never_unambiguous,
    classify,
    max_identifiable_states,
    per_mode_bound,
)
from bellanalyzer.detection import s_matrix
from bellanalyzer.network import (
    Beamsplitter,
    PhaseShifter,
    Swap,
    compose,
    embed,
    identity_network,
    preset,
    random_haar,
    truncate_alpha,
)
from bellanalyzer.states import DimensionError, Priors
from bellanalyzer.theorems import CHECKS, CheckTally, check_network

from networks import discrete_mesh

seeds = st.integers(0, 2**31 - 1)


def test_bs_pbs_outcome_table():
    rep = classify(preset("bs-pbs"))
    assert abs(rep.success_probability - 0.5) < 1e-12
    assert rep.identified_states == {3, 4}
    expected = {(1, 2): 3, (3, 4): 3, (1, 4): 4, (2, 3): 4}
    assert {tuple(r.outcome): r.klass.state for r in rep.unambiguous_rows} == expected
    for r in rep.unambiguous_rows:
        assert r.probabilities[r.klass.state - 1] == pytest.approx(0.5, abs=1e-12)
    for i in range(1, 5):
        row = rep.row(i, i)
        assert row.klass == OutcomeClass("ambiguous", frozenset({1, 2}))
        np.testing.assert_allclose(row.probabilities, [0.25, 0.25, 0, 0], atol=1e-15)
    assert rep.row(1, 3).klass.kind == "dead"
    np.testing.assert_allclose(rep.state_success, [0, 0, 1, 1], atol=1e-12)


def test_hwp_variant_identifies_the_other_pair():
    rep = classify(preset("bs-pbs-hwp"))
    assert rep.identified_states == {1, 2}
    assert abs(rep.success_probability - 0.5) < 1e-12


def test_identity_identifies_nothing():
    rep = classify(identity_network(4))
    assert rep.success_probability == 0.0
    assert rep.identified_states == frozenset()
    assert str(rep.row(1, 3).klass) == "ambiguous{1,2}"


def test_unequal_priors_on_preset():
    rep = classify(preset("bs-pbs"), Priors((0.4, 0.3, 0.2, 0.1)))
    assert rep.success_probability == pytest.approx(0.3, abs=1e-12)
    assert rep.success_bound == pytest.approx(0.7)
    assert rep.per_mode_bound_extrapolated
    rep = classify(preset("bs-pbs-hwp"), Priors((0.4, 0.3, 0.2, 0.1)))
    assert rep.success_probability == pytest.approx(0.7, abs=1e-12)


def test_per_mode_bound_is_tight_for_preset():
    rep = classify(preset("bs-pbs"))
    np.testing.assert_allclose(rep.per_mode_success, 0.25, atol=1e-12)
    np.testing.assert_allclose(rep.per_mode_bound, 0.25, atol=1e-12)
    assert per_mode_bound(preset("bs-pbs"), 2) == pytest.approx(0.25)


def test_classify_validation():
    with pytest.raises(DimensionError):
        classify(identity_network(3))
    with pytest.raises(ValueError):
        classify(identity_network(4), tolerance=0.0)


def test_outcome_class_from_probabilities():
    assert OutcomeClass.from_probabilities(np.zeros(4), 1e-10).kind == "dead"
    c = OutcomeClass.from_probabilities(np.array([0, 1e-11, 0.3, 0]), 1e-10)
    assert c.is_unambiguous and c.state == 3 and str(c) == "unambiguous{3}"
    c = OutcomeClass.from_probabilities(np.array([0.1, 0, 0.3, 0]), 1e-10)
    assert c.kind == "ambiguous" and c.state is None


def test_tolerance_changes_classification():
    # a 1e-6 coupler error leaves contaminants near 2e-12
    net = compose(4, [Beamsplitter(1, 3, np.pi / 4 + 1e-6), Beamsplitter(2, 4, np.pi / 4)])
    loose = classify(net, tolerance=1e-10)
    assert loose.identified_states == {3, 4}
    assert loose.largest_zeroed == pytest.approx(2e-12, rel=1e-3)
    strict = classify(net, tolerance=1e-14)
    assert strict.success_probability == 0.0


def test_max_identifiable_states_examples():
    assert [max_identifiable_states(preset("bs-pbs"), i) for i in range(1, 5)] == [2, 2, 2, 2]
    assert max_identifiable_states(identity_network(4), 1) == 0
    assert max_identifiable_states(embed(identity_network(4), 5), 5) == 0


def test_linear_dependence_null_vector():
    net = random_haar(6, 4)
    for i in range(1, 7):
        dep = check_linear_dependence(net, i)
        s = s_matrix(truncate_alpha(net, i))
        assert dep.determinant < 1e-10
        np.testing.assert_allclose(s @ dep.coefficients, 0, atol=1e-12)
        assert np.linalg.norm(dep.coefficients) == pytest.approx(1.0)
        assert not dep.degenerate
    dep = check_linear_dependence(embed(random_haar(4, 1), 5), 5)
    assert dep.degenerate


@settings(max_examples=40, deadline=None)
@given(n=st.integers(4, 7), seed=seeds)
def test_double_clicks_never_identify_haar(n, seed):
    ok, witness = check_two_photon_never_unambiguous(random_haar(n, seed))
    assert ok and witness is None


@pytest.mark.parametrize("n", [4, 5, 6])
def test_theorem_checks_on_discrete_meshes(n):
    tally = CheckTally()
    for seed in range(150):
        net = discrete_mesh(n, seed)
        rep = classify(net)
        tally.add(check_network(net, report=rep), rep.success_probability, seed)
    assert tally.ok, {k: v for k, v in tally.failed.items() if v}
    # the grid reaches the bound but never exceeds it
    assert tally.max_success == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("weights", [(0.4, 0.3, 0.2, 0.1), (0.1, 0.2, 0.3, 0.4), (0.7, 0.1, 0.1, 0.1)])
def test_unequal_priors_bound_on_discrete_meshes(weights):
    priors = Priors(weights)
    for seed in range(100):
        net = discrete_mesh(5, seed)
        rep = classify(net, priors)
        assert rep.success_probability <= priors.top_two_sum() + 1e-9
        for s, b in zip(rep.per_mode_success, rep.per_mode_bound):
            assert s <= b + 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=seeds, perm_seed=seeds)
def test_success_invariant_under_output_relabeling_and_phases(seed, perm_seed):
    net = discrete_mesh(5, seed)
    rng = np.random.default_rng(perm_seed)
    i, j = rng.choice(5, 2, replace=False) + 1
    other = net.then(Swap(int(i), int(j)), PhaseShifter(int(i), float(rng.uniform(0, 6))))
    a, b = classify(net), classify(other)
    assert a.success_probability == pytest.approx(b.success_probability, abs=1e-12)
    assert a.identified_states == b.identified_states


def test_ancillas_preserve_classification():
    rep = classify(embed(preset("bs-pbs"), 7))
    assert rep.success_probability == pytest.approx(0.5, abs=1e-12)
    assert rep.identified_states == {3, 4}


def test_check_network_residuals_small_for_haar():
    for seed in range(20):
        res = check_network(random_haar(6, seed))
        for name, value in res.items():
            assert value <= CHECKS[name][0], name
