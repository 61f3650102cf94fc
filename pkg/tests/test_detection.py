import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellanalyzer.detection import (
    DetectionOutcome,
    bell_outputs,
    conditional_overlap,
    conditional_overlap_direct,
    conditional_state,
    enumerate_outcomes,
    outcome_probabilities,
    outcome_probability,
    s_matrix,
    s_vector,
    single_photon_probability,
    two_photon_probability,
)
from bellanalyzer.network import (
    LinearNetwork,
    PhaseShifter,
    apply,
    embed,
    identity_network,
    preset,
    random_haar,
    truncate_alpha,
)
from bellanalyzer.states import DimensionError, bell_form

import fock_oracle

seeds = st.integers(0, 2**31 - 1)
modes = st.integers(4, 8)
bell = st.integers(1, 4)


def test_enumerate_outcomes():
    out = enumerate_outcomes(4)
    assert len(out) == 10
    assert out[0] == (1, 1) and out[1] == (1, 2) and out[-1] == (4, 4)
    assert out[0].is_double and not out[1].is_double
    assert str(DetectionOutcome(2, 3)) == "(2,3)"
    assert len(enumerate_outcomes(8)) == 36


@pytest.mark.parametrize("mu", [1, 2, 3, 4])
def test_identity_network_keeps_photons_apart(mu):
    probs = dict(zip(enumerate_outcomes(4), outcome_probabilities(bell_form(mu))))
    pairs = {1: [(1, 3), (2, 4)], 2: [(1, 3), (2, 4)], 3: [(1, 4), (2, 3)], 4: [(1, 4), (2, 3)]}[mu]
    for o, p in probs.items():
        assert p == pytest.approx(0.5 if o in pairs else 0.0, abs=1e-15)


def test_bs_pbs_double_clicks_for_first_pair():
    # oracle value, frozen: each output mode double-clicks with probability 1/4
    m = apply(preset("bs-pbs"), bell_form(1))
    u = preset("bs-pbs").u.tolist()
    oracle = fock_oracle.outcome_probabilities(fock_oracle.bell_terms(1), u)
    for i in range(1, 5):
        assert outcome_probability(m, (i, i)) == pytest.approx(0.25, abs=1e-15)
        assert oracle[(i, i)] == pytest.approx(0.25, abs=1e-15)
        assert abs(m.entry(i, i)) == pytest.approx(1 / (2 * np.sqrt(2)), abs=1e-15)


def test_outcome_probability_validation():
    m = bell_form(1)
    assert outcome_probability(m, (3, 1)) == outcome_probability(m, (1, 3))
    with pytest.raises(DimensionError):
        outcome_probability(m, (1, 5))


def test_two_photon_probability_example():
    alpha = np.array([1, 0, 1, 0]) / np.sqrt(2)
    assert two_photon_probability(alpha, 1) == pytest.approx(0.25, abs=1e-15)
    assert two_photon_probability(alpha, 3) == pytest.approx(0.0, abs=1e-15)


def test_conditional_state_example():
    phi = conditional_state(apply(identity_network(4), bell_form(1)), 1)
    np.testing.assert_allclose(phi.amplitudes, [0, 0, 1 / np.sqrt(2), 0], atol=1e-15)
    assert phi.norm_squared() == pytest.approx(0.5)
    with pytest.raises(DimensionError):
        conditional_state(bell_form(1), 5)


def test_conditional_overlap_example():
    assert conditional_overlap(identity_network(4), 1, 1, 2) == pytest.approx(0.5, abs=1e-15)
    assert conditional_overlap(identity_network(4), 1, 1, 3) == pytest.approx(0.0, abs=1e-15)


def test_s_vector_example():
    np.testing.assert_array_equal(s_vector(np.array([1, 0, 0, 0]), 4), [0, 0, 0, 1])


@settings(max_examples=60, deadline=None)
@given(n=modes, seed=seeds, mu=bell)
def test_pipeline_matches_fock_oracle(n, seed, mu):
    net = random_haar(n, seed)
    pipe = dict(zip(enumerate_outcomes(n), outcome_probabilities(apply(net, bell_form(mu, n)))))
    oracle = fock_oracle.outcome_probabilities(fock_oracle.bell_terms(mu), net.u.tolist())
    for o, p in pipe.items():
        assert abs(p - oracle.get(tuple(o), 0.0)) < 1e-12


def test_literal_transposed_oracle_is_the_same_check_on_u_transpose():
    # expanding with U_ki instead of U_ik corresponds to the pipeline on U^T
    net = random_haar(5, 42)
    ut = net.u.T.tolist()
    oracle = fock_oracle.outcome_probabilities(fock_oracle.bell_terms(2), ut)
    pipe = outcome_probabilities(apply(LinearNetwork(net.u.T), bell_form(2, 5)))
    for o, p in zip(enumerate_outcomes(5), pipe):
        assert abs(p - oracle[tuple(o)]) < 1e-12


@settings(max_examples=60, deadline=None)
@given(n=modes, seed=seeds, mu=bell)
def test_outcome_probabilities_sum_to_one(n, seed, mu):
    probs = outcome_probabilities(apply(random_haar(n, seed), bell_form(mu, n)))
    assert abs(probs.sum() - 1.0) < 1e-10
    assert probs.min() >= 0


@settings(max_examples=60, deadline=None)
@given(n=modes, seed=seeds, mu=bell, i=st.integers(1, 8))
def test_double_click_formula(n, seed, mu, i):
    i = min(i, n)
    net = random_haar(n, seed)
    direct = outcome_probability(apply(net, bell_form(mu, n)), (i, i))
    assert abs(two_photon_probability(truncate_alpha(net, i), mu) - direct) < 1e-12


@settings(max_examples=60, deadline=None)
@given(n=modes, seed=seeds, i=st.integers(1, 8))
def test_s_vectors_dependent_and_equal_norm(n, seed, i):
    alpha = truncate_alpha(random_haar(n, seed), min(i, n))
    s = s_matrix(alpha)
    assert abs(np.linalg.det(s)) < 1e-10
    np.testing.assert_allclose(np.linalg.norm(s, axis=0), np.linalg.norm(alpha), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(n=modes, seed=seeds, i=st.integers(1, 8))
def test_overlap_formula_matches_direct_and_oracle(n, seed, i):
    i = min(i, n)
    net = random_haar(n, seed)
    u = net.u.tolist()
    oracle = {mu: np.array(fock_oracle.conditional_amplitudes(fock_oracle.bell_terms(mu), u, i))
              for mu in range(1, 5)}
    for eta in range(1, 5):
        for mu in range(1, 5):
            formula = conditional_overlap(net, i, eta, mu)
            assert abs(formula - conditional_overlap_direct(net, i, eta, mu)) < 1e-12
            assert abs(formula - np.vdot(oracle[eta], oracle[mu])) < 1e-12


@settings(max_examples=40, deadline=None)
@given(n=modes, seed=seeds, mu=bell, i=st.integers(1, 8))
def test_single_click_probability_is_conditional_norm(n, seed, mu, i):
    i = min(i, n)
    net = random_haar(n, seed)
    m = apply(net, bell_form(mu, n))
    p1 = single_photon_probability(net, i, mu)
    assert abs(p1 - conditional_state(m, i).norm_squared()) < 1e-12
    coincidences = sum(outcome_probability(m, (i, j)) for j in range(1, n + 1) if j != i)
    assert abs(p1 - coincidences) < 1e-12


def test_ancillas_do_not_change_statistics():
    net = random_haar(4, 8)
    big = embed(net, 7)
    for small_m, big_m in zip(bell_outputs(net), bell_outputs(big)):
        small = dict(zip(enumerate_outcomes(4), outcome_probabilities(small_m)))
        large = dict(zip(enumerate_outcomes(7), outcome_probabilities(big_m)))
        for o, p in large.items():
            assert p == pytest.approx(small.get(o, 0.0), abs=1e-15)


def test_output_phases_do_not_change_statistics():
    net = random_haar(5, 3)
    shifted = net.then(*[PhaseShifter(k, 0.7 * k) for k in range(1, 6)])
    for a, b in zip(bell_outputs(net), bell_outputs(shifted)):
        np.testing.assert_allclose(outcome_probabilities(a), outcome_probabilities(b), atol=1e-14)
