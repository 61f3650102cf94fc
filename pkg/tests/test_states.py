import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellanalyzer.states import (
    BellIndex,
    BilinearForm,
    DimensionError,
    Priors,
    bell_form,
    general_two_photon_form,
    norm_squared,
    w_matrix,
)

from fock_oracle import BELL_TERMS


@pytest.mark.parametrize("mu", [1, 2, 3, 4])
def test_w_matrix_is_real_orthogonal_and_symmetric(mu):
    w = w_matrix(mu)
    np.testing.assert_array_equal(w, w.T)
    np.testing.assert_array_equal(w @ w.T, np.eye(4, dtype=int))
    # photon A modes never pair with each other
    np.testing.assert_array_equal(w[:2, :2], 0)
    np.testing.assert_array_equal(w[2:, 2:], 0)


def test_w_matrices_are_mutually_orthogonal():
    for a in range(1, 5):
        for b in range(1, 5):
            assert np.sum(w_matrix(a) * w_matrix(b)) == (4 if a == b else 0)


@pytest.mark.parametrize("mu", [1, 2, 3, 4])
def test_bell_form_matches_hand_written_terms(mu):
    # the form equals the monomial expansion, so a_i a_j with weight 1/sqrt2
    coeffs = [(i + 1, j + 1, c / np.sqrt(2)) for (i, j), c in BELL_TERMS[mu].items()]
    np.testing.assert_allclose(bell_form(mu).entries, general_two_photon_form(coeffs, 4).entries, atol=1e-15)


def test_bell_form_examples():
    f = bell_form(1, 4)
    assert f.entry(1, 3) == pytest.approx(1 / (2 * np.sqrt(2)))
    assert f.entry(2, 4) == pytest.approx(1 / (2 * np.sqrt(2)))
    assert norm_squared(f) == pytest.approx(1.0, abs=1e-12)
    assert norm_squared(bell_form(3, 6)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DimensionError):
        bell_form(1, 3)


@pytest.mark.parametrize("mu", [1, 2, 3, 4])
@pytest.mark.parametrize("n", [4, 5, 8])
def test_bell_forms_orthonormal_with_padding(mu, n):
    for eta in range(1, 5):
        expected = 1.0 if eta == mu else 0.0
        assert bell_form(eta, n).inner(bell_form(mu, n)) == pytest.approx(expected, abs=1e-15)
    np.testing.assert_array_equal(bell_form(mu, n).entries[4:, :], 0)


def test_bell_index_validation():
    assert BellIndex(3) == 3
    for bad in (0, 5, -1, 2.5, True):
        with pytest.raises(ValueError):
            BellIndex(bad)
    with pytest.raises(ValueError):
        w_matrix(5)


def test_bilinear_form_is_symmetrized_and_read_only():
    f = BilinearForm(np.array([[0, 2], [0, 0]], dtype=complex))
    np.testing.assert_array_equal(f.entries, [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        f.entries[0, 0] = 1
    with pytest.raises(DimensionError):
        BilinearForm(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        BilinearForm(np.array([[np.nan]]))


def test_general_form_norms():
    # a1^dag a3^dag |0> has norm 1, (a1^dag)^2 |0> has norm 2
    assert norm_squared(general_two_photon_form([(1, 3, 1.0)], 4)) == pytest.approx(1.0)
    assert norm_squared(general_two_photon_form([(1, 1, 1.0)], 4)) == pytest.approx(2.0)
    f = general_two_photon_form([(1, 1, 1.0), (2, 3, 1j)], 4, normalize=True)
    assert f.is_normalized()
    with pytest.raises(DimensionError):
        general_two_photon_form([(1, 5, 1.0)], 4)
    with pytest.raises(ValueError):
        BilinearForm(np.zeros((4, 4))).normalized()


@settings(max_examples=50, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=36, max_size=36))
def test_norm_squared_matches_inner(values):
    f = BilinearForm(np.array(values).reshape(6, 6))
    assert np.isclose(f.inner(f).real, norm_squared(f), rtol=1e-12, atol=1e-12)
    assert abs(f.inner(f).imag) <= 1e-9 * max(1.0, norm_squared(f))


def test_priors():
    assert Priors().is_uniform
    p = Priors((0.4, 0.3, 0.2, 0.1))
    assert p[1] == 0.4 and p[4] == 0.1
    assert p.top_two_sum() == pytest.approx(0.7)
    assert Priors().top_two_sum() == 0.5
    with pytest.raises(ValueError):
        Priors((0.5, 0.5, 0.5, -0.5))
    with pytest.raises(ValueError):
        Priors((0.3, 0.3, 0.3, 0.3))
    with pytest.raises(ValueError):
        Priors((0.5, 0.5))
    q = Priors.from_weights([0.4, 0.3, 0.2, 0.1 + 1e-10])
    assert sum(q.p) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        Priors.from_weights([1, 1, 1, 1])
