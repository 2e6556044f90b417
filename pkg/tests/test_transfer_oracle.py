"""Link-pattern transfer oracle and six-vertex cross-check."""

import itertools
from fractions import Fraction

import pytest

from loopdens.closed_form import METHOD_TRANSFER_ORACLE, nu_c_exact, nu_nc_exact
from loopdens.transfer_oracle import (
    CONTRACTIBLE,
    NON_CONTRACTIBLE,
    LinkState,
    apply_generator,
    enumerate_states,
    matrix_json,
    oracle_densities,
    perron_eigenvectors,
    row_transfer_matrix,
    sixvertex_check,
)


def test_link_state_validation():
    with pytest.raises(ValueError):
        LinkState((0, 1), (0, 0))  # fixed point
    with pytest.raises(ValueError):
        LinkState((1, 0), (0, 1))  # parity mismatch across a chord
    s = LinkState.nested(4)
    assert s.match == (3, 2, 1, 0)


def test_enumerate_states_counts():
    assert len(enumerate_states(2)) == 2
    assert len(enumerate_states(4)) == 6
    # regression values from the reachability closure
    assert len(enumerate_states(6)) == 20
    assert len(enumerate_states(8)) == 70


def test_enumeration_is_closed():
    states = enumerate_states(4)
    pool = set(states)
    for s in states:
        for i in range(4):
            t, _ = apply_generator(s, i)
            assert t in pool


def test_generator_close_examples():
    s0 = LinkState((1, 0), (0, 0))
    s1 = LinkState((1, 0), (1, 1))
    out, closed = apply_generator(s0, 0)
    assert out == s0 and closed == CONTRACTIBLE
    out, closed = apply_generator(s1, 0)
    assert out == s0 and closed == NON_CONTRACTIBLE
    # the wrap generator's cap adds one seam crossing to the closed loop
    out, closed = apply_generator(s0, 1)
    assert out == s1 and closed == NON_CONTRACTIBLE
    out, closed = apply_generator(s1, 1)
    assert out == s1 and closed == CONTRACTIBLE


def test_total_parity_flips_iff_noncontractible_closure():
    # exhaustive at L = 4 over all states and generators
    for s in enumerate_states(4):
        for i in range(4):
            t, closed = apply_generator(s, i)
            flipped = s.total_parity() ^ t.total_parity()
            assert flipped == (1 if closed == NON_CONTRACTIBLE else 0)


def test_transfer_matrix_structure():
    for L in (2, 4, 6):
        tm = row_transfer_matrix(L)
        n = len(tm.states)
        for j in range(n):
            col = sum(tm.counts[i][j] for i in range(n))
            assert col == 2**L  # total weight out of any state
            for i in range(n):
                assert tm.counts[i][j] >= 0


def test_transfer_matrix_l2_explicit():
    tm = row_transfer_matrix(2)
    # basis sorted: chord parity 0 then parity 1
    assert tm.counts == ((1, 3), (3, 1))
    assert tm.d_w == ((0, 1), (1, 0))
    assert tm.d_v == ((1, 0), (0, 1))


def test_perron_eigenvalue_and_vectors():
    for L in (2, 4, 6):
        tm = row_transfer_matrix(L)
        left, right = perron_eigenvectors(tm)
        n = len(tm.states)
        lam = Fraction(2**L)
        for i in range(n):
            assert sum(Fraction(tm.counts[i][j]) * right[j] for j in range(n)) == lam * right[i]
            assert sum(left[j] * Fraction(tm.counts[j][i]) for j in range(n)) == lam * left[i]


@pytest.mark.parametrize("L", [2, 4, 6, 8])
def test_oracle_matches_closed_form_exactly(L):
    rec = oracle_densities(L)
    assert rec.nu_c == nu_c_exact(L // 2)
    assert rec.nu_nc == nu_nc_exact(L // 2)
    assert rec.method == METHOD_TRANSFER_ORACLE


def test_combined_fugacity_derivative():
    # setting w = v and differentiating counts every closure once
    tm = row_transfer_matrix(4)
    left, right = perron_eigenvectors(tm)
    n = len(tm.states)
    lam = Fraction(2**4)
    overlap = sum(left[i] * right[i] for i in range(n))
    total = sum(
        left[i] * (tm.d_w[i][j] + tm.d_v[i][j]) * right[j]
        for i in range(n)
        for j in range(n)
    )
    assert total / (lam * overlap * 4) == nu_c_exact(2) + nu_nc_exact(2)


def test_fugacity_entries_consistent_with_derivatives():
    tm = row_transfer_matrix(4)
    n = len(tm.states)
    for i, j in itertools.product(range(n), repeat=2):
        cell = tm.fugacity[i][j]
        assert tm.counts[i][j] == sum(cell.values())
        assert tm.d_w[i][j] == sum(k[0] * c for k, c in cell.items())
        assert tm.d_v[i][j] == sum(k[1] * c for k, c in cell.items())


def test_matrix_json_shape():
    payload = matrix_json(2)
    assert payload["L"] == 2
    assert payload["perron_eigenvalue"] == 4
    assert len(payload["states"]) == 2
    total = sum(w["count"] for e in payload["entries"] for w in e["weights"])
    assert total == 2 * 2**2


def test_size_guards():
    with pytest.raises(ValueError):
        row_transfer_matrix(10)
    with pytest.raises(ValueError):
        enumerate_states(14)
    with pytest.raises(ValueError):
        oracle_densities(3)


@pytest.mark.parametrize("L", [2, 4, 6])
def test_sixvertex_stochastic_point(L):
    rep = sixvertex_check(L, 1e-4)
    assert rep.lambda_rel_error < 1e-9
    assert rep.phi_symmetry_error < 1e-9


def test_sixvertex_fd_derivative_l4():
    rep = sixvertex_check(4, 1e-4)
    assert rep.nu_nc_error < 1e-6
    assert rep.nu_nc_exact == pytest.approx(11.0 / 320.0)


def test_sixvertex_delta_guard():
    with pytest.raises(ValueError):
        sixvertex_check(4, 1e-2)


def test_sixvertex_weight_structure_at_stochastic_point():
    import math

    from loopdens.transfer_oracle import SixVertexWeights

    w = SixVertexWeights.at(L=4, phi=math.pi / 3, z=1.0)
    assert abs(w.a1 - w.a2.conjugate()) < 1e-15
    assert abs(w.b1 - w.b2.conjugate()) < 1e-15
    assert abs(w.c1 - w.c2) < 1e-15
    assert abs(w.c1.imag) < 1e-15
    assert w.c1.real == pytest.approx(math.sqrt(3.0))
