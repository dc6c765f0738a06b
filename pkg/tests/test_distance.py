import math
import warnings

import numpy as np
import pytest

from connes_lattice import (
    UNBOUNDED,
    DiracKind,
    DistanceQuery,
    Method,
    SolverOptions,
    SpectralTriple,
    build_closed_adjacency_block,
    commutator_norm,
    distance,
    distance_exact_closed,
    distance_exact_open,
    distance_matrix,
    distance_numeric,
    distance_oracle,
    real_reduce,
)
from connes_lattice.errors import ConvergenceWarning, IndexOutOfRangeError, TooLargeError

from conftest import triple


def numeric(kind, n, p, q, **opts):
    return distance_numeric(DistanceQuery(triple(kind, n), p, q), SolverOptions(**opts))


def oracle(kind, n, p, q):
    return distance_oracle(DistanceQuery(triple(kind, n), p, q))


def assert_metric(m, sym_tol=1e-9, tri_tol=1e-8):
    n = m.shape[0]
    assert np.all(np.diag(m) == 0)
    assert np.abs(m - m.T).max() <= sym_tol
    for k in range(n):
        # d(i, j) <= d(i, k) + d(k, j) for all i, j
        assert np.all(m <= m[:, [k]] + m[[k], :] + tri_tol)


# -- real reduction


def test_real_reduce_open_example():
    np.testing.assert_allclose(real_reduce([0, 1j, 1j + 1], "open"), [0, 1, 2])


def test_real_reduce_keeps_monotone_real():
    f = np.array([0.0, 0.5, 2.0, 2.25])
    np.testing.assert_array_equal(real_reduce(f, "open"), f)


def test_real_reduce_closed_constant():
    np.testing.assert_array_equal(real_reduce([2 + 3j] * 5, "closed"), np.zeros(5))


def test_real_reduce_increment_contracts(rng):
    for n in range(3, 10):
        f = rng.normal(size=n) + 1j * rng.normal(size=n)
        big = np.abs(np.diff(np.append(f, f[0])))
        F = real_reduce(f, "open")
        np.testing.assert_allclose(np.abs(np.diff(F)), big[:-1], rtol=1e-14)
        F = real_reduce(f, "closed")
        assert F[0] == 0 and F.dtype == float
        assert np.all(np.abs(np.diff(np.append(F, F[0]))) <= big + 1e-14)


# -- closed forms


def test_exact_open():
    assert distance_exact_open(5, 1, 4) == 3
    assert distance_exact_open(5, 2, 2) == 0
    assert distance_exact_open(2, 1, 2) == 1
    with pytest.raises(IndexOutOfRangeError):
        distance_exact_open(5, 0, 2)


def test_exact_closed():
    assert distance_exact_closed(6, 1, 5) == 2  # N - n + 1
    assert distance_exact_closed(7, 1, 3) == 2  # n - 1
    assert distance_exact_closed(7, 4, 4) == 0
    with pytest.raises(IndexOutOfRangeError):
        distance_exact_closed(6, 1, 7)


def test_cycle_is_translation_invariant():
    # shifting sites by one conjugates the cyclic adjacency matrix to itself,
    # so d(p, q) = d(p + 1, q + 1) and the d(1, n) results cover every pair
    for n in range(3, 11):
        a = build_closed_adjacency_block(n)
        shift = np.roll(np.eye(n), 1, axis=0)
        np.testing.assert_array_equal(shift @ a @ shift.T, a)


@pytest.mark.parametrize("n", [3, 5, 6])
def test_exact_closed_matches_solver_away_from_site_one(n):
    for p in range(2, n + 1):
        for q in range(1, n + 1):
            r = numeric("closed-adjacency-doubled", n, p, q)
            assert r.value == pytest.approx(distance_exact_closed(n, p, q), abs=1e-6)


# -- numeric solver


def test_numeric_open_example():
    r = numeric("adjacency-doubled", 6, 1, 5)
    assert r.method is Method.NUMERIC and r.converged
    assert r.value == pytest.approx(4.0, abs=1e-6)


def test_numeric_closed_example():
    assert numeric("closed-adjacency-doubled", 6, 1, 5).value == pytest.approx(2.0, abs=1e-6)


def test_numeric_symmetric_difference_two_sites():
    # the commutator is -(i/2)(f2 - f1) [[0, 1], [1, 0]] so its norm is |f2 - f1| / 2;
    # brute-force grid over f2 with f1 = 0 confirms sup = 2
    t = triple("symmetric-difference", 2)
    grid = np.linspace(0, 5, 5001)
    feasible = [x for x in grid if commutator_norm(t, [0.0, x]) <= 1.0 + 1e-15]
    assert max(feasible) == pytest.approx(2.0, abs=1e-3)
    assert numeric("symmetric-difference", 2, 1, 2).value == pytest.approx(2.0, abs=1e-6)
    assert oracle("symmetric-difference", 2, 1, 2).value == pytest.approx(2.0, abs=1e-6)


@pytest.mark.parametrize("m", [1, 2])
def test_symmetric_difference_reproduces_infinite_lattice_values(m):
    # d(0, 2m - 1) = 2m and d(0, 2m) = 2 sqrt(m (m + 1)); the optimal function is
    # constant outside [p, q], so a finite open lattice already attains them
    n, c = 9, 3
    assert numeric("symmetric-difference", n, c, c + 2 * m - 1).value == pytest.approx(2 * m, abs=1e-6)
    assert numeric("symmetric-difference", n, c, c + 2 * m).value == pytest.approx(
        2 * math.sqrt(m * (m + 1)), abs=1e-6
    )


def test_numeric_same_site():
    r = numeric("symmetric-difference", 4, 2, 2)
    assert r.value == 0.0 and not np.any(r.certificate)


def test_numeric_is_symmetric_in_pair():
    a = numeric("symmetric-difference", 5, 2, 4)
    b = numeric("symmetric-difference", 5, 4, 2)
    assert a.value == pytest.approx(b.value, abs=1e-8)


def test_query_index_checks():
    with pytest.raises(IndexOutOfRangeError):
        DistanceQuery(triple("adjacency-doubled", 4), 1, 5)
    with pytest.raises(IndexOutOfRangeError):
        DistanceQuery(triple("adjacency-doubled", 4), 0, 2)


@pytest.mark.parametrize("kind", list(DiracKind))
def test_certificates_are_feasible(kind):
    n = 6
    t = triple(kind, n)
    for p, q in [(1, 4), (2, 6), (5, 3)]:
        r = distance_numeric(DistanceQuery(t, p, q))
        cert = r.certificate
        assert commutator_norm(t, cert, "generic") <= 1 + 1e-9
        assert abs(abs(cert[q - 1] - cert[p - 1]) - r.value) <= 1e-8


def test_bare_subgradient_is_a_lower_bound():
    full = numeric("symmetric-difference", 6, 1, 5)
    bare = numeric("symmetric-difference", 6, 1, 5, refine=False)
    assert bare.upper_bound is None
    assert bare.value <= full.value + 1e-9
    assert bare.value == pytest.approx(full.value, abs=0.05)


def test_complex_starts_never_beat_real_starts():
    for kind, n in [("adjacency-doubled", 5), ("closed-adjacency-doubled", 5), ("symmetric-difference", 5)]:
        for p, q in [(1, 3), (2, 5)]:
            real = numeric(kind, n, p, q)
            cplx = numeric(kind, n, p, q, complex_starts=True, seed=7)
            assert cplx.value <= real.value + 1e-8


def test_random_feasible_ratios_stay_below_solution(rng):
    for kind in DiracKind:
        t = triple(kind, 6)
        best = distance_numeric(DistanceQuery(t, 2, 5)).value
        for _ in range(200):
            f = rng.normal(size=6)
            ratio = abs(f[4] - f[1]) / commutator_norm(t, f, "generic")
            assert ratio <= best + 1e-8


def test_solver_is_deterministic():
    a = numeric("symmetric-difference", 6, 2, 5, seed=3)
    b = numeric("symmetric-difference", 6, 2, 5, seed=3)
    assert a.value == b.value
    np.testing.assert_array_equal(a.certificate, b.certificate)


def test_unbounded_for_degenerate_operator():
    t = triple("adjacency-doubled", 3)
    zero = np.zeros_like(t.dirac)
    degenerate = SpectralTriple(t.lattice, t.kind, zero, t.grading, True, np.zeros_like(t.commutator_basis))
    r = distance_numeric(DistanceQuery(degenerate, 1, 3))
    assert r.unbounded and r.value == UNBOUNDED


def test_round_cap_flags_non_convergence():
    opts = SolverOptions(max_iterations=16, restarts=2, max_refine_rounds=1, tolerance=1e-14)
    with pytest.warns(ConvergenceWarning):
        r = distance_numeric(DistanceQuery(triple("symmetric-difference", 6), 1, 5), opts)
    assert not r.converged
    assert r.value <= r.upper_bound + 1e-9


def test_solver_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(tolerance=0)
    with pytest.raises(ValueError):
        SolverOptions(max_iterations=0)


# -- oracle


def test_oracle_examples():
    assert oracle("adjacency-doubled", 4, 1, 3).value == pytest.approx(2.0, abs=1e-4)
    assert oracle("adjacency-doubled", 4, 3, 3).value == 0.0
    a = oracle("symmetric-difference", 5, 2, 4)
    b = numeric("symmetric-difference", 5, 2, 4)
    assert a.value == pytest.approx(b.value, abs=1e-4)
    assert a.method is Method.ORACLE


def test_oracle_on_closed_lattice():
    assert oracle("closed-adjacency-doubled", 6, 1, 5).value == pytest.approx(2.0, abs=1e-4)


def test_oracle_size_guard():
    with pytest.raises(TooLargeError):
        oracle("symmetric-difference", 9, 1, 2)


def test_oracle_certificate_feasible():
    t = triple("symmetric-difference", 6)
    r = distance_oracle(DistanceQuery(t, 1, 4))
    assert commutator_norm(t, r.certificate) <= 1 + 1e-9
    assert r.certificate[3] - r.certificate[0] == pytest.approx(r.value, abs=1e-12)


# -- matrices


def test_distance_matrix_examples():
    np.testing.assert_array_equal(
        distance_matrix(triple("adjacency-doubled", 4)),
        [[0, 1, 2, 3], [1, 0, 1, 2], [2, 1, 0, 1], [3, 2, 1, 0]],
    )
    np.testing.assert_array_equal(distance_matrix(triple("closed-adjacency-doubled", 5))[0], [0, 1, 2, 2, 1])
    np.testing.assert_array_equal(distance_matrix(triple("adjacency-doubled", 2)), [[0, 1], [1, 0]])


def test_distance_matrix_numeric_route_agrees_with_exact():
    exact = distance_matrix(triple("closed-adjacency-doubled", 6))
    results = {}
    approx = distance_matrix(triple("closed-adjacency-doubled", 6), exact=False, results=results)
    assert all(r.method is Method.NUMERIC for r in results.values())
    np.testing.assert_allclose(approx, exact, atol=1e-6)


def test_symmetric_difference_matrix_is_a_metric():
    m = distance_matrix(triple("symmetric-difference", 6))
    assert_metric(m)


def test_distance_front_door_picks_closed_forms():
    assert distance(triple("adjacency-plain", 5), 1, 4).method is Method.EXACT_OPEN
    assert distance(triple("closed-adjacency-doubled", 5), 1, 4).method is Method.EXACT_CLOSED
    assert distance(triple("symmetric-difference", 5), 1, 4).method is Method.NUMERIC
