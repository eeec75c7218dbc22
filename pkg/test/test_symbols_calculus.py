import itertools

import numpy as np
import pytest

from crystalspectra.crystal import builtin, PerturbationSpec, PowerLawEnvelope, shortest_paths
from crystalspectra.exceptions import MeasureError
from crystalspectra.realspace import Box, build_h, build_h0
from crystalspectra.symbols import (Coefficient, ToroidalSymbol, apply_op, adjoint_symbol, symbol_matrix,
                                    quadrature_matrix, symbols_close, telescoping_steps, difference_op,
                                    perturbation_symbol, potential_symbols, long_range_differences)


def window_cells(L, d):
    return [tuple(mu) for mu in itertools.product(range(-L, L + 1), repeat=d)]


def random_symbol(rng, n, d, L):
    cells = window_cells(L, d)
    terms = {}
    for _ in range(rng.randint(1, 4)):
        nu = tuple(int(k) for k in rng.randint(-2, 3, size=d))
        support = [cells[k] for k in rng.choice(len(cells), size=min(len(cells), 12), replace=False)]
        table = dict((mu, rng.randn(n, n) + 1j * rng.randn(n, n)) for mu in support)
        terms[nu] = Coefficient(n, table)
    return ToroidalSymbol(n, d, terms)


class Test_symbol_calculus:

    def test_single_term_is_shift_then_multiply(self):
        rng = np.random.RandomState(5)
        n, d = 2, 2
        nu = (1, -2)
        table = dict((mu, rng.randn(n, n)) for mu in window_cells(3, d))
        a = ToroidalSymbol(n, d, {nu: Coefficient(n, table)})
        f = dict((mu, rng.randn(n) + 1j * rng.randn(n)) for mu in window_cells(2, d))
        out = apply_op(a, f)
        for kappa, value in out.items():
            source = (kappa[0] + nu[0], kappa[1] + nu[1])
            expected = table.get(source, np.zeros((n, n))).dot(f[source])
            assert np.max(np.abs(value - expected)) <= 1e-14

    def test_shift_example(self):
        shift = ToroidalSymbol.constant(1, 1, nu=(1,))
        out = apply_op(shift, {(0,): [1.0]})
        assert list(out) == [(-1,)]
        assert out[(-1,)].tolist() == [1.0]

    def test_adjoint_identity_on_random_symbols(self):
        rng = np.random.RandomState(6)
        for trial in range(100):
            d = 1 + trial % 2
            L = 31 if d == 1 else 4
            a = random_symbol(rng, 2, d, L)
            forward = symbol_matrix(a, L)
            backward = symbol_matrix(adjoint_symbol(a), L)
            assert np.max(np.abs(backward - forward.conj().T)) <= 1e-12

    def test_adjoint_is_an_involution(self):
        rng = np.random.RandomState(8)
        a = random_symbol(rng, 3, 2, 3)
        assert symbols_close(adjoint_symbol(adjoint_symbol(a)), a, 5)

    def test_fourier_quadrature_matches(self):
        rng = np.random.RandomState(9)
        for d in (1, 2):
            a = random_symbol(rng, 2, d, 3)
            assert np.max(np.abs(quadrature_matrix(a, 3, nodes=16) - symbol_matrix(a, 3))) < 1e-12

    def test_evaluate(self):
        a = ToroidalSymbol.constant(1, 1, nu=(1,))
        assert a.evaluate((0.25,), (0,))[0, 0] == pytest.approx(1j)

    def test_sum_of_symbols(self):
        a = ToroidalSymbol.constant(1, 1)
        b = ToroidalSymbol.constant(1, 1, matrix=[[2.0]])
        assert (a + b).term((0,))((5,))[0, 0] == 3.0
        assert a.scaled(-1.0).term((0,))((0,))[0, 0] == -1.0

    def test_phase_dimension_checked(self):
        with pytest.raises(ValueError):
            ToroidalSymbol(1, 2, {(1,): Coefficient(1)})


class Test_telescoping:

    def test_steps(self):
        assert telescoping_steps((1, 1)) == [(1, (0, 0), 0), (1, (1, 0), 1)]
        assert telescoping_steps((-2,)) == [(-1, (-1,), 0), (-1, (-2,), 0)]
        assert telescoping_steps((0, 0)) == []

    def test_telescoped_difference(self):
        f = lambda mu: float(mu[0] ** 3 - 2 * mu[0] * mu[1] + 5 * mu[1] ** 2)
        for nu in [(2, -3), (-1, 4), (0, 0), (3, 1)]:
            direct = difference_op(f, nu)
            telescoped = difference_op(f, nu, telescoped=True)
            for mu in window_cells(3, 2):
                assert telescoped(mu) == direct(mu)


class Test_perturbation_symbols:

    def test_edge_bump_on_zd1(self, fixZd1):
        p = PerturbationSpec(edge_measure_delta={((0,), 0): 1.0})
        b = perturbation_symbol(fixZd1, p)
        assert b.is_finite
        assert sorted(b.term((0,)).support()) == [(0,), (1,)]
        assert b.term((0,))((0,))[0, 0] == 1.0
        assert b.term((0,))((1,))[0, 0] == 1.0
        assert b.term((1,)).support() == [(1,)]
        assert b.term((1,))((1,))[0, 0] == -1.0
        assert b.term((-1,)).support() == [(0,)]

    def test_self_adjoint(self, fixKagome):
        p = PerturbationSpec(vertex_measure_delta={((0, 0), 1): 0.5, ((1, -1), 2): -0.3},
                             edge_measure_delta={((0, 1), 4): 0.7})
        b = perturbation_symbol(fixKagome, p)
        assert symbols_close(b, adjoint_symbol(b), 4)

    @pytest.mark.parametrize("name,p,L", [
        ("kagome", PerturbationSpec(vertex_measure_delta={((0, 0), 1): 0.5, ((1, -1), 2): -0.3},
                                    edge_measure_delta={((0, 1), 4): 0.7, ((-1, 0), 0): 1.5}), 4),
        ("zd:2", PerturbationSpec(vertex_measure_envelope=PowerLawEnvelope(0.5, 2.0)), 3),
    ])
    def test_matches_operator_difference(self, name, p, L):
        g = builtin(name)
        box = Box.truncated(L)
        difference = (build_h(g, p, box).matrix - build_h0(g, box).matrix).toarray()
        window = symbol_matrix(perturbation_symbol(g, p), box)
        assert np.max(np.abs(window - difference)) < 1e-12
        assert np.max(np.abs(difference)) > 0.1

    def test_vanishes_without_measure(self, fixHexagonal):
        b = perturbation_symbol(fixHexagonal, PerturbationSpec(potential_short={((0, 0), 0): 2.0}))
        assert all(b.term(nu).support() == [] for nu in b.nus)

    def test_envelope_gives_function_coefficients(self, fixZd1):
        p = PerturbationSpec(vertex_measure_envelope=PowerLawEnvelope(0.5, 2.0))
        b = perturbation_symbol(fixZd1, p)
        assert not b.is_finite
        assert symbols_close(b, adjoint_symbol(b), 6)

    def test_nonpositive_measure(self, fixZd1):
        with pytest.raises(MeasureError):
            perturbation_symbol(fixZd1, PerturbationSpec(vertex_measure_delta={((0,), 0): -1.0}))

    def test_potential_symbols_compact(self, fixZd1, fixBump):
        r_s, r_l = potential_symbols(fixZd1, fixBump)
        assert r_s.is_finite
        assert r_s.term((0,)).support() == [(0,)]
        assert r_s.term((0,))((0,))[0, 0] == 3.0
        assert r_l.nus == []

    def test_potential_symbols_long_range(self, fixHexagonal):
        envelope = PowerLawEnvelope(1.0, 0.5, (1.0, 2.0))
        r_s, r_l = potential_symbols(fixHexagonal, PerturbationSpec(potential_long=envelope))
        for mu in [(0, 0), (3, -4), (-2, 7)]:
            decay = (1.0 + np.sqrt(mu[0] ** 2 + mu[1] ** 2)) ** -0.5
            assert np.allclose(r_l.term((0, 0))(mu), decay * np.eye(2), atol=1e-15)
            assert r_s.term((0, 0))(mu)[0, 0] == 0.0
            assert r_s.term((0, 0))(mu)[1, 1].real == pytest.approx(decay, abs=1e-15)

    def test_long_range_differences_follow_beta_paths(self, fixHexagonal):
        p = PerturbationSpec(potential_long=PowerLawEnvelope(1.0, 0.5, (1.0, 2.0)))
        alpha, beta = shortest_paths(fixHexagonal)
        assert all(len(beta[k]) == 2 for k in range(2))
        differences = long_range_differences(fixHexagonal, p, (alpha, beta))
        for mu in [(0, 0), (3, -4), (-2, 7), (40, 9)]:
            for k, unit in enumerate([(1, 0), (0, 1)]):
                direct = p.potential_long((mu[0] + unit[0], mu[1] + unit[1]), 0) - p.potential_long(mu, 0)
                assert differences[k](mu) == pytest.approx(direct, abs=1e-14)

    def test_long_range_differences_use_given_paths(self, fixHexagonal):
        p = PerturbationSpec(potential_long=PowerLawEnvelope(1.0, 0.5, (1.0, 2.0)))
        alpha, beta = shortest_paths(fixHexagonal)
        # the steps of a path are relative to mu, so repeating them counts the difference twice
        repeated = dict((k, beta[k] + beta[k]) for k in beta)
        doubled = long_range_differences(fixHexagonal, p, (alpha, repeated))
        single = long_range_differences(fixHexagonal, p, (alpha, beta))
        assert single[0]((0, 0)) == pytest.approx(2.0 ** -0.5 - 1.0, abs=1e-14)
        assert doubled[0]((0, 0)) == pytest.approx(2.0 * single[0]((0, 0)), abs=1e-14)
