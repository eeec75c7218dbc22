"""Toroidal pseudodifferential symbols on T^d x Z^d and decay checks.

A symbol is a finite sum a(xi, mu) = sum_nu exp(2 pi i xi . nu) a_nu(mu) of phases times
matrix-valued coefficients. Acting on the Fourier coefficients f: Z^d -> C^n of a function
on the torus, the operator Op(a) is shift-then-multiply:

    (Op(a) f)(mu) = sum_nu a_nu(mu + nu) f(mu + nu)
"""
import json
import math
import logging
import itertools
import functools
from collections import namedtuple

import numpy as np

from .consts import CrystalConventions as const
from .crystal import shortest_paths
from .exceptions import CrystalValidationError
from .realspace import Box, cells
from .utils import json_float

_log = logging.getLogger(__name__)
_log.addHandler(logging.NullHandler())

DEFAULT_DECAY_LEVELS = 20
EXACT_SHELL_LIMIT = 2 ** 18
SLOPE_MARGIN = 1e-3
RELATIVE_TAIL = 1e-6
QUADRATURE_NODES = 128


def _cell(mu):
    return tuple(int(k) for k in mu)


def _add(mu, nu):
    return tuple(int(a) + int(b) for a, b in zip(mu, nu))


def _sub(mu, nu):
    return tuple(int(a) - int(b) for a, b in zip(mu, nu))


class Coefficient(object):
    """
    A map Z^d -> n x n complex matrices given by a finite table and an optional function.

    Table entries override the function; without a function the map vanishes off the table.
    Instances are immutable.

    Args:
        n (int): matrix size
        table (dict, optional): cell -> n x n matrix
        function (callable, optional): cell (tuple) -> n x n matrix

    """

    def __init__(self, n, table=None, function=None):
        self.n = n
        self._table = dict((_cell(mu), np.array(value, dtype=complex).reshape(n, n))
                           for mu, value in (table or {}).items())
        self._function = function

    def __call__(self, mu):
        mu = _cell(mu)
        value = self._table.get(mu)
        if value is not None:
            return value
        if self._function is not None:
            return np.array(self._function(mu), dtype=complex).reshape(self.n, self.n)
        return np.zeros((self.n, self.n), dtype=complex)

    @property
    def is_finite(self):
        """True when the coefficient is finitely supported (table only)"""
        return self._function is None

    @property
    def table(self):
        return dict(self._table)

    def support(self):
        """table cells with a nonzero matrix, sorted"""
        return sorted(mu for mu, value in self._table.items() if np.any(value != 0))

    def shifted_adjoint(self, nu):
        """the coefficient mu -> a(mu + nu)^*"""
        nu = _cell(nu)
        table = dict((_sub(mu, nu), value.conj().T) for mu, value in self._table.items())
        function = None
        if self._function is not None:
            base = self._function
            n = self.n

            def function(mu):
                return np.array(base(_add(mu, nu)), dtype=complex).reshape(n, n).conj().T
        return Coefficient(self.n, table, function)

    def scaled(self, factor):
        table = dict((mu, factor * value) for mu, value in self._table.items())
        function = None
        if self._function is not None:
            base = self._function

            def function(mu):
                return factor * np.asarray(base(mu), dtype=complex)
        return Coefficient(self.n, table, function)

    def __add__(self, other):
        keys = set(self._table) | set(other._table)
        table = dict((mu, self(mu) + other(mu)) for mu in keys)
        function = None
        if self._function is not None or other._function is not None:
            first, second, n = self._function, other._function, self.n

            def function(mu):
                total = np.zeros((n, n), dtype=complex)
                if first is not None:
                    total = total + np.asarray(first(mu), dtype=complex).reshape(n, n)
                if second is not None:
                    total = total + np.asarray(second(mu), dtype=complex).reshape(n, n)
                return total
        return Coefficient(self.n, table, function)


class ToroidalSymbol(object):
    """
    Finite phase sum a(xi, mu) = sum_nu exp(2 pi i xi . nu) a_nu(mu).

    Args:
        n (int): matrix size
        d (int): dimension
        terms (dict, optional): phase vector nu -> :py:class:`Coefficient`

    Example:
       >>> from crystalspectra.symbols import ToroidalSymbol, apply_op
       >>> shift = ToroidalSymbol.constant(1, 1, nu=(1,))
       >>> apply_op(shift, {(0,): [1.0]})
       {(-1,): array([1.+0.j])}

    """

    def __init__(self, n, d, terms=None):
        self.n = n
        self.d = d
        self._terms = {}
        for nu, coefficient in (terms or {}).items():
            nu = _cell(nu)
            if len(nu) != d:
                raise ValueError("phase vector {0} must have {1} components".format(list(nu), d))
            if nu in self._terms:
                coefficient = self._terms[nu] + coefficient
            self._terms[nu] = coefficient

    @classmethod
    def constant(cls, n, d, matrix=None, nu=None):
        """single term exp(2 pi i xi . nu) * matrix (identity by default)"""
        matrix = np.eye(n) if matrix is None else np.asarray(matrix, dtype=complex).reshape(n, n)
        nu = (0,) * d if nu is None else _cell(nu)
        return cls(n, d, {nu: Coefficient(n, function=lambda mu: matrix)})

    @classmethod
    def zero(cls, n, d):
        return cls(n, d)

    @property
    def nus(self):
        return sorted(self._terms)

    @property
    def terms(self):
        return dict(self._terms)

    def term(self, nu):
        return self._terms.get(_cell(nu), Coefficient(self.n))

    @property
    def is_finite(self):
        return all(c.is_finite for c in self._terms.values())

    def evaluate(self, xi, mu):
        """a(xi, mu) as an n x n matrix"""
        xi = np.asarray(xi, dtype=float).reshape(self.d)
        total = np.zeros((self.n, self.n), dtype=complex)
        for nu, coefficient in sorted(self._terms.items()):
            total += np.exp(2j * np.pi * xi.dot(nu)) * coefficient(mu)
        return total

    def __add__(self, other):
        terms = dict(self._terms)
        for nu, coefficient in other._terms.items():
            terms[nu] = terms[nu] + coefficient if nu in terms else coefficient
        return ToroidalSymbol(self.n, self.d, terms)

    def scaled(self, factor):
        return ToroidalSymbol(self.n, self.d, dict((nu, c.scaled(factor)) for nu, c in self._terms.items()))

    def __repr__(self):
        return "ToroidalSymbol(n={0}, d={1}, nus={2})".format(self.n, self.d, self.nus)


def apply_op(a, coeffs):
    """applies Op(a) to finitely supported Fourier coefficients

        Args:
            a (ToroidalSymbol): symbol
            coeffs (dict): cell -> vector of length n

        Returns:
            dict: cell -> vector, ``output(mu) = sum_nu a_nu(mu + nu) coeffs(mu + nu)``

    """
    out = {}
    for nu, coefficient in sorted(a.terms.items()):
        for mu, vector in sorted((_cell(k), v) for k, v in coeffs.items()):
            value = coefficient(mu).dot(np.asarray(vector, dtype=complex).reshape(a.n))
            target = _sub(mu, nu)
            out[target] = out[target] + value if target in out else value
    return dict(sorted(out.items()))


def adjoint_symbol(a):
    """symbol of the adjoint operator: the term (nu, a_nu) becomes (-nu, mu -> a_nu(mu + nu)^*)"""
    return ToroidalSymbol(a.n, a.d, dict((tuple(-k for k in nu), coefficient.shifted_adjoint(nu))
                                         for nu, coefficient in a.terms.items()))


def _window_cells(window, d):
    if isinstance(window, int):
        return [tuple(int(k) for k in mu) for mu in cells(Box.truncated(window), d)]
    if isinstance(window, Box):
        return [tuple(int(k) for k in mu) for mu in cells(window, d)]
    return [_cell(mu) for mu in window]


def symbol_matrix(a, window):
    """matrix of apply_op restricted to a window

        Args:
            a (ToroidalSymbol): symbol
            window (int, Box or list of cells): truncation radius, box or explicit cells

        Returns:
            numpy.ndarray: ``(|W| n, |W| n)`` complex matrix; block (kappa, mu) is the
            coefficient of f(mu) in output(kappa)

    """
    window = _window_cells(window, a.d)
    position = dict((mu, pos) for pos, mu in enumerate(window))
    n = a.n
    matrix = np.zeros((len(window) * n, len(window) * n), dtype=complex)
    for nu, coefficient in sorted(a.terms.items()):
        for mu in window:
            row = position.get(_sub(mu, nu))
            if row is None:
                continue
            col = position[mu]
            matrix[row * n:(row + 1) * n, col * n:(col + 1) * n] = coefficient(mu)
    return matrix


def quadrature_matrix(a, window, nodes=QUADRATURE_NODES):
    """matrix of Op(a) on a window from the trapezoidal quadrature of the symbol over T^d

        Block (kappa, mu) is the mean over xi of exp(2 pi i xi . (kappa - mu)) a(xi, mu).
        Exact for windows and phases with |kappa - mu + nu|_inf < nodes.
    """
    window = _window_cells(window, a.d)
    n = a.n
    axes = np.meshgrid(*([np.arange(nodes) / float(nodes)] * a.d), indexing="ij")
    xis = np.stack([x.ravel() for x in axes], axis=-1)
    cells_array = np.array(window, dtype=float).reshape(len(window), a.d)
    matrix = np.zeros((len(window) * n, len(window) * n), dtype=complex)
    for col, mu in enumerate(window):
        symbol = np.zeros((xis.shape[0], n, n), dtype=complex)
        for nu, coefficient in sorted(a.terms.items()):
            symbol += np.exp(2j * np.pi * xis.dot(nu))[:, np.newaxis, np.newaxis] * coefficient(mu)
        phases = np.exp(2j * np.pi * xis.dot((cells_array - np.asarray(mu, dtype=float)).T))
        blocks = np.einsum("xk,xab->kab", phases, symbol) / xis.shape[0]
        for row in range(len(window)):
            matrix[row * n:(row + 1) * n, col * n:(col + 1) * n] = blocks[row]
    return matrix


def symbols_close(a, b, window, tol=1e-12):
    """True when every coefficient of a and b agrees to ``tol`` on the window"""
    window = _window_cells(window, a.d)
    for nu in sorted(set(a.nus) | set(b.nus)):
        first, second = a.term(nu), b.term(nu)
        for mu in window:
            if np.max(np.abs(first(mu) - second(mu))) > tol:
                return False
    return True


def telescoping_steps(nu):
    """decomposition of the difference along nu into shifted axis differences

        Returns:
            list of tuple: ``(sign, gamma, axis)`` with
            ``f(mu + nu) - f(mu) = sum sign * (f(mu + gamma + e_axis) - f(mu + gamma))``

        Example:
           >>> from crystalspectra.symbols import telescoping_steps
           >>> telescoping_steps((1, 1))
           [(1, (0, 0), 0), (1, (1, 0), 1)]

    """
    nu = _cell(nu)
    steps = []
    position = [0] * len(nu)
    for axis, count in enumerate(nu):
        for _ in range(abs(count)):
            if count > 0:
                steps.append((1, tuple(position), axis))
                position[axis] += 1
            else:
                position[axis] -= 1
                steps.append((-1, tuple(position), axis))
    return steps


def difference_op(f, nu, telescoped=False):
    """the difference mu -> f(mu + nu) - f(mu)

        Args:
            f (callable): cell -> scalar or matrix
            nu (tuple): difference vector
            telescoped (bool, optional): evaluate as a sum of shifted axis differences

        Returns:
            callable: the difference

    """
    nu = _cell(nu)
    if not telescoped:
        return lambda mu: np.asarray(f(_add(mu, nu))) - np.asarray(f(_cell(mu)))
    steps = telescoping_steps(nu)

    def telescoped_difference(mu):
        mu = _cell(mu)
        total = np.asarray(f(mu)) * 0
        for sign, gamma, axis in steps:
            start = _add(mu, gamma)
            unit = tuple(1 if k == axis else 0 for k in range(len(nu)))
            total = total + sign * (np.asarray(f(_add(start, unit))) - np.asarray(f(start)))
        return total
    return telescoped_difference


def _compact_cells(g, p):
    """cells where the symbols of a table-only perturbation can be nonzero"""
    table_cells = set(cell for cell, _ in p.vertex_measure_table) | set(cell for cell, _ in p.edge_measure_table)
    shifts = set([(0,) * g.d])
    for edge in g.oriented_edges:
        shifts.add(tuple(edge.index))
        shifts.add(tuple(-k for k in edge.index))
    return sorted(set(_add(c, s) for c in table_cells for s in shifts))


def _materialize(n, function, support):
    if support is None:
        return Coefficient(n, function=function)
    table = {}
    for mu in support:
        value = np.asarray(function(mu), dtype=complex)
        if np.any(value != 0):
            table[mu] = value
    return Coefficient(n, table)


def _edge_symbols(g, p, e):
    """K(e) and T(e) as functions of the cell"""
    n = g.n
    edge = g.oriented_edges[e]
    j, l = edge.origin, edge.terminus
    m0 = g.arrays()["vertex_m0"]
    hop_ref = edge.m0 / math.sqrt(m0[j] * m0[l])
    deg_ref = edge.m0 / m0[j]

    def kappa(mu):
        origin = _sub(mu, edge.index)
        out = np.zeros((n, n), dtype=complex)
        out[j, l] = p.edge_measure(g, origin, e) / math.sqrt(p.vertex_measure(g, origin, j) *
                                                             p.vertex_measure(g, mu, l)) - hop_ref
        return out

    def tau(mu):
        out = np.zeros((n, n), dtype=complex)
        out[j, j] = p.edge_measure(g, mu, e) / p.vertex_measure(g, mu, j) - deg_ref
        return out

    return kappa, tau


def perturbation_symbol(g, p):
    """symbol of the measure perturbation in the fiber space

        Returns the symbol b = sum_e (T(e) - (K(e)_eta(e) + K(e)_eta(e)^dagger) / 2) of
        Delta(X, m0) - J Delta(X, m) J*, where

        * K(e)(mu)_jl = m((mu - eta) e) / (m((mu - eta) x_j) m(mu x_l))^(1/2) - m0(e) / (m0(x_j) m0(x_l))^(1/2)
        * T(e)(mu)_jj = m(mu e) / m(mu x_j) - m0(e) / m0(x_j)

        for every oriented edge e from x_j to x_l. Potential parts of ``p`` are ignored.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            p (PerturbationSpec): perturbation

        Returns:
            ToroidalSymbol: one term per distinct edge index plus nu = 0; finitely supported
            coefficients when ``p`` only has tables

        Raises:
            MeasureError: a perturbed measure is not strictly positive

    """
    p.check(g)
    if p.has_potential:
        _log.debug("perturbation_symbol ignores the potential part of the perturbation")
    n, d = g.n, g.d
    support = _compact_cells(g, p) if p.is_compact else None
    terms = {(0,) * d: Coefficient(n)}
    for e, edge in enumerate(g.oriented_edges):
        kappa, tau = _edge_symbols(g, p, e)
        eta = tuple(edge.index)
        hop = _materialize(n, kappa, support).scaled(-0.5)
        terms[(0,) * d] = terms[(0,) * d] + _materialize(n, tau, support)
        for nu, coefficient in ((eta, hop), (tuple(-k for k in eta), hop.shifted_adjoint(eta))):
            terms[nu] = terms[nu] + coefficient if nu in terms else coefficient
    return ToroidalSymbol(n, d, terms)


def potential_symbols(g, p, paths=None):
    """diagonal symbols r_s and r_l of the potential perturbation

        r_s(mu)_jj = R_s(mu x_j) + R_l(mu x_j) - R_l(mu x_1) and r_l(mu) = R_l(mu x_1) Id. The
        difference R_l(mu x_j) - R_l(mu x_1) is evaluated by telescoping along the path alpha_j
        from x_1 to x_j.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            p (PerturbationSpec): perturbation
            paths (tuple, optional): ``(alpha, beta)`` as returned by
                :py:func:`crystalspectra.crystal.shortest_paths` (computed when omitted)

        Returns:
            tuple: ``(r_s, r_l)`` ToroidalSymbols with a single nu = 0 term

        Raises:
            CrystalValidationError: a path alpha_j is missing while R_l is present and n > 1

    """
    n, d = g.n, g.d
    zero = (0,) * d
    long_range = p.has_long_range
    alpha = {}
    if long_range and n > 1:
        alpha = (paths if paths is not None else shortest_paths(g))[0]
        missing = [j for j in range(1, n) if j not in alpha]
        if missing:
            raise CrystalValidationError(["no path from x1 to x{0}".format(j + 1) for j in missing])
    arr = g.arrays()

    def telescoped(mu, j):
        return _telescope(p, arr, alpha[j], mu)

    def short(mu):
        values = [p.potential_short(mu, j) for j in range(n)]
        if long_range:
            for j in range(1, n):
                values[j] += telescoped(mu, j)
        return np.diag(values).astype(complex)

    if p.is_compact:
        support = sorted(set(cell for cell, _ in p.potential_short_table))
        r_s = ToroidalSymbol(n, d, {zero: _materialize(n, short, support)})
    else:
        r_s = ToroidalSymbol(n, d, {zero: Coefficient(n, function=short)})
    if not long_range:
        return r_s, ToroidalSymbol.zero(n, d)
    r_l = ToroidalSymbol(n, d, {zero: Coefficient(n, function=lambda mu: p.potential_long(mu, 0) * np.eye(n))})
    return r_s, r_l


def _telescope(p, arr, steps, mu):
    total = 0.0
    for cell, e in steps:
        start = _add(mu, cell)
        total += p.potential_long(_add(start, arr["index"][e]), int(arr["terminus"][e])) - \
            p.potential_long(start, int(arr["origin"][e]))
    return total


def long_range_differences(g, p, paths=None):
    """axis differences of r_l(mu) = R_l(mu x_1) telescoped along the paths beta_k

        R_l((mu + delta_k) x_1) - R_l(mu x_1) is the sum over the steps of beta_k, shifted by mu,
        of R_l at the terminus minus R_l at the origin of the step.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            p (PerturbationSpec): perturbation
            paths (tuple, optional): ``(alpha, beta)`` as returned by
                :py:func:`crystalspectra.crystal.shortest_paths` (computed when omitted)

        Returns:
            list: one function cell -> float per axis k

        Raises:
            CrystalValidationError: a path beta_k is missing

    """
    beta = (paths if paths is not None else shortest_paths(g))[1]
    missing = [k for k in range(g.d) if k not in beta]
    if missing:
        raise CrystalValidationError(["no path from x1 to its translate along axis {0}".format(k + 1)
                                      for k in missing])
    arr = g.arrays()
    return [functools.partial(_telescope, p, arr, beta[k]) for k in range(g.d)]


def _magnitude(value):
    value = np.asarray(value)
    if value.ndim == 2:
        return float(np.linalg.norm(value, 2))
    return float(np.max(np.abs(value))) if value.size else 0.0


class PowerLawProfile(object):
    """radial profile A (1 + |mu|)^(-alpha) with closed-form shell suprema"""

    def __init__(self, amplitude, exponent):
        self.amplitude = float(amplitude)
        self.exponent = float(exponent)

    def shell_sup(self, k):
        return abs(self.amplitude) * (1.0 + 2.0 ** k) ** (-self.exponent), False

    def difference(self, axis):
        return _PowerLawDifference(self.amplitude, self.exponent)


class _PowerLawDifference(object):
    """mean value bound A alpha lambda^(-alpha-1) of an axis difference of a power law"""

    def __init__(self, amplitude, exponent):
        self.amplitude = amplitude
        self.exponent = exponent

    def shell_sup(self, k):
        return abs(self.amplitude * self.exponent) * (2.0 ** k) ** (-self.exponent - 1.0), False


class TableProfile(object):
    """finitely supported profile given as cell -> value (scalar or matrix)"""

    def __init__(self, table):
        self.table = dict((_cell(mu), value) for mu, value in table.items())

    def shell_sup(self, k):
        low, high = 2.0 ** k, 2.0 ** (k + 1)
        sups = [_magnitude(v) for mu, v in self.table.items()
                if low <= math.sqrt(sum(c * c for c in mu)) < high]
        return (max(sups) if sups else 0.0), False

    def difference(self, axis):
        if not self.table:
            return TableProfile({})
        d = len(next(iter(self.table)))
        unit = tuple(1 if k == axis else 0 for k in range(d))
        keys = set(self.table) | set(_sub(mu, unit) for mu in self.table)
        zero = np.zeros_like(np.asarray(next(iter(self.table.values()))))
        return TableProfile(dict((mu, np.asarray(self.table.get(_add(mu, unit), zero)) -
                                  np.asarray(self.table.get(mu, zero))) for mu in keys))


class FunctionProfile(object):
    """
    Profile given by a function of the cell.

    Shells with at most ``EXACT_SHELL_LIMIT`` lattice points in their bounding box are
    enumerated exactly; larger shells are sampled along a fixed set of directions and
    reported as sampled.

    Args:
        function (callable): cell (tuple) -> scalar or matrix
        d (int): dimension

    """

    def __init__(self, function, d):
        self.function = function
        self.d = int(d)

    def _directions(self):
        if self.d == 1:
            return np.array([[1.0], [-1.0]])
        if self.d == 2:
            angles = 2.0 * np.pi * np.arange(64) / 64
            return np.stack([np.cos(angles), np.sin(angles)], axis=-1)
        count = 128
        golden = np.pi * (3.0 - np.sqrt(5.0))
        z = 1.0 - 2.0 * (np.arange(count) + 0.5) / count
        radius = np.sqrt(1.0 - z * z)
        points = [np.stack([radius * np.cos(golden * np.arange(count)),
                            radius * np.sin(golden * np.arange(count)), z], axis=-1)]
        points.append(np.vstack([np.eye(self.d), -np.eye(self.d)]))
        return np.vstack(points)

    def shell_sup(self, k):
        low = 2 ** k
        high = 2 ** (k + 1)
        if (2 * high - 1) ** self.d <= EXACT_SHELL_LIMIT:
            span = range(-high + 1, high)
            points = [mu for mu in itertools.product(span, repeat=self.d)
                      if low * low <= sum(c * c for c in mu) < high * high]
            sampled = False
        else:
            radii = low * 2.0 ** (np.arange(32) / 32.0)
            candidates = np.rint(self._directions()[:, np.newaxis, :] * radii[np.newaxis, :, np.newaxis])
            candidates = np.unique(candidates.reshape(-1, self.d).astype(int), axis=0)
            norms = np.sum(candidates.astype(float) ** 2, axis=1)
            points = [tuple(int(c) for c in mu) for mu in candidates[(norms >= low * low) & (norms < high * high)]]
            sampled = True
        sups = [_magnitude(self.function(mu)) for mu in points]
        return (max(sups) if sups else 0.0), sampled

    def difference(self, axis):
        unit = tuple(1 if k == axis else 0 for k in range(self.d))
        function = self.function
        return FunctionProfile(lambda mu: np.asarray(function(_add(mu, unit))) - np.asarray(function(mu)), self.d)


class SumProfile(object):
    """sum of profiles; shell suprema add up to an upper bound"""

    def __init__(self, *profiles):
        self.profiles = profiles

    def shell_sup(self, k):
        total, sampled = 0.0, False
        for profile in self.profiles:
            value, flag = profile.shell_sup(k)
            total += value
            sampled = sampled or flag
        return total, sampled

    def difference(self, axis):
        return SumProfile(*[profile.difference(axis) for profile in self.profiles])


class DecayReport(object):
    """
    Evidence about the integrability of dyadic shell suprema.

    Attributes:
        mode (str): ``short`` or ``long``
        shells (list of tuple): ``(lambda, sup)`` for lambda = 2^k, k = 0..K
        partial_sums (list of float): running sums of sup * lambda
        fitted_exponent (float): least squares log-log slope over the upper half of the
            levels, None when the tail vanishes
        classification (str): convergent-evidence, divergent-evidence or inconclusive
        sampled (bool): some shell suprema were estimated by sampling
        axes (list of DecayReport): long mode only, one report per axis difference
        vanishing (bool): long mode only, the shell suprema of the profile itself decay

    """

    def __init__(self, mode, shells, partial_sums, fitted_exponent, classification, sampled,
                 axes=None, vanishing=None):
        self.mode = mode
        self.shells = shells
        self.partial_sums = partial_sums
        self.fitted_exponent = fitted_exponent
        self.classification = classification
        self.sampled = sampled
        self.axes = axes or []
        self.vanishing = vanishing

    def to_dict(self):
        out = {
            "mode": self.mode,
            "shells": [{"lambda": lam, "sup": sup} for lam, sup in self.shells],
            "partial_sums": list(self.partial_sums),
            "fitted_exponent": json_float(self.fitted_exponent),
            "classification": self.classification,
            "sampled": self.sampled,
        }
        if self.mode == const.LONG:
            out["axes"] = [axis.to_dict() for axis in self.axes]
            out["vanishing"] = self.vanishing
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _fit(sups, K):
    levels = [k for k in range(K // 2, K + 1) if sups[k] > 0]
    if len(levels) < 2:
        return None
    x = np.array(levels, dtype=float) * math.log(2.0)
    y = np.log(np.array([sups[k] for k in levels]))
    return float(np.polyfit(x, y, 1)[0])


def _shells(profile, K):
    sups, sampled = [], False
    for k in range(K + 1):
        value, flag = profile.shell_sup(k)
        sups.append(float(value))
        sampled = sampled or flag
    return sups, sampled


def _short_report(profile, K, mode=const.SHORT):
    sups, sampled = _shells(profile, K)
    lambdas = [2.0 ** k for k in range(K + 1)]
    increments = [s * lam for s, lam in zip(sups, lambdas)]
    partial = list(np.cumsum(increments))
    slope = _fit(sups, K)

    if all(s == 0 for s in sups[K // 2:]):
        classification = const.CONVERGENT
    elif slope is None:
        classification = const.INCONCLUSIVE
    else:
        previous = increments[K - 1] if K >= 1 else 0.0
        ratio = increments[K] / previous if previous > 0 else np.inf
        relative = increments[K] / partial[K] if partial[K] > 0 else 0.0
        if slope < -1.0 - SLOPE_MARGIN and (ratio < 1.0 - SLOPE_MARGIN or relative < RELATIVE_TAIL):
            classification = const.CONVERGENT
        elif slope >= -1.0 + SLOPE_MARGIN or ratio >= 1.0 - SLOPE_MARGIN:
            classification = const.DIVERGENT
        else:
            classification = const.INCONCLUSIVE
    return DecayReport(mode, list(zip(lambdas, sups)), [float(s) for s in partial], slope,
                       classification, sampled)


def check_decay(values, mode=const.SHORT, K=DEFAULT_DECAY_LEVELS, d=None, logger=None):
    """classifies the decay of a profile on dyadic shells lambda <= |mu| < 2 lambda

        Short mode sums sup-on-shell * lambda over lambda = 2^k, k = 0..K. The verdict is
        convergent-evidence when the fitted log-log slope is below -1 - 1e-3 and the increments
        decay (last ratio below 1 - 1e-3, or last increment below 1e-6 of the total);
        divergent-evidence when the slope is at least -1 + 1e-3 or the increments do not decay;
        inconclusive otherwise. Long mode checks every axis difference of the profile in short
        mode and requires the profile itself to vanish at infinity.

        Args:
            values (profile or callable): a profile, or a function of the cell (needs ``d``)
            mode (str, optional): ``short`` or ``long``
            K (int, optional): largest dyadic level
            d (int, optional): dimension (default 1 for radial profiles)
            logger (logging.Logger, optional): logger

        Returns:
            DecayReport: the evidence

        Example:
           >>> from crystalspectra.symbols import PowerLawProfile, check_decay
           >>> check_decay(PowerLawProfile(1.0, 2.0)).classification
           'convergent-evidence'

    """
    logger = logger or _log
    if not hasattr(values, "shell_sup"):
        if d is None:
            raise ValueError("the dimension is required for function profiles")
        values = FunctionProfile(values, d)
    if mode == const.SHORT:
        report = _short_report(values, K)
    elif mode == const.LONG:
        d = d or getattr(values, "d", None) or 1
        axes = [_short_report(values.difference(axis), K) for axis in range(d)]
        sups, sampled = _shells(values, K)
        slope = _fit(sups, K)
        vanishing = all(s == 0 for s in sups[K // 2:]) or (slope is not None and slope < -SLOPE_MARGIN)
        verdicts = [axis.classification for axis in axes]
        if vanishing and all(v == const.CONVERGENT for v in verdicts):
            classification = const.CONVERGENT
        elif not vanishing or const.DIVERGENT in verdicts:
            classification = const.DIVERGENT
        else:
            classification = const.INCONCLUSIVE
        lambdas = [2.0 ** k for k in range(K + 1)]
        partial = [max(axis.partial_sums[k] for axis in axes) for k in range(K + 1)]
        report = DecayReport(const.LONG, list(zip(lambdas, sups)), partial, slope, classification,
                             sampled or any(axis.sampled for axis in axes), axes, vanishing)
    else:
        raise ValueError("unknown decay mode: {0}".format(mode))
    if report.sampled:
        logger.warning("decay check used sampled shell suprema")
    logger.debug("decay check (%s, K=%d): %s", mode, K, report.classification)
    return report


def _table_profile(tables):
    merged = {}
    for table in tables:
        for (cell, _), value in table.items():
            merged[cell] = max(merged.get(cell, 0.0), abs(value))
    return TableProfile(merged)


def _envelope_profile(envelope):
    coefficients = envelope.coefficients or (1.0,)
    return PowerLawProfile(abs(envelope.amplitude) * max(abs(c) for c in coefficients), envelope.exponent)


class _TelescopedProfile(object):
    """power law bound on r_l whose axis differences are evaluated along lattice paths"""

    def __init__(self, envelope, differences, d):
        self.bound = _envelope_profile(envelope)
        self.differences = differences
        self.d = d

    def shell_sup(self, k):
        return self.bound.shell_sup(k)

    def difference(self, axis):
        return FunctionProfile(self.differences[axis], self.d)


def check_hypotheses(g, p, K=DEFAULT_DECAY_LEVELS, paths=None, logger=None):
    """checks the decay hypotheses of a perturbation

        Returns:
            dict: ``measure`` (short-range measure perturbation on vertices and edges),
            ``potential_short`` (short-range R_s) and ``potential_long`` (R_l vanishing with
            short-range axis differences), each a :py:class:`DecayReport`. The axis differences of
            r_l are measured along the paths beta_k of ``paths`` (computed when omitted).

    """
    p.check(g)
    measure = [_table_profile([p.vertex_measure_table, p.edge_measure_table])]
    for envelope in (p.vertex_measure_envelope, p.edge_measure_envelope):
        if envelope is not None:
            measure.append(_envelope_profile(envelope))
    short = [_table_profile([p.potential_short_table])]
    if p.potential_short_envelope is not None:
        short.append(_envelope_profile(p.potential_short_envelope))
    if p.potential_long_envelope is not None:
        long_profile = _TelescopedProfile(p.potential_long_envelope, long_range_differences(g, p, paths), g.d)
    else:
        long_profile = TableProfile({})
    return {
        "measure": check_decay(SumProfile(*measure), const.SHORT, K, logger=logger),
        "potential_short": check_decay(SumProfile(*short), const.SHORT, K, logger=logger),
        "potential_long": check_decay(long_profile, const.LONG, K, d=g.d, logger=logger),
    }
