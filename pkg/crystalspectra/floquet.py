"""Floquet-Bloch fibers h0(xi) of periodic Schroedinger operators on topological crystals.

The fiber at quasi-momentum xi is the n x n Hermitian matrix

    h0(xi)_jl = - sum_{e = (x_j, x_l)} m0(e) / (m0(x_j) m0(x_l))^(1/2) exp(2 pi i xi . eta(e))
                + (deg(x_j) + R0(x_j)) delta_jl

written in the basis of C^n fixed by the vertex order of the quotient graph. Every
oriented loop edge contributes once to the phase sum.
"""
import logging
from collections import namedtuple

import numpy as np

from .exceptions import NumericalError
from .crystal import degrees

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


FiberMatrix = namedtuple("FiberMatrix", ["xi", "matrix"])


def reduce_xi(xi, d):
    """canonical representative of a torus point in [0,1)^d

        Args:
            xi (float or sequence of float): torus point
            d (int): dimension

        Returns:
            numpy.ndarray: ``d`` reals in [0, 1)

        Raises:
            ValueError: wrong number of components

        Example:
           >>> from crystalspectra.floquet import reduce_xi
           >>> reduce_xi([1.25, -0.25], 2)
           array([0.25, 0.75])

    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (d,):
        raise ValueError("torus point must have {0} components, got {1}".format(d, xi.shape))
    reduced = np.mod(xi, 1.0)
    reduced[reduced >= 1.0] = 0.0
    return reduced


def _scatter(g):
    """(E, n*n) matrix sending each oriented edge to its (origin, terminus) slot"""
    arr = g.arrays()
    n = g.n
    scatter = np.zeros((len(g.oriented_edges), n * n))
    scatter[np.arange(len(g.oriented_edges)), arr["origin"] * n + arr["terminus"]] = 1.0
    return scatter


def _hop_weights(g):
    arr = g.arrays()
    vm = arr["vertex_m0"]
    return arr["edge_m0"] / np.sqrt(vm[arr["origin"]] * vm[arr["terminus"]])


def assemble_fibers(g, xis):
    """h0 at a stack of torus points

        Args:
            g (:py:class:`QuotientGraph`): crystal
            xis (numpy.ndarray): ``(m, d)`` array of reduced torus points

        Returns:
            numpy.ndarray: ``(m, n, n)`` complex array of Hermitian fibers

    """
    xis = np.asarray(xis, dtype=float).reshape(-1, g.d)
    n = g.n
    arr = g.arrays()
    phases = np.exp(2j * np.pi * xis.dot(arr["index"].T))
    hops = -(phases * _hop_weights(g)).dot(_scatter(g)).reshape(-1, n, n)
    hops[:, np.arange(n), np.arange(n)] += degrees(g) + arr["r0"]
    return 0.5 * (hops + np.conj(np.swapaxes(hops, 1, 2)))


def assemble_fiber(g, xi):
    """assembles the fiber matrix h0(xi)

        Args:
            g (:py:class:`QuotientGraph`): crystal
            xi (float or sequence of float): torus point, reduced mod 1 before evaluation

        Returns:
            FiberMatrix: the reduced torus point and the Hermitian n x n matrix

        Example:
           >>> from crystalspectra.crystal import builtin
           >>> from crystalspectra.floquet import assemble_fiber
           >>> assemble_fiber(builtin("zd:1"), 0.5).matrix.real
           array([[4.]])

    """
    xi = reduce_xi(xi, g.d)
    return FiberMatrix(xi, assemble_fibers(g, xi[np.newaxis, :])[0])


def fiber_derivatives(g, xis):
    """d/dxi_k h0 at a stack of torus points, shape ``(m, d, n, n)``"""
    xis = np.asarray(xis, dtype=float).reshape(-1, g.d)
    n = g.n
    arr = g.arrays()
    phases = np.exp(2j * np.pi * xis.dot(arr["index"].T)) * _hop_weights(g)
    scatter = _scatter(g)
    out = np.empty((xis.shape[0], g.d, n, n), dtype=complex)
    for k in range(g.d):
        factor = 2j * np.pi * arr["index"][:, k]
        out[:, k] = -(phases * factor).dot(scatter).reshape(-1, n, n)
    return 0.5 * (out + np.conj(np.swapaxes(out, 2, 3)))


def fiber_derivative(g, xi, k):
    """closed-form partial derivative of h0 in direction k

        Off-diagonal terms gain a factor 2 pi i eta(e)_k; the diagonal does not depend on xi.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            xi (float or sequence of float): torus point
            k (int): direction, 0 <= k < d

        Returns:
            numpy.ndarray: Hermitian n x n matrix

        Raises:
            IndexError: invalid direction

    """
    if k < 0 or k >= g.d:
        raise IndexError("direction {0} out of range for d={1}".format(k, g.d))
    xi = reduce_xi(xi, g.d)
    return fiber_derivatives(g, xi[np.newaxis, :])[0, k]


def magnetic_laplacian(g, xi):
    """matrix of the magnetic Laplacian with flux theta(e) = 2 pi xi . eta(e)

        The matrix acts on function values in l2 of the quotient graph with measure m0:
        (Delta f)(x) = sum_e m0(e)/m0(x) (exp(i theta(e)) f(t(e)) - f(x)). With
        ``I = diag(m0^(1/2))`` the fiber satisfies ``h0 = I (-Delta + R0) I^-1``.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            xi (float or sequence of float): torus point

        Returns:
            numpy.ndarray: n x n complex matrix (self-adjoint for the m0 inner product)

    """
    xi = reduce_xi(xi, g.d)
    arr = g.arrays()
    n = g.n
    phases = np.exp(2j * np.pi * arr["index"].dot(xi))
    weights = arr["edge_m0"] / arr["vertex_m0"][arr["origin"]]
    out = np.zeros((n, n), dtype=complex)
    np.add.at(out, (arr["origin"], arr["terminus"]), weights * phases)
    out[np.arange(n), np.arange(n)] -= degrees(g)
    return out


def _solve_stack(solver, matrices, xis):
    try:
        return solver(matrices)
    except np.linalg.LinAlgError as e:
        for pos, matrix in enumerate(matrices):
            try:
                solver(matrix)
            except np.linalg.LinAlgError:
                xi = xis[pos] if xis is not None else None
                raise NumericalError("eigensolver did not converge: {0}".format(e), xi=xi)
        raise NumericalError("eigensolver did not converge: {0}".format(e))


def eigh_stack(matrices, xis=None):
    """batched Hermitian eigendecomposition; NumericalError carries the failing torus point"""
    return _solve_stack(np.linalg.eigh, matrices, xis)


def eigvalsh_stack(matrices, xis=None):
    return _solve_stack(np.linalg.eigvalsh, matrices, xis)


def fiber_eigh(g, xi):
    """sorted eigenvalues and orthonormal eigenvectors (columns) of h0(xi)

        Raises:
            NumericalError: the eigensolver did not converge; carries ``xi``

    """
    fiber = assemble_fiber(g, xi)
    try:
        return np.linalg.eigh(fiber.matrix)
    except np.linalg.LinAlgError as e:
        raise NumericalError("eigensolver did not converge: {0}".format(e), xi=fiber.xi)


def fiber_eigvalsh(g, xi):
    fiber = assemble_fiber(g, xi)
    try:
        return np.linalg.eigvalsh(fiber.matrix)
    except np.linalg.LinAlgError as e:
        raise NumericalError("eigensolver did not converge: {0}".format(e), xi=fiber.xi)


def characteristic_polynomial(g, xi):
    """coefficients of det(lambda - h0(xi)), highest degree first (monic, degree n)

    Diagnostic only; band multiplicities are computed by eigenvalue clustering.
    """
    coefficients = np.poly(assemble_fiber(g, xi).matrix)
    return np.real_if_close(coefficients, tol=1e6)


def spectral_bounds(g):
    """interval containing the spectrum of every fiber: [min R0, max 2 deg + max R0]"""
    r0 = g.arrays()["r0"]
    return float(r0.min()), float(2.0 * degrees(g).max() + r0.max())


def spectral_scale(g):
    """largest |lambda| allowed by :py:func:`spectral_bounds`, used to scale tolerances"""
    low, high = spectral_bounds(g)
    return max(abs(low), abs(high))


def grid_points(N, d):
    """torus points mu / N, mu in {0..N-1}^d, in lexicographic order, shape (N^d, d)"""
    if N < 1:
        raise ValueError("grid resolution must be positive, got {0}".format(N))
    axes = np.meshgrid(*([np.arange(N)] * d), indexing="ij")
    return np.stack([a.ravel() for a in axes], axis=-1).astype(float) / N
