"""Time evolution, spectral filters and finite-time wave-operator probes.

All vectors are amplitudes in the orthonormal basis of the operator they belong to
(see :py:mod:`crystalspectra.realspace`).
"""
import json
import math
import logging
from collections import namedtuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.special import jv

from .consts import CrystalConventions as const
from .exceptions import ConfigurationError, DimensionLimitError
from .realspace import DENSE_LIMIT, RealSpaceOperator, build_h, build_h0, j_factors
from .utils import check_interval

_log = logging.getLogger(__name__)
_log.addHandler(logging.NullHandler())

DENSE_EXP_LIMIT = 2048
CHEBYSHEV_SAFETY = 40
FILTER_DEGREE = 1024
ESCAPE_CELLS = 5
ESCAPE_WARNING = 1e-3
ENDPOINT_SLACK = 1e-12


class EvolutionState(namedtuple("EvolutionState", ["operator", "vector", "time", "initial_norm"])):
    """amplitude vector of exp(-i H t) psi together with the time and the initial norm"""

    def advance(self, dt, method=const.CHEBYSHEV, logger=None):
        """the state after a further time step ``dt``"""
        return EvolutionState(self.operator, evolve(self.operator, self.vector, dt, method, logger),
                              self.time + dt, self.initial_norm)

    @property
    def norm_drift(self):
        return abs(np.linalg.norm(self.vector) - self.initial_norm) / self.initial_norm


def _matrix(op):
    if isinstance(op, RealSpaceOperator):
        return op.matrix
    if sp.issparse(op):
        return op.tocsr()
    return np.asarray(op)


def _gershgorin(matrix):
    if sp.issparse(matrix):
        diagonal = matrix.diagonal().real
        rows = np.asarray(abs(matrix).sum(axis=1)).ravel()
    else:
        diagonal = np.diag(matrix).real
        rows = np.abs(matrix).sum(axis=1)
    radius = rows - np.abs(diagonal)
    return float(np.min(diagonal - radius)), float(np.max(diagonal + radius))


def chebyshev_degree(radius, t):
    """number of Chebyshev terms used for exp(-i H t) with spectral half-width ``radius``"""
    return int(math.ceil(1.1 * radius * abs(t))) + CHEBYSHEV_SAFETY


def evolve(op, psi, t, method=const.CHEBYSHEV, logger=None):
    """applies exp(-i op t) to a vector

        Args:
            op (RealSpaceOperator, numpy.ndarray or scipy.sparse matrix): Hermitian operator
            psi (numpy.ndarray): nonzero vector
            t (float): time (negative times run backwards)
            method (str, optional): ``chebyshev`` (Bessel expansion over the Gershgorin
                interval) or ``dense-exp`` (matrix exponential)
            logger (logging.Logger, optional): logger

        Returns:
            numpy.ndarray: the evolved vector

        Raises:
            ValueError: ``psi`` vanishes or the method is unknown
            DimensionLimitError: ``dense-exp`` requested above 2048 dimensions

        Example:
           >>> import numpy as np
           >>> from crystalspectra.scatter import evolve
           >>> out = evolve(np.diag([1.0, 2.0]), np.array([1.0, 1.0]), np.pi)
           >>> np.allclose(out, [-1.0, 1.0])
           True

    """
    logger = logger or _log
    psi = np.asarray(psi, dtype=complex)
    if not np.any(psi):
        raise ValueError("cannot evolve the zero vector")
    if t == 0:
        return psi.copy()
    matrix = _matrix(op)
    dimension = matrix.shape[0]

    if method == const.DENSE_EXP:
        if dimension > DENSE_EXP_LIMIT:
            raise DimensionLimitError("dense-exp refused at dimension {0} (limit {1})".format(
                dimension, DENSE_EXP_LIMIT))
        dense = matrix.toarray() if sp.issparse(matrix) else matrix
        return expm(-1j * t * dense).dot(psi)
    if method != const.CHEBYSHEV:
        raise ValueError("unknown propagation method: {0}".format(method))

    low, high = _gershgorin(matrix)
    center, radius = 0.5 * (high + low), 0.5 * (high - low)
    phase = np.exp(-1j * center * t)
    if radius == 0:
        return phase * psi

    degree = chebyshev_degree(radius, t)
    logger.debug("chebyshev propagation: dimension=%d, t=%g, degree=%d", dimension, t, degree)
    bessel = jv(np.arange(degree + 1), radius * t)

    def scaled(vector):
        return (matrix.dot(vector) - center * vector) / radius

    previous = psi
    current = scaled(psi)
    out = bessel[0] * previous + 2.0 * (-1j) * bessel[1] * current
    factor = -1j
    for k in range(2, degree + 1):
        factor *= -1j
        following = 2.0 * scaled(current) - previous
        out = out + 2.0 * factor * bessel[k] * following
        previous, current = current, following
    return phase * out


def _jackson(degree):
    k = np.arange(degree + 1)
    q = np.pi / (degree + 2)
    return ((degree + 2 - k) * np.cos(k * q) + np.sin(k * q) / np.tan(q)) / (degree + 2)


def spectral_filter(op, interval, psi, degree=FILTER_DEGREE):
    """spectral projection E_op(I) psi onto a closed interval

        Up to dimension 4096 the projection is exact (dense eigendecomposition); above it the
        indicator of I is replaced by a Jackson-damped Chebyshev expansion of ``degree`` terms.

        Args:
            op (RealSpaceOperator, numpy.ndarray or scipy.sparse matrix): Hermitian operator
            interval (tuple): closed interval (a, b)
            psi (numpy.ndarray): vector

        Returns:
            numpy.ndarray: the filtered vector

    """
    a, b = check_interval(interval)
    psi = np.asarray(psi, dtype=complex)
    matrix = _matrix(op)
    if matrix.shape[0] <= DENSE_LIMIT:
        if isinstance(op, RealSpaceOperator):
            values, vectors = op.eigh()
        else:
            values, vectors = np.linalg.eigh(matrix.toarray() if sp.issparse(matrix) else matrix)
        slack = ENDPOINT_SLACK * max(1.0, abs(a), abs(b))
        keep = (values >= a - slack) & (values <= b + slack)
        block = vectors[:, keep]
        return block.dot(block.conj().T.dot(psi))

    low, high = _gershgorin(matrix)
    center, radius = 0.5 * (high + low), 0.5 * (high - low)
    if radius == 0:
        return psi.copy() if a <= center <= b else np.zeros_like(psi)
    lo = np.arccos(np.clip((a - center) / radius, -1.0, 1.0))
    hi = np.arccos(np.clip((b - center) / radius, -1.0, 1.0))
    k = np.arange(1, degree + 1)
    coefficients = np.concatenate([[(lo - hi) / np.pi], 2.0 * (np.sin(k * lo) - np.sin(k * hi)) / (k * np.pi)])
    coefficients *= _jackson(degree)

    previous = psi
    current = (matrix.dot(psi) - center * psi) / radius
    out = coefficients[0] * previous + coefficients[1] * current
    for c in coefficients[2:]:
        following = 2.0 * (matrix.dot(current) - center * current) / radius - previous
        out = out + c * following
        previous, current = current, following
    return out


def gaussian_packet(op, center, width, xi0, vertex=0):
    """normalised Gaussian wave packet on one vertex of every cell

        psi(mu, vertex) = exp(-|mu - center|^2 / (4 width^2)) exp(2 pi i xi0 . mu)

        Args:
            op (RealSpaceOperator): operator fixing the window and the site enumeration
            center (sequence of float): packet center in cell coordinates
            width (float): spatial width
            xi0 (sequence of float): carrier quasi-momentum
            vertex (int, optional): vertex carrying the packet

        Returns:
            numpy.ndarray: unit vector

    """
    d = op.graph.d
    cells = np.asarray(op.cells, dtype=float).reshape(-1, d)
    center = np.asarray(center, dtype=float).reshape(d)
    xi0 = np.asarray(xi0, dtype=float).reshape(d)
    envelope = np.exp(-np.sum((cells - center) ** 2, axis=1) / (4.0 * width ** 2))
    psi = np.zeros(op.dimension, dtype=complex)
    psi[np.arange(cells.shape[0]) * op.graph.n + vertex] = envelope * np.exp(2j * np.pi * cells.dot(xi0))
    return psi / np.linalg.norm(psi)


def _boundary_mask(op, cells_deep):
    """sites of a truncated window lying within ``cells_deep`` cells of its boundary"""
    if op.box.mode != const.TRUNCATED:
        return np.zeros(op.dimension, dtype=bool)
    cells = np.asarray(op.cells).reshape(-1, op.graph.d)
    near = np.any(np.abs(cells) > op.box.size - cells_deep, axis=1)
    return np.repeat(near, op.graph.n)


class ProbeRecord(namedtuple("ProbeRecord", ["times", "cauchy_increments", "isometry_gaps",
                                             "escape_mass", "backward"])):
    """
    Finite-time evidence for the wave operators.

    ``backward`` holds the same series for the mirrored times -t.
    """

    def to_dict(self):
        return {
            "times": list(self.times),
            "cauchy_increments": list(self.cauchy_increments),
            "isometry_gaps": list(self.isometry_gaps),
            "escape_mass": list(self.escape_mass),
            "backward": dict(self.backward),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def wave_operator_probe(g, p, interval, psi, times, box, method=const.CHEBYSHEV,
                        escape_cells=ESCAPE_CELLS, logger=None):
    """finite-time approximants of the wave operators W(H, H0; J*, I)

        For every t in ``times`` (and for -t) computes
        w(t) = exp(i H t) J* exp(-i H0 t) E_H0(I) psi on the window and reports the Cauchy
        increments |w(t_k+1) - w(t_k)|, the isometry gaps | |w(t)| - |E_H0(I) psi| | and the
        relative mass of exp(-i H0 t) E_H0(I) psi within ``escape_cells`` cells of the
        window boundary (zero on a torus).

        Args:
            g (:py:class:`QuotientGraph`): crystal
            p (PerturbationSpec): short-range perturbation
            interval (tuple): energy interval I
            psi (numpy.ndarray): initial vector in the orthonormal basis of H0 on ``box``
            times (list of float): increasing positive times
            box (Box): window
            method (str, optional): propagation method

        Returns:
            ProbeRecord: the diagnostics

        Raises:
            ConfigurationError: ``p`` has a long-range part or ``times`` is not increasing

    """
    logger = logger or _log
    if p.has_long_range:
        raise ConfigurationError("wave operator probe requires a perturbation without long-range part")
    times = [float(t) for t in times]
    if not times or any(t1 <= t0 for t0, t1 in zip(times, times[1:])) or times[0] < 0:
        raise ConfigurationError("times must be nonnegative and strictly increasing: {0}".format(times))

    h0 = build_h0(g, box)
    h = build_h(g, p, box)
    phi = spectral_filter(h0, interval, psi)
    norm = float(np.linalg.norm(phi))

    # amplitudes: divide by m0^(1/2), apply J* = (m0/m)^(1/2), multiply by m^(1/2)
    factors = j_factors(g, p, box)
    jstar = np.sqrt(h.weights) / factors / np.sqrt(h0.reference_weights)
    identical = (h.matrix != h0.matrix).nnz == 0 and np.all(factors == 1.0)
    boundary = _boundary_mask(h0, escape_cells)

    def series(sign):
        ws, escapes = [], []
        for t in times:
            if not np.any(phi):
                ws.append(phi.copy())
                escapes.append(0.0)
                continue
            free = evolve(h0, phi, sign * t, method, logger)
            mass = float(np.sum(np.abs(free[boundary]) ** 2)) / norm ** 2 if boundary.any() else 0.0
            escapes.append(mass)
            ws.append(phi.copy() if identical else evolve(h, jstar * free, -sign * t, method, logger))
        increments = [float(np.linalg.norm(w1 - w0)) for w0, w1 in zip(ws, ws[1:])]
        gaps = [abs(float(np.linalg.norm(w)) - norm) for w in ws]
        return increments, gaps, escapes

    forward = series(1.0)
    backward = series(-1.0)
    worst = max(forward[2] + backward[2])
    if worst > ESCAPE_WARNING:
        logger.warning("window escape mass %.3e exceeds %.0e; boundary effects dominate", worst, ESCAPE_WARNING)
    logger.info("wave operator probe on %s: increments %s", box, forward[0])
    return ProbeRecord(tuple(times), forward[0], forward[1], forward[2],
                       {"times": [-t for t in times], "cauchy_increments": backward[0],
                        "isometry_gaps": backward[1], "escape_mass": backward[2]})
