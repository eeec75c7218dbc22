"""Periodic and perturbed Schroedinger operators on finite windows of the crystal.

Sites are the pairs (cell mu, vertex j), enumerated cell by cell in lexicographic order
of mu with the vertex index running fastest. Matrices are stored in the orthonormal basis
obtained by scaling function values with measure^(1/2), so they are real symmetric.
"""
import json
import logging
from collections import namedtuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh, ArpackNoConvergence

from .consts import CrystalConventions as const
from .crystal import PerturbationSpec
from .exceptions import ConfigurationError, MeasureError, NumericalError, ProvenanceError
from .floquet import assemble_fibers, eigvalsh_stack, grid_points
from .utils import parallel_map, check_interval

_log = logging.getLogger(__name__)
_log.addHandler(logging.NullHandler())

DENSE_LIMIT = 4096
ORACLE_TOL = 1e-9


class Box(namedtuple("Box", ["mode", "size"])):
    """
    Finite window of the crystal.

    ``torus:N`` keeps the cells {0..N-1}^d and wraps edge indices mod N; ``truncated:L``
    keeps the cells with |mu|_inf <= L and drops the edges leaving the window.
    """

    @classmethod
    def torus(cls, N):
        if isinstance(N, bool) or not isinstance(N, int) or N < 1:
            raise ConfigurationError("torus size must be a positive integer, got {0!r}".format(N))
        return cls(const.TORUS, N)

    @classmethod
    def truncated(cls, L):
        if isinstance(L, bool) or not isinstance(L, int) or L < 0:
            raise ConfigurationError("truncation radius must be a non-negative integer, got {0!r}".format(L))
        return cls(const.TRUNCATED, L)

    @classmethod
    def parse(cls, text):
        """parses ``torus:N`` or ``truncated:L``

        Raises:
            ConfigurationError: malformed box
        """
        mode, _, size = str(text).partition(":")
        try:
            size = int(size)
        except ValueError:
            raise ConfigurationError("box must be torus:N or truncated:L, got {0!r}".format(text))
        if mode == const.TORUS:
            return cls.torus(size)
        if mode == const.TRUNCATED:
            return cls.truncated(size)
        raise ConfigurationError("box must be torus:N or truncated:L, got {0!r}".format(text))

    @property
    def side(self):
        return self.size if self.mode == const.TORUS else 2 * self.size + 1

    @property
    def offset(self):
        return 0 if self.mode == const.TORUS else -self.size

    def __str__(self):
        return "{0}:{1}".format(self.mode, self.size)


def cells(box, d):
    """cells of the window in lexicographic order, as a ``(count, d)`` int array"""
    axes = np.meshgrid(*([np.arange(box.side) + box.offset] * d), indexing="ij")
    return np.stack([a.ravel() for a in axes], axis=-1).astype(int)


def _positions(box, mu):
    """window positions of cells (rows of mu) and the mask of cells inside the window"""
    mu = np.atleast_2d(np.asarray(mu, dtype=int))
    if box.mode == const.TORUS:
        shifted = np.mod(mu, box.side)
        inside = np.ones(mu.shape[0], dtype=bool)
    else:
        shifted = mu + box.size
        inside = np.all((shifted >= 0) & (shifted < box.side), axis=1)
        shifted = np.clip(shifted, 0, box.side - 1)
    positions = np.zeros(mu.shape[0], dtype=int)
    for k in range(mu.shape[1]):
        positions = positions * box.side + shifted[:, k]
    return positions, inside


def _physical(box, mu):
    """representative in Z^d where decaying perturbations are evaluated (centred on the torus)"""
    if box.mode == const.TORUS:
        half = box.side // 2
        return np.mod(mu + half, box.side) - half
    return mu


def _envelope(envelope, mu, k):
    norms = np.sqrt(np.sum(np.asarray(mu, dtype=float) ** 2, axis=1))
    coefficient = envelope.coefficients[k] if envelope.coefficients else 1.0
    return envelope.amplitude * coefficient * (1.0 + norms) ** (-envelope.exponent)


WindowData = namedtuple("WindowData", ["cells", "vertex_measure", "edge_measure", "potential"])


def _window_data(g, p, box):
    """vertex measures (cells, n), edge-instance measures (cells, E) and potentials (cells, n)"""
    mu = cells(box, g.d)
    count = mu.shape[0]
    arr = g.arrays()
    physical = _physical(box, mu)
    vertex = np.tile(arr["vertex_m0"], (count, 1))
    potential = np.tile(arr["r0"], (count, 1))
    edge = np.tile(arr["edge_m0"], (count, 1))

    for j in range(g.n):
        if p.vertex_measure_envelope is not None:
            vertex[:, j] += _envelope(p.vertex_measure_envelope, physical, j)
        if p.potential_short_envelope is not None:
            potential[:, j] += _envelope(p.potential_short_envelope, physical, j)
        if p.potential_long_envelope is not None:
            potential[:, j] += _envelope(p.potential_long_envelope, physical, j)
    for (cell, j), value in sorted(p.vertex_measure_table.items()):
        pos, inside = _positions(box, [cell])
        if inside[0]:
            vertex[pos[0], j] += value
    for (cell, j), value in sorted(p.potential_short_table.items()):
        pos, inside = _positions(box, [cell])
        if inside[0]:
            potential[pos[0], j] += value

    edges = g.oriented_edges
    if p.edge_measure_envelope is not None:
        for e, oriented in enumerate(edges):
            if oriented.pair is None:
                continue
            representative = mu + arr["index"][e] if oriented.reversed else mu
            edge[:, e] += _envelope(p.edge_measure_envelope, _physical(box, representative), oriented.pair)
    for (cell, pair), value in sorted(p.edge_measure_table.items()):
        for e, oriented in enumerate(edges):
            if oriented.pair != pair:
                continue
            origin = np.asarray(cell) - arr["index"][e] if oriented.reversed else np.asarray(cell)
            pos, inside = _positions(box, [origin])
            if inside[0]:
                edge[pos[0], e] += value
    return WindowData(mu, vertex, edge, potential)


def _stencil(g, data, box):
    """sparse matrix of -Delta(X, m) + R on the window in the orthonormal basis"""
    arr = g.arrays()
    count = data.cells.shape[0]
    n = g.n
    size = count * n
    vertex = data.vertex_measure
    degree = np.zeros((count, n))
    rows, cols, values = [np.zeros(0, dtype=int)], [np.zeros(0, dtype=int)], [np.zeros(0)]
    for e in range(len(g.oriented_edges)):
        o, t = arr["origin"][e], arr["terminus"][e]
        degree[:, o] += data.edge_measure[:, e]
        target, inside = _positions(box, data.cells + arr["index"][e])
        source = np.flatnonzero(inside)
        target = target[inside]
        weight = -data.edge_measure[source, e] / np.sqrt(vertex[source, o] * vertex[target, t])
        rows.append(source * n + o)
        cols.append(target * n + t)
        values.append(weight)
    diagonal = (degree / vertex + data.potential).ravel()
    off = sp.coo_matrix((np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size))
    return (off.tocsr() + sp.diags(diagonal, format="csr")).tocsr()


class RealSpaceOperator(object):
    """
    A periodic or perturbed Schroedinger operator materialized on a window.

    Attributes:
        graph (QuotientGraph): crystal the operator was built from
        box (Box): window
        perturbation (PerturbationSpec): perturbation, None for H0
        matrix (scipy.sparse.csr_matrix): real symmetric matrix in the orthonormal basis
        weights (numpy.ndarray): measure of each site used for the inner product
        reference_weights (numpy.ndarray): periodic measure m0 of each site
        uses_J (bool): the matrix is J H J* acting in l2(X, m0)

    """

    def __init__(self, graph, box, matrix, weights, reference_weights, perturbation=None, uses_J=False):
        self.graph = graph
        self.box = box
        self.matrix = matrix
        self.weights = weights
        self.reference_weights = reference_weights
        self.perturbation = perturbation
        self.uses_J = uses_J
        self._dense = None
        self._eigh = None

    @property
    def dimension(self):
        return self.matrix.shape[0]

    @property
    def is_perturbed(self):
        return self.perturbation is not None

    @property
    def cells(self):
        return cells(self.box, self.graph.d)

    def index(self, mu, j):
        """linear index of the site (mu, j)

        Raises:
            KeyError: the cell is outside a truncated window
        """
        pos, inside = _positions(self.box, [tuple(mu)])
        if not inside[0]:
            raise KeyError("cell {0} outside the window {1}".format(list(mu), self.box))
        return int(pos[0]) * self.graph.n + j

    def site(self, k):
        """inverse of :py:meth:`index`: returns ``(mu, j)``"""
        pos, j = divmod(int(k), self.graph.n)
        mu = []
        for _ in range(self.graph.d):
            pos, rest = divmod(pos, self.box.side)
            mu.append(rest + self.box.offset)
        return tuple(reversed(mu)), j

    def to_dense(self):
        if self._dense is None:
            self._dense = self.matrix.toarray()
        return self._dense

    def eigh(self):
        """cached dense eigendecomposition"""
        if self._eigh is None:
            try:
                self._eigh = np.linalg.eigh(self.to_dense())
            except np.linalg.LinAlgError as e:
                raise NumericalError("eigensolver did not converge: {0}".format(e))
        return self._eigh

    def gershgorin_bounds(self):
        """interval containing the spectrum"""
        diagonal = self.matrix.diagonal()
        radius = np.asarray(abs(self.matrix).sum(axis=1)).ravel() - np.abs(diagonal)
        return float(np.min(diagonal - radius)), float(np.max(diagonal + radius))

    def norm_bound(self):
        """upper bound of the operator norm (largest absolute row sum)"""
        return float(np.max(np.asarray(abs(self.matrix).sum(axis=1)).ravel()))

    def hermiticity_defect(self):
        return float(abs(self.matrix - self.matrix.getH()).max()) if self.matrix.nnz else 0.0

    def __repr__(self):
        return "RealSpaceOperator(box={0}, dimension={1}, perturbed={2}, uses_J={3})".format(
            self.box, self.dimension, self.is_perturbed, self.uses_J)


def _reference_weights(g, count):
    return np.tile(g.arrays()["vertex_m0"], count)


def build_h0(g, box):
    """periodic operator H0 = -Delta(X, m0) + R0 on a window

        Args:
            g (:py:class:`QuotientGraph`): crystal
            box (Box): ``Box.torus(N)`` or ``Box.truncated(L)``

        Returns:
            RealSpaceOperator: the operator

        Example:
           >>> from crystalspectra.crystal import builtin
           >>> from crystalspectra.realspace import Box, build_h0
           >>> build_h0(builtin("zd:1"), Box.truncated(1)).to_dense()
           array([[ 2., -1.,  0.],
                  [-1.,  2., -1.],
                  [ 0., -1.,  2.]])

    """
    data = _window_data(g, PerturbationSpec(), box)
    weights = _reference_weights(g, data.cells.shape[0])
    return RealSpaceOperator(g, box, _stencil(g, data, box), weights, weights.copy())


def build_h(g, p, box):
    """perturbed operator H = -Delta(X, m) + R on a window

        Args:
            g (:py:class:`QuotientGraph`): crystal
            p (PerturbationSpec): perturbation
            box (Box): window

        Returns:
            RealSpaceOperator: the operator in the orthonormal basis of l2(X, m)

        Raises:
            MeasureError: a perturbed measure on the window is not strictly positive

    """
    data = _window_data(g, p, box)
    if np.any(data.vertex_measure <= 0):
        k = int(np.flatnonzero(data.vertex_measure.ravel() <= 0)[0])
        raise MeasureError("nonpositive perturbed vertex measure at cell {0}, vertex {1}".format(
            list(data.cells[k // g.n]), g.vertices[k % g.n].id))
    if np.any(data.edge_measure <= 0):
        cell = np.flatnonzero(np.any(data.edge_measure <= 0, axis=1))[0]
        raise MeasureError("nonpositive perturbed edge measure at cell {0}".format(list(data.cells[cell])))
    return RealSpaceOperator(g, box, _stencil(g, data, box), data.vertex_measure.ravel(),
                             _reference_weights(g, data.cells.shape[0]), perturbation=p)


def j_factors(g, p, box):
    """per-site factors (m / m0)^(1/2) of the unitary J: l2(X, m) -> l2(X, m0)"""
    data = _window_data(g, p, box)
    return np.sqrt(data.vertex_measure.ravel() / _reference_weights(g, data.cells.shape[0]))


def conjugate_J(hop, g, p):
    """the matrix of J H J* acting in l2(X, m0)

        In function values J is multiplication by (m / m0)^(1/2), so J H J* has off-diagonal
        entries -m(e) / (m(x) m(t))^(1/2) * (m0(t) / m0(x))^(1/2) and diagonal deg_m(x) + R(x).
        J is the identity between the orthonormal bases of l2(X, m) and l2(X, m0), hence the
        returned matrix is the matrix of ``hop``; only the weights change to m0.

        Args:
            hop (RealSpaceOperator): operator returned by ``build_h(g, p, box)``
            g (:py:class:`QuotientGraph`): crystal
            p (PerturbationSpec): perturbation

        Returns:
            RealSpaceOperator: the conjugated operator, ``uses_J`` set

        Raises:
            ProvenanceError: ``hop`` was not built from ``g`` and ``p``

    """
    built_with = hop.perturbation if hop.perturbation is not None else PerturbationSpec()
    if hop.uses_J or hop.graph != g or built_with != p:
        raise ProvenanceError("operator was not built from this crystal and perturbation")
    data = _window_data(g, p, hop.box)
    weights = _reference_weights(g, data.cells.shape[0])
    return RealSpaceOperator(g, hop.box, _stencil(g, data, hop.box), weights, weights, perturbation=p, uses_J=True)


def spectrum(op, k=None, sigma=None, dense_limit=DENSE_LIMIT):
    """sorted eigenvalues of a real-space operator

        Args:
            op (RealSpaceOperator): operator
            k (int, optional): number of eigenvalues computed by the iterative solver
                above ``dense_limit`` (default 6)
            sigma (float, optional): shift for interior eigenvalues (iterative solver only)
            dense_limit (int, optional): largest dimension solved densely

        Returns:
            numpy.ndarray: eigenvalues, ascending

        Raises:
            NumericalError: the solver did not converge

    """
    if op.dimension <= dense_limit:
        try:
            return np.linalg.eigvalsh(op.to_dense())
        except np.linalg.LinAlgError as e:
            raise NumericalError("eigensolver did not converge: {0}".format(e))
    k = k or 6
    try:
        if sigma is None:
            values = eigsh(op.matrix, k=k, which="SA", return_eigenvectors=False)
        else:
            values = eigsh(op.matrix, k=k, sigma=sigma, return_eigenvectors=False)
    except ArpackNoConvergence as e:
        raise NumericalError("iterative eigensolver did not converge: {0}".format(e))
    return np.sort(values)


class OracleRecord(namedtuple("OracleRecord", ["N", "size", "deviation", "passed"])):
    """comparison of the torus spectrum with the union of fiber spectra"""

    def summary(self):
        return "N={0} size={1} deviation={2:.3e} {3}".format(self.N, self.size, self.deviation,
                                                              "PASS" if self.passed else "FAIL")

    def to_json(self):
        return json.dumps({"N": self.N, "size": self.size, "deviation": self.deviation,
                           "passed": self.passed}, indent=2)


def torus_oracle(g, N, tol=ORACLE_TOL, logger=None):
    """compares the spectrum of H0 on the torus with the fiber eigenvalues at xi = mu / N

        Args:
            g (:py:class:`QuotientGraph`): crystal
            N (int): torus size
            tol (float, optional): largest deviation accepted

        Returns:
            OracleRecord: maximal deviation after sorted matching and the verdict

    """
    logger = logger or _log
    torus = np.sort(spectrum(build_h0(g, Box.torus(N)), dense_limit=max(DENSE_LIMIT, N ** g.d * g.n)))
    xis = grid_points(N, g.d)
    fibers = np.sort(eigvalsh_stack(assemble_fibers(g, xis), xis).ravel())
    deviation = float(np.max(np.abs(torus - fibers)))
    record = OracleRecord(N, int(torus.size), deviation, deviation <= tol)
    logger.info("torus oracle: %s", record.summary())
    return record


class GapScan(namedtuple("GapScan", ["interval", "sizes", "counts"])):
    """eigenvalue counts in an interval for increasing truncation radii"""

    def to_json(self):
        return json.dumps({"interval": list(self.interval), "sizes": list(self.sizes),
                           "counts": list(self.counts)}, indent=2)


def gap_count_scan(g, p, interval, sizes, workers=None, logger=None):
    """counts the eigenvalues of H on truncated windows inside an interval

        Truncation edge states are counted as they come.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            p (PerturbationSpec): perturbation
            interval (tuple): closed interval (a, b)
            sizes (list of int): truncation radii L

        Returns:
            GapScan: one count per size

    """
    logger = logger or _log
    a, b = check_interval(interval)

    def count(L):
        values = spectrum(build_h(g, p, Box.truncated(L)), dense_limit=max(DENSE_LIMIT, (2 * L + 1) ** g.d * g.n))
        return int(np.count_nonzero((values >= a) & (values <= b)))

    counts = parallel_map(count, list(sizes), workers)
    logger.debug("gap count scan on [%g, %g]: %s", a, b, counts)
    return GapScan((a, b), tuple(sizes), tuple(counts))


def hypothesis_norms(g, p, box):
    """sup norm of R - R0 on the window"""
    data = _window_data(g, p, box)
    return float(np.max(np.abs(data.potential - g.arrays()["r0"])))
