"""Band structure, spectral projections, thresholds and Mourre constants.

Band indices are 0-based and follow the ascending order of the eigenvalues at each
torus point, so band functions are continuous but only piecewise analytic.
"""
import json
import logging
import itertools
from collections import namedtuple

import numpy as np
from scipy.optimize import minimize

from .consts import CrystalConventions as const
from .exceptions import ContourError
from .floquet import (assemble_fiber, assemble_fibers, fiber_derivatives, fiber_eigh, fiber_eigvalsh,
                      eigh_stack, eigvalsh_stack, reduce_xi, spectral_scale, grid_points)
from .utils import parallel_map, chunks, csv_text, check_interval, json_float

_log = logging.getLogger(__name__)
_log.addHandler(logging.NullHandler())

DEFAULT_DEGENERACY_TOL = 1e-8
DEFAULT_MERGE_TOL = 1e-6
DEFAULT_FLAT_TOL = 1e-8
DEFAULT_REFINE_ITERS = 40
DEFAULT_THRESHOLD_GRID = 32
RIESZ_NODES = 256
RIESZ_MARGIN = 1e-4
RIESZ_ACCURACY = 1e-12
ENDPOINT_TOL = 1e-8
HESSIAN_STEP = 1e-5
GRADIENT_TOL = 1e-8
CROSSING_TOL = 1e-5
MAX_CANDIDATES = 64

# merged threshold entries keep the kind listed first
KIND_PRIORITY = (const.FLAT_BAND, const.CROSSING, const.SADDLE, const.BAND_MIN, const.BAND_MAX)


class BandSample(object):
    """
    The sampled Bloch variety on the grid xi = mu / N, mu in {0..N-1}^d.

    Nodes are stored in lexicographic order of mu.

    Attributes:
        grid (int): resolution per axis
        xis (numpy.ndarray): ``(N^d, d)`` torus points
        eigenvalues (numpy.ndarray): ``(N^d, n)`` sorted eigenvalues
        vectors (numpy.ndarray): ``(N^d, n, n)`` eigenvectors (columns) or None
        gradients (numpy.ndarray): ``(N^d, n, d)`` Feynman-Hellmann band gradients or None

    """

    def __init__(self, grid, xis, eigenvalues, vectors=None, gradients=None):
        self.grid = int(grid)
        self.xis = xis
        self.eigenvalues = eigenvalues
        self.vectors = vectors
        self.gradients = gradients

    @property
    def d(self):
        return self.xis.shape[1]

    @property
    def n(self):
        return self.eigenvalues.shape[1]

    @property
    def node_count(self):
        return self.eigenvalues.shape[0]

    def node(self, mu):
        """position of the node mu / N in the sample"""
        pos = 0
        for k in mu:
            pos = pos * self.grid + (int(k) % self.grid)
        return pos

    def grid_values(self):
        """eigenvalues reshaped to ``(N,)*d + (n,)``"""
        return self.eigenvalues.reshape((self.grid,) * self.d + (self.n,))

    def band(self, j):
        return self.grid_values()[..., j]

    def residuals(self, g):
        """largest |h0(xi) v - lambda v| over all stored eigenpairs"""
        if self.vectors is None:
            raise ValueError("sample was taken without eigenvectors")
        fibers = assemble_fibers(g, self.xis)
        lhs = np.matmul(fibers, self.vectors)
        rhs = self.vectors * self.eigenvalues[:, np.newaxis, :]
        return float(np.abs(lhs - rhs).max())

    def to_csv(self):
        """rows ``xi_1..xi_d, lambda_1..lambda_n``, one per node"""
        header = ["xi_{0}".format(k + 1) for k in range(self.d)] + \
                 ["lambda_{0}".format(j + 1) for j in range(self.n)]
        return csv_text(header, np.hstack([self.xis, self.eigenvalues]))


def sample_bands(g, N, want_vectors=False, want_gradients=False, workers=None, logger=None):
    """diagonalizes h0 on the grid xi = mu / N

        Chunks of nodes are diagonalized on a thread pool; the result does not depend
        on the number of workers.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            N (int): grid resolution per axis
            want_vectors (bool, optional): keep the eigenvectors
            want_gradients (bool, optional): keep the Feynman-Hellmann band gradients
            workers (int, optional): worker threads (default from ``CRYSTAL_SPECTRA_THREADS``)
            logger (logging.Logger, optional): logger

        Returns:
            BandSample: the sampled Bloch variety

        Raises:
            ValueError: N < 1
            NumericalError: the eigensolver did not converge; carries the offending xi

        Example:
           >>> from crystalspectra.crystal import builtin
           >>> from crystalspectra.bands import sample_bands
           >>> sample_bands(builtin("zd:1"), 4).eigenvalues.ravel().round(12)
           array([0., 2., 4., 2.])

    """
    logger = logger or _log
    xis = grid_points(N, g.d)
    logger.debug("sampling %d fibers of size %d", xis.shape[0], g.n)

    def work(block):
        fibers = assemble_fibers(g, block)
        if want_vectors or want_gradients:
            values, vectors = eigh_stack(fibers, block)
        else:
            values, vectors = eigvalsh_stack(fibers, block), None
        gradients = None
        if want_gradients:
            derivatives = fiber_derivatives(g, block)
            gradients = np.einsum("maj,mkab,mbj->mjk", vectors.conj(), derivatives, vectors).real
        return values, (vectors if want_vectors else None), gradients

    results = parallel_map(work, chunks(xis), workers)
    eigenvalues = np.concatenate([r[0] for r in results])
    vectors = np.concatenate([r[1] for r in results]) if want_vectors else None
    gradients = np.concatenate([r[2] for r in results]) if want_gradients else None
    return BandSample(N, xis, eigenvalues, vectors, gradients)


class DensityOfStates(namedtuple("DensityOfStates", ["edges", "density"])):
    """histogram of the Bloch variety: bin edges and densities"""

    def to_csv(self):
        rows = [(self.edges[k], self.edges[k + 1], self.density[k]) for k in range(len(self.density))]
        return csv_text(["energy_low", "energy_high", "density"], rows)


def density_of_states(sample, bins=100, value_range=None):
    """histogram of the sampled Bloch variety, normalized to integrate to n

        Args:
            sample (BandSample): sampled bands
            bins (int, optional): number of bins
            value_range (tuple, optional): energy range, defaults to the sampled range

        Returns:
            DensityOfStates: bin edges and densities

    """
    counts, edges = np.histogram(sample.eigenvalues.ravel(), bins=bins, range=value_range)
    density = counts / (sample.node_count * np.diff(edges))
    return DensityOfStates(edges, density)


def multiplicity(g, xi, lam, tol=DEFAULT_DEGENERACY_TOL):
    """number of eigenvalues of h0(xi) within ``tol`` of ``lam``

        Example:
           >>> from crystalspectra.crystal import builtin
           >>> from crystalspectra.bands import multiplicity
           >>> multiplicity(builtin("hexagonal"), (1.0 / 3, 2.0 / 3), 3.0, 1e-8)
           2

    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    return int(np.count_nonzero(np.abs(fiber_eigvalsh(g, xi) - lam) <= tol))


def spectral_projection(g, xi, interval, method=const.EIGEN, nodes=RIESZ_NODES, margin=RIESZ_MARGIN):
    """spectral projection of h0(xi) onto the closed interval I

        The ``riesz`` method integrates the resolvent over the circle centred at the
        midpoint of I with radius |I|/2 + margin, using the trapezoidal rule.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            xi (float or sequence of float): torus point
            interval (tuple): (a, b) with a <= b
            method (str, optional): ``eigen`` or ``riesz``
            nodes (int, optional): quadrature nodes of the riesz method
            margin (float, optional): contour margin of the riesz method

        Returns:
            numpy.ndarray: Hermitian n x n projection

        Raises:
            ContourError: the contour passes too close to an eigenvalue (riesz method)
            ValueError: unknown method

    """
    a, b = check_interval(interval)
    fiber = assemble_fiber(g, xi)
    values, vectors = fiber_eigh(g, fiber.xi)
    if method == const.EIGEN:
        selected = vectors[:, (values >= a) & (values <= b)]
        return selected.dot(selected.conj().T)
    if method != const.RIESZ:
        raise ValueError("unknown projection method: {0}".format(method))

    center = 0.5 * (a + b)
    radius = 0.5 * (b - a) + margin
    for lam in values:
        if abs(lam - a) <= ENDPOINT_TOL or abs(lam - b) <= ENDPOINT_TOL:
            raise ContourError("interval endpoint is an eigenvalue", eigenvalue=float(lam), xi=fiber.xi)
        if a - margin <= lam < a or b < lam <= b + margin:
            raise ContourError("eigenvalue between interval and contour", eigenvalue=float(lam), xi=fiber.xi)
        distance = abs(lam - center)
        ratio = min(distance, radius) / max(distance, radius)
        if ratio ** nodes > RIESZ_ACCURACY:
            raise ContourError("contour too close to the spectrum", eigenvalue=float(lam), xi=fiber.xi)

    n = g.n
    identity = np.eye(n)
    projection = np.zeros((n, n), dtype=complex)
    for angle in 2.0 * np.pi * np.arange(nodes) / nodes:
        step = radius * np.exp(1j * angle)
        projection += step * np.linalg.solve((center + step) * identity - fiber.matrix, identity)
    projection /= nodes
    return 0.5 * (projection + projection.conj().T)


def detect_flat_bands(sample, tol=DEFAULT_FLAT_TOL):
    """energies of bands whose variation over the grid is below ``tol``

        Returns:
            list of float: distinct flat energies, ascending

    """
    energies = []
    for j in range(sample.n):
        band = sample.eigenvalues[:, j]
        if band.max() - band.min() < tol:
            value = float(band.mean())
            if not any(abs(value - e) < tol for e in energies):
                energies.append(value)
    return sorted(energies)


DegenerateGradient = namedtuple("DegenerateGradient", ["cluster", "matrices"])
DegenerateGradient.__doc__ = """Marker returned by :py:func:`band_gradient` on degenerate eigenvalues.

cluster is the tuple of band indices sharing the eigenvalue, matrices the ``(d, c, c)`` array
of <v_a, d_k h0 v_b> on the cluster subspace."""


def _cluster(values, j, tol):
    low = j
    while low > 0 and values[low] - values[low - 1] <= tol:
        low -= 1
    high = j
    while high < len(values) - 1 and values[high + 1] - values[high] <= tol:
        high += 1
    return tuple(range(low, high + 1))


def _clusters(values, tol):
    groups = []
    start = 0
    for pos in range(1, len(values) + 1):
        if pos == len(values) or values[pos] - values[pos - 1] > tol:
            groups.append(tuple(range(start, pos)))
            start = pos
    return groups


def _absolute_tol(g, tol):
    return tol * (1.0 + spectral_scale(g))


def _raw_gradient(g, xi, j):
    """Feynman-Hellmann gradient of the sorted band j, ignoring degeneracy"""
    xi = reduce_xi(xi, g.d)
    values, vectors = fiber_eigh(g, xi)
    derivatives = fiber_derivatives(g, xi[np.newaxis, :])[0]
    v = vectors[:, j]
    return np.einsum("a,kab,b->k", v.conj(), derivatives, v).real


def band_gradient(g, xi, j, degeneracy_tol=DEFAULT_DEGENERACY_TOL):
    """gradient of the band function lambda_j at xi

        Args:
            g (:py:class:`QuotientGraph`): crystal
            xi (float or sequence of float): torus point
            j (int): band index, 0 <= j < n
            degeneracy_tol (float, optional): relative gap below which eigenvalues are clustered

        Returns:
            numpy.ndarray or DegenerateGradient: the real gradient vector of a simple band,
            otherwise the degenerate-cluster marker

        Raises:
            IndexError: invalid band index

    """
    if j < 0 or j >= g.n:
        raise IndexError("band index {0} out of range".format(j))
    xi = reduce_xi(xi, g.d)
    values, vectors = fiber_eigh(g, xi)
    derivatives = fiber_derivatives(g, xi[np.newaxis, :])[0]
    cluster = _cluster(values, j, _absolute_tol(g, degeneracy_tol))
    if len(cluster) == 1:
        v = vectors[:, j]
        return np.einsum("a,kab,b->k", v.conj(), derivatives, v).real
    basis = vectors[:, list(cluster)]
    return DegenerateGradient(cluster, np.einsum("ac,kab,bd->kcd", basis.conj(), derivatives, basis))


def band_hessian(g, xi, j, h=HESSIAN_STEP):
    """central differences of the analytic gradient of band j, symmetrized (d x d)"""
    xi = reduce_xi(xi, g.d)
    hessian = np.empty((g.d, g.d))
    for k in range(g.d):
        step = np.zeros(g.d)
        step[k] = h
        hessian[:, k] = (_raw_gradient(g, xi + step, j) - _raw_gradient(g, xi - step, j)) / (2.0 * h)
    return 0.5 * (hessian + hessian.T)


ThresholdEntry = namedtuple("ThresholdEntry", ["value", "kind", "xi", "bands", "converged", "variance"])


class ThresholdReport(object):
    """
    Estimated threshold set: critical values of the band functions, crossing values and
    flat bands. This is a numerical estimate, never a certificate.

    Attributes:
        entries (list of ThresholdEntry): sorted by value
        grid (int): coarse grid resolution
        tolerance (float): merge tolerance
        refine_iters (int): refinement rounds

    """

    def __init__(self, entries, grid, tolerance, refine_iters):
        self.entries = sorted(entries, key=lambda e: e.value)
        self.grid = grid
        self.tolerance = tolerance
        self.refine_iters = refine_iters

    @property
    def values(self):
        return [e.value for e in self.entries]

    def find(self, value, tol=1e-6, kind=None):
        """entries within ``tol`` of ``value`` (optionally of a given kind)"""
        return [e for e in self.entries if abs(e.value - value) <= tol and (kind is None or e.kind == kind)]

    def within(self, interval):
        a, b = interval
        return [e for e in self.entries if a <= e.value <= b]

    def to_dict(self):
        return {
            "grid": self.grid,
            "refine": self.refine_iters,
            "tolerance": self.tolerance,
            "thresholds": [{"value": e.value, "kind": e.kind, "xi": [float(x) for x in e.xi],
                            "bands": list(e.bands), "converged": e.converged,
                            "variance": json_float(e.variance)} for e in self.entries],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _band_value(g, xi, j):
    return float(fiber_eigvalsh(g, xi)[j])


def _gap(g, xi, j):
    values = fiber_eigvalsh(g, xi)
    gaps = []
    if j > 0:
        gaps.append(values[j] - values[j - 1])
    if j < len(values) - 1:
        gaps.append(values[j + 1] - values[j])
    return min(gaps) if gaps else np.inf


def _refine_extremum(g, xi, j, kind, iters, step):
    sign = 1.0 if kind == const.BAND_MAX else -1.0
    xi = reduce_xi(xi, g.d)
    value = _band_value(g, xi, j)
    for _ in range(iters):
        gradient = _raw_gradient(g, xi, j)
        norm = np.linalg.norm(gradient)
        if norm < GRADIENT_TOL:
            break
        moved = False
        hessian = band_hessian(g, xi, j)
        curvature = np.linalg.eigvalsh(hessian)
        if np.all(sign * curvature < 0):
            trial = reduce_xi(xi - np.linalg.solve(hessian, gradient), g.d)
            trial_value = _band_value(g, trial, j)
            if sign * (trial_value - value) >= 0:
                xi, value, moved = trial, trial_value, True
        while not moved and step > 1e-15:
            trial = reduce_xi(xi + sign * step * gradient / norm, g.d)
            trial_value = _band_value(g, trial, j)
            if sign * (trial_value - value) > 0:
                xi, value, moved = trial, trial_value, True
            else:
                step *= 0.5
        if not moved:
            break
    converged = np.linalg.norm(_raw_gradient(g, xi, j)) < GRADIENT_TOL
    return xi, value, converged


def _refine_saddle(g, xi, j, iters):
    xi = reduce_xi(xi, g.d)
    norm = np.linalg.norm(_raw_gradient(g, xi, j))
    for _ in range(iters):
        if norm < GRADIENT_TOL:
            break
        gradient = _raw_gradient(g, xi, j)
        hessian = band_hessian(g, xi, j)
        delta = -np.linalg.lstsq(hessian, gradient, rcond=None)[0]
        damping = 1.0
        moved = False
        while damping > 1e-6:
            trial = reduce_xi(xi + damping * delta, g.d)
            trial_norm = np.linalg.norm(_raw_gradient(g, trial, j))
            if trial_norm < norm:
                xi, norm, moved = trial, trial_norm, True
                break
            damping *= 0.5
        if not moved:
            break
    return xi, _band_value(g, xi, j), norm < GRADIENT_TOL


def _refine_crossing(g, xi, j, N):
    """minimizes the gap between bands j and j+1 with Nelder-Mead"""

    def gap(x):
        values = fiber_eigvalsh(g, reduce_xi(x, g.d))
        return values[j + 1] - values[j]

    start = np.asarray(xi, dtype=float)
    simplex = np.vstack([start] + [start + np.eye(g.d)[k] / N for k in range(g.d)])
    result = minimize(gap, start, method="Nelder-Mead",
                      options={"initial_simplex": simplex, "xatol": 1e-13, "fatol": 1e-15,
                               "maxiter": 400 * g.d, "maxfev": 800 * g.d})
    best = reduce_xi(result.x, g.d)
    values = fiber_eigvalsh(g, best)
    return best, 0.5 * (values[j] + values[j + 1]), values[j + 1] - values[j]


def _neighbour_offsets(d):
    return [off for off in itertools.product((-1, 0, 1), repeat=d) if any(off)]


def _critical_candidates(band, scale):
    """grid nodes critical along every axis, classified on the full neighbourhood"""
    d = band.ndim
    tol = (1e-10 * (1.0 + scale)) ** 2
    critical = np.ones(band.shape, dtype=bool)
    for axis in range(d):
        plus = np.roll(band, -1, axis=axis)
        minus = np.roll(band, 1, axis=axis)
        critical &= (plus - band) * (band - minus) <= tol
    slack = 1e-12 * (1.0 + scale)
    below = np.ones(band.shape, dtype=bool)
    above = np.ones(band.shape, dtype=bool)
    for off in _neighbour_offsets(d):
        neighbour = np.roll(band, tuple(-o for o in off), axis=tuple(range(d)))
        below &= band <= neighbour + slack
        above &= band >= neighbour - slack
    candidates = {const.BAND_MIN: critical & below & ~above,
                  const.BAND_MAX: critical & above & ~below,
                  const.SADDLE: critical & ~below & ~above}
    return dict((kind, np.flatnonzero(mask.ravel())) for kind, mask in candidates.items())


def _gap_candidates(gap):
    d = gap.ndim
    minimum = np.ones(gap.shape, dtype=bool)
    for off in _neighbour_offsets(d):
        minimum &= gap <= np.roll(gap, tuple(-o for o in off), axis=tuple(range(d)))
    nodes = np.flatnonzero(minimum.ravel())
    order = np.argsort(gap.ravel()[nodes], kind="stable")
    return nodes[order][:MAX_CANDIDATES]


def _distinct(nodes, values, tol):
    kept = []
    seen = []
    for node in nodes:
        value = values[node]
        if any(abs(value - s) <= tol for s in seen):
            continue
        seen.append(value)
        kept.append(node)
        if len(kept) >= MAX_CANDIDATES:
            break
    return kept


def _merge(entries, tol):
    merged = []
    group = []
    for entry in sorted(entries, key=lambda e: e.value):
        if group and entry.value - group[-1].value > tol:
            merged.append(group)
            group = []
        group.append(entry)
    if group:
        merged.append(group)

    out = []
    for group in merged:
        best = sorted(group, key=lambda e: (KIND_PRIORITY.index(e.kind), not e.converged))[0]
        bands = tuple(sorted(set(b for e in group for b in e.bands)))
        out.append(best._replace(bands=bands))
    return out


def estimate_thresholds(g, N=64, refine_iters=DEFAULT_REFINE_ITERS, merge_tol=DEFAULT_MERGE_TOL,
                        flat_tol=DEFAULT_FLAT_TOL, workers=None, logger=None):
    """estimates the threshold set of the periodic operator H0

        Scans the sorted-band grid for local extrema and saddles (nodes critical along every
        axis), detects flat bands and near-crossings of adjacent bands, refines each candidate
        and merges values closer than ``merge_tol``. Extrema are refined by projected gradient
        ascent/descent with step halving and Newton acceleration, saddles by damped Newton on
        the gradient, crossings by Nelder-Mead minimization of the band gap. Candidates ending
        on a degenerate point are re-tagged as crossings.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            N (int, optional): coarse grid resolution (at least 8 recommended)
            refine_iters (int, optional): refinement rounds per candidate
            merge_tol (float, optional): merge tolerance for threshold values
            flat_tol (float, optional): band variation below which a band is flat
            workers (int, optional): worker threads for the grid scan
            logger (logging.Logger, optional): logger

        Returns:
            ThresholdReport: the estimated thresholds

        Example:
           >>> from crystalspectra.crystal import builtin
           >>> from crystalspectra.bands import estimate_thresholds
           >>> report = estimate_thresholds(builtin("zd:1"), 64)
           >>> [(round(e.value, 6), e.kind) for e in report.entries]
           [(0.0, 'band-min'), (4.0, 'band-max')]

    """
    logger = logger or _log
    sample = sample_bands(g, N, workers=workers, logger=logger)
    grid = sample.grid_values()
    scale = spectral_scale(g)
    crossing_tol = CROSSING_TOL * (1.0 + scale)
    entries = []

    flat = set()
    for j in range(g.n):
        band = sample.eigenvalues[:, j]
        if band.max() - band.min() < flat_tol:
            flat.add(j)
            entries.append(ThresholdEntry(float(band.mean()), const.FLAT_BAND, tuple(sample.xis[0]), (j,),
                                          True, float(band.var())))

    candidates = []
    for j in range(g.n):
        if j in flat:
            continue
        band = grid[..., j]
        for kind, nodes in sorted(_critical_candidates(band, scale).items()):
            for node in _distinct(nodes, band.ravel(), 1e-9 * (1.0 + scale)):
                candidates.append((kind, j, node))
    for j in range(g.n - 1):
        if j in flat and j + 1 in flat:
            continue
        for node in _gap_candidates(grid[..., j + 1] - grid[..., j]):
            candidates.append((const.CROSSING, j, node))
    logger.debug("threshold scan on grid %d: %d candidates", N, len(candidates))

    def refine(candidate):
        kind, j, node = candidate
        start = sample.xis[node]
        if kind == const.CROSSING:
            xi, value, gap = _refine_crossing(g, start, j, N)
            if gap > crossing_tol:
                return None
            return ThresholdEntry(float(value), kind, tuple(xi), (j, j + 1), True, None)
        if kind == const.SADDLE:
            xi, value, converged = _refine_saddle(g, start, j, refine_iters)
        else:
            xi, value, converged = _refine_extremum(g, start, j, kind, refine_iters, 0.5 / N)
        if _gap(g, xi, j) <= crossing_tol:
            values = fiber_eigvalsh(g, xi)
            lower = j - 1 if j > 0 and (j == g.n - 1 or values[j] - values[j - 1] < values[j + 1] - values[j]) else j
            cross_xi, cross_value, gap = _refine_crossing(g, xi, lower, N)
            if gap <= crossing_tol:
                xi, value = cross_xi, cross_value
            return ThresholdEntry(float(value), const.CROSSING, tuple(xi), (lower, lower + 1), True, None)
        return ThresholdEntry(float(value), kind, tuple(xi), (j,), bool(converged), None)

    refined = [e for e in parallel_map(refine, candidates, workers) if e is not None]
    for entry in refined:
        if not entry.converged:
            logger.warning("threshold refinement did not converge: %s %.12g at xi=%s",
                           entry.kind, entry.value, list(entry.xi))
    report = ThresholdReport(_merge(entries + refined, merge_tol), N, merge_tol, refine_iters)
    logger.info("estimated %d thresholds on grid %d", len(report.entries), N)
    return report


class MourreReport(object):
    """
    Numerical Mourre constant of H0 on an interval.

    Attributes:
        interval (tuple): (a, b)
        grid (int): grid resolution
        a_I (float): infimum over sampled fibers of the commutator fiber on ran pi_I(xi);
            None when no sampled fiber has spectrum in I
        witness (tuple): torus point attaining ``a_I``
        meets_thresholds (bool): the interval contains estimated thresholds (report is advisory)
        thresholds (list of float): estimated thresholds inside the interval
        degenerate_nodes (list of tuple): torus points handled by the degenerate-cluster branch

    """

    def __init__(self, interval, grid, a_I, witness, thresholds, degenerate_nodes):
        self.interval = interval
        self.grid = grid
        self.a_I = a_I
        self.witness = witness
        self.thresholds = thresholds
        self.degenerate_nodes = degenerate_nodes

    @property
    def meets_thresholds(self):
        return bool(self.thresholds)

    def to_dict(self):
        return {
            "interval": list(self.interval),
            "grid": self.grid,
            "a_I": json_float(self.a_I),
            "witness": None if self.witness is None else [float(x) for x in self.witness],
            "meets_thresholds": self.meets_thresholds,
            "thresholds": list(self.thresholds),
            "degenerate_nodes": [[float(x) for x in xi] for xi in self.degenerate_nodes],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def mourre_constant(g, interval, N=256, degeneracy_tol=DEFAULT_DEGENERACY_TOL,
                    threshold_grid=DEFAULT_THRESHOLD_GRID, workers=None, logger=None):
    """lower bound a_I of the commutator fiber over the sampled torus

        At every grid node, simple bands with eigenvalue in I contribute |grad lambda_j|^2;
        degenerate clusters meeting I contribute the smallest eigenvalue of sum_k M_k^2,
        M_k being the matrix of d_k h0 on the cluster subspace.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            interval (tuple): closed bounded interval (a, b)
            N (int, optional): grid resolution
            degeneracy_tol (float, optional): relative gap below which eigenvalues are clustered
            threshold_grid (int, optional): grid of the threshold scan deciding the flag
            workers (int, optional): worker threads
            logger (logging.Logger, optional): logger

        Returns:
            MourreReport: the estimate

        Example:
           >>> import numpy as np
           >>> from crystalspectra.crystal import builtin
           >>> from crystalspectra.bands import mourre_constant
           >>> report = mourre_constant(builtin("zd:1"), (1, 3), N=1024)
           >>> abs(report.a_I / (12 * np.pi ** 2) - 1) < 0.01
           True

    """
    logger = logger or _log
    a, b = check_interval(interval)
    tol = _absolute_tol(g, degeneracy_tol)
    xis = grid_points(N, g.d)

    def work(block):
        values, vectors = eigh_stack(assemble_fibers(g, block), block)
        derivatives = fiber_derivatives(g, block)
        best, best_xi, degenerate = np.inf, None, []
        for m in range(block.shape[0]):
            if not np.any((values[m] >= a) & (values[m] <= b)):
                continue
            for cluster in _clusters(values[m], tol):
                if not any(a <= values[m][c] <= b for c in cluster):
                    continue
                basis = vectors[m][:, list(cluster)]
                blocks = np.einsum("ac,kab,bd->kcd", basis.conj(), derivatives[m], basis)
                if len(cluster) == 1:
                    contribution = float(np.sum(blocks[:, 0, 0].real ** 2))
                else:
                    squares = np.einsum("kab,kbc->ac", blocks, blocks)
                    contribution = float(np.linalg.eigvalsh(0.5 * (squares + squares.conj().T))[0])
                    degenerate.append(tuple(block[m]))
                contribution = max(contribution, 0.0)
                if contribution < best:
                    best, best_xi = contribution, tuple(block[m])
        return best, best_xi, degenerate

    a_I, witness, degenerate = np.inf, None, []
    for best, best_xi, nodes in parallel_map(work, chunks(xis), workers):
        if best < a_I:
            a_I, witness = best, best_xi
        degenerate.extend(nodes)
    if witness is None:
        a_I = None

    thresholds = estimate_thresholds(g, threshold_grid, workers=workers, logger=logger).within((a, b))
    report = MourreReport((a, b), N, a_I, witness, [e.value for e in thresholds], degenerate)
    if report.meets_thresholds:
        logger.warning("interval [%g, %g] contains estimated thresholds %s; a_I is advisory",
                       a, b, report.thresholds)
    logger.info("Mourre constant on [%g, %g] at grid %d: %s", a, b, N, a_I)
    return report
