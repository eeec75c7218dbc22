"""Topological crystals given by a finite quotient graph with Z^d edge indices.

Every vertex of the infinite crystal is addressed by the pair ``(mu, j)`` of a
cell ``mu`` (a tuple of ``d`` integers) and a vertex index ``j`` of the
quotient graph. An oriented edge ``e`` leaving ``(mu, j)`` ends in
``(mu + index(e), terminus(e))``. The order of the vertices in the definition
document fixes the identification of l2 of the quotient graph with C^n.
"""
import os
import io
import json
import logging
from collections import namedtuple, deque, Counter

import numpy as np
import requests
from requests.exceptions import ConnectionError, HTTPError, Timeout

from .consts import CrystalConventions as const
from .exceptions import (CrystalDefinitionError, CrystalValidationError,
                         UnknownCrystalError, MeasureError)

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

BUILTIN_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "builtin_crystals.json")

BUILTIN_NAMES = (const.ZD1, const.ZD2, const.ZD3, const.HEXAGONAL, const.KAGOME, const.DIAMOND_CHAIN)


Vertex = namedtuple("Vertex", ["id", "m0", "r0"])

# pair: position of the unoriented representative in the definition document
# reversed: False for the orientation listed in the document
OrientedEdge = namedtuple("OrientedEdge", ["origin", "terminus", "index", "m0", "pair", "reversed"])
OrientedEdge.__new__.__defaults__ = (None, False)


def _edge_label(edge):
    return "edge ({0},{1},({2}))".format(edge.origin + 1, edge.terminus + 1,
                                          ",".join(str(k) for k in edge.index))


def _match_reversals(edges):
    """pairs every oriented edge with its reversal; unmatched edges get None"""

    partner = [None] * len(edges)
    pending = {}
    for pos, edge in enumerate(edges):
        key = (edge.origin, edge.terminus, tuple(edge.index), edge.m0)
        rkey = (edge.terminus, edge.origin, tuple(-k for k in edge.index), edge.m0)
        waiting = pending.get(rkey)
        if waiting:
            other = waiting.popleft()
            partner[pos] = other
            partner[other] = pos
        else:
            pending.setdefault(key, deque()).append(pos)
    return partner


class QuotientGraph(object):
    """
    The finite quotient graph of a d-dimensional topological crystal together with
    its periodic measure m0 and periodic potential R0.

    Instances are immutable. Use :py:func:`load_crystal` or :py:func:`builtin` to obtain
    validated instances; the constructor itself does not validate, so that
    :py:func:`validate` can report on broken graphs.

    Args:
        dimension (int): rank d of the translation group
        vertices (list of :py:class:`Vertex`): the n vertices, in the order fixing C^n
        oriented_edges (list of :py:class:`OrientedEdge`): all oriented edges, reversals included

    """

    def __init__(self, dimension, vertices, oriented_edges):
        self._dimension = int(dimension)
        self._vertices = tuple(Vertex(str(v.id), float(v.m0), float(v.r0)) for v in vertices)
        self._edges = tuple(OrientedEdge(int(e.origin), int(e.terminus),
                                         tuple(int(k) for k in e.index), float(e.m0),
                                         e.pair, bool(e.reversed)) for e in oriented_edges)
        self._arrays = None
        self._reversal = None

    @classmethod
    def from_unoriented(cls, dimension, vertices, edges):
        """builds a graph from unoriented representatives, materializing both orientations

        Args:
            dimension (int): rank d of the translation group
            vertices (list of :py:class:`Vertex`): vertices
            edges (list of tuple): ``(origin, terminus, index, m0)`` for each unoriented edge

        Returns:
            QuotientGraph: graph with ``2 * len(edges)`` oriented edges

        """
        oriented = []
        for pair, (origin, terminus, index, m0) in enumerate(edges):
            index = tuple(int(k) for k in index)
            oriented.append(OrientedEdge(origin, terminus, index, m0, pair, False))
            oriented.append(OrientedEdge(terminus, origin, tuple(-k for k in index), m0, pair, True))
        return cls(dimension, vertices, oriented)

    @property
    def dimension(self):
        return self._dimension

    @property
    def d(self):
        return self._dimension

    @property
    def n(self):
        return len(self._vertices)

    @property
    def vertices(self):
        return self._vertices

    @property
    def oriented_edges(self):
        return self._edges

    @property
    def pair_count(self):
        pairs = [e.pair for e in self._edges if e.pair is not None]
        return max(pairs) + 1 if pairs else 0

    def __eq__(self, other):
        if not isinstance(other, QuotientGraph):
            return NotImplemented
        return (self._dimension == other._dimension and self._vertices == other._vertices
                and self._edges == other._edges)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        return hash((self._dimension, self._vertices, self._edges))

    def __repr__(self):
        return "QuotientGraph(d={0}, n={1}, oriented_edges={2})".format(self.d, self.n, len(self._edges))

    def arrays(self):
        """read-only numpy views used by the numerical kernels

        Returns:
            dict: ``origin``, ``terminus`` (int arrays), ``index`` (E x d int array),
            ``edge_m0``, ``vertex_m0``, ``r0`` (float arrays)

        """
        if self._arrays is None:
            count = len(self._edges)
            arrays = {
                "origin": np.array([e.origin for e in self._edges], dtype=int),
                "terminus": np.array([e.terminus for e in self._edges], dtype=int),
                "index": np.array([e.index for e in self._edges], dtype=int).reshape(count, self.d),
                "edge_m0": np.array([e.m0 for e in self._edges], dtype=float),
                "vertex_m0": np.array([v.m0 for v in self._vertices], dtype=float),
                "r0": np.array([v.r0 for v in self._vertices], dtype=float),
            }
            for value in arrays.values():
                value.setflags(write=False)
            self._arrays = arrays
        return self._arrays

    def edges_from(self, j):
        """indices of the oriented edges with origin j, in storage order"""
        return [pos for pos, e in enumerate(self._edges) if e.origin == j]

    def reversal(self, e):
        """index of the reversal of oriented edge e

        Raises:
            CrystalValidationError: when the edge has no reversal

        """
        if self._reversal is None:
            self._reversal = tuple(_match_reversals(self._edges))
        partner = self._reversal[e]
        if partner is None:
            raise CrystalValidationError([_edge_label(self._edges[e]) + " has no reversal"])
        return partner

    def representative_cell(self, mu, e):
        """cell of the document orientation of the edge instance (mu, e)

        The instance of oriented edge ``e`` leaving cell ``mu`` is stored in perturbation
        tables under the cell of the origin of its document orientation.
        """
        edge = self._edges[e]
        if edge.reversed:
            return tuple(m + k for m, k in zip(mu, edge.index))
        return tuple(mu)


def degree(g, j):
    """weighted degree deg_m0(x_j) = sum over edges leaving x_j of m0(e) / m0(x_j)

        Args:
            g (:py:class:`QuotientGraph`): crystal
            j (int): vertex index (0-based)

        Returns:
            float: degree of the vertex

        Raises:
            IndexError: invalid vertex index

        Example:
           >>> from crystalspectra.crystal import builtin, degree
           >>> degree(builtin("hexagonal"), 0)
           3.0

    """
    if j < 0 or j >= g.n:
        raise IndexError("vertex index {0} out of range".format(j))
    total = sum(e.m0 for e in g.oriented_edges if e.origin == j)
    return total / g.vertices[j].m0


def degrees(g):
    """vector of all weighted degrees"""
    arr = g.arrays()
    out = np.zeros(g.n)
    np.add.at(out, arr["origin"], arr["edge_m0"])
    return out / arr["vertex_m0"]


def validate(g):
    """checks the invariants of a quotient graph

        Args:
            g (:py:class:`QuotientGraph`): graph to check

        Returns:
            list of str: one diagnostic per violation, empty when the graph is valid

        Example:
           >>> from crystalspectra.crystal import builtin, validate
           >>> validate(builtin("hexagonal"))
           []

    """
    diagnostics = []
    if g.d < 1:
        diagnostics.append("dimension must be a positive integer")
    if g.n < 1:
        diagnostics.append("at least one vertex is required")

    ids = Counter(v.id for v in g.vertices)
    for vid, count in sorted(ids.items()):
        if count > 1:
            diagnostics.append("vertex {0}: id is not unique".format(vid))

    for v in g.vertices:
        if not np.isfinite(v.m0) or v.m0 <= 0:
            diagnostics.append("vertex {0}: measure must be strictly positive".format(v.id))
        if not np.isfinite(v.r0):
            diagnostics.append("vertex {0}: potential must be finite".format(v.id))

    well_formed = []
    for edge in g.oriented_edges:
        label = _edge_label(edge)
        broken = False
        if not (0 <= edge.origin < g.n and 0 <= edge.terminus < g.n):
            diagnostics.append(label + ": vertex index out of range")
            broken = True
        if len(edge.index) != g.d:
            diagnostics.append(label + ": index must have {0} components".format(g.d))
            broken = True
        if not np.isfinite(edge.m0) or edge.m0 <= 0:
            diagnostics.append(label + ": measure must be strictly positive")
        if not broken:
            well_formed.append(edge)

    partner = _match_reversals(well_formed)
    for pos, other in enumerate(partner):
        if other is None:
            diagnostics.append(_edge_label(well_formed[pos]) + " has no reversal")
    return diagnostics


def _require(condition, message, location):
    if not condition:
        raise CrystalDefinitionError(message, location)


def _as_int_vector(value, d, location):
    _require(isinstance(value, list) and len(value) == d,
             "expected an array of {0} integers".format(d), location)
    for k in value:
        _require(isinstance(k, int) and not isinstance(k, bool), "expected an integer", location)
    return tuple(value)


def _as_number(value, location):
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), "expected a number", location)
    return float(value)


def _parse_json(text):
    try:
        return json.loads(text)
    except ValueError as e:
        lineno = getattr(e, "lineno", None)
        colno = getattr(e, "colno", None)
        location = "line {0}, column {1}".format(lineno, colno) if lineno is not None else None
        raise CrystalDefinitionError(getattr(e, "msg", str(e)), location)


def _graph_from_document(doc):
    _require(isinstance(doc, dict), "top level must be an object", "document")
    for key in doc:
        _require(key in (const.DIMENSION, const.VERTICES, const.EDGES), "unknown key", key)
    for key in (const.DIMENSION, const.VERTICES, const.EDGES):
        _require(key in doc, "missing key", key)

    d = doc[const.DIMENSION]
    _require(isinstance(d, int) and not isinstance(d, bool), "expected an integer", const.DIMENSION)

    vertices = []
    _require(isinstance(doc[const.VERTICES], list), "expected an array", const.VERTICES)
    for pos, raw in enumerate(doc[const.VERTICES]):
        where = "vertices[{0}]".format(pos)
        _require(isinstance(raw, dict), "expected an object", where)
        _require(const.ID in raw, "missing key", where + ".id")
        vertices.append(Vertex(str(raw[const.ID]),
                               _as_number(raw.get(const.M0, 1.0), where + ".m0"),
                               _as_number(raw.get(const.R0, 0.0), where + ".r0")))

    edges = []
    _require(isinstance(doc[const.EDGES], list), "expected an array", const.EDGES)
    for pos, raw in enumerate(doc[const.EDGES]):
        where = "edges[{0}]".format(pos)
        _require(isinstance(raw, dict), "expected an object", where)
        for key in (const.FROM, const.TO, const.INDEX):
            _require(key in raw, "missing key", where + "." + key)
        origin, terminus = raw[const.FROM], raw[const.TO]
        for key, value in ((const.FROM, origin), (const.TO, terminus)):
            _require(isinstance(value, int) and not isinstance(value, bool), "expected a vertex index",
                     where + "." + key)
        index = _as_int_vector(raw[const.INDEX], d, where + ".index")
        edges.append((origin, terminus, index, _as_number(raw.get(const.M0, 1.0), where + ".m0")))

    return QuotientGraph.from_unoriented(d, vertices, edges)


def load_crystal(text):
    """parses and validates a crystal definition document

        The document is UTF-8 JSON with the keys ``dimension``, ``vertices`` (``id``, ``m0``,
        ``r0``) and ``edges`` (``from``, ``to``, ``index``, ``m0``). Each unoriented edge is
        listed once; the reversed orientation is generated.

        Args:
            text (str or bytes): the definition document

        Returns:
            QuotientGraph: validated graph

        Raises:
            CrystalDefinitionError: malformed document, with the line or field location
            CrystalValidationError: an invariant is violated (e.g. nonpositive measure)

        Example:
           >>> from crystalspectra.crystal import load_crystal
           >>> g = load_crystal('{"dimension": 1, "vertices": [{"id": "x1", "m0": 1, "r0": 0}],'
           ...                  ' "edges": [{"from": 0, "to": 0, "index": [1], "m0": 1}]}')
           >>> [e.index for e in g.oriented_edges]
           [(1,), (-1,)]

    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    graph = _graph_from_document(_parse_json(text))
    diagnostics = validate(graph)
    if diagnostics:
        raise CrystalValidationError(diagnostics)
    return graph


def _read_source(source):
    if source.startswith("http://") or source.startswith("https://"):
        try:
            result = requests.get(source, timeout=10)
        except (ConnectionError, HTTPError, Timeout) as e:
            raise IOError(e)
        if result.status_code != requests.codes.ok:
            raise IOError("HTTP Error: " + str(result.status_code))
        return result.content.decode("utf-8")
    with io.open(source, "r", encoding="utf-8") as f:
        return f.read()


def load_crystal_file(source):
    """loads a crystal definition from a file path or an http(s) URL

        Args:
            source (str): file name or URL

        Returns:
            QuotientGraph: validated graph

        Raises:
            IOError: the file can't be read or downloaded
            CrystalDefinitionError: malformed document
            CrystalValidationError: an invariant is violated

    """
    logger.debug("loading crystal definition from %s", source)
    return load_crystal(_read_source(source))


def serialize(g):
    """definition document of a graph; inverse of :py:func:`load_crystal` on valid graphs

        Args:
            g (:py:class:`QuotientGraph`): graph with paired orientations

        Returns:
            str: JSON document listing one representative per unoriented edge

    """
    representatives = {}
    for e in g.oriented_edges:
        if e.pair is None:
            raise CrystalValidationError([_edge_label(e) + ": orientation pairing unknown"])
        if not e.reversed:
            representatives[e.pair] = e
    doc = {
        const.DIMENSION: g.d,
        const.VERTICES: [{const.ID: v.id, const.M0: v.m0, const.R0: v.r0} for v in g.vertices],
        const.EDGES: [{const.FROM: e.origin, const.TO: e.terminus, const.INDEX: list(e.index), const.M0: e.m0}
                      for _, e in sorted(representatives.items())],
    }
    return json.dumps(doc, indent=2)


_builtin_documents = None


def builtin(name):
    """canonical example crystals with m0 = 1 and R0 = 0

        Available names are ``zd:1``, ``zd:2``, ``zd:3``, ``hexagonal``, ``kagome`` and
        ``diamond-chain``. The edge index conventions are documented in ``docs/source/crystals.rst``.

        Args:
            name (str): name of the crystal, optionally prefixed by ``builtin:``

        Returns:
            QuotientGraph: the crystal

        Raises:
            UnknownCrystalError: unknown name

        Example:
           >>> from crystalspectra.crystal import builtin
           >>> g = builtin("kagome")
           >>> g.n, len(g.oriented_edges)
           (3, 12)

    """
    global _builtin_documents
    if name.startswith(const.BUILTIN_PREFIX):
        name = name[len(const.BUILTIN_PREFIX):]
    if _builtin_documents is None:
        with io.open(BUILTIN_FILE, "r", encoding="utf-8") as f:
            _builtin_documents = json.load(f)
    if name not in _builtin_documents:
        raise UnknownCrystalError("unknown builtin crystal: " + name)
    return load_crystal(json.dumps(_builtin_documents[name]))


def resolve_crystal(source):
    """``builtin:NAME`` or a path / URL, as accepted by the command line"""
    if source.startswith(const.BUILTIN_PREFIX):
        return builtin(source)
    return load_crystal_file(source)


def cell_norm(mu):
    """Euclidean norm of a cell vector"""
    return float(np.sqrt(sum(float(k) * k for k in mu)))


class PowerLawEnvelope(namedtuple("PowerLawEnvelope", ["amplitude", "exponent", "coefficients"])):
    """A * c_k * (1 + |mu|)^(-exponent), with optional per-vertex (or per-edge) coefficients c_k"""

    def value(self, mu, k=0):
        coefficient = self.coefficients[k] if self.coefficients else 1.0
        return self.amplitude * coefficient * (1.0 + cell_norm(mu)) ** (-self.exponent)

    def lower_bound(self, k=0):
        """infimum of value(mu, k) over all cells: the value at mu = 0 if negative, else 0"""
        coefficient = self.coefficients[k] if self.coefficients else 1.0
        return min(0.0, self.amplitude * coefficient)


PowerLawEnvelope.__new__.__defaults__ = (None,)


class PerturbationSpec(object):
    """
    Decaying modifications of a periodic crystal: short-range potential R_s, long-range
    potential R_l, and vertex / edge measure deltas.

    Tables map ``(cell, vertex)`` (or ``(cell, edge)``, with ``edge`` the position of the
    unoriented edge in the definition document and ``cell`` the cell of the origin of its
    document orientation) to real values. Envelopes are :py:class:`PowerLawEnvelope`.
    Instances are immutable.

    Args:
        potential_short (dict, optional): table of R_s
        potential_short_envelope (PowerLawEnvelope, optional): envelope of R_s
        potential_long (PowerLawEnvelope, optional): radial profile of R_l
        vertex_measure_delta (dict, optional): table added to m0(x)
        vertex_measure_envelope (PowerLawEnvelope, optional): envelope added to m0(x)
        edge_measure_delta (dict, optional): table added to m0(e) on both orientations
        edge_measure_envelope (PowerLawEnvelope, optional): envelope added to m0(e)

    """

    def __init__(self, potential_short=None, potential_short_envelope=None, potential_long=None,
                 vertex_measure_delta=None, vertex_measure_envelope=None,
                 edge_measure_delta=None, edge_measure_envelope=None):

        def freeze(table):
            return dict(((tuple(int(k) for k in cell), int(pos)), float(value))
                        for (cell, pos), value in (table or {}).items())

        self._potential_short = freeze(potential_short)
        self._potential_short_envelope = potential_short_envelope
        self._potential_long = potential_long
        self._vertex_delta = freeze(vertex_measure_delta)
        self._vertex_envelope = vertex_measure_envelope
        self._edge_delta = freeze(edge_measure_delta)
        self._edge_envelope = edge_measure_envelope

    def _key(self):
        return (sorted(self._potential_short.items()), self._potential_short_envelope, self._potential_long,
                sorted(self._vertex_delta.items()), self._vertex_envelope,
                sorted(self._edge_delta.items()), self._edge_envelope)

    def __eq__(self, other):
        if not isinstance(other, PerturbationSpec):
            return NotImplemented
        return self._key() == other._key()

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    @property
    def potential_short_table(self):
        return dict(self._potential_short)

    @property
    def potential_short_envelope(self):
        return self._potential_short_envelope

    @property
    def potential_long_envelope(self):
        return self._potential_long

    @property
    def vertex_measure_table(self):
        return dict(self._vertex_delta)

    @property
    def vertex_measure_envelope(self):
        return self._vertex_envelope

    @property
    def edge_measure_table(self):
        return dict(self._edge_delta)

    @property
    def edge_measure_envelope(self):
        return self._edge_envelope

    @property
    def has_measure(self):
        return bool(self._vertex_delta or self._edge_delta or self._vertex_envelope or self._edge_envelope)

    @property
    def has_potential(self):
        return bool(self._potential_short or self._potential_short_envelope or self._potential_long)

    @property
    def has_long_range(self):
        return self._potential_long is not None

    @property
    def is_empty(self):
        return not (self.has_measure or self.has_potential)

    @property
    def is_compact(self):
        """True when the perturbation is given by finite tables only"""
        return not (self._potential_short_envelope or self._potential_long
                    or self._vertex_envelope or self._edge_envelope)

    def support_radius(self):
        """largest |mu|_inf over all table entries (0 for empty tables)"""
        cells = [cell for cell, _ in list(self._potential_short) + list(self._vertex_delta) + list(self._edge_delta)]
        return max([max(abs(k) for k in cell) for cell in cells if cell] + [0])

    def without_potential(self):
        return PerturbationSpec(vertex_measure_delta=self._vertex_delta, vertex_measure_envelope=self._vertex_envelope,
                                edge_measure_delta=self._edge_delta, edge_measure_envelope=self._edge_envelope)

    def without_measure(self):
        return PerturbationSpec(potential_short=self._potential_short,
                                potential_short_envelope=self._potential_short_envelope,
                                potential_long=self._potential_long)

    def potential_short(self, mu, j):
        """R_s at vertex (mu, j)"""
        value = self._potential_short.get((tuple(mu), j), 0.0)
        if self._potential_short_envelope is not None:
            value += self._potential_short_envelope.value(mu, j)
        return value

    def potential_long(self, mu, j):
        """R_l at vertex (mu, j)"""
        if self._potential_long is None:
            return 0.0
        return self._potential_long.value(mu, j)

    def potential(self, g, mu, j):
        """R = R0 + R_s + R_l at vertex (mu, j)"""
        return g.vertices[j].r0 + self.potential_short(mu, j) + self.potential_long(mu, j)

    def vertex_measure(self, g, mu, j):
        """perturbed vertex measure m(mu x_j)"""
        value = g.vertices[j].m0 + self._vertex_delta.get((tuple(mu), j), 0.0)
        if self._vertex_envelope is not None:
            value += self._vertex_envelope.value(mu, j)
        return value

    def edge_measure(self, g, mu, e):
        """perturbed measure of the instance of oriented edge e leaving cell mu"""
        edge = g.oriented_edges[e]
        value = edge.m0
        if edge.pair is None:
            return value
        cell = g.representative_cell(mu, e)
        value += self._edge_delta.get((cell, edge.pair), 0.0)
        if self._edge_envelope is not None:
            value += self._edge_envelope.value(cell, edge.pair)
        return value

    def check(self, g):
        """validates the perturbation against a graph

        Raises:
            CrystalValidationError: references to unknown vertices/edges, wrong cell dimension,
                or envelope exponents outside their admissible range
            MeasureError: a perturbed measure is not strictly positive

        """
        diagnostics = []
        for name, table, limit in (("potential_short", self._potential_short, g.n),
                                   ("vertex_measure_delta", self._vertex_delta, g.n),
                                   ("edge_measure_delta", self._edge_delta, g.pair_count)):
            for cell, pos in sorted(table):
                if len(cell) != g.d:
                    diagnostics.append("{0}: cell {1} must have {2} components".format(name, list(cell), g.d))
                if not 0 <= pos < limit:
                    diagnostics.append("{0}: reference {1} out of range".format(name, pos))
        for name, envelope, minimum, width in (
                ("potential_short", self._potential_short_envelope, 1.0, g.n),
                ("potential_long", self._potential_long, 0.0, g.n),
                ("vertex_measure_delta", self._vertex_envelope, 1.0, g.n),
                ("edge_measure_delta", self._edge_envelope, 1.0, g.pair_count)):
            if envelope is None:
                continue
            if not envelope.exponent > minimum:
                diagnostics.append("{0}: envelope exponent must be > {1}".format(name, minimum))
            if envelope.coefficients is not None and len(envelope.coefficients) != width:
                diagnostics.append("{0}: expected {1} envelope coefficients".format(name, width))
        if diagnostics:
            raise CrystalValidationError(diagnostics)

        for j, v in enumerate(g.vertices):
            floor = v.m0
            if self._vertex_envelope is not None:
                floor += self._vertex_envelope.lower_bound(j)
            if floor <= 0:
                raise MeasureError("vertex {0}: perturbed measure may not be strictly positive".format(v.id))
        for (cell, j) in self._vertex_delta:
            if self.vertex_measure(g, cell, j) <= 0:
                raise MeasureError("vertex {0} in cell {1}: perturbed measure must be strictly positive"
                                   .format(g.vertices[j].id, list(cell)))
        for e, edge in enumerate(g.oriented_edges):
            if edge.reversed:
                continue
            floor = edge.m0
            if self._edge_envelope is not None:
                floor += self._edge_envelope.lower_bound(edge.pair)
            if floor <= 0:
                raise MeasureError(_edge_label(edge) + ": perturbed measure may not be strictly positive")
        representatives = dict((edge.pair, e) for e, edge in enumerate(g.oriented_edges) if not edge.reversed)
        for (cell, pair) in self._edge_delta:
            if self.edge_measure(g, cell, representatives[pair]) <= 0:
                raise MeasureError("edge {0} in cell {1}: perturbed measure must be strictly positive"
                                   .format(pair, list(cell)))
        return self


def _parse_envelope(raw, where):
    _require(raw.get(const.ENVELOPE) == const.POWER_LAW, "only power-law envelopes are supported",
             where + ".envelope")
    for key in raw:
        _require(key in (const.ENVELOPE, const.AMPLITUDE, const.EXPONENT, const.COEFFICIENTS, const.TABLE),
                 "unknown key", where + "." + key)
    coefficients = raw.get(const.COEFFICIENTS)
    if coefficients is not None:
        _require(isinstance(coefficients, list), "expected an array", where + ".coefficients")
        coefficients = tuple(_as_number(c, where + ".coefficients") for c in coefficients)
    return PowerLawEnvelope(_as_number(raw.get(const.AMPLITUDE), where + ".amplitude"),
                            _as_number(raw.get(const.EXPONENT), where + ".exponent"),
                            coefficients)


def _parse_table(rows, d, ref_key, where):
    _require(isinstance(rows, list), "expected an array", where)
    table = {}
    for pos, raw in enumerate(rows):
        at = "{0}[{1}]".format(where, pos)
        _require(isinstance(raw, dict), "expected an object", at)
        _require(const.CELL in raw and ref_key in raw and const.VALUE in raw,
                 "expected keys cell, {0}, value".format(ref_key), at)
        cell = _as_int_vector(raw[const.CELL], d, at + ".cell")
        ref = raw[ref_key]
        _require(isinstance(ref, int) and not isinstance(ref, bool), "expected an index", at + "." + ref_key)
        key = (cell, ref)
        table[key] = table.get(key, 0.0) + _as_number(raw[const.VALUE], at + ".value")
    return table


def _parse_component(doc, key, d, ref_key):
    raw = doc.get(key)
    if raw is None:
        return {}, None
    if isinstance(raw, list):
        return _parse_table(raw, d, ref_key, key), None
    _require(isinstance(raw, dict), "expected a table array or an envelope object", key)
    table = _parse_table(raw[const.TABLE], d, ref_key, key + ".table") if const.TABLE in raw else {}
    envelope = _parse_envelope(raw, key) if const.ENVELOPE in raw else None
    return table, envelope


def load_perturbation(text, g):
    """parses a perturbation document and validates it against a crystal

        The document is JSON with the optional keys ``potential_short``, ``potential_long``,
        ``vertex_measure_delta`` and ``edge_measure_delta``; each is a table array of
        ``{cell, vertex|edge, value}`` rows or an object ``{envelope: "power-law", amplitude,
        exponent[, coefficients][, table]}``. ``potential_long`` only accepts an envelope.

        Args:
            text (str or bytes): the perturbation document
            g (:py:class:`QuotientGraph`): crystal the perturbation refers to

        Returns:
            PerturbationSpec: validated perturbation

        Raises:
            CrystalDefinitionError: malformed document
            CrystalValidationError: invalid references or exponents
            MeasureError: nonpositive perturbed measure

    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    doc = _parse_json(text)
    _require(isinstance(doc, dict), "top level must be an object", "document")
    known = (const.POTENTIAL_SHORT, const.POTENTIAL_LONG, const.VERTEX_MEASURE_DELTA, const.EDGE_MEASURE_DELTA)
    for key in doc:
        _require(key in known, "unknown key", key)

    short_table, short_envelope = _parse_component(doc, const.POTENTIAL_SHORT, g.d, const.VERTEX)
    vertex_table, vertex_envelope = _parse_component(doc, const.VERTEX_MEASURE_DELTA, g.d, const.VERTEX)
    edge_table, edge_envelope = _parse_component(doc, const.EDGE_MEASURE_DELTA, g.d, const.EDGE)
    long_envelope = None
    if doc.get(const.POTENTIAL_LONG) is not None:
        raw = doc[const.POTENTIAL_LONG]
        _require(isinstance(raw, dict) and const.TABLE not in raw,
                 "expected an envelope object", const.POTENTIAL_LONG)
        long_envelope = _parse_envelope(raw, const.POTENTIAL_LONG)

    spec = PerturbationSpec(potential_short=short_table, potential_short_envelope=short_envelope,
                            potential_long=long_envelope,
                            vertex_measure_delta=vertex_table, vertex_measure_envelope=vertex_envelope,
                            edge_measure_delta=edge_table, edge_measure_envelope=edge_envelope)
    return spec.check(g)


def load_perturbation_file(source, g):
    """loads a perturbation document from a file path or an http(s) URL"""
    logger.debug("loading perturbation from %s", source)
    return load_perturbation(_read_source(source), g)


def shortest_paths(g, max_states=100000):
    """canonical paths in the lift used by the telescoping of long-range potentials

        Breadth-first search from x_1 = (0, vertex 0) over oriented edges in storage order.

        Args:
            g (:py:class:`QuotientGraph`): crystal
            max_states (int, optional): search budget

        Returns:
            tuple: ``(alpha, beta)`` where ``alpha[j]`` is the path from x_1 to x_j (cell 0)
            for ``j >= 1`` and ``beta[k]`` the path from x_1 to delta_k x_1. A path is a list
            of ``(cell, edge)`` steps, the edge leaving the given cell.

        Raises:
            CrystalValidationError: a target is not reachable within the budget

    """
    zero = (0,) * g.d
    start = (zero, 0)
    targets = set([(zero, j) for j in range(1, g.n)])
    for k in range(g.d):
        cell = tuple(1 if i == k else 0 for i in range(g.d))
        targets.add((cell, 0))

    arr = g.arrays()
    parent = {start: None}
    queue = deque([start])
    missing = set(targets)
    while queue and missing and len(parent) < max_states:
        cell, j = queue.popleft()
        for e in g.edges_from(j):
            nxt = (tuple(c + k for c, k in zip(cell, arr["index"][e])), int(arr["terminus"][e]))
            if nxt in parent:
                continue
            parent[nxt] = (cell, j, e)
            missing.discard(nxt)
            queue.append(nxt)
    if missing:
        raise CrystalValidationError(["no path from x1 to vertex {0} in cell {1}".format(j + 1, list(cell))
                                      for cell, j in sorted(missing)])

    def trace(target):
        steps = []
        node = target
        while parent[node] is not None:
            cell, j, e = parent[node]
            steps.append((cell, e))
            node = (cell, j)
        return list(reversed(steps))

    alpha = dict((j, trace((zero, j))) for j in range(1, g.n))
    beta = dict((k, trace((tuple(1 if i == k else 0 for i in range(g.d)), 0))) for k in range(g.d))
    return alpha, beta
