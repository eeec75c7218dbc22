import os

import pytest

from crystalspectra.crystal import (builtin, load_crystal, load_crystal_file, validate, serialize, degree,
                                    degrees, resolve_crystal, shortest_paths, QuotientGraph, Vertex)
from crystalspectra.exceptions import CrystalDefinitionError, CrystalValidationError, UnknownCrystalError

from .conftest import fix_dir, fixture_text


class Test_builtin_crystals:

    def test_builtins_are_valid(self, fixBuiltin):
        assert validate(fixBuiltin) == []

    def test_every_edge_has_its_reversal(self, fixBuiltin):
        for e in range(len(fixBuiltin.oriented_edges)):
            r = fixBuiltin.reversal(e)
            assert fixBuiltin.reversal(r) == e
            assert fixBuiltin.oriented_edges[r].index == tuple(-k for k in fixBuiltin.oriented_edges[e].index)

    def test_builtin_prefix(self):
        assert builtin("builtin:zd:1") == builtin("zd:1")

    def test_sizes(self):
        assert (builtin("zd:3").d, builtin("zd:3").n) == (3, 1)
        assert (builtin("hexagonal").n, len(builtin("hexagonal").oriented_edges)) == (2, 6)
        assert (builtin("kagome").n, len(builtin("kagome").oriented_edges)) == (3, 12)

    def test_unknown_builtin(self):
        with pytest.raises(UnknownCrystalError):
            builtin("square-octagon")
        with pytest.raises(KeyError):
            builtin("builtin:foo")

    def test_degrees(self):
        assert degree(builtin("zd:1"), 0) == 2.0
        assert list(degrees(builtin("hexagonal"))) == [3.0, 3.0]
        assert list(degrees(builtin("kagome"))) == [4.0, 4.0, 4.0]
        assert list(degrees(builtin("diamond-chain"))) == [4.0, 2.0, 2.0]

    def test_degree_with_invalid_vertex(self):
        with pytest.raises(IndexError):
            degree(builtin("zd:1"), 1)


class Test_load_crystal:

    def test_load_from_file(self):
        assert load_crystal_file(os.path.join(fix_dir, "hexagonal.json")) == builtin("hexagonal")

    def test_load_from_http(self, httpserver):
        httpserver.serve_content(fixture_text("hexagonal.json"))
        assert load_crystal_file(httpserver.url) == builtin("hexagonal")

    def test_http_error_status(self, httpserver):
        httpserver.serve_content("not found", code=404)
        with pytest.raises(IOError):
            load_crystal_file(httpserver.url)

    def test_missing_file(self):
        with pytest.raises(IOError):
            load_crystal_file(os.path.join(fix_dir, "does_not_exist.json"))

    def test_resolve_crystal(self):
        assert resolve_crystal("builtin:kagome") == builtin("kagome")
        assert resolve_crystal(os.path.join(fix_dir, "hexagonal.json")) == builtin("hexagonal")

    def test_loop_edge_orientations(self):
        g = load_crystal('{"dimension": 1, "vertices": [{"id": "x1", "m0": 1, "r0": 0}],'
                         ' "edges": [{"from": 0, "to": 0, "index": [1], "m0": 1}]}')
        assert [e.index for e in g.oriented_edges] == [(1,), (-1,)]

    def test_serialize_round_trip(self, fixBuiltin):
        assert load_crystal(serialize(fixBuiltin)) == fixBuiltin

    def test_malformed_json_reports_line(self):
        with pytest.raises(CrystalDefinitionError) as excinfo:
            load_crystal(fixture_text("truncated.json"))
        assert excinfo.value.location.startswith("line ")

    def test_missing_edge_index(self):
        with pytest.raises(CrystalDefinitionError) as excinfo:
            load_crystal('{"dimension": 1, "vertices": [{"id": "x1"}], "edges": [{"from": 0, "to": 0}]}')
        assert excinfo.value.location == "edges[0].index"

    def test_index_of_wrong_length(self):
        with pytest.raises(CrystalDefinitionError) as excinfo:
            load_crystal('{"dimension": 2, "vertices": [{"id": "x1"}],'
                         ' "edges": [{"from": 0, "to": 0, "index": [1]}]}')
        assert excinfo.value.location == "edges[0].index"

    def test_unknown_key(self):
        with pytest.raises(CrystalDefinitionError):
            load_crystal('{"dimension": 1, "vertices": [], "edges": [], "lattice": []}')

    def test_negative_measure(self):
        with pytest.raises(CrystalValidationError) as excinfo:
            load_crystal(fixture_text("negative_measure.json"))
        assert "vertex x1: measure must be strictly positive" in excinfo.value.diagnostics


class Test_validate:

    def test_missing_reversal(self):
        vertices = [Vertex("x1", 1.0, 0.0), Vertex("x2", 1.0, 0.0)]
        g = QuotientGraph(2, vertices, [builtin("hexagonal").oriented_edges[0]])
        diagnostics = validate(g)
        assert "edge (1,2,(0,0)) has no reversal" in diagnostics

    def test_nonpositive_edge_measure(self):
        g = QuotientGraph.from_unoriented(1, [Vertex("x1", 1.0, 0.0)], [(0, 0, (1,), 0.0)])
        assert "edge (1,1,(1)): measure must be strictly positive" in validate(g)


class Test_shortest_paths:

    def test_hexagonal(self, fixHexagonal):
        alpha, beta = shortest_paths(fixHexagonal)
        assert len(alpha[1]) == 1
        assert set(beta) == set([0, 1])
        # x1 -> x2 -> x1 in the neighbouring cell
        assert len(beta[0]) == 2

    def test_zd1(self, fixZd1):
        alpha, beta = shortest_paths(fixZd1)
        assert alpha == {}
        assert beta[0] == [((0,), 0)]
