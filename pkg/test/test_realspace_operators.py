import json

import numpy as np
import pytest

from crystalspectra.bands import sample_bands
from crystalspectra.crystal import builtin, PerturbationSpec, PowerLawEnvelope
from crystalspectra.floquet import spectral_bounds
from crystalspectra.realspace import (Box, cells, build_h0, build_h, conjugate_J, j_factors, spectrum,
                                      torus_oracle, gap_count_scan, hypothesis_norms)
from crystalspectra.exceptions import ConfigurationError, MeasureError, ProvenanceError


def random_measure_perturbation(g, rng, N):
    vertex = dict((((int(a), int(b)), j), rng.uniform(-0.5, 0.5))
                  for a in range(N) for b in range(N) for j in range(g.n) if rng.rand() < 0.5)
    edge = dict((((int(a), int(b)), pair), rng.uniform(-0.5, 0.5))
                for a in range(N) for b in range(N) for pair in range(g.pair_count) if rng.rand() < 0.5)
    return PerturbationSpec(vertex_measure_delta=vertex, edge_measure_delta=edge)


class Test_box:

    def test_parse(self):
        assert Box.parse("torus:4") == Box.torus(4)
        assert Box.parse("truncated:0") == Box.truncated(0)
        assert str(Box.truncated(3)) == "truncated:3"

    def test_parse_errors(self):
        for text in ("torus:0", "torus:x", "sphere:3", "truncated:-1", "4"):
            with pytest.raises(ConfigurationError):
                Box.parse(text)

    def test_cells(self):
        assert cells(Box.truncated(1), 1).ravel().tolist() == [-1, 0, 1]
        assert cells(Box.torus(2), 2).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]


class Test_build_operators:

    def test_truncated_zd1(self, fixZd1):
        assert build_h0(fixZd1, Box.truncated(1)).to_dense().tolist() == \
            [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]]

    def test_torus_zd1(self, fixZd1):
        assert build_h0(fixZd1, Box.torus(4)).to_dense().tolist() == \
            [[2.0, -1.0, 0.0, -1.0], [-1.0, 2.0, -1.0, 0.0], [0.0, -1.0, 2.0, -1.0], [-1.0, 0.0, -1.0, 2.0]]

    def test_torus_with_one_cell(self, fixZd1):
        assert build_h0(fixZd1, Box.torus(1)).to_dense().tolist() == [[0.0]]

    def test_symmetric(self, fixBuiltin):
        op = build_h0(fixBuiltin, Box.torus(3))
        assert op.hermiticity_defect() == 0.0
        assert op.dimension == 3 ** fixBuiltin.d * fixBuiltin.n

    def test_index_and_site(self, fixHexagonal):
        op = build_h0(fixHexagonal, Box.truncated(2))
        k = op.index((1, -2), 1)
        assert op.site(k) == ((1, -2), 1)
        with pytest.raises(KeyError):
            op.index((3, 0), 0)

    def test_potential_bump(self, fixZd1, fixBump):
        op = build_h(fixZd1, fixBump, Box.truncated(2))
        assert op.to_dense()[op.index((0,), 0), op.index((0,), 0)] == 5.0
        assert op.is_perturbed

    def test_empty_perturbation_gives_h0(self, fixKagome, fixEmptyPerturbation):
        box = Box.torus(3)
        assert (build_h(fixKagome, fixEmptyPerturbation, box).matrix != build_h0(fixKagome, box).matrix).nnz == 0

    def test_torus_envelope_is_periodized(self, fixZd1):
        p = PerturbationSpec(potential_short_envelope=PowerLawEnvelope(1.0, 2.0))
        diagonal = build_h(fixZd1, p, Box.torus(4)).matrix.diagonal()
        # cells 1 and 3 are both at distance 1 from the origin on the torus
        assert diagonal[1] == diagonal[3]

    def test_nonpositive_measure_in_window(self, fixZd1):
        p = PerturbationSpec(vertex_measure_delta={((1,), 0): -2.0})
        with pytest.raises(MeasureError):
            build_h(fixZd1, p, Box.truncated(2))

    def test_gershgorin(self, fixHexagonal):
        op = build_h0(fixHexagonal, Box.torus(4))
        low, high = op.gershgorin_bounds()
        values = spectrum(op)
        assert low <= values[0] and values[-1] <= high
        assert op.norm_bound() == 6.0


class Test_spectrum:

    def test_truncated_spectrum_inside_bands(self, fixBuiltin):
        # band extrema of the builtin crystals sit at xi in {0, 1/2}^d, which the grid contains
        bands = sample_bands(fixBuiltin, 16).eigenvalues
        values = spectrum(build_h0(fixBuiltin, Box.truncated(3)))
        assert bands.min() - 1e-9 <= values[0] and values[-1] <= bands.max() + 1e-9
        low, high = spectral_bounds(fixBuiltin)
        assert low - 1e-9 <= bands.min() and bands.max() <= high + 1e-9

    def test_iterative_solver_matches_dense(self, fixZd1):
        op = build_h0(fixZd1, Box.truncated(60))
        dense = spectrum(op)
        assert np.allclose(spectrum(op, k=6, dense_limit=50), dense[:6], atol=1e-10)
        sigma = 2.0137
        nearest = np.sort(dense[np.argsort(np.abs(dense - sigma))[:4]])
        assert np.allclose(spectrum(op, k=4, sigma=sigma, dense_limit=50), nearest, atol=1e-10)

    def test_iterative_solver_above_dense_limit(self, fixZd1):
        op = build_h0(fixZd1, Box.truncated(2100))
        assert op.dimension == 4201
        expected = 2.0 - 2.0 * np.cos(np.pi * np.arange(1, 7) / 4202.0)
        assert np.allclose(spectrum(op, k=6, sigma=-0.01), expected, atol=1e-10)


class Test_conjugation:

    def test_J_unitarity_on_random_measures(self, fixZd2):
        rng = np.random.RandomState(11)
        box = Box.torus(4)
        for _ in range(20):
            p = random_measure_perturbation(fixZd2, rng, 4)
            hop = build_h(fixZd2, p, box)
            conjugated = conjugate_J(hop, fixZd2, p)
            assert conjugated.uses_J
            assert np.max(np.abs(spectrum(hop) - spectrum(conjugated))) < 1e-10

    def test_function_value_stencil(self, fixZd1):
        # m = 4 at cell 0, m(e) = 2 on the edge from cell 0 to cell 1
        p = PerturbationSpec(vertex_measure_delta={((0,), 0): 3.0}, edge_measure_delta={((0,), 0): 1.0})
        box = Box.truncated(2)
        conjugated = conjugate_J(build_h(fixZd1, p, box), fixZd1, p)
        vertex = dict((c, 4.0 if c == 0 else 1.0) for c in range(-2, 3))

        def edge(c):
            return 2.0 if c == 0 else 1.0

        laplacian = np.zeros((5, 5))
        for c in range(-2, 3):
            x = conjugated.index((c,), 0)
            laplacian[x, x] = (edge(c - 1) + edge(c)) / vertex[c]
            for y_cell, m_e in ((c - 1, edge(c - 1)), (c + 1, edge(c))):
                if -2 <= y_cell <= 2:
                    laplacian[x, conjugated.index((y_cell,), 0)] = -m_e / vertex[c]
        J = np.diag([np.sqrt(vertex[conjugated.site(k)[0][0]]) for k in range(5)])
        expected = J.dot(laplacian).dot(np.linalg.inv(J))
        assert np.allclose(conjugated.to_dense(), expected, atol=1e-14)
        assert conjugated.weights.tolist() == [1.0] * 5
        assert expected[conjugated.index((0,), 0), conjugated.index((1,), 0)] == pytest.approx(-1.0)

    def test_j_factors(self, fixZd1):
        p = PerturbationSpec(vertex_measure_delta={((0,), 0): 3.0})
        factors = j_factors(fixZd1, p, Box.truncated(1))
        assert factors.tolist() == [1.0, 2.0, 1.0]

    def test_provenance(self, fixZd1, fixBump):
        hop = build_h(fixZd1, fixBump, Box.truncated(2))
        with pytest.raises(ProvenanceError):
            conjugate_J(hop, fixZd1, PerturbationSpec())
        with pytest.raises(ProvenanceError):
            conjugate_J(hop, builtin("zd:2"), fixBump)
        with pytest.raises(ProvenanceError):
            conjugate_J(conjugate_J(hop, fixZd1, fixBump), fixZd1, fixBump)


class Test_oracle:

    def test_builtin_torus_oracle(self, fixBuiltin):
        for N in range(1, 9):
            record = torus_oracle(fixBuiltin, N)
            assert record.passed, record.summary()
            assert record.deviation <= 1e-9

    def test_record(self, fixZd1):
        record = torus_oracle(fixZd1, 4)
        assert record.summary().endswith("PASS")
        assert record.deviation <= 1e-12
        assert json.loads(record.to_json())["size"] == 4


class Test_gap_counts:

    def test_single_bound_state(self, fixZd1, fixWell):
        scan = gap_count_scan(fixZd1, fixWell, (-0.6, -0.1), list(range(4, 65)))
        assert set(scan.counts) == set([1])

    def test_counts_in_band_grow(self, fixZd1, fixWell):
        scan = gap_count_scan(fixZd1, fixWell, (1, 3), [4, 8, 16, 32, 64])
        assert list(scan.counts) == sorted(scan.counts)
        assert scan.counts[-1] > scan.counts[0]

    def test_scan_json(self, fixZd1, fixWell):
        doc = json.loads(gap_count_scan(fixZd1, fixWell, (-0.6, -0.1), [4]).to_json())
        assert doc == {"interval": [-0.6, -0.1], "sizes": [4], "counts": [1]}

    def test_hypothesis_norms(self, fixZd1, fixWell):
        assert hypothesis_norms(fixZd1, fixWell, Box.truncated(3)) == 1.0
