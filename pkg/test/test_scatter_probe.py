import json

import numpy as np
import pytest

from crystalspectra.crystal import load_perturbation, PerturbationSpec
from crystalspectra.realspace import Box, build_h0
from crystalspectra.scatter import wave_operator_probe, gaussian_packet
from crystalspectra.exceptions import ConfigurationError

from .conftest import fixture_text

TIMES = [5.0, 10.0, 20.0, 40.0]


@pytest.fixture(scope="module")
def fixPacket(fixZd1):
    op = build_h0(fixZd1, Box.truncated(200))
    return gaussian_packet(op, [0], 6.0, [0.25])


class Test_wave_operator_probe:

    def test_unperturbed_increments_vanish(self, fixZd1, fixEmptyPerturbation, fixPacket):
        record = wave_operator_probe(fixZd1, fixEmptyPerturbation, (1, 3), fixPacket, TIMES, Box.truncated(200))
        assert record.cauchy_increments == [0.0, 0.0, 0.0]
        assert record.isometry_gaps == [0.0] * 4
        assert record.backward["cauchy_increments"] == [0.0, 0.0, 0.0]

    def test_bump_increments_decay(self, fixZd1, fixBump, fixPacket):
        record = wave_operator_probe(fixZd1, fixBump, (1, 3), fixPacket, TIMES, Box.truncated(200))
        increments = record.cauchy_increments
        assert all(later < earlier for earlier, later in zip(increments, increments[1:]))
        assert increments[-1] < 1e-2
        assert max(record.isometry_gaps) <= 1e-6
        assert max(record.escape_mass) < 1e-3
        assert record.backward["times"] == [-t for t in TIMES]

    def test_torus_has_no_escape_mass(self, fixZd1, fixBump):
        box = Box.torus(32)
        psi = gaussian_packet(build_h0(fixZd1, box), [16], 3.0, [0.25])
        record = wave_operator_probe(fixZd1, fixBump, (1, 3), psi, [1.0, 2.0], box)
        assert record.escape_mass == [0.0, 0.0]

    def test_measure_perturbation_stays_isometric(self, fixZd1):
        p = PerturbationSpec(vertex_measure_delta={((0,), 0): 0.5})
        box = Box.truncated(80)
        psi = gaussian_packet(build_h0(fixZd1, box), [0], 4.0, [0.25])
        record = wave_operator_probe(fixZd1, p, (1, 3), psi, [2.0, 4.0, 8.0], box)
        assert max(record.isometry_gaps) <= 1e-8
        assert max(record.backward["isometry_gaps"]) <= 1e-8

    def test_long_range_is_refused(self, fixZd1, fixPacket):
        p = load_perturbation(fixture_text("long_range_perturbation.json"), fixZd1)
        with pytest.raises(ConfigurationError):
            wave_operator_probe(fixZd1, p, (1, 3), fixPacket, TIMES, Box.truncated(200))

    def test_times_must_increase(self, fixZd1, fixBump, fixPacket):
        for times in ([], [10.0, 5.0], [1.0, 1.0], [-1.0, 2.0]):
            with pytest.raises(ConfigurationError):
                wave_operator_probe(fixZd1, fixBump, (1, 3), fixPacket, times, Box.truncated(200))

    def test_record_json(self, fixZd1, fixBump, fixPacket):
        doc = json.loads(wave_operator_probe(fixZd1, fixBump, (1, 3), fixPacket, [1.0, 2.0],
                                             Box.truncated(200)).to_json())
        assert sorted(doc) == ["backward", "cauchy_increments", "escape_mass", "isometry_gaps", "times"]
        assert sorted(doc["backward"]) == ["cauchy_increments", "escape_mass", "isometry_gaps", "times"]
        assert len(doc["cauchy_increments"]) == 1
