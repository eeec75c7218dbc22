import json

import numpy as np
import pytest

from crystalspectra.crystal import load_perturbation, PerturbationSpec
from crystalspectra.symbols import (check_decay, check_hypotheses, PowerLawProfile, TableProfile,
                                    FunctionProfile, SumProfile)

from .conftest import fixture_text


def power_law(exponent):
    return lambda mu: (1.0 + np.sqrt(float(np.dot(mu, mu)))) ** (-exponent)


class Test_short_range:

    @pytest.mark.parametrize("exponent,verdict", [
        (1.05, "convergent-evidence"),
        (0.95, "divergent-evidence"),
        (1.5, "convergent-evidence"),
        (1.0, "divergent-evidence"),
    ])
    def test_power_law_profiles(self, exponent, verdict):
        report = check_decay(PowerLawProfile(1.0, exponent), "short", K=20)
        assert report.classification == verdict
        assert not report.sampled

    @pytest.mark.parametrize("exponent,verdict", [
        (1.05, "convergent-evidence"),
        (0.95, "divergent-evidence"),
        (1.5, "convergent-evidence"),
    ])
    @pytest.mark.parametrize("d", [1, 2])
    def test_function_profiles(self, exponent, verdict, d):
        report = check_decay(power_law(exponent), "short", K=20, d=d)
        assert report.classification == verdict
        assert report.fitted_exponent == pytest.approx(-exponent, abs=1e-2)

    def test_sampled_shells_are_reported(self):
        assert check_decay(power_law(2.0), "short", K=12, d=2).sampled
        assert not check_decay(power_law(2.0), "short", K=6, d=2).sampled

    def test_finite_support(self):
        report = check_decay(TableProfile({(0,): 5.0, (3,): -1.0}), "short", K=20)
        assert report.classification == "convergent-evidence"
        assert report.fitted_exponent is None
        assert report.shells[1] == (2.0, 1.0)

    def test_report_fields(self):
        report = check_decay(PowerLawProfile(2.0, 3.0), "short", K=4)
        assert [lam for lam, _ in report.shells] == [1.0, 2.0, 4.0, 8.0, 16.0]
        assert report.shells[0][1] == pytest.approx(2.0 / 8.0)
        assert report.partial_sums[0] == pytest.approx(0.25)
        doc = json.loads(report.to_json())
        assert set(doc) == set(["mode", "shells", "partial_sums", "fitted_exponent", "classification",
                                "sampled"])

    def test_sum_profile(self):
        report = check_decay(SumProfile(PowerLawProfile(1.0, 2.0), TableProfile({(1,): 1.0})), "short", K=20)
        assert report.classification == "convergent-evidence"

    def test_function_profile_needs_dimension(self):
        with pytest.raises(ValueError):
            check_decay(power_law(2.0), "short")

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            check_decay(PowerLawProfile(1.0, 2.0), "medium")


class Test_long_range:

    def test_slowly_vanishing_potential(self):
        report = check_decay(PowerLawProfile(1.0, 0.5), "long", K=20)
        assert report.classification == "convergent-evidence"
        assert report.vanishing
        assert [axis.classification for axis in report.axes] == ["convergent-evidence"]

    def test_same_profile_is_not_short_range(self):
        assert check_decay(PowerLawProfile(1.0, 0.5), "short", K=20).classification == "divergent-evidence"

    def test_constant_does_not_vanish(self):
        report = check_decay(PowerLawProfile(1.0, 0.0), "long", K=20)
        assert not report.vanishing
        assert report.classification == "divergent-evidence"

    def test_function_profile_in_two_dimensions(self):
        report = check_decay(power_law(0.5), "long", K=10, d=2)
        assert len(report.axes) == 2
        assert report.vanishing
        assert "axes" in json.loads(report.to_json())

    def test_oscillating_profile_has_long_range_differences(self):
        # (-1)^mu does not vanish and its differences do not decay
        report = check_decay(FunctionProfile(lambda mu: float((-1) ** abs(mu[0])), 1), "long", K=10)
        assert report.classification == "divergent-evidence"


class Test_hypotheses:

    def test_envelope_perturbation(self, fixZd1):
        p = load_perturbation(fixture_text("long_range_perturbation.json"), fixZd1)
        reports = check_hypotheses(fixZd1, p, K=20)
        assert sorted(reports) == ["measure", "potential_long", "potential_short"]
        assert all(r.classification == "convergent-evidence" for r in reports.values())

    def test_compact_perturbation(self, fixHexagonal):
        p = PerturbationSpec(vertex_measure_delta={((1, 1), 0): 0.5}, potential_short={((0, 0), 1): 2.0})
        reports = check_hypotheses(fixHexagonal, p)
        assert reports["measure"].classification == "convergent-evidence"
        assert reports["potential_short"].shells[0][1] == 0.0
        assert reports["potential_long"].vanishing
