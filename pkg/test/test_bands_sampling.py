import numpy as np
import pytest

from crystalspectra.bands import (sample_bands, density_of_states, multiplicity, spectral_projection,
                                  detect_flat_bands, band_gradient, band_hessian, DegenerateGradient)
from crystalspectra.exceptions import ContourError


class Test_sample_bands:

    def test_zd1_values(self, fixZd1):
        assert sample_bands(fixZd1, 4).eigenvalues.ravel().round(12).tolist() == [0.0, 2.0, 4.0, 2.0]

    def test_shapes(self, fixKagome):
        sample = sample_bands(fixKagome, 8, want_vectors=True, want_gradients=True)
        assert sample.eigenvalues.shape == (64, 3)
        assert sample.vectors.shape == (64, 3, 3)
        assert sample.gradients.shape == (64, 3, 2)
        assert sample.grid_values().shape == (8, 8, 3)

    def test_residuals(self, fixHexagonal):
        sample = sample_bands(fixHexagonal, 16, want_vectors=True)
        assert sample.residuals(fixHexagonal) < 1e-12
        with pytest.raises(ValueError):
            sample_bands(fixHexagonal, 4).residuals(fixHexagonal)

    def test_sorted(self, fixBuiltin):
        values = sample_bands(fixBuiltin, 6).eigenvalues
        assert np.all(np.diff(values, axis=1) >= 0)

    def test_worker_count_does_not_change_result(self, fixKagome):
        one = sample_bands(fixKagome, 24, workers=1).eigenvalues
        many = sample_bands(fixKagome, 24, workers=4).eigenvalues
        assert np.array_equal(one, many)

    def test_node_positions(self, fixZd2):
        sample = sample_bands(fixZd2, 4)
        pos = sample.node((1, 3))
        assert sample.xis[pos].tolist() == [0.25, 0.75]

    def test_csv(self, fixHexagonal):
        text = sample_bands(fixHexagonal, 4).to_csv()
        lines = text.split("\n")
        assert lines[0] == "xi_1,xi_2,lambda_1,lambda_2"
        assert len(lines) == 4 * 4 + 2
        assert lines[-1] == ""
        row = [float(v) for v in lines[1].split(",")]
        assert row[:2] == [0.0, 0.0]
        assert row[2:] == [pytest.approx(0.0, abs=1e-12), pytest.approx(6.0)]

    def test_invalid_grid(self, fixZd1):
        with pytest.raises(ValueError):
            sample_bands(fixZd1, 0)

    def test_density_of_states(self, fixHexagonal):
        dos = density_of_states(sample_bands(fixHexagonal, 16), bins=12)
        assert len(dos.edges) == 13
        assert np.sum(dos.density * np.diff(dos.edges)) == pytest.approx(2.0)
        assert dos.to_csv().startswith("energy_low,energy_high,density\n")


class Test_projections:

    def test_multiplicity_at_dirac_point(self, fixHexagonal):
        assert multiplicity(fixHexagonal, (1.0 / 3, 2.0 / 3), 3.0, 1e-8) == 2
        assert multiplicity(fixHexagonal, (0.1, 0.2), 3.0, 1e-8) == 0

    def test_eigen_and_riesz_agree(self, fixKagome):
        xi = (0.11, 0.27)
        eigen = spectral_projection(fixKagome, xi, (1.0, 5.0))
        riesz = spectral_projection(fixKagome, xi, (1.0, 5.0), method="riesz")
        assert np.allclose(eigen, riesz, atol=1e-10)
        assert np.allclose(eigen.dot(eigen), eigen, atol=1e-12)

    def test_projection_rank(self, fixKagome):
        projection = spectral_projection(fixKagome, (0.11, 0.27), (5.5, 6.5))
        assert np.trace(projection).real == pytest.approx(1.0)

    def test_riesz_refuses_eigenvalue_on_contour(self, fixKagome):
        with pytest.raises(ContourError) as excinfo:
            spectral_projection(fixKagome, (0.11, 0.27), (1.0, 6.0), method="riesz")
        assert excinfo.value.eigenvalue == pytest.approx(6.0)

    def test_unknown_method(self, fixZd1):
        with pytest.raises(ValueError):
            spectral_projection(fixZd1, 0.1, (0, 1), method="contour")


class Test_flat_bands_and_gradients:

    def test_kagome_flat_band(self, fixKagome):
        assert detect_flat_bands(sample_bands(fixKagome, 16)) == [pytest.approx(6.0)]

    def test_no_flat_band_on_hexagonal(self, fixHexagonal):
        assert detect_flat_bands(sample_bands(fixHexagonal, 16)) == []

    def test_zd1_gradient(self, fixZd1):
        xi = 0.1
        expected = 4 * np.pi * np.sin(2 * np.pi * xi)
        assert band_gradient(fixZd1, xi, 0)[0] == pytest.approx(expected, rel=1e-12)

    def test_degenerate_gradient(self, fixHexagonal):
        result = band_gradient(fixHexagonal, (1.0 / 3, 2.0 / 3), 0)
        assert isinstance(result, DegenerateGradient)
        assert result.cluster == (0, 1)
        assert result.matrices.shape == (2, 2, 2)

    def test_band_index_out_of_range(self, fixHexagonal):
        with pytest.raises(IndexError):
            band_gradient(fixHexagonal, (0.1, 0.1), 2)

    def test_zd1_hessian(self, fixZd1):
        xi = 0.2
        expected = 8 * np.pi ** 2 * np.cos(2 * np.pi * xi)
        assert band_hessian(fixZd1, xi, 0)[0, 0] == pytest.approx(expected, rel=1e-6)
