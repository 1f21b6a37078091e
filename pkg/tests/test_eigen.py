import math

import numpy as np
import pytest

from scripts.eigen import (
    cache_key, cache_path, degenerate_levels, estimate_errors, file_checksum,
    fit_linear_spectrum, load_cache, residual_norms, save_cache, solve, to_markdown,
)
from scripts.errors import (
    ChecksumMismatch, ParamMismatch, RangeError, TruncatedFile, VersionMismatch,
)
from scripts.model import PendulumParams
from scripts.spectral import HamiltonianMatrix, assemble_hamiltonian, make_grid


class TestSolve:
    def test_diagonal_two_by_two(self):
        h = HamiltonianMatrix(entries=np.array([[2.0, 0.0], [0.0, 1.0]]),
                              grid=make_grid(2, 1), params=PendulumParams())
        assert solve(h).eigenvalues == pytest.approx([1.0, 2.0])

    def test_sorted_and_weighted_orthonormal(self, small_eig):
        assert np.all(np.diff(small_eig.eigenvalues) >= 0)
        vecs = small_eig.eigenvectors
        gram = small_eig.weight * vecs.T @ vecs
        assert np.allclose(gram, np.eye(small_eig.count), atol=1e-8)

    def test_residuals(self, small_eig):
        h = assemble_hamiltonian(PendulumParams(), make_grid(10, 12))
        assert np.max(residual_norms(h, small_eig)) <= 1e-8

    def test_ground_state_positive(self, small_eig):
        assert small_eig.eigenvalues[0] > -1e-8

    def test_deterministic_orientation(self, small_eig):
        h = assemble_hamiltonian(PendulumParams(), make_grid(10, 12))
        again = solve(h)
        assert np.allclose(again.eigenvectors, small_eig.eigenvectors, atol=1e-8)
        pivots = np.argmax(np.abs(again.eigenvectors), axis=0)
        assert np.all(again.eigenvectors[pivots, np.arange(again.count)] > 0)

    def test_lowest_subset(self, small_eig):
        h = assemble_hamiltonian(PendulumParams(), make_grid(10, 12))
        part = solve(h, k_lowest=15)
        assert part.count == 15
        assert part.eigenvalues == pytest.approx(small_eig.eigenvalues[:15], abs=1e-10)

    def test_subset_out_of_range(self):
        h = assemble_hamiltonian(PendulumParams(), make_grid(4, 4))
        with pytest.raises(RangeError):
            solve(h, k_lowest=0)

    def test_hbar_gravity_scaling(self):
        grid = make_grid(8, 8)
        base = solve(assemble_hamiltonian(PendulumParams(), grid))
        scaled = solve(assemble_hamiltonian(PendulumParams(hbar=2.0, g=4.0), grid))
        assert scaled.eigenvalues == pytest.approx(4 * base.eigenvalues, rel=1e-9, abs=1e-9)

    def test_degenerate_levels(self):
        assert list(degenerate_levels(np.array([0.0, 1.0, 1.0, 2.0]))) == [1]

    @pytest.mark.slow
    def test_normal_mode_ground_state(self):
        params = PendulumParams(hbar=0.1, g=10.0)
        eig = solve(assemble_hamiltonian(params, make_grid(64, 64)), k_lowest=1)
        omega_plus = math.sqrt((2 + math.sqrt(2)) * 10.0)
        omega_minus = math.sqrt((2 - math.sqrt(2)) * 10.0)
        assert eig.eigenvalues[0] == pytest.approx(0.05 * (omega_plus + omega_minus), rel=0.05)


class TestErrors:
    def test_identical_decompositions(self, small_eig):
        report = estimate_errors(small_eig, small_eig)
        assert np.all(report.ratios == 0)
        assert report.reliable_count == small_eig.count

    def test_param_mismatch(self, small_eig, small_eig_prime):
        with pytest.raises(ParamMismatch):
            estimate_errors(small_eig, small_eig_prime)

    def test_reliable_count_stops_at_first_bad_level(self, small_eig):
        coarse = solve(assemble_hamiltonian(PendulumParams(), make_grid(8, 10)))
        report = estimate_errors(coarse, small_eig)
        assert len(report.estimates) == coarse.count
        assert np.all(report.ratios >= 0)
        assert np.all(report.ratios[:report.reliable_count] <= 1e-4)
        assert report.count_below(1.0) >= report.reliable_count

    @pytest.mark.slow
    def test_desk_grids_reliable_count(self):
        a = solve(assemble_hamiltonian(PendulumParams(), make_grid(48, 48)))
        b = solve(assemble_hamiltonian(PendulumParams(), make_grid(64, 64)))
        assert estimate_errors(a, b).reliable_count >= 100


class TestLinearFit:
    def test_synthetic_line(self):
        values = 0.5 * np.arange(50) + 3.0
        fit = fit_linear_spectrum(values, 10, 40)
        assert fit.slope == pytest.approx(0.5, abs=1e-12)
        assert fit.intercept == pytest.approx(3.0, abs=1e-10)
        assert fit.rms < 1e-10

    def test_window_beyond_levels(self):
        with pytest.raises(RangeError):
            fit_linear_spectrum(np.arange(10.0), 2, 10)

    def test_empty_window(self):
        with pytest.raises(RangeError):
            fit_linear_spectrum(np.arange(10.0), 5, 5)

    @pytest.mark.slow
    def test_desk_slope(self):
        a = solve(assemble_hamiltonian(PendulumParams(), make_grid(48, 48)))
        b = solve(assemble_hamiltonian(PendulumParams(), make_grid(64, 64)))
        top = estimate_errors(a, b).reliable_count
        fit = fit_linear_spectrum(b, top // 2, top - 1)
        assert fit.slope == pytest.approx(0.13293, rel=0.10)

    def test_markdown(self, small_eig):
        fit = fit_linear_spectrum(small_eig, 60, 119)
        text = to_markdown(small_eig, estimate_errors(small_eig, small_eig), fit)
        assert "10×12" in text
        assert "Ajuste linear" in text


class TestCache:
    def test_round_trip_is_bit_identical(self, small_eig, tmp_path):
        path = save_cache(small_eig, tmp_path / "eig.dpnd")
        loaded = load_cache(path)
        assert np.array_equal(loaded.eigenvalues, small_eig.eigenvalues)
        assert np.array_equal(loaded.eigenvectors, small_eig.eigenvectors)
        assert loaded.params == small_eig.params
        assert (loaded.grid.n1, loaded.grid.n2) == (10, 12)
        assert len(file_checksum(path)) == 16

    def test_layout_prefix(self, small_eig, tmp_path):
        data = save_cache(small_eig, tmp_path / "eig.dpnd").read_bytes()
        assert data[:4] == b"DPND"
        assert int.from_bytes(data[4:8], "little") == 1

    def test_corrupt_payload_byte(self, small_eig, tmp_path):
        path = save_cache(small_eig, tmp_path / "eig.dpnd")
        data = bytearray(path.read_bytes())
        data[-20] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(ChecksumMismatch):
            load_cache(path)

    def test_count_larger_than_payload(self, small_eig, tmp_path):
        path = save_cache(small_eig, tmp_path / "eig.dpnd")
        data = path.read_bytes().replace(b'"count": 120', b'"count": 121', 1)
        path.write_bytes(data)
        with pytest.raises(TruncatedFile):
            load_cache(path)

    def test_truncated_file(self, small_eig, tmp_path):
        path = save_cache(small_eig, tmp_path / "eig.dpnd")
        path.write_bytes(path.read_bytes()[:-100])
        with pytest.raises(TruncatedFile):
            load_cache(path)

    def test_version_mismatch(self, small_eig, tmp_path):
        path = save_cache(small_eig, tmp_path / "eig.dpnd")
        data = bytearray(path.read_bytes())
        data[4:8] = (2).to_bytes(4, "little")
        path.write_bytes(bytes(data))
        with pytest.raises(VersionMismatch):
            load_cache(path)

    def test_no_temporary_files_left(self, small_eig, tmp_path):
        save_cache(small_eig, tmp_path / "eig.dpnd")
        assert [p.name for p in tmp_path.iterdir()] == ["eig.dpnd"]

    def test_cache_key_depends_on_inputs(self):
        grid = make_grid(8, 8)
        base = cache_key(PendulumParams(), grid, "fourier", None)
        assert base == cache_key(PendulumParams(), grid, "fourier", None)
        assert base != cache_key(PendulumParams(g=2.0), grid, "fourier", None)
        assert base != cache_key(PendulumParams(), grid, "paper", None)
        assert cache_path(".", base).name == f"eigen-{base}.dpnd"
