"""Collocation assembly, banded solve and interpolant evaluation tests."""

import numpy as np
import pytest

from dibsi.basis import DomainInformedBasis
from dibsi.bench import realize_signal, sample_signal
from dibsi.domains import is_homogeneous, realize_domain
from dibsi.interpolation import (
    BandedSystem,
    Interpolant,
    SampleSequence,
    SingularSystemError,
    SolverResidualError,
    assemble_collocation,
    interpolate,
    interpolate_bsi,
    interpolate_dibsi,
    mirror_index,
    solve_coefficients,
)


def _random_samples(dom, order, step, seed):
    sig = realize_signal(dom, order, 0.25, seed=seed)
    return sample_signal(sig, step)


class TestAssembly:
    def test_first_order_is_identity(self, two_subdomain_dom):
        samples = _random_samples(two_subdomain_dom, 1, 1.0, seed=1)
        basis = DomainInformedBasis(
            two_subdomain_dom, 1, step=1.0,
            k_min=samples.k_offset, k_max=samples.k_offset + len(samples) - 1)
        system = assemble_collocation(basis, samples)
        assert system.half_bandwidth == 0
        np.testing.assert_allclose(system.band[:, 0], 1.0, atol=1e-12)
        coeffs = solve_coefficients(system)
        np.testing.assert_allclose(coeffs, samples.values, atol=1e-12)

    def test_cubic_homogeneous_rows_are_tridiagonal(self, homogeneous_dom):
        samples = _random_samples(homogeneous_dom, 3, 1.0, seed=2)
        basis = DomainInformedBasis(
            homogeneous_dom, 3, step=1.0,
            k_min=samples.k_offset, k_max=samples.k_offset + len(samples) - 1)
        system = assemble_collocation(basis, samples)
        assert system.half_bandwidth == 1
        interior = system.band[1:-1]
        expected = np.tile([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                           (len(interior), 1))
        np.testing.assert_allclose(interior, expected, atol=1e-15)

    def test_rows_sum_to_one(self, two_subdomain_dom):
        for order in (2, 3, 4, 5):
            samples = _random_samples(two_subdomain_dom, order, 0.5, seed=3)
            basis = DomainInformedBasis(
                two_subdomain_dom, order, step=0.5,
                k_min=samples.k_offset,
                k_max=samples.k_offset + len(samples) - 1)
            system = assemble_collocation(basis, samples)
            np.testing.assert_allclose(system.band.sum(axis=1), 1.0,
                                       atol=1e-12)

    def test_insufficient_samples_rejected(self, two_subdomain_dom):
        samples = SampleSequence(np.ones(3), 1.0, k_offset=10)
        basis = DomainInformedBasis(two_subdomain_dom, 4, step=1.0,
                                    k_min=10, k_max=12)
        with pytest.raises(ValueError):
            assemble_collocation(basis, samples)


class TestBandedSolver:
    def test_matches_dense_oracle_on_random_banded_systems(self):
        rng = np.random.default_rng(8)
        for p in (1, 2, 3):
            for n in (6, 13, 40):
                band = rng.uniform(-0.2, 0.2, (n, 2 * p + 1))
                band[:, p] += 2.0  # diagonally dominant
                rhs = rng.uniform(-1, 1, n)
                system = BandedSystem(band.copy(), rhs.copy(), p, 0)
                coeffs = solve_coefficients(system)
                expected = np.linalg.solve(system.dense(), rhs)
                np.testing.assert_allclose(coeffs, expected, atol=1e-12)

    def test_cubic_matches_classical_spline_coefficients(self,
                                                         homogeneous_dom):
        samples = _random_samples(homogeneous_dom, 3, 1.0, seed=5)
        interp = interpolate_bsi(samples, 3)
        # independent dense oracle: explicit mirror-folded collocation rows
        n = len(samples)
        full = np.zeros((n, n))
        for i in range(n):
            for offset, val in ((-1, 1 / 6), (0, 2 / 3), (1, 1 / 6)):
                j = i + offset
                j = -j if j < 0 else (2 * (n - 1) - j if j > n - 1 else j)
                full[i, j] += val
        expected = np.linalg.solve(full, samples.values)
        np.testing.assert_allclose(interp.coeffs, expected, atol=1e-9)

    def test_small_pivot_falls_back_to_dense(self):
        band = np.array([[0.0, 1e-16, 1.0],
                         [1.0, 0.0, 1.0],
                         [1.0, 1e-16, 0.0]])
        rhs = np.array([1.0, 2.0, 1.0])
        system = BandedSystem(band, rhs, 1, 0)
        coeffs = solve_coefficients(system)
        np.testing.assert_allclose(system.dense() @ coeffs, rhs, atol=1e-9)

    def test_singular_system_reports_pivot(self):
        band = np.zeros((3, 3))
        band[:, 1] = [1.0, 0.0, 1.0]
        system = BandedSystem(band, np.ones(3), 1, 0)
        with pytest.raises(SingularSystemError) as info:
            solve_coefficients(system)
        assert info.value.pivot_index == 1

    def test_constant_samples_reproduce_constant(self, two_subdomain_dom):
        samples = SampleSequence(np.full(30, 5.0), 1.0, k_offset=1)
        xs = np.linspace(1.0, 30.0, 1001)
        for interp in (interpolate_dibsi(samples, two_subdomain_dom, 3),
                       interpolate_bsi(samples, 3)):
            np.testing.assert_allclose(interp.evaluate(xs), 5.0, atol=1e-12)


class TestInterpolant:
    def test_consistency_at_samples(self, two_subdomain_dom):
        for order in range(1, 7):
            for step in (0.1, 0.3, 0.7, 1.0):
                samples = _random_samples(two_subdomain_dom, order, step,
                                          seed=order)
                for interp in (
                        interpolate_dibsi(samples, two_subdomain_dom, order),
                        interpolate_bsi(samples, order)):
                    got = interp.evaluate(samples.positions)
                    np.testing.assert_allclose(got, samples.values,
                                               atol=1e-9)

    def test_homogeneous_domain_matches_standard_everywhere(
            self, homogeneous_dom):
        samples = _random_samples(homogeneous_dom, 3, 0.5, seed=6)
        di = interpolate_dibsi(samples, homogeneous_dom, 3)
        bi = interpolate_bsi(samples, 3)
        xs = np.linspace(1.0, 30.0, 4001)
        np.testing.assert_allclose(di.evaluate(xs), bi.evaluate(xs),
                                   atol=1e-9)

    def test_flagged_interval_agreement_for_first_order(
            self, two_subdomain_dom):
        # order 1 solves locally, so kernel equivalence alone decides
        samples = _random_samples(two_subdomain_dom, 1, 0.5, seed=7)
        di = interpolate_dibsi(samples, two_subdomain_dom, 1)
        bi = interpolate_bsi(samples, 1)
        top = two_subdomain_dom.values.max(axis=0)
        grid = two_subdomain_dom.grid
        flagged = grid[top >= 1.0 - 1e-9]
        pad = 1.0 * 0.5
        for x0 in flagged[:: len(flagged) // 50 + 1]:
            a, b = x0 - pad, x0 + pad
            ok, _ = is_homogeneous(two_subdomain_dom, max(a, 1.0),
                                   min(b, 30.0))
            if not ok or a < 1.5 or b > 29.5:
                continue
            xs = np.linspace(max(a, 1.0), min(b, 30.0), 21)
            np.testing.assert_allclose(di.evaluate(xs), bi.evaluate(xs),
                                       atol=1e-9)

    def test_linearity(self, two_subdomain_dom):
        s1 = _random_samples(two_subdomain_dom, 3, 0.5, seed=8)
        s2 = _random_samples(two_subdomain_dom, 3, 0.5, seed=9)
        a, b = 2.5, -1.25
        combo = SampleSequence(a * s1.values + b * s2.values, 0.5,
                               k_offset=s1.k_offset)
        basis = DomainInformedBasis(
            two_subdomain_dom, 3, step=0.5,
            k_min=s1.k_offset, k_max=s1.k_offset + len(s1) - 1)
        i1 = interpolate(s1, basis)
        i2 = interpolate(s2, basis)
        ic = interpolate(combo, basis)
        xs = np.linspace(2.0, 29.0, 801)
        np.testing.assert_allclose(
            ic.evaluate(xs), a * i1.evaluate(xs) + b * i2.evaluate(xs),
            atol=1e-9)

    def test_cubic_polynomial_reproduced_in_interior(self):
        def poly(x):
            return 0.001 * (0.3 * x**3 - 2.0 * x**2 + x + 1.0)

        samples = SampleSequence(poly(np.arange(60.0)), 1.0, k_offset=0)
        interp = interpolate_bsi(samples, 3)
        xs = np.linspace(20.0, 40.0, 501)
        np.testing.assert_allclose(interp.evaluate(xs), poly(xs), atol=1e-9)

    def test_linear_order_connects_the_dots(self):
        values = np.array([0.0, 1.0, 0.0, 2.0])
        samples = SampleSequence(values, 1.0, k_offset=0)
        interp = interpolate_bsi(samples, 1)
        assert interp.evaluate(0.5) == pytest.approx(0.5, abs=1e-12)
        assert interp.evaluate(2.25) == pytest.approx(0.5, abs=1e-12)

    def test_extrapolation_rejected(self, two_subdomain_dom):
        samples = _random_samples(two_subdomain_dom, 3, 1.0, seed=10)
        interp = interpolate_dibsi(samples, two_subdomain_dom, 3)
        with pytest.raises(ValueError):
            interp.evaluate(-40.0)
        with pytest.raises(ValueError):
            interp.evaluate(95.0)

    def test_slight_overhang_allowed_by_mirror(self, two_subdomain_dom):
        samples = _random_samples(two_subdomain_dom, 3, 1.0, seed=10)
        interp = interpolate_dibsi(samples, two_subdomain_dom, 3)
        assert np.isfinite(interp.evaluate(0.6))
        assert np.isfinite(interp.evaluate(30.4))


def test_mirror_index_reflection():
    np.testing.assert_array_equal(mirror_index(np.array([-2, -1, 0, 5]), 6),
                                  [2, 1, 0, 5])
    np.testing.assert_array_equal(mirror_index(np.array([6, 7, 10]), 6),
                                  [4, 3, 0])


def test_sample_sequence_validation():
    with pytest.raises(ValueError):
        SampleSequence([], 1.0)
    with pytest.raises(ValueError):
        SampleSequence([1.0, np.inf], 1.0)
    with pytest.raises(ValueError):
        SampleSequence([1.0, 2.0], 0.0)
