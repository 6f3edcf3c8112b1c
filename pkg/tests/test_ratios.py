import numpy as np
import pytest
from scipy.integrate import quad

from dicke_chaos import ratios as rt


@pytest.fixture(scope="module")
def goe_bulk_ratios():
    """~5000 spacing ratios from the bulk of two GOE matrices."""
    rng = np.random.default_rng(7)
    chunks = []
    for _ in range(2):
        n = 3000
        a = rng.standard_normal((n, n))
        a = (a + a.T) / 2
        a[np.diag_indices(n)] *= np.sqrt(2)
        w = np.linalg.eigvalsh(a)
        bulk = w[n // 4 : -n // 4]
        chunks.append(rt.spacing_ratios(bulk).ratios)
    return np.concatenate(chunks)


class TestSpacingRatios:
    def test_equal_spacings(self):
        assert np.all(rt.spacing_ratios(np.arange(5.0)).ratios == 1.0)

    def test_direct_arithmetic(self):
        r = rt.spacing_ratios(np.array([0.0, 1.0, 3.0])).ratios
        assert r.tolist() == [0.5]

    def test_length_contract(self):
        levels = np.sort(np.random.default_rng(0).uniform(size=50))
        assert rt.spacing_ratios(levels).ratios.size == 48

    def test_bounded(self):
        levels = np.sort(np.random.default_rng(1).uniform(size=500))
        r = rt.spacing_ratios(levels).ratios
        assert np.all((r >= 0) & (r <= 1))

    def test_too_few_levels(self):
        with pytest.raises(rt.InsufficientDataError):
            rt.spacing_ratios(np.array([0.0, 1.0]))

    def test_degenerate_flagged(self):
        sample = rt.spacing_ratios(np.array([0.0, 1.0, 1.0, 2.0]))
        assert sample.n_degenerate == 2
        assert np.all(np.isfinite(sample.ratios))

    def test_goe_bulk_mean(self, goe_bulk_ratios):
        assert np.mean(goe_bulk_ratios) == pytest.approx(rt.MEAN_R_GOE, abs=0.01)

    def test_scale_invariance(self):
        rng = np.random.default_rng(3)
        levels = np.sort(rng.uniform(size=200))
        base = rt.spacing_ratios(levels).ratios
        for a in (0.5, 2.0, 1024.0):  # power-of-two scales are FP-exact
            assert np.array_equal(rt.spacing_ratios(a * levels).ratios, base)
        scaled = rt.spacing_ratios(3.7 * levels + 0.9).ratios
        assert np.allclose(scaled, base, rtol=1e-10)

    def test_reverse_invariance(self):
        rng = np.random.default_rng(4)
        levels = np.sort(rng.uniform(size=100))
        fwd = np.sort(rt.spacing_ratios(levels).ratios)
        rev = np.sort(rt.spacing_ratios(np.sort(-levels)).ratios)
        assert np.allclose(fwd, rev, atol=1e-12)


class TestReferenceDensities:
    def test_endpoints(self):
        goe, poi = rt.reference_densities(0.0)
        assert goe == 0.0
        assert poi == 2.0
        goe1, poi1 = rt.reference_densities(1.0)
        assert goe1 == pytest.approx((27 / 4) * 2 / 3**2.5, abs=1e-14)
        assert goe1 == pytest.approx(0.8660254, abs=1e-6)
        assert poi1 == 0.5

    def test_normalization_by_quadrature(self):
        for dens in (rt.goe_density, rt.poisson_density):
            val, err = quad(dens, 0, 1, epsabs=1e-12)
            assert val == pytest.approx(1.0, abs=1e-10)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            rt.goe_density(1.5)
        with pytest.raises(ValueError):
            rt.poisson_density(-0.1)

    def test_cdfs_match_quadrature(self):
        for r in (0.1, 0.35, 0.6, 0.95):
            q_goe, _ = quad(rt.goe_density, 0, r, epsabs=1e-13)
            q_poi, _ = quad(rt.poisson_density, 0, r, epsabs=1e-13)
            assert rt.goe_cdf(r) == pytest.approx(q_goe, abs=1e-12)
            assert rt.poisson_cdf(r) == pytest.approx(q_poi, abs=1e-12)

    def test_reference_means_match_quadrature(self):
        mean_goe, _ = quad(lambda r: r * rt.goe_density(r), 0, 1, epsabs=1e-13)
        mean_poi, _ = quad(lambda r: r * rt.poisson_density(r), 0, 1, epsabs=1e-13)
        assert mean_goe == pytest.approx(rt.MEAN_R_GOE, abs=1e-10)
        assert mean_poi == pytest.approx(rt.MEAN_R_POISSON, abs=1e-10)


class TestMeanAndRescaled:
    def test_poisson_fixed_point(self):
        sample = rt.RatioSample(ratios=np.full(10, rt.MEAN_R_POISSON))
        _, rescaled = rt.mean_and_rescaled(sample)
        assert rescaled == pytest.approx(0.0, abs=1e-14)

    def test_goe_fixed_point(self):
        sample = rt.RatioSample(ratios=np.full(10, rt.MEAN_R_GOE))
        _, rescaled = rt.mean_and_rescaled(sample)
        assert rescaled == pytest.approx(1.0, abs=1e-14)

    def test_empty_rejected(self):
        with pytest.raises(rt.InsufficientDataError):
            rt.mean_and_rescaled(rt.RatioSample(ratios=np.array([])))

    def test_goe_sample_ks_ordering(self, goe_bulk_ratios):
        report = rt.ratio_report(rt.RatioSample(ratios=goe_bulk_ratios))
        assert report.ks_goe < report.ks_poisson
        assert report.rescaled_mean_r > 0.9


class TestRatioReport:
    def test_histogram_normalized(self):
        rng = np.random.default_rng(5)
        sample = rt.RatioSample(ratios=rng.uniform(size=4000))
        rep = rt.ratio_report(sample)
        integral = np.sum(rep.densities * np.diff(rep.bin_edges))
        assert integral == pytest.approx(1.0, abs=1e-9)

    def test_histogram_counts_reproduce_sample_size(self):
        rng = np.random.default_rng(6)
        r = rng.uniform(size=777)
        rep = rt.ratio_report(rt.RatioSample(ratios=r))
        counts = rep.densities * r.size * np.diff(rep.bin_edges)
        assert np.sum(np.rint(counts)) == r.size


class TestWindowedScan:
    def test_equally_spaced_spectrum(self):
        eps = np.arange(500.0)
        expected = abs(1.0 - rt.MEAN_R_POISSON) / (rt.MEAN_R_GOE - rt.MEAN_R_POISSON)
        for _, rescaled in rt.windowed_ratio_scan(eps, window_size=150, stride=100):
            assert rescaled == pytest.approx(expected, abs=1e-12)

    def test_small_window_rejected(self):
        with pytest.raises(ValueError):
            rt.windowed_ratio_scan(np.arange(100.0), window_size=5)

    def test_short_spectrum_rejected(self):
        with pytest.raises(rt.InsufficientDataError):
            rt.windowed_ratio_scan(np.arange(100.0), window_size=150)
