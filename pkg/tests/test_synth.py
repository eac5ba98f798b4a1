import math

import numpy as np
import pytest
from scipy.integrate import quad

from rtlquake.catalog import parse_catalog, write_catalog
from rtlquake.synth import (
    GrParams,
    OuParams,
    SynthSpec,
    _aftershock_times,
    fit_b_value,
    generate_catalog,
    omori_rate,
    sample_gr_magnitude,
)


class TestGrSampling:
    def test_boundary_u_near_one(self):
        gr = GrParams(b=1.0, m_min=2.0)
        assert sample_gr_magnitude(gr, 1.0 - 1e-12) == pytest.approx(2.0, abs=1e-9)

    def test_tenth_quantile(self):
        assert sample_gr_magnitude(GrParams(b=1.0, m_min=2.0), 0.1) == pytest.approx(3.0)

    def test_exceedance_fraction_monte_carlo(self, rng):
        gr = GrParams(b=1.0, m_min=3.0)
        mags = sample_gr_magnitude(gr, rng.random(100_000))
        frac = float((mags >= 4.0).mean())
        assert abs(frac - 0.1) < 0.01

    def test_invalid_b(self):
        with pytest.raises(ValueError):
            GrParams(b=0.0)


class TestBValue:
    def test_forced_unit_b(self):
        mags = np.full(50, 2.0 + math.log10(math.e))
        assert fit_b_value(mags, m_min=2.0) == pytest.approx(1.0)

    def test_recovers_generator_b(self, rng):
        gr = GrParams(b=1.2, m_min=3.0)
        mags = sample_gr_magnitude(gr, rng.random(100_000))
        b_hat = fit_b_value(mags, m_min=3.0)
        assert 1.17 <= b_hat <= 1.23

    def test_small_sample_errors(self):
        with pytest.raises(ValueError, match="n >= 30"):
            fit_b_value(np.full(10, 3.5), m_min=3.0)

    def test_degenerate_mean_errors(self):
        with pytest.raises(ValueError):
            fit_b_value(np.full(40, 3.0), m_min=3.0)

    def test_below_m_min_errors(self):
        with pytest.raises(ValueError):
            fit_b_value(np.array([2.0] + [3.5] * 40), m_min=3.0)


class TestOmoriRate:
    def test_rate_at_zero(self):
        ou = OuParams(c1=5.0, c2=0.5, p=1.2)
        assert omori_rate(0.0, ou) == pytest.approx(5.0 / 0.5**1.2)

    def test_arithmetic_case(self):
        assert omori_rate(9.0, OuParams(c1=10.0, c2=1.0, p=1.0)) == 1.0

    def test_monotone_decreasing(self):
        ou = OuParams(c1=3.0, c2=0.2, p=1.1)
        grid = omori_rate(np.linspace(0.0, 50.0, 200), ou)
        assert (np.diff(grid) < 0).all()


class TestGenerateCatalog:
    def test_zero_rate_empty(self):
        spec = SynthSpec(duration_days=100.0, background_rate=0.0, seed=1)
        assert len(generate_catalog(spec)) == 0

    def test_poisson_background_concentration(self):
        spec = SynthSpec(duration_days=1000.0, background_rate=10.0, seed=7)
        n = len(generate_catalog(spec))
        lam = 10_000.0
        assert abs(n - lam) <= 4.0 * math.sqrt(lam)

    def test_same_seed_byte_identical_csv(self, tmp_path):
        spec = SynthSpec(
            duration_days=200.0,
            background_rate=2.0,
            ou=OuParams(c1=5.0, c2=0.2, p=1.1),
            aftershock_trigger_mag=4.5,
            seed=11,
        )
        paths = [str(tmp_path / f"cat{i}.csv") for i in range(2)]
        for p in paths:
            write_catalog(generate_catalog(spec), p)
        assert open(paths[0], "rb").read() == open(paths[1], "rb").read()

    def test_distinct_seeds_distinct_catalogs(self, tmp_path):
        base = dict(duration_days=100.0, background_rate=3.0)
        outs = set()
        for seed in (1, 2, 3):
            cat = generate_catalog(SynthSpec(seed=seed, **base))
            outs.add(tuple((e.time, e.mag) for e in cat.events))
        assert len(outs) == 3

    def test_aftershocks_follow_parents_within_duration(self):
        spec = SynthSpec(
            duration_days=300.0,
            background_rate=1.0,
            ou=OuParams(c1=8.0, c2=0.2, p=1.1),
            aftershock_trigger_mag=4.0,
            gr=GrParams(b=0.8, m_min=3.5),
            seed=3,
        )
        cat = generate_catalog(spec)
        times = [e.time for e in cat.events]
        assert times == sorted(times)
        assert all(0.0 <= t <= 300.0 for t in times)
        first_trigger = min(
            (e.time for e in cat.events if e.mag >= 4.0), default=None
        )
        assert first_trigger is not None
        assert min(times) >= 0.0

    def test_b_value_recovered_from_catalog(self):
        spec = SynthSpec(
            duration_days=5000.0, background_rate=10.0, gr=GrParams(b=1.1, m_min=3.0), seed=5
        )
        cat = generate_catalog(spec)
        mags = cat.mags()
        b_hat = fit_b_value(mags, m_min=3.0)
        se = b_hat / math.sqrt(len(mags))
        assert abs(b_hat - 1.1) <= 3.0 * se

    def test_catalog_csv_parses_back(self, tmp_path):
        spec = SynthSpec(duration_days=50.0, background_rate=2.0, seed=2)
        path = str(tmp_path / "cat.csv")
        write_catalog(generate_catalog(spec), path)
        assert len(parse_catalog(path)) > 0


class TestThinning:
    def test_no_aftershock_precedes_parent_or_horizon(self, rng):
        ou = OuParams(c1=20.0, c2=0.3, p=1.2)
        for _ in range(100):
            times = _aftershock_times(rng, ou, horizon=30.0)
            assert all(0.0 < t <= 30.0 for t in times)

    def test_binned_counts_match_integral_oracle(self, rng):
        ou = OuParams(c1=30.0, c2=0.5, p=1.3)
        n_01 = n_12 = 0
        for _ in range(1000):
            for t in _aftershock_times(rng, ou, horizon=2.0):
                if t <= 1.0:
                    n_01 += 1
                else:
                    n_12 += 1
        expect_01 = quad(lambda t: omori_rate(t, ou), 0.0, 1.0)[0]
        expect_12 = quad(lambda t: omori_rate(t, ou), 1.0, 2.0)[0]
        assert n_12 > 0
        assert abs((n_01 / n_12) / (expect_01 / expect_12) - 1.0) < 0.10
