import numpy as np
import pytest

from rtlquake.catalog import Catalog, CatalogEvent, build_index, surface_distance_km
from rtlquake.dataset import (
    Dataset,
    FeatureNormalizer,
    LabelRule,
    build_dataset,
    chronological_split,
    feature_name,
    make_label,
    oversample,
    undersample,
)
from rtlquake.rtl import RtlConfig, rtl_series
from tests.conftest import random_catalog

# latitude offset whose haversine distance from (0, 0) is exactly 50.0 km
# (found by an ulp scan; verified below before use)
LAT_AT_50KM = 0.449660181862269

RULE = LabelRule(m_c=5.0, r_c_km=50.0, delta_c_days=10.0, t_c_days=180.0)


def single_event_index(event):
    return build_index(Catalog(events=[event]), cell_size_km=60.0)


class TestMakeLabel:
    def test_no_events(self):
        idx = build_index(Catalog(events=[]), cell_size_km=50.0)
        assert make_label(idx, (0.0, 0.0), 100.0, RULE) == 0

    def test_distance_boundary_inclusive_at_exactly_rc(self):
        assert surface_distance_km((0.0, 0.0), (LAT_AT_50KM, 0.0)) == 50.0
        event = CatalogEvent(time=200.0, lat=LAT_AT_50KM, lon=0.0, mag=6.0)
        assert make_label(single_event_index(event), (0.0, 0.0), 100.0, RULE) == 1

    def test_lower_time_bound_strict(self):
        event = CatalogEvent(time=110.0, lat=0.0, lon=0.0, mag=6.0)  # t_e - t == 10
        assert make_label(single_event_index(event), (0.0, 0.0), 100.0, RULE) == 0
        just_after = CatalogEvent(time=110.5, lat=0.0, lon=0.0, mag=6.0)
        assert make_label(single_event_index(just_after), (0.0, 0.0), 100.0, RULE) == 1

    def test_upper_time_bound_strict(self):
        event = CatalogEvent(time=280.0, lat=0.0, lon=0.0, mag=6.0)  # t_e - t == 180
        assert make_label(single_event_index(event), (0.0, 0.0), 100.0, RULE) == 0

    def test_magnitude_below_threshold(self):
        event = CatalogEvent(time=200.0, lat=0.0, lon=0.0, mag=4.9)
        assert make_label(single_event_index(event), (0.0, 0.0), 100.0, RULE) == 0

    def test_distance_beyond_rc(self):
        event = CatalogEvent(time=200.0, lat=1.0, lon=0.0, mag=6.0)  # ~111 km away
        assert make_label(single_event_index(event), (0.0, 0.0), 100.0, RULE) == 0


class TestBuildDataset:
    def make_inputs(self, rng, n=60, t_span=(0.0, 400.0)):
        cat = random_catalog(rng, n, t_span=t_span, mag_span=(3.0, 6.5))
        idx = build_index(cat, cell_size_km=60.0)
        return cat, idx

    def test_single_config_column_count(self, rng):
        cat, idx = self.make_inputs(rng)
        cfg = RtlConfig(r0_km=50.0, t0_days=5.0, min_mag=3.0)
        ds, _ = build_dataset(cat, idx, [cfg], n_lags=20, lag_step_days=1.0,
                              rule=LabelRule(t_c_days=30.0))
        assert ds.n_features == 20
        assert ds.feature_names[0] == "rtl_r50_t5_lag00"

    def test_sixteen_configs_give_320_columns(self, rng):
        cat, idx = self.make_inputs(rng, n=80, t_span=(0.0, 800.0))
        configs = [
            RtlConfig(r0_km=r0, t0_days=t0, min_mag=3.0)
            for r0 in (10.0, 25.0, 50.0, 100.0)
            for t0 in (3.0, 6.0, 9.0, 12.0)
        ]
        ds, _ = build_dataset(cat, idx, configs, n_lags=20, lag_step_days=1.0,
                              rule=LabelRule(t_c_days=30.0))
        assert ds.n_features == 320
        assert len(set(ds.feature_names)) == 320

    def test_rows_match_per_row_recompute(self, rng):
        events = [
            CatalogEvent(time=t, lat=0.05 * i, lon=0.0, mag=4.0 + 0.5 * i)
            for i, t in enumerate((0.0, 10.0, 20.0, 25.0, 60.0))
        ]
        cat = Catalog(events=events)
        idx = build_index(cat, cell_size_km=60.0)
        cfg = RtlConfig(r0_km=50.0, t0_days=5.0, min_mag=3.0)
        rule = LabelRule(m_c=4.5, r_c_km=50.0, delta_c_days=2.0, t_c_days=30.0)
        ds, report = build_dataset(cat, idx, [cfg], n_lags=3, lag_step_days=1.0, rule=rule)
        assert report.n_samples == len(ds)
        for i in range(len(ds)):
            point = tuple(ds.sample_locations[i])
            t = ds.sample_times[i]
            np.testing.assert_array_equal(
                ds.features[i], rtl_series(idx, point, t, cfg, n_lags=3, lag_step_days=1.0)
            )
            assert ds.labels[i] == make_label(idx, point, t, rule)

    def test_drop_accounting(self, rng):
        cat, idx = self.make_inputs(rng, n=50, t_span=(0.0, 400.0))
        cfg = RtlConfig(r0_km=50.0, t0_days=10.0, min_mag=3.0)
        rule = LabelRule(t_c_days=50.0)
        ds, report = build_dataset(cat, idx, [cfg], n_lags=5, lag_step_days=1.0, rule=rule)
        lookback = 4 * 1.0 + 10.0
        expected_kept = [
            e for e in cat.events
            if e.time - lookback >= cat.start_time and e.time + 50.0 <= cat.end_time
        ]
        assert len(ds) == len(expected_kept)
        assert report.n_dropped_before_start + report.n_dropped_after_end + len(ds) == 50

    def test_no_temporal_leakage(self):
        # an event exactly at the sample time contributes to neither side,
        # and an event exactly at t + delta_c does not trigger the label
        t = 100.0
        events = [
            CatalogEvent(time=0.0, lat=0.0, lon=0.0, mag=5.0),
            CatalogEvent(time=t, lat=0.0, lon=0.0, mag=7.0),
            CatalogEvent(time=t + RULE.delta_c_days, lat=0.0, lon=0.0, mag=7.0),
        ]
        idx = build_index(Catalog(events=events), cell_size_km=60.0)
        cfg = RtlConfig(r0_km=50.0, t0_days=50.0, min_mag=5.0)
        series = rtl_series(idx, (0.0, 0.0), t, cfg, n_lags=1)
        lone = rtl_series(
            build_index(Catalog(events=events[:1]), cell_size_km=60.0), (0.0, 0.0), t, cfg, 1
        )
        np.testing.assert_array_equal(series, lone)
        assert make_label(idx, (0.0, 0.0), t, RULE) == 0

    def test_zero_usable_rows_errors(self, rng):
        cat, idx = self.make_inputs(rng, n=10, t_span=(0.0, 5.0))
        cfg = RtlConfig(r0_km=50.0, t0_days=100.0, min_mag=3.0)
        with pytest.raises(ValueError, match="no usable samples"):
            build_dataset(cat, idx, [cfg], n_lags=20, lag_step_days=1.0, rule=RULE)

    def test_sample_min_mag_filters_rows(self, rng):
        cat, idx = self.make_inputs(rng, n=60)
        cfg = RtlConfig(r0_km=50.0, t0_days=5.0, min_mag=3.0)
        rule = LabelRule(t_c_days=30.0)
        all_rows, _ = build_dataset(cat, idx, [cfg], 2, 1.0, rule)
        big_rows, _ = build_dataset(cat, idx, [cfg], 2, 1.0, rule, sample_min_mag=5.0)
        assert len(big_rows) < len(all_rows)

    def test_config_order_independent_up_to_column_names(self, rng):
        cat, idx = self.make_inputs(rng, n=60)
        a = RtlConfig(r0_km=30.0, t0_days=5.0, min_mag=3.0)
        b = RtlConfig(r0_km=60.0, t0_days=8.0, min_mag=3.0)
        rule = LabelRule(t_c_days=30.0)
        ds_ab, _ = build_dataset(cat, idx, [a, b], 3, 1.0, rule)
        ds_ba, _ = build_dataset(cat, idx, [b, a], 3, 1.0, rule)
        realigned = ds_ba.select_columns(ds_ab.feature_names)
        np.testing.assert_array_equal(realigned.features, ds_ab.features)
        np.testing.assert_array_equal(realigned.labels, ds_ab.labels)

    def test_duplicate_configs_rejected(self, rng):
        cat, idx = self.make_inputs(rng)
        cfg = RtlConfig(r0_km=50.0, t0_days=5.0, min_mag=3.0)
        with pytest.raises(ValueError, match="duplicate"):
            build_dataset(cat, idx, [cfg, cfg], 2, 1.0, LabelRule(t_c_days=30.0))


class TestFeatureNormalizer:
    def test_zscore_small_column(self):
        norm = FeatureNormalizer().fit(np.array([[1.0], [2.0], [3.0]]))
        out = norm.transform(np.array([[1.0], [2.0], [3.0]]))
        np.testing.assert_allclose(out[:, 0], [-1.224744871391589, 0.0, 1.224744871391589],
                                   atol=1e-9)

    def test_constant_column_passes_through(self):
        X = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
        norm = FeatureNormalizer().fit(X)
        out = norm.transform(X)
        np.testing.assert_array_equal(out[:, 0], [0.0, 0.0, 0.0])
        assert norm.constant_columns_.tolist() == [True, False]

    def test_test_rows_use_train_stats(self):
        train = np.array([[0.0], [2.0]])  # mean 1, std 1
        norm = FeatureNormalizer().fit(train)
        out = norm.transform(np.array([[11.0]]))
        assert out[0, 0] == 10.0

    def test_zscore_invariants_on_train(self, rng):
        X = rng.normal(3.0, 5.0, size=(200, 7))
        out = FeatureNormalizer().fit(X).transform(X)
        assert np.abs(out.mean(axis=0)).max() < 1e-9
        assert np.abs(out.std(axis=0) - 1.0).max() < 1e-9
        assert np.isfinite(out).all()

    def test_moving_average_trailing_semantics(self):
        X = np.array([[1.0], [3.0], [5.0], [7.0]])
        norm = FeatureNormalizer(mode="moving_average", window=2).fit(X)
        out = norm.transform(X)
        # trailing means: 1, 2, 4, 6 -> residuals 0, 1, 1, 1; train std of
        # residuals = std([0,1,1,1]) = sqrt(3)/4 * 2 = 0.4330127018922193
        resid = np.array([0.0, 1.0, 1.0, 1.0])
        expected = resid / resid.std()
        np.testing.assert_allclose(out[:, 0], expected, atol=1e-12)

    def test_window_larger_than_train_errors(self):
        with pytest.raises(ValueError, match="window"):
            FeatureNormalizer(mode="moving_average", window=10).fit(np.zeros((4, 2)))

    def test_unknown_mode_errors(self):
        with pytest.raises(ValueError):
            FeatureNormalizer(mode="minmax").fit(np.zeros((4, 2)))

    def test_stats_csv(self, tmp_path):
        X = np.array([[1.0, 4.0], [3.0, 4.0]])
        norm = FeatureNormalizer().fit(X)
        path = str(tmp_path / "stats.csv")
        norm.to_csv(path, ["a", "b"])
        lines = open(path).read().splitlines()
        assert lines[0] == "feature,mean,std"
        assert lines[1] == "a,2.0,1.0"
        assert lines[2] == "b,4.0,1.0"


def toy_dataset(n=10, n_pos=None, times=None):
    labels = np.zeros(n, dtype=int)
    if n_pos:
        labels[:n_pos] = 1
    return Dataset(
        features=np.arange(2 * n, dtype=float).reshape(n, 2),
        labels=labels,
        sample_times=np.arange(n, dtype=float) if times is None else np.asarray(times),
        sample_locations=np.zeros((n, 2)),
        feature_names=["f0", "f1"],
    )


class TestChronologicalSplit:
    def test_seventy_thirty(self):
        train, test = chronological_split(toy_dataset(10), 0.7)
        assert len(train) == 7 and len(test) == 3

    def test_ordering_contract(self, rng):
        ds = toy_dataset(20, times=rng.permutation(20).astype(float))
        train, test = chronological_split(ds, 0.6)
        assert train.sample_times.max() <= test.sample_times.min()

    def test_high_fraction_keeps_test_nonempty(self):
        train, test = chronological_split(toy_dataset(10), 0.99)
        assert len(train) == 9 and len(test) == 1

    def test_tiny_dataset_errors(self):
        with pytest.raises(ValueError):
            chronological_split(toy_dataset(1), 0.7)

    def test_bad_fraction_errors(self):
        with pytest.raises(ValueError):
            chronological_split(toy_dataset(10), 1.0)


class TestResampling:
    def test_oversample_counts(self):
        ds = toy_dataset(100, n_pos=10)
        out = oversample(ds, seed=5)
        neg, pos = out.class_counts()
        assert (neg, pos) == (90, 90)

    def test_undersample_counts(self):
        ds = toy_dataset(100, n_pos=10)
        out = undersample(ds, seed=5)
        neg, pos = out.class_counts()
        assert (neg, pos) == (10, 10)

    def test_deterministic_given_seed(self):
        ds = toy_dataset(100, n_pos=10)
        a, b = oversample(ds, seed=9), oversample(ds, seed=9)
        np.testing.assert_array_equal(a.features, b.features)
        c, d = undersample(ds, seed=9), undersample(ds, seed=9)
        np.testing.assert_array_equal(c.features, d.features)

    def test_rows_copied_verbatim(self):
        ds = toy_dataset(40, n_pos=5)
        originals = {tuple(row) for row in ds.features}
        for out in (oversample(ds, 1), undersample(ds, 1)):
            assert {tuple(row) for row in out.features} <= originals

    def test_oversample_keeps_all_original_rows(self):
        ds = toy_dataset(40, n_pos=5)
        out = oversample(ds, 3)
        assert {tuple(r) for r in ds.features} <= {tuple(r) for r in out.features}

    def test_single_class_errors(self):
        ds = toy_dataset(10)
        with pytest.raises(ValueError):
            oversample(ds, 0)
        with pytest.raises(ValueError):
            undersample(ds, 0)

    def test_result_stays_time_ordered(self):
        ds = toy_dataset(50, n_pos=7)
        for out in (oversample(ds, 2), undersample(ds, 2)):
            assert (np.diff(out.sample_times) >= 0).all()


class TestDatasetCsv:
    def test_roundtrip(self, tmp_path, rng):
        ds = toy_dataset(12, n_pos=4, times=rng.uniform(0, 100, 12))
        path = str(tmp_path / "ds.csv")
        ds.to_csv(path)
        back = Dataset.from_csv(path)
        np.testing.assert_array_equal(back.features, ds.features)
        np.testing.assert_array_equal(back.labels, ds.labels)
        np.testing.assert_array_equal(back.sample_times, ds.sample_times)
        assert back.feature_names == ds.feature_names

    def test_select_columns(self):
        ds = toy_dataset(5)
        sub = ds.select_columns(["f1"])
        np.testing.assert_array_equal(sub.features[:, 0], ds.features[:, 1])
        with pytest.raises(ValueError, match="lacks"):
            ds.select_columns(["missing"])

    def test_duplicate_feature_names_rejected(self):
        with pytest.raises(ValueError, match="unique"):
            Dataset(
                features=np.zeros((2, 2)),
                labels=np.zeros(2, dtype=int),
                sample_times=np.zeros(2),
                sample_locations=np.zeros((2, 2)),
                feature_names=["a", "a"],
            )
