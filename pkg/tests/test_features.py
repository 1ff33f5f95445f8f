import datetime as dt

import numpy as np
import pytest

from flunowcast.errors import EmptyTrain, InsufficientHistory
from flunowcast.features import (
    LagSpec,
    SplitPlan,
    build_dataset,
    exogenous_features,
    expanding_splits,
    export_csv,
    lag_features,
)
from flunowcast.series import ResourceKind, SignalPanel, WeekIndex, WeeklySeries

W0 = WeekIndex(dt.date(2013, 9, 30))

UGC = [ResourceKind.SEARCH_QUERY, ResourceKind.SOCIAL_MEDIA,
       ResourceKind.SHOPPING, ResourceKind.QA_SERVICE]


def ramp_flu(n=120):
    """Flu value at week index k equals k."""
    return WeeklySeries("flu", ResourceKind.FLU_PATIENTS, W0, np.arange(n, dtype=float))


def panel_with_queries(counts=(1, 1, 1, 1), n=120):
    members = [ramp_flu(n)]
    for kind, count in zip(UGC, counts):
        for i in range(count):
            name = f"{kind.value}{i}"
            members.append(WeeklySeries(name, kind, W0,
                                        np.arange(n, dtype=float) * 10 + i))
    return SignalPanel(members), {
        kind: [f"{kind.value}{i}" for i in range(count)]
        for kind, count in zip(UGC, counts)
    }


class TestLagFeatures:
    def test_ramp_default_spec(self):
        vec = lag_features(ramp_flu(), LagSpec(), W0 + 55)
        assert vec.shape == (52,)
        assert vec[0] == 53.0 and vec[-1] == 2.0  # lag 2 first, lag 53 last

    def test_insufficient_history_at_boundary(self):
        with pytest.raises(InsufficientHistory):
            lag_features(ramp_flu(), LagSpec(), W0 + 52)  # needs week -1
        assert lag_features(ramp_flu(), LagSpec(), W0 + 53)[-1] == 0.0

    def test_degenerate_single_lag(self):
        vec = lag_features(ramp_flu(), LagSpec(min_lag=2, max_lag=2), W0 + 10)
        assert vec.tolist() == [8.0]

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            LagSpec(min_lag=0, max_lag=5)
        with pytest.raises(ValueError):
            LagSpec(min_lag=6, max_lag=5)
        assert LagSpec().n_lags == 52


class TestExogenousFeatures:
    def test_zero_signal_lag(self):
        panel, selected = panel_with_queries((1, 0, 0, 0))
        t = W0 + 7
        vec = exogenous_features(panel, selected, t, signal_lag=0)
        assert vec.tolist() == [panel["search0"].value_at(t)]

    def test_shift_semantics(self):
        panel, selected = panel_with_queries((1, 0, 0, 0))
        t = W0 + 7
        vec = exogenous_features(panel, selected, t, signal_lag=2)
        assert vec.tolist() == [panel["search0"].value_at(t - 2)]

    def test_paper_resource_counts_give_fifty(self):
        panel, selected = panel_with_queries((13, 18, 10, 9))
        vec = exogenous_features(panel, selected, W0 + 10, signal_lag=2)
        assert vec.shape == (50,)

    def test_insufficient_history(self):
        panel, selected = panel_with_queries((1, 0, 0, 0))
        with pytest.raises(InsufficientHistory):
            exogenous_features(panel, selected, W0 + 1, signal_lag=2)


class TestBuildDataset:
    def test_row_and_feature_counts(self):
        panel, selected = panel_with_queries((13, 18, 10, 9))
        ds = build_dataset(panel, selected, LagSpec(), 2,
                           start=W0 + 60, end=W0 + 69)
        assert ds.X.shape == (10, 102)  # 52 lags + 50 queries
        assert len(ds.feature_names) == 102
        assert ds.feature_names[0] == "flu_lag02"

    def test_lag_only_dataset(self):
        panel, _ = panel_with_queries((0, 0, 0, 0))
        ds = build_dataset(panel, {}, LagSpec(), 2, start=W0 + 60, end=W0 + 64)
        assert ds.X.shape == (5, 52)

    def test_insufficient_history(self):
        panel, selected = panel_with_queries((1, 0, 0, 0))
        with pytest.raises(InsufficientHistory):
            build_dataset(panel, selected, LagSpec(), 2, start=W0 + 10, end=W0 + 20)

    def test_rebuild_is_bitwise_identical(self):
        panel, selected = panel_with_queries((2, 1, 1, 1))
        a = build_dataset(panel, selected, LagSpec(), 2, start=W0 + 60, end=W0 + 80)
        b = build_dataset(panel, selected, LagSpec(), 2, start=W0 + 60, end=W0 + 80)
        assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)
        assert a.feature_names == b.feature_names

    def test_no_leakage_from_future_weeks(self):
        """Changing panel values after a row's information horizon cannot
        change that row's features or target."""
        n = 120
        panel, selected = panel_with_queries((1, 1, 0, 0), n=n)
        t = W0 + 80
        ds = build_dataset(panel, selected, LagSpec(), 2, start=W0 + 60, end=t)
        row = ds.X[ds.row_index(t)].copy()

        tampered = []
        for s in panel.members():
            values = s.values.copy()
            cut = (t - W0) + 1  # strictly after the target week
            values[cut:] += 1e6
            tampered.append(WeeklySeries(s.name, s.resource, s.start, values))
        ds2 = build_dataset(SignalPanel(tampered), selected, LagSpec(), 2,
                            start=W0 + 60, end=t)
        assert np.array_equal(ds2.X[ds2.row_index(t)], row)
        assert ds2.y[ds2.row_index(t)] == ds.y[ds.row_index(t)]


class TestExpandingSplits:
    def make_dataset(self, n_rows=5):
        panel, _ = panel_with_queries((0, 0, 0, 0))
        return build_dataset(panel, {}, LagSpec(), 2,
                             start=W0 + 60, end=W0 + 60 + n_rows - 1)

    def test_expanding_train_sizes(self):
        ds = self.make_dataset(5)
        plan = SplitPlan.of(W0 + 60, [(W0 + 63, W0 + 64)])
        sizes = [s.train_idx.size for s in expanding_splits(ds, plan)]
        assert sizes == [3, 4]

    def test_first_row_has_no_train(self):
        ds = self.make_dataset(5)
        # window starting at the first dataset row: nothing precedes it
        plan = SplitPlan(train_start=W0 + 59, eval_windows=((W0 + 60, W0 + 60),))
        with pytest.raises(EmptyTrain):
            list(expanding_splits(ds, plan))

    def test_split_count_matches_window_lengths(self):
        ds = self.make_dataset(40)
        plan = SplitPlan.of(W0 + 60, [(W0 + 70, W0 + 79),
                                      (W0 + 85, W0 + 89),
                                      (W0 + 95, W0 + 99)])
        splits = list(expanding_splits(ds, plan))
        assert len(splits) == 10 + 5 + 5

    def test_training_rows_strictly_precede_test(self):
        ds = self.make_dataset(30)
        plan = SplitPlan.of(W0 + 60, [(W0 + 75, W0 + 85)])
        for split in expanding_splits(ds, plan):
            train_weeks = [ds.weeks[i] for i in split.train_idx]
            assert all(w < split.test_week for w in train_weeks)
            assert all(w >= plan.train_start for w in train_weeks)

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            SplitPlan.of(W0 + 10, [(W0 + 5, W0 + 6)])            # before start
        with pytest.raises(ValueError):
            SplitPlan.of(W0, [(W0 + 5, W0 + 8), (W0 + 7, W0 + 9)])  # overlap


def test_export_csv(tmp_path):
    panel, selected = panel_with_queries((1, 0, 0, 0))
    ds = build_dataset(panel, selected, LagSpec(2, 3), 2, start=W0 + 10, end=W0 + 12)
    out = tmp_path / "ds.csv"
    export_csv(ds, out)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "target_date,y,flu_lag02,flu_lag03,search:search0"
    assert len(lines) == 4
