import datetime as dt
import json

import numpy as np
import pytest

from flunowcast.errors import AllActualsZero, DegenerateActuals, InsufficientHistory
from flunowcast.evaluation import (
    ModelSpec,
    ablate,
    backtest,
    compute_metrics,
    drop_labels,
    mae,
    mape,
    r2,
    write_plot_csv,
    write_report_json,
)
from flunowcast.features import LagSpec, SplitPlan, build_dataset, expanding_splits
from flunowcast.evaluation import _fit_predict_row
from flunowcast.rng import derive_seed
from flunowcast.series import (
    ResourceKind,
    SignalPanel,
    WeekIndex,
    standardize_apply,
    standardize_fit,
)
from flunowcast.synth import ProxyConfig, SynthConfig, gen_flu, gen_proxy

W0 = WeekIndex(dt.date(2013, 9, 30))
UGC = [ResourceKind.SEARCH_QUERY, ResourceKind.SOCIAL_MEDIA,
       ResourceKind.SHOPPING, ResourceKind.QA_SERVICE]


class TestMetrics:
    def test_r2_perfect_fit(self):
        assert r2([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0

    def test_r2_mean_predictor_is_zero(self):
        actual = [1.0, 2.0, 3.0]
        assert r2([2.0, 2.0, 2.0], actual) == 0.0

    def test_r2_hand_example(self):
        assert r2([1.0, 2.0, 2.0], [1.0, 2.0, 3.0]) == pytest.approx(0.5, abs=1e-12)

    def test_r2_degenerate_actuals(self):
        with pytest.raises(DegenerateActuals):
            r2([1.0, 2.0], [5.0, 5.0])

    def test_r2_train_mean_on_heldout_nonpositive(self):
        train_mean = 10.0
        heldout = [1.0, 2.0, 3.0]
        assert r2([train_mean] * 3, heldout) <= 0.0

    def test_mae(self):
        assert mae([1.0, 2.0], [1.0, 2.0]) == 0.0
        assert mae([2.0, 2.0, 2.0], [1.0, 2.0, 3.0]) == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert mae([10.0], [7.0]) == 3.0

    def test_mape(self):
        value, skipped = mape([110.0], [100.0])
        assert value == pytest.approx(10.0, abs=1e-12) and skipped == 0
        value, skipped = mape([1.0, 2.0], [1.0, 2.0])
        assert value == 0.0

    def test_mape_skips_zero_actuals(self):
        value, skipped = mape([5.0, 110.0], [0.0, 100.0])
        assert skipped == 1
        assert value == pytest.approx(10.0, abs=1e-12)

    def test_mape_all_zero(self):
        with pytest.raises(AllActualsZero):
            mape([1.0, 2.0], [0.0, 0.0])

    def test_report_recompute_bitwise(self):
        rs = np.random.RandomState(0)
        actual = rs.uniform(10, 100, 30)
        predicted = actual + rs.normal(0, 5, 30)
        a = compute_metrics(predicted, actual)
        b = compute_metrics(predicted, actual)
        assert (a.r2, a.mae, a.mape) == (b.r2, b.mae, b.mape)

    def test_r2_never_exceeds_one_and_errors_vanish_iff_equal(self):
        rs = np.random.RandomState(4)
        for _ in range(50):
            actual = rs.uniform(1, 100, 12)
            predicted = actual + rs.normal(0, rs.uniform(0, 20), 12)
            assert r2(predicted, actual) <= 1.0
            assert mae(predicted, actual) >= 0.0
            assert mape(predicted, actual)[0] >= 0.0
            if not np.array_equal(predicted, actual):
                assert mae(predicted, actual) > 0.0
        actual = rs.uniform(1, 100, 12)
        assert mae(actual, actual) == 0.0
        assert mape(actual, actual)[0] == 0.0


def informative_panel(seed=101, lead=2):
    flu = gen_flu(SynthConfig(years=5, seed=seed))
    members = [flu]
    for i, kind in enumerate(UGC):
        members.append(gen_proxy(flu, ProxyConfig(
            name=f"q{i}", resource=kind, lead_weeks=lead, gain=0.05,
            noise_sd=150.0, seed=derive_seed(seed, i + 1))))
    panel = SignalPanel(members)
    selected = {kind: [f"q{i}"] for i, kind in enumerate(UGC)}
    return panel, selected


def short_plan(panel, start_off=210, length=8):
    return SplitPlan.of(panel.start + 53,
                        [(panel.start + start_off, panel.start + start_off + length - 1)])


class TestBacktest:
    def test_lag_only_huber_has_signal(self):
        panel, _ = informative_panel()
        plan = short_plan(panel, length=12)
        result = backtest(panel, {}, ModelSpec("huber"), plan, seed=0)[0]
        assert result.metrics.r2 > 0.0
        assert len(result.predictions) == 12

    def test_forest_seeded_determinism(self):
        panel, selected = informative_panel()
        plan = short_plan(panel, length=4)
        spec = ModelSpec("forest", {"n_trees": 8})
        a = backtest(panel, selected, spec, plan, seed=5)[0]
        b = backtest(panel, selected, spec, plan, seed=5)[0]
        assert a.predictions == b.predictions
        assert (a.metrics.r2, a.metrics.mae, a.metrics.mape) == \
            (b.metrics.r2, b.metrics.mae, b.metrics.mape)

    def test_window_before_history_fails(self):
        panel, selected = informative_panel()
        # training start inside the lag horizon: the dataset build cannot
        # reach back far enough and the failure propagates out
        bad_plan = SplitPlan.of(panel.start + 10,
                                [(panel.start + 20, panel.start + 22)])
        with pytest.raises(InsufficientHistory):
            backtest(panel, selected, ModelSpec("huber"), bad_plan, seed=0)

    def test_splits_are_order_independent(self):
        """Processing splits in any order reproduces the sequential
        backtest bitwise (no hidden state between fits)."""
        panel, selected = informative_panel()
        plan = short_plan(panel, length=6)
        sequential = backtest(panel, selected, ModelSpec("huber"), plan, seed=3)[0]

        dataset = build_dataset(panel, selected, LagSpec(), 2,
                                start=plan.train_start, end=plan.last_week)
        splits = list(expanding_splits(dataset, plan))
        out = {}
        for orig_pos in [4, 0, 5, 2, 1, 3]:
            split = splits[orig_pos]
            x_train = dataset.X[split.train_idx]
            params = standardize_fit(x_train)
            pred = _fit_predict_row(
                ModelSpec("huber"),
                standardize_apply(x_train, params),
                dataset.y[split.train_idx],
                standardize_apply(dataset.X[split.test_idx][None, :], params)[0],
                seed=derive_seed(3, orig_pos))
            out[split.test_week] = pred
        reassembled = [out[w] for w, _, _ in sequential.predictions]
        assert reassembled == [p for _, _, p in sequential.predictions]

    def test_arima_ignores_exogenous_features(self):
        panel, selected = informative_panel()
        plan = short_plan(panel, length=4)
        with_queries = backtest(panel, selected, ModelSpec("arima"), plan, seed=0)[0]
        without = backtest(panel, {}, ModelSpec("arima"), plan, seed=0)[0]
        assert with_queries.predictions == without.predictions

    def test_multiple_windows_reported_separately(self):
        panel, selected = informative_panel()
        plan = SplitPlan.of(panel.start + 53,
                            [(panel.start + 150, panel.start + 153),
                             (panel.start + 210, panel.start + 213)])
        results = backtest(panel, selected, ModelSpec("huber"), plan, seed=0)
        assert len(results) == 2
        assert results[0].window != results[1].window


class TestAblate:
    def test_labels(self):
        assert drop_labels() == ["none", "search", "social", "shopping", "qa", "past"]

    def test_none_equals_plain_backtest(self):
        panel, selected = informative_panel()
        plan = short_plan(panel, length=4)
        plain = backtest(panel, selected, ModelSpec("huber"), plan, seed=7)[0]
        ablated = ablate(panel, selected, ModelSpec("huber"), plan,
                         drop="none", seed=7).results[0]
        assert ablated.predictions == plain.predictions

    def test_drop_past_collapses_on_noise_proxies(self):
        seed = 55
        flu = gen_flu(SynthConfig(years=5, seed=seed))
        members = [flu]
        rng_seeds = [derive_seed(seed, i + 1) for i in range(4)]
        for i, kind in enumerate(UGC):
            members.append(gen_proxy(flu, ProxyConfig(
                name=f"q{i}", resource=kind, gain=0.0, noise_sd=500.0,
                seed=rng_seeds[i])))
        panel = SignalPanel(members)
        selected = {kind: [f"q{i}"] for i, kind in enumerate(UGC)}
        plan = SplitPlan.of(panel.start + 53,
                            [(panel.start + 215, panel.start + 234)])
        full = ablate(panel, selected, ModelSpec("huber"), plan, drop="none",
                      seed=1).results[0]
        no_past = ablate(panel, selected, ModelSpec("huber"), plan, drop="past",
                         seed=1).results[0]
        assert full.metrics.r2 - no_past.metrics.r2 >= 0.2

    def test_drop_irrelevant_resource_barely_moves_r2(self):
        # window over the season-5 epidemic peak, where R^2 is well anchored
        panel, selected = informative_panel()
        plan = short_plan(panel, start_off=220, length=12)
        full = ablate(panel, selected, ModelSpec("huber"), plan, drop="none",
                      seed=2).results[0]
        no_shop = ablate(panel, selected, ModelSpec("huber"), plan,
                         drop="shopping", seed=2).results[0]
        assert full.metrics.r2 > 0.8
        assert abs(full.metrics.r2 - no_shop.metrics.r2) < 0.05

    def test_unknown_label(self):
        panel, selected = informative_panel()
        plan = short_plan(panel, length=4)
        with pytest.raises(ValueError):
            ablate(panel, selected, ModelSpec("huber"), plan, drop="flu")


class TestReports:
    def test_report_json_schema(self, tmp_path):
        panel, selected = informative_panel()
        plan = short_plan(panel, length=4)
        results = backtest(panel, selected, ModelSpec("huber"), plan, seed=0)
        out = tmp_path / "report.json"
        write_report_json(results, out)
        data = json.loads(out.read_text(encoding="utf-8"))
        block = data[0]
        assert set(block) == {"window", "model", "r2", "mae", "mape", "n",
                              "skipped_zero_actuals", "predictions"}
        assert block["model"] == "huber"
        assert {"date", "actual", "predicted"} == set(block["predictions"][0])

    def test_plot_csv(self, tmp_path):
        panel, selected = informative_panel()
        plan = short_plan(panel, length=3)
        result = backtest(panel, selected, ModelSpec("huber"), plan, seed=0)[0]
        out = tmp_path / "plot.csv"
        write_plot_csv(result, out)
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "date,actual,predicted"
        assert len(lines) == 4

    def test_metrics_recomputable_from_stored_predictions(self):
        panel, selected = informative_panel()
        plan = short_plan(panel, length=6)
        result = backtest(panel, selected, ModelSpec("huber"), plan, seed=0)[0]
        actual = [a for _, a, _ in result.predictions]
        predicted = [p for _, _, p in result.predictions]
        again = compute_metrics(predicted, actual)
        assert (again.r2, again.mae, again.mape) == \
            (result.metrics.r2, result.metrics.mae, result.metrics.mape)
