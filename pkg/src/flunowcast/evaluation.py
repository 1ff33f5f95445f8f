"""Accuracy metrics, rolling-origin backtests over season windows, and the
leave-one-resource-out ablation.

Every backtest step refits the chosen model on all rows prior to the test
week (expanding window), with feature standardization refit on exactly
those training rows so nothing leaks from the future. Splits are fully
independent of each other -- no state is carried between them -- so a
concurrent evaluation reassembled in week order is bitwise identical to
the sequential one.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import AllActualsZero, DegenerateActuals
from .features import (
    DEFAULT_SIGNAL_LAG,
    LagSpec,
    SelectedQueries,
    SplitPlan,
    SupervisedDataset,
    build_dataset,
    expanding_splits,
)
from .models import (
    fit_arima,
    fit_forest,
    fit_huber,
    fit_lasso,
    fit_svr_linear,
    forecast_arima,
)
from .rng import derive_seed
from .series import (
    ResourceKind,
    SignalPanel,
    WeekIndex,
    standardize_apply,
    standardize_fit,
)

PAST_LAGS = "past"  # ablation label for the flu-history block

MODEL_KINDS = ("lasso", "huber", "svr", "forest", "arima")


@dataclass
class MetricReport:
    r2: float
    mae: float
    mape: float
    n: int
    skipped_zero_actuals: int


@dataclass
class BacktestResult:
    window: tuple[WeekIndex, WeekIndex]
    model_kind: str
    predictions: list[tuple[WeekIndex, float, float]]  # (week, actual, predicted)
    metrics: MetricReport


@dataclass
class AblationResult:
    dropped: str  # "none", a resource tag, or "past"
    results: list[BacktestResult]


def r2(predicted, actual) -> float:
    """Coefficient of determination, 1 - SSres/SStot."""
    f = np.asarray(predicted, dtype=float)
    a = np.asarray(actual, dtype=float)
    if f.size != a.size:
        raise ValueError("length mismatch")
    if a.size < 2:
        raise ValueError("need at least 2 points")
    ss_tot = float(np.sum((a - a.mean()) ** 2))
    if ss_tot == 0.0:
        raise DegenerateActuals("constant actuals leave R^2 undefined")
    ss_res = float(np.sum((f - a) ** 2))
    return 1.0 - ss_res / ss_tot


def mae(predicted, actual) -> float:
    f = np.asarray(predicted, dtype=float)
    a = np.asarray(actual, dtype=float)
    if f.size != a.size:
        raise ValueError("length mismatch")
    if a.size < 1:
        raise ValueError("need at least 1 point")
    return float(np.mean(np.abs(f - a)))


def mape(predicted, actual) -> tuple[float, int]:
    """Mean absolute percentage error over nonzero actuals.

    Returns (percentage, number of skipped zero-actual points); raises
    AllActualsZero when no point is usable.
    """
    f = np.asarray(predicted, dtype=float)
    a = np.asarray(actual, dtype=float)
    if f.size != a.size:
        raise ValueError("length mismatch")
    usable = a != 0.0
    skipped = int((~usable).sum())
    if not usable.any():
        raise AllActualsZero("every actual value is zero")
    pct = np.abs((f[usable] - a[usable]) / a[usable]) * 100.0
    return float(pct.mean()), skipped


def compute_metrics(predicted, actual) -> MetricReport:
    mape_value, skipped = mape(predicted, actual)
    return MetricReport(r2=r2(predicted, actual), mae=mae(predicted, actual),
                        mape=mape_value, n=len(actual),
                        skipped_zero_actuals=skipped)


@dataclass(frozen=True)
class ModelSpec:
    """Which predictor to run, plus hyperparameter overrides.

    Defaults: lasso lambda 1.0; huber delta 1.0; svr C 1.0, epsilon 0.1;
    forest 100 trees, unlimited depth, min_leaf 2, bootstrap, ceil(p/3)
    features per split; arima order (3,1,2).
    """

    kind: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")


def _fit_predict_row(spec: ModelSpec, x_train: np.ndarray, y_train: np.ndarray,
                     x_test: np.ndarray, seed: int) -> float:
    opts = spec.options
    if spec.kind == "lasso":
        model = fit_lasso(x_train, y_train, lam=opts.get("lambda", 1.0),
                          include_intercept=opts.get("intercept", True))
    elif spec.kind == "huber":
        model = fit_huber(x_train, y_train, delta=opts.get("delta", 1.0),
                          sigma=opts.get("sigma"),
                          include_intercept=opts.get("intercept", True))
    elif spec.kind == "svr":
        model = fit_svr_linear(x_train, y_train, c_penalty=opts.get("c", 1.0),
                               epsilon=opts.get("epsilon", 0.1))
    elif spec.kind == "forest":
        model = fit_forest(x_train, y_train,
                           n_trees=opts.get("n_trees", 100),
                           max_depth=opts.get("max_depth"),
                           min_leaf=opts.get("min_leaf", 2),
                           bootstrap=opts.get("bootstrap", True),
                           max_features=opts.get("max_features"),
                           seed=seed)
    else:
        raise ValueError(f"unsupported per-row model {spec.kind!r}")
    return float(model.predict(x_test))


def _arima_backtest(panel: SignalPanel, plan: SplitPlan, spec: ModelSpec,
                    horizon: int, history_depth: int) -> list[BacktestResult]:
    """Past-only baseline: refit on the flu series up to (test week -
    horizon) and forecast ``horizon`` steps ahead."""
    flu = panel.flu()
    order = tuple(spec.options.get("order", (3, 1, 2)))
    results = []
    for win_start, win_end in plan.eval_windows:
        preds: list[tuple[WeekIndex, float, float]] = []
        t = win_start
        while t <= win_end:
            cutoff = t - horizon
            history = flu.slice(max(flu.start, plan.train_start - history_depth), cutoff)
            model = fit_arima(history, order=order)
            forecast = forecast_arima(model, history, horizon)
            preds.append((t, flu.value_at(t), float(forecast[-1])))
            t = t + 1
        actual = [a for _, a, _ in preds]
        predicted = [p for _, _, p in preds]
        results.append(BacktestResult(window=(win_start, win_end),
                                      model_kind="arima", predictions=preds,
                                      metrics=compute_metrics(predicted, actual)))
    return results


def backtest(panel: SignalPanel, selected: SelectedQueries, spec: ModelSpec,
             plan: SplitPlan, lag_spec: LagSpec = LagSpec(),
             signal_lag: int = DEFAULT_SIGNAL_LAG, seed: int = 0,
             dataset: SupervisedDataset | None = None) -> list[BacktestResult]:
    """One BacktestResult per eval window.

    ARIMA ignores the exogenous features entirely (past-only protocol) and
    forecasts ``lag_spec.min_lag`` weeks ahead so it sees exactly the same
    information horizon as the lag-feature models.
    """
    if spec.kind == "arima":
        return _arima_backtest(panel, plan, spec, horizon=lag_spec.min_lag,
                               history_depth=lag_spec.max_lag)

    if dataset is None:
        dataset = build_dataset(panel, selected, lag_spec, signal_lag,
                                start=plan.train_start, end=plan.last_week)
    window_preds: dict[tuple[WeekIndex, WeekIndex], list] = {
        win: [] for win in plan.eval_windows}
    for split_no, split in enumerate(expanding_splits(dataset, plan)):
        x_train = dataset.X[split.train_idx]
        y_train = dataset.y[split.train_idx]
        params = standardize_fit(x_train)
        x_train_std = standardize_apply(x_train, params)
        x_test_std = standardize_apply(dataset.X[split.test_idx][None, :], params)[0]
        pred = _fit_predict_row(spec, x_train_std, y_train, x_test_std,
                                seed=derive_seed(seed, split_no))
        for win in plan.eval_windows:
            if win[0] <= split.test_week <= win[1]:
                window_preds[win].append(
                    (split.test_week, float(dataset.y[split.test_idx]), pred))
                break
    results = []
    for win in plan.eval_windows:
        preds = window_preds[win]
        actual = [a for _, a, _ in preds]
        predicted = [p for _, _, p in preds]
        results.append(BacktestResult(window=win, model_kind=spec.kind,
                                      predictions=preds,
                                      metrics=compute_metrics(predicted, actual)))
    return results


def drop_labels() -> list[str]:
    """The six ablation rows: everything, then each droppable block."""
    return ["none", *(kind.value for kind in ResourceKind
                      if kind is not ResourceKind.FLU_PATIENTS), PAST_LAGS]


def ablate(panel: SignalPanel, selected: SelectedQueries, spec: ModelSpec,
           plan: SplitPlan, drop: str = "none", lag_spec: LagSpec = LagSpec(),
           signal_lag: int = DEFAULT_SIGNAL_LAG, seed: int = 0) -> AblationResult:
    """Backtest with one feature block removed.

    ``drop`` is "none" (identical to a plain backtest), a UGC resource tag
    (that resource's query columns are removed), or "past" (all lag
    columns are removed; the dataset keeps its row range by building lag
    features first and slicing them away).
    """
    if drop == "none":
        return AblationResult(drop, backtest(panel, selected, spec, plan,
                                             lag_spec, signal_lag, seed))
    if drop == PAST_LAGS:
        full = build_dataset(panel, selected, lag_spec, signal_lag,
                             start=plan.train_start, end=plan.last_week)
        n_lags = lag_spec.n_lags
        trimmed = SupervisedDataset(weeks=full.weeks, X=full.X[:, n_lags:].copy(),
                                    y=full.y, feature_names=full.feature_names[n_lags:])
        return AblationResult(drop, backtest(panel, selected, spec, plan,
                                             lag_spec, signal_lag, seed,
                                             dataset=trimmed))
    kind = ResourceKind.from_tag(drop)
    if kind is ResourceKind.FLU_PATIENTS:
        raise ValueError("drop the flu history with 'past', not a resource tag")
    reduced = {k: terms for k, terms in selected.items() if k is not kind}
    return AblationResult(drop, backtest(panel, reduced, spec, plan,
                                         lag_spec, signal_lag, seed))


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------

def metrics_to_dict(metrics: MetricReport) -> dict:
    return {"r2": metrics.r2, "mae": metrics.mae, "mape": metrics.mape,
            "n": metrics.n, "skipped_zero_actuals": metrics.skipped_zero_actuals}


def result_to_dict(result: BacktestResult) -> dict:
    return {
        "window": {"start": result.window[0].iso(), "end": result.window[1].iso()},
        "model": result.model_kind,
        **metrics_to_dict(result.metrics),
        "predictions": [
            {"date": week.iso(), "actual": actual, "predicted": predicted}
            for week, actual, predicted in result.predictions
        ],
    }


def write_report_json(results: Sequence[BacktestResult], path) -> None:
    payload = [result_to_dict(r) for r in results]
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def write_plot_csv(result: BacktestResult, path) -> None:
    """Plot-ready `date,actual,predicted` rows for one window."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "actual", "predicted"])
        for week, actual, predicted in result.predictions:
            writer.writerow([week.iso(), repr(actual), repr(predicted)])
