#!/usr/bin/env python3
"""Rolling-origin backtest of all five models on one season window.

Every test week gets its own fit: train on everything from the training
start up to (but excluding) the test week, standardize features on those
training rows only, predict one week. The lag-feature models see the flu
history at lags 2..53 plus each selected query's volume two weeks back;
the ARIMA baseline sees the flu history alone and forecasts two steps.

Run:  python3 demos/03_model_backtest.py        (about a minute; most of
      it is the 100-tree random forest refit at every test week)
"""

import time

from flunowcast import ModelSpec, ProxyConfig, SynthConfig, backtest, gen_flu, gen_proxy
from flunowcast.features import SplitPlan
from flunowcast.rng import derive_seed
from flunowcast.series import ResourceKind, align

SEED = 21
UGC = [ResourceKind.SEARCH_QUERY, ResourceKind.SOCIAL_MEDIA,
       ResourceKind.SHOPPING, ResourceKind.QA_SERVICE]

flu = gen_flu(SynthConfig(years=5, seed=SEED))
proxies = [
    gen_proxy(flu, ProxyConfig(name=f"q_{kind.value}", resource=kind,
                               lead_weeks=2, gain=0.05, noise_sd=150.0,
                               seed=derive_seed(SEED, i + 1)))
    for i, kind in enumerate(UGC)
]
panel = align([flu, *proxies])
selected = {kind: [f"q_{kind.value}"] for kind in UGC}

# evaluate 16 weeks around the season-5 peak, training from week 53 onward
plan = SplitPlan.of(panel.start + 53, [(panel.start + 218, panel.start + 233)])

specs = [
    ModelSpec("lasso"),
    ModelSpec("huber"),
    ModelSpec("svr"),
    ModelSpec("forest", {"n_trees": 30}),
    ModelSpec("arima"),
]

print(f"{'model':8s} {'R^2':>8s} {'MAE':>10s} {'MAPE %':>8s} {'fit time':>9s}")
for spec in specs:
    t0 = time.time()
    result = backtest(panel, selected, spec, plan, seed=0)[0]
    m = result.metrics
    print(f"{spec.kind:8s} {m.r2:8.3f} {m.mae:10.1f} {m.mape:8.1f} "
          f"{time.time() - t0:8.1f}s")

print("\nNotes: the robust Huber fit and the lasso both track the epidemic "
      "closely here; SVR with the default C=1 cannot reach raw patient-count "
      "magnitudes (scale C with the target for serious use); ARIMA uses the "
      "flu history alone.")
