#!/usr/bin/env python3
"""Build a synthetic five-resource surveillance panel.

The flu series is a weekly patient count: an off-season baseline of about
1,000, one epidemic bump per season, Gaussian noise. Each proxy resource
(search, social, shopping, Q&A) is a gain-scaled, noise-corrupted copy
that can lead the flu series and can contain a crawl-failure dropout.

Run:  python3 demos/01_synthetic_panel.py
"""

import numpy as np

from flunowcast import ProxyConfig, SynthConfig, gen_flu, gen_proxy, pearson
from flunowcast.rng import derive_seed
from flunowcast.series import ResourceKind, align

SEED = 7

flu = gen_flu(SynthConfig(years=5, seed=SEED))
print(f"flu series: {len(flu)} weeks, {flu.start} .. {flu.end}")
print(f"  baseline region median ~ {np.median(flu.values):.0f}, "
      f"peak {flu.values.max():.0f}")

proxy_specs = [
    ("search_fever", ResourceKind.SEARCH_QUERY, 2, 0.05, 12.0, None),
    ("social_sick", ResourceKind.SOCIAL_MEDIA, 2, 0.02, 6.0, None),
    ("shop_mask", ResourceKind.SHOPPING, 0, 0.01, 2.5, None),
    # a Q&A proxy with an 8-week crawl failure, like a real outage
    ("qa_influenza", ResourceKind.QA_SERVICE, 1, 0.03, 8.0, (120, 8)),
]

proxies = []
for i, (name, kind, lead, gain, noise, dropout) in enumerate(proxy_specs):
    cfg = ProxyConfig(name=name, resource=kind, lead_weeks=lead, gain=gain,
                      noise_sd=noise, dropout=dropout,
                      seed=derive_seed(SEED, i + 1))
    proxies.append(gen_proxy(flu, cfg))

panel = align([flu, *proxies])
print(f"\npanel of {len(panel)} series over {panel.start} .. {panel.end}")
for p in proxies:
    r = pearson(panel[p.name], panel["flu"])
    zeros = int((panel[p.name].values == 0).sum())
    print(f"  {p.name:14s} ({p.resource.value:8s})  r = {r:+.3f}"
          f"{'   zero weeks: ' + str(zeros) if zeros else ''}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(len(panel), 1, figsize=(9, 8), sharex=True)
    for ax, name in zip(axes, panel.names()):
        ax.plot(panel[name].values, lw=0.9)
        ax.set_ylabel(name, fontsize=7)
    axes[-1].set_xlabel("week")
    fig.suptitle("Synthetic surveillance panel")
    fig.tight_layout()
    fig.savefig("demos_panel.png", dpi=120)
    print("\nsaved plot: demos_panel.png")
except ImportError:
    print("\n(matplotlib not installed; skipping the plot)")
