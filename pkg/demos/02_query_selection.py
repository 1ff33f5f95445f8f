#!/usr/bin/env python3
"""Rank candidate terms and select queries by correlation.

Candidate terms come from a toy pre-tokenized document corpus; two
rankings are shown (corpus tf-idf and raw frequency). Each candidate term
also carries a weekly volume series, and only terms whose volume
correlates with the flu series strictly above the threshold survive
selection (0.70 for search, 0.75 for social, per the pipeline defaults).

Run:  python3 demos/02_query_selection.py
"""

from flunowcast import (
    CandidateQuery,
    ProxyConfig,
    SelectionConfig,
    SynthConfig,
    gen_flu,
    gen_proxy,
    rank_frequency,
    rank_tfidf,
    select_queries,
)
from flunowcast.rng import derive_seed

corpus = [
    "got the flu again fever all week".split(),
    "fever and chills staying home".split(),
    "flu shot queue was long".split(),
    "buying masks and hand soap".split(),
    "my cat ignored me all day".split(),
    "high fever flu season is here".split(),
]

print("tf-idf top 5:")
for item in rank_tfidf(corpus, 5):
    print(f"  {item.term:8s} {item.score:.3f}")

print("\nfrequency top 5:")
for item in rank_frequency(corpus, 5):
    print(f"  {item.term:8s} {item.score:.0f}")

# volumes: informative candidates track the flu curve, junk ones do not
SEED = 13
flu = gen_flu(SynthConfig(years=4, seed=SEED))
candidates = []
for i, (term, noise) in enumerate([("flu", 100.0), ("fever", 250.0),
                                   ("masks", 700.0), ("cat", 20000.0),
                                   ("long", 50000.0)]):
    volume = gen_proxy(flu, ProxyConfig(name=term, gain=0.05, noise_sd=noise,
                                        seed=derive_seed(SEED, i + 1)))
    candidates.append(CandidateQuery(term, volume))

for threshold in (0.70, 0.75):
    result = select_queries(candidates, flu, SelectionConfig(threshold))
    chosen = ", ".join(f"{t} (r={r:.3f})" for t, r in result.selected)
    print(f"\nthreshold {threshold:.2f}: {chosen or '(none)'}")
    if result.skipped_degenerate:
        print(f"  skipped {result.skipped_degenerate} zero-variance candidates")
