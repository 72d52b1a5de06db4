"""Timing sweep across the matchers.

Runs a small version of the benchmark harness: seeded random pairs, one
warm-up pass, medians over repetitions. The qualitative picture mirrors the
full benchmark: the offline index is flat in query size, the double loop
grows linearly with the pair product.
"""

from vwsim.bench import BENCH_COLUMNS, BenchConfig, run_bench

cfg = BenchConfig(
    algorithms=("smin", "smii", "psmi", "exhaustive-baseline"),
    pair_count=60,
    m_values=(10, 20, 40),
    n_values=(40,),
    dimension=64,
    vocab_size=2048,
    mu0=0.7,
    seed=17,
    repetitions=3,
)

rows = run_bench(cfg)

print(",".join(BENCH_COLUMNS))
for row in rows:
    print(",".join(f"{row[c]:.6g}" if isinstance(row[c], float) else str(row[c])
                   for c in BENCH_COLUMNS))

print()
print("per-pair microseconds by query size m:")
algos = ("smin", "smii", "psmi", "exhaustive-baseline")
print(f"{'m':>4} " + "".join(f"{a:>22}" for a in algos))
for m in cfg.m_values:
    cells = ""
    for algo in algos:
        match = [r for r in rows if r["algo"] == algo and r["m"] == m]
        cells += f"{match[0]['per_pair_us']:>22.1f}"
    print(f"{m:>4} " + cells)
