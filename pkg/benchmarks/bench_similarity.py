#!/usr/bin/env python3
"""Benchmark: compiled similarity kernels vs the pure-Python fallback.

Exercises the entity-resolution hot path (max-Jaccard over a candidate
pool) plus the primitive operations. Run:

    python3 benchmarks/bench_similarity.py [--pairs 20000] [--pool 2000]
"""

from __future__ import annotations

import argparse
import random
import string
import time

from mcpintel.similarity import _pure

try:
    from mcpintel.similarity import _kernels
except ImportError:
    _kernels = None


def make_corpus(n: int, rng: random.Random) -> list[str]:
    themes = [
        "prompt injection", "tool description poisoning", "rug pull server mutation",
        "data exfiltration via tool output", "dns rebinding", "sandbox escape",
        "credential theft", "manifest version drift", "schema poisoning",
    ]
    corpus = []
    for _ in range(n):
        base = rng.choice(themes)
        noise = "".join(rng.choice(string.ascii_lowercase + " ") for _ in range(rng.randint(0, 12)))
        corpus.append(f"{base} {noise}".strip())
    return corpus


def bench(label: str, fn, repeat: int = 3) -> float:
    best = min(timeit(fn) for _ in range(repeat))
    print(f"  {label:<28} {best * 1e3:9.1f} ms")
    return best


def timeit(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def run(impl, name: str, pairs: list[tuple[str, str]], pool: list[str], probes: list[str]) -> dict[str, float]:
    print(f"{name}:")
    results = {}
    results["jaccard-pairs"] = bench(
        f"jaccard x{len(pairs)}", lambda: [impl.jaccard(a, b) for a, b in pairs]
    )
    results["shingles"] = bench(
        f"shingles x{len(pool)}", lambda: [impl.shingles(s) for s in pool]
    )
    results["max-jaccard"] = bench(
        f"max_jaccard x{len(probes)} over {len(pool)}",
        lambda: [impl.max_jaccard(p, pool) for p in probes],
    )
    return results


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=20000)
    parser.add_argument("--pool", type=int, default=2000)
    parser.add_argument("--probes", type=int, default=50)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    corpus = make_corpus(args.pairs, rng)
    pairs = [(rng.choice(corpus), rng.choice(corpus)) for _ in range(args.pairs)]
    pool = make_corpus(args.pool, rng)
    probes = make_corpus(args.probes, rng)

    pure = run(_pure, "pure python", pairs, pool, probes)
    if _kernels is None:
        print("compiled extension not built; nothing to compare")
        return
    compiled = run(_kernels, "cython extension", pairs, pool, probes)

    print("speedup (pure / compiled):")
    for key in pure:
        print(f"  {key:<28} {pure[key] / compiled[key]:6.2f}x")

    # Sanity: identical semantics on this corpus.
    for a, b in pairs[:500]:
        assert abs(_pure.jaccard(a, b) - _kernels.jaccard(a, b)) < 1e-12
    print("semantics identical on sampled pairs")


if __name__ == "__main__":
    main()
