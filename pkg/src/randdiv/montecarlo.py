"""Direct simulation of P_{n,k}(eps).

Trials are split into fixed chunks of 2**16; chunk ``i`` draws from its own
generator spawned from ``SeedSequence(seed)``, so the estimate does not
depend on how chunks are scheduled across workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

CHUNK = 1 << 16


@dataclass(frozen=True)
class TrialPlan:
    n: int
    k: int
    eps: float
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 1 or self.k < 1:
            raise ValueError("need n >= 1 and k >= 1")
        if not 0 <= self.eps <= 1:
            raise ValueError("eps must lie in [0, 1]")


@dataclass(frozen=True)
class Estimate:
    successes: int
    trials: int

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def ci95(self) -> tuple[float, float]:
        half = 1.96 * self.stderr
        return self.p_hat - half, self.p_hat + half


def trial_succeeds(points: Sequence[float], k: int, eps: float) -> bool:
    """True iff no eps-window holds more than k of the points."""
    xs = sorted(points)
    if k >= len(xs):
        return True
    return min(xs[i + k] - xs[i] for i in range(len(xs) - k)) > eps


def _count_chunk(n: int, k: int, eps: float, size: int, seed_seq: np.random.SeedSequence) -> int:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    pts = np.sort(rng.random((size, n)), axis=1)
    if k >= n:
        return size
    spread = (pts[:, k:] - pts[:, :-k]).min(axis=1)
    return int(np.count_nonzero(spread > eps))


def estimate(plan: TrialPlan, workers: int = 1) -> Estimate:
    sizes = [CHUNK] * (plan.trials // CHUNK)
    if plan.trials % CHUNK:
        sizes.append(plan.trials % CHUNK)
    seeds = np.random.SeedSequence(plan.seed).spawn(len(sizes))
    jobs = list(zip(sizes, seeds))

    def run(job):
        size, ss = job
        return _count_chunk(plan.n, plan.k, plan.eps, size, ss)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, jobs))
    else:
        counts = [run(j) for j in jobs]
    return Estimate(sum(counts), plan.trials)


def sweep_csv(rows: Iterable[tuple[TrialPlan, Estimate, Optional[float]]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "k", "eps", "trials", "p_hat", "stderr", "exact", "z"])
    for plan, est, exact in rows:
        z = ""
        if exact is not None and est.stderr > 0:
            z = f"{(est.p_hat - exact) / est.stderr:.4f}"
        w.writerow([plan.n, plan.k, plan.eps, plan.trials, f"{est.p_hat:.8f}", f"{est.stderr:.3g}",
                    "" if exact is None else f"{exact:.10g}", z])
    return buf.getvalue()
