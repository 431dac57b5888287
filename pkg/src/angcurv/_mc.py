"""Seeded Monte Carlo plumbing shared by the sampling modules.

Every random draw in the package goes through :func:`substream`, keyed by
``(seed, *keys)``.  Large sample counts are split into fixed-size chunks,
each with its own substream, so the aggregate does not depend on how many
worker threads evaluate the chunks.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

CHUNK = 1 << 16

_threads = max(1, os.cpu_count() or 1)


def set_threads(n: int) -> None:
    global _threads
    if n < 1:
        raise ValueError("thread count must be >= 1")
    _threads = int(n)


def get_threads() -> int:
    return _threads


def substream(seed: int | None, *keys: int) -> np.random.Generator:
    """Independent generator for the task labelled ``keys`` under ``seed``."""
    if seed is None:
        seed = 0
    parts = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]
    return np.random.default_rng(np.random.SeedSequence(parts))


@dataclass(frozen=True)
class Estimate:
    """Sample mean with its standard error."""

    value: float
    sigma: float
    samples: int

    def __iter__(self):
        yield self.value
        yield self.sigma


def mc_mean(
    draw: Callable[[np.random.Generator, int], np.ndarray],
    samples: int,
    seed: int | None,
    *keys: int,
) -> Estimate:
    """Mean and standard error of ``draw`` over ``samples`` draws.

    ``draw(rng, m)`` must return ``m`` per-sample values.  Chunk sums are
    merged in chunk order, so the result is bit-identical for any thread
    count.
    """
    if samples < 1:
        raise ValueError("sample count must be >= 1")
    samples = int(samples)
    nchunks = -(-samples // CHUNK)

    def run(i: int) -> tuple[int, float, float]:
        m = min(CHUNK, samples - i * CHUNK)
        vals = np.asarray(draw(substream(seed, *keys, i), m), dtype=float)
        mean = float(vals.mean())
        return m, mean, float(((vals - mean) ** 2).sum())

    if _threads > 1 and nchunks > 1:
        with ThreadPoolExecutor(max_workers=_threads) as pool:
            parts = list(pool.map(run, range(nchunks)))
    else:
        parts = [run(i) for i in range(nchunks)]

    # Chan et al. pairwise merge of (count, mean, M2)
    n_tot, mean, m2 = 0, 0.0, 0.0
    for m, mu, s2 in parts:
        delta = mu - mean
        new = n_tot + m
        mean += delta * m / new
        m2 += s2 + delta * delta * n_tot * m / new
        n_tot = new
    var = m2 / (n_tot - 1) if n_tot > 1 else 0.0
    return Estimate(mean, math.sqrt(var / n_tot), n_tot)


def indicator_mean(
    draw: Callable[[np.random.Generator, int], np.ndarray],
    samples: int,
    seed: int | None,
    *keys: int,
) -> Estimate:
    """:func:`mc_mean` for 0/1 draws.

    When every draw agrees the sample variance is zero, which overstates the
    precision; the error is then floored at that of a single differing draw.
    """
    est = mc_mean(draw, samples, seed, *keys)
    n = est.samples
    if est.sigma == 0.0 and n > 1:
        return Estimate(est.value, math.sqrt((1.0 / n) * (1.0 - 1.0 / n) / n), n)
    return est


def uniform_ball(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """``count`` points uniform in the unit ball of R^dim."""
    if dim == 0:
        return np.zeros((count, 0))
    g = rng.standard_normal((count, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = rng.random(count) ** (1.0 / dim)
    return g * r[:, None]


def uniform_sphere(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((count, dim))
    nrm = np.linalg.norm(g, axis=1, keepdims=True)
    # a zero Gaussian draw has probability 0; guard anyway
    nrm[nrm == 0] = 1.0
    return g / nrm
