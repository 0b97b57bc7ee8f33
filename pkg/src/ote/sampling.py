"""Bootstrap and sub-bagging draws with exact held-out tracking.

Every draw records both the in-sample index multiset and the complementary
held-out set, so downstream ranking and selection never have to reconstruct
which rows a tree did not see. All randomness flows from integer seeds
through ``derive_seed`` so that a forest is reproducible regardless of the
order or parallelism with which its draws are made.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

BOOTSTRAP = "bootstrap"
SUBSAMPLE = "subsample"

# Fixed stream tags for derive_seed so independent random streams never
# collide even when their positional indices do.
STREAM_DRAW = 1
STREAM_GROW = 2
STREAM_SPLIT = 3
STREAM_TRAIN = 4
STREAM_SIM = 5
STREAM_FOREST = 6


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, *path: int) -> int:
    """Derive a child seed from a base seed and an index path.

    The mixing function is a fixed splitmix64 fold, so the mapping
    (base_seed, path) -> seed is stable across runs, platforms and worker
    counts. Distinct paths give independent-looking streams.
    """
    state = _splitmix64(base_seed & _MASK64)
    for part in path:
        state = _splitmix64(state ^ _splitmix64(part & _MASK64))
    return state


@dataclass(eq=False)
class SampleDraw:
    """One resample of ``{0..n-1}`` plus its held-out complement.

    ``in_indices`` is a multiset for bootstrap draws (length n, repeats
    allowed) and a plain subset for subsample draws (length m, no repeats).
    ``held_out_indices`` is always sorted and disjoint from the distinct
    in-sample indices.
    """

    in_indices: np.ndarray
    held_out_indices: np.ndarray
    kind: str
    seed: int
    n: int = field(default=0)

    @property
    def has_assessment_rows(self) -> bool:
        return self.held_out_indices.size > 0


def bootstrap(n: int, seed: int) -> SampleDraw:
    """Draw n indices uniformly with replacement from {0..n-1}.

    The held-out set is the exact complement of the distinct drawn indices
    (empty only in the degenerate case where every index was drawn, e.g.
    n=1). Deterministic in (n, seed).
    """
    if n < 1:
        raise ValueError(f"bootstrap needs n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    in_idx = rng.integers(0, n, size=n, dtype=np.int64)
    held = np.setdiff1d(np.arange(n, dtype=np.int64), in_idx)
    return SampleDraw(in_idx, held, BOOTSTRAP, seed, n)


def subsample(n: int, m: int, seed: int) -> SampleDraw:
    """Draw m distinct indices uniformly without replacement from {0..n-1}.

    Requires 1 <= m < n so the held-out remainder (size n-m) is never
    empty. Deterministic in (n, m, seed).
    """
    if m < 1:
        raise ValueError(f"subsample needs m >= 1, got {m}")
    if m >= n:
        raise ValueError(
            f"subsample needs m < n to leave an assessment set, got m={m}, n={n}"
        )
    rng = np.random.default_rng(seed)
    in_idx = np.asarray(rng.choice(n, size=m, replace=False), dtype=np.int64)
    held = np.setdiff1d(np.arange(n, dtype=np.int64), in_idx)
    return SampleDraw(in_idx, held, SUBSAMPLE, seed, n)


def default_subsample_size(n: int, fraction: float = 0.9) -> int:
    """Sub-bagging sample size: floor(fraction * n), default 90% of n."""
    return int(np.floor(fraction * n))
