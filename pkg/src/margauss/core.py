"""Deterministic randomness and the configurable universal constants.

Random streams are value-like: a (seed, stream_id) pair fully determines a
draw sequence, and distinct stream ids give statistically independent
substreams. Parallel replicates can therefore be generated on separate
streams and merged deterministically in stream_id order.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

ENV_SEED = "MG_SEED"

_MASK64 = (1 << 64) - 1


def resolve_seed(seed: int) -> int:
    """Return the configured seed, unless the MG_SEED env var overrides it."""
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return int(seed)
    return int(raw, 10)


def resolve_seeds(seeds) -> tuple[int, ...]:
    """Resolve a configured seed list; an MG_SEED override collapses it to one."""
    if os.environ.get(ENV_SEED) is not None:
        return (resolve_seed(0),)
    return tuple(int(s) for s in seeds)


@dataclass(frozen=True)
class RandomStream:
    """Handle for one reproducible draw sequence.

    Identical (seed, stream_id) pairs replay the identical sequence. The
    underlying generator is created lazily; a stream instance is consumed
    sequentially and must be used by one thread at a time.
    """

    seed: int
    stream_id: int = 0

    @cached_property
    def _rng(self) -> np.random.Generator:
        root = np.random.SeedSequence(
            self.seed & _MASK64, spawn_key=(self.stream_id & _MASK64,)
        )
        return np.random.default_rng(root)

    def uniform(self, size=None):
        return self._rng.random(size)

    def normal(self, size=None):
        return self._rng.standard_normal(size)

    def exponential(self, size=None):
        return self._rng.standard_exponential(size)

    def gamma(self, shape: float, size=None):
        return self._rng.standard_gamma(shape, size)

    def integers(self, low: int, high: int, size=None):
        return self._rng.integers(low, high, size=size)


def substream(seed: int, stream_id: int) -> RandomStream:
    """Split-by-label stream constructor."""
    if not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if not isinstance(stream_id, (int, np.integer)):
        raise ValueError(f"stream_id must be an integer, got {stream_id!r}")
    return RandomStream(int(seed), int(stream_id))


def gaussian_vector(stream: RandomStream, dim: int, count: int | None = None) -> np.ndarray:
    """Draw a standard Gaussian vector in R^dim (or `count` of them, stacked).

    Returns shape (dim,) when count is None, else (count, dim).
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if count is None:
        return stream.normal(dim)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    return stream.normal((count, dim))


def batch_mean_se(values: np.ndarray, n_batches: int = 20) -> tuple[float, float]:
    """Mean of per-batch means and its standard error (equal-size batches)."""
    values = np.asarray(values)
    m = (len(values) // n_batches) * n_batches
    if m < n_batches:
        raise ValueError(f"need at least {n_batches} values, got {len(values)}")
    batch_means = values[:m].reshape(n_batches, -1).mean(axis=1)
    return float(batch_means.mean()), float(batch_means.std(ddof=1) / np.sqrt(n_batches))


def batch_var_se(values: np.ndarray, n_batches: int = 20) -> tuple[float, float]:
    """Mean of per-batch sample variances and its standard error."""
    values = np.asarray(values)
    m = (len(values) // n_batches) * n_batches
    if m < 2 * n_batches:
        raise ValueError(f"need at least {2 * n_batches} values, got {len(values)}")
    batch_vars = values[:m].reshape(n_batches, -1).var(axis=1, ddof=1)
    return float(batch_vars.mean()), float(batch_vars.std(ddof=1) / np.sqrt(n_batches))


@dataclass(frozen=True)
class ConstantsConfig:
    """The unspecified universal constants of the closed-form bounds.

    All bounds that carry an absolute constant are reported as "C times" the
    computable expression, with C taken from here; defaults are 1.0.
    """

    C_tv_multi: float = 1.0
    c_smooth: float = 1.0
    C_tv_simplex1d: float = 1.0

    def __post_init__(self):
        for name in ("C_tv_multi", "c_smooth", "C_tv_simplex1d"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def from_json(cls, path) -> "ConstantsConfig":
        import json

        with open(path) as fh:
            data = json.load(fh)
        unknown = set(data) - {"C_tv_multi", "c_smooth", "C_tv_simplex1d"}
        if unknown:
            raise ValueError(f"unknown constants keys: {sorted(unknown)}")
        return cls(**data)
