"""Deterministic point sets on [0,1)^d with skip-ahead.

Four generators: scrambled Halton, scrambled Faure-Tezuka (base 17 digital
net with nonsingular upper triangular scrambling), stratified Monte Carlo
(one uniform point per subcube of a b^d grid), and plain pseudorandom
points.  All are index-addressed: point i of a configured stream is a pure
function of (config, i), so index ranges can be partitioned freely across
workers and regenerated bitwise-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "SequenceConfig",
    "halton_scrambled",
    "faure_tezuka",
    "stratified_mc",
    "plain_mc",
    "sequence_points",
    "replication_stats",
    "ReplicationStats",
    "KINDS",
]

KINDS = ("halton", "faure-tezuka", "stratified", "plain")

_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
    53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113,
)

#: block granularity for the pseudorandom kinds (one RNG key per block)
RNG_BLOCK = 4096


def _smallest_prime_geq(n: int) -> int:
    for p in _PRIMES:
        if p >= n:
            return p
    raise ValueError(f"dimension {n} beyond built-in prime table")


@dataclass(frozen=True)
class SequenceConfig:
    """Immutable stream description; same config -> bitwise-identical stream.

    ``base`` defaults to the smallest prime >= dim for Faure-Tezuka and to 3
    for stratified MC; ``digits`` is the Faure-Tezuka digit precision m
    (base^m addressable indices).  ``shared_u`` uses one scrambling matrix
    for every dimension (per-dimension matrices are the alternative mode).
    """

    kind: str
    dim: int
    seed: int = 0
    base: Optional[int] = None
    digits: int = 8
    scramble: bool = True
    shared_u: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sequence kind {self.kind!r}; known: {KINDS}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.kind == "faure-tezuka":
            b = self.base if self.base is not None else _smallest_prime_geq(self.dim)
            if b not in _PRIMES or b < self.dim:
                raise ValueError(f"faure-tezuka base must be a prime >= dim, got {b}")

    @property
    def resolved_base(self) -> int:
        if self.base is not None:
            return self.base
        if self.kind == "faure-tezuka":
            return _smallest_prime_geq(self.dim)
        return 3


# ---------------------------------------------------------------------------
# scrambled Halton
# ---------------------------------------------------------------------------

def _halton_permutations(cfg: SequenceConfig):
    """Seeded digit permutation per prime base; 0 is kept fixed so the
    radical inverse of trailing zero digits stays zero."""
    perms = []
    for j in range(cfg.dim):
        p = _PRIMES[j]
        if cfg.scramble:
            rng = np.random.Generator(
                np.random.Philox(np.random.SeedSequence([cfg.seed, p, 0x48414C54]))
            )
            perm = np.concatenate([[0], 1 + rng.permutation(p - 1)])
        else:
            perm = np.arange(p)
        perms.append(perm.astype(np.int64))
    return perms


def halton_scrambled(cfg: SequenceConfig, index) -> np.ndarray:
    """Scrambled Halton points for an integer index or array of indices.

    Coordinate j uses the j-th prime base with a seeded digit permutation
    applied to the van der Corput expansion of the index.
    """
    if cfg.kind != "halton":
        raise ValueError("config kind is not 'halton'")
    idx = np.atleast_1d(np.asarray(index, dtype=np.int64))
    if np.any(idx < 0):
        raise ValueError("indices must be >= 0")
    perms = _halton_permutations(cfg)
    out = np.zeros((idx.size, cfg.dim))
    top = int(idx.max(initial=0))
    for j in range(cfg.dim):
        p = _PRIMES[j]
        perm = perms[j]
        n = idx.copy()
        scale = 1.0 / p
        ndig = max(1, math.ceil(math.log(top + 1, p))) + 1 if top else 1
        for _ in range(ndig):
            n, d = np.divmod(n, p)
            out[:, j] += perm[d] * scale
            scale /= p
    if np.isscalar(index) or np.asarray(index).ndim == 0:
        return out[0]
    return out


# ---------------------------------------------------------------------------
# scrambled Faure-Tezuka
# ---------------------------------------------------------------------------

def _pascal_matrix(m: int, b: int) -> np.ndarray:
    """Upper triangular Pascal matrix P[j, k] = binomial(k, j) mod b."""
    P = np.zeros((m, m), dtype=np.int64)
    for k in range(m):
        for j in range(k + 1):
            P[j, k] = math.comb(k, j) % b
    return P


def _nut_matrix(m: int, b: int, seed_key) -> np.ndarray:
    """Random nonsingular upper triangular matrix mod b (nonzero diagonal)."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed_key)))
    U = np.zeros((m, m), dtype=np.int64)
    for j in range(m):
        U[j, j] = rng.integers(1, b)
        U[j, j + 1:] = rng.integers(0, b, size=m - 1 - j)
    return U


def _ft_generator_matrices(cfg: SequenceConfig):
    b = cfg.resolved_base
    m = cfg.digits
    P = _pascal_matrix(m, b)
    mats = []
    Pi = np.eye(m, dtype=np.int64)  # P^(i-1), starting at P^0 for dimension 1
    for i in range(cfg.dim):
        if cfg.scramble:
            key = [cfg.seed, 0x46545343] if cfg.shared_u else [cfg.seed, 0x46545343, i]
            U = _nut_matrix(m, b, key)
        else:
            U = np.eye(m, dtype=np.int64)
        mats.append((Pi @ U) % b)
        Pi = (Pi @ P) % b
    return mats


def faure_tezuka(cfg: SequenceConfig, index) -> np.ndarray:
    """Scrambled Faure-Tezuka points for an index or array of indices.

    Base-b digits of the index (least significant first) are transformed by
    the generator matrix C^(i) = P^(i-1) U mod b of dimension i; the radical
    inverse of the transformed digits gives coordinate i.  With scrambling
    off (U = identity) this is the plain Faure sequence.
    """
    if cfg.kind != "faure-tezuka":
        raise ValueError("config kind is not 'faure-tezuka'")
    b = cfg.resolved_base
    m = cfg.digits
    idx = np.atleast_1d(np.asarray(index, dtype=np.int64))
    if np.any(idx < 0):
        raise ValueError("indices must be >= 0")
    if np.any(idx >= b ** m):
        raise ValueError(f"index beyond base^digits = {b}^{m} addressable range")
    mats = _ft_generator_matrices(cfg)
    digits = np.empty((idx.size, m), dtype=np.int64)
    n = idx.copy()
    for k in range(m):
        n, digits[:, k] = np.divmod(n, b)
    weights = b ** -(1.0 + np.arange(m))
    out = np.empty((idx.size, cfg.dim))
    for i, C in enumerate(mats):
        y = (digits @ C.T) % b
        out[:, i] = y @ weights
    if np.isscalar(index) or np.asarray(index).ndim == 0:
        return out[0]
    return out


# ---------------------------------------------------------------------------
# stratified and plain Monte Carlo
# ---------------------------------------------------------------------------

def _block_uniforms(key_tuple, count, dim, start_in_block, need):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key_tuple))))
    u = rng.random((count, dim))
    return u[start_in_block : start_in_block + need]


def _keyed_uniforms(key_prefix, dim, start, count):
    """Uniforms for absolute indices [start, start+count), one RNG key per
    RNG_BLOCK indices so any index range regenerates identically."""
    out = np.empty((count, dim))
    pos = 0
    i = start
    while pos < count:
        blk = i // RNG_BLOCK
        off = i % RNG_BLOCK
        take = min(RNG_BLOCK - off, count - pos)
        out[pos : pos + take] = _block_uniforms(
            key_prefix + (blk,), RNG_BLOCK, dim, off, take
        )
        pos += take
        i += take
    return out


def stratified_mc(cfg: SequenceConfig, replication: int, start: int = 0, count: Optional[int] = None) -> np.ndarray:
    """Stratified points: one uniform point per subcube of a base^dim grid.

    Subcube index i has cell digits d_j = (i // base^j) mod base; the point
    is (d + u)/base with u uniform, seeded by (seed, replication).  The full
    stream has exactly base^dim points; ``start``/``count`` select a
    contiguous slice for parallel partitioning.
    """
    if cfg.kind != "stratified":
        raise ValueError("config kind is not 'stratified'")
    b = cfg.resolved_base
    total = b ** cfg.dim
    if count is None:
        count = total - start
    if start < 0 or start + count > total:
        raise ValueError(f"slice [{start}, {start + count}) outside base^dim = {total}")
    idx = start + np.arange(count, dtype=np.int64)
    cells = np.empty((count, cfg.dim), dtype=np.int64)
    n = idx.copy()
    for j in range(cfg.dim):
        n, cells[:, j] = np.divmod(n, b)
    u = _keyed_uniforms((cfg.seed, 0x53545241, replication), cfg.dim, start, count)
    return (cells + u) / b


def plain_mc(cfg: SequenceConfig, start: int, count: int) -> np.ndarray:
    """Plain pseudorandom points for absolute indices [start, start+count)."""
    if cfg.kind != "plain":
        raise ValueError("config kind is not 'plain'")
    return _keyed_uniforms((cfg.seed, 0x504C4149), cfg.dim, start, count)


def sequence_points(cfg: SequenceConfig, start: int, count: int, replication: int = 0) -> np.ndarray:
    """Uniform front end: points [start, start+count) of the configured stream."""
    if cfg.kind == "halton":
        return halton_scrambled(cfg, np.arange(start, start + count, dtype=np.int64))
    if cfg.kind == "faure-tezuka":
        return faure_tezuka(cfg, np.arange(start, start + count, dtype=np.int64))
    if cfg.kind == "stratified":
        return stratified_mc(cfg, replication, start, count)
    return plain_mc(cfg, start, count)


# ---------------------------------------------------------------------------
# replication statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReplicationStats:
    mean: float
    sd: float
    t: float
    degenerate: bool = False


def replication_stats(estimates, hypothesized: float) -> ReplicationStats:
    """Sample mean, sample sd, and t = (mean - hypothesized)/sd across
    independent replications; t is flagged degenerate when sd = 0."""
    est = np.asarray(estimates, dtype=float)
    if est.size < 2:
        raise ValueError("need at least 2 replications")
    mu = float(est.mean())
    eta = float(est.std(ddof=1))
    if eta == 0.0:
        return ReplicationStats(mu, 0.0, float("nan"), degenerate=True)
    return ReplicationStats(mu, eta, (mu - hypothesized) / eta, False)
