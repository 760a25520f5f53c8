"""Shared session-scope fixtures for the heavier estimation runs.

The acceptance checks share a small number of large quasi-Monte Carlo
passes; each fixture runs once per session and its results are reused by
every test that needs them.
"""

import numpy as np
import pytest

from qstatevol.integrate import (
    estimate_boundary,
    estimate_volume_multi,
    interpolation_sweep,
)
from qstatevol.metrics import builtin_metric, interpolated_metric
from qstatevol.sequences import SequenceConfig

THREADS = 4


@pytest.fixture(scope="session")
def ft_volume_run():
    """10^7 Faure-Tezuka points: SD, HS-calibration, KM-tilde, Average-tilde."""
    cfg = SequenceConfig("faure-tezuka", 15, seed=1)
    specs = {
        "sd": builtin_metric("sd"),
        "hs": builtin_metric("hs"),
        "km": builtin_metric("km", tilde=True),
        "average": builtin_metric("average", tilde=True),
    }
    return estimate_volume_multi(specs, cfg, 10_000_000,
                                 checkpoint_every=2_000_000, threads=THREADS)


@pytest.fixture(scope="session")
def halton_volume_run():
    """10^7 scrambled Halton points: GKS-tilde and WY-tilde."""
    cfg = SequenceConfig("halton", 15, seed=1)
    specs = {
        "gks": builtin_metric("gks", tilde=True),
        "wy": builtin_metric("wy", tilde=True),
    }
    return estimate_volume_multi(specs, cfg, 10_000_000,
                                 checkpoint_every=10_000_000, threads=THREADS)


@pytest.fixture(scope="session")
def rank3_run():
    """10^6 points on the 14-cube, rank-3 stratum, SD and WY-tilde."""
    cfg = SequenceConfig("faure-tezuka", 14, seed=1)
    specs = {"sd": builtin_metric("sd"), "wy": builtin_metric("wy", tilde=True)}
    return estimate_boundary(specs, cfg, 1_000_000, "rank3",
                             checkpoint_every=1_000_000, threads=THREADS)


@pytest.fixture(scope="session")
def rank4_run():
    """10^6 points on the 14-cube, rank-4 separability boundary, SD."""
    cfg = SequenceConfig("faure-tezuka", 14, seed=1)
    return estimate_boundary({"sd": builtin_metric("sd")}, cfg, 1_000_000,
                             "rank4_sep", checkpoint_every=200_000,
                             threads=THREADS)


@pytest.fixture(scope="session")
def mc_replications():
    """10 x 10^6 plain-MC separability probabilities for the maximal metric
    and the a = 0.05 interpolated metric."""
    pmax, p05 = [], []
    for rep in range(10):
        cfg = SequenceConfig("plain", 15, seed=1 + 1000 * rep)
        res = estimate_volume_multi(
            {"max": builtin_metric("maximal", tilde=True),
             "a05": interpolated_metric(0.05, tilde=True)},
            cfg, 1_000_000, checkpoint_every=1_000_000, threads=THREADS)
        pmax.append(res["max"].prob_sep)
        p05.append(res["a05"].prob_sep)
    return pmax, p05


@pytest.fixture(scope="session")
def sweep_run():
    """10^6-point interpolation sweep over a = 1, 0.1, 0.01, 0.001."""
    cfg = SequenceConfig("faure-tezuka", 15, seed=1)
    return interpolation_sweep([1.0, 0.1, 0.01, 0.001], cfg, 1_000_000,
                               threads=THREADS)
