"""Unit tests for the volume/boundary estimators and root finder."""

import numpy as np
import pytest

from qstatevol import qstate
from qstatevol.integrate import (
    estimate_boundary,
    estimate_volume,
    estimate_volume_multi,
    find_boundary_roots,
    interpolation_sweep,
)
from qstatevol.metrics import UnsupportedMetricError, builtin_metric
from qstatevol.sequences import SequenceConfig


CFG = SequenceConfig("faure-tezuka", 15, seed=2)


def test_split_sums_to_total_exactly():
    res = estimate_volume(builtin_metric("sd"), CFG, 50_000,
                          checkpoint_every=10_000)
    for (na, t), (nb, s), (nc, ns) in zip(res.total.checkpoints,
                                          res.sep.checkpoints,
                                          res.nonsep.checkpoints):
        assert na == nb == nc
        assert t == s + ns  # exact by construction, not approx


def test_checkpoint_schedule():
    res = estimate_volume(builtin_metric("sd"), CFG, 25_000,
                          checkpoint_every=10_000)
    counts = [n for n, _ in res.total.checkpoints]
    assert counts == [10_000, 20_000, 25_000]
    assert res.total.final == res.total.checkpoints[-1][1]


def test_thread_count_invariance_bitwise():
    r1 = estimate_volume_multi({"sd": builtin_metric("sd")}, CFG, 30_000,
                               checkpoint_every=10_000, threads=1)
    r3 = estimate_volume_multi({"sd": builtin_metric("sd")}, CFG, 30_000,
                               checkpoint_every=10_000, threads=3)
    assert r1["sd"].total.checkpoints == r3["sd"].total.checkpoints
    assert r1["sd"].sep.checkpoints == r3["sd"].sep.checkpoints


def test_rerun_determinism_bitwise():
    a = estimate_volume(builtin_metric("km", tilde=True), CFG, 20_000)
    b = estimate_volume(builtin_metric("km", tilde=True), CFG, 20_000)
    assert a.total.final == b.total.final
    assert a.sep.final == b.sep.final


def test_find_boundary_roots_diagonal_state_has_none():
    # zero euler block leaves the state diagonal; its partial transpose is
    # itself, det stays positive, so no boundary crossing along the search
    a14 = np.zeros(14)
    a14[12:] = [0.7, 0.9]
    assert find_boundary_roots(a14) == []


def test_find_boundary_roots_residual_and_range():
    rng = np.random.default_rng(11)
    n_roots = 0
    while n_roots < 20:
        a14 = rng.uniform(0.1, 1.4, size=14)
        roots = find_boundary_roots(a14)
        for r in roots:
            assert 0.0 <= r <= np.pi
            x15 = np.concatenate([a14[:12], [r], a14[12:]])
            D = qstate.angles_to_state(x15)
            assert abs(qstate.det_partial_transpose(D)) < 1e-10
        n_roots += len(roots)


def test_boundary_rank3_rejects_unsupported_metric():
    cfg = SequenceConfig("faure-tezuka", 14, seed=2)
    with pytest.raises(UnsupportedMetricError):
        estimate_boundary({"km": builtin_metric("km", tilde=True)}, cfg,
                          1_000, "rank3")


def test_boundary_rank4_diagnostics():
    cfg = SequenceConfig("faure-tezuka", 14, seed=2)
    res = estimate_boundary({"sd": builtin_metric("sd")}, cfg, 20_000,
                            "rank4_sep", checkpoint_every=20_000)["sd"]
    d = res.diagnostics
    assert 0 < d["root_fraction"] < 1
    assert sum(d["root_hist"]) > 0
    assert res.total.final > 0
    assert res.sep.final > 0
    # every sign-change root borders the separable side, so the separable
    # part can equal (never exceed) the total over this surface
    assert res.sep.final <= res.total.final


def test_interpolation_sweep_endpoint_matches_bures():
    rows = interpolation_sweep([1.0], CFG, 20_000)
    direct = estimate_volume(builtin_metric("bures", tilde=True), CFG, 20_000)
    assert rows[0]["V_total"] == pytest.approx(direct.total.final, rel=1e-12)
    assert rows[0]["V_sep"] == pytest.approx(direct.sep.final, rel=1e-12)


def test_qmc_convergence_toward_known_total():
    # deviation from the closed-form Bures-tilde total volume shrinks with n
    target = np.pi ** 8 / 5040.0
    errs = []
    for n in (100_000, 400_000):
        devs = []
        for seed in (2, 3, 4):
            cfg = SequenceConfig("faure-tezuka", 15, seed=seed)
            r = estimate_volume(builtin_metric("sd"), cfg, n)
            devs.append(abs(r.total.final - target) / target)
        errs.append(np.mean(devs))
    assert errs[1] < errs[0]
    assert errs[1] < 0.02


def test_overflow_diagnostic_counted():
    # index 0 of the unscrambled stream hits the simplex corner (1,0,0,0)
    cfg = SequenceConfig("faure-tezuka", 15, seed=0, scramble=False)
    res = estimate_volume(builtin_metric("sd"), cfg, 5_000)
    assert res.total.diagnostics.get("overflow", 0) >= 1
    assert np.isfinite(res.total.final)
