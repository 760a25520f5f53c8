"""Unit tests for closed forms, the conjecture ledger, isoperimetry and
Bures Ricci curvature."""

import math
from fractions import Fraction

import numpy as np
import pytest

from qstatevol import analytic as an
from qstatevol.integrate import EstimateSeries

SIGMA = an.SILVER_MEAN


def test_silver_mean():
    assert SIGMA == pytest.approx(math.sqrt(2) - 1, abs=0)
    assert 1 / (2 + SIGMA) == pytest.approx(SIGMA, rel=1e-15)


def test_bures_total_volume():
    assert an.bures_total_volume(2) == pytest.approx(math.pi ** 2 / 8, rel=1e-14)
    v4 = an.bures_total_volume(4)
    assert v4 == pytest.approx(5.74538e-5, rel=1e-5)
    assert v4 * 2 ** 15 == pytest.approx(math.pi ** 8 / 5040, rel=1e-14)
    with pytest.raises(ValueError):
        an.bures_total_volume(1)


def test_hall_constant():
    assert an.hall_constant(2) == pytest.approx(2 / math.pi, rel=1e-14)
    with pytest.raises(ValueError):
        an.hall_constant(0)


def lookup(metric, quantity):
    e = an.conjecture_lookup(metric, quantity)
    assert e is not None, (metric, quantity)
    return e


def test_table_decimals_match_published_values():
    cases = {
        ("bures", "V_sep"): 0.138071,
        ("bures", "V_total"): 1.882645,
        ("bures", "B_sep"): 0.456697,
        ("bures", "B_total"): 11.4433,
        ("bures", "Beta"): 0.584147,
        ("bures", "B_sep_plus_Beta"): 1.04084,
        ("gks", "V_sep"): 0.331371,
        ("gks", "V_total"): 5.42202,
        ("gks", "Beta"): 1.45244,
        ("wy", "V_sep"): 0.724874,
        ("wy", "B_sep"): 3203.94,
        ("wy", "B_total"): 17576.9,
        ("average", "V_sep"): 1.33469,
        ("average", "V_total"): 28.0792,
        ("average", "B_sep"): 6.60153,
        ("km", "V_sep"): 4.14214,
        ("km", "V_total"): 120.489,
        ("km", "Beta"): 19.6274,
        ("bures", "P_sep"): 0.0733389,
        ("km", "P_sep"): 0.0343776,
        ("bures", "Pi_sep_rank3"): 0.0398167,
    }
    for (m, q), dec in cases.items():
        assert lookup(m, q).exact.value() == pytest.approx(dec, rel=1e-5), (m, q)


def test_table_statuses():
    assert lookup("bures", "V_total").status == "known"
    assert lookup("bures", "V_sep").status == "conjectured"
    assert lookup("km", "B_total").status == "infinite"
    assert lookup("ni", "V_sep").status == "unknown"
    assert an.conjecture_lookup("bogus", "V_sep") is None


def test_superseded_entries_present_but_not_looked_up():
    sup = [e for e in an.conjecture_table() if e.superseded]
    vals = sorted(e.exact.value() for e in sup)
    assert vals[0] == pytest.approx(0.0736881, rel=1e-5)   # old P_sep guess
    assert vals[1] == pytest.approx(0.138729, rel=1e-5)    # old V_sep guess
    assert lookup("bures", "V_sep").exact.sigma_pow == 1   # current form wins


def test_exact_ratio_identities():
    """Derived entries agree with ratios of table entries by exact rational
    arithmetic (the common powers of pi and sigma cancel)."""

    def frac(m, q):
        e = lookup(m, q).exact
        return e.rational, e.pi_pow, e.sigma_pow

    # P_sep = V_sep / V_total
    for m in ("bures", "km"):
        rs, ps, ss = frac(m, "V_sep")
        rt, pt, st = frac(m, "V_total")
        rp, pp, sp = frac(m, "P_sep")
        assert rs / rt == rp and ps - pt == pp and ss - st == sp
    # (B_sep + Beta)/V_sep = 98/13 exactly for the Bures family
    rs, _, _ = frac("bures", "B_sep_plus_Beta")
    rv, _, _ = frac("bures", "V_sep")
    assert rs / rv == Fraction(98, 13)
    # rank-3 vs rank-4 separable-probability ratio
    r3, p3, s3 = frac("bures", "Pi_sep_rank3")
    r4, p4, s4 = frac("bures", "P_sep")
    rr, pr, sr = frac("bures", "ratio_rank3_vs_rank4")
    assert r3 / r4 == rr and p3 - p4 == pr and s3 - s4 == sr
    # KM/Bures separability-probability ratio 15/32
    rk, _, _ = frac("km", "P_sep")
    rb, _, _ = frac("bures", "P_sep")
    assert rk / rb == Fraction(15, 32)
    # B_total/V_total for Bures
    rbt, pbt, _ = frac("bures", "B_total")
    rvt, pvt, _ = frac("bures", "V_total")
    rr, pr, _ = frac("bures", "ratio_B_total_V_total")
    assert rbt / rvt == rr and pbt - pvt == pr
    # B_sep + Beta really is the sum of its parts
    assert frac("bures", "B_sep")[0] + frac("bures", "Beta")[0] == Fraction(98, 39)


def test_km_to_bures_volume_ratio_is_power_of_two():
    # V_KM / V_Bures = 2^(N(N-1)/2) = 64 at N = 4, exactly from the ledger
    rk = lookup("km", "V_total").exact.rational
    rb = lookup("bures", "V_total").exact.rational
    assert rk / rb == Fraction(64)


def test_nonseparable_volume_and_numerology():
    vt = lookup("bures", "V_total").exact.value()
    vs = lookup("bures", "V_sep").exact.value()
    assert vt - vs == pytest.approx(1.74457, rel=1e-5)
    # near-integer coincidence in the average-metric family
    x = 2449 * math.pi ** 8 / 887040 - 26 * SIGMA / 9
    assert x == pytest.approx(24.99996094, abs=5e-8)
    # GKS separability probability
    gp = lookup("gks", "V_sep").exact.value() / lookup("gks", "V_total").exact.value()
    assert gp == pytest.approx(1400 * SIGMA / math.pi ** 8, rel=1e-12)
    assert gp == pytest.approx(0.0611158, rel=1e-5)


def test_compare_to_conjecture():
    s = EstimateSeries(metric="bures", kind="V_total",
                       checkpoints=[(10, 1.9), (20, 1.88)], final=1.88)
    rep = an.compare_to_conjecture(s)
    assert rep["target"] == pytest.approx(math.pi ** 8 / 5040)
    assert rep["rows"][1]["relative"] == pytest.approx(1.88 / rep["target"] - 1)
    with pytest.raises(KeyError):
        an.compare_to_conjecture(s, metric="bogus")
    with pytest.raises(ValueError):
        an.compare_to_conjecture(s, metric="maximal", quantity="V_total")


def test_sphere_volume_and_cap():
    assert an.sphere_volume(15) == pytest.approx(256 * math.pi ** 7 / 2027025, rel=1e-14)
    assert an.sphere_volume(2) == pytest.approx(math.pi, rel=1e-14)
    assert an.sphere_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-14)
    # alpha = 1 recovers the full boundary area n * V_n
    assert an.cap_boundary_area(15, 1.0) == pytest.approx(15 * an.sphere_volume(15))
    # profile increases monotonically on [0, 1]
    a = np.linspace(0.01, 1.0, 50)
    vals = [an.cap_boundary_area(15, x) for x in a]
    assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        an.cap_boundary_area(15, 1.5)


def test_levy_gromov_check():
    out = an.levy_gromov_check()
    assert out["alpha"] == pytest.approx(0.0733389, rel=1e-5)
    assert out["comparison_volume_15d"] == pytest.approx(0.381443, rel=1e-5)
    assert out["s_alpha"] == pytest.approx(0.499459, rel=1e-5)
    assert out["Is_15"] == pytest.approx(1.309394, rel=1e-5)
    assert out["boundary_to_volume_ratio"] == pytest.approx(1.105726, rel=1e-5)
    assert out["verdict"] == "violated"


def test_ricci_diag_symmetry_and_errors():
    rng = np.random.default_rng(0)
    r = rng.dirichlet(np.ones(4))
    basis = an.bures_orthonormal_basis(r)
    Y, Z = basis[0], basis[1]
    assert an.ricci_diag(r, Y, Z) == pytest.approx(an.ricci_diag(r, Z, Y), rel=1e-10)
    with pytest.raises(ValueError):
        an.ricci_diag(np.array([0.5, 0.5, 0.0, 0.0]), Y, Z)


def test_bures_orthonormal_basis():
    rng = np.random.default_rng(1)
    r = rng.dirichlet(np.ones(3))
    basis = an.bures_orthonormal_basis(r)
    assert len(basis) == 8
    G = np.array([[an._bures_ip(r, A, B) for B in basis] for A in basis])
    assert np.allclose(G, np.eye(8), atol=1e-10)


def test_ricci_trace_at_maximally_mixed():
    # trace over a Bures-orthonormal basis; the constant factors 4/3 (N=2)
    # and 19/12 (N=4) relate these to the sectional-sum values 24 and 570
    assert an.ricci_trace(2) == pytest.approx(18.0, rel=1e-10)
    assert an.ricci_trace(2) * 4 / 3 == pytest.approx(24.0, rel=1e-10)
    assert an.ricci_trace(4) == pytest.approx(360.0, rel=1e-10)
    assert an.ricci_trace(4) * 19 / 12 == pytest.approx(570.0, rel=1e-10)


def test_ricci_min_search_small():
    val, info = an.ricci_min_search(2, trials=2000, refinement=100, seed=0)
    assert np.isfinite(val) and val > 0
    assert info["rho"].sum() == pytest.approx(1.0)
    assert np.sum(np.abs(info["Y"]) ** 2) == pytest.approx(1.0, rel=1e-8)
    with pytest.raises(ValueError):
        an.ricci_min_search(5, trials=10)
