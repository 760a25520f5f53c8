"""Closed-form constants, the conjecture ledger, isoperimetry and curvature.

Exact values are stored symbolically as rational multiples of powers of pi
and of the silver mean sigma = sqrt(2) - 1, so reference targets never
drift through decimal rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

__all__ = [
    "SILVER_MEAN",
    "ExactValue",
    "ConjectureEntry",
    "conjecture_table",
    "conjecture_lookup",
    "compare_to_conjecture",
    "bures_total_volume",
    "hall_constant",
    "sphere_volume",
    "cap_boundary_area",
    "levy_gromov_check",
    "ricci_diag",
    "bures_orthonormal_basis",
    "ricci_trace",
    "ricci_min_search",
]

SILVER_MEAN = math.sqrt(2.0) - 1.0


@dataclass(frozen=True)
class ExactValue:
    """rational * pi^pi_pow * sigma^sigma_pow, or infinity, or unknown."""

    rational: Fraction = Fraction(0)
    pi_pow: int = 0
    sigma_pow: int = 0
    infinite: bool = False
    unknown: bool = False

    def value(self) -> float:
        if self.unknown:
            return float("nan")
        if self.infinite:
            return float("inf")
        return float(self.rational) * math.pi ** self.pi_pow * SILVER_MEAN ** self.sigma_pow

    def __str__(self) -> str:
        if self.unknown:
            return "?"
        if self.infinite:
            return "inf"
        parts = [str(self.rational)]
        if self.pi_pow:
            parts.append(f"pi^{self.pi_pow}" if self.pi_pow != 1 else "pi")
        if self.sigma_pow:
            parts.append(f"sigma^{self.sigma_pow}" if self.sigma_pow != 1 else "sigma")
        return "*".join(parts)


def _ev(num, den=1, pi=0, sig=0) -> ExactValue:
    return ExactValue(Fraction(num, den), pi, sig)


_INF = ExactValue(infinite=True)
_UNK = ExactValue(unknown=True)


@dataclass(frozen=True)
class ConjectureEntry:
    metric: str
    quantity: str
    exact: ExactValue
    status: str  # known | conjectured | unknown | infinite
    superseded: bool = False


_QUANTITIES = ("V_sep", "V_total", "B_sep", "B_total", "Beta", "B_sep_plus_Beta")

# per-metric rows in quantity order above (tilde convention throughout)
_TABLE = {
    "bures": [_ev(1, 3, 0, 1), _ev(1, 5040, 8), _ev(43, 39, 0, 1),
              _ev(512, 135135, 7), _ev(55, 39, 0, 1), _ev(98, 39, 0, 1)],
    "gks": [_ev(4, 5, 0, 1), _ev(1, 1750, 8), _UNK, _UNK, _ev(270, 77, 0, 1), _UNK],
    "wy": [_ev(7, 4, 0, 1), _UNK, _ev(7735, 1, 0, 1), _ev(262144, 45045, 7),
           _ev(15950, 1, 0, 1), _ev(23685, 1, 0, 1)],
    "average": [_ev(29, 9, 0, 1), _ev(25, 8448, 8), _ev(255, 16, 0, 1),
                _ev(3437, 42075, 7), _ev(15, 1, 0, 1), _ev(495, 16, 0, 1)],
    "km": [_ev(10, 1, 0, 1), _ev(4, 315, 8), _INF, _INF, _ev(616, 13, 0, 1), _INF],
    "ni": [_UNK, _UNK, _INF, _INF, _UNK, _INF],
    "maximal": [_INF, _INF, _INF, _INF, _INF, _INF],
}

# entries with a proof in the literature rather than conjecture status
_KNOWN = {("bures", "V_total"), ("bures", "B_total"), ("km", "V_total"),
          ("wy", "B_total"), ("average", "V_total"), ("average", "B_total"),
          ("gks", "V_total")}


def conjecture_table() -> List[ConjectureEntry]:
    """Full ledger: per-metric volume/hyperarea values plus derived
    separability probabilities, ratios, and superseded historical guesses."""
    out = []
    for metric, row in _TABLE.items():
        for q, ev in zip(_QUANTITIES, row):
            if ev.unknown:
                status = "unknown"
            elif ev.infinite:
                status = "infinite"
            else:
                status = "known" if (metric, q) in _KNOWN else "conjectured"
            out.append(ConjectureEntry(metric, q, ev, status))
    # derived separability probabilities (ratios of table entries)
    out.append(ConjectureEntry("bures", "P_sep", _ev(1680, 1, -8, 1), "conjectured"))
    out.append(ConjectureEntry("km", "P_sep", _ev(1575, 2, -8, 1), "conjectured"))
    out.append(ConjectureEntry("bures", "Pi_sep_rank3", _ev(297297, 1024, -7, 1), "conjectured"))
    # ratios
    out.append(ConjectureEntry("bures", "ratio_rank3_vs_rank4", _ev(14157, 81920, 1), "conjectured"))
    out.append(ConjectureEntry("bures", "ratio_B_total_V_total", _ev(8192, 429, -1), "conjectured"))
    out.append(ConjectureEntry("bures", "ratio_Bsep_plus_Beta_V_sep", _ev(98, 13), "conjectured"))
    out.append(ConjectureEntry("km_over_bures", "P_sep_ratio", _ev(15, 32), "conjectured"))
    # historical guesses superseded by the silver-mean forms
    out.append(ConjectureEntry("bures", "V_sep", _ev(1, 6930, 6), "conjectured", superseded=True))
    out.append(ConjectureEntry("bures", "P_sep", _ev(8, 11, -2), "conjectured", superseded=True))
    return out


def conjecture_lookup(metric: str, quantity: str) -> Optional[ConjectureEntry]:
    for e in conjecture_table():
        if e.metric == metric and e.quantity == quantity and not e.superseded:
            return e
    return None


def compare_to_conjecture(series, metric: Optional[str] = None, quantity: Optional[str] = None):
    """Per-checkpoint deviation report of an EstimateSeries against the
    ledger target.  Raises on infinite/unknown/missing targets."""
    metric = metric if metric is not None else series.metric.rstrip("~")
    quantity = quantity if quantity is not None else series.kind
    entry = conjecture_lookup(metric, quantity)
    if entry is None:
        raise KeyError(f"no ledger entry for ({metric}, {quantity})")
    target = entry.exact.value()
    if not math.isfinite(target):
        raise ValueError(f"ledger entry ({metric}, {quantity}) is not finite/known")
    rows = [
        {"points": n, "estimate": v, "deviation": v - target, "relative": v / target - 1.0}
        for n, v in series.checkpoints
    ]
    return {"metric": metric, "quantity": quantity, "target": target,
            "target_symbolic": str(entry.exact), "rows": rows}


# ---------------------------------------------------------------------------
# normalization constants
# ---------------------------------------------------------------------------

def bures_total_volume(N: int) -> float:
    """Total Bures volume of the N-level state space:
    2^(1-N^2) pi^(N^2/2) / Gamma(N^2/2)."""
    if N < 2:
        raise ValueError("N must be >= 2")
    return 2.0 ** (1 - N * N) * math.pi ** (N * N / 2.0) / math.gamma(N * N / 2.0)


def hall_constant(N: int) -> float:
    """Normalization constant 2^(N^2-N) Gamma(N^2/2) / (pi^(N/2) prod Gamma(1..N+1))."""
    if N < 2:
        raise ValueError("N must be >= 2")
    denom = math.pi ** (N / 2.0)
    for k in range(1, N + 2):
        denom *= math.gamma(k)
    return 2.0 ** (N * N - N) * math.gamma(N * N / 2.0) / denom


# ---------------------------------------------------------------------------
# isoperimetry
# ---------------------------------------------------------------------------

def sphere_volume(n: int) -> float:
    """Content of the unit n-dimensional round body: pi^(n/2)/Gamma(n/2+1).

    (n = 15 gives 256 pi^7/2027025, the reference comparison volume for the
    15-d isoperimetric check.)"""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def cap_boundary_area(n: int, alpha: float) -> float:
    """(n-1)-content of the boundary of the region holding a fraction alpha
    of the unit n-ball's volume: n * V_n * alpha^((n-1)/n).

    This is the Euclidean isoperimetric profile (the minimizing region is a
    ball of volume alpha * V_n)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return n * sphere_volume(n) * alpha ** ((n - 1) / n)


def levy_gromov_check() -> Dict[str, object]:
    """Isoperimetric comparison for the separable two-qubit body.

    Compares the normalized profile Is(alpha) = s(alpha)/V_15 of the 15-d
    comparison body at alpha = P_sep (Bures) against the measured boundary-
    to-volume ratio (B_sep + beta)/V_total of the Bures geometry."""
    alpha = conjecture_lookup("bures", "P_sep").exact.value()  # 1680 sigma/pi^8
    v15 = sphere_volume(15)
    s = cap_boundary_area(15, alpha)
    is15 = s / v15
    bsb = conjecture_lookup("bures", "B_sep_plus_Beta").exact.value()
    vtot = conjecture_lookup("bures", "V_total").exact.value()
    # untilde Bures: 14-d areas carry 2^-14, the 15-d volume 2^-15
    ratio = (2.0 ** -14 * bsb) / (2.0 ** -15 * vtot)
    return {
        "alpha": alpha,
        "comparison_volume_15d": v15,
        "s_alpha": s,
        "Is_15": is15,
        "boundary_to_volume_ratio": ratio,
        "verdict": "violated" if is15 > ratio else "satisfied",
    }


# ---------------------------------------------------------------------------
# Ricci curvature (Bures)
# ---------------------------------------------------------------------------

def ricci_diag(rho, Y, Z) -> float:
    """Ricci(Y, Z) at a state with eigenvalues rho (diagonal gauge):

    3 sum_{m,n,h} Y_nm rho_h Z_mn / ((r_m+r_n)(r_m+r_h)(r_n+r_h))
      - (3/2) sum_{m,n} Y_mm Z_nn / (r_m+r_n)^2
    """
    r = np.asarray(rho, dtype=float)
    if np.any(r <= 0):
        raise ValueError("eigenvalues must be strictly positive")
    Y = np.asarray(Y, dtype=complex)
    Z = np.asarray(Z, dtype=complex)
    A = 1.0 / (r[:, None] + r[None, :])
    S = np.einsum("h,mh,nh->mn", r, A, A)
    term1 = 3.0 * np.einsum("nm,mn,mn->", Y, Z, A * S)
    term2 = 1.5 * np.einsum("m,n,mn->", np.diag(Y).real, np.diag(Z).real, A * A)
    return float(term1.real - term2)


def _hermitian_traceless_basis(N: int):
    """Euclidean-orthogonal basis of traceless Hermitian N x N matrices."""
    basis = []
    for j in range(N):
        for k in range(j + 1, N):
            M = np.zeros((N, N), dtype=complex)
            M[j, k] = M[k, j] = 1.0
            basis.append(M)
            M = np.zeros((N, N), dtype=complex)
            M[j, k] = -1j
            M[k, j] = 1j
            basis.append(M)
    for j in range(1, N):
        M = np.zeros((N, N), dtype=complex)
        M[:j, :j] = np.eye(j)
        M[j, j] = -j
        basis.append(M)
    return basis


def _bures_ip(rho, Y, Z) -> float:
    r = np.asarray(rho, dtype=float)
    A = 1.0 / (r[:, None] + r[None, :])
    return float(0.5 * np.einsum("jk,jk,jk->", Y, np.conj(Z), A).real)


def bures_orthonormal_basis(rho):
    """Gram-Schmidt orthonormalization of the traceless Hermitian tangent
    space in the Bures inner product at eigenvalues rho."""
    N = len(rho)
    out = []
    for M in _hermitian_traceless_basis(N):
        V = M.astype(complex)
        for B in out:
            V = V - _bures_ip(rho, V, B) * B
        nrm = math.sqrt(_bures_ip(rho, V, V))
        out.append(V / nrm)
    return out


def ricci_trace(N: int, rho=None) -> float:
    """Trace of the Ricci form over a Bures-orthonormal tangent basis,
    default at the fully mixed state."""
    r = np.full(N, 1.0 / N) if rho is None else np.asarray(rho, dtype=float)
    return sum(ricci_diag(r, B, B) for B in bures_orthonormal_basis(r))


# -- minimization of Ricci(Y, Y) over states and unit tangents --------------

_RHO_FLOOR = 1e-8


def _unpack(params, N):
    z = params[:N]
    z = z - z.max()
    rho = np.exp(z)
    rho = rho / rho.sum()
    rho = np.maximum(rho, _RHO_FLOOR)
    rho = rho / rho.sum()
    Y = np.zeros((N, N), dtype=complex)
    p = N
    for j in range(N):
        for k in range(j + 1, N):
            Y[j, k] = params[p] + 1j * params[p + 1]
            Y[k, j] = np.conj(Y[j, k])
            p += 2
    d = params[p : p + N - 1]
    Y[np.diag_indices(N)] = np.append(d, -d.sum())
    return rho, Y


def _objective(params, N):
    rho, Y = _unpack(params, N)
    nrm2 = float(np.sum(np.abs(Y) ** 2))
    if nrm2 < 1e-20:
        return 1e6
    return ricci_diag(rho, Y, Y) / nrm2


def ricci_min_search(N: int, trials: int = 100_000, refinement: int = 400, seed: int = 0):
    """Minimize Ricci(Y, Y) over eigenvalue vectors rho and unit tangents Y.

    Random restarts (``trials`` samples) followed by simplex refinement of
    the best starts; Y is normalized to unit Euclidean length (Tr Y^2 = 1).
    Returns (min value, dict with rho and Y at the argmin).
    """
    if N not in (2, 3, 4):
        raise ValueError("N must be 2, 3 or 4")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, N])))
    nparam = N + N * (N - 1) + (N - 1)
    best_val = np.inf
    best_p = None
    batch = 2048
    done = 0
    starts = []
    while done < trials:
        m = min(batch, trials - done)
        P = rng.normal(size=(m, nparam))
        vals = np.array([_objective(P[i], N) for i in range(m)])
        order = np.argsort(vals)[: max(1, 40 * m // trials + 1)]
        for i in order:
            starts.append((vals[i], P[i]))
        done += m
    starts.sort(key=lambda t: t[0])
    for v0, p0 in starts[:40]:
        res = minimize(_objective, p0, args=(N,), method="Nelder-Mead",
                       options={"maxiter": refinement, "xatol": 1e-10, "fatol": 1e-12})
        if res.fun < best_val:
            best_val = float(res.fun)
            best_p = res.x
    rho, Y = _unpack(best_p, N)
    Y = Y / math.sqrt(float(np.sum(np.abs(Y) ** 2)))
    return best_val, {"rho": rho, "Y": Y}
