"""Monotone Riemannian metrics on two-qubit states.

Each metric is given by an operator monotone function f(t) with f(1) = 1
and the associated Morozova-Chentsov function c(x, y) = 1/(y f(x/y)).  The
infinitesimal distance is

    ds^2 = (1/4) sum_{j,k} c(lam_j, lam_k) |<j|dD|k>|^2

in the eigenbasis of D (for Bures, c = 2/(x+y), this is the standard
ds^2 = (1/2) sum |dD_jk|^2/(lam_j+lam_k)).  The "tilde" variant scales the
metric by 4 (statistical-distinguishability convention), which multiplies
d-dimensional measures by 2^d.

The 15-d volume element factorizes as

    sqrt(det G) = (1/512) * Q(lam) * H(lam) * J_simplex(theta) * w_frame(euler)

with Q = prod_{pairs} (dlam)^2 c / 2 and H = 1/sqrt(prod lam); the constant
1/512 is fixed by the metric convention and verified against the closed-form
Bures and Hilbert-Schmidt total volumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .qstate import (
    EULER_DIM,
    angles_to_state,
    det_partial_transpose,
    eigenvalues_from_angles,
    frame_unitary,
    frame_weight,
    state_parts,
)

__all__ = [
    "MonotoneMetricSpec",
    "UnsupportedMetricError",
    "builtin_metric",
    "interpolated_metric",
    "q_factor",
    "h_factor",
    "volume_element",
    "metric_tensor",
    "hyperarea_element_rank3",
    "hyperarea_element_rank4",
    "boundary_weight_rank4",
    "METRIC_NAMES",
    "SQRTDET_CONST",
]

#: sqrt(det G) = SQRTDET_CONST * Q * H * J * w  (15-d chart, untilde)
SQRTDET_CONST = 1.0 / 512.0

#: the same constant for the 14-d rank-3 stratum element
SQRTDET_CONST_RANK3 = 1.0 / 256.0

#: Hilbert-Schmidt pseudo-metric: c = 2 identically; its chart element is
#: 2^10 times SQRTDET_CONST * Q_HS * J * w (no H factor)
HS_EXTRA_FACTOR = 2.0 ** 10


class UnsupportedMetricError(ValueError):
    """Raised when a metric's element diverges on the requested stratum."""


@dataclass(frozen=True)
class MonotoneMetricSpec:
    """Operator monotone function f, Morozova-Chentsov function c, options.

    ``c_zero_limit`` is x -> lim_{y->0+} c(x, y), or None when that limit
    diverges (then rank-3 boundary elements are unsupported).  ``hs`` marks
    the flat Hilbert-Schmidt calibration pseudo-metric (c = 2, H = 1), which
    does not satisfy f(1) = 1 and is excluded from the monotone-family
    axioms.
    """

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    c: Callable[[np.ndarray, np.ndarray], np.ndarray]
    tilde: bool = False
    c_zero_limit: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hs: bool = False

    def with_tilde(self, tilde: bool) -> "MonotoneMetricSpec":
        return MonotoneMetricSpec(
            self.name, self.f, self.c, tilde, self.c_zero_limit, self.hs
        )


def _f_bures(t):
    return (1.0 + t) / 2.0


def _c_bures(x, y):
    return 2.0 / (x + y)


def _f_km(t):
    t = np.asarray(t, dtype=float)
    d = t - 1.0
    safe = np.where(np.abs(d) < 1e-8, 1.0, d)
    return np.where(np.abs(d) < 1e-8, 1.0 + d / 2.0, safe / np.log(np.where(t > 0, t, 1.0)))


def _c_km(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    m = np.abs(d) < 1e-12 * np.maximum(np.abs(x), np.abs(y))
    safe = np.where(m, 1.0, d)
    out = np.log(np.where(m, 1.0, x / y)) / safe
    return np.where(m, 2.0 / (x + y), out)


def _f_wy(t):
    return (np.sqrt(t) + 1.0) ** 2 / 4.0


def _c_wy(x, y):
    return 4.0 / (np.sqrt(x) + np.sqrt(y)) ** 2


def _f_gks(t):
    # t^(t/(t-1)) / e, with the t -> 1 limit equal to 1
    t = np.asarray(t, dtype=float)
    d = t - 1.0
    near = np.abs(d) < 1e-6
    safe = np.where(near, 1.0, d)
    expo = np.where(near, 1.0 + d / 2.0 - d * d / 24.0, t * np.log(np.where(t > 0, t, 1.0)) / safe)
    return np.exp(expo - 1.0)


def _c_gks(x, y):
    # 1/(y f(x/y)), symmetric in (x, y)
    return 1.0 / (y * _f_gks(x / y))


def _f_average(t):
    return (1.0 + 6.0 * t + t * t) / (4.0 + 4.0 * t)


def _c_average(x, y):
    return 4.0 * (x + y) / (x * x + 6.0 * x * y + y * y)


def _f_ni(t):
    t = np.asarray(t, dtype=float)
    d = t - 1.0
    near = np.abs(d) < 1e-6
    lt = np.log(np.where(t > 0, t, 1.0))
    safe = np.where(near, 1.0, lt)
    out = 2.0 * d * d / ((1.0 + t) * safe * safe)
    return np.where(near, 1.0 + d / 2.0, out)


def _c_ni(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    m = np.abs(d) < 1e-9 * np.maximum(np.abs(x), np.abs(y))
    safe = np.where(m, 1.0, d)
    lr = np.log(np.where(m, 1.0, x / y))
    out = (x + y) * lr * lr / (2.0 * safe * safe)
    return np.where(m, 2.0 / (x + y), out)


def _f_max(t):
    return 2.0 * t / (1.0 + t)


def _c_max(x, y):
    return (x + y) / (2.0 * x * y)


_BUILTINS = {
    "bures": MonotoneMetricSpec("bures", _f_bures, _c_bures, False, lambda x: 2.0 / x),
    "km": MonotoneMetricSpec("km", _f_km, _c_km, False, None),
    "wy": MonotoneMetricSpec("wy", _f_wy, _c_wy, False, lambda x: 4.0 / x),
    "gks": MonotoneMetricSpec("gks", _f_gks, _c_gks, False, lambda x: np.e / x),
    "average": MonotoneMetricSpec("average", _f_average, _c_average, False, lambda x: 4.0 / x),
    "ni": MonotoneMetricSpec("ni", _f_ni, _c_ni, False, None),
    "maximal": MonotoneMetricSpec("maximal", _f_max, _c_max, False, None),
    "hs": MonotoneMetricSpec("hs", lambda t: 0.5 / np.asarray(t, float), lambda x, y: 2.0 + 0.0 * np.asarray(x, float), False, None, hs=True),
}

METRIC_NAMES = tuple(_BUILTINS)


def builtin_metric(name: str, tilde: bool = False) -> MonotoneMetricSpec:
    """Look up a built-in metric by name ('sd' is shorthand for Bures tilde)."""
    key = name.lower()
    if key == "sd":
        return _BUILTINS["bures"].with_tilde(True)
    if key not in _BUILTINS:
        raise KeyError(f"unknown metric {name!r}; known: {sorted(_BUILTINS)} + 'sd'")
    return _BUILTINS[key].with_tilde(tilde)


def interpolated_metric(a: float, tilde: bool = False) -> MonotoneMetricSpec:
    """Family interpolating between the maximal (a=0) and Bures (a=1) metrics.

    c_a(x, y) = 2(x+y) / (a (x-y)^2 + 4 x y),
    f_a(t) = (1-a) 2t/(1+t) + a (1+t)/2;  a = 1/2 is the Average metric.
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"interpolation parameter a={a} outside [0, 1]")

    def f(t, _a=a):
        return (1.0 - _a) * 2.0 * t / (1.0 + t) + _a * (1.0 + t) / 2.0

    def c(x, y, _a=a):
        return 2.0 * (x + y) / (_a * (x - y) ** 2 + 4.0 * x * y)

    lim = (lambda x, _a=a: 2.0 / (_a * x)) if a > 0 else None
    return MonotoneMetricSpec(f"interp({a})", f, c, tilde, lim)


_IU, _JU = np.triu_indices(4, 1)


def q_factor(metric: MonotoneMetricSpec, lam):
    """Pairwise eigenvalue factor Q = prod_{nu<mu} (lam_nu - lam_mu)^2 c / 2."""
    lam = np.asarray(lam, dtype=float)
    li = lam[..., _IU]
    lj = lam[..., _JU]
    c = 2.0 if metric.hs else metric.c(li, lj)
    return np.prod((li - lj) ** 2 * c / 2.0, axis=-1)


def h_factor(lam, hs: bool = False):
    """H = 1/sqrt(prod lam); identically 1 for the Hilbert-Schmidt mode."""
    lam = np.asarray(lam, dtype=float)
    if hs:
        return np.ones(lam.shape[:-1])
    p = np.prod(lam, axis=-1)
    with np.errstate(divide="ignore"):
        return 1.0 / np.sqrt(p)


def volume_element(metric: MonotoneMetricSpec, angles):
    """sqrt(det G) in the 15-angle chart (the chart's Riemannian density).

    Equals SQRTDET_CONST * Q * H * J_simplex * w_frame, times 2^15 when the
    metric is a tilde (x4) variant; the Hilbert-Schmidt pseudo-metric swaps
    H for 1 and carries its own 2^10 convention factor.  Divergent values
    (possible for the maximal/NI metrics near the boundary) come back as
    inf, to be tagged by the caller rather than crash.
    """
    x = np.asarray(angles, dtype=float)
    lam, jac = eigenvalues_from_angles(x[..., 12], x[..., 13], x[..., 14])
    w = frame_weight(x[..., :EULER_DIM])
    q = q_factor(metric, lam)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        val = SQRTDET_CONST * q * h_factor(lam, metric.hs) * jac * w
    if metric.hs:
        return val * HS_EXTRA_FACTOR
    if metric.tilde:
        val = val * 2.0 ** 15
    return val


# ---------------------------------------------------------------------------
# full coordinate metric tensor and hyperarea elements
# ---------------------------------------------------------------------------

def _pair_weight(metric, lam):
    """(..., 4, 4) matrix of c(lam_j, lam_k) values."""
    lj = lam[..., :, None]
    lk = lam[..., None, :]
    if metric.hs:
        return 2.0 + 0.0 * lj * lk
    return metric.c(lj, lk)


def metric_tensor(metric: MonotoneMetricSpec, angles, h=1e-6):
    """Full 15x15 coordinate metric G via finite-difference state derivatives.

    G_ii' = (1/4) sum_{jk} c(lam_j, lam_k) Re[M_i,jk conj(M_i',jk)] with
    M_i = U^dagger (dD/dx_i) U; tilde multiplies G by 4.  Requires a
    nondegenerate spectrum (the eigenbasis form is ill-defined otherwise).
    """
    x = np.asarray(angles, dtype=float)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[None, :]
    D, U, lam = state_parts(x)
    gaps = np.abs(lam[..., :, None] - lam[..., None, :])[..., _IU, _JU]
    if np.any(gaps.min(axis=-1) <= 1e-8):
        raise ValueError("degenerate spectrum: eigenvalue gap below 1e-8")
    n = x.shape[0]
    M = np.empty((n, 15, 4, 4), dtype=complex)
    for i in range(15):
        xp = x.copy()
        xm = x.copy()
        xp[:, i] += h
        xm[:, i] -= h
        dD = (angles_to_state(xp) - angles_to_state(xm)) / (2 * h)
        M[:, i] = np.einsum("njk,nkl,nlm->njm", np.conj(np.swapaxes(U, -1, -2)), dD, U)
    C = _pair_weight(metric, lam)
    G = 0.25 * np.einsum("njk,nijk,nmjk->nim", C, M, np.conj(M)).real
    if metric.tilde:
        G = 4.0 * G
    return G[0] if squeeze else G


def _simplex_jacobian_matrix(t):
    """d(lam_j)/d(theta_i) as a (..., 4, 3) matrix, by analytic formulas."""
    t1, t2, t3 = t[..., 0], t[..., 1], t[..., 2]
    s1, c1 = np.sin(t1), np.cos(t1)
    s2, c2 = np.sin(t2), np.cos(t2)
    s3, c3 = np.sin(t3), np.cos(t3)
    z = np.zeros(t1.shape)
    J = np.stack(
        [
            np.stack([-np.sin(2 * t1), z, z], axis=-1),
            np.stack([np.sin(2 * t1) * c2 * c2, -(s1 * s1) * np.sin(2 * t2), z], axis=-1),
            np.stack(
                [
                    np.sin(2 * t1) * s2 * s2 * c3 * c3,
                    s1 * s1 * np.sin(2 * t2) * c3 * c3,
                    -(s1 * s1) * (s2 * s2) * np.sin(2 * t3),
                ],
                axis=-1,
            ),
            np.stack(
                [
                    np.sin(2 * t1) * s2 * s2 * s3 * s3,
                    s1 * s1 * np.sin(2 * t2) * s3 * s3,
                    s1 * s1 * s2 * s2 * np.sin(2 * t3),
                ],
                axis=-1,
            ),
        ],
        axis=-2,
    )
    return J


def _theta_block(metric, angles):
    """3x3 block of G over the eigenvalue angles: (1/4) J^T diag(c(l,l)) J."""
    t = np.asarray(angles)[..., 12:15]
    lam, _ = eigenvalues_from_angles(t[..., 0], t[..., 1], t[..., 2])
    J = _simplex_jacobian_matrix(t)
    cd = 2.0 + 0.0 * lam if metric.hs else metric.c(lam, lam)
    G = 0.25 * np.einsum("...ja,...j,...jb->...ab", J, cd, J)
    return 4.0 * G if metric.tilde else G


def _frame_modes(euler, h=1e-6):
    """A_i = U^dagger dU/de_i for the 12 Euler angles, batched.

    All 24 perturbed frames are built in a single call for speed.
    """
    e = np.asarray(euler, dtype=float)
    n = e.shape[0]
    U = frame_unitary(e)
    pert = np.repeat(e[:, None, :], 24, axis=1)
    for i in range(12):
        pert[:, 2 * i, i] += h
        pert[:, 2 * i + 1, i] -= h
    Up = frame_unitary(pert.reshape(n * 24, 12)).reshape(n, 24, 4, 4)
    dU = (Up[:, 0::2] - Up[:, 1::2]) / (2 * h)          # (n, 12, 4, 4)
    A = np.einsum("nkj,nikl->nijl", np.conj(U), dU)
    return U, A


def _euler_block_from_modes(metric, lam, A):
    """12x12 Euler block of G from precomputed frame modes A.

    The Euler tangent modes are M_i = [A_i, Lam], purely off-diagonal:
    M_i,jk = A_i,jk (lam_k - lam_j), so
    G_ii' = (1/4) sum_{j!=k} c_jk (lam_j-lam_k)^2 Re[A_i,jk conj(A_i',jk)].
    """
    dl = lam[..., :, None] - lam[..., None, :]
    C = _pair_weight(metric, lam)
    W = 0.25 * C * dl * dl
    G = np.einsum("njk,nijk,nmjk->nim", W, A, np.conj(A)).real
    return 4.0 * G if metric.tilde else G


def hyperarea_element_rank3(metric: MonotoneMetricSpec, a14):
    """14-d element on the rank-3 stratum (lam4 pinned to 0).

    a14 = (12 Euler angles, theta1, theta2); the limit of the chart element
    as the smallest eigenvalue goes to zero:

      (1/256) * H3 * Q3 * T * J_theta * w_frame,    T = prod_j c_lim(l_j) l_j^2 / 2

    times 2^14 for tilde metrics.  Unsupported (divergent) for KM and NI.
    """
    if metric.c_zero_limit is None:
        raise UnsupportedMetricError(
            f"metric {metric.name!r} diverges on the rank-3 stratum"
        )
    x = np.asarray(a14, dtype=float)
    e = x[..., :EULER_DIM]
    t1, t2 = x[..., 12], x[..., 13]
    s1, c1 = np.sin(t1), np.cos(t1)
    s2, c2 = np.sin(t2), np.cos(t2)
    lam3 = np.stack([c1 * c1, s1 * s1 * c2 * c2, s1 * s1 * s2 * s2], axis=-1)
    iu, ju = np.triu_indices(3, 1)
    li, lj = lam3[..., iu], lam3[..., ju]
    Q3 = np.prod((li - lj) ** 2 * metric.c(li, lj) / 2.0, axis=-1)
    T = np.prod(0.5 * metric.c_zero_limit(lam3) * lam3 ** 2, axis=-1)
    with np.errstate(divide="ignore"):
        H3 = 1.0 / np.sqrt(np.prod(lam3, axis=-1))
    Jt = np.abs(np.sin(2 * t1)) * s1 ** 2 * np.abs(np.sin(2 * t2))
    el = SQRTDET_CONST_RANK3 * Q3 * T * H3 * Jt * frame_weight(e)
    if metric.tilde:
        el = el * 2.0 ** 14
    return el


def _grad_det_pt(angles, h=1e-6):
    """15-d coordinate gradient of f = det(PT(D)) by central differences."""
    x = np.asarray(angles, dtype=float)
    n = x.shape[0]
    g = np.empty((n, 15))
    for i in range(15):
        xp = x.copy()
        xm = x.copy()
        xp[:, i] += h
        xm[:, i] -= h
        g[:, i] = (
            det_partial_transpose(angles_to_state(xp))
            - det_partial_transpose(angles_to_state(xm))
        ) / (2 * h)
    return g


def hyperarea_element_rank4(metric: MonotoneMetricSpec, a14, root, tangential_tol=1e-14):
    """Induced (coarea) surface element of {det PT = 0} at a solved root.

    dA = sqrt(det G) * ||grad f||_G / |df/dtheta_root| with
    ||grad f||_G^2 = grad f^T G^{-1} grad f; equal to the determinant of the
    induced 14x14 graph metric by the standard implicit-surface identity.
    ``a14`` holds the unsolved coordinates (12 Euler angles, theta2, theta3)
    and ``root`` the solved eigenvalue angle.

    Note: this is the geometric area element of the surface; the boundary
    estimator uses the level-set weight (boundary_weight_rank4) instead,
    which is the quantity the reference hyperareas tabulate.  See the
    package README.
    """
    a = np.atleast_2d(np.asarray(a14, dtype=float))
    r = np.atleast_1d(np.asarray(root, dtype=float))
    x = np.concatenate([a[:, :12], r[:, None], a[:, 12:14]], axis=1)
    g = _grad_det_pt(x)
    if np.any(np.abs(g[:, 12]) <= tangential_tol):
        raise ValueError("tangential root: |df/dtheta_root| below threshold")
    Gt = _theta_block(metric, x)
    U, A = _frame_modes(x[:, :12])
    lam, jac = eigenvalues_from_angles(x[:, 12], x[:, 13], x[:, 14])
    Ge = _euler_block_from_modes(metric, lam, A)
    q = q_factor(metric, lam)
    sd = SQRTDET_CONST * q * h_factor(lam) * jac * frame_weight(x[:, :12])
    if metric.tilde:
        sd = sd * 2.0 ** 15
    gt = g[:, 12:15]
    ge = g[:, :12]
    nrm2 = np.einsum("ni,nij,nj->n", gt, np.linalg.inv(Gt), gt) + np.einsum(
        "ni,nij,nj->n", ge, np.linalg.inv(Ge), ge
    )
    dA = sd * np.sqrt(nrm2) / np.abs(g[:, 12])
    return dA if np.asarray(a14).ndim > 1 else float(dA[0])


def boundary_weight_rank4(metric: MonotoneMetricSpec, a14, root):
    """Level-set hyperarea weight at a solved boundary root.

    sqrt of the determinant of G restricted to the 14 unsolved coordinates
    (the element of the constant-root-angle level set through the root),
    times 2^14 for tilde metrics.  Summed over roots and averaged over the
    14-cube this reproduces the tabulated boundary hyperareas.
    """
    a = np.atleast_2d(np.asarray(a14, dtype=float))
    r = np.atleast_1d(np.asarray(root, dtype=float))
    x = np.concatenate([a[:, :12], r[:, None], a[:, 12:14]], axis=1)
    U, A = _frame_modes(x[:, :12])
    lam, _ = eigenvalues_from_angles(x[:, 12], x[:, 13], x[:, 14])
    w = _boundary_weight_from_modes(metric, x, lam, A)
    return w if np.asarray(a14).ndim > 1 else float(w[0])


def _boundary_weight_from_modes(metric, x15, lam, A):
    """Batched level-set weight given precomputed frame modes.

    The block matrices already carry the tilde x4 scaling when the metric
    is a tilde variant, which contributes the full 2^14 on the 14-d
    determinant, so no further convention factor is applied here."""
    Gt = _theta_block(metric, x15)[:, 1:, 1:]  # drop the solved angle (theta1)
    Ge = _euler_block_from_modes(metric, lam, A)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        st, ldt = np.linalg.slogdet(Gt)
        se, lde = np.linalg.slogdet(Ge)
        out = np.exp(0.5 * (ldt + lde))
    return np.where((st > 0) & (se > 0), out, 0.0)
