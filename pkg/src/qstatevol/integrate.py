"""Volume and boundary estimators.

Streams points from a configured sequence, maps them onto the angle boxes,
evaluates the Riemannian elements, splits by separability, and maintains
checkpointed cumulative estimates.  Accumulation is deterministic: points
are processed in fixed blocks of 4096, per-block sums are reduced with a
fixed pairwise tree in index order, so results are independent of the
thread count and of how the index range is partitioned.

Normalization: the angle boxes cover the state space a fixed integral
number of times (24 for the 15-d chart, 6 for the rank-3 stratum box, 48
for the boundary base box including the two-fold root-angle symmetry), so
estimates are box-average x box-volume / coverage.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import metrics as _mx
from .metrics import (
    MonotoneMetricSpec,
    UnsupportedMetricError,
    hyperarea_element_rank3,
    interpolated_metric,
)
from .qstate import (
    ROOT_ANGLE_RANGE,
    SEPARABILITY_TOL,
    boundary_base_ranges,
    det4,
    eigenvalues_from_angles,
    frame_unitary,
    frame_weight,
    partial_transpose,
    volume_box_ranges,
)

__all__ = [
    "BLOCK",
    "COVERAGE_VOLUME",
    "COVERAGE_RANK3",
    "COVERAGE_RANK4",
    "EstimateSeries",
    "VolumeEstimate",
    "BoundaryEstimate",
    "estimate_volume",
    "estimate_volume_multi",
    "estimate_boundary",
    "find_boundary_roots",
    "interpolation_sweep",
]

BLOCK = 4096

#: how many times the 15-angle box covers the state space (eigenvalue
#: orderings / frame redundancy of the squared-hypersphere chart)
COVERAGE_VOLUME = 24.0
#: same for the 14-d rank-3 box (3 eigenvalue orderings x 2)
COVERAGE_RANK3 = 6.0
#: rank-4 boundary base box, including the two-fold symmetry of the solved
#: root angle over [0, pi]
COVERAGE_RANK4 = 48.0

_R15 = volume_box_ranges()
_R14 = boundary_base_ranges()
VOLUME_BOX_CONTENT = float(np.prod(_R15[:, 1] - _R15[:, 0]))
BOUNDARY_BOX_CONTENT = float(np.prod(_R14[:, 1] - _R14[:, 0]))


def _tree_sum(a: np.ndarray) -> float:
    """Pairwise reduction in fixed index order (thread-count independent)."""
    a = np.asarray(a, dtype=float)
    n = a.size
    if n == 0:
        return 0.0
    while n > 1:
        half = n // 2
        a = np.concatenate([a[: 2 * half : 2] + a[1 : 2 * half : 2], a[2 * half : n]])
        n = a.size
    return float(a[0])


@dataclass
class EstimateSeries:
    """One estimated quantity with its convergence checkpoints."""

    metric: str
    kind: str
    checkpoints: List[Tuple[int, float]] = field(default_factory=list)
    final: float = float("nan")
    diagnostics: Dict[str, int] = field(default_factory=dict)


@dataclass
class VolumeEstimate:
    """Total/separable/nonseparable volume series from one point stream.

    The total is defined as separable + nonseparable at every checkpoint,
    so the split sums to the total exactly.
    """

    metric: str
    total: EstimateSeries = None
    sep: EstimateSeries = None
    nonsep: EstimateSeries = None

    @property
    def prob_sep(self) -> float:
        return self.sep.final / self.total.final


@dataclass
class BoundaryEstimate:
    """Boundary hyperarea series: total over the surface and separable part.

    For rank-4 runs the separable part is the separable-nonseparable
    boundary (conventionally called beta); checkpoints carry both values.
    """

    metric: str
    surface: str
    total: EstimateSeries = None
    sep: EstimateSeries = None
    diagnostics: Dict[str, float] = field(default_factory=dict)


def _as_metric_dict(metric) -> Dict[str, MonotoneMetricSpec]:
    if isinstance(metric, MonotoneMetricSpec):
        return {metric.name + ("~" if metric.tilde else ""): metric}
    if isinstance(metric, dict):
        return dict(metric)
    return {m.name + ("~" if m.tilde else ""): m for m in metric}


def _checkpoint_counts(n_points: int, every: int) -> List[int]:
    cps = list(range(every, n_points + 1, every))
    if not cps or cps[-1] != n_points:
        cps.append(n_points)
    return cps


# ---------------------------------------------------------------------------
# volume estimation
# ---------------------------------------------------------------------------

def _volume_block(names, specs, cfg, replication, start, count):
    from .sequences import sequence_points

    pts = sequence_points(cfg, start, count, replication)
    x = _R15[:, 0] + pts * (_R15[:, 1] - _R15[:, 0])
    e = x[:, :12]
    U = frame_unitary(e)
    lam, jac = eigenvalues_from_angles(x[:, 12], x[:, 13], x[:, 14])
    w = frame_weight(e)
    D = np.einsum("nij,nj,nkj->nik", U, lam.astype(complex), np.conj(U))
    detpt = det4(partial_transpose(D)).real
    sep = detpt >= -SEPARABILITY_TOL
    base = jac * w
    out = {}
    for name in names:
        m = specs[name]
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            q = _mx.q_factor(m, lam)
            val = _mx.SQRTDET_CONST * q * _mx.h_factor(lam, m.hs) * base
        if m.hs:
            val = val * _mx.HS_EXTRA_FACTOR
        elif m.tilde:
            val = val * 2.0 ** 15
        bad = ~np.isfinite(val)
        nbad = int(bad.sum())
        if nbad:
            val = np.where(bad, 0.0, val)
        vsep = np.where(sep, val, 0.0)
        vnon = np.where(sep, 0.0, val)
        out[name] = (np.cumsum(vsep), np.cumsum(vnon), nbad)
    return out


def estimate_volume_multi(
    metric,
    cfg,
    n_points: int,
    checkpoint_every: int = 1_000_000,
    threads: int = 1,
    replication: int = 0,
) -> Dict[str, VolumeEstimate]:
    """Estimate total/separable/nonseparable volumes for several metrics in
    a single pass over one point stream.  Returns {label: VolumeEstimate}."""
    specs = _as_metric_dict(metric)
    names = list(specs)
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    cps = _checkpoint_counts(n_points, checkpoint_every)
    starts = list(range(0, n_points, BLOCK))

    def job(s):
        return _volume_block(names, specs, cfg, replication, s, min(BLOCK, n_points - s))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            payloads = list(ex.map(job, starts))
    else:
        payloads = [job(s) for s in starts]

    scale = VOLUME_BOX_CONTENT / COVERAGE_VOLUME
    results = {}
    for name in names:
        bsep = np.array([p[name][0][-1] for p in payloads])
        bnon = np.array([p[name][1][-1] for p in payloads])
        nbad = sum(p[name][2] for p in payloads)
        series = {k: EstimateSeries(name, k, diagnostics={"overflow": nbad})
                  for k in ("V_total", "V_sep", "V_nonsep")}
        for c in cps:
            nb, off = divmod(c, BLOCK)
            ssep = _tree_sum(bsep[:nb])
            snon = _tree_sum(bnon[:nb])
            if off:
                ssep += payloads[nb][name][0][off - 1]
                snon += payloads[nb][name][1][off - 1]
            vs = float(ssep / c * scale)
            vn = float(snon / c * scale)
            series["V_sep"].checkpoints.append((c, vs))
            series["V_nonsep"].checkpoints.append((c, vn))
            series["V_total"].checkpoints.append((c, vs + vn))
        for s in series.values():
            s.final = s.checkpoints[-1][1]
        results[name] = VolumeEstimate(
            name, series["V_total"], series["V_sep"], series["V_nonsep"]
        )
    return results


def estimate_volume(metric, cfg, n_points, checkpoint_every=1_000_000, threads=1, replication=0) -> VolumeEstimate:
    """Single-metric convenience wrapper around estimate_volume_multi."""
    specs = _as_metric_dict(metric)
    if len(specs) != 1:
        raise ValueError("estimate_volume takes one metric; use estimate_volume_multi")
    (label,) = specs
    return estimate_volume_multi(specs, cfg, n_points, checkpoint_every, threads, replication)[label]


# ---------------------------------------------------------------------------
# boundary root search
# ---------------------------------------------------------------------------

def _root_search_batch(a14, root_range=ROOT_ANGLE_RANGE, grid_cells=256, iters=48):
    """All det(PT) = 0 roots of the solved eigenvalue angle, batched.

    For fixed base coordinates the state is D(t) = cos^2(t) P1 + sin^2(t) M
    with P1, M fixed, so det(PT) is evaluated as a determinant of a matrix
    linear in cos^2(t); sign changes on a uniform grid are bisected.

    Returns (roots, counts, U) where roots is a flat array, counts[i] is
    the number of roots of base point i (np.repeat recovers the mapping),
    and U are the frame unitaries (reusable by the caller).
    """
    a = np.asarray(a14, dtype=float)
    n = a.shape[0]
    e = a[:, :12]
    t2, t3 = a[:, 12], a[:, 13]
    U = frame_unitary(e)
    u1 = U[:, :, 0]
    P1 = u1[:, :, None] * np.conj(u1)[:, None, :]
    s2, c2 = np.sin(t2), np.cos(t2)
    s3, c3 = np.sin(t3), np.cos(t3)
    mrest = np.stack([c2 * c2, s2 * s2 * c3 * c3, s2 * s2 * s3 * s3], axis=-1)
    M = np.einsum("nij,nj,nkj->nik", U[:, :, 1:], mrest.astype(complex), np.conj(U[:, :, 1:]))
    Bp = partial_transpose(P1)
    Cp = partial_transpose(M)

    lo, hi = root_range
    tg = np.linspace(lo, hi, grid_cells + 1)
    xg = np.cos(tg) ** 2
    # F[i, g] = det(PT) at grid node g of base point i, chunked for memory
    F = np.empty((n, grid_cells + 1))
    chunk = max(1, (1 << 24) // (grid_cells + 1))
    for s in range(0, n, chunk):
        sl = slice(s, min(s + chunk, n))
        A = xg[None, :, None, None] * Bp[sl, None] + (1 - xg)[None, :, None, None] * Cp[sl, None]
        F[sl] = det4(A).real

    change = F[:, :-1] * F[:, 1:] < 0.0
    bi, bg = np.nonzero(change)
    tlo = tg[bg].copy()
    thi = tg[bg + 1].copy()
    flo = F[bi, bg].copy()
    Bb, Cb = Bp[bi], Cp[bi]
    for _ in range(iters):
        tm = 0.5 * (tlo + thi)
        xm = np.cos(tm) ** 2
        fm = det4(xm[:, None, None] * Bb + (1 - xm)[:, None, None] * Cb).real
        left = flo * fm < 0.0
        thi = np.where(left, tm, thi)
        tlo = np.where(left, tlo, tm)
        flo = np.where(left, flo, fm)
    roots = 0.5 * (tlo + thi)

    # exact zeros at interior grid nodes count as roots too (measure zero)
    zi, zg = np.nonzero(F[:, 1:-1] == 0.0)
    if zi.size:
        bi = np.concatenate([bi, zi])
        roots = np.concatenate([roots, tg[zg + 1]])
        order = np.argsort(bi, kind="stable")
        bi, roots = bi[order], roots[order]

    counts = np.bincount(bi, minlength=n)
    return roots, counts, U


def find_boundary_roots(a14, root_range=ROOT_ANGLE_RANGE, grid_cells=256, dedupe_tol=1e-9):
    """Roots of the solved eigenvalue angle -> det(PT) map for one base point.

    Uniform grid bracketing (grid_cells cells over root_range) plus
    bisection; roots closer than dedupe_tol are merged.  Returns a sorted
    list (possibly empty)."""
    a = np.asarray(a14, dtype=float)
    if a.shape != (14,):
        raise ValueError("expected 14 base coordinates")
    roots, counts, _ = _root_search_batch(a[None, :], root_range, grid_cells)
    r = np.sort(roots[: counts[0]])
    keep = np.ones(r.size, dtype=bool)
    keep[1:] = np.diff(r) > dedupe_tol
    return list(r[keep])


# ---------------------------------------------------------------------------
# boundary estimation
# ---------------------------------------------------------------------------

def _rank3_block(names, specs, cfg, replication, start, count):
    from .sequences import sequence_points

    pts = sequence_points(cfg, start, count, replication)
    x = _R14[:, 0] + pts * (_R14[:, 1] - _R14[:, 0])
    e = x[:, :12]
    t1, t2 = x[:, 12], x[:, 13]
    U = frame_unitary(e)
    s1, c1 = np.sin(t1), np.cos(t1)
    s2, c2 = np.sin(t2), np.cos(t2)
    lam3 = np.stack([c1 * c1, s1 * s1 * c2 * c2, s1 * s1 * s2 * s2], axis=-1)
    D = np.einsum("nij,nj,nkj->nik", U[:, :, :3], lam3.astype(complex), np.conj(U[:, :, :3]))
    sep = det4(partial_transpose(D)).real >= -SEPARABILITY_TOL
    out = {}
    for name in names:
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            el = hyperarea_element_rank3(specs[name], x)
        bad = ~np.isfinite(el)
        nbad = int(bad.sum())
        if nbad:
            el = np.where(bad, 0.0, el)
        out[name] = (np.cumsum(el), np.cumsum(np.where(sep, el, 0.0)), nbad, {})
    return out


def _rank4_block(names, specs, cfg, replication, start, count):
    from .sequences import sequence_points

    pts = sequence_points(cfg, start, count, replication)
    x = _R14[:, 0] + pts * (_R14[:, 1] - _R14[:, 0])
    roots, counts, U = _root_search_batch(x)
    hist = np.bincount(counts, minlength=9)
    has = counts > 0
    diag = {"root_hist": hist, "points_with_roots": int(has.sum()), "points": count}
    if roots.size == 0:
        z = np.zeros(count)
        return {name: (z.copy(), z.copy(), 0, diag) for name in names}

    idx = np.repeat(np.arange(count), counts)       # base-point index per root
    xb = x[idx]
    x15 = np.concatenate([xb[:, :12], roots[:, None], xb[:, 12:14]], axis=1)
    lam, _ = eigenvalues_from_angles(roots, xb[:, 12], xb[:, 13])

    # separable-side attribution: the boundary piece borders the separable
    # body iff det(PT) is positive just to one side of the root
    eps = 1e-7
    u1 = U[idx, :, 0]
    P1 = u1[:, :, None] * np.conj(u1)[:, None, :]
    Dr = np.einsum("nij,nj,nkj->nik", U[idx], lam.astype(complex), np.conj(U[idx]))
    Bp = partial_transpose(P1)
    # PT of the normalized rest-of-spectrum part: D(t) = cos^2 t P1 + sin^2 t Mrest
    Brest = partial_transpose(Dr - lam[:, 0, None, None] * P1) / np.maximum(
        np.sin(roots) ** 2, 1e-300
    )[:, None, None]

    def g_at(t):
        xt = np.cos(t) ** 2
        return det4(xt[:, None, None] * Bp + (1 - xt)[:, None, None] * Brest).real

    sep_side = (g_at(roots + eps) >= -SEPARABILITY_TOL) | (g_at(roots - eps) >= -SEPARABILITY_TOL)

    # frame modes only for base points that actually carry roots
    which = np.nonzero(has)[0]
    _, A = _mx._frame_modes(x[which, :12])
    pos = np.full(count, -1)
    pos[which] = np.arange(which.size)
    Aroot = A[pos[idx]]

    out = {}
    for name in names:
        m = specs[name]
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            w = _mx._boundary_weight_from_modes(m, x15, lam, Aroot)
        bad = ~np.isfinite(w)
        nbad = int(bad.sum())
        if nbad:
            w = np.where(bad, 0.0, w)
        # fold per-root weights back to per-base-point values
        tot = np.bincount(idx, weights=w, minlength=count)
        sp = np.bincount(idx, weights=np.where(sep_side, w, 0.0), minlength=count)
        out[name] = (np.cumsum(tot), np.cumsum(sp), nbad, diag)
    return out


def estimate_boundary(
    metric,
    cfg,
    n_points: int,
    surface: str = "rank4_sep",
    checkpoint_every: int = 100_000,
    threads: int = 1,
    replication: int = 0,
):
    """Estimate boundary hyperareas over the 14-d base box.

    surface: 'rank3' (lam4 pinned to zero; total and separable part) or
    'rank4_sep'/'rank4_all' (det(PT) = 0 hypersurface inside the rank-4
    body, found by root search along the remaining eigenvalue angle).
    Returns {label: BoundaryEstimate} for a metric collection, or a single
    BoundaryEstimate for a single metric.
    """
    single = isinstance(metric, MonotoneMetricSpec)
    specs = _as_metric_dict(metric)
    names = list(specs)
    if surface not in ("rank3", "rank4_sep", "rank4_all"):
        raise ValueError(f"unknown surface {surface!r}")
    if surface == "rank3":
        for m in specs.values():
            if m.c_zero_limit is None and not m.hs:
                raise UnsupportedMetricError(
                    f"metric {m.name!r} diverges on the rank-3 stratum"
                )
        blockfn = _rank3_block
        coverage = COVERAGE_RANK3
    else:
        blockfn = _rank4_block
        coverage = COVERAGE_RANK4
    cps = _checkpoint_counts(n_points, checkpoint_every)
    starts = list(range(0, n_points, BLOCK))

    def job(s):
        return blockfn(names, specs, cfg, replication, s, min(BLOCK, n_points - s))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            payloads = list(ex.map(job, starts))
    else:
        payloads = [job(s) for s in starts]

    scale = BOUNDARY_BOX_CONTENT / coverage
    hist = np.zeros(9, dtype=np.int64)
    pts_with_roots = 0
    for p in payloads:
        d = next(iter(p.values()))[3]
        if "root_hist" in d:
            h = d["root_hist"]
            if h.size > hist.size:
                hist = np.pad(hist, (0, h.size - hist.size))
            hist[: h.size] += h
            pts_with_roots += d["points_with_roots"]

    results = {}
    for name in names:
        btot = np.array([p[name][0][-1] for p in payloads])
        bsep = np.array([p[name][1][-1] for p in payloads])
        nbad = sum(p[name][2] for p in payloads)
        stot = EstimateSeries(name, "B_total", diagnostics={"overflow": nbad})
        ssep = EstimateSeries(name, "B_sep" if surface == "rank3" else "Beta_rank4_sep")
        for c in cps:
            nb, off = divmod(c, BLOCK)
            vt = _tree_sum(btot[:nb])
            vs = _tree_sum(bsep[:nb])
            if off:
                vt += payloads[nb][name][0][off - 1]
                vs += payloads[nb][name][1][off - 1]
            stot.checkpoints.append((c, float(vt / c * scale)))
            ssep.checkpoints.append((c, float(vs / c * scale)))
        stot.final = stot.checkpoints[-1][1]
        ssep.final = ssep.checkpoints[-1][1]
        diag = {"overflow": nbad}
        if surface != "rank3":
            diag["root_fraction"] = pts_with_roots / n_points
            diag["root_hist"] = hist.tolist()
        results[name] = BoundaryEstimate(name, surface, stot, ssep, diag)
    return results[names[0]] if single else results


# ---------------------------------------------------------------------------
# interpolation sweep
# ---------------------------------------------------------------------------

def interpolation_sweep(a_values, cfg, n_points, checkpoint_every=1_000_000, threads=1, tilde=True):
    """Volume and separability-probability table across the interpolating
    metric family (a = 1 is Bures, a = 0 the maximal metric)."""
    specs = {f"a={a:g}": interpolated_metric(float(a), tilde) for a in a_values}
    res = estimate_volume_multi(specs, cfg, n_points, checkpoint_every, threads)
    rows = []
    for a in a_values:
        r = res[f"a={float(a):g}"]
        rows.append(
            {
                "a": float(a),
                "V_total": r.total.final,
                "V_sep": r.sep.final,
                "P_sep": r.sep.final / r.total.final,
                "overflow": r.total.diagnostics.get("overflow", 0),
            }
        )
    return rows
