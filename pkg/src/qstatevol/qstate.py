"""Two-qubit density matrices parameterized by 15 angles.

A 4x4 density matrix is built as D = U diag(lam) U^dagger where

* the eigenvalue vector ``lam`` lives on the probability simplex and is
  parameterized by three "squared hyperspherical" angles (theta1, theta2,
  theta3), and
* the eigenvector frame U is a special-unitary matrix assembled from a
  tower of complex projective spaces CP^3 x CP^2 x CP^1 (6 magnitude
  angles and 6 phases, 12 Euler angles total).

All functions accept batched inputs: an array whose last axis holds the
angles (or whose last two axes hold a matrix) with arbitrary leading
shape.  Scalars work too.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "EULER_DIM",
    "ANGLE_DIM",
    "eigenvalues_from_angles",
    "frame_unitary",
    "frame_weight",
    "angles_to_state",
    "state_parts",
    "partial_transpose",
    "det4",
    "det_partial_transpose",
    "is_separable",
    "state_derivative",
    "volume_box_ranges",
    "boundary_base_ranges",
    "ROOT_ANGLE_RANGE",
    "SEPARABILITY_TOL",
]

EULER_DIM = 12
ANGLE_DIM = 15

#: tolerance band for sign decisions on det(PT); states with
#: det(PT) >= -SEPARABILITY_TOL are counted separable (the boundary is a
#: measure-zero set, so any consistent convention is integrable).
SEPARABILITY_TOL = 1e-12

# indices of magnitude angles (range [0, pi/2]) and phases (range [0, 2pi))
# inside the 12-entry Euler block
_MAG_IDX = (0, 1, 2, 6, 7, 10)
_PHASE_IDX = (3, 4, 5, 8, 9, 11)

# range over which the boundary root search varies the solved eigenvalue angle
ROOT_ANGLE_RANGE = (0.0, np.pi)


def volume_box_ranges() -> np.ndarray:
    """(15, 2) array of (low, high) coordinate ranges for volume runs."""
    r = np.empty((ANGLE_DIM, 2))
    r[:, 0] = 0.0
    r[:, 1] = np.pi / 2
    for i in _PHASE_IDX:
        r[i, 1] = 2 * np.pi
    # the three eigenvalue angles stay in [0, pi/2]
    return r


def boundary_base_ranges() -> np.ndarray:
    """(14, 2) ranges for boundary base points: 12 Euler angles + theta2, theta3.

    The remaining eigenvalue angle (theta1, which scales one eigenvalue
    against the other three) is solved for by the boundary root search over
    ``ROOT_ANGLE_RANGE``.
    """
    r = np.empty((14, 2))
    r[:, 0] = 0.0
    r[:, 1] = np.pi / 2
    for i in _PHASE_IDX:
        r[i, 1] = 2 * np.pi
    return r


def eigenvalues_from_angles(theta1, theta2, theta3):
    """Map three angles to the eigenvalue simplex, with the exact Jacobian.

    lam = (cos^2 t1, sin^2 t1 cos^2 t2, sin^2 t1 sin^2 t2 cos^2 t3,
           sin^2 t1 sin^2 t2 sin^2 t3)

    Returns (lam, jacobian) where jacobian is the density
    |d(lam1, lam2, lam3)/d(t1, t2, t3)| of the map.  The eigenvalues sum to
    one by construction.
    """
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    t3 = np.asarray(theta3, dtype=float)
    s1, c1 = np.sin(t1), np.cos(t1)
    s2, c2 = np.sin(t2), np.cos(t2)
    s3, c3 = np.sin(t3), np.cos(t3)
    lam = np.stack(
        [
            c1 * c1,
            s1 * s1 * c2 * c2,
            s1 * s1 * s2 * s2 * c3 * c3,
            s1 * s1 * s2 * s2 * s3 * s3,
        ],
        axis=-1,
    )
    jac = np.abs(
        np.sin(2 * t1) * s1 ** 4 * np.sin(2 * t2) * s2 ** 2 * np.sin(2 * t3)
    )
    return lam, jac


def _householder_complement(v):
    """Orthonormal complement of a batch of unit vectors.

    v: (..., k) complex unit vectors.  Returns (..., k, k-1) whose columns
    together with v form a unitary basis (Householder reflection trick).
    """
    v = np.asarray(v, dtype=complex)
    k = v.shape[-1]
    e0 = np.zeros(k, dtype=complex)
    e0[0] = 1.0
    # phase of the first component; alpha = exp(i arg(v0))
    v0 = v[..., 0]
    absv0 = np.abs(v0)
    alpha = np.where(absv0 > 1e-14, v0 / np.where(absv0 > 1e-14, absv0, 1.0), 1.0)
    u = v + alpha[..., None] * e0
    nu = np.linalg.norm(u, axis=-1)
    safe = nu > 1e-14
    u = np.where(safe[..., None], u / np.where(safe[..., None], nu[..., None], 1.0), 0.0)
    # H = I - 2 u u^dagger ; columns 1..k-1 of -alpha*H complement v
    H = np.broadcast_to(np.eye(k, dtype=complex), v.shape + (k,)).copy()
    H -= 2.0 * u[..., :, None] * np.conj(u[..., None, :])
    B = -alpha[..., None, None] * H
    # when v is (numerically) -alpha*e0 the reflection degenerates; B is then
    # just the identity-derived basis, which is still a valid complement
    return B[..., :, 1:]


def _cp_vector(mags, phases):
    """Unit vector in CP^{k} from k magnitude angles and k phases.

    mags, phases: (..., k).  Returns (..., k+1) complex unit vectors with a
    real, nonnegative first component:
      v0 = cos a1, v1 = sin a1 cos a2 e^{i p1}, ..., vk = sin a1 ... sin ak e^{i pk}
    """
    mags = np.asarray(mags, dtype=float)
    phases = np.asarray(phases, dtype=float)
    k = mags.shape[-1]
    comps = []
    run = np.ones(mags.shape[:-1])
    for j in range(k):
        comps.append(run * np.cos(mags[..., j]))
        run = run * np.sin(mags[..., j])
    comps.append(run)
    v = np.stack(comps, axis=-1).astype(complex)
    ph = np.ones(v.shape, dtype=complex)
    ph[..., 1:] = np.exp(1j * phases)
    return v * ph


def frame_unitary(euler):
    """Special-unitary 4x4 eigenvector frame from 12 Euler angles.

    Columns are built successively: the first from a CP^3 vector, the second
    from a CP^2 vector expressed in the orthogonal complement of the first,
    and so on (a flag-manifold tower U(4)/U(1)^4).
    """
    e = np.asarray(euler, dtype=float)
    squeeze = e.ndim == 1
    if squeeze:
        e = e[None, :]
    v1 = _cp_vector(e[..., 0:3], e[..., 3:6])           # C^4
    B1 = _householder_complement(v1)                      # (..., 4, 3)
    v2s = _cp_vector(e[..., 6:8], e[..., 8:10])          # C^3
    v2 = np.einsum("...ij,...j->...i", B1, v2s)
    B2s = _householder_complement(v2s)                    # (..., 3, 2)
    B2 = np.einsum("...ij,...jk->...ik", B1, B2s)         # (..., 4, 2)
    v3s = _cp_vector(e[..., 10:11], e[..., 11:12])       # C^2
    v3 = np.einsum("...ij,...j->...i", B2, v3s)
    B3s = _householder_complement(v3s)                    # (..., 2, 1)
    v4 = np.einsum("...ij,...jk->...ik", B2, B3s)[..., 0]
    U = np.stack([v1, v2, v3, v4], axis=-1)
    return U[0] if squeeze else U


def frame_weight(euler):
    """Unnormalized Haar density of the frame tower over the 12 Euler angles.

    Product of the CP^n magnitude densities
    J_n = prod_k sin(2 a_k) sin^{2(n-k)}(a_k) for n = 3, 2, 1; the phases are
    uniform.
    """
    e = np.asarray(euler, dtype=float)
    a = e[..., [0, 1, 2]]
    b = e[..., [6, 7]]
    c = e[..., [10]]
    w = np.ones(e.shape[:-1])
    for j, n in ((0, 3), (1, 3), (2, 3)):
        w = w * np.abs(np.sin(2 * a[..., j])) * np.sin(a[..., j]) ** (2 * (n - 1 - j))
    for j, n in ((0, 2), (1, 2)):
        w = w * np.abs(np.sin(2 * b[..., j])) * np.sin(b[..., j]) ** (2 * (n - 1 - j))
    w = w * np.abs(np.sin(2 * c[..., 0]))
    return w


def state_parts(angles):
    """(D, U, lam) for a batch of 15-angle vectors."""
    x = np.asarray(angles, dtype=float)
    U = frame_unitary(x[..., :EULER_DIM])
    lam, _ = eigenvalues_from_angles(x[..., 12], x[..., 13], x[..., 14])
    D = np.einsum("...ij,...j,...kj->...ik", U, lam.astype(complex), np.conj(U))
    return D, U, lam


def angles_to_state(angles):
    """Density matrix D = U diag(lam) U^dagger from a 15-angle vector."""
    return state_parts(angles)[0]


def partial_transpose(D):
    """Transpose in place the four 2x2 blocks of a (batched) 4x4 matrix."""
    M = np.asarray(D)
    shape = M.shape
    M4 = M.reshape(shape[:-2] + (2, 2, 2, 2))
    # block (i,k) of the 4x4 matrix is M4[..., i, :, k, :]; transposing each
    # block swaps the two inner "qubit B" indices
    PT = np.swapaxes(M4, -1, -3)
    return PT.reshape(shape)


def det4(M):
    """Determinant of batched 4x4 matrices by complementary-minor expansion.

    Noticeably faster than np.linalg.det on large batches of small matrices.
    """
    M = np.asarray(M)

    def m2(r0, r1, c0, c1):
        return M[..., r0, c0] * M[..., r1, c1] - M[..., r0, c1] * M[..., r1, c0]

    return (
        m2(0, 1, 0, 1) * m2(2, 3, 2, 3)
        - m2(0, 1, 0, 2) * m2(2, 3, 1, 3)
        + m2(0, 1, 0, 3) * m2(2, 3, 1, 2)
        + m2(0, 1, 1, 2) * m2(2, 3, 0, 3)
        - m2(0, 1, 1, 3) * m2(2, 3, 0, 2)
        + m2(0, 1, 2, 3) * m2(2, 3, 0, 1)
    )


def det_partial_transpose(D):
    """Real determinant of the partial transpose of D."""
    return det4(partial_transpose(D)).real


def is_separable(D, tol=SEPARABILITY_TOL):
    """Peres-Horodecki test for two qubits: det(PT) >= 0 (within tol).

    For 4x4 states the partial transpose has at most one negative
    eigenvalue, so the sign of its determinant decides separability; states
    inside the tolerance band around zero are counted separable.
    """
    return det_partial_transpose(D) >= -tol


def state_derivative(angles, i, h=1e-6, richardson=False):
    """Partial derivative of D with respect to angle coordinate i.

    Central finite differences with step h; ``richardson`` applies one
    extrapolation step (combining steps h and 2h) for an O(h^4) estimate.
    """
    x = np.asarray(angles, dtype=float)

    def central(step):
        xp = x.copy()
        xm = x.copy()
        xp[..., i] += step
        xm[..., i] -= step
        return (angles_to_state(xp) - angles_to_state(xm)) / (2 * step)

    d1 = central(h)
    if not richardson:
        return d1
    d2 = central(2 * h)
    return (4.0 * d1 - d2) / 3.0
