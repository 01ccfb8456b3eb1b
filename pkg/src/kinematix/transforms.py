"""Rotations and Lorentz transformations.

Matrices act on Cartesian images: ``(x, y, z)`` for 3-vectors and
``(px, py, pz, e)`` for Lorentz vectors, with metric ``g = diag(-1, -1, -1, +1)``.
Vectors stored in another system are converted, transformed and converted
back.  Matrix-vector products use a fixed left-to-right summation so the
scalar and batch paths give identical bits.
"""
from __future__ import annotations

import numpy as np

from .coords import Cartesian3D, Vec3, Vec4, resolve_dtype

METRIC = np.diag([-1.0, -1.0, -1.0, 1.0])

_ORTHO_DEFECT = 1e-10


class BoostDomainError(ValueError):
    """Raised for boost velocities with |beta| >= 1."""


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.array(m, copy=True)
    m.setflags(write=False)
    return m


def matvec(m: np.ndarray, comps):
    """``m @ comps`` with a fixed evaluation order; works on scalars or arrays."""
    n = m.shape[1]
    out = []
    for i in range(m.shape[0]):
        acc = m[i, 0] * comps[0]
        for j in range(1, n):
            acc = acc + m[i, j] * comps[j]
        out.append(acc)
    return tuple(out)


# ---------------------------------------------------------------------------
# Rotations


def _gram_schmidt(m: np.ndarray) -> np.ndarray:
    cols = []
    for j in range(3):
        v = m[:, j].copy()
        for u in cols:
            v = v - np.dot(u, v) * u
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("rotation matrix is singular")
        cols.append(v / norm)
    return np.column_stack(cols)


class Rotation3D:
    """A proper rotation stored as a 3x3 row-major orthogonal matrix.

    Raw matrices with an orthogonality defect above 1e-10 are re-orthonormalized
    (Gram-Schmidt on the columns); reflections (det < 0) are rejected.
    """

    __slots__ = ("_m",)

    def __init__(self, matrix=None, *, dtype=None):
        dt = resolve_dtype(dtype)
        if matrix is None:
            self._m = _frozen(np.eye(3, dtype=dt))
            return
        m = np.asarray(matrix, dtype=np.float64)
        if m.shape != (3, 3) or not np.all(np.isfinite(m)):
            raise ValueError("rotation needs a finite 3x3 matrix")
        det = np.linalg.det(m)
        if det <= 0:
            raise ValueError(f"matrix is not a proper rotation (det = {det:g})")
        if np.max(np.abs(m.T @ m - np.eye(3))) > _ORTHO_DEFECT:
            m = _gram_schmidt(m)
        self._m = _frozen(m.astype(dt))

    @classmethod
    def _wrap(cls, m: np.ndarray) -> Rotation3D:
        obj = cls.__new__(cls)
        obj._m = _frozen(m)
        return obj

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dtype(self) -> np.dtype:
        return self._m.dtype

    def inverse(self) -> Rotation3D:
        return Rotation3D._wrap(self._m.T)

    def __matmul__(self, other):
        return compose(self, other)

    def __call__(self, v):
        return apply(self, v)

    def __eq__(self, other):
        if not isinstance(other, Rotation3D):
            return NotImplemented
        return np.array_equal(self._m, other._m)

    def __hash__(self):
        return hash(self._m.tobytes())


def rotation_x(angle, *, dtype=None) -> Rotation3D:
    c, s = np.cos(angle), np.sin(angle)
    return Rotation3D._wrap(np.array([[1, 0, 0], [0, c, -s], [0, s, c]], dtype=resolve_dtype(dtype)))


def rotation_y(angle, *, dtype=None) -> Rotation3D:
    c, s = np.cos(angle), np.sin(angle)
    return Rotation3D._wrap(np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]], dtype=resolve_dtype(dtype)))


def rotation_z(angle, *, dtype=None) -> Rotation3D:
    c, s = np.cos(angle), np.sin(angle)
    return Rotation3D._wrap(np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=resolve_dtype(dtype)))


class AxisAngle:
    """Rotation by ``angle`` radians about a unit ``axis`` (right-hand rule).

    Any non-zero axis is accepted and normalized.
    """

    __slots__ = ("_axis", "_angle")

    def __init__(self, axis=(0.0, 0.0, 1.0), angle=0.0, *, dtype=None):
        dt = resolve_dtype(dtype)
        if isinstance(axis, Vec3):
            axis = axis.convert(Cartesian3D).components()
        a = np.asarray(axis, dtype=np.float64)
        if a.shape != (3,):
            raise ValueError("axis must have three components")
        norm = np.linalg.norm(a)
        if not norm > 0 or not np.isfinite(norm):
            raise ValueError("axis must be a finite non-zero vector")
        self._axis = _frozen((a / norm).astype(dt))
        self._angle = dt.type(angle)

    @property
    def axis(self) -> np.ndarray:
        return self._axis

    @property
    def angle(self):
        return self._angle

    @property
    def dtype(self) -> np.dtype:
        return self._axis.dtype

    def inverse(self) -> AxisAngle:
        return AxisAngle(self._axis, -self._angle, dtype=self.dtype)

    def __matmul__(self, other):
        return compose(self, other)

    def __call__(self, v):
        return apply(self, v)

    def __eq__(self, other):
        if not isinstance(other, AxisAngle):
            return NotImplemented
        return np.array_equal(self._axis, other._axis) and self._angle == other._angle

    def __hash__(self):
        return hash((self._axis.tobytes(), float(self._angle)))


def axis_angle_to_matrix(a: AxisAngle) -> Rotation3D:
    """Rodrigues: R = I + sin(t) K + (1 - cos(t)) K^2."""
    kx, ky, kz = (float(c) for c in a.axis)
    t = float(a.angle)
    k = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    r = np.eye(3) + np.sin(t) * k + (1.0 - np.cos(t)) * (k @ k)
    return Rotation3D._wrap(r.astype(a.dtype))


def matrix_to_axis_angle(r: Rotation3D) -> AxisAngle:
    """Extract axis and angle in [0, pi].

    The identity maps to the z axis with angle 0.  Near a half turn the axis
    comes from the symmetric part, seeded by its largest diagonal entry.
    """
    m = np.asarray(r.matrix, dtype=np.float64)
    v = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    s2 = np.linalg.norm(v)  # 2 sin(angle)
    c2 = np.trace(m) - 1.0  # 2 cos(angle)
    angle = np.arctan2(s2, c2)
    if s2 == 0 and c2 > 0:
        return AxisAngle((0.0, 0.0, 1.0), 0.0, dtype=r.dtype)
    if c2 >= 0:
        return AxisAngle(v / s2, angle, dtype=r.dtype)
    # (1 - cos) n n^T = sym(R) - cos I; its largest diagonal is the best-conditioned column.
    b = 0.5 * (m + m.T) - 0.5 * c2 * np.eye(3)
    k = int(np.argmax(np.diag(b)))
    axis = b[:, k] / np.sqrt(b[k, k])
    if np.dot(axis, v) < 0:
        axis = -axis
    return AxisAngle(axis, angle, dtype=r.dtype)


# ---------------------------------------------------------------------------
# Lorentz transformations


def metric_defect(matrix) -> float:
    """max |L^T g L - g|, the metric-preservation error of a 4x4 matrix."""
    m = np.asarray(matrix, dtype=np.float64)
    return float(np.max(np.abs(m.T @ METRIC @ m - METRIC)))


class LorentzTransform:
    """A general 4x4 Lorentz matrix acting on (px, py, pz, e)."""

    __slots__ = ("_m",)

    def __init__(self, matrix=None, *, dtype=None, tol: float = 1e-9):
        dt = resolve_dtype(dtype)
        if matrix is None:
            self._m = _frozen(np.eye(4, dtype=dt))
            return
        m = np.asarray(matrix, dtype=np.float64)
        if m.shape != (4, 4) or not np.all(np.isfinite(m)):
            raise ValueError("Lorentz transform needs a finite 4x4 matrix")
        defect = metric_defect(m)
        if defect > tol * max(1.0, float(np.max(np.abs(m))) ** 2):
            raise ValueError(f"matrix does not preserve the metric (defect {defect:g})")
        self._m = _frozen(m.astype(dt))

    @classmethod
    def _wrap(cls, m: np.ndarray) -> LorentzTransform:
        obj = LorentzTransform.__new__(LorentzTransform)
        obj._m = _frozen(m)
        return obj

    @classmethod
    def from_rotation(cls, r: Rotation3D | AxisAngle) -> LorentzTransform:
        if isinstance(r, AxisAngle):
            r = axis_angle_to_matrix(r)
        m = np.eye(4, dtype=r.dtype)
        m[:3, :3] = r.matrix
        return cls._wrap(m)

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dtype(self) -> np.dtype:
        return self._m.dtype

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self._m, np.eye(4)))

    def inverse(self) -> LorentzTransform:
        # For a metric-preserving L, L^-1 = g L^T g.
        g = METRIC.astype(self.dtype)
        return LorentzTransform._wrap(g @ self._m.T @ g)

    def __matmul__(self, other):
        return compose(self, other)

    def __call__(self, v):
        return apply(self, v)

    def __eq__(self, other):
        if not isinstance(other, LorentzTransform):
            return NotImplemented
        return np.array_equal(self._m, other._m)

    def __hash__(self):
        return hash(self._m.tobytes())


class Boost(LorentzTransform):
    """Pure boost with velocity ``beta = (bx, by, bz)``, ``|beta| < 1``."""

    __slots__ = ("_beta",)

    def __init__(self, bx=0.0, by=0.0, bz=0.0, *, dtype=None):
        dt = resolve_dtype(dtype)
        beta = np.array([bx, by, bz], dtype=np.float64)
        if not np.all(np.isfinite(beta)):
            raise BoostDomainError(f"boost velocity must be finite, got {tuple(beta)}")
        b2 = float(beta @ beta)
        if b2 >= 1.0:
            raise BoostDomainError(f"boost requires |beta| < 1, got |beta|^2 = {b2:.6g}")
        self._beta = _frozen(beta.astype(dt))
        self._m = _frozen(_boost_matrix(beta, b2).astype(dt))

    @property
    def beta(self) -> np.ndarray:
        return self._beta

    @property
    def gamma(self):
        return self.dtype.type(self._m[3, 3])

    @property
    def is_identity(self) -> bool:
        return not np.any(self._beta)

    def inverse(self) -> Boost:
        bx, by, bz = (-b for b in np.asarray(self._beta, dtype=np.float64))
        return Boost(bx, by, bz, dtype=self.dtype)


def _boost_matrix(beta: np.ndarray, b2: float) -> np.ndarray:
    m = np.eye(4)
    if b2 == 0.0:
        return m
    gamma = 1.0 / np.sqrt(1.0 - b2)
    # (gamma - 1)/b^2 written as gamma^2/(gamma + 1) to avoid cancellation at small b.
    k = gamma * gamma / (gamma + 1.0)
    m[:3, :3] += k * np.outer(beta, beta)
    m[:3, 3] = gamma * beta
    m[3, :3] = gamma * beta
    m[3, 3] = gamma
    return m


def boost_from_beta(bx, by, bz, *, dtype=None) -> Boost:
    return Boost(bx, by, bz, dtype=dtype)


# ---------------------------------------------------------------------------
# Application and composition


def _cast(m: np.ndarray, dtype: np.dtype) -> np.ndarray:
    return m if m.dtype == dtype else m.astype(dtype)


def apply_to_components(t, system, comps):
    """Apply ``t`` to component arrays of a 4D (or 3D) ``system``; returns components."""
    dt = np.asarray(comps[0]).dtype
    if isinstance(t, LorentzTransform):
        if t.is_identity:
            return tuple(comps)
        cart = system.to_cartesian(*comps)
        return system.from_cartesian(*matvec(_cast(t.matrix, dt), cart))
    if isinstance(t, AxisAngle):
        if system.dim == 4:
            px, py, pz, e = system.to_cartesian(*comps)
            return system.from_cartesian(*_rodrigues_apply(t, (px, py, pz), dt), e)
        return system.from_cartesian(*_rodrigues_apply(t, system.to_cartesian(*comps), dt))
    if isinstance(t, Rotation3D):
        m = _cast(t.matrix, dt)
        if system.dim == 4:
            px, py, pz, e = system.to_cartesian(*comps)
            return system.from_cartesian(*matvec(m, (px, py, pz)), e)
        return system.from_cartesian(*matvec(m, system.to_cartesian(*comps)))
    raise TypeError(f"not a transformation: {type(t).__name__}")


def _rodrigues_apply(a: AxisAngle, xyz, dt):
    # v cos t + (k x v) sin t + k (k . v)(1 - cos t)
    kx, ky, kz = (dt.type(c) for c in a.axis)
    t = dt.type(a.angle)
    c, s = np.cos(t), np.sin(t)
    x, y, z = xyz
    kdotv = kx * x + ky * y + kz * z
    w = (1 - c) * kdotv
    return (
        x * c + (ky * z - kz * y) * s + kx * w,
        y * c + (kz * x - kx * z) * s + ky * w,
        z * c + (kx * y - ky * x) * s + kz * w,
    )


def apply(t, v):
    """Transform a vector; the result stays in ``v``'s coordinate system."""
    if isinstance(t, LorentzTransform) and not isinstance(v, Vec4):
        raise TypeError("Lorentz transforms act on Vec4")
    if not isinstance(v, (Vec3, Vec4)):
        raise TypeError(f"cannot transform {type(v).__name__}")
    if isinstance(t, LorentzTransform) and t.is_identity:
        return v
    vals = apply_to_components(t, v.system, v.components())
    return v._from_components(v.system, vals, v.dtype)


def compose(a, b):
    """The transform equal to applying ``b`` first and then ``a``.

    Rotation3D x Rotation3D -> Rotation3D, AxisAngle x AxisAngle -> AxisAngle;
    anything involving a boost returns a general :class:`LorentzTransform`,
    since two non-collinear boosts combine into a boost plus a rotation.
    """
    if isinstance(a, AxisAngle) and isinstance(b, AxisAngle):
        r = compose(axis_angle_to_matrix(a), axis_angle_to_matrix(b))
        return matrix_to_axis_angle(r)
    if isinstance(a, (Rotation3D, AxisAngle)) and isinstance(b, (Rotation3D, AxisAngle)):
        ra = axis_angle_to_matrix(a) if isinstance(a, AxisAngle) else a
        rb = axis_angle_to_matrix(b) if isinstance(b, AxisAngle) else b
        return Rotation3D._wrap(ra.matrix @ rb.matrix)
    la = a if isinstance(a, LorentzTransform) else LorentzTransform.from_rotation(a)
    lb = b if isinstance(b, LorentzTransform) else LorentzTransform.from_rotation(b)
    return LorentzTransform._wrap(la.matrix @ lb.matrix)


def invert(t):
    return t.inverse()
