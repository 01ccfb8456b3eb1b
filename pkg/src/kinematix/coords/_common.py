"""Numerical helpers shared by every coordinate system.

All functions here are elementwise and accept numpy scalars or arrays of a
single floating dtype.  They never promote: python-float constants are
"weak" under numpy's promotion rules, so float32 inputs stay float32.
"""
from __future__ import annotations

import numpy as np

# Clamp value for pseudorapidity and rapidity at their singular loci.
ETA_MAX = 22756.0
RAPIDITY_MAX = ETA_MAX

SINGLE = np.dtype(np.float32)
DOUBLE = np.dtype(np.float64)

_PRECISIONS = {
    "single": SINGLE,
    "float32": SINGLE,
    "f4": SINGLE,
    "double": DOUBLE,
    "float64": DOUBLE,
    "f8": DOUBLE,
}


def resolve_dtype(dtype=None) -> np.dtype:
    """Map ``None``/``"single"``/``"double"``/numpy dtypes to float32 or float64."""
    if dtype is None:
        return DOUBLE
    if isinstance(dtype, str):
        try:
            return _PRECISIONS[dtype.lower()]
        except KeyError:
            raise ValueError(f"unknown precision {dtype!r}") from None
    dt = np.dtype(dtype)
    if dt not in (SINGLE, DOUBLE):
        raise ValueError(f"scalar type must be float32 or float64, got {dt}")
    return dt


def precision_name(dtype) -> str:
    return "single" if resolve_dtype(dtype) == SINGLE else "double"


def wrap_phi(phi):
    """Map angles into (-pi, pi]; values already in range are returned bit-for-bit."""
    phi = np.asarray(phi)
    pi = phi.dtype.type(np.pi)
    inside = (phi > -pi) & (phi <= pi)
    if np.all(inside):
        return phi[()]
    twopi = phi.dtype.type(2 * np.pi)
    w = np.mod(phi + pi, twopi) - pi
    w = np.where(w <= -pi, w + twopi, w)
    w = np.where(w > pi, pi, w)
    return np.where(inside, phi, w)[()]


def atan2_phi(y, x):
    """``arctan2`` folded into (-pi, pi] (atan2 may return exactly -pi)."""
    phi = np.arctan2(y, x)
    pi = np.asarray(phi).dtype.type(np.pi)
    return np.where(phi == -pi, pi, phi)[()]


def eta_from_rho_z(rho, z):
    """Pseudorapidity of a direction given transverse radius and z.

    At ``rho == 0`` the value is 0 for ``z == 0`` and ``+-ETA_MAX`` otherwise.
    """
    rho = np.asarray(rho)
    z = np.asarray(z)
    dt = np.result_type(rho, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        eta = np.arcsinh(z / rho)
    clamp = np.where(z == 0, dt.type(0), np.copysign(dt.type(ETA_MAX), z))
    return np.where(rho > 0, eta, clamp)[()]


def theta_from_rho_z(rho, z):
    return np.arctan2(rho, z)


def signed_sqrt(x):
    """sqrt(x) for x >= 0, -sqrt(-x) otherwise (the spacelike-mass convention)."""
    return np.copysign(np.sqrt(np.abs(x)), x)


def mass2_from_cartesian(px, py, pz, e):
    # Fixed evaluation order; batch kernels and scalar accessors share it.
    return e * e - (px * px + py * py + pz * pz)


def rapidity_from_e_pz(e, pz):
    e = np.asarray(e)
    pz = np.asarray(pz)
    dt = np.result_type(e, pz)
    ok = e > np.abs(pz)
    with np.errstate(divide="ignore", invalid="ignore"):
        y = dt.type(0.5) * np.log((e + pz) / (e - pz))
    clamp = np.where(pz == 0, dt.type(0), np.copysign(dt.type(RAPIDITY_MAX), pz))
    return np.where(ok, y, clamp)[()]


def beta_from_p_e(p, e):
    p = np.asarray(p)
    e = np.asarray(e)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = p / np.abs(e)
    return np.where(p == 0, p.dtype.type(0), b)[()]


def gamma_from_e_m(e, m):
    e = np.asarray(e)
    m = np.asarray(m)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = e / m
    return np.where(m > 0, g, e.dtype.type(np.inf))[()]
