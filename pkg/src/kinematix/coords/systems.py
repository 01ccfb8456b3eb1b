"""Coordinate systems for 2D, 3D and 4D vectors.

A coordinate-system class plays two roles:

* as a *value* it stores one point's components (``PtEtaPhiM4D(10, 1.2, 0.5, 0.105)``),
  normalized into the documented ranges at construction;
* as a *type* it exposes elementwise classmethods (``to_cartesian``,
  ``from_cartesian``, ``pt_of`` ...) that work on numpy scalars and on whole
  component arrays alike.  The vector classes and the batch kernels both call
  these, so a single code path serves one particle and a million.

The Cartesian image of a 4D system is ``(px, py, pz, e)``; of a 3D system
``(x, y, z)``; of a 2D system ``(x, y)``.
"""
from __future__ import annotations

from typing import ClassVar

import numpy as np

from ._common import (
    atan2_phi,
    beta_from_p_e,
    eta_from_rho_z,
    gamma_from_e_m,
    mass2_from_cartesian,
    rapidity_from_e_pz,
    resolve_dtype,
    signed_sqrt,
    wrap_phi,
)


def _field(index: int, doc: str) -> property:
    return property(lambda self: self._values[index], doc=doc)


def _flip_negative(radius, phi):
    """Return |radius|, phi rotated by pi where radius < 0, and the flip mask."""
    neg = radius < 0
    pi = np.asarray(phi).dtype.type(np.pi)
    return np.where(neg, -radius, radius), np.where(neg, phi + pi, phi), neg


class CoordinateSystem:
    """Base for all coordinate systems; see the module docstring."""

    dim: ClassVar[int] = 0
    fields: ClassVar[tuple[str, ...]] = ()

    __slots__ = ("_values", "_dtype")

    def __init__(self, *values, dtype=None):
        dt = resolve_dtype(dtype)
        if not values:
            values = (0,) * len(self.fields)
        elif len(values) != len(self.fields):
            raise TypeError(
                f"{type(self).__name__} takes {len(self.fields)} components "
                f"{self.fields}, got {len(values)}"
            )
        raw = tuple(dt.type(v) for v in values)
        object.__setattr__(self, "_values", tuple(dt.type(x) for x in self.normalize(*raw)))
        object.__setattr__(self, "_dtype", dt)

    @classmethod
    def _make(cls, values, dtype):
        # Trusted path for values produced by from_cartesian: already in range.
        obj = cls.__new__(cls)
        dt = np.dtype(dtype)
        object.__setattr__(obj, "_values", tuple(dt.type(v) for v in values))
        object.__setattr__(obj, "_dtype", dt)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def values(self) -> tuple:
        return self._values

    @property
    def dtype(self) -> np.dtype:
        return self._dtype

    def __iter__(self):
        return iter(self._values)

    def __eq__(self, other):
        if type(other) is not type(self) or other._dtype != self._dtype:
            return NotImplemented
        return all(bool(a == b) for a, b in zip(self._values, other._values))

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((type(self), self._dtype.str, tuple(float(v) for v in self._values)))

    # Elementwise class-level interface, overridden per system.

    @classmethod
    def normalize(cls, *c):
        return c

    @classmethod
    def to_cartesian(cls, *c):
        raise NotImplementedError

    @classmethod
    def from_cartesian(cls, *xyz):
        raise NotImplementedError

    @classmethod
    def convert_components(cls, target: type[CoordinateSystem], *c):
        """Components of the same points expressed in ``target``."""
        if target is cls:
            return c
        if target.dim != cls.dim:
            raise TypeError(f"cannot convert {cls.__name__} to {target.__name__}")
        return target.from_cartesian(*cls.to_cartesian(*c))


# ---------------------------------------------------------------------------
# 2D


class CoordinateSystem2D(CoordinateSystem):
    dim = 2
    __slots__ = ()

    @classmethod
    def x_of(cls, *c):
        return cls.to_cartesian(*c)[0]

    @classmethod
    def y_of(cls, *c):
        return cls.to_cartesian(*c)[1]

    @classmethod
    def r_of(cls, *c):
        x, y = cls.to_cartesian(*c)
        return np.sqrt(x * x + y * y)

    @classmethod
    def phi_of(cls, *c):
        x, y = cls.to_cartesian(*c)
        return atan2_phi(y, x)


class Cartesian2D(CoordinateSystem2D):
    fields = ("x", "y")
    __slots__ = ()
    x = _field(0, "x component")
    y = _field(1, "y component")

    @classmethod
    def to_cartesian(cls, x, y):
        return x, y

    @classmethod
    def from_cartesian(cls, x, y):
        return x, y


class Polar2D(CoordinateSystem2D):
    fields = ("r", "phi")
    __slots__ = ()
    r = _field(0, "radius, >= 0")
    phi = _field(1, "azimuth in (-pi, pi]")

    @classmethod
    def normalize(cls, r, phi):
        r, phi, _ = _flip_negative(r, phi)
        return r, wrap_phi(phi)

    @classmethod
    def to_cartesian(cls, r, phi):
        return r * np.cos(phi), r * np.sin(phi)

    @classmethod
    def from_cartesian(cls, x, y):
        return np.sqrt(x * x + y * y), atan2_phi(y, x)

    @classmethod
    def r_of(cls, r, phi):
        return r

    @classmethod
    def phi_of(cls, r, phi):
        return phi


# ---------------------------------------------------------------------------
# 3D


class CoordinateSystem3D(CoordinateSystem):
    dim = 3
    __slots__ = ()

    @classmethod
    def x_of(cls, *c):
        return cls.to_cartesian(*c)[0]

    @classmethod
    def y_of(cls, *c):
        return cls.to_cartesian(*c)[1]

    @classmethod
    def z_of(cls, *c):
        return cls.to_cartesian(*c)[2]

    @classmethod
    def mag2_of(cls, *c):
        x, y, z = cls.to_cartesian(*c)
        return x * x + y * y + z * z

    @classmethod
    def r_of(cls, *c):
        return np.sqrt(cls.mag2_of(*c))

    @classmethod
    def rho_of(cls, *c):
        x, y, _ = cls.to_cartesian(*c)
        return np.sqrt(x * x + y * y)

    @classmethod
    def phi_of(cls, *c):
        x, y, _ = cls.to_cartesian(*c)
        return atan2_phi(y, x)

    @classmethod
    def theta_of(cls, *c):
        x, y, z = cls.to_cartesian(*c)
        return np.arctan2(np.sqrt(x * x + y * y), z)

    @classmethod
    def eta_of(cls, *c):
        x, y, z = cls.to_cartesian(*c)
        return eta_from_rho_z(np.sqrt(x * x + y * y), z)


class Cartesian3D(CoordinateSystem3D):
    fields = ("x", "y", "z")
    __slots__ = ()
    x = _field(0, "x component")
    y = _field(1, "y component")
    z = _field(2, "z component")

    @classmethod
    def to_cartesian(cls, x, y, z):
        return x, y, z

    @classmethod
    def from_cartesian(cls, x, y, z):
        return x, y, z


class Polar3D(CoordinateSystem3D):
    """Spherical coordinates ``(r, theta, phi)`` with theta measured from +z."""

    fields = ("r", "theta", "phi")
    __slots__ = ()
    r = _field(0, "radius, >= 0")
    theta = _field(1, "polar angle in [0, pi]")
    phi = _field(2, "azimuth in (-pi, pi]")

    @classmethod
    def normalize(cls, r, theta, phi):
        dt = np.asarray(theta).dtype.type
        pi, twopi = dt(np.pi), dt(2 * np.pi)
        out_of_range = (theta < 0) | (theta > pi)
        t = np.mod(theta, twopi)
        over = t > pi
        t = np.where(over, twopi - t, t)
        theta = np.where(out_of_range, t, theta)
        phi = np.where(out_of_range & over, phi + pi, phi)
        # Point reflection keeps the Cartesian image of a negative radius.
        r, phi, neg = _flip_negative(r, phi)
        theta = np.where(neg, pi - theta, theta)
        return r, theta, wrap_phi(phi)

    @classmethod
    def to_cartesian(cls, r, theta, phi):
        rho = r * np.sin(theta)
        return rho * np.cos(phi), rho * np.sin(phi), r * np.cos(theta)

    @classmethod
    def from_cartesian(cls, x, y, z):
        rho = np.sqrt(x * x + y * y)
        return np.sqrt(x * x + y * y + z * z), np.arctan2(rho, z), atan2_phi(y, x)

    @classmethod
    def r_of(cls, r, theta, phi):
        return r

    @classmethod
    def theta_of(cls, r, theta, phi):
        return theta

    @classmethod
    def phi_of(cls, r, theta, phi):
        return phi


class Cylindrical3D(CoordinateSystem3D):
    """Cylindrical coordinates ``(rho, phi, z)`` around the z axis."""

    fields = ("rho", "phi", "z")
    __slots__ = ()
    rho = _field(0, "transverse radius, >= 0")
    phi = _field(1, "azimuth in (-pi, pi]")
    z = _field(2, "z component")

    @classmethod
    def normalize(cls, rho, phi, z):
        rho, phi, _ = _flip_negative(rho, phi)
        return rho, wrap_phi(phi), z

    @classmethod
    def to_cartesian(cls, rho, phi, z):
        return rho * np.cos(phi), rho * np.sin(phi), z

    @classmethod
    def from_cartesian(cls, x, y, z):
        return np.sqrt(x * x + y * y), atan2_phi(y, x), z

    @classmethod
    def rho_of(cls, rho, phi, z):
        return rho

    @classmethod
    def phi_of(cls, rho, phi, z):
        return phi

    @classmethod
    def z_of(cls, rho, phi, z):
        return z

    @classmethod
    def eta_of(cls, rho, phi, z):
        return eta_from_rho_z(rho, z)


# ---------------------------------------------------------------------------
# 4D


class CoordinateSystem4D(CoordinateSystem):
    """Lorentz-vector representations; Cartesian image is ``(px, py, pz, e)``."""

    dim = 4
    __slots__ = ()

    @classmethod
    def px_of(cls, *c):
        return cls.to_cartesian(*c)[0]

    @classmethod
    def py_of(cls, *c):
        return cls.to_cartesian(*c)[1]

    @classmethod
    def pz_of(cls, *c):
        return cls.to_cartesian(*c)[2]

    @classmethod
    def e_of(cls, *c):
        return cls.to_cartesian(*c)[3]

    @classmethod
    def pt_of(cls, *c):
        px, py, _, _ = cls.to_cartesian(*c)
        return np.sqrt(px * px + py * py)

    @classmethod
    def phi_of(cls, *c):
        px, py, _, _ = cls.to_cartesian(*c)
        return atan2_phi(py, px)

    @classmethod
    def eta_of(cls, *c):
        px, py, pz, _ = cls.to_cartesian(*c)
        return eta_from_rho_z(np.sqrt(px * px + py * py), pz)

    @classmethod
    def theta_of(cls, *c):
        px, py, pz, _ = cls.to_cartesian(*c)
        return np.arctan2(np.sqrt(px * px + py * py), pz)

    @classmethod
    def p_of(cls, *c):
        px, py, pz, _ = cls.to_cartesian(*c)
        return np.sqrt(px * px + py * py + pz * pz)

    @classmethod
    def mass2_of(cls, *c):
        return mass2_from_cartesian(*cls.to_cartesian(*c))

    @classmethod
    def mass_of(cls, *c):
        return signed_sqrt(cls.mass2_of(*c))

    @classmethod
    def rapidity_of(cls, *c):
        _, _, pz, e = cls.to_cartesian(*c)
        return rapidity_from_e_pz(e, pz)

    @classmethod
    def beta_of(cls, *c):
        return beta_from_p_e(cls.p_of(*c), cls.e_of(*c))

    @classmethod
    def gamma_of(cls, *c):
        return gamma_from_e_m(cls.e_of(*c), cls.mass_of(*c))


def _energy_from_p2_mass(p2, m):
    e2 = m * np.abs(m) + p2
    return np.sqrt(np.maximum(e2, 0))


def _pt_eta_phi_normalize(pt, eta, phi):
    # pt -> -pt with phi + pi and eta -> -eta leaves (px, py, pz) unchanged.
    pt, phi, neg = _flip_negative(pt, phi)
    return pt, np.where(neg, -eta, eta), wrap_phi(phi)


def _pt_eta_phi_to_xyz(pt, eta, phi):
    # pt == 0 is guarded: sinh overflows long before |eta| reaches ETA_MAX.
    with np.errstate(over="ignore", invalid="ignore"):
        pz = np.where(pt == 0, pt * 0, pt * np.sinh(eta))
    return pt * np.cos(phi), pt * np.sin(phi), pz[()]


def _xyz_to_pt_eta_phi(px, py, pz):
    pt = np.sqrt(px * px + py * py)
    return pt, eta_from_rho_z(pt, pz), atan2_phi(py, px)


class PxPyPzE4D(CoordinateSystem4D):
    """The canonical Cartesian representation; all arithmetic happens here."""

    fields = ("px", "py", "pz", "e")
    __slots__ = ()
    px = _field(0, "x momentum")
    py = _field(1, "y momentum")
    pz = _field(2, "z momentum")
    e = _field(3, "energy")

    @classmethod
    def to_cartesian(cls, px, py, pz, e):
        return px, py, pz, e

    @classmethod
    def from_cartesian(cls, px, py, pz, e):
        return px, py, pz, e

    @classmethod
    def e_of(cls, px, py, pz, e):
        return e


class PxPyPzM4D(CoordinateSystem4D):
    """Momentum plus mass; a negative mass encodes a spacelike vector."""

    fields = ("px", "py", "pz", "m")
    __slots__ = ()
    px = _field(0, "x momentum")
    py = _field(1, "y momentum")
    pz = _field(2, "z momentum")
    m = _field(3, "signed mass")

    @classmethod
    def to_cartesian(cls, px, py, pz, m):
        return px, py, pz, _energy_from_p2_mass(px * px + py * py + pz * pz, m)

    @classmethod
    def from_cartesian(cls, px, py, pz, e):
        return px, py, pz, signed_sqrt(mass2_from_cartesian(px, py, pz, e))

    @classmethod
    def mass_of(cls, px, py, pz, m):
        return m

    @classmethod
    def mass2_of(cls, px, py, pz, m):
        return m * np.abs(m)


class PtEtaPhiE4D(CoordinateSystem4D):
    fields = ("pt", "eta", "phi", "e")
    __slots__ = ()
    pt = _field(0, "transverse momentum, >= 0")
    eta = _field(1, "pseudorapidity")
    phi = _field(2, "azimuth in (-pi, pi]")
    e = _field(3, "energy")

    @classmethod
    def normalize(cls, pt, eta, phi, e):
        return (*_pt_eta_phi_normalize(pt, eta, phi), e)

    @classmethod
    def to_cartesian(cls, pt, eta, phi, e):
        return (*_pt_eta_phi_to_xyz(pt, eta, phi), e)

    @classmethod
    def from_cartesian(cls, px, py, pz, e):
        return (*_xyz_to_pt_eta_phi(px, py, pz), e)

    @classmethod
    def pt_of(cls, pt, eta, phi, e):
        return pt

    @classmethod
    def eta_of(cls, pt, eta, phi, e):
        return eta

    @classmethod
    def phi_of(cls, pt, eta, phi, e):
        return phi

    @classmethod
    def e_of(cls, pt, eta, phi, e):
        return e


class PtEtaPhiM4D(CoordinateSystem4D):
    """Collider coordinates with mass; energy is derived as sqrt(m|m| + pt^2 + pz^2)."""

    fields = ("pt", "eta", "phi", "m")
    __slots__ = ()
    pt = _field(0, "transverse momentum, >= 0")
    eta = _field(1, "pseudorapidity")
    phi = _field(2, "azimuth in (-pi, pi]")
    m = _field(3, "signed mass")

    @classmethod
    def normalize(cls, pt, eta, phi, m):
        return (*_pt_eta_phi_normalize(pt, eta, phi), m)

    @classmethod
    def to_cartesian(cls, pt, eta, phi, m):
        px, py, pz = _pt_eta_phi_to_xyz(pt, eta, phi)
        return px, py, pz, _energy_from_p2_mass(pt * pt + pz * pz, m)

    @classmethod
    def from_cartesian(cls, px, py, pz, e):
        return (*_xyz_to_pt_eta_phi(px, py, pz), signed_sqrt(mass2_from_cartesian(px, py, pz, e)))

    @classmethod
    def pt_of(cls, pt, eta, phi, m):
        return pt

    @classmethod
    def eta_of(cls, pt, eta, phi, m):
        return eta

    @classmethod
    def phi_of(cls, pt, eta, phi, m):
        return phi

    @classmethod
    def mass_of(cls, pt, eta, phi, m):
        return m

    @classmethod
    def mass2_of(cls, pt, eta, phi, m):
        return m * np.abs(m)


SYSTEMS_2D = (Cartesian2D, Polar2D)
SYSTEMS_3D = (Cartesian3D, Polar3D, Cylindrical3D)
SYSTEMS_4D = (PxPyPzE4D, PxPyPzM4D, PtEtaPhiE4D, PtEtaPhiM4D)

_BY_NAME = {cls.__name__.lower(): cls for cls in (*SYSTEMS_2D, *SYSTEMS_3D, *SYSTEMS_4D)}
_BY_NAME.update({name[: -2]: cls for name, cls in list(_BY_NAME.items()) if name.endswith("4d")})


def system_by_name(name: str) -> type[CoordinateSystem]:
    """Look up a system class by name, e.g. ``"PtEtaPhiM4D"`` or ``"ptetaphim"``."""
    try:
        return _BY_NAME[name.lower()]
    except KeyError:
        raise ValueError(f"unknown coordinate system {name!r}") from None
