"""Generic 2D/3D/4D vectors parameterized by a coordinate system.

A vector wraps exactly one coordinate-system value.  Arithmetic is done on the
Cartesian image and the result is converted back to the operand's system, so
``a + b`` has one evaluation order whatever the representation.
"""
from __future__ import annotations

from typing import ClassVar

import numpy as np

from ._common import wrap_phi
from .systems import (
    Cartesian2D,
    Cartesian3D,
    CoordinateSystem,
    Cylindrical3D,
    Polar2D,
    Polar3D,
    PtEtaPhiE4D,
    PtEtaPhiM4D,
    PxPyPzE4D,
    PxPyPzM4D,
)


class _Vector:
    dim: ClassVar[int]
    _default_system: ClassVar[type[CoordinateSystem]]

    __slots__ = ("_coords",)

    def __init__(self, coords: CoordinateSystem | None = None):
        if coords is None:
            coords = self._default_system()
        elif not isinstance(coords, CoordinateSystem) or coords.dim != self.dim:
            raise TypeError(
                f"{type(self).__name__} needs a {self.dim}D coordinate system, got {coords!r}"
            )
        object.__setattr__(self, "_coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def _from_components(cls, system, values, dtype):
        return cls(system._make(values, dtype))

    @property
    def coordinates(self) -> CoordinateSystem:
        return self._coords

    @property
    def system(self) -> type[CoordinateSystem]:
        return type(self._coords)

    @property
    def dtype(self) -> np.dtype:
        return self._coords.dtype

    def components(self) -> tuple:
        return self._coords.values

    def cartesian(self) -> tuple:
        return tuple(self.dtype.type(c) for c in self.system.to_cartesian(*self._coords.values))

    def convert(self, system: type[CoordinateSystem]):
        """The same vector expressed in ``system``."""
        if system is self.system:
            return self
        vals = self.system.convert_components(system, *self._coords.values)
        return self._from_components(system, vals, self.dtype)

    def _acc(self, name: str):
        return self.dtype.type(getattr(self.system, name)(*self._coords.values))

    def _check_operand(self, other):
        if type(other) is not type(self):
            return False
        if other.system is not self.system or other.dtype != self.dtype:
            raise TypeError(
                "operands must share coordinate system and precision: "
                f"{self.system.__name__}/{self.dtype} vs {other.system.__name__}/{other.dtype}"
            )
        return True

    def _from_cartesian(self, cart):
        return self._from_components(self.system, self.system.from_cartesian(*cart), self.dtype)

    def __add__(self, other):
        if not self._check_operand(other):
            return NotImplemented
        a = self.system.to_cartesian(*self._coords.values)
        b = other.system.to_cartesian(*other._coords.values)
        return self._from_cartesian(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other):
        if not self._check_operand(other):
            return NotImplemented
        a = self.system.to_cartesian(*self._coords.values)
        b = other.system.to_cartesian(*other._coords.values)
        return self._from_cartesian(tuple(x - y for x, y in zip(a, b)))

    def __neg__(self):
        return self._from_cartesian(tuple(-x for x in self.system.to_cartesian(*self._coords.values)))

    def __pos__(self):
        return self

    def __mul__(self, k):
        if isinstance(k, _Vector) or not np.isscalar(k):
            return NotImplemented
        k = self.dtype.type(k)
        return self._from_cartesian(tuple(x * k for x in self.system.to_cartesian(*self._coords.values)))

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, _Vector) or not np.isscalar(k):
            return NotImplemented
        k = self.dtype.type(k)
        return self._from_cartesian(tuple(x / k for x in self.system.to_cartesian(*self._coords.values)))

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._coords == other._coords

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((type(self), self._coords))

    def phi(self):
        return self._acc("phi_of")


class Vec2(_Vector):
    dim = 2
    _default_system = Cartesian2D
    __slots__ = ()

    def x(self):
        return self._acc("x_of")

    def y(self):
        return self._acc("y_of")

    def r(self):
        return self._acc("r_of")

    def dot(self, other: Vec2):
        ax, ay = self.cartesian()
        bx, by = other.cartesian()
        return ax * bx + ay * by


class Vec3(_Vector):
    dim = 3
    _default_system = Cartesian3D
    __slots__ = ()

    def x(self):
        return self._acc("x_of")

    def y(self):
        return self._acc("y_of")

    def z(self):
        return self._acc("z_of")

    def r(self):
        return self._acc("r_of")

    mag = r

    def mag2(self):
        return self._acc("mag2_of")

    def rho(self):
        return self._acc("rho_of")

    def theta(self):
        return self._acc("theta_of")

    def eta(self):
        return self._acc("eta_of")

    def dot(self, other: Vec3):
        ax, ay, az = self.cartesian()
        bx, by, bz = other.cartesian()
        return ax * bx + ay * by + az * bz

    def cross(self, other: Vec3) -> Vec3:
        ax, ay, az = self.cartesian()
        bx, by, bz = other.cartesian()
        cart = (ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx)
        return self._from_cartesian(cart)

    def unit(self) -> Vec3:
        r = self.r()
        return self if r == 0 else self / r


class Vec4(_Vector):
    """Lorentz vector; accessors follow the (px, py, pz, E) metric E^2 - |p|^2."""

    dim = 4
    _default_system = PxPyPzE4D
    __slots__ = ()

    def px(self):
        return self._acc("px_of")

    def py(self):
        return self._acc("py_of")

    def pz(self):
        return self._acc("pz_of")

    def e(self):
        return self._acc("e_of")

    energy = e

    def pt(self):
        return self._acc("pt_of")

    def eta(self):
        return self._acc("eta_of")

    def theta(self):
        return self._acc("theta_of")

    def p(self):
        return self._acc("p_of")

    def mass2(self):
        return self._acc("mass2_of")

    def mass(self):
        """Invariant mass; negative (-sqrt(-m^2)) for spacelike vectors."""
        return self._acc("mass_of")

    m = mass

    def rapidity(self):
        return self._acc("rapidity_of")

    def beta(self):
        return self._acc("beta_of")

    def gamma(self):
        """E/m; +inf when the mass is zero or negative."""
        return self._acc("gamma_of")

    def vect(self) -> Vec3:
        px, py, pz, _ = self.cartesian()
        return Vec3(Cartesian3D._make((px, py, pz), self.dtype))


def delta_phi(a: _Vector, b: _Vector):
    """phi(a) - phi(b) folded into (-pi, pi]."""
    dt = np.result_type(a.dtype, b.dtype)
    return dt.type(wrap_phi(dt.type(a.phi()) - dt.type(b.phi())))


def delta_r(a: Vec4 | Vec3, b: Vec4 | Vec3):
    dt = np.result_type(a.dtype, b.dtype)
    deta = dt.type(a.eta()) - dt.type(b.eta())
    dphi = delta_phi(a, b)
    return dt.type(np.sqrt(deta * deta + dphi * dphi))


# Named conveniences in the style of the classic typedefs.


def XYVector(x=0.0, y=0.0, *, dtype=None) -> Vec2:
    return Vec2(Cartesian2D(x, y, dtype=dtype))


def Polar2DVector(r=0.0, phi=0.0, *, dtype=None) -> Vec2:
    return Vec2(Polar2D(r, phi, dtype=dtype))


def XYZVector(x=0.0, y=0.0, z=0.0, *, dtype=None) -> Vec3:
    return Vec3(Cartesian3D(x, y, z, dtype=dtype))


def Polar3DVector(r=0.0, theta=0.0, phi=0.0, *, dtype=None) -> Vec3:
    return Vec3(Polar3D(r, theta, phi, dtype=dtype))


def RhoPhiZVector(rho=0.0, phi=0.0, z=0.0, *, dtype=None) -> Vec3:
    return Vec3(Cylindrical3D(rho, phi, z, dtype=dtype))


def PxPyPzEVector(px=0.0, py=0.0, pz=0.0, e=0.0, *, dtype=None) -> Vec4:
    return Vec4(PxPyPzE4D(px, py, pz, e, dtype=dtype))


def PxPyPzMVector(px=0.0, py=0.0, pz=0.0, m=0.0, *, dtype=None) -> Vec4:
    return Vec4(PxPyPzM4D(px, py, pz, m, dtype=dtype))


def PtEtaPhiEVector(pt=0.0, eta=0.0, phi=0.0, e=0.0, *, dtype=None) -> Vec4:
    return Vec4(PtEtaPhiE4D(pt, eta, phi, e, dtype=dtype))


def PtEtaPhiMVector(pt=0.0, eta=0.0, phi=0.0, m=0.0, *, dtype=None) -> Vec4:
    return Vec4(PtEtaPhiM4D(pt, eta, phi, m, dtype=dtype))


LorentzVector = Vec4
