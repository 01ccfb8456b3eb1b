"""Coordinate systems and the generic vectors built on them."""
from ._common import DOUBLE, ETA_MAX, RAPIDITY_MAX, SINGLE, precision_name, resolve_dtype, wrap_phi
from .systems import (
    SYSTEMS_2D,
    SYSTEMS_3D,
    SYSTEMS_4D,
    Cartesian2D,
    Cartesian3D,
    CoordinateSystem,
    CoordinateSystem2D,
    CoordinateSystem3D,
    CoordinateSystem4D,
    Cylindrical3D,
    Polar2D,
    Polar3D,
    PtEtaPhiE4D,
    PtEtaPhiM4D,
    PxPyPzE4D,
    PxPyPzM4D,
    system_by_name,
)
from .vectors import (
    LorentzVector,
    Polar2DVector,
    Polar3DVector,
    PtEtaPhiEVector,
    PtEtaPhiMVector,
    PxPyPzEVector,
    PxPyPzMVector,
    RhoPhiZVector,
    Vec2,
    Vec3,
    Vec4,
    XYVector,
    XYZVector,
    delta_phi,
    delta_r,
)
