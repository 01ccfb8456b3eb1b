"""Lorentz-vector kinematics with data-parallel batch kernels.

Subpackages and modules:

* :mod:`kinematix.coords` -- coordinate systems and generic Vec2/Vec3/Vec4
* :mod:`kinematix.transforms` -- rotations, axis-angle, boosts
* :mod:`kinematix.kernels` -- invariant-mass and boost batch kernels, backends
* :mod:`kinematix.bench` -- weak-scaling benchmark CLI
* :mod:`kinematix.divergence` -- code similarity / divergence analyzer
"""
from .coords import (
    Cartesian2D,
    Cartesian3D,
    Cylindrical3D,
    Polar2D,
    Polar3D,
    PtEtaPhiE4D,
    PtEtaPhiM4D,
    PxPyPzE4D,
    PxPyPzM4D,
    Vec2,
    Vec3,
    Vec4,
    delta_phi,
    delta_r,
)
from .kernels import Parallel, ParticleBatch, Sequential, apply_boost, dispatch, invariant_masses
from .transforms import AxisAngle, Boost, LorentzTransform, Rotation3D, apply, compose, invert

__version__ = "0.1.0"
