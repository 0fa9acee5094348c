"""Exact computations on toric F-blowup fans of affine toric varieties.

Everything is done in rational arithmetic over N = M = Z^d.
"""

from .cones import Cone, ConeError, Fan, cone, dual_cone
from .monoid import hilbert_basis, minimal_s_sigma, classify_divisors
from .level import level_polyhedron, interior_lattice_point, ray_sufficient_test
from .deltafan import delta_fan, theta_and_diameter
from .arrows import critical_arrows_at, search_critical_arrows, min_cone_dim_bound

__all__ = [
    "Cone",
    "ConeError",
    "Fan",
    "cone",
    "dual_cone",
    "hilbert_basis",
    "minimal_s_sigma",
    "classify_divisors",
    "level_polyhedron",
    "interior_lattice_point",
    "ray_sufficient_test",
    "delta_fan",
    "theta_and_diameter",
    "critical_arrows_at",
    "search_critical_arrows",
    "min_cone_dim_bound",
]
