"""Linear codes from the hypersurfaces V^r_eps over GF(q^2), q = 2^e, e odd.

Submodules: ``fields`` (the GF(2) < GF(q) < GF(q^2) tower), ``projective``
(points, subspaces, ranks), ``varieties`` (point enumeration and caching),
``codes`` (weights, minimality, generalized weights), ``cutgap`` (cutting
gaps) and ``cli``.
"""

from .codes import ProjectiveSystem, WeightTable, is_cutting, weight_distribution, weight_sample
from .fields import FieldTower, FiniteField, build_field
from .projective import Subspace
from .varieties import PointSet, VEps, enumerate_variety

__version__ = "0.1.0"

__all__ = [
    "FieldTower",
    "FiniteField",
    "PointSet",
    "ProjectiveSystem",
    "Subspace",
    "VEps",
    "WeightTable",
    "build_field",
    "enumerate_variety",
    "is_cutting",
    "weight_distribution",
    "weight_sample",
]
