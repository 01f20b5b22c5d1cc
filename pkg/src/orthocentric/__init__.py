"""Solid angles, intrinsic volumes and classification for orthocentric simplices and cones.

The most common entry points are re-exported here; the submodules
``specfun``, ``gram``, ``gfun``, ``cones``, ``simplex``, ``gauss``, ``mc``
and ``cli`` hold the full API.
"""
from .errors import *  # noqa: F401,F403
from .gram import CaseLabel, ConeParams, gram_inverse, principal_minor, realize_generators, validate
from .quadrature import QuadratureConfig
from .gfun import AngleResult, Branch, g, g_all_positive, g_one_negative, shifted_orthant
from . import cones, gauss, gram, mc, simplex, specfun  # noqa: E402

__version__ = "0.1.0"
