"""Random eigenfunction periods on flat tori and the round sphere.

Exact laws, Monte Carlo checks and scaling sweeps for |int_S u| and
||u||_{L^q(S)} when u is uniform on the L^2 unit sphere of a spectral cluster.
"""
__version__ = "0.1.0"

from .errors import (ConfigError, DegenerateDraw, DomainError, EmptyCluster, InvalidDirection,
                     InvalidLength, PoorFit, QuadratureNotConverged, RandPeriodsError, Unbounded)
from .spectral import Cluster, Manifold, SpectralWindow, count_cluster, enumerate_cluster
from .curves import build_submanifold, quadrature
from .periods import period_vector
from .exactstats import ExactLaw, median_exact, moment_exact, survival_exact
