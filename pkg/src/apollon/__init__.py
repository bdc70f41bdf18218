"""Hyperbolic-type metrics on proper subdomains of R^n, and estimators for
the structural constants relating them."""

__version__ = "0.1.0"

from .domains import (Ball, Domain, DomainError, HalfSpace, LatticeComplement, Polygon2D,  # noqa: E402
                      PuncturedSpace, SampledBoundary, SegmentExitsDomain, Slab, SpecError,
                      dist_to_boundary, domain_from_dict, sample_boundary)
from .estimators import (KBackend, MetricFault, NumericalFault, a_uniformity_ratio, fit_uniformity,  # noqa: E402
                         gromov_delta_4pt, natural_check, phi_envelope, quasi_isotropy)
from .geometry import INF, DegenerateQuadruple, apollonian_cross_ratio, cross_ratio, mobius_inversion  # noqa: E402
from .maps import (Affine, Composition, Inversion, RadialPower, UnsupportedPair, apply_map,  # noqa: E402
                   estimate_qm_theta, estimate_rough_bilipschitz, inverse, linear_dilatation,
                   map_from_dict, push_domain)
from .metrics import (MetricEstimate, apollonian, h_metric, j_metric, r_of_segment, r_ratio,  # noqa: E402
                      seittenranta)
from .qh import NotConnected, qh_distance, qh_distance_exact, qh_geodesic  # noqa: E402
from .sampling import closure_quadruples, local_pair_sample, pair_sample, quadruple_sample  # noqa: E402
