__version__ = "0.1.0"


# Set default logging handler to avoid "No handler found" warnings.
import logging
from logging import NullHandler

logging.getLogger(__name__).addHandler(NullHandler())

from hardybear.certify import (
    InvarianceReport,
    Route,
    SchurVerdict,
    VerdictStatus,
    certify_invariance,
    construct_invariant_inner,
    elliptic_constant,
    is_inner_eigenfunction,
    multiplicity_table,
    quotient_samples,
    schur_membership,
)
from hardybear.config import DEFAULT_TOLERANCES, Tolerances
from hardybear.inner import (
    InnerFunction,
    atomic_singular,
    blaschke_factor,
    finite_blaschke,
    inner_eval,
    inner_mult,
    inner_product,
    monomial,
    orbit_blaschke,
    riesz_factor,
    unimodular_constant,
)
from hardybear.maps import (
    DiskAutomorphism,
    LinearFractionalMap,
    MapClass,
    automorphism,
    classify_automorphism,
    denjoy_wolff,
    fixed_points,
    half_plane_conjugate,
    iterate,
    parabolic_from_translation,
    rotation,
    sup_modulus,
)
from hardybear.orbits import jones_refutation, parabolic_orbit_report
from hardybear.series import (
    PowerSeries,
    cphi_section,
    invariance_residual,
    invariance_residual_with_band,
    kernel_map_norm,
    mtheta_section,
    series_compose,
    taylor_of_inner,
    taylor_of_map,
)
