"""Numerical checks of stability for the L_p mixed-volume, L_p Brunn-Minkowski
and improved Jensen inequalities."""

from .jensen import (
    DiscreteDistribution,
    JensenReport,
    jensen_deficit,
    l1_deviation,
    log_jensen_gap,
    psi,
    psi_grid_oracle,
    stability_check,
    stability_constant,
    tsallis_entropy,
)
from .mixed import (
    ProofChainReport,
    StabilityReport,
    check_theorem_1,
    check_theorem_2,
    deficit_beta,
    deficit_delta,
    mixed_volume_p,
    proof_chain,
    relative_asymmetry,
    sigma,
)
from .planar import (
    Ball,
    Body,
    Dilate,
    LpSum,
    Polygon,
    convex_hull_union,
    intersection,
    lp_combination,
    polygon_from_vertices,
    support,
    support_polytope,
    surface_area_measure,
    symmetric_difference_area,
    volume,
)
from .sharpness import EpsilonScan, ball_asymmetry, ball_delta_p, sharpness_scan, sphere_mean

__version__ = "0.1.0"
