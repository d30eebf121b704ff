"""Exact computations in the Bruhat-Tits building of PGL_n(Q_p) and its compactification."""

from .apartment import (
    ApartmentPoint,
    Box,
    Corner,
    LatticeSeqSpec,
    RaySpec,
    act_monomial,
    contract,
    corner_chart,
    corner_chart_inv,
    corners_of,
    f_set,
    f_value,
    f_value_oracle,
    fundamental_nbhd,
    in_corner,
    lattice_seq_limit,
    nbhd_contains,
    project,
    ray_limit,
    ray_tail_certificate,
    root_eval,
)
from .errors import PreconditionError
from .group_action import (
    MonomialElement,
    ProjElement,
    RootGroupElement,
    act,
    conjugate_root_group,
    in_U_ax,
    preserves_subspace,
    psi,
    restrict,
    stabilizes,
    stabilizes_set,
    star_condition,
)
from .lattice_building import (
    BuildingGraph,
    Frame,
    LatticeClass,
    adjacent,
    ball,
    common_frame,
    is_simplex,
    neighbors,
    phi,
    phi_inv,
    rel_pos,
    verify_frame,
)
from .local_arith import INF, NEG_INF, elementary_divisors, hnf_local, vval
from .norm_points import (
    NormPoint,
    component_span,
    from_apartment,
    from_lattice,
    np_equal,
    np_eval,
    to_apartment,
    to_lattice,
)

__version__ = "0.1.0"
