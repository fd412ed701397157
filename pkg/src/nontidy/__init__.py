"""Exact verification that the iterated twisted-circle manifolds Xₙ have
Stiefel-Whitney height n but coindex 1."""

from nontidy.cohomology import Cochain, HeightReport, betti_mod2, cup, is_coboundary, loop_parity, sw_height, verify_height_shift
from nontidy.crystal import (
    AffineGroup,
    AffineMap,
    Dyadic,
    FixedSet,
    GammaElement,
    TorsionCertificate,
    act,
    average_orbit,
    coindex_one_witness,
    compose,
    element_order,
    find_odd_involution,
    fixed_points,
    lattice_and_point_group,
    parity,
    torsion_free_certificate,
)
from nontidy.gf2 import BitMatrix, BitVector, kernel_basis, rank, solve_in_span
from nontidy.pipeline import PipelineConfig, VerificationReport, emit_report, run_pipeline
from nontidy.simplicial import DeltaComplex, QuotientModel, boundary_matrices, build_quotient_model, holonomy_cocycle

__version__ = "0.1.0"
